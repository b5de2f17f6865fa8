# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf

from . import catalog
from .errors import DomainError, DoubleTaylorError
from .series_core import (
    DEFAULT_PRECISION,
    MIN_PRECISION,
    PiLaurent,
    is_exact,
    same_point,
    sign_of,
    to_mpf,
)
from .taylor_bounds import (
    corollary1_bounds,
    first_taylor,
    second_taylor,
    split_series,
    theorem2_bounds,
)
from .verify import (
    DEFAULT_GRID,
    DEFAULT_SEED,
    DIGITS,
    SUITES,
    Spacing,
    Verdict,
    check_nesting,
    default_grid,
    export_report,
    export_suites,
    overall,
    run_suite,
    run_suites,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

FORMATS = ("json", "csv", "text")
BOUND_KINDS = ("first", "second", "split", "corollary")


@dataclass(frozen=True)
class CliConfig:
    precision_bits: int = DEFAULT_PRECISION
    grid_count: int = DEFAULT_GRID
    output: Optional[str] = None
    format: str = "text"
    seed: int = DEFAULT_SEED
    decimal: bool = False

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise DomainError(
                f"--precision must be at least {MIN_PRECISION}, "
                f"got {self.precision_bits}"
            )
        if self.grid_count < 3:
            raise DomainError(
                f"--grid must be at least 3, got {self.grid_count}"
            )
        if self.format not in FORMATS:
            raise DomainError(f"unknown format {self.format!r}")


def exit_status(reports):
    verdict = overall(reports)
    if verdict is Verdict.FAIL:
        return EXIT_FAIL
    if verdict is Verdict.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def format_scalar(c, decimal=False, precision_bits=DEFAULT_PRECISION):
    if decimal or not is_exact(c):
        return mp.nstr(to_mpf(c, precision_bits), DIGITS)
    return str(c)


def _negative(c):
    if isinstance(c, PiLaurent) and not c.is_monomial:
        return False
    if isinstance(c, mpf):
        return c < 0
    return sign_of(c) < 0


def format_poly(p, decimal=False, precision_bits=DEFAULT_PRECISION):
    """Render p as text, e.g. ``2 + 2/45·x^4``."""
    if same_point(p.anchor, 0):
        var = "x"
    else:
        var = f"(x - {format_scalar(p.anchor, decimal, precision_bits)})"
    out = ""
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        negative = _negative(c)
        text = format_scalar(-c if negative else c, decimal, precision_bits)
        if isinstance(c, PiLaurent) and not c.is_monomial and not decimal:
            text = f"({text})"
        if k:
            power = var if k == 1 else f"{var}^{k}"
            text = power if text == "1" else f"{text}·{power}"
        if not out:
            out = f"-{text}" if negative else text
        else:
            out += f" - {text}" if negative else f" + {text}"
    return out or "0"


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise DoubleTaylorError(f"cannot write {output}: {e}") from e


def _emit_rows(rows, config, text_lines):
    if config.format == "json":
        text = json.dumps(rows, indent=2, ensure_ascii=False) + "\n"
    elif config.format == "csv":
        out = io.StringIO()
        writer = csv.DictWriter(
            out, fieldnames=list(rows[0]), lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(rows)
        text = out.getvalue()
    else:
        text = "\n".join(text_lines) + "\n"
    _emit(text, config.output)


def cmd_list(config):
    rows = []
    lines = []
    for name in catalog.names():
        entry = catalog.lookup(name)
        f = entry.series
        interval = f"({f.anchor}, {f.right_end})"
        if f.has_endpoint:
            limit = f.end_limit(config.precision_bits)
            end_decimal = mp.nstr(limit, DIGITS)
            end = end_decimal
            if f.end_value is not None:
                end = format_scalar(f.end_value)
            end_text = f"end {end} ≈ {end_decimal}"
        else:
            end, end_decimal = "none", "none"
            end_text = "no endpoint"
        rows.append(
            {
                "name": name,
                "interval": interval,
                "sign_pattern": str(f.sign_pattern),
                "end_limit": end,
                "end_limit_decimal": end_decimal,
                "formula": entry.formula,
                "citation": entry.citation,
            }
        )
        lines.append(
            f"{name}  {interval}  {f.sign_pattern}  {end_text}  "
            f"[{entry.formula}]  ({entry.citation})"
        )
    _emit_rows(rows, config, lines)


def _bounds(f, kind, degree, precision_bits):
    if kind == "first":
        return [("T", first_taylor(f, degree))]
    if kind == "second":
        return [("S", second_taylor(f, degree, precision_bits))]
    s = split_series(f, catalog.SCAN_LIMIT)
    if kind == "split":
        lower, upper = theorem2_bounds(s, degree, precision_bits)
    else:
        lower, upper = corollary1_bounds(s, degree, precision_bits)
    return [("lower", lower), ("upper", upper)]


def cmd_bound(fn, kind, degree, config, mirror=False):
    entry = catalog.lookup(fn)
    if mirror:
        entry = entry.mirrored()
    f = entry.series
    P = config.precision_bits
    rows = []
    lines = [f"{fn} {kind} {degree}" + (" (mirrored)" if mirror else "")]
    for role, p in _bounds(f, kind, degree, P):
        coeffs = [format_scalar(c, config.decimal, P) for c in p.coeffs]
        text = format_poly(p, config.decimal, P)
        rows.append(
            {
                "function": fn,
                "kind": kind,
                "role": role,
                "degree": degree,
                "anchor": format_scalar(p.anchor, config.decimal, P),
                "coefficients": coeffs,
                "polynomial": text,
            }
        )
        if role in ("lower", "upper"):
            lines.append(f"{role}: {text}")
        else:
            lines.append(f"anchor: {rows[-1]['anchor']}")
            lines.append(text)
    if config.format == "csv":
        for row in rows:
            row["coefficients"] = " ".join(row["coefficients"])
    _emit_rows(rows, config, lines)


def cmd_chain(fn, degrees, config, mirror=False, spacing=Spacing.CHEBYSHEV):
    entry = catalog.lookup(fn)
    if mirror:
        entry = entry.mirrored()
    grid = default_grid(entry.series, config.grid_count, spacing)
    report = check_nesting(entry, degrees, grid, config.precision_bits)
    export_report([report], config.format, config.output)
    return [report]


def cmd_verify(suite, config):
    P, grid, seed = config.precision_bits, config.grid_count, config.seed
    if suite == "all":
        results = run_suites(SUITES, P, grid, seed)
        export_suites(results, config.format, config.output)
        return [r for s in results for r in s.reports]
    reports = run_suite(suite, P, grid, seed)
    export_report(reports, config.format, config.output)
    return reports


def degree_list(text):
    try:
        degrees = [int(d) for d in text.split(",") if d.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"degrees must be a comma separated list of integers: {text!r}"
        ) from None
    if not degrees:
        raise argparse.ArgumentTypeError("at least one degree is needed")
    return degrees


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common_flags():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--precision",
        type=int,
        default=DEFAULT_PRECISION,
        help="working precision in bits",
    )
    parser.add_argument(
        "--grid", type=int, default=DEFAULT_GRID, help="sample grid size"
    )
    parser.add_argument(
        "--format",
        choices=FORMATS,
        default=None,
        help="output format; json for chain and verify, text otherwise",
    )
    parser.add_argument(
        "--output", type=str, default="-", help="output path, - for stdout"
    )
    parser.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help="random seed"
    )
    parser.add_argument(
        "--decimal",
        action="store_true",
        help="print coefficients as 40 digit decimals",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log to stderr, -vv for debug output",
    )
    return parser


def parse_args(argv=None):
    common = _common_flags()
    parser = _Parser(
        prog="double-taylor",
        description="Double-sided Taylor approximations and their checks",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    kwargs = dict(
        parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )

    p = sub.add_parser("list", help="list the function catalog", **kwargs)
    p.set_defaults(handler=_run_list, default_format="text")

    p = sub.add_parser("bound", help="print one approximation", **kwargs)
    p.add_argument("fn", help="catalog name, e.g. wilker or h1")
    p.add_argument("kind", choices=BOUND_KINDS)
    p.add_argument("degree", type=int)
    p.add_argument(
        "--mirror",
        action="store_true",
        help="use x -> a + b - x, expanded at the right end",
    )
    p.set_defaults(handler=_run_bound, default_format="text")

    p = sub.add_parser("chain", help="check a nesting chain", **kwargs)
    p.add_argument("fn", help="catalog name")
    p.add_argument("degrees", type=degree_list, help="e.g. 0,2,4,6")
    p.add_argument(
        "--mirror",
        action="store_true",
        help="use x -> a + b - x, expanded at the right end",
    )
    p.add_argument(
        "--spacing",
        choices=[s.value for s in Spacing],
        default=Spacing.CHEBYSHEV.value,
        help="grid spacing",
    )
    p.set_defaults(handler=_run_chain, default_format="json")

    p = sub.add_parser("verify", help="run a verification suite", **kwargs)
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.set_defaults(handler=_run_verify, default_format="json")

    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    logger.debug("arguments: %s", args)
    return args


def _run_list(args, config):
    cmd_list(config)


def _run_bound(args, config):
    cmd_bound(args.fn, args.kind, args.degree, config, args.mirror)


def _run_chain(args, config):
    return cmd_chain(
        args.fn, args.degrees, config, args.mirror, Spacing(args.spacing)
    )


def _run_verify(args, config):
    return cmd_verify(args.suite, config)


def _configure_logging(verbose):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
        force=True,
    )


def run(argv=None):
    args = parse_args(argv)
    try:
        config = CliConfig(
            precision_bits=args.precision,
            grid_count=args.grid,
            output=args.output,
            format=args.format or args.default_format,
            seed=args.seed,
            decimal=args.decimal,
        )
        reports = args.handler(args, config)
    except DoubleTaylorError as e:
        print(f"double-taylor: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if reports is None:
        return EXIT_OK
    return exit_status(reports)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
