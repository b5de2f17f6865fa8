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

"""Sampled checks of bound chains, identities and endpoint constants.

Every check produces a VerifyReport. Sampling is evidence, not proof, and
reports say so through their ``empirical`` flag. A margin counts only when
it clears the guard, which is derived from the working precision.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Tuple

import numpy as np
from mpmath import mp, mpf

from . import catalog
from .errors import DomainError, DoubleTaylorError, EvaluationError
from .series_core import (
    DEFAULT_PRECISION,
    PiLaurent,
    check_precision,
    exact,
    is_exact,
    poly_eval,
    to_mpf,
)
from .taylor_bounds import (
    first_taylor,
    nesting_chain,
    second_taylor,
    successive_difference,
)

logger = logging.getLogger(__name__)

DIGITS = 40
DEFAULT_GRID = 101
DEFAULT_SEED = 0
DEFAULT_EPS = (Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))


class Spacing(Enum):
    UNIFORM = "uniform"
    CHEBYSHEV = "chebyshev"


class Verdict(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class SampleGrid:
    lo: object
    hi: object
    count: int = DEFAULT_GRID
    spacing: Spacing = Spacing.CHEBYSHEV

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 3:
            raise DomainError(
                f"grid needs at least 3 points, got {self.count}"
            )
        with mp.workprec(DEFAULT_PRECISION):
            if not to_mpf(self.lo) < to_mpf(self.hi):
                raise DomainError(
                    f"grid bounds out of order: {self.lo} >= {self.hi}"
                )

    def points(self, precision_bits=DEFAULT_PRECISION):
        """Sample points in ascending order, both ends included."""
        with mp.workprec(precision_bits):
            lo = to_mpf(self.lo)
            hi = to_mpf(self.hi)
            last = self.count - 1
            idx = range(self.count)
            if self.spacing is Spacing.UNIFORM:
                pts = [lo + (hi - lo) * i / last for i in idx]
            else:
                mid = (lo + hi) / 2
                half = (hi - lo) / 2
                pts = [mid - half * mp.cos(mp.pi * i / last) for i in idx]
                # the cosine does not hit the ends exactly
                pts[0], pts[-1] = lo, hi
            return pts


def default_grid(f, count=DEFAULT_GRID, spacing=Spacing.CHEBYSHEV):
    """Grid on [a + (b - a)/200, b - (b - a)/200]."""
    a, b = f.anchor, f.right_end
    if is_exact(a) and is_exact(b):
        margin = exact((b - a) / 200)
        lo, hi = exact(a + margin), exact(b - margin)
    else:
        with mp.workprec(DEFAULT_PRECISION):
            margin = (to_mpf(b) - to_mpf(a)) / 200
            lo, hi = to_mpf(a) + margin, to_mpf(b) - margin
    return SampleGrid(lo, hi, count, spacing)


@dataclass(frozen=True)
class Curve:
    name: str
    evaluate: Callable[[mpf, int], mpf]


def poly_curve(name, poly):
    return Curve(name, lambda x, p: poly_eval(poly, x, p))


@dataclass(frozen=True)
class Sample:
    x: mpf
    values: Tuple[mpf, ...]
    margin: mpf


@dataclass(frozen=True)
class VerifyReport:
    subject: str
    curves: Tuple[str, ...]
    samples: Tuple[Sample, ...]
    min_margin: mpf
    guard: mpf
    verdict: Verdict
    precision_bits: int
    empirical: bool = True
    details: Dict[str, object] = field(default_factory=dict)


def _verdict(min_margin, guard):
    if min_margin > guard:
        return Verdict.PASS
    if min_margin < -guard:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def overall(reports):
    verdicts = {r.verdict for r in reports}
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


def _evaluate(curve, x, precision_bits):
    try:
        v = curve.evaluate(x, precision_bits)
    except (DomainError, ValueError, ZeroDivisionError) as e:
        raise EvaluationError(
            f"{curve.name} failed at x = {mp.nstr(x, 20)}: {e}", x
        ) from e
    if not mp.isfinite(v):
        raise EvaluationError(
            f"{curve.name} is not finite at x = {mp.nstr(x, 20)}", x
        )
    return v


def check_chain(
    curves,
    grid,
    precision_bits=DEFAULT_PRECISION,
    subject="chain",
    relations=None,
):
    """Check curves[0] < curves[1] < ... at every grid point.

    ``relations`` gives one of "<" or "=" per adjacent pair. An "=" pair
    is only required to agree within the guard and does not contribute a
    margin otherwise.
    """
    precision_bits = check_precision(precision_bits)
    curves = list(curves)
    if len(curves) < 2:
        raise DomainError("a chain needs at least two curves")
    if relations is None:
        relations = ["<"] * (len(curves) - 1)
    relations = list(relations)
    if len(relations) != len(curves) - 1:
        raise DomainError(
            f"{len(curves)} curves need {len(curves) - 1} relations, "
            f"got {len(relations)}"
        )
    if "<" not in relations or set(relations) - {"<", "="}:
        raise DomainError(f"bad relations {relations}")

    rows = []
    with mp.workprec(precision_bits):
        scale = mpf(0)
        for x in grid.points(precision_bits):
            values = tuple(_evaluate(c, x, precision_bits) for c in curves)
            scale = max([scale] + [abs(v) for v in values])
            rows.append((x, values))
        guard = mpf(2) ** (-precision_bits // 2) * (1 + scale)

        samples = []
        for x, values in rows:
            margins = []
            for rel, u, v in zip(relations, values, values[1:]):
                d = v - u
                if rel == "<":
                    margins.append(d)
                elif abs(d) > guard:
                    margins.append(-abs(d))
            samples.append(Sample(x, values, min(margins)))
        min_margin = min(s.margin for s in samples)

    verdict = _verdict(min_margin, guard)
    logger.debug(
        "%s: %s, min margin %s",
        subject,
        verdict.value,
        mp.nstr(min_margin, 8),
    )
    return VerifyReport(
        subject=subject,
        curves=tuple(c.name for c in curves),
        samples=tuple(samples),
        min_margin=min_margin,
        guard=guard,
        verdict=verdict,
        precision_bits=precision_bits,
    )


def chain_curves(chain, entry):
    """Curves of a nesting chain with the function itself in the middle.

    Adjacent bounds that are the same polynomial (T_0 and T_1 of an even
    series, say) are related by "=".
    """
    lowers = list(chain.lowers)
    uppers = list(reversed(chain.uppers))
    polys = [b.poly for b in lowers] + [None] + [b.poly for b in uppers]
    curves = (
        [poly_curve(b.label, b.poly) for b in lowers]
        + [Curve(entry.name, entry.oracle)]
        + [poly_curve(b.label, b.poly) for b in uppers]
    )
    relations = []
    for p, q in zip(polys, polys[1:]):
        same = p is not None and q is not None and p == q
        relations.append("=" if same else "<")
    return curves, relations


def check_nesting(
    entry,
    degrees,
    grid=None,
    precision_bits=DEFAULT_PRECISION,
):
    """Build the nesting chain of a catalog entry and sample it."""
    precision_bits = check_precision(precision_bits)
    f = entry.series
    degrees = list(degrees)
    chain = nesting_chain(f, degrees, precision_bits)
    curves, relations = chain_curves(chain, entry)
    if grid is None:
        grid = default_grid(f)
    degrees_text = ",".join(str(d) for d in degrees)
    return check_chain(
        curves,
        grid,
        precision_bits,
        subject=f"chain {f.name} {degrees_text}",
        relations=relations,
    )


def check_identity12(
    f,
    n_max,
    trials,
    seed=DEFAULT_SEED,
    precision_bits=DEFAULT_PRECISION,
):
    """Compare S_n - S_{n+1} built directly with its closed form at random
    (n, x) drawn from a seeded generator."""
    precision_bits = check_precision(precision_bits)
    if n_max < 0 or trials < 1:
        raise DomainError(
            f"need n_max >= 0 and trials >= 1, got {n_max}, {trials}"
        )
    rng = np.random.default_rng(seed)
    seconds = {}

    def second(n):
        if n not in seconds:
            seconds[n] = second_taylor(f, n, precision_bits)
        return seconds[n]

    samples = []
    with mp.workprec(precision_bits):
        max_residual = mpf(0)
        a = to_mpf(f.anchor)
        span = to_mpf(f.right_end) - a
        for _ in range(trials):
            n = int(rng.integers(0, n_max + 1))
            u = Fraction(int(rng.integers(1, 2**53)), 2**53)
            x = a + span * to_mpf(u)
            sn = poly_eval(second(n), x, precision_bits)
            sn1 = poly_eval(second(n + 1), x, precision_bits)
            direct = sn - sn1
            closed = successive_difference(f, n, x, precision_bits)
            residual = abs(direct - closed)
            max_residual = max(max_residual, residual)
            tol = mpf(2) ** (32 - precision_bits) * (1 + abs(sn) + abs(sn1))
            samples.append(Sample(x, (direct, closed), tol - residual))
        samples.sort(key=lambda s: s.x)
        min_margin = min(s.margin for s in samples)
        guard = mpf(2) ** -precision_bits

    verdict = _verdict(min_margin, guard)
    logger.debug(
        "identity for %s: max residual %s",
        f.name,
        mp.nstr(max_residual, 8),
    )
    return VerifyReport(
        subject=f"identity12 {f.name}",
        curves=("S_n - S_n+1", "closed form"),
        samples=tuple(samples),
        min_margin=min_margin,
        guard=guard,
        verdict=verdict,
        precision_bits=precision_bits,
        details={
            "max_residual": max_residual,
            "n_max": n_max,
            "trials": trials,
            "seed": seed,
        },
    )


def check_best_constants(
    f,
    oracle,
    lower_const,
    upper_const,
    eps_list=DEFAULT_EPS,
    precision_bits=DEFAULT_PRECISION,
):
    """Sample f(a + eps) -> lower_const and f(b - eps) -> upper_const.

    Each sample must lie within 10 eps of its limit and closer than the
    sample at the previous, larger eps.
    """
    precision_bits = check_precision(precision_bits)
    if not eps_list:
        raise DomainError("eps_list is empty")
    samples = []
    with mp.workprec(precision_bits):
        eps_values = sorted((to_mpf(e) for e in eps_list), reverse=True)
        a = to_mpf(f.anchor)
        b = to_mpf(f.right_end)
        for start, step, const in ((a, 1, lower_const), (b, -1, upper_const)):
            limit = to_mpf(const)
            prev = None
            for eps in eps_values:
                x = start + step * eps
                value = oracle(x, precision_bits)
                dist = abs(value - limit)
                margin = 10 * eps - dist
                if prev is not None:
                    margin = min(margin, prev - dist)
                prev = dist
                samples.append(Sample(x, (value, limit), margin))
        samples.sort(key=lambda s: s.x)
        min_margin = min(s.margin for s in samples)
        guard = mpf(2) ** (-precision_bits // 2)

    verdict = _verdict(min_margin, guard)
    logger.debug("constants for %s: %s", f.name, verdict.value)
    return VerifyReport(
        subject=f"constants {f.name}",
        curves=(f.name, "limit"),
        samples=tuple(samples),
        min_margin=min_margin,
        guard=guard,
        verdict=verdict,
        precision_bits=precision_bits,
        details={"lower": lower_const, "upper": upper_const},
    )


def steckin_grid(count=DEFAULT_GRID, spacing=Spacing.UNIFORM):
    return SampleGrid(
        Fraction(1, 100), catalog.HALF_PI - Fraction(1, 100), count, spacing
    )


def check_steckin_example(grid=None, precision_bits=DEFAULT_PRECISION):
    """Q_1 < S_1 < g < T_1 = R_1, all in t = pi/2 - x.

    Q_1 and R_1 are the lines 2/pi - (pi/2 - x)/2 and 2/pi - (pi/2 - x)/3;
    S_1 and T_1 are built on g(pi/2 - x) expanded at x = pi/2.
    """
    precision_bits = check_precision(precision_bits)
    if grid is None:
        grid = steckin_grid()
    entry = catalog.lookup("steckin-g").mirrored()
    s1 = second_taylor(entry.series, 1, precision_bits)
    t1 = first_taylor(entry.series, 1)

    def line(slope):
        def evaluate(x, p):
            with mp.workprec(p):
                return 2 / mp.pi - to_mpf(slope) * (mp.pi / 2 - x)

        return evaluate

    curves = [
        Curve("Q_1", line(Fraction(1, 2))),
        poly_curve("S_1", s1),
        Curve("g(pi/2-x)", entry.oracle),
        poly_curve("T_1", t1),
        Curve("R_1", line(Fraction(1, 3))),
    ]
    report = check_chain(
        curves,
        grid,
        precision_bits,
        subject="steckin",
        relations=["<", "<", "<", "="],
    )

    slope = Fraction(1, 2) - PiLaurent.monomial(4, -2)
    with mp.workprec(precision_bits):
        worst = mpf(0)
        for s in report.samples:
            gap = s.values[1] - s.values[0]
            expected = to_mpf(slope) * (mp.pi / 2 - s.x)
            worst = max(worst, abs(gap - expected))
        report.details.update(
            improvement_slope=slope,
            improvement_slope_decimal=to_mpf(slope),
            improvement_residual=worst,
        )
    return report


def check_interpolation(f, degrees, precision_bits=DEFAULT_PRECISION):
    """S_d(b) = f(b-) for every listed degree, to 2^(16-P) relative."""
    precision_bits = check_precision(precision_bits)
    degrees = list(degrees)
    if not degrees:
        raise DomainError("at least one degree is needed")
    samples = []
    names = []
    with mp.workprec(precision_bits):
        end = f.end_limit(precision_bits)
        b = to_mpf(f.far_end)
        tol = mpf(2) ** (16 - precision_bits) * (1 + abs(end))
        for d in degrees:
            s_d = second_taylor(f, d, precision_bits)
            value = poly_eval(s_d, b, precision_bits)
            residual = abs(value - end)
            samples.append(Sample(b, (value, end), tol - residual))
            names.append(f"S_{d}")
        min_margin = min(s.margin for s in samples)
        guard = mpf(2) ** -precision_bits
    return VerifyReport(
        subject=f"interpolation {f.name}",
        curves=("S_d(b)", "f(b-)"),
        samples=tuple(samples),
        min_margin=min_margin,
        guard=guard,
        verdict=_verdict(min_margin, guard),
        precision_bits=precision_bits,
        details={"degrees": degrees, "bounds": names},
    )


def _text(v):
    if isinstance(v, mpf):
        return mp.nstr(v, DIGITS)
    if isinstance(v, (Fraction, PiLaurent)):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_text(u) for u in v]
    return v


def report_dict(r):
    return {
        "subject": r.subject,
        "verdict": r.verdict.value,
        "precision_bits": r.precision_bits,
        "guard": _text(r.guard),
        "min_margin": _text(r.min_margin),
        "empirical": r.empirical,
        "curves": list(r.curves),
        "samples": [
            {
                "x": _text(s.x),
                "values": [_text(v) for v in s.values],
                "margin": _text(s.margin),
            }
            for s in r.samples
        ],
        "details": {k: _text(v) for k, v in r.details.items()},
    }


def render_report(r):
    """One summary line per report, then its details."""
    lines = [
        f"{r.subject}: {r.verdict.value} "
        f"(min margin {mp.nstr(r.min_margin, 10)}, "
        f"guard {mp.nstr(r.guard, 5)}, {len(r.samples)} samples, "
        f"{r.precision_bits} bits)"
    ]
    for k, v in r.details.items():
        lines.append(f"  {k}: {_text(v)}")
    return "\n".join(lines)


def _write_csv(reports, out):
    writer = csv.writer(out, lineterminator="\n")
    for r in reports:
        writer.writerow(["x"] + list(r.curves))
        for s in r.samples:
            writer.writerow([_text(s.x)] + [_text(v) for v in s.values])


def format_reports(reports, fmt):
    reports = list(reports)
    if fmt == "json":
        if len(reports) == 1:
            payload = report_dict(reports[0])
        else:
            payload = {
                "verdict": overall(reports).value,
                "reports": [report_dict(r) for r in reports],
            }
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        body = "\n".join(render_report(r) for r in reports)
        return f"{body}\n"
    if fmt == "csv":
        out = io.StringIO()
        _write_csv(reports, out)
        return out.getvalue()
    raise DomainError(f"unknown format {fmt!r}")


def _write_text(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as out:
            out.write(text)
    except OSError as e:
        raise DoubleTaylorError(f"cannot write report to {path}: {e}") from e


def export_report(r, fmt="json", path=None):
    """Write one report (or a list of them) as json, csv or text.

    ``path`` None or "-" writes to stdout.
    """
    reports = r if isinstance(r, (list, tuple)) else [r]
    _write_text(format_reports(reports, fmt), path)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    reports: Tuple[VerifyReport, ...]

    @property
    def verdict(self):
        return overall(self.reports)


def format_suites(results, fmt):
    """Reports grouped by suite, with one verdict per suite."""
    results = list(results)
    reports = [r for s in results for r in s.reports]
    if fmt == "json":
        payload = {
            "verdict": overall(reports).value,
            "suites": [
                {
                    "suite": s.name,
                    "verdict": s.verdict.value,
                    "reports": [report_dict(r) for r in s.reports],
                }
                for s in results
            ],
        }
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        lines = []
        for s in results:
            lines.append(f"[{s.name}] {s.verdict.value}")
            lines.extend(render_report(r) for r in s.reports)
        return "\n".join(lines) + "\n"
    return format_reports(reports, fmt)


def export_suites(results, fmt="json", path=None):
    _write_text(format_suites(results, fmt), path)


def _wilker_suite(precision_bits, grid_count):
    entry = catalog.lookup("wilker")
    f = entry.series
    grid = default_grid(f, grid_count)
    reports = []
    for d in (4, 6, 8, 10):
        curves = [
            poly_curve(f"T_{d}", first_taylor(f, d)),
            Curve(entry.name, entry.oracle),
            poly_curve(f"S_{d}", second_taylor(f, d, precision_bits)),
        ]
        reports.append(
            check_chain(
                curves,
                grid,
                precision_bits,
                subject=f"wilker T_{d} < f < S_{d}",
            )
        )
    return reports


def _constants_suite(precision_bits):
    samples = (
        ("h1", Fraction(1, 3), PiLaurent.monomial(4, -2)),
        ("h2", Fraction(2, 15), PiLaurent.monomial(16, -4)),
        ("wilker", Fraction(2), PiLaurent.monomial(Fraction(1, 4), 2)),
        ("steckin-g", PiLaurent.monomial(2, -1), Fraction(0)),
    )
    reports = []
    for name, lower, upper in samples:
        entry = catalog.lookup(name)
        reports.append(
            check_best_constants(
                entry.series,
                entry.oracle,
                lower,
                upper,
                DEFAULT_EPS,
                precision_bits,
            )
        )
    return reports


def _chains_suite(precision_bits, grid_count):
    runs = (
        (catalog.lookup("h1"), (0, 2, 4, 6, 8)),
        (catalog.lookup("wilker"), (0, 2, 4, 6, 8, 10)),
        (catalog.lookup("cusa"), (0, 2, 4, 6)),
        (catalog.lookup("steckin-g").mirrored(), (1, 3, 5, 7)),
    )
    return [
        check_nesting(
            entry,
            degrees,
            default_grid(entry.series, grid_count),
            precision_bits,
        )
        for entry, degrees in runs
    ]


def _interpolation_suite(precision_bits):
    return [
        check_interpolation(
            catalog.lookup(name).series, range(9), precision_bits
        )
        for name in ("wilker", "h1", "cusa")
    ]


SUITES = (
    "steckin",
    "wilker",
    "identity12",
    "constants",
    "chains",
    "interpolation",
)


def run_suite(
    name,
    precision_bits=DEFAULT_PRECISION,
    grid_count=DEFAULT_GRID,
    seed=DEFAULT_SEED,
):
    """Run one named suite (or "all") and return its reports."""
    precision_bits = check_precision(precision_bits)
    if name == "all":
        results = run_suites(SUITES, precision_bits, grid_count, seed)
        return [r for s in results for r in s.reports]
    logger.debug("running suite %s", name)
    if name == "steckin":
        grid = steckin_grid(grid_count)
        return [check_steckin_example(grid, precision_bits)]
    if name == "wilker":
        return _wilker_suite(precision_bits, grid_count)
    if name == "identity12":
        return [
            check_identity12(
                catalog.lookup(fn).series, 8, 200, seed, precision_bits
            )
            for fn in ("wilker", "h1")
        ]
    if name == "constants":
        return _constants_suite(precision_bits)
    if name == "chains":
        return _chains_suite(precision_bits, grid_count)
    if name == "interpolation":
        return _interpolation_suite(precision_bits)
    raise DomainError(
        f"unknown suite {name!r}; known: {', '.join(SUITES)}, all"
    )


def run_suites(
    names,
    precision_bits=DEFAULT_PRECISION,
    grid_count=DEFAULT_GRID,
    seed=DEFAULT_SEED,
):
    """Run several suites, keeping each suite's reports together."""
    return [
        SuiteResult(
            name, tuple(run_suite(name, precision_bits, grid_count, seed))
        )
        for name in names
    ]
