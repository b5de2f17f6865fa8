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

"""First and second Taylor approximations and the bounds built on them.

For f analytic on (a, b) with coefficients c_k at a:

  first approximation   T_n(x) = sum_{k<=n} c_k (x - a)^k
  second approximation  S_n(x) = T_{n-1}(x)
                                 + (f(b-) - T_{n-1}(b)) ((x - a)/(b - a))^n
                        S_0(x) = f(b-)

When the n-th derivative of f is increasing, T_n < f < S_n on (a, b).
Series expanded at the right end are handled by reflecting them to the
left end, building there, and reflecting the polynomials back.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Tuple

from mpmath import mp

from .errors import (
    DegreeTooSmallError,
    DomainError,
    EndpointError,
    InconsistencyError,
    TruncationError,
    UnsupportedError,
)
from .series_core import (
    ALL_NONNEG,
    DEFAULT_PRECISION,
    Exact,
    Poly,
    SeriesFn,
    SignKind,
    UNKNOWN,
    exact,
    invert_exact,
    is_exact,
    mirror,
    poly_eval,
    sign_of,
    to_mpf,
)

logger = logging.getLogger(__name__)

# Coefficients checked past the scan limit when splitting a series.
TAIL_CHECK = 64


class Side(Enum):
    LOWER = "lower"
    UPPER = "upper"


class Kind(Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class BoundPoly:
    poly: Poly
    side: Side
    kind: Kind
    degree: int
    source: str

    @property
    def label(self):
        return f"{'T' if self.kind is Kind.FIRST else 'S'}_{self.degree}"


@dataclass(frozen=True)
class SplitSeries:
    """f = F + sum(c_j (x - a)^j for j in J), F with coefficients >= 0.

    ``working`` is the left-anchored series that was split: ``base``
    itself, its mirror when ``base`` is reflected, negated when ``negated``.
    """

    base: SeriesFn
    nonneg: SeriesFn
    negative_part: Tuple[Tuple[int, Exact], ...]
    working: SeriesFn
    negated: bool = False

    @property
    def negative_indices(self):
        return tuple(j for j, _ in self.negative_part)


@dataclass(frozen=True)
class NestingChain:
    lowers: Tuple[BoundPoly, ...]
    uppers: Tuple[BoundPoly, ...]
    source: str

    def ordered(self):
        """Bounds in ascending pointwise order, lowers then uppers."""
        return list(self.lowers) + list(reversed(self.uppers))


def _check_degree(n, minimum=0):
    if int(n) != n or n < minimum:
        raise DomainError(f"degree must be an integer >= {minimum}, got {n}")


def first_taylor(f, n):
    """T_n at the expansion point of ``f`` (left or right neighbourhood)."""
    _check_degree(n)
    return Poly(f.origin, tuple(f.coefficient(k) for k in range(n + 1)))


def _leading_coefficient(f, head, n, precision_bits):
    span = f.span
    inv = invert_exact(span) if is_exact(span) else None
    end = f.end_value
    if end is not None and inv is not None and all(map(is_exact, head)):
        rem = end
        for k, c in enumerate(head):
            rem = rem - c * span**k
        return exact(rem * inv**n)
    with mp.workprec(precision_bits):
        s = to_mpf(span)
        at_end = mp.mpf(0)
        for c in reversed(head):
            at_end = at_end * s + to_mpf(c)
        return (f.end_limit(precision_bits) - at_end) / s**n


def second_taylor(f, n, precision_bits=DEFAULT_PRECISION):
    """Second approximation interpolating f(b-) at the far end."""
    _check_degree(n)
    if f.reflected:
        return second_taylor_left(f, n, precision_bits)
    if not f.has_endpoint:
        raise EndpointError(f"{f.name} has no finite limit at {f.far_end}")
    if n == 0:
        end = f.end_value
        if end is None:
            end = f.end_limit(precision_bits)
        return Poly(f.anchor, (end,))
    head = [f.coefficient(k) for k in range(n)]
    lead = _leading_coefficient(f, head, n, precision_bits)
    logger.debug("second approximation of %s, degree %d", f.name, n)
    return Poly(f.anchor, tuple(head) + (lead,))


def second_taylor_left(f_left, n, precision_bits=DEFAULT_PRECISION):
    """Second approximation in the left neighbourhood of b.

    Built on the mirror g(u) = f(a + b - u), which is expanded at a, and
    reflected back into powers of (x - b).
    """
    if not f_left.reflected:
        raise DomainError(
            f"{f_left.name} is expanded at its left end; use second_taylor"
        )
    p = second_taylor(mirror(f_left), n, precision_bits)
    return p.reflected(f_left.right_end)


def remainder_eval(f, n, x, oracle, precision_bits=DEFAULT_PRECISION):
    """R_n(x) = f(x) - T_{n-1}(x); x at the far end uses f's end limit."""
    _check_degree(n, 1)
    with mp.workprec(precision_bits):
        xv = to_mpf(x)
        o = to_mpf(f.origin)
        e = to_mpf(f.far_end)
        t = (xv - o) / (e - o)
        if not 0 < t <= 1:
            raise DomainError(
                f"x = {mp.nstr(xv, 20)} outside the domain of {f.name}"
            )
        if xv == e:
            value = f.end_limit(precision_bits)
        else:
            value = oracle(xv, precision_bits)
        return value - poly_eval(first_taylor(f, n - 1), xv, precision_bits)


def successive_difference(f, n, x, precision_bits=DEFAULT_PRECISION):
    """Closed form of S_n(x) - S_{n+1}(x):

    ((b - x)/(b - a)) ((x - a)/(b - a))^n (f(b-) - T_n(b))
    """
    _check_degree(n)
    with mp.workprec(precision_bits):
        xv = to_mpf(x)
        o = to_mpf(f.origin)
        e = to_mpf(f.far_end)
        t = (xv - o) / (e - o)
        if not 0 <= t <= 1:
            raise DomainError(
                f"x = {mp.nstr(xv, 20)} outside the closure of the domain "
                f"of {f.name}"
            )
        gap = f.end_limit(precision_bits) - poly_eval(
            first_taylor(f, n), e, precision_bits
        )
        return (1 - t) * t**n * gap


def _negated(f):
    base = f.coeff
    end_fn = f.end_fn
    return replace(
        f,
        name=f"-({f.name})",
        coeff=lambda k: -base(k),
        end_value=None if f.end_value is None else -f.end_value,
        end_fn=None if end_fn is None else (lambda p: -end_fn(p)),
        sign_pattern=UNKNOWN,
    )


def split_series(f, scan_limit):
    """Split off the finitely many negative coefficients of ``f``.

    A series whose coefficients are all <= 0 after the constant term is
    negated first and the split is flagged ``negated``.
    """
    _check_degree(scan_limit, 1)
    work = mirror(f) if f.reflected else f
    kind = f.sign_pattern.kind
    negated = kind is SignKind.ALL_NONPOS_AFTER_CONST
    if negated:
        work = _negated(work)
        tail_from = 1
    else:
        tail_from = f.sign_pattern.nonneg_tail_from
    if tail_from is None:
        raise UnsupportedError(
            f"{f.name} declares no non-negative coefficient tail "
            f"({f.sign_pattern})"
        )
    if scan_limit < tail_from:
        raise DomainError(
            f"scan limit {scan_limit} stops before the declared "
            f"non-negative tail at index {tail_from}"
        )

    negatives = []
    for k in range(scan_limit):
        c = work.coefficient(k)
        if sign_of(c) < 0:
            negatives.append((k, c))
    stop = scan_limit + TAIL_CHECK
    if work.valid_terms is not None:
        stop = min(stop, work.valid_terms)
    for k in range(scan_limit, stop):
        if sign_of(work.coefficient(k)) < 0:
            raise InconsistencyError(
                f"{f.name}: coefficient {k} is negative although indices "
                f">= {scan_limit} are declared non-negative"
            )

    coeff = work.coeff

    @functools.cache
    def nonneg_coeff(k):
        c = exact(coeff(k))
        return c if sign_of(c) > 0 else Fraction(0)

    end_value = None
    end_fn = None
    span = work.span
    if work.end_value is not None and is_exact(span):
        end_value = work.end_value
        for j, c in negatives:
            end_value = end_value - c * span**j
        end_value = exact(end_value)
    elif work.has_endpoint:

        def end_fn(precision_bits):
            with mp.workprec(precision_bits):
                s = to_mpf(span)
                acc = work.end_limit(precision_bits)
                for j, c in negatives:
                    acc -= to_mpf(c) * s**j
                return acc

    nonneg = replace(
        work,
        name=f"{work.name}[+]",
        coeff=nonneg_coeff,
        end_value=end_value,
        end_fn=end_fn,
        sign_pattern=ALL_NONNEG,
    )
    logger.debug(
        "split %s: negative indices %s", f.name, [j for j, _ in negatives]
    )
    return SplitSeries(
        base=f,
        nonneg=nonneg,
        negative_part=tuple(negatives),
        working=work,
        negated=negated,
    )


def _restore(s, lower, upper):
    if s.negated:
        lower, upper = -upper, -lower
    if s.base.reflected:
        lower = lower.reflected(s.base.origin)
        upper = upper.reflected(s.base.origin)
    return lower, upper


def theorem2_bounds(s, n, precision_bits=DEFAULT_PRECISION):
    """Lower and upper bounds from the non-negative part plus the finite
    negative part, valid for every n >= 1."""
    _check_degree(n, 1)
    size = max([n] + [j for j, _ in s.negative_part]) + 1
    neg = [Fraction(0)] * size
    for j, c in s.negative_part:
        neg[j] = c
    neg = Poly(s.nonneg.anchor, tuple(neg))
    with mp.workprec(precision_bits):
        lower = first_taylor(s.nonneg, n) + neg
        upper = second_taylor(s.nonneg, n, precision_bits) + neg
        return _restore(s, lower, upper)


def corollary1_bounds(s, n, precision_bits=DEFAULT_PRECISION):
    """Plain first/second pair, once n exceeds every negative index."""
    _check_degree(n, 1)
    if s.negative_part:
        worst = max(s.negative_indices)
        if n <= worst:
            raise DegreeTooSmallError(
                f"degree {n} must exceed negative coefficient index {worst}",
                worst,
            )
    with mp.workprec(precision_bits):
        lower = first_taylor(s.working, n)
        upper = second_taylor(s.working, n, precision_bits)
        return _restore(s, lower, upper)


def _chain_roles(f):
    kind = f.sign_pattern.kind
    if kind is SignKind.ALL_NONNEG:
        return Kind.FIRST, Kind.SECOND
    if kind is SignKind.ALL_NONPOS_AFTER_CONST:
        return Kind.SECOND, Kind.FIRST
    raise UnsupportedError(
        f"{f.name} has sign pattern {f.sign_pattern}; nesting chains need "
        "one-signed coefficients, use the split or corollary bounds instead"
    )


def _build(f, kind, d, precision_bits):
    if kind is Kind.FIRST:
        return first_taylor(f, d)
    return second_taylor(f, d, precision_bits)


def nesting_chain(f, degrees, precision_bits=DEFAULT_PRECISION):
    degrees = list(degrees)
    if not degrees:
        raise DomainError("at least one degree is needed")
    for d in degrees:
        _check_degree(d)
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise DomainError(f"degrees must be strictly ascending: {degrees}")
    low, up = _chain_roles(f)
    try:
        lowers = tuple(
            BoundPoly(
                _build(f, low, d, precision_bits), Side.LOWER, low, d, f.name
            )
            for d in degrees
        )
        uppers = tuple(
            BoundPoly(
                _build(f, up, d, precision_bits), Side.UPPER, up, d, f.name
            )
            for d in degrees
        )
    except TruncationError as e:
        raise DomainError(f"{f.name}: {e}") from e
    logger.debug("nesting chain for %s over degrees %s", f.name, degrees)
    return NestingChain(lowers=lowers, uppers=uppers, source=f.name)


def theorem3_pair(f, n, precision_bits=DEFAULT_PRECISION):
    """(T_n, T_{n+1}, S_{n+1}, S_n)."""
    _check_degree(n, 1)
    _chain_roles(f)
    return (
        first_taylor(f, n),
        first_taylor(f, n + 1),
        second_taylor(f, n + 1, precision_bits),
        second_taylor(f, n, precision_bits),
    )
