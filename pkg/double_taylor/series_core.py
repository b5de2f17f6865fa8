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

"""Scalars, Bernoulli numbers and power-series plumbing.

Exact coefficients are ``fractions.Fraction`` or ``PiLaurent`` (a finite
sum of rational multiples of powers of pi). Evaluation happens in
``mpmath.mpf`` at an explicit working precision in bits.
"""

from __future__ import annotations

import functools
import logging
import threading
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Tuple, Union

from mpmath import mp, mpf

from .errors import (
    DomainError,
    EndpointError,
    InconsistencyError,
    IntervalMismatchError,
    TruncationError,
)

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


class PiLaurent:
    """Finite sum ``sum(q_e * pi**e)`` with rational ``q_e``."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            terms = terms.items()
        acc = {}
        for e, q in terms:
            acc[int(e)] = acc.get(int(e), Fraction(0)) + Fraction(q)
        self._terms = tuple(sorted((e, q) for e, q in acc.items() if q))

    @classmethod
    def monomial(cls, q, e):
        return cls(((e, q),))

    @classmethod
    def of(cls, x):
        if isinstance(x, PiLaurent):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(((0, x),))
        raise TypeError(f"cannot convert {type(x).__name__} to PiLaurent")

    @property
    def terms(self):
        return dict(self._terms)

    @property
    def is_rational(self):
        return all(e == 0 for e, _ in self._terms)

    @property
    def is_monomial(self):
        return len(self._terms) == 1

    def simplify(self):
        if self.is_rational:
            return self._terms[0][1] if self._terms else Fraction(0)
        return self

    def inverse(self):
        if not self.is_monomial:
            raise DomainError(f"{self} is not invertible as a pi-monomial")
        (e, q), = self._terms
        return PiLaurent.monomial(1 / q, -e).simplify()

    def to_mpf(self, precision_bits=None):
        with mp.workprec(precision_bits or mp.prec):
            acc = mpf(0)
            for e, q in self._terms:
                acc += (mpf(q.numerator) / q.denominator) * mp.pi**e
            return acc

    def magnitude(self, precision_bits=None):
        """Upper bound for |value| used as a cancellation scale."""
        with mp.workprec(precision_bits or mp.prec):
            return sum(
                (
                    abs(mpf(q.numerator)) / q.denominator * mp.pi**e
                    for e, q in self._terms
                ),
                mpf(0),
            )

    def _coerce(self, other):
        if isinstance(other, PiLaurent):
            return other
        if isinstance(other, (int, Fraction)):
            return PiLaurent.of(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PiLaurent(self._terms + o._terms).simplify()

    __radd__ = __add__

    def __neg__(self):
        return PiLaurent((e, -q) for e, q in self._terms).simplify()

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PiLaurent(
            (e1 + e2, q1 * q2)
            for e1, q1 in self._terms
            for e2, q2 in o._terms
        ).simplify()

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return PiLaurent.of(self.inverse()) ** (-k)
        acc = PiLaurent.of(1)
        for _ in range(k):
            acc = PiLaurent.of(acc * self)
        return acc.simplify()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self.is_rational:
            return hash(self.simplify())
        return hash(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"PiLaurent({dict(self._terms)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = ""
        for e, q in sorted(self._terms, reverse=True):
            text = _format_pi_term(abs(q), e)
            if not out:
                out = text if q > 0 else f"-{text}"
            else:
                out += f" + {text}" if q > 0 else f" - {text}"
        return out


def _format_pi_term(q, e):
    if e == 0:
        return str(q)
    base = "π" if e == 1 else f"π^{e}"
    return base if q == 1 else f"{q}·{base}"


Exact = Union[Fraction, PiLaurent]
Scalar = Union[Fraction, PiLaurent, mpf]


def is_exact(x):
    return isinstance(x, (int, Fraction, PiLaurent))


def exact(x):
    """Normalize an exact scalar: ints become Fractions, rational
    PiLaurents collapse to Fractions."""
    if isinstance(x, PiLaurent):
        return x.simplify()
    if isinstance(x, int):
        return Fraction(x)
    return x


def to_mpf(x, precision_bits=None):
    with mp.workprec(precision_bits or mp.prec):
        if isinstance(x, PiLaurent):
            return x.to_mpf()
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return mpf(x)


def scalar_add(u, v):
    if is_exact(u) and is_exact(v):
        return exact(u + v)
    return to_mpf(u) + to_mpf(v)


def invert_exact(x):
    """1/x for a Fraction or a pi-monomial; None otherwise."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return 1 / x if x else None
    if isinstance(x, PiLaurent) and x.is_monomial:
        return x.inverse()
    return None


def same_point(u, v):
    if is_exact(u) and is_exact(v):
        return exact(u) == exact(v)
    with mp.workprec(DEFAULT_PRECISION):
        return to_mpf(u) == to_mpf(v)


def check_precision(precision_bits):
    if int(precision_bits) < MIN_PRECISION:
        raise DomainError(
            f"precision must be at least {MIN_PRECISION} bits, "
            f"got {precision_bits}"
        )
    return int(precision_bits)


def sign_of(c):
    """Exact sign of a coefficient (-1, 0 or 1)."""
    if isinstance(c, (int, Fraction)):
        return (c > 0) - (c < 0)
    if isinstance(c, PiLaurent):
        if not c:
            return 0
        # pi is transcendental, so a nonzero PiLaurent never vanishes.
        prec = 128
        while prec <= 1 << 16:
            with mp.workprec(prec):
                v = c.to_mpf()
                if abs(v) > c.magnitude() * mpf(2) ** (16 - prec):
                    return 1 if v > 0 else -1
            prec *= 2
        raise InconsistencyError(f"could not resolve the sign of {c}")
    return int(mp.sign(c))


# Bernoulli numbers, B_1 = -1/2. Appends happen under the lock; readers
# only look at indices below the current length.
_BERNOULLI = [Fraction(1), Fraction(-1, 2)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli(k):
    if k < 0:
        raise DomainError(f"Bernoulli index must be non-negative, got {k}")
    if k < len(_BERNOULLI):
        return _BERNOULLI[k]
    with _BERNOULLI_LOCK:
        for m in range(len(_BERNOULLI), k + 1):
            if m % 2 == 1:
                _BERNOULLI.append(Fraction(0))
                continue
            acc = Fraction(0)
            for j in range(m):
                if j > 1 and j % 2 == 1:
                    continue
                acc += comb(m + 1, j) * _BERNOULLI[j]
            _BERNOULLI.append(-acc / (m + 1))
        logger.debug("bernoulli table extended to index %d", k)
    return _BERNOULLI[k]


def pi(precision_bits=DEFAULT_PRECISION):
    with mp.workprec(check_precision(precision_bits)):
        return +mp.pi


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial ``sum(coeffs[k] * (x - anchor)**k)``."""

    anchor: Scalar
    coeffs: Tuple[Scalar, ...]

    def __post_init__(self):
        coeffs = tuple(exact(c) if is_exact(c) else c for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs:
            coeffs = (Fraction(0),)
        anchor = self.anchor
        if is_exact(anchor):
            anchor = exact(anchor)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_exact(self):
        return all(is_exact(c) for c in self.coeffs)

    def coefficient(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    def _check_anchor(self, other):
        if not same_point(self.anchor, other.anchor):
            raise IntervalMismatchError(
                f"polynomials anchored at {self.anchor} and {other.anchor}"
            )

    def __add__(self, other):
        self._check_anchor(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            self.anchor,
            tuple(
                scalar_add(self.coefficient(k), other.coefficient(k))
                for k in range(n)
            ),
        )

    def __neg__(self):
        return Poly(self.anchor, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (
            same_point(self.anchor, other.anchor)
            and len(self.coeffs) == len(other.coeffs)
            and all(u == v for u, v in zip(self.coeffs, other.coeffs))
        )

    __hash__ = None

    def reflected(self, about):
        """q with q(x) = p(anchor + about - x), anchored at ``about``."""
        return Poly(
            about,
            tuple(-c if k % 2 else c for k, c in enumerate(self.coeffs)),
        )


def poly_eval(p, x, precision_bits=DEFAULT_PRECISION):
    """Horner evaluation of ``p`` at ``x``."""
    with mp.workprec(precision_bits):
        h = to_mpf(x) - to_mpf(p.anchor)
        acc = mpf(0)
        for c in reversed(p.coeffs):
            acc = acc * h + to_mpf(c)
        return acc


class SignKind(Enum):
    ALL_NONNEG = "ALL_NONNEG"
    ALL_NONPOS_AFTER_CONST = "ALL_NONPOS_AFTER_CONST"
    MIXED = "MIXED"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SignPattern:
    """Signs of the coefficients in powers of the distance from the
    expansion point. ``negatives`` is the index set J for MIXED."""

    kind: SignKind
    negatives: Tuple[int, ...] = ()

    @property
    def nonneg_tail_from(self):
        if self.kind is SignKind.ALL_NONNEG:
            return 0
        if self.kind is SignKind.MIXED:
            return max(self.negatives, default=-1) + 1
        return None

    def __str__(self):
        if self.kind is SignKind.MIXED:
            return f"MIXED{list(self.negatives)}"
        return self.kind.value


ALL_NONNEG = SignPattern(SignKind.ALL_NONNEG)
ALL_NONPOS_AFTER_CONST = SignPattern(SignKind.ALL_NONPOS_AFTER_CONST)
UNKNOWN = SignPattern(SignKind.UNKNOWN)


@dataclass(frozen=True)
class SeriesFn:
    """Analytic function on (anchor, right_end) given by its coefficients.

    With ``reflected`` false the series is ``sum(c_k * (x - anchor)**k)``
    and the endpoint limit is f(right_end-). With ``reflected`` true it is
    expanded at the right end, ``sum(c_k * (x - right_end)**k)``, and the
    endpoint limit is f(anchor+).
    """

    name: str
    anchor: Scalar
    right_end: Scalar
    coeff: Callable[[int], Exact]
    end_value: Optional[Exact] = None
    end_fn: Optional[Callable[[int], mpf]] = None
    sign_pattern: SignPattern = UNKNOWN
    reflected: bool = False
    valid_terms: Optional[int] = None

    def __post_init__(self):
        with mp.workprec(MIN_PRECISION):
            if not to_mpf(self.right_end) > to_mpf(self.anchor):
                raise DomainError(
                    f"{self.name}: right end {self.right_end} must exceed "
                    f"anchor {self.anchor}"
                )

    @property
    def origin(self):
        return self.right_end if self.reflected else self.anchor

    @property
    def far_end(self):
        return self.anchor if self.reflected else self.right_end

    @property
    def span(self):
        """far_end - origin, exact when both ends are exact."""
        if is_exact(self.origin) and is_exact(self.far_end):
            return exact(self.far_end - self.origin)
        return to_mpf(self.far_end) - to_mpf(self.origin)

    @property
    def has_endpoint(self):
        return self.end_value is not None or self.end_fn is not None

    def end_limit(self, precision_bits=DEFAULT_PRECISION):
        if self.end_value is not None:
            return to_mpf(self.end_value, precision_bits)
        if self.end_fn is not None:
            with mp.workprec(precision_bits):
                return +self.end_fn(precision_bits)
        raise EndpointError(
            f"{self.name} has no finite limit at {self.far_end}"
        )

    def coefficient(self, k):
        if k < 0:
            raise DomainError(f"coefficient index must be >= 0, got {k}")
        if self.valid_terms is not None and k >= self.valid_terms:
            raise TruncationError(
                f"{self.name} is only known through index "
                f"{self.valid_terms - 1}, asked for {k}"
            )
        return exact(self.coeff(k))

    def coefficients(self, terms):
        return [self.coefficient(k) for k in range(terms)]

    def distance_coefficient(self, k):
        c = self.coefficient(k)
        return -c if self.reflected and k % 2 else c


def mirror(f):
    """Reflect x -> anchor + right_end - x; an involution."""
    base = f.coeff

    def coeff(k):
        c = base(k)
        return -c if k % 2 else c

    return replace(f, coeff=coeff, reflected=not f.reflected)


def polynomial_series(
    name,
    coeffs,
    anchor=Fraction(0),
    right_end=Fraction(1),
    end_value=None,
    sign_pattern=UNKNOWN,
):
    """SeriesFn with finitely many nonzero coefficients."""
    coeffs = tuple(exact(c) for c in coeffs)

    def coeff(k):
        return coeffs[k] if k < len(coeffs) else Fraction(0)

    return SeriesFn(
        name=name,
        anchor=anchor,
        right_end=right_end,
        coeff=coeff,
        end_value=end_value,
        sign_pattern=sign_pattern,
    )


def series_mul(u, v, terms):
    """Cauchy product of two series, valid for indices < ``terms``."""
    if (
        not same_point(u.anchor, v.anchor)
        or not same_point(u.right_end, v.right_end)
        or u.reflected != v.reflected
    ):
        raise IntervalMismatchError(
            f"{u.name} and {v.name} live on different intervals"
        )
    if terms < 1:
        raise DomainError(f"terms must be positive, got {terms}")

    known = min(
        t for t in (terms, u.valid_terms, v.valid_terms) if t is not None
    )

    @functools.cache
    def product():
        return cauchy_product(
            u.coefficients(known), v.coefficients(known), known
        )

    def coeff(k):
        if k >= known:
            raise TruncationError(f"product known below index {known}")
        return product()[k]

    end_value = None
    end_fn = None
    if u.end_value is not None and v.end_value is not None:
        end_value = exact(u.end_value * v.end_value)
    elif u.has_endpoint and v.has_endpoint:

        def end_fn(precision_bits):
            return u.end_limit(precision_bits) * v.end_limit(precision_bits)

    return SeriesFn(
        name=f"({u.name})*({v.name})",
        anchor=u.anchor,
        right_end=u.right_end,
        coeff=coeff,
        end_value=end_value,
        end_fn=end_fn,
        reflected=u.reflected,
        valid_terms=known,
    )


def cauchy_product(p, q, terms):
    """Product of two truncated coefficient lists."""
    out = []
    for k in range(terms):
        acc = Fraction(0)
        for j in range(k + 1):
            if j < len(p) and k - j < len(q):
                acc = acc + p[j] * q[k - j]
        out.append(exact(acc))
    return out


def series_divide(p, q, terms):
    """Truncated quotient p/q; q[0] must be exactly invertible."""
    inv = invert_exact(q[0]) if q else None
    if inv is None:
        raise DomainError("series division needs an invertible constant term")
    out = []
    for k in range(terms):
        acc = p[k] if k < len(p) else Fraction(0)
        for j in range(1, min(k, len(q) - 1) + 1):
            acc = acc - q[j] * out[k - j]
        out.append(exact(acc * inv))
    return out


def series_value(f, x, terms, precision_bits=DEFAULT_PRECISION):
    """Sum of the first ``terms`` terms of ``f`` at ``x``."""
    return poly_eval(Poly(f.origin, f.coefficients(terms)), x, precision_bits)


def classify_signs(f, limit=64):
    """Sign pattern read off coefficients 0..limit."""
    negatives = []
    tail_nonpos = True
    for k in range(limit + 1):
        s = sign_of(f.distance_coefficient(k))
        if s < 0:
            negatives.append(k)
        elif s > 0 and k >= 1:
            tail_nonpos = False
    if not negatives:
        return ALL_NONNEG
    if tail_nonpos:
        return ALL_NONPOS_AFTER_CONST
    return SignPattern(SignKind.MIXED, tuple(negatives))


def verify_sign_pattern(f, limit=64):
    """Raise if the declared sign pattern contradicts the scan."""
    kind = f.sign_pattern.kind
    for k in range(limit + 1):
        s = sign_of(f.distance_coefficient(k))
        bad = (
            (kind is SignKind.ALL_NONNEG and s < 0)
            or (kind is SignKind.ALL_NONPOS_AFTER_CONST and k >= 1 and s > 0)
            or (
                kind is SignKind.MIXED
                and (s < 0) != (k in f.sign_pattern.negatives)
            )
        )
        if bad:
            raise InconsistencyError(
                f"{f.name}: coefficient {k} has sign {s}, contradicting "
                f"declared pattern {f.sign_pattern}"
            )
    return f.sign_pattern
