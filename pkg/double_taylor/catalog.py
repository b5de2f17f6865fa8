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

"""Trigonometric functions on (0, pi/2) with exact coefficient generators.

Every entry pairs a SeriesFn with a reference evaluator built from mpmath's
sin/cos/tan/cot, evaluated with extra guard bits so that the cancellations
near 0 do not eat into the working precision.
"""

from __future__ import annotations

import functools
import logging
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from math import factorial
from typing import Callable

from mpmath import mp, mpf

from .errors import DomainError, UnsupportedError
from .series_core import (
    ALL_NONNEG,
    ALL_NONPOS_AFTER_CONST,
    DEFAULT_PRECISION,
    PiLaurent,
    SeriesFn,
    bernoulli,
    classify_signs,
    mirror,
    polynomial_series,
    series_mul,
    to_mpf,
    verify_sign_pattern,
)

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
HALF_PI = PiLaurent.monomial(Fraction(1, 2), 1)
SCAN_LIMIT = 64

Oracle = Callable[[mpf, int], mpf]


@dataclass(frozen=True)
class CatalogEntry:
    series: SeriesFn
    formula: str
    oracle: Oracle
    citation: str

    @property
    def name(self):
        return self.series.name

    @property
    def sign_pattern(self):
        return self.series.sign_pattern

    def mirrored(self):
        """Entry for x -> f(a + b - x), expanded at the right end."""
        a = self.series.anchor
        b = self.series.right_end
        oracle = self.oracle

        def reflected_oracle(x, precision_bits):
            with mp.workprec(precision_bits + 64):
                y = to_mpf(a) + to_mpf(b) - x
            return oracle(y, precision_bits)

        return CatalogEntry(
            series=mirror(self.series),
            formula=f"{self.formula}, at a + b - x",
            oracle=reflected_oracle,
            citation=self.citation,
        )


def _abs_bernoulli(k):
    return abs(bernoulli(k))


@functools.cache
def tan_coefficient(i):
    """Coefficient of x^(2i-1) in tan x."""
    p = 4**i
    return p * (p - 1) * _abs_bernoulli(2 * i) / factorial(2 * i)


@functools.cache
def cot_coefficient(k):
    """|coefficient| of t^(2k-1) in 1/t - cot t."""
    return 4**k * _abs_bernoulli(2 * k) / factorial(2 * k)


def _guarded(order, fn):
    """Run ``fn`` at extra precision scaled by how close x is to 0."""

    def oracle(x, precision_bits):
        with mp.workprec(precision_bits):
            x = mpf(x)
        extra = 64
        if x != 0:
            extra += order * max(0, -int(mp.mag(x)))
        with mp.workprec(precision_bits + extra):
            value = fn(x)
        with mp.workprec(precision_bits):
            return +value

    return oracle


def tan_series():
    def coeff(k):
        if k % 2 == 0:
            return ZERO
        return tan_coefficient((k + 1) // 2)

    # tan has no finite limit at pi/2; second approximations are refused.
    return SeriesFn(
        name="tan",
        anchor=ZERO,
        right_end=HALF_PI,
        coeff=coeff,
        sign_pattern=ALL_NONNEG,
    )


@functools.cache
def _hn_coefficient(n, i):
    acc = Fraction(0)
    for j in range(1, n + 1):
        m = n - j + 1
        acc += (
            Fraction(2) ** (2 * (n + i + 1))
            * (4**m - 1)
            * _abs_bernoulli(2 * m)
            * _abs_bernoulli(2 * (i + j))
            / (factorial(2 * m) * factorial(2 * (i + j)))
        )
    return acc


def hn_series(n):
    """h_n(x) = (tan x - T_{2n-1}(x)) / (x^(2n) tan x)."""
    if int(n) != n or n < 1:
        raise DomainError(f"h_n needs n >= 1, got {n}")
    n = int(n)

    def coeff(k):
        if k % 2:
            return ZERO
        return _hn_coefficient(n, k // 2)

    return SeriesFn(
        name=f"h{n}",
        anchor=ZERO,
        right_end=HALF_PI,
        coeff=coeff,
        end_value=PiLaurent.monomial(Fraction(2) ** (2 * n), -2 * n),
        sign_pattern=ALL_NONNEG,
    )


def hn_double_sum(n, x, terms, precision_bits=DEFAULT_PRECISION):
    """h_n(x) from the double sum over j and k >= j, inner sum truncated
    to ``terms`` terms."""
    with mp.workprec(precision_bits):
        x = to_mpf(x)
        total = mpf(0)
        for j in range(1, n + 1):
            inner = mpf(0)
            for k in range(j + terms - 1, j - 1, -1):
                inner = inner * x**2 + to_mpf(cot_coefficient(k))
            total += to_mpf(tan_coefficient(n - j + 1)) * inner
        return total


def steckin_g_series():
    """g(t) = cot t - 1/t + 2/pi."""

    def coeff(k):
        if k == 0:
            return PiLaurent.monomial(2, -1)
        if k % 2 == 0:
            return ZERO
        return -cot_coefficient((k + 1) // 2)

    return SeriesFn(
        name="steckin-g",
        anchor=ZERO,
        right_end=HALF_PI,
        coeff=coeff,
        end_value=ZERO,
        sign_pattern=ALL_NONPOS_AFTER_CONST,
    )


def wilker_series():
    """(x / sin x)^2 + x / tan x."""

    def coeff(k):
        if k == 0:
            return Fraction(2)
        if k % 2:
            return ZERO
        m = k // 2
        return _abs_bernoulli(k) * (k - 2) * 4**m / factorial(k)

    return SeriesFn(
        name="wilker",
        anchor=ZERO,
        right_end=HALF_PI,
        coeff=coeff,
        end_value=PiLaurent.monomial(Fraction(1, 4), 2),
        sign_pattern=ALL_NONNEG,
    )


def cusa_series():
    """3x / sin x + cos x."""

    def coeff(k):
        if k == 0:
            return Fraction(4)
        if k % 2:
            return ZERO
        m = k // 2
        return Fraction(
            3 * (4**m - 2) * _abs_bernoulli(k) + (-1) ** m
        ) / factorial(k)

    f = SeriesFn(
        name="cusa",
        anchor=ZERO,
        right_end=HALF_PI,
        coeff=coeff,
        end_value=PiLaurent.monomial(Fraction(3, 2), 1),
        sign_pattern=ALL_NONNEG,
    )
    verify_sign_pattern(f, SCAN_LIMIT)
    return f


def steckin_product_series(terms=SCAN_LIMIT + 1):
    """(pi^2 - 4x^2) tan x / x."""
    if terms < 2:
        raise DomainError(f"terms must be at least 2, got {terms}")
    factor = polynomial_series(
        "pi^2-4x^2",
        [PiLaurent.monomial(1, 2), ZERO, Fraction(-4)],
        anchor=ZERO,
        right_end=HALF_PI,
        end_value=ZERO,
    )
    tan_over_x = SeriesFn(
        name="tan(x)/x",
        anchor=ZERO,
        right_end=HALF_PI,
        coeff=lambda k: ZERO if k % 2 else tan_coefficient(k // 2 + 1),
        sign_pattern=ALL_NONNEG,
    )
    product = series_mul(factor, tan_over_x, terms)
    # (pi - 2x) tan x -> 2 and (pi + 2x)/x -> 4 as x -> pi/2-.
    product = replace(product, name="steckin-product", end_value=Fraction(8))
    pattern = classify_signs(product, min(SCAN_LIMIT, terms - 1))
    return replace(product, sign_pattern=pattern)


def _tan_oracle(x):
    return mp.tan(x)


def _hn_oracle(n):
    tan_head = [tan_coefficient(i) for i in range(1, n + 1)]

    def fn(x):
        t = mp.tan(x)
        head = mpf(0)
        for i, c in enumerate(tan_head, start=1):
            head += to_mpf(c) * x ** (2 * i - 1)
        return (t - head) / (x ** (2 * n) * t)

    return fn


def _steckin_g_oracle(t):
    return mp.cot(t) - 1 / t + 2 / mp.pi


def _wilker_oracle(x):
    return (x / mp.sin(x)) ** 2 + x / mp.tan(x)


def _cusa_oracle(x):
    return 3 * x / mp.sin(x) + mp.cos(x)


def _steckin_product_oracle(x):
    return (mp.pi**2 - 4 * x**2) * mp.tan(x) / x


def hn_entry(n):
    return CatalogEntry(
        series=hn_series(n),
        formula=f"h{n}(x) = (tan x - T_{2 * n - 1}(x)) / (x^{2 * n} tan x)",
        oracle=_guarded(2 * n + 2, _hn_oracle(int(n))),
        citation="ratio of the tangent Taylor remainder to tan x",
    )


_ENTRIES = {
    "tan": lambda: CatalogEntry(
        tan_series(),
        "tan x = sum 2^(2i)(2^(2i)-1)|B_2i|/(2i)! x^(2i-1)",
        _guarded(0, _tan_oracle),
        "Bernoulli expansion of the tangent",
    ),
    "steckin-g": lambda: CatalogEntry(
        steckin_g_series(),
        "g(t) = cot t - 1/t + 2/pi = 2/pi - sum 2^(2k)|B_2k|/(2k)! t^(2k-1)",
        _guarded(2, _steckin_g_oracle),
        "Stečkin bound for tan x near pi/2",
    ),
    "wilker": lambda: CatalogEntry(
        wilker_series(),
        "(x/sin x)^2 + x/tan x = 2 + sum_{k>=2} |B_2k|(2k-2)4^k/(2k)! x^(2k)",
        _guarded(2, _wilker_oracle),
        "Wilker inequality",
    ),
    "cusa": lambda: CatalogEntry(
        cusa_series(),
        "3x/sin x + cos x",
        _guarded(2, _cusa_oracle),
        "Cusa-Huygens inequality",
    ),
    "steckin-product": lambda: CatalogEntry(
        steckin_product_series(),
        "(pi^2 - 4x^2) tan x / x",
        _guarded(2, _steckin_product_oracle),
        "Stečkin product bound for tan x on (0, pi/2)",
    ),
}

LISTED_H = (1, 2, 3)


def names():
    out = ["tan"] + [f"h{n}" for n in LISTED_H]
    return out + ["steckin-g", "wilker", "cusa", "steckin-product"]


@functools.cache
def lookup(name):
    """Catalog entry by its CLI name: tan, h<n>, steckin-g, wilker, cusa,
    steckin-product."""
    m = re.fullmatch(r"h(\d+)", name)
    if m:
        return hn_entry(int(m.group(1)))
    try:
        factory = _ENTRIES[name]
    except KeyError:
        raise UnsupportedError(
            f"unknown function {name!r}; known: {', '.join(names())}, h<n>"
        ) from None
    logger.debug("building catalog entry %s", name)
    return factory()
