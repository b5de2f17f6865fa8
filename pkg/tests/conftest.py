from fractions import Fraction

import pytest

from double_taylor import catalog
from double_taylor.series_core import (
    ALL_NONNEG,
    SignKind,
    SignPattern,
    polynomial_series,
)


@pytest.fixture
def wilker():
    return catalog.lookup("wilker")


@pytest.fixture
def h1():
    return catalog.lookup("h1")


@pytest.fixture
def quadratic():
    """1 + x + x^2 on (0, 1), f(1-) = 3."""
    return polynomial_series(
        "1+x+x^2", [1, 1, 1], end_value=Fraction(3), sign_pattern=ALL_NONNEG
    )


@pytest.fixture
def mixed():
    """1 - x + x^2 on (0, 1) with one negative coefficient."""
    return polynomial_series(
        "1-x+x^2",
        [1, -1, 1],
        end_value=Fraction(1),
        sign_pattern=SignPattern(SignKind.MIXED, (1,)),
    )
