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


"""Double-sided Taylor approximations of analytic functions on an interval.

The first approximation T_n is the Taylor polynomial at the left end; the
second approximation S_n keeps T_{n-1} and corrects the leading coefficient
so that it interpolates f(b-) at the right end. For series with one-signed
coefficients the two sandwich f, and they nest as n grows.
"""

from .errors import (
    DegreeTooSmallError,
    DomainError,
    DoubleTaylorError,
    EndpointError,
    EvaluationError,
    InconsistencyError,
    IntervalMismatchError,
    TruncationError,
    UnsupportedError,
)
from .series_core import (
    DEFAULT_PRECISION,
    MIN_PRECISION,
    PiLaurent,
    Poly,
    SeriesFn,
    SignKind,
    SignPattern,
    bernoulli,
    mirror,
    poly_eval,
    series_mul,
)
from .taylor_bounds import (
    corollary1_bounds,
    first_taylor,
    nesting_chain,
    second_taylor,
    second_taylor_left,
    split_series,
    successive_difference,
    theorem2_bounds,
    theorem3_pair,
)

__version__ = "0.1.0"
