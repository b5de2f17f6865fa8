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

"""Exceptions raised by double_taylor."""


class DoubleTaylorError(RuntimeError):
    """Base class for every error raised by this package."""


class IntervalMismatchError(DoubleTaylorError):
    pass


class DomainError(DoubleTaylorError, ValueError):
    pass


class EndpointError(DoubleTaylorError):
    pass


class InconsistencyError(DoubleTaylorError):
    pass


class DegreeTooSmallError(DoubleTaylorError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class UnsupportedError(DoubleTaylorError):
    pass


class TruncationError(DoubleTaylorError):
    pass


class EvaluationError(DoubleTaylorError):
    def __init__(self, message, x):
        super().__init__(message)
        self.x = x
