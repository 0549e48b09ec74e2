# selfsim:
# Self-similar profiles of Smoluchowski's coagulation equation for
# kernels close to constant, with numerical checks of the weighted
# Laplace-transform estimates, representation kernels, linearized
# operator and boundary layer that go with them.
#
# Copyright (C) 2026 by the selfsim developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the
# License. You may obtain a copy of the License at
# 
#   http://www.apache.org/licenses/LICENSE-2.0
# 
# Unless required by applicable law or agreed to in writing,
# software distributed under the License is distributed on an "AS
# IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language
# governing permissions and limitations under the License.

"""
Errors raised by selfsim.
"""

class SelfsimError(Exception):
    """
    Base class for everything selfsim raises on purpose.
    """

class DomainError(SelfsimError, ValueError):
    """
    An argument lies outside the domain where the quantity is defined.
    """

class UnsupportedOperation(SelfsimError):
    """
    The operation is not defined for this kernel family.
    """

class NumericFailure(SelfsimError):
    """
    A quadrature or supremum search did not reach its tolerance, or
    produced a non-finite value.

    @ivar estimate: The achieved error estimate or offending value, if
      one is known.
    """
    def __init__(self, msg, estimate=None):
        super(NumericFailure, self).__init__(msg)
        self.estimate = estimate

class FitFailure(SelfsimError):
    """
    A tail or plateau fit could not be made from the data given.
    """

class ConfigError(SelfsimError):
    """
    A configuration value is missing, unknown or out of range.

    @ivar key: The dotted name of the offending key.
    """
    def __init__(self, key, msg):
        super(ConfigError, self).__init__("{}: {}".format(key, msg))
        self.key = key

class TransactionError(SelfsimError):
    """
    An exception was raised while trying to run a results-store
    transaction.
    """
