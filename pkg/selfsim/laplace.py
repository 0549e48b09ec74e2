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
Laplace transforms of profiles and the weighted sup-norms built on
them.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np
from scipy import optimize

from selfsim import errors


P_MIN, P_MAX, P_COUNT = 1e-4, 1e4, 2000

log = logging.getLogger(__name__)


class LaplaceEval(object):
    """
    I hold a transform M{Omega(p)} and its first derivatives in I{p},
    each a vectorized callable.

    I am immutable. Linear combinations of me are new instances whose
    channels evaluate the combination lazily.

    @ivar domain_min: The smallest I{p} at which my channels are
      meaningful.
    """
    def __init__(
            self, omega0, omega1, omega2, domain_min=P_MIN, omega3=None):
        self.omega0 = omega0
        self.omega1 = omega1
        self.omega2 = omega2
        self.omega3 = omega3
        self.domain_min = domain_min

    def channel(self, k):
        """
        Returns the callable for M{d^k Omega / dp^k}.
        """
        result = (self.omega0, self.omega1, self.omega2, self.omega3)[k]
        if result is None:
            raise errors.UnsupportedOperation(
                "No derivative channel of order {:d}".format(k))
        return result

    def __call__(self, p):
        return self.omega0(p)

    def _combine(self, other, op):
        def combined(k):
            f, g = self.channel(k), other.channel(k)
            return lambda p: op(f(p), g(p))
        o3 = None
        if self.omega3 is not None and other.omega3 is not None:
            o3 = combined(3)
        return LaplaceEval(
            combined(0), combined(1), combined(2),
            max(self.domain_min, other.domain_min), o3)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, scale):
        def scaled(f):
            return None if f is None else (lambda p: scale*f(p))
        return LaplaceEval(
            scaled(self.omega0), scaled(self.omega1), scaled(self.omega2),
            self.domain_min, scaled(self.omega3))

    __rmul__ = __mul__

    def __neg__(self):
        return self*-1.0


def transform(obj, domain_min=P_MIN):
    """
    Returns the L{LaplaceEval} of I{obj}, anything with an
    C{integrate(sigma, p)} method. Derivative channels come from
    moment quadrature, M{Omega^(k)(p) = (-1)^k int x^k e^(-p x) w}.
    """
    def channel(k):
        sign = -1.0 if k % 2 else 1.0
        return lambda p: sign*obj.integrate(float(k), p)
    return LaplaceEval(
        channel(0), channel(1), channel(2), domain_min, channel(3))


def muBarTransform():
    """
    Returns the transform of M{mu = 1}, M{Omega(p) = 1/p}.
    """
    return LaplaceEval(
        lambda p: 1.0/np.asarray(p, dtype=float),
        lambda p: -1.0/np.asarray(p, dtype=float)**2,
        lambda p: 2.0/np.asarray(p, dtype=float)**3,
        P_MIN,
        lambda p: -6.0/np.asarray(p, dtype=float)**4)


@dataclass(frozen=True)
class NormResult(object):
    """
    I am one weighted supremum with where it was attained.
    """
    k: int
    chi: Optional[float]
    value: float
    argmax_p: float
    boundary_flag: bool = False

    def __float__(self):
        return float(self.value)

    def asDict(self):
        return asdict(self)


def pGrid(count=P_COUNT):
    return np.geomspace(P_MIN, P_MAX, count)


def _supremum(fn, count=P_COUNT):
    """
    Returns (value, argmax, boundary) for the supremum of the vectorized
    nonnegative I{fn} over the log p-grid, refining an interior discrete
    maximum by golden-section search in M{log p}.
    """
    p = pGrid(count)
    with np.errstate(over='ignore', invalid='ignore'):
        v = np.asarray(fn(p), dtype=float)
    if not np.all(np.isfinite(v)):
        raise errors.NumericFailure("Non-finite value in norm evaluation")
    j = int(np.argmax(v))
    best, where = float(v[j]), float(p[j])
    if best == 0:
        return 0.0, where, False
    if j == 0 or j == count - 1:
        return best, where, True
    lo, mid, hi = np.log(p[j-1]), np.log(p[j]), np.log(p[j+1])
    try:
        res = optimize.minimize_scalar(
            lambda t: -float(fn(np.array([np.exp(t)]))[0]),
            bracket=(lo, mid, hi), method='golden')
    except ValueError:
        return best, where, False
    if res.success and lo <= res.x <= hi and -res.fun > best:
        best, where = float(-res.fun), float(np.exp(res.x))
    return best, where, False


def _weighted(L, k, chi, count):
    if k not in (0, 1, 2):
        raise errors.DomainError("Seminorm order must be 0, 1 or 2")
    f = L.channel(k)
    value, p, flag = _supremum(
        lambda p: p**(1.0 + k)*(1.0 + p)**(chi - 1.0)*np.abs(f(p)), count)
    return NormResult(k, chi, value, p, flag)


def seminorm(L, k, chi, count=P_COUNT):
    """
    Returns M{|w|_(k,chi) = sup_p p^(1+k) (1+p)^(chi-1) |Omega^(k)(p)|}
    as a L{NormResult}, scanning I{count} log-spaced points.

    @raise errors.DomainError: I{chi} outside M{(0, 1]} or I{k} not
      0, 1 or 2.
    @raise errors.NumericFailure: A channel evaluated to a non-finite
      value.
    """
    if not 0 < chi <= 1:
        raise errors.DomainError("chi must lie in (0, 1]")
    return _weighted(L, k, chi, count)


def fullnorm(L, k, chi, count=P_COUNT):
    """
    Returns M{||w||_(k,chi)}, the sum of seminorms of orders up to I{k}.
    Any positive I{chi} is allowed, the weight M{chi + 1} of regularized
    differences included.
    """
    if not chi > 0:
        raise errors.DomainError("chi must be positive")
    return sum(_weighted(L, j, chi, count).value for j in range(k + 1))


def pseminorm(L, k):
    """
    Returns M{|w|*_k = sup_p p^k |Omega(p)|} as a L{NormResult} with no
    I{chi}. A supremum at the grid edge is flagged rather than raised.
    """
    f = L.channel(0)
    value, p, flag = _supremum(lambda p: p**k*np.abs(f(p)))
    if flag:
        log.debug("pseminorm k={:d} attained at grid edge p={:g}".format(k, p))
    return NormResult(k, None, value, p, flag)


def lambda_weight(s, chi):
    """
    Returns M{Lambda_chi(s)}: M{1/s} for M{s <= 1} and M{s^-chi} above.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise errors.DomainError("lambda_weight needs s > 0")
    result = np.where(s <= 1, 1.0/s, s**-chi)
    return float(result) if result.ndim == 0 else result


def default_theta(alpha):
    """
    Returns the midpoint of the admissible interval M{(alpha, 1/2)}.
    """
    return 0.5*(alpha + 0.5)


__all__ = [
    'LaplaceEval', 'transform', 'muBarTransform', 'NormResult', 'pGrid',
    'seminorm', 'fullnorm', 'pseminorm', 'lambda_weight', 'default_theta']
