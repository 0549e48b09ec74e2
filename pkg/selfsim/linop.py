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
The linearized coagulation operator around the constant-kernel
solution, in physical space and in Laplace variables, with the
explicit inverse of the latter.
"""

import logging
from dataclasses import dataclass, asdict, field

import numpy as np

from selfsim import errors
from selfsim.bilinear import apply_BK, laplace_physical
from selfsim.laplace import LaplaceEval
from selfsim.profiles import muBar
from selfsim.quadrature import logRule


SERIES = 1e-4
R_FACTOR = 1e8
XI_FLOOR = 1e-12

log = logging.getLogger(__name__)


def _at(f, x):
    return np.asarray(f(np.asarray(x, dtype=float)), dtype=float)


def _vectorized(f):
    def wrapper(G, p):
        if np.ndim(p) == 0:
            return f(G, float(p))
        return np.array([f(G, float(q)) for q in np.ravel(p)])
    wrapper.__doc__ = f.__doc__
    wrapper.__name__ = f.__name__
    return wrapper


class _Lhat(object):
    """
    I evaluate M{h(r) = (M(r)-M(1))/((1-r) r^2) - M'(r)/r} for one
    transform I{M} and integrate it against M{1} and M{r - p} over
    M{[p, inf)}.
    """
    def __init__(self, M):
        self.M = M
        self.M1 = float(_at(M.channel(0), 1.0))
        self.dM1 = float(_at(M.channel(1), 1.0))
        self.ddM1 = float(_at(M.channel(2), 1.0))
        try:
            self.dddM1 = float(_at(M.channel(3), 1.0))
        except errors.UnsupportedOperation:
            self.dddM1 = 0.0

    def h(self, r):
        r = np.asarray(r, dtype=float)
        d = r - 1.0
        near = np.abs(d) < SERIES
        safe = np.where(near, 2.0, r)
        quotient = (_at(self.M.channel(0), safe) - self.M1)/(1.0 - safe)
        series = -(self.dM1 + 0.5*self.ddM1*d + self.dddM1*d**2/6.0)
        quotient = np.where(near, series, quotient)
        return quotient/r**2 - _at(self.M.channel(1), r)/r

    def integrals(self, p):
        """
        Returns (M{int_p^inf (r-p) h}, M{int_p^inf h}), with a fitted
        power-law remainder beyond the truncation point.

        @raise errors.NumericFailure: I{h} does not decay faster than
          M{r^-2}.
        """
        R = R_FACTOR*max(1.0, p)
        r, w = logRule(p, R, 0.5, 8)
        hr = self.h(r)
        first = np.dot(w, (r - p)*hr)
        zeroth = np.dot(w, hr)
        hR, hS = self.h(np.array([R, R/np.e]))
        if hR == 0:
            return first, zeroth
        if hR*hS <= 0:
            raise errors.NumericFailure(
                "Integrand changes sign in its tail", hR)
        gamma = np.log(hS/hR)
        if gamma <= 2.0:
            raise errors.NumericFailure(
                "Integrand decays like r^-{:.3g}, too slow".format(gamma),
                gamma)
        C = hR*R**gamma
        first += C*(R**(2.0 - gamma)/(gamma - 2.0) -
                    p*R**(1.0 - gamma)/(gamma - 1.0))
        zeroth += C*R**(1.0 - gamma)/(gamma - 1.0)
        return first, zeroth


@_vectorized
def apply_Lhat(G, p):
    """
    Returns M{(L^ M)(p) = M(p) - 2 int_p^inf (r-p) h(r) dr} for the
    transform I{G}, the iterated integral of the operator collapsed to
    one.
    """
    if not p > 0:
        raise errors.DomainError("p must be positive")
    first, zeroth = _Lhat(G).integrals(p)
    return float(_at(G.channel(0), p) - 2.0*first)


def lhatEval(G):
    """
    Returns M{L^ G} as a L{LaplaceEval}, its derivative channels being
    M{M' + 2 int_p^inf h} and M{M'' - 2 h(p)}.
    """
    op = _Lhat(G)

    def channel(k):
        def value(p):
            p = np.atleast_1d(np.asarray(p, dtype=float))
            out = np.empty_like(p)
            for j, q in enumerate(p):
                if k == 2:
                    out[j] = _at(G.channel(2), q) - 2.0*op.h(np.array([q]))[0]
                    continue
                first, zeroth = op.integrals(q)
                if k == 0:
                    out[j] = _at(G.channel(0), q) - 2.0*first
                else:
                    out[j] = _at(G.channel(1), q) + 2.0*zeroth
            return out
        return value
    return LaplaceEval(channel(0), channel(1), channel(2), G.domain_min)


class _Inverse(object):
    """
    I evaluate M{I(p) = int_0^p xi (G(1) - G(xi))/(1 - xi) d xi} and
    the pieces of the inversion formula for one transform I{G}.
    """
    def __init__(self, G):
        self.G = G
        self.G1 = float(_at(G.channel(0), 1.0))
        self.dG1 = float(_at(G.channel(1), 1.0))
        self.ddG1 = float(_at(G.channel(2), 1.0))

    def quotient(self, xi):
        """
        Returns M{(G(1) - G(xi))/(1 - xi)}, tending to M{G'(1)}.
        """
        xi = np.asarray(xi, dtype=float)
        d = xi - 1.0
        near = np.abs(d) < SERIES
        safe = np.where(near, 2.0, xi)
        value = (self.G1 - _at(self.G.channel(0), safe))/(1.0 - safe)
        return np.where(near, self.dG1 + 0.5*self.ddG1*d, value)

    def I(self, p):
        xi, w = logRule(XI_FLOOR*p, p, 0.5, 8)
        value = np.dot(w, xi*self.quotient(xi))
        if not np.isfinite(value):
            raise errors.NumericFailure(
                "Inversion integral diverges near zero", value)
        return float(value)

    def channels(self, p):
        G = self.G
        I = self.I(p)
        g0 = float(_at(G.channel(0), p))
        g1 = float(_at(G.channel(1), p))
        g2 = float(_at(G.channel(2), p))
        diff = self.G1 - g0
        M = g0 - 2.0*self.G1 + 2.0*(1.0 - p)/p**2*I
        dM = g1 + 2.0*(p - 2.0)*I/p**3 + 2.0*diff/p
        dI = p*float(self.quotient(p))
        ddM = (g2 + 2.0*(6.0 - 2.0*p)*I/p**4 + 2.0*(p - 2.0)/p**3*dI
               - 2.0*g1/p - 2.0*diff/p**2)
        return M, dM, ddM


@_vectorized
def invert_Lhat(G, p):
    """
    Returns M{M(p) = G(p) - 2 G(1) + 2 (1-p)/p^2 int_0^p xi (G(1) -
    G(xi))/(1 - xi) d xi}, the solution of M{L^ M = G}. At M{p = 1}
    this is exactly M{-G(1)}.

    @raise errors.NumericFailure: I{G} blows up faster than M{1/xi}
      near zero.
    """
    if not p > 0:
        raise errors.DomainError("p must be positive")
    if p == 1:
        return -float(_at(G.channel(0), 1.0))
    return _Inverse(G).channels(p)[0]


def inverseEval(G):
    """
    Returns M{L^-1 G} as a L{LaplaceEval} with analytic derivative
    channels.
    """
    inverse = _Inverse(G)

    def channel(k):
        def value(p):
            p = np.atleast_1d(np.asarray(p, dtype=float))
            return np.array([inverse.channels(q)[k] for q in p])
        return value
    return LaplaceEval(channel(0), channel(1), channel(2), G.domain_min)


def apply_L_physical(spec_constant, m, x):
    """
    Returns M{(L m)(x) = m(x) - B_2(1, m)(x) - B_2(m, 1)(x)}, the
    linearization around M{mu = 1}.

    @raise errors.DomainError: The kernel is not constant.
    """
    if spec_constant.family != 'constant' and spec_constant.epsilon != 0:
        raise errors.DomainError(
            "The linearization is around the constant kernel")
    one = muBar()
    return (float(m(x)) - apply_BK(spec_constant, one, m, x)
            - apply_BK(spec_constant, m, one, x))


def transform_L_physical(spec_constant, m, p):
    """
    Returns M{int_0^inf e^(-p x) (L m)(x) dx} by physical-space
    quadrature, for I{m} with an C{integrate} method.
    """
    one = muBar()
    return (m.integrate(0.0, p)
            - laplace_physical(spec_constant, one, m, p, power=0)
            - laplace_physical(spec_constant, m, one, p, power=0))


@dataclass
class OperatorTrace(object):
    """
    I record the forward operator on one input and how well the
    inverse recovers it.
    """
    input_id: str
    p_samples: list = field(default_factory=list)
    forward_values: list = field(default_factory=list)
    inverse_roundtrip_error: float = 0.0

    def asDict(self):
        return asdict(self)


def operator_trace(G, input_id, p_samples=None):
    """
    Returns an L{OperatorTrace} for the transform I{G}: M{L^ G} at
    I{p_samples} and the sup relative error of M{L^-1 L^ G} against
    I{G}.
    """
    if p_samples is None:
        p_samples = np.geomspace(0.01, 100.0, 9)
    p = np.asarray(p_samples, dtype=float)
    forward = apply_Lhat(G, p)
    back = invert_Lhat(lhatEval(G), p)
    g = _at(G.channel(0), p)
    error = np.max(np.abs(back - g)/np.maximum(np.abs(g), 1e-12))
    log.debug("Operator trace {}: round trip {:.3g}".format(input_id, error))
    return OperatorTrace(
        input_id, p.tolist(), np.asarray(forward).tolist(), float(error))


__all__ = [
    'apply_Lhat', 'lhatEval', 'invert_Lhat', 'inverseEval',
    'apply_L_physical', 'transform_L_physical', 'OperatorTrace',
    'operator_trace']
