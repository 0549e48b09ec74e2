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
Rate kernels M{K = 2 + eps*W} that are homogeneous of degree zero,
and the measure M{Gamma} representing M{W(y,z)/(y+z)} as a double
Laplace transform.

Start with L{KernelSpec}.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special

from selfsim import errors
from selfsim.quadrature import logRule, panelRule


FAMILIES = ('constant', 'power', 'brownian', 'custom')
BROWNIAN_ALPHA = 1.0/3

log = logging.getLogger(__name__)


def _positive(*args):
    """
    Returns the arguments as float arrays, raising L{errors.DomainError}
    if any entry is not strictly positive.
    """
    result = []
    for arg in args:
        a = np.asarray(arg, dtype=float)
        if not np.all(a > 0):
            raise errors.DomainError(
                "Kernel arguments must be positive, got {}".format(arg))
        result.append(a)
    return result


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class KernelSpec(object):
    """
    I describe a rate kernel M{K(x,y) = 2 + eps*W(x,y)}.

    @ivar epsilon: Perturbation size, nonnegative.
    @ivar alpha: Singularity exponent of I{W}, in [0, 1/2). Forced to
      1/3 for the brownian family.
    @ivar family: One of L{FAMILIES}.
    @ivar c_w: Leading coefficient of M{W(xi,1) ~ c_w xi^-alpha} as
      M{xi -> 0}. Metadata for the asymptotic oracles; it does not
      scale I{W}.
    @ivar w1: For the custom family, the function M{s -> W(s,1)} on
      M{(0, inf)}, vectorized.
    @ivar boundary: For the custom family, optional pair of functions
      M{s -> G_+(-s)}, M{s -> G_-(-s)} giving the boundary values of
      the analytic continuation of M{W(.,1)} on the negative axis.
    """
    epsilon: float = 0.0
    alpha: float = 0.0
    family: str = 'constant'
    c_w: float = 1.0
    w1: Optional[Callable] = field(default=None, compare=False)
    boundary: Optional[Tuple[Callable, Callable]] = field(
        default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise errors.DomainError(
                "Unknown kernel family '{}'".format(self.family))
        if self.family == 'brownian':
            object.__setattr__(self, 'alpha', BROWNIAN_ALPHA)
        if not self.epsilon >= 0:
            raise errors.DomainError("epsilon must be nonnegative")
        if not 0 <= self.alpha < 0.5:
            raise errors.DomainError(
                "alpha must lie in [0, 1/2), got {}".format(self.alpha))
        if not self.c_w > 0:
            raise errors.DomainError("c_w must be positive")
        if self.family == 'custom' and self.w1 is None:
            raise errors.DomainError(
                "The custom family needs W(s,1) supplied as w1")

    @property
    def hasW(self):
        return self.family != 'constant'

    def W(self, x, y):
        """
        Unchecked, vectorized M{W(x,y)}.
        """
        if self.family == 'custom':
            return self.w1(x/y)
        if self.family == 'constant':
            raise errors.UnsupportedOperation(
                "The constant family has no W part")
        r = (x/y)**self.alpha
        return r + 1.0/r

    def K(self, x, y):
        """
        Unchecked, vectorized M{K(x,y)}.
        """
        if self.family == 'constant' or self.epsilon == 0:
            return 2.0 + 0.0*(x + y)
        return 2.0 + self.epsilon*self.W(x, y)

    def wTerms(self):
        """
        Returns I{W} as a tuple of monomials M{(coef, a, b)} with M{W =
        sum coef y^a z^b}, or C{None} if I{W} has no such form.
        """
        if self.family in ('power', 'brownian'):
            a = self.alpha
            return ((1.0, a, -a), (1.0, -a, a))
        return None

    def separable(self):
        """
        Returns I{K} as a tuple of monomials M{(coef, a, b)}, or C{None}
        for the custom family.
        """
        if self.family == 'constant' or self.epsilon == 0:
            return ((2.0, 0.0, 0.0),)
        terms = self.wTerms()
        if terms is None:
            return None
        return ((2.0, 0.0, 0.0),) + tuple(
            (self.epsilon*c, a, b) for c, a, b in terms)

    def withEpsilon(self, epsilon):
        """
        Returns a copy of me with a different I{epsilon}.
        """
        return KernelSpec(
            epsilon=epsilon, alpha=self.alpha, family=self.family,
            c_w=self.c_w, w1=self.w1, boundary=self.boundary)

    def asDict(self):
        return {'family': self.family, 'alpha': self.alpha,
                'epsilon': self.epsilon, 'c_w': self.c_w}


def eval_K(spec, x, y):
    """
    Returns M{K(x,y) = 2 + eps*W(x,y)}; vectorized over I{x} and I{y}.

    @raise errors.DomainError: A non-positive argument.
    """
    x, y = _positive(x, y)
    return _unwrap(spec.K(x, y))


def eval_W(spec, x, y):
    """
    Returns M{W(x,y)}; vectorized.

    @raise errors.UnsupportedOperation: The constant family.
    @raise errors.DomainError: A non-positive argument.
    """
    if not spec.hasW:
        raise errors.UnsupportedOperation(
            "The constant family has no W part")
    x, y = _positive(x, y)
    return _unwrap(spec.W(x, y))


@dataclass(frozen=True)
class GammaRepr(object):
    """
    I hold the measure M{Gamma = regular + diag_coeff*delta(xi - eta)}
    with M{W(y,z)/(y+z) = int int Gamma(xi,eta) exp(-xi y - eta z)}.

    @ivar regular: Function M{(xi, eta) -> Gamma~(xi, eta)}.
    @ivar diag_coeff: Weight of the diagonal Dirac part.
    @ivar alpha: Exponent of the kernel represented.
    @ivar phi: The jump density M{s -> phi(s)}, with M{regular(xi,eta)
      = phi(xi/eta)/eta}.
    """
    regular: Callable
    diag_coeff: float
    alpha: float
    phi: Callable = field(default=None, compare=False)

    def kernelT(self, t):
        """
        Returns the density of the regular part in the coordinates
        M{t = log(xi/eta)}, M{rho = xi + eta}: M{Gamma~ dxi deta =
        phi(e^t) w(t) drho dt} with M{w = 1/(1+e^-t)}.
        """
        w = special.expit(t)
        return self.phi(np.exp(t))*w


def _powerPhi(alpha):
    c = np.sin(np.pi*alpha)/np.pi

    def phi(s):
        t = np.log(np.asarray(s, dtype=float))
        with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
            ratio = 2.0*np.sinh(alpha*t)/np.expm1(t)
        small = np.abs(t) < 1e-7
        ratio = np.where(small, 2.0*alpha*(1.0 - 0.5*t), ratio)
        ratio = np.where(np.isfinite(ratio), ratio, 0.0)
        return c*ratio
    return phi


def gamma_closed_form(alpha):
    """
    Returns the L{GammaRepr} of the power kernel M{W = (x/y)^a +
    (y/x)^a}: M{Gamma~(xi,eta) = sin(pi a)/pi ((xi/eta)^a -
    (eta/xi)^a)/(xi - eta)}, diagonal weight M{2 cos(pi a)}.

    @raise errors.DomainError: I{alpha} outside M{(0, 1/2)}.
    """
    if not 0 < alpha < 0.5:
        raise errors.DomainError(
            "alpha must lie in (0, 1/2), got {}".format(alpha))
    phi = _powerPhi(alpha)

    def regular(xi, eta):
        xi, eta = _positive(xi, eta)
        return _unwrap(phi(xi/eta)/eta)

    return GammaRepr(
        regular=regular, diag_coeff=2.0*np.cos(np.pi*alpha),
        alpha=alpha, phi=phi)


def _powerBoundary(alpha):
    e = np.exp(1j*np.pi*alpha)

    def gPlus(s):
        return s**alpha*e + s**-alpha/e

    def gMinus(s):
        return s**alpha/e + s**-alpha*e
    return gPlus, gMinus


def gamma_jump(spec, s):
    """
    Returns the jump density M{phi(s) = (G_-(-s) - G_+(-s)) / (2 pi i
    (1-s))} of M{W(.,1)} across the negative axis. At M{s = 1} I
    return the limit.

    @raise errors.UnsupportedOperation: No boundary values are known
      for the kernel.
    """
    s, = _positive(s)
    if spec.family in ('power', 'brownian'):
        if spec.alpha == 0:
            raise errors.UnsupportedOperation(
                "alpha = 0 leaves W without a jump")
        gPlus, gMinus = _powerBoundary(spec.alpha)
        limit = np.sin(np.pi*spec.alpha)/np.pi*2.0*spec.alpha
    elif spec.family == 'custom' and spec.boundary is not None:
        gPlus, gMinus = spec.boundary
        limit = None
    else:
        raise errors.UnsupportedOperation(
            "No analytic boundary values for the {} family".format(
                spec.family))

    def jump(s):
        with np.errstate(divide='ignore', invalid='ignore'):
            value = (gMinus(s) - gPlus(s))/(2j*np.pi*(1.0 - s))
        return np.real(value)

    result = jump(s)
    atOne = s == 1.0
    if np.any(atOne):
        if limit is None:
            h = 1e-5
            limit = 0.5*(jump(np.array(1.0 - h)) + jump(np.array(1.0 + h)))
        result = np.where(atOne, limit, result)
    return _unwrap(result)


def _tRule(alpha, n=10):
    """
    Nodes and weights in M{t = log(xi/eta)}, wide enough that the
    density has decayed by M{e^-40}.
    """
    T = np.ceil(40.0/(1.0 - alpha))
    return panelRule(np.arange(-T, T + 1.0), n)


def verify_repr(repr, spec, y, z, tol=1e-4):
    """
    Checks the representation M{W(y,z)/(y+z) = int int Gamma(xi,eta)
    exp(-xi y - eta z) dxi deta} by quadrature, returning the absolute
    residual.

    The regular part is integrated on a tensor grid in M{t =
    log(xi/eta)} and M{r = (xi+eta) c(t)}, M{c} being the exponent per
    unit M{xi+eta}; the diagonal contributes M{diag_coeff/(y+z)}.

    @raise errors.NumericFailure: The quadrature error estimate, from
      a half-order rule on the same panels, exceeds I{tol}.
    """
    y, z = [float(v) for v in _positive(y, z)]

    def lhs(n):
        t, wt = _tRule(repr.alpha, n)
        r, wr = panelRule(np.linspace(0.0, 45.0, 19), n)
        w = special.expit(t)
        c = w*y + (1.0 - w)*z
        inner = np.dot(wr, np.exp(-r))
        return np.dot(wt, repr.kernelT(t)/c)*inner + repr.diag_coeff/(y + z)

    value = lhs(10)
    estimate = abs(value - lhs(5))
    if not estimate < tol:
        raise errors.NumericFailure(
            "Representation quadrature at ({}, {}) only reached {:.3g}".format(
                y, z, estimate), estimate)
    target = spec.W(y, z)/(y + z)
    residual = abs(value - target)
    log.debug(
        "verify_repr(%g, %g): quadrature %.12g, target %.12g", y, z,
        value, target)
    return float(residual)


def gamma_weighted_integral(repr, k, l, theta, pureEta=False):
    """
    Returns M{int int |Gamma(xi,eta)| (1+xi)^-(k+theta)
    (1+eta)^-(l+theta) dxi deta}, or with I{pureEta} set, the variant
    with M{eta^-theta} in place of the M{eta} factor.

    The variant has its M{rho = xi + eta} integral in closed form,
    M{B(1-theta, k+2 theta-1) e^(theta t)} per unit M{t = log(xi/eta)}
    of the density, which decays only like M{e^-(theta-alpha)|t|}.

    @raise errors.DomainError: With I{pureEta}, I{theta} is not above
      the kernel's I{alpha} or M{k + 2 theta} is not above 1.
    """
    if pureEta:
        if not theta > repr.alpha or not k + 2*theta > 1:
            raise errors.DomainError(
                "Eta-weighted integral diverges for theta={:g}".format(theta))
        lo = np.ceil(40.0/(theta - repr.alpha))
        hi = np.ceil(40.0/(1.0 - repr.alpha))
        t, wt = panelRule(np.arange(-lo, hi + 1.0), 6)
        B = special.beta(1.0 - theta, k + 2*theta - 1.0)
        density = np.abs(repr.phi(np.exp(t)))*np.exp(theta*t)
        return float(B*(np.dot(wt, density) + abs(repr.diag_coeff)))
    t, wt = _tRule(repr.alpha, 6)
    rho, wr = logRule(1e-12, 1e12, 0.5, 6)
    t2 = t[:, None]
    xi = rho[None, :]*special.expit(t2)
    eta = rho[None, :]*special.expit(-t2)
    F = (1.0 + xi)**-(k + theta)*(1.0 + eta)**-(l + theta)
    diag = repr.diag_coeff/(k + l + 2*theta - 1.0)
    regular = np.dot(wt*np.abs(repr.kernelT(t)), F @ wr)
    return float(regular + abs(diag))


def gamma_eta_integral(repr, xi, theta, k=0):
    """
    Returns M{int |Gamma(xi,eta)| (1+eta)^-(k+theta) deta} at fixed
    I{xi}, the diagonal part included. The ranges beyond the quadrature
    window are added from the power-law asymptotics of I{phi}.
    """
    a = repr.alpha
    c = np.sin(np.pi*a)/np.pi
    lo, hi = xi*1e-14, 1e10*max(1.0, xi)
    eta, w = logRule(lo, hi, 0.25, 8)
    value = np.dot(w, np.abs(repr.phi(xi/eta))/eta*(1.0 + eta)**-(k + theta))
    value += c*xi**-a*hi**(a - k - theta)/(k + theta - a)
    value += c*xi**(a - 1.0)*lo**(1.0 - a)/(1.0 - a)
    return float(value + abs(repr.diag_coeff)*(1.0 + xi)**-(k + theta))


__all__ = [
    'FAMILIES', 'KernelSpec', 'eval_K', 'eval_W', 'GammaRepr',
    'gamma_closed_form', 'gamma_jump', 'verify_repr',
    'gamma_weighted_integral', 'gamma_eta_integral']
