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
The coagulation bilinear forms M{B_K}, M{B_2} and M{B_W}, in physical
space by direct quadrature and through their Laplace identities.

All forms act on M{mu}-type evaluators: vectorized callables on M{(0,
inf)} growing slower than M{e^z}. Transform-side inputs are
L{LaplaceEval} objects.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, wraps

import numpy as np
from scipy import integrate
from scipy.special import expit

from selfsim import errors
from selfsim.kernels import KernelSpec, gamma_closed_form
from selfsim.laplace import (
    LaplaceEval, transform, seminorm, fullnorm, pGrid)
from selfsim.quadrature import gradedEdges, panelRule


P_TAYLOR = 1e-4
U_MAX = 40.0
N_BW = 200

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BilinearResult(object):
    """
    I am a bilinear form sampled at a set of points.
    """
    x_values: np.ndarray
    values: np.ndarray
    kernel: KernelSpec


@lru_cache(maxsize=None)
def _uRule(levels=10):
    edges = np.concatenate([
        gradedEdges(0.0, 1.0, 'a', 0.25, levels),
        np.linspace(1.0, U_MAX, int(U_MAX))[1:]])
    u, w = panelRule(edges, 8)
    w = w*np.exp(-u)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def _form(kernel, m1, m2, x, levels=10):
    """
    Returns M{(1/x^2) int_0^x y mu1(y) int_0^inf k(y, x-y+u) mu2(x-y+u)
    e^-u du dy}, the defining double integral after shifting the inner
    variable to M{u = z - (x - y)}.
    """
    if not x > 0:
        raise errors.DomainError("x must be positive, got {}".format(x))
    y, wy = panelRule(gradedEdges(0.0, x, 'both', 0.25, levels), 8)
    u, wu = _uRule(levels)
    Z = (x - y)[:, None] + u[None, :]
    inner = (kernel(y[:, None], Z)*m2(Z.ravel()).reshape(Z.shape)) @ wu
    value = np.dot(wy, y*m1(y)*inner)/x**2
    if not np.isfinite(value):
        raise errors.NumericFailure(
            "Bilinear quadrature failed at x={:g}".format(x), value)
    return float(value)


def apply_BK(spec, m1, m2, x):
    """
    Returns M{B_K(mu1, mu2)(x)} for the kernel I{K} of I{spec}.

    @raise errors.DomainError: M{x <= 0}.
    @raise errors.NumericFailure: The quadrature gave a non-finite value.
    """
    return _form(spec.K, m1, m2, x)


def apply_BW(spec, m1, m2, x):
    """
    Returns the form with the kernel replaced by I{W}.

    @raise errors.UnsupportedOperation: The constant family has no I{W}.
    """
    if not spec.hasW:
        raise errors.UnsupportedOperation(
            "The constant family has no W part")
    return _form(spec.W, m1, m2, x)


def sample_form(spec, m1, m2, x_values, part='K'):
    """
    Returns a L{BilinearResult} of the I{part} form ('K' or 'W') at
    each of I{x_values}.
    """
    f = apply_BK if part == 'K' else apply_BW
    x_values = np.asarray(x_values, dtype=float)
    values = np.array([f(spec, m1, m2, x) for x in x_values])
    return BilinearResult(x_values, values, spec)


def laplace_physical(spec, m1, m2, p, part='K', power=2):
    """
    Returns M{int_0^inf x^power e^(-p x) B(mu1, mu2)(x) dx} by quadrature
    over physical-space values of the I{part} form, the independent
    route against which the Laplace identities are checked.
    """
    X = max(10.0, 40.0/p)
    edges = np.concatenate([
        gradedEdges(0.0, 1.0, 'a', 0.25, 8),
        np.linspace(1.0, X, int(np.ceil(X)))[1:]])
    x, w = panelRule(edges, 6)
    B = sample_form(spec, m1, m2, x, part).values
    return float(np.sum(w*x**power*np.exp(-p*x)*B))


def _eval(f, p):
    p = np.asarray(p, dtype=float)
    return np.asarray(f(p.ravel()), dtype=float).reshape(p.shape)


def _shiftQuotient(L, k, p, arg):
    """
    Returns M{-(Omega^(k)(p+arg) - Omega^(k)(1+arg))/(p-1)}, switching
    to its first-order expansion in M{p-1} close to one.
    """
    if abs(p - 1.0) < P_TAYLOR:
        g = _eval(L.channel(k + 1), 1.0 + arg)
        try:
            h = _eval(L.channel(k + 2), 1.0 + arg)
        except errors.UnsupportedOperation:
            return -g
        return -g - 0.5*(p - 1.0)*h
    return -(_eval(L.channel(k), p + arg) -
             _eval(L.channel(k), 1.0 + arg))/(p - 1.0)


def _vectorized(f):
    """
    Lets I{f} take an array for its last positional argument I{p}.
    """
    @wraps(f)
    def wrapper(*args, **kw):
        p = args[-1]
        if np.ndim(p) == 0:
            return f(*args, **kw)
        head = args[:-1]
        return np.array(
            [f(*(head + (float(q),)), **kw) for q in np.ravel(p)])
    return wrapper


@_vectorized
def laplace_B2(L1, L2, p):
    """
    Returns M{int x^2 e^(-p x) B_2(w1, w2) dx = 2/(p-1) Omega1'(p)
    (Omega2(p) - Omega2(1))}, with its removable singularity at M{p = 1}
    filled by expansion.
    """
    if not p > 0:
        raise errors.DomainError("p must be positive")
    d1 = float(_eval(L1.channel(1), p))
    return float(-2.0*d1*_shiftQuotient(L2, 0, p, np.array(0.0)))


def _rhoRule():
    s, w = panelRule(np.linspace(-24.0, 18.0, 43), 8)
    rho = np.exp(s)
    return rho, w*rho


def _tRule(alpha):
    T = np.ceil(30.0/(1.0 - alpha))
    return panelRule(np.linspace(-T, T, int(T) + 1), 8)


@_vectorized
def laplace_BW(repr, L1, L2, p):
    """
    Returns M{int x^2 e^(-p x) B_W(w1, w2) dx} from the representation
    M{Gamma} of I{W/(y+z)}, as M{L1 + L2} with

      - M{L1 = -1/(p-1) intint Gamma Omega1''(xi+p) (Omega2(p+eta) -
        Omega2(1+eta))}
      - M{L2 = -1/(p-1) intint Gamma Omega1'(xi+p) (Omega2'(p+eta) -
        Omega2'(1+eta))}

    The regular part is integrated in M{rho = xi + eta}, M{t =
    log(xi/eta)}, where M{Gamma dxi deta} becomes C{kernelT(t) drho
    dt}; the diagonal part is a single integral.
    """
    if not p > 0:
        raise errors.DomainError("p must be positive")
    rho, wr = _rhoRule()
    t, wt = _tRule(repr.alpha)
    R, T = rho[:, None], t[None, :]
    xi, eta = R*expit(T), R*expit(-T)

    def bracket(a, b):
        return (_eval(L1.channel(2), a + p)*_shiftQuotient(L2, 0, p, b) +
                _eval(L1.channel(1), a + p)*_shiftQuotient(L2, 1, p, b))

    regular = wr @ bracket(xi, eta) @ (wt*repr.kernelT(t))
    diagonal = repr.diag_coeff*np.dot(wr, bracket(rho, rho))
    value = regular + diagonal
    if not np.isfinite(value):
        raise errors.NumericFailure(
            "B_W transform quadrature failed at p={:g}".format(p), value)
    return float(value)


@_vectorized
def laplace_BK_separable(spec, w1, w2, p, part='K'):
    """
    Returns M{int x^2 e^(-p x) B(w1, w2) dx} exactly when the I{part}
    kernel is a sum of monomials M{c y^a z^b}, as M{1/(1-p) sum c
    I1(1+a, p) (I2(b, p) - I2(b, 1))} with M{I(s, p) = int x^s e^(-p x)
    w}. I{w1} and I{w2} need an C{integrate} method.

    @raise errors.UnsupportedOperation: The kernel has no monomial
      form.
    """
    terms = spec.separable() if part == 'K' else spec.wTerms()
    if terms is None:
        raise errors.UnsupportedOperation(
            "Kernel part {} of family {} is not separable".format(
                part, spec.family))
    total = 0.0
    for c, a, b in terms:
        first = w1.integrate(1.0 + a, p)
        if abs(p - 1.0) < P_TAYLOR:
            quotient = w2.integrate(b + 1.0, 1.0) - 0.5*(p - 1.0)*(
                w2.integrate(b + 2.0, 1.0))
        else:
            quotient = (w2.integrate(b, p) - w2.integrate(b, 1.0))/(1.0 - p)
        total += c*first*quotient
    return float(total)


def _fromInfinity(p, values):
    """
    Returns M{int_p^inf g dq} at each point of the log grid I{p}, the
    part beyond the grid from a power law through the last two values.
    """
    tail = 0.0
    a, b = values[-2], values[-1]
    if a*b > 0:
        slope = np.log(b/a)/np.log(p[-1]/p[-2])
        if slope < -1:
            tail = -b*p[-1]/(slope + 1.0)
    s = np.log(p)
    inner = integrate.cumulative_trapezoid(
        (values*p)[::-1], -s[::-1], initial=0.0)[::-1]
    return inner + tail


def integratedEval(second, count=N_BW):
    """
    Returns a L{LaplaceEval} tabulated on a log p-grid of I{count}
    points from the second-derivative channel I{second} alone, with
    M{Omega'(p) = -int_p^inf Omega''} and M{Omega(p) = -int_p^inf
    Omega'}. Channels interpolate linearly in M{log p}.
    """
    p = pGrid(count)
    F = np.asarray(second(p), dtype=float)
    G = _fromInfinity(p, F)
    H = _fromInfinity(p, G)
    s = np.log(p)

    def channel(values):
        return lambda q: np.interp(np.log(q), s, values)
    return LaplaceEval(channel(H), channel(-G), channel(F))


def verify_bilinear_bound(test_set, theta, spec=None, count=N_BW):
    """
    Returns the largest observed ratios M{|B_2(w1,w2)|_2 / (||w1||_1
    ||w2||_1)} and, if I{spec} has a power-type I{W}, M{||B_W(w1,
    w2)||_(2,theta-alpha) / (||w1||_2 ||w2||_2)} over the pairs in
    I{test_set}, as a dict with keys C{B2} and C{BW}. Pairs with a
    vanishing denominator are skipped.

    The I{B_W} full norm comes from an L{integratedEval} of I{count}
    points.
    """
    result = {'B2': None, 'BW': None}
    repr = None
    if spec is not None and spec.wTerms() is not None and spec.alpha > 0:
        repr = gamma_closed_form(spec.alpha)
    for w1, w2 in test_set:
        L1, L2 = transform(w1), transform(w2)
        denominator = fullnorm(L1, 1, theta)*fullnorm(L2, 1, theta)
        if denominator > 0:
            LB = LaplaceEval(None, None, lambda p: laplace_B2(L1, L2, p))
            ratio = seminorm(LB, 2, theta).value/denominator
            result['B2'] = max(result['B2'] or 0.0, ratio)
        if repr is None:
            continue
        denominator = fullnorm(L1, 2, theta)*fullnorm(L2, 2, theta)
        if denominator > 0:
            LB = integratedEval(
                lambda p: laplace_BW(repr, L1, L2, p), count)
            ratio = fullnorm(LB, 2, theta - spec.alpha, count)
            result['BW'] = max(result['BW'] or 0.0, ratio/denominator)
    log.info("Bilinear bound ratios: {}".format(result))
    return result


__all__ = [
    'BilinearResult', 'apply_BK', 'apply_BW', 'sample_form',
    'laplace_physical', 'laplace_B2', 'laplace_BW', 'integratedEval',
    'laplace_BK_separable', 'verify_bilinear_bound']
