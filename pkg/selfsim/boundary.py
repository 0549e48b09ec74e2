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
Boundary-layer functionals of a profile: M{beta_W}, M{Phi}, the
integrated form of the profile equation that they enter, and the
near-zero asymptotics.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from selfsim import errors
from selfsim.profiles import upperGamma
from selfsim.quadrature import gradedEdges, logRule, panelRule

log = logging.getLogger(__name__)


def _zRule():
    edges = np.concatenate([
        gradedEdges(0.0, 1.0, 'a', 0.25, 10), np.linspace(1.0, 46.0, 46)[1:]])
    return panelRule(edges, 8)


def _tailRule(x, nodes=None):
    """
    Nodes and weights for M{int_x^inf} of an integrand decaying like
    M{e^-t}. With the grid I{nodes} of a tabulated integrand, the
    panels between I{x} and the last node end at the nodes.
    """
    if nodes is not None and x < nodes[-1]:
        a, wa = panelRule(np.concatenate([[x], nodes[nodes > x]]), 8)
        b, wb = panelRule(np.linspace(nodes[-1], nodes[-1] + 45.0, 46), 8)
        return np.concatenate([a, b]), np.concatenate([wa, wb])
    if x < 1:
        a, wa = logRule(x, 1.0, 0.25, 8)
        b, wb = panelRule(np.linspace(1.0, 46.0, 46), 8)
        return np.concatenate([a, b]), np.concatenate([wa, wb])
    return panelRule(np.linspace(x, x + 45.0, 46), 8)


def _asArray(y):
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise errors.DomainError("Arguments must be positive")
    return y.ndim == 0, np.atleast_1d(y)


def _betaGeneric(spec, mu, y):
    z, w = _zRule()
    g = w*mu(z)*np.exp(-z)
    return spec.W(y[:, None], z[None, :]) @ g


def beta_w(spec, mu, y):
    """
    Returns M{beta_W(y; mu) = int_0^inf W(y,z) mu(z) e^-z dz}, in closed
    form from the moments of I{mu} when I{W} is a sum of monomials.
    """
    scalar, y = _asArray(y)
    terms = spec.wTerms()
    if terms is None:
        result = _betaGeneric(spec, mu, y)
    else:
        result = np.zeros_like(y)
        for c, a, b in terms:
            result += c*y**a*mu.integrate(b, 1.0)
    if not np.all(np.isfinite(result)):
        raise errors.NumericFailure("Non-finite beta_W", result)
    return float(result[0]) if scalar else result


def _phiGeneric(spec, mu, x):
    out = np.empty_like(x)
    for k, xk in enumerate(x):
        t, w = _tailRule(xk)
        out[k] = np.dot(w, _betaGeneric(spec, mu, t)*np.exp(-t)/t)
    return spec.epsilon*out


def phi(spec, mu, x):
    """
    Returns M{Phi(x; mu) = eps int_x^inf beta_W(t) e^-t / t dt}. For
    monomial I{W} this is M{eps sum c M_b Gamma(a, x)} with M{M_b = int
    z^b mu e^-z}.
    """
    scalar, x = _asArray(x)
    if spec.epsilon == 0:
        result = np.zeros_like(x)
    else:
        terms = spec.wTerms()
        if terms is None:
            result = _phiGeneric(spec, mu, x)
        else:
            result = np.zeros_like(x)
            for c, a, b in terms:
                result += c*mu.integrate(b, 1.0)*upperGamma(a, x)
            result *= spec.epsilon
    return float(result[0]) if scalar else result


@dataclass(frozen=True)
class LayerFunctions(object):
    """
    I am the boundary-layer data of one profile, built once and read
    many times.

    @ivar kappa: M{2(U(1) - 1)} with M{U(1) = int mu e^-z}.
    @ivar m_alpha: M{int z^alpha mu e^-z}.
    """
    beta_w: Callable
    phi: Callable
    kappa: float
    m_alpha: float

    @classmethod
    def build(cls, spec, mu):
        kappa = 2.0*(mu.integrate(0.0, 1.0) - 1.0)
        m_alpha = mu.integrate(spec.alpha, 1.0)
        if not spec.hasW:
            def zero(x):
                return 0.0*np.asarray(x, dtype=float)
            return cls(zero, zero, kappa, m_alpha)
        terms = spec.wTerms()
        if terms is not None:
            moments = [(c, a, mu.integrate(b, 1.0)) for c, a, b in terms]

            def betaW(y):
                y = np.asarray(y, dtype=float)
                return sum(c*M*y**a for c, a, M in moments)

            def phiX(x):
                if spec.epsilon == 0:
                    return 0.0*np.asarray(x, dtype=float)
                return spec.epsilon*sum(
                    c*M*upperGamma(a, np.asarray(x, dtype=float))
                    for c, a, M in moments)
            return cls(betaW, phiX, kappa, m_alpha)
        table = np.geomspace(1e-6, 60.0, 400)
        values = _phiGeneric(spec, mu, table)
        positive = np.all(values > 0)

        def phiTable(x):
            s = np.log(np.asarray(x, dtype=float))
            if not positive:
                return np.interp(s, np.log(table), values)
            return np.exp(np.interp(s, np.log(table), np.log(values)))
        return cls(
            lambda y: beta_w(spec, mu, y), phiTable, kappa, m_alpha)

    def phiAsymptote(self, spec):
        """
        Returns the limit of M{x^alpha Phi(x)} as M{x -> 0}, M{eps C_W
        m_alpha / alpha}.
        """
        return spec.epsilon*spec.c_w*self.m_alpha/spec.alpha


def _convolution(spec, mu, xi):
    """
    Returns M{C(xi) = int_0^xi K(y, xi-y) y mu(y) mu(xi-y) dy} at each
    of I{xi}. By homogeneity and the symmetry M{y <-> xi - y}::

      C(xi) = xi^2 int_0^(1/2) K(s, 1-s) mu(xi s) mu(xi (1-s)) ds

    integrated on panels of equal width in M{log s}.
    """
    s, w = logRule(1e-12, 0.5, 0.1, 8)
    w = w*spec.K(s, 1.0 - s)
    left = mu(np.outer(xi, s).ravel()).reshape(len(xi), len(s))
    right = mu(np.outer(xi, 1.0 - s).ravel()).reshape(len(xi), len(s))
    return xi**2*((left*right) @ w)


def bl_reconstruct(spec, mu, x, layer=None):
    """
    Returns (lhs, rhs) of the integrated equation::

      e^-x mu(x) = -eps int_x^inf (x/xi)^kappa e^(Phi(xi)-Phi(x))
                   beta_W(xi) ((1-e^-xi)/xi) e^-xi mu(xi) dxi
                 + int_x^inf (e^-xi/xi^2) (x/xi)^kappa e^(Phi(xi)-Phi(x))
                   C(xi) dxi

    with M{C(xi) = int_0^xi K(y, xi-y) y mu(y) mu(xi-y) dy}. A
    solution makes the two agree; they are computed independently of
    the solver's own quadrature.

    @param layer: A prebuilt L{LayerFunctions} for I{mu}, built here
      if omitted.
    """
    if not x > 0:
        raise errors.DomainError("x must be positive")
    layer = layer or LayerFunctions.build(spec, mu)
    grid = getattr(mu, 'grid', None)
    xi, w = _tailRule(x, None if grid is None else grid.nodes)
    factor = (x/xi)**layer.kappa*np.exp(layer.phi(xi) - layer.phi(x))
    muXi = mu(xi)
    rhs = np.dot(w, np.exp(-xi)/xi**2*factor*_convolution(spec, mu, xi))
    if spec.epsilon > 0 and spec.hasW:
        integrand = (factor*layer.beta_w(xi)*(-np.expm1(-xi))/xi
                     *np.exp(-xi)*muXi)
        rhs -= spec.epsilon*np.dot(w, integrand)
    lhs = np.exp(-x)*float(mu(x))
    if not np.isfinite(rhs):
        raise errors.NumericFailure(
            "Integrated equation quadrature failed at x={:g}".format(x), rhs)
    return lhs, float(rhs)


def bl_threshold(tol):
    """
    Returns the acceptance level for the relative mismatch of
    L{bl_reconstruct}: ten times the solver tolerance.
    """
    return 10.0*tol


def nearzero_fit(spec, f, x_hi=1e-2):
    """
    Fits the near-zero layer of the profile I{f}, returning (M{beta(f)},
    layer constant, plateau spread).

    The compensated quantity M{Q(x) = f(x) x^(2-beta) exp((eps/alpha)
    C_W m_alpha x^-alpha)}, with M{beta = 2 int f} and M{m_alpha = int
    z^alpha f}, is flat where the layer ansatz holds. I return its
    geometric mean over the nodes in M{[x_min, x_hi]} and M{max Q/min Q
    - 1}.

    @raise errors.FitFailure: I{f} is not positive on the window.
    """
    x = f.grid.nodes
    mask = x <= x_hi
    v = f.values[mask]
    if mask.sum() < 2 or not np.all(v > 0):
        raise errors.FitFailure("Near-zero window needs positive values")
    beta = 2.0*f.moment(0.0)
    logQ = np.log(v) + (2.0 - beta)*np.log(x[mask])
    if spec.epsilon > 0 and spec.alpha > 0:
        m = f.moment(spec.alpha)
        logQ += spec.epsilon*spec.c_w*m/spec.alpha*x[mask]**-spec.alpha
    spread = float(np.exp(logQ.max() - logQ.min()) - 1.0)
    log.debug("Near-zero fit: beta {:.6g}, spread {:.3e} over {:d} nodes".format(
        beta, spread, int(mask.sum())))
    return float(beta), float(np.exp(logQ.mean())), spread


__all__ = [
    'beta_w', 'phi', 'LayerFunctions', 'bl_reconstruct', 'bl_threshold',
    'nearzero_fit']
