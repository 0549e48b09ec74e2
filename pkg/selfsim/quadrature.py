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
Gauss rules on panels. Everything here returns flat node and weight
arrays so that callers can evaluate an integrand once, vectorized,
and take a dot product.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special


@lru_cache(maxsize=64)
def gaussLegendre(n):
    """
    Returns Gauss-Legendre nodes and weights for [-1, 1], cached.
    """
    t, w = leggauss(n)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


@lru_cache(maxsize=64)
def gaussJacobi(n, a, b):
    """
    Returns nodes and weights for the weight M{(1-t)^a (1+t)^b} on
    [-1, 1], cached.
    """
    t, w = special.roots_jacobi(n, a, b)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def panelRule(edges, n=8):
    """
    Returns nodes and weights of an I{n}-point Gauss-Legendre rule
    applied on each panel between successive I{edges}.
    """
    edges = np.asarray(edges, dtype=float)
    t, w = gaussLegendre(n)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5*(hi - lo)
    x = lo + half*(1.0 + t)
    return x.ravel(), (half*w).ravel()


def gradedEdges(a, b, toward='a', ratio=0.25, levels=8):
    """
    Returns panel edges on [a, b] shrinking geometrically by I{ratio}
    toward one end (I{toward} is 'a', 'b' or 'both'), I{levels} panels
    deep.
    """
    if toward == 'both':
        mid = 0.5*(a + b)
        left = gradedEdges(a, mid, 'a', ratio, levels)
        right = gradedEdges(mid, b, 'b', ratio, levels)
        return np.concatenate([left, right[1:]])
    L = b - a
    fractions = ratio**np.arange(levels, -1, -1)
    if toward == 'a':
        return np.concatenate([[a], a + L*fractions])
    return (a + b - gradedEdges(a, b, 'a', ratio, levels))[::-1]


def gradedRule(a, b, toward='a', ratio=0.25, levels=8, n=8):
    """
    Gauss-Legendre nodes and weights on geometrically graded panels of
    [a, b], for integrands with an integrable endpoint singularity.
    """
    return panelRule(gradedEdges(a, b, toward, ratio, levels), n)


def jacobiRule(n, a, b, lo=0.0, hi=1.0):
    """
    Returns nodes I{x} and weights I{w} with M{sum(w*g(x))} approximating
    M{int_lo^hi (hi-x)^a (x-lo)^b g(x) dx} for smooth I{g}. Both
    exponents must exceed -1.
    """
    t, w = gaussJacobi(n, a, b)
    half = 0.5*(hi - lo)
    return lo + half*(1.0 + t), w*half**(a + b + 1.0)


def logRule(lo, hi, width=0.5, n=8):
    """
    Returns nodes and weights for M{int_lo^hi g(x) dx} with panels of
    equal I{width} in M{log x}. The weights include the Jacobian I{x}.
    """
    N = max(1, int(np.ceil(np.log(hi/lo)/width)))
    s, ws = panelRule(np.linspace(np.log(lo), np.log(hi), N+1), n)
    x = np.exp(s)
    return x, ws*x


__all__ = [
    'gaussLegendre', 'gaussJacobi', 'panelRule', 'gradedEdges',
    'gradedRule', 'jacobiRule', 'logRule']
