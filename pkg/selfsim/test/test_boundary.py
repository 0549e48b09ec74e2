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
Unit tests for selfsim.boundary
"""

import numpy as np

from selfsim import errors
from selfsim import boundary as b
from selfsim.kernels import KernelSpec
from selfsim.profiles import Profile, muBar, mu_view
from selfsim.solver import SolverOptions, solve_selfsim
from selfsim.test.testbase import TestCase, smallGrid, expProfile


ALPHA = 0.25
# Gamma(3/4) + Gamma(5/4)
BETA_ONE = 2.131819
# eps Gamma(5/4)/alpha with eps = 0.1
PHI_LIMIT = 0.362561


def powerSpec(epsilon=0.1):
    return KernelSpec(epsilon=epsilon, alpha=ALPHA, family='power')


def customSpec(epsilon=0.1):
    return KernelSpec(
        epsilon=epsilon, alpha=ALPHA, family='custom',
        w1=lambda s: s**ALPHA + s**-ALPHA)


class TestBetaPhi(TestCase):
    def test_beta_w(self):
        self.assertClose(b.beta_w(powerSpec(), muBar(), 1.0), BETA_ONE, 1e-6)
        y = np.array([0.5, 1.0, 2.0])
        values = b.beta_w(powerSpec(), muBar(), y)
        self.assertEqual(values.shape, (3,))
        self.assertClose(values[1], BETA_ONE, 1e-6)

    def test_beta_wGeneric(self):
        y = np.array([0.1, 1.0, 3.0])
        self.assertClose(
            b.beta_w(customSpec(), muBar(), y),
            b.beta_w(powerSpec(), muBar(), y), 1e-5)

    def test_beta_wDomain(self):
        self.assertRaises(
            errors.DomainError, b.beta_w, powerSpec(), muBar(), 0.0)

    def test_phiLimit(self):
        for x in (3e-4, 1e-4):
            value = x**ALPHA*b.phi(powerSpec(), muBar(), x)
            self.assertClose(value, PHI_LIMIT, 0.03)

    def test_phiGeneric(self):
        x = np.array([0.01, 0.5, 2.0])
        self.assertClose(
            b.phi(customSpec(), muBar(), x),
            b.phi(powerSpec(), muBar(), x), 1e-5)

    def test_phiZeroEpsilon(self):
        self.assertEqual(b.phi(powerSpec(0.0), muBar(), 0.5), 0.0)

    def test_phiDecreasing(self):
        x = np.geomspace(1e-3, 10.0, 20)
        values = b.phi(powerSpec(), muBar(), x)
        self.assertTrue(np.all(np.diff(values) < 0))


class TestLayerFunctions(TestCase):
    def test_build(self):
        layer = b.LayerFunctions.build(powerSpec(), muBar())
        self.assertClose(layer.kappa, 0.0, atol=1e-12)
        self.assertClose(layer.m_alpha, 0.906402, 1e-6)
        self.assertClose(layer.beta_w(1.0), BETA_ONE, 1e-6)
        self.assertClose(
            layer.phi(0.5), b.phi(powerSpec(), muBar(), 0.5), 1e-12)
        self.assertClose(layer.phiAsymptote(powerSpec()), PHI_LIMIT, 1e-5)

    def test_buildGeneric(self):
        layer = b.LayerFunctions.build(customSpec(), muBar())
        x = np.array([0.05, 1.0])
        self.assertClose(
            layer.phi(x), b.phi(powerSpec(), muBar(), x), 1e-3)


class TestReconstruct(TestCase):
    timeout = 300

    def test_constantExact(self):
        for x in (0.01, 0.5, 2.0):
            lhs, rhs = b.bl_reconstruct(KernelSpec(), muBar(), x)
            self.assertClose(lhs, np.exp(-x), 1e-12)
            self.assertClose(rhs, lhs, 1e-8)

    def test_domain(self):
        self.assertRaises(
            errors.DomainError, b.bl_reconstruct, KernelSpec(), muBar(), 0.0)

    def test_threshold(self):
        self.assertClose(b.bl_threshold(1e-5), 1e-4, 1e-15)
        self.assertClose(b.bl_threshold(1e-3), 1e-2, 1e-15)

    def test_solvedPower(self):
        spec = powerSpec()
        opts = SolverOptions(tol=1e-5)
        grid = smallGrid(300)
        f, report = solve_selfsim(spec, expProfile(grid), opts)
        self.assertTrue(report.converged)
        mu = mu_view(f)
        layer = b.LayerFunctions.build(spec, mu)
        x = grid.nodes
        k = np.unique(np.searchsorted(x, np.geomspace(1e-2, 20.0, 20)))
        self.assertEqual(len(k), 20)
        for xk in x[k]:
            lhs, rhs = b.bl_reconstruct(spec, mu, xk, layer)
            mismatch = abs(lhs - rhs)/lhs
            self.assertLess(
                mismatch, b.bl_threshold(opts.tol), "x={:.4g}".format(xk))


class TestNearZero(TestCase):
    def test_exponential(self):
        beta, const, spread = b.nearzero_fit(KernelSpec(), expProfile())
        self.assertClose(beta, 2.0, 1e-5)
        self.assertClose(const, 1.0, atol=1e-2)
        self.assertGreater(spread, 0.0)
        self.assertLess(spread, 0.011)

    def test_noWindow(self):
        grid = smallGrid()
        x = grid.nodes
        f = Profile(grid, np.where(x < 1e-2, 0.0, np.exp(-x)))
        self.assertRaises(errors.FitFailure, b.nearzero_fit, KernelSpec(), f)
        self.assertRaises(
            errors.FitFailure, b.nearzero_fit, KernelSpec(), f, 1e-5)
