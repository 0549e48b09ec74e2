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
Unit tests for selfsim.profiles
"""

import io

import numpy as np
from scipy import integrate, special

from selfsim import errors
from selfsim import profiles as pr
from selfsim.test.testbase import TestCase, smallGrid, expProfile


class TestGrid(TestCase):
    def test_nodes(self):
        grid = pr.Grid(1e-4, 40.0, 100)
        x = grid.nodes
        self.assertEqual(len(x), 100)
        self.assertEqual(x[0], 1e-4)
        self.assertEqual(x[-1], 40.0)
        self.assertClose(x[1:]/x[:-1], grid.ratio, 1e-12)

    def test_readOnly(self):
        x = pr.Grid().nodes
        self.assertRaises(ValueError, x.__setitem__, 0, 1.0)

    def test_invalid(self):
        self.assertRaises(errors.DomainError, pr.Grid, 2.0, 40.0, 100)
        self.assertRaises(errors.DomainError, pr.Grid, 1e-4, 0.5, 100)
        self.assertRaises(errors.DomainError, pr.Grid, 1e-4, 40.0, 10)

    def test_asDict(self):
        self.assertEqual(
            pr.Grid().asDict(), {'x_min': 1e-4, 'x_max': 40.0, 'n': 600})


class TestFitDecay(TestCase):
    def test_exact(self):
        x = np.linspace(10.0, 40.0, 31)
        rate, intercept = pr.fitDecay(x, 3.0*np.exp(-2.0*x))
        self.assertClose(rate, 2.0, 1e-10)
        self.assertClose(intercept, np.log(3.0), 1e-8)

    def test_failures(self):
        x = np.linspace(10.0, 40.0, 31)
        self.assertRaises(errors.FitFailure, pr.fitDecay, x, np.exp(x))
        self.assertRaises(errors.FitFailure, pr.fitDecay, x, 0.0*x)
        self.assertRaises(
            errors.FitFailure, pr.fitDecay, x[:2], np.exp(-x[:2]))


class TestUpperGamma(TestCase):
    def test_positive(self):
        self.assertClose(pr.upperGamma(1.0, 2.0), np.exp(-2.0), 1e-14)

    def test_zero(self):
        self.assertClose(pr.upperGamma(0.0, 0.5), special.exp1(0.5), 1e-14)

    def test_negative(self):
        for s in (-0.25, -1.3):
            expected = integrate.quad(
                lambda t: t**(s - 1.0)*np.exp(-t), 0.7, np.inf)[0]
            self.assertClose(pr.upperGamma(s, 0.7), expected, 1e-9)


class TestGridFunction(TestCase):
    def setUp(self):
        TestCase.setUp(self)
        self.f = expProfile()

    def test_tail(self):
        self.assertClose(self.f.decay_rate, 1.0, 1e-10)
        self.assertClose(self.f.tail_amp, 1.0, 1e-8)
        self.assertClose(self.f(50.0), np.exp(-50.0), 1e-8)

    def test_interpolation(self):
        x = np.array([3e-4, 0.37, 1.0, 7.7, 39.0])
        self.assertClose(self.f(x), np.exp(-x), 1e-12)
        self.assertIsInstance(self.f(0.37), float)

    def test_nearZero(self):
        self.assertClose(self.f(1e-6), np.exp(-1e-6), 1e-12)

    def test_integrate(self):
        p = np.array([0.01, 1.0, 100.0])
        self.assertClose(self.f.integrate(0.0, p), 1.0/(1.0 + p), 1e-8)
        self.assertClose(self.f.integrate(1.0, 1.0), 0.25, 1e-8)

    def test_moments(self):
        self.assertClose(self.f.mass(), 1.0, 1e-8)
        self.assertClose(pr.mass(self.f), 1.0, 1e-8)
        self.assertClose(pr.moment(self.f, 0.25), 0.90640, 1e-5)
        self.assertClose(
            self.f.moment(-0.25), special.gamma(0.75), 1e-7)

    def test_integrate_errors(self):
        self.assertRaises(errors.DomainError, self.f.integrate, -1.0, 1.0)
        self.assertRaises(errors.DomainError, self.f.integrate, 0.0, -2.0)
        self.assertRaises(errors.DomainError, self.f.moment, -1.5)

    def test_upperIntegral(self):
        s = np.array([0.0, 1e-5, 0.5, 10.0, 50.0])
        self.assertClose(self.f.upperIntegral(0.0, s), np.exp(-s), 1e-9)
        self.assertClose(
            self.f.upperIntegral(-0.25, 1.0), pr.upperGamma(0.75, 1.0), 1e-7)
        self.assertClose(
            self.f.upperIntegral(2.0, 3.0), pr.upperGamma(3.0, 3.0), 1e-7)

    def test_invalidValues(self):
        grid = smallGrid()
        self.assertRaises(
            errors.DomainError, pr.Profile, grid, -np.ones(grid.n))
        self.assertRaises(errors.DomainError, pr.Profile, grid, np.ones(5))
        values = np.ones(grid.n)
        values[3] = np.nan
        self.assertRaises(errors.NumericFailure, pr.Profile, grid, values)

    def test_signed(self):
        grid = smallGrid()
        x = grid.nodes
        g = pr.GridFunction(grid, (1.0 - x)*np.exp(-x), tail_rate=1.0)
        # int (1-x) e^-x dx = 0
        self.assertClose(g.integrate(0.0, 0.0), 0.0, atol=2e-3)

    def test_layer(self):
        layer = pr.LayerModel(beta=2.2, m_alpha=0.9, epsilon=0.1, alpha=0.25)
        self.assertClose(layer.shape(1e-4, 1e-4), 1.0, 1e-15)
        self.assertLess(layer.shape(1e-6, 1e-4), 1.0)
        grid = smallGrid()
        f = pr.Profile(grid, np.exp(-grid.nodes), layer=layer)
        self.assertClose(f(1e-6), f.values[0]*layer.shape(1e-6, 1e-4), 1e-12)
        self.assertTrue(np.isfinite(f.integrate(0.0, 1.0)))
        self.assertClose(
            layer.rescaled(2.0).m_alpha, 0.9*2.0**-0.25, 1e-14)


class TestExpMixture(TestCase):
    def test_closedForms(self):
        m = pr.ExpMixture([(2.0, 1.0, 0), (1.0, 2.0, 1)])
        self.assertClose(m(0.5), 2*np.exp(-0.5) + 0.5*np.exp(-1.0), 1e-15)
        self.assertClose(m.integrate(0.0, 1.0), 1.0 + 1.0/9, 1e-14)
        self.assertClose(m.mass(), 2.0 + 0.25, 1e-14)
        self.assertClose(m.upperIntegral(0.0, 0.0), 2.0 + 0.25, 1e-14)

    def test_arithmetic(self):
        a = pr.ExpMixture([(1.0, 1.0, 0)])
        b = pr.ExpMixture([(1.0, 2.0, 0)])
        d = a - b
        self.assertFalse(d.isNonnegative)
        self.assertClose(d(1.0), np.exp(-1.0) - np.exp(-2.0), 1e-15)
        self.assertClose((3.0*a)(0.0), 3.0, 1e-15)
        self.assertClose(a.shifted(1.0)(1.0), np.exp(-2.0), 1e-15)

    def test_onGrid(self):
        grid = smallGrid()
        m = pr.ExpMixture([(1.0, 1.0, 0), (-0.5, 2.0, 0)])
        g = m.onGrid(grid)
        self.assertNotIsInstance(g, pr.Profile)
        self.assertEqual(g.tail_rate, 1.0)
        self.assertClose(g.integrate(0.0, 1.0), m.integrate(0.0, 1.0), 1e-3)
        self.assertIsInstance(pr.ExpMixture([(1.0, 1.0, 0)]).onGrid(grid),
                              pr.Profile)

    def test_muBar(self):
        m = pr.muBar()
        p = np.array([0.5, 2.0])
        self.assertClose(m.integrate(0.0, p), 1.0/p, 1e-15)
        self.assertRaises(errors.DomainError, m.upperIntegral, 0.0, 1.0)


class TestOperations(TestCase):
    def test_rescale(self):
        f = expProfile()
        g = pr.rescale(f, 2.0)
        self.assertClose(g(0.3), 2.0*np.exp(-0.6), 1e-12)
        self.assertClose(g.tail_rate, 2.0, 1e-9)
        self.assertIs(pr.rescale(f, 1.0), f)
        self.assertRaises(errors.DomainError, pr.rescale, f, 0.0)

    def test_normalize_decay(self):
        f = expProfile(rate=2.0, amplitude=3.0)
        g, a = pr.normalize_decay(f)
        self.assertClose(a, 0.5, 1e-6)
        self.assertClose(g.decay_rate, 1.0, 1e-3)
        self.assertClose(g(1.0), 1.5*np.exp(-1.0), 1e-6)

    def test_views(self):
        f = expProfile()
        mu = pr.mu_view(f)
        self.assertClose(mu.values, 1.0, 1e-12)
        self.assertClose(mu.tail_rate, 0.0, atol=1e-9)
        back = pr.f_view(mu)
        self.assertIsInstance(back, pr.Profile)
        self.assertClose(back.values, f.values, 1e-12)

    def test_csv(self):
        f = expProfile()
        fh = io.StringIO()
        pr.write_csv(f, fh)
        text = fh.getvalue()
        lines = text.splitlines()
        self.assertEqual(lines[0], "x,f,mu")
        self.assertEqual(len(lines), f.grid.n + 1)
        g = pr.read_csv(io.StringIO(text))
        self.assertEqual(g.grid.n, f.grid.n)
        self.assertTrue(np.array_equal(g.values, f.values))

    def test_csv_bad(self):
        self.assertRaises(
            errors.FitFailure, pr.read_csv, io.StringIO("a,b\n1,2\n"))
