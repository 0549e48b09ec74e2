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
Unit tests for selfsim.kernels
"""

import numpy as np
from scipy import integrate, special

from selfsim import errors
from selfsim import kernels as k
from selfsim.test.testbase import TestCase


class TestKernelSpec(TestCase):
    def test_constant(self):
        spec = k.KernelSpec()
        self.assertEqual(k.eval_K(spec, 1.0, 1.0), 2.0)
        self.assertEqual(k.eval_K(spec, 1e-3, 50.0), 2.0)
        self.assertFalse(spec.hasW)
        self.assertEqual(spec.separable(), ((2.0, 0.0, 0.0),))

    def test_power(self):
        spec = k.KernelSpec(epsilon=0.1, alpha=0.25, family='power')
        self.assertClose(k.eval_K(spec, 1.0, 1.0), 2.2, 1e-15)
        spec = spec.withEpsilon(0.125)
        self.assertClose(k.eval_K(spec, 1.0, 1.0), 2.25, 1e-15)
        self.assertClose(k.eval_W(spec, 16.0, 1.0), 2.5, 1e-15)
        terms = spec.separable()
        self.assertEqual(len(terms), 3)
        self.assertEqual(terms[1], (0.125, 0.25, -0.25))

    def test_vectorized(self):
        spec = k.KernelSpec(epsilon=0.1, alpha=0.25, family='power')
        x = np.array([1.0, 2.0, 3.0])
        K = k.eval_K(spec, x, x)
        self.assertEqual(K.shape, (3,))
        self.assertClose(K, 2.2, 1e-15)

    def test_symmetric(self):
        spec = k.KernelSpec(epsilon=0.3, alpha=0.4, family='power')
        self.assertClose(
            k.eval_K(spec, 0.3, 7.0), k.eval_K(spec, 7.0, 0.3), 1e-15)

    def test_brownian(self):
        spec = k.KernelSpec(epsilon=0.1, alpha=0.2, family='brownian')
        self.assertClose(spec.alpha, 1.0/3, 1e-15)
        self.assertClose(k.eval_W(spec, 8.0, 1.0), 2.5, 1e-14)

    def test_custom(self):
        spec = k.KernelSpec(
            epsilon=0.1, alpha=0.25, family='custom',
            w1=lambda s: 2.0 + 0.0*s)
        self.assertClose(k.eval_K(spec, 2.0, 5.0), 2.2, 1e-15)
        self.assertIsNone(spec.separable())

    def test_errors(self):
        self.assertRaises(errors.DomainError, k.KernelSpec, alpha=0.6)
        self.assertRaises(errors.DomainError, k.KernelSpec, epsilon=-0.1)
        self.assertRaises(errors.DomainError, k.KernelSpec, family='foo')
        self.assertRaises(errors.DomainError, k.KernelSpec, family='custom')
        spec = k.KernelSpec()
        self.assertRaises(errors.UnsupportedOperation, k.eval_W, spec, 1, 1)
        spec = k.KernelSpec(epsilon=0.1, alpha=0.25, family='power')
        self.assertRaises(errors.DomainError, k.eval_K, spec, 0.0, 1.0)
        self.assertRaises(errors.DomainError, k.eval_K, spec, 1.0, -2.0)


class TestGamma(TestCase):
    def test_closedForm(self):
        repr = k.gamma_closed_form(0.25)
        self.assertClose(repr.diag_coeff, np.sqrt(2.0), 1e-15)
        self.assertClose(repr.regular(1.0, 1.0), 0.11254, 1e-4)
        self.assertClose(repr.phi(4.0), 0.05305, 1e-4)
        self.assertClose(repr.regular(2.0, 3.0), repr.phi(2.0/3)/3.0, 1e-14)
        self.assertRaises(errors.DomainError, k.gamma_closed_form, 0.0)
        self.assertRaises(errors.DomainError, k.gamma_closed_form, 0.5)

    def test_regularPositive(self):
        repr = k.gamma_closed_form(0.4)
        xi = np.geomspace(1e-3, 1e3, 13)
        values = repr.regular(xi[:, None], xi[None, :])
        self.assertTrue(np.all(values > 0))
        self.assertTrue(np.all(np.isfinite(values)))

    def test_jumpAgrees(self):
        for alpha in (0.1, 0.25, 0.4):
            spec = k.KernelSpec(epsilon=0.1, alpha=alpha, family='power')
            repr = k.gamma_closed_form(alpha)
            s = np.array([0.01, 0.3, 0.999, 1.0, 1.5, 4.0, 250.0])
            self.assertClose(
                k.gamma_jump(spec, s), repr.phi(s), atol=1e-12)

    def test_jumpUnsupported(self):
        self.assertRaises(
            errors.UnsupportedOperation,
            k.gamma_jump, k.KernelSpec(), 2.0)

    def test_customJump(self):
        a = 0.3
        e = np.exp(1j*np.pi*a)
        spec = k.KernelSpec(
            epsilon=0.1, alpha=a, family='custom',
            w1=lambda s: s**a + s**-a,
            boundary=(lambda s: s**a*e + s**-a/e,
                      lambda s: s**a/e + s**-a*e))
        repr = k.gamma_closed_form(a)
        self.assertClose(k.gamma_jump(spec, 2.0), repr.phi(2.0), 1e-12)
        self.assertClose(k.gamma_jump(spec, 1.0), repr.phi(1.0), 1e-6)

    def test_verifyRepr(self):
        for alpha in (0.1, 0.25, 0.4):
            spec = k.KernelSpec(epsilon=0.1, alpha=alpha, family='power')
            repr = k.gamma_closed_form(alpha)
            for y, z in ((1.0, 1.0), (1.0, 4.0), (3.0, 0.5)):
                self.assertLess(k.verify_repr(repr, spec, y, z), 1e-4)

    def test_target(self):
        spec = k.KernelSpec(epsilon=0.1, alpha=0.4, family='power')
        self.assertClose(spec.W(1.0, 4.0)/5.0, 0.46309, 1e-4)

    def test_weightedIntegral(self):
        repr = k.gamma_closed_form(0.25)
        theta = 0.375
        I10 = k.gamma_weighted_integral(repr, 1, 0, theta)
        I11 = k.gamma_weighted_integral(repr, 1, 1, theta)
        I21 = k.gamma_weighted_integral(repr, 2, 1, theta)
        for value in (I10, I11, I21):
            self.assertTrue(np.isfinite(value))
            self.assertGreater(value, 0)
        self.assertGreater(I10, I11)
        self.assertGreater(I11, I21)
        self.assertTrue(np.isfinite(
            k.gamma_weighted_integral(repr, 1, 0, theta, pureEta=True)))

    def test_weightedIntegralPureEta(self):
        # Integrating out eta at fixed s = xi/eta leaves a beta function
        # times int phi(s) s^(theta-1) ds
        alpha, theta = 0.25, 0.375
        repr = k.gamma_closed_form(alpha)
        f = lambda t: repr.phi(np.exp(t))*np.exp(theta*t)
        moment = integrate.quad(f, -200.0, 200.0, limit=400)[0]
        B = special.beta(1.0 - theta, 2*theta)
        expected = B*(moment + repr.diag_coeff)
        value = k.gamma_weighted_integral(repr, 1, 0, theta, pureEta=True)
        self.assertTrue(np.isfinite(value))
        self.assertClose(value, expected, 1e-6)
        self.assertRaises(
            errors.DomainError, k.gamma_weighted_integral,
            repr, 1, 0, 0.2, pureEta=True)

    def test_etaIntegral(self):
        alpha, theta, xi = 0.25, 0.375, 1.0
        repr = k.gamma_closed_form(alpha)
        f = lambda eta: repr.phi(xi/eta)/eta*(1.0 + eta)**-(1.0 + theta)
        lower = integrate.quad(f, 0.0, 1.0, limit=200)[0]
        upper = integrate.quad(f, 1.0, np.inf, limit=200)[0]
        expected = lower + upper + repr.diag_coeff*2.0**-(1.0 + theta)
        self.assertClose(
            k.gamma_eta_integral(repr, xi, theta, 1), expected, 1e-5)
