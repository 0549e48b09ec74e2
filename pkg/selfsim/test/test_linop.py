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
Unit tests for selfsim.linop
"""

import numpy as np

from selfsim import errors
from selfsim import linop as lo
from selfsim.kernels import KernelSpec
from selfsim.laplace import muBarTransform, transform
from selfsim.profiles import ExpMixture, muBar
from selfsim.test.testbase import TestCase


def minusMuBar():
    return -muBarTransform()

P_SAMPLES = np.array([0.01, 0.1, 0.7, 1.0, 3.0, 100.0])


class TestForward(TestCase):
    def test_muBar(self):
        L = muBarTransform()
        for p in (0.5, 1.0, 2.0, 30.0):
            self.assertClose(lo.apply_Lhat(L, p), -1.0/p, 1e-8)

    def test_vectorized(self):
        p = np.array([0.5, 2.0])
        self.assertClose(lo.apply_Lhat(muBarTransform(), p), -1.0/p, 1e-8)

    def test_lhatEval(self):
        G = transform(ExpMixture([(1.0, 1.0, 0)]))
        E = lo.lhatEval(G)
        p = np.array([0.3, 2.0])
        self.assertClose(E(p), lo.apply_Lhat(G, p), 1e-12)
        # The first derivative channel against a difference quotient
        h = 1e-4
        dq = (E(p + h) - E(p - h))/(2*h)
        self.assertClose(E.channel(1)(p), dq, 1e-6)

    def test_domain(self):
        self.assertRaises(
            errors.DomainError, lo.apply_Lhat, muBarTransform(), 0.0)


class TestInverse(TestCase):
    timeout = 60

    def test_minusMuBar(self):
        G = minusMuBar()
        for p in (0.5, 2.0, 30.0):
            self.assertClose(lo.invert_Lhat(G, p), 1.0/p, 1e-8)

    def test_atOne(self):
        G = transform(ExpMixture([(1.0, 1.0, 0), (2.0, 3.0, 1)]))
        self.assertEqual(lo.invert_Lhat(G, 1.0), -G(1.0))

    def test_roundTrips(self):
        for G in (
                muBarTransform(),
                transform(ExpMixture([(1.0, 1.0, 0)])),
                transform(ExpMixture([(1.0, 1.0, 1)]))):
            g = G(P_SAMPLES)
            back = lo.invert_Lhat(lo.lhatEval(G), P_SAMPLES)
            self.assertClose(back, g, 1e-5)
            forward = lo.apply_Lhat(lo.inverseEval(G), P_SAMPLES)
            self.assertClose(forward, g, 1e-5)

    def test_inverseEval(self):
        G = minusMuBar()
        E = lo.inverseEval(G)
        p = np.array([0.5, 2.0])
        self.assertClose(E(p), 1.0/p, 1e-8)
        self.assertClose(E.channel(1)(p), -1.0/p**2, 1e-8)
        self.assertClose(E.channel(2)(p), 2.0/p**3, 1e-8)

    def test_trace(self):
        G = transform(ExpMixture([(1.0, 1.0, 0)]))
        trace = lo.operator_trace(G, 'e^-x')
        self.assertEqual(trace.input_id, 'e^-x')
        self.assertEqual(len(trace.p_samples), 9)
        self.assertEqual(len(trace.forward_values), 9)
        self.assertLess(trace.inverse_roundtrip_error, 1e-5)
        self.assertIn('inverse_roundtrip_error', trace.asDict())


class TestPhysical(TestCase):
    timeout = 60

    def test_muBar(self):
        spec = KernelSpec()
        for x in (0.1, 2.0):
            self.assertClose(
                lo.apply_L_physical(spec, muBar(), x), -1.0, 1e-9)

    def test_notConstant(self):
        spec = KernelSpec(epsilon=0.1, alpha=0.25, family='power')
        self.assertRaises(
            errors.DomainError, lo.apply_L_physical, spec, muBar(), 1.0)

    def test_commutes(self):
        m = ExpMixture([(1.0, 1.0, 0)])
        p = 2.0
        self.assertClose(
            lo.transform_L_physical(KernelSpec(), m, p),
            lo.apply_Lhat(transform(m), p), 1e-5)
