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
Unit tests for selfsim.quadrature
"""

import numpy as np
from scipy import special

from selfsim import quadrature as q
from selfsim.test.testbase import TestCase


class TestRules(TestCase):
    def test_gaussLegendre(self):
        t, w = q.gaussLegendre(5)
        self.assertClose(w.sum(), 2.0, 1e-14)
        self.assertClose(np.dot(w, t**8), 2.0/9, 1e-13)

    def test_panelRule(self):
        x, w = q.panelRule([0.0, 1.0, 3.0], n=4)
        self.assertEqual(len(x), 8)
        self.assertClose(np.dot(w, x**3), 81.0/4, 1e-13)

    def test_gradedEdges(self):
        edges = q.gradedEdges(0.0, 1.0, 'a', ratio=0.5, levels=3)
        self.assertClose(edges, [0.0, 0.125, 0.25, 0.5, 1.0], 1e-15)
        edges = q.gradedEdges(0.0, 1.0, 'b', ratio=0.5, levels=3)
        self.assertClose(edges, [0.0, 0.5, 0.75, 0.875, 1.0], 1e-15)
        edges = q.gradedEdges(0.0, 2.0, 'both', ratio=0.5, levels=2)
        self.assertTrue(np.all(np.diff(edges) > 0))
        self.assertEqual(edges[0], 0.0)
        self.assertEqual(edges[-1], 2.0)

    def test_gradedRule_singular(self):
        x, w = q.gradedRule(0.0, 1.0, 'a', levels=20)
        self.assertClose(np.dot(w, x**-0.5), 2.0, 1e-6)

    def test_jacobiRule(self):
        x, w = q.jacobiRule(12, 0.0, -0.5, 0.0, 2.0)
        # int_0^2 x^-1/2 e^-x dx
        expected = special.gamma(0.5)*special.gammainc(0.5, 2.0)
        self.assertClose(np.dot(w, np.exp(-x)), expected, 1e-12)

    def test_logRule(self):
        x, w = q.logRule(1e-6, 1e3, width=0.5, n=8)
        self.assertClose(np.dot(w, np.exp(-x)), 1.0 - 1e-6, 1e-10)
