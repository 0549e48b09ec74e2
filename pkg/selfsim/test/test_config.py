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
Unit tests for selfsim.config
"""

from selfsim import errors
from selfsim.config import RunConfig, KEYS
from selfsim.kernels import BROWNIAN_ALPHA
from selfsim.test.testbase import TestCase


CONFIG_TEXT = """
# A power-kernel run
kernel.family = power
kernel.alpha = 0.25   # exponent
kernel.epsilon = 0.1

grid.n = 300
solver.tol = 1e-8
run.seed = 7
"""


class TestRunConfig(TestCase):
    def test_defaults(self):
        config = RunConfig().validate()
        self.assertEqual(config.kernel.family, 'constant')
        self.assertEqual(config.grid.n, 600)
        self.assertEqual(config.solver.max_iter, 500)
        self.assertEqual(config.resolvedTheta, 0.25)
        self.assertIsNone(config.db)

    def test_fromText(self):
        config = RunConfig.fromText(CONFIG_TEXT).validate()
        self.assertEqual(config.kernel.family, 'power')
        self.assertEqual(config.kernel.alpha, 0.25)
        self.assertEqual(config.grid.n, 300)
        self.assertEqual(config.solver.tol, 1e-8)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.resolvedTheta, 0.375)

    def test_fromTextLayered(self):
        base = RunConfig.fromText(CONFIG_TEXT)
        config = RunConfig.fromText("grid.n = 100", base)
        self.assertEqual(config.grid.n, 100)
        self.assertEqual(config.kernel.epsilon, 0.1)
        self.assertEqual(base.grid.n, 300)

    def test_fromTextBadLine(self):
        e = self.assertRaises(
            errors.ConfigError, RunConfig.fromText, "grid.n = 100\nfoo\n")
        self.assertEqual(e.key, "line 2")

    def test_fromFile(self):
        path = self.mktemp()
        with open(path, 'w') as fh:
            fh.write(CONFIG_TEXT)
        self.assertEqual(RunConfig.fromFile(path).kernel.epsilon, 0.1)
        e = self.assertRaises(
            errors.ConfigError, RunConfig.fromFile, path + ".missing")
        self.assertEqual(e.key, 'config')

    def test_set(self):
        config = RunConfig()
        config.set('run.output', 'out')
        config.set('solver.damping', '0.25')
        config.set('grid.n', 50)
        config.set('kernel.alpha', None)
        self.assertEqual(config.output_dir, 'out')
        self.assertEqual(config.solver.damping, 0.25)
        self.assertEqual(config.grid.n, 50)
        self.assertEqual(config.kernel.alpha, 0.0)
        for key in KEYS:
            config.set(key, None)

    def test_setErrors(self):
        config = RunConfig()
        e = self.assertRaises(errors.ConfigError, config.set, 'grid.m', '1')
        self.assertEqual(e.key, 'grid.m')
        e = self.assertRaises(
            errors.ConfigError, config.set, 'grid.n', 'many')
        self.assertEqual(e.key, 'grid.n')

    def test_validate(self):
        bad = (
            ('kernel.family', 'custom'),
            ('kernel.alpha', '0.6'),
            ('kernel.epsilon', '-1'),
            ('grid.x_min', '2'),
            ('grid.x_max', '0.5'),
            ('grid.n', '8'),
            ('solver.tol', '0'),
            ('solver.max_iter', '0'),
            ('solver.damping', '1.5'),
            ('solver.normalization', 'peak'),
            ('run.theta', '0.1'),
        )
        for key, value in bad:
            config = RunConfig.fromText(CONFIG_TEXT)
            config.set(key, value)
            e = self.assertRaises(errors.ConfigError, config.validate)
            self.assertEqual(e.key, key)

    def test_brownian(self):
        config = RunConfig()
        config.set('kernel.family', 'brownian')
        config.set('kernel.epsilon', '0.05')
        config.validate()
        self.assertEqual(config.alpha, BROWNIAN_ALPHA)
        spec = config.kernelSpec()
        self.assertEqual(spec.family, 'brownian')
        self.assertEqual(spec.alpha, BROWNIAN_ALPHA)
        self.assertEqual(config.asDict()['kernel']['alpha'], BROWNIAN_ALPHA)

    def test_objects(self):
        config = RunConfig.fromText(CONFIG_TEXT + "run.theta = 0.3\n")
        config.validate()
        self.assertEqual(config.gridObject().n, 300)
        opts = config.solverOptions()
        self.assertEqual(opts.tol, 1e-8)
        self.assertEqual(opts.theta, 0.3)
        info = config.asDict()
        self.assertEqual(info['theta'], 0.3)
        self.assertEqual(info['solver']['tol'], 1e-8)
        self.assertEqual(info['seed'], 7)

    def test_copy(self):
        config = RunConfig.fromText(CONFIG_TEXT)
        other = config.copy()
        other.set('grid.n', '50')
        other.set('kernel.epsilon', '0')
        self.assertEqual(config.grid.n, 300)
        self.assertEqual(config.kernel.epsilon, 0.1)
