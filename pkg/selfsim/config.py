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
Run configuration: a L{RunConfig} built from defaults, then a config
file of flat C{section.key = value} lines, then command-line flags.
"""

import logging
from dataclasses import dataclass, field, asdict, replace
from typing import Optional

from selfsim import errors
from selfsim.kernels import BROWNIAN_ALPHA, KernelSpec
from selfsim.laplace import default_theta
from selfsim.profiles import Grid
from selfsim.solver import NORMALIZATIONS, SolverOptions

log = logging.getLogger(__name__)

# Families a config file can name; custom kernels need code
CONFIG_FAMILIES = ('constant', 'power', 'brownian')


@dataclass
class KernelConfig(object):
    family: str = 'constant'
    alpha: float = 0.0
    epsilon: float = 0.0


@dataclass
class GridConfig(object):
    x_min: float = 1e-4
    x_max: float = 40.0
    n: int = 600


@dataclass
class SolverConfig(object):
    """
    The fields of L{SolverOptions}, left unchecked until
    L{RunConfig.validate} so that a bad value can be named by its key.
    """
    tol: float = 1e-9
    max_iter: int = 500
    damping: float = 0.5
    normalization: str = 'decay_rate'


# key -> (section attribute, field, converter)
KEYS = {
    'kernel.family':        ('kernel', 'family', str),
    'kernel.alpha':         ('kernel', 'alpha', float),
    'kernel.epsilon':       ('kernel', 'epsilon', float),
    'grid.x_min':           ('grid', 'x_min', float),
    'grid.x_max':           ('grid', 'x_max', float),
    'grid.n':               ('grid', 'n', int),
    'solver.tol':           ('solver', 'tol', float),
    'solver.max_iter':      ('solver', 'max_iter', int),
    'solver.damping':       ('solver', 'damping', float),
    'solver.normalization': ('solver', 'normalization', str),
    'run.theta':            (None, 'theta', float),
    'run.seed':             (None, 'seed', int),
    'run.output':           (None, 'output_dir', str),
    'run.db':               (None, 'db', str),
}


@dataclass
class RunConfig(object):
    """
    I hold everything a command needs to know about a run.

    Set values by dotted key with L{set}, or load a whole file of
    them with L{fromText} or L{fromFile}. Nothing is checked until you
    call L{validate}, which raises L{errors.ConfigError} naming the
    first bad key it finds.

    @ivar theta: The norm parameter, or C{None} for the default
      M{(alpha + 1/2)/2}.
    @ivar db: Optional SQLAlchemy url of a results store.
    """
    kernel: KernelConfig = field(default_factory=KernelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    theta: Optional[float] = None
    output_dir: str = '.'
    seed: int = 0
    db: Optional[str] = None

    @classmethod
    def fromText(cls, text, config=None):
        """
        Returns a config (a copy of I{config} if supplied, otherwise the
        defaults) updated with the C{section.key = value} lines of
        I{text}. Blank lines and C{#} comments are ignored.
        """
        config = cls() if config is None else config.copy()
        for k, line in enumerate(text.splitlines()):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise errors.ConfigError(
                    "line {:d}".format(k+1),
                    "expected 'section.key = value', got '{}'".format(line))
            key, value = [x.strip() for x in line.split('=', 1)]
            config.set(key, value)
        return config

    @classmethod
    def fromFile(cls, path, config=None):
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise errors.ConfigError('config', str(e))
        log.debug("Read config file {}".format(path))
        return cls.fromText(text, config)

    def copy(self):
        return replace(
            self, kernel=replace(self.kernel),
            grid=replace(self.grid), solver=replace(self.solver))

    def set(self, key, value):
        """
        Sets the value of dotted I{key}, converting a string I{value} to
        the key's type. A value of C{None} leaves the current setting
        alone.
        """
        if key not in KEYS:
            raise errors.ConfigError(key, "unknown key")
        if value is None:
            return
        section, name, converter = KEYS[key]
        if isinstance(value, str) and converter is not str:
            try:
                value = converter(value)
            except ValueError:
                raise errors.ConfigError(
                    key, "can't read '{}' as {}".format(
                        value, converter.__name__))
        target = self if section is None else getattr(self, section)
        setattr(target, name, value)

    @property
    def alpha(self):
        if self.kernel.family == 'brownian':
            return BROWNIAN_ALPHA
        return self.kernel.alpha

    @property
    def resolvedTheta(self):
        if self.theta is None:
            return default_theta(self.alpha)
        return self.theta

    def validate(self):
        """
        Checks every setting, raising L{errors.ConfigError} naming the
        first offending key. Returns me if all is well.
        """
        def check(ok, key, msg):
            if not ok:
                raise errors.ConfigError(key, msg)

        k, g, s = self.kernel, self.grid, self.solver
        check(k.family in CONFIG_FAMILIES, 'kernel.family',
              "must be one of {}".format(", ".join(CONFIG_FAMILIES)))
        check(0 <= k.alpha < 0.5, 'kernel.alpha',
              "alpha={} lies outside [0, 1/2)".format(k.alpha))
        check(k.epsilon >= 0, 'kernel.epsilon',
              "epsilon={} is negative".format(k.epsilon))
        if self.theta is not None:
            check(self.alpha < self.theta < 0.5, 'run.theta',
                  "theta={} lies outside (alpha, 1/2)".format(self.theta))
        check(0 < g.x_min < 1, 'grid.x_min',
              "x_min={} must lie in (0, 1)".format(g.x_min))
        check(g.x_max > 1, 'grid.x_max',
              "x_max={} must exceed 1".format(g.x_max))
        check(g.n >= 16, 'grid.n', "n={} is less than 16".format(g.n))
        check(s.tol > 0, 'solver.tol', "tol must be positive")
        check(s.max_iter >= 1, 'solver.max_iter', "max_iter must be positive")
        check(0 < s.damping <= 1, 'solver.damping',
              "damping={} lies outside (0, 1]".format(s.damping))
        check(s.normalization in NORMALIZATIONS, 'solver.normalization',
              "must be one of {}".format(", ".join(NORMALIZATIONS)))
        return self

    def kernelSpec(self):
        return KernelSpec(
            epsilon=self.kernel.epsilon, alpha=self.alpha,
            family=self.kernel.family)

    def gridObject(self):
        return Grid(self.grid.x_min, self.grid.x_max, self.grid.n)

    def solverOptions(self):
        return SolverOptions(theta=self.theta, **asdict(self.solver))

    def asDict(self):
        """
        Returns the fully resolved config as a JSON-ready dict, with
        the effective I{alpha} and I{theta} filled in.
        """
        result = asdict(self)
        result['kernel']['alpha'] = self.alpha
        result['theta'] = self.resolvedTheta
        return result


__all__ = ['KernelConfig', 'GridConfig', 'SolverConfig', 'RunConfig', 'KEYS']
