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
An improved TestCase for selfsim, with a log handler and a few
standard profiles to test against.
"""

import re, logging

import numpy as np

from twisted.python.failure import Failure
from twisted.trial import unittest

from selfsim.profiles import Grid, Profile


VERBOSE = False


class MsgBase(object):
    """
    A mixin deciding whether test output should be verbose.
    """
    def isVerbose(self):
        if hasattr(self, 'verbose'):
            return self.verbose
        if 'VERBOSE' in globals():
            return VERBOSE
        return False


class TestHandler(MsgBase, logging.StreamHandler):
    def __init__(self, verbose=False):
        logging.StreamHandler.__init__(self)
        self.verbose = verbose
        self.records = []
        self.setFormatter(logging.Formatter(
            '%(levelname)s: %(message)s'))
        
    def emit(self, record):
        self.records.append(record)
        if self.verbose:
            return logging.StreamHandler.emit(self, record)

    def messages(self, level=None):
        return [r.getMessage() for r in self.records
                if level is None or r.levelno == level]


def smallGrid(n=200, x_min=1e-4, x_max=40.0):
    """
    A grid coarse enough for quick tests.
    """
    return Grid(x_min, x_max, n)

def expProfile(grid=None, rate=1.0, amplitude=1.0):
    """
    The profile M{A e^(-rate x)}, on a L{smallGrid} by default.
    """
    grid = grid or smallGrid()
    return Profile.sample(grid, lambda x: amplitude*np.exp(-rate*x))


class TestCase(MsgBase, unittest.TestCase):
    """
    Slightly improved TestCase
    """
    # Nothing should take longer than 10 seconds, and often problems
    # aren't apparent until the timeout stops the test. Solver tests
    # set their own.
    timeout = 10

    def setUp(self):
        self.handler = TestHandler(self.isVerbose())
        logger = logging.getLogger('selfsim')
        logger.addHandler(self.handler)
        self.addCleanup(logger.removeHandler, self.handler)

    def assertPattern(self, pattern, text):
        proto = "Pattern '{}' not in '{}'"
        if '\n' not in pattern:
            text = re.sub(r'\s*\n\s*', '', text)
        self.assertTrue(
            bool(re.search(pattern, text)),
            proto.format(pattern, text))

    def assertClose(self, a, b, rtol=1e-7, atol=0.0, msg=""):
        """
        Asserts that scalars or arrays I{a} and I{b} agree within
        M{atol + rtol*|b|} everywhere.
        """
        a, b = np.broadcast_arrays(
            np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        error = np.abs(a - b)
        bound = atol + rtol*np.abs(b)
        if not np.all(error <= bound):
            k = np.argmax(error - bound)
            self.fail("{}Expected {} within rtol={}, atol={}, got {}".format(
                msg + ": " if msg else "",
                b.ravel()[k], rtol, atol, a.ravel()[k]))

    def assertIsFailure(self, x):
        self.assertIsInstance(x, Failure)
