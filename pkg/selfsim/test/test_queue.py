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
Unit tests for selfsim.queue
"""

from twisted.internet import defer

import sqlalchemy as SA

from selfsim.queue import Factory, runInThread
from selfsim.test.testbase import TestCase


class TestFactory(TestCase):
    def tearDown(self):
        return Factory.shutdownCompute()

    @defer.inlineCallbacks
    def test_sameQueue(self):
        url = "sqlite://"
        qf = Factory()
        q1 = yield qf(url)
        self.assertIsInstance(q1.engine, SA.engine.Engine)
        q2 = yield qf(url)
        self.assertEqual(q1, q2)
        q3 = yield qf(url, echo=False)
        self.assertNotEqual(q1, q3)
        yield qf.kill(q3)
        yield qf.kill(q1)
        self.assertEqual(qf.queues, {})

    @defer.inlineCallbacks
    def test_compute(self):
        qf = Factory()
        q = yield qf()
        self.assertIsNone(q.engine)
        self.assertIs(q, Factory.getCompute())
        # Killing through a factory leaves the shared queue running
        yield qf.kill(q)
        self.assertIs(Factory.getCompute(), q)
        yield Factory.shutdownCompute()
        self.assertIsNone(Factory.computeQueue)
        yield Factory.shutdownCompute()

    @defer.inlineCallbacks
    def test_runInThread(self):
        result = yield runInThread(lambda x, y=1: x + y, 2, y=3)
        self.assertEqual(result, 5)

    def test_runInThreadErrback(self):
        d = runInThread(lambda x: 1/x, 0)
        d.addCallbacks(
            lambda _: self.fail("Should have done the errback instead"),
            self.assertIsFailure)
        return d
