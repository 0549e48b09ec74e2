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
Thread queues for running long numerical calls and results-store
transactions off the reactor thread.
"""

import logging

from twisted.internet import defer

import sqlalchemy as SA

import asynqueue


class Factory(object):
    """
    I generate C{asynqueue.ThreadQueue} objects: a unique one for each
    call to me with a unique url-kw combination, each with an
    C{SQLAlchemy} engine attached, and one shared compute queue with
    no engine at all.
    """
    computeQueue = None

    def __init__(self):
        self.queues = {}

    @staticmethod
    def newQueue(url=None, **kw):
        """
        Returns a C{Deferred} that fires with a new
        C{asynqueue.ThreadQueue}. With a I{url}, the queue has a new
        engine for it attached as its I{engine} attribute, created in
        the queue's own thread.
        """
        def getEngine():
            # Quiet "No handlers could be found for logger
            # sqlalchemy.pool" messages
            logging.getLogger(
                "sqlalchemy.pool").addHandler(logging.NullHandler())
            return SA.create_engine(url, **kw)

        def gotEngine(engine):
            q.engine = engine
            return q

        q = asynqueue.ThreadQueue(
            raw=True,
            verbose=kw.pop('verbose', False),
            spew=kw.pop('spew', False),
            returnFailure=kw.pop('returnFailure', True))
        if url is None:
            q.engine = None
            return defer.succeed(q)
        return q.call(getEngine).addCallback(gotEngine)

    @classmethod
    def getCompute(cls):
        """
        Returns the shared compute queue, constructing it on first use.
        It has no engine, so this is immediate.
        """
        if cls.computeQueue is None:
            q = asynqueue.ThreadQueue(raw=True, returnFailure=True)
            q.engine = None
            cls.computeQueue = q
        return cls.computeQueue

    @classmethod
    def shutdownCompute(cls):
        """
        Shuts down the shared compute queue if there is one, returning a
        C{Deferred} that fires when its thread is done.
        """
        q, cls.computeQueue = cls.computeQueue, None
        if q is None:
            return defer.succeed(None)
        return q.shutdown()

    def kill(self, q):
        """
        Removes the supplied queue object from my cache and shuts it
        down, disposing of its engine. Returns a C{Deferred} that fires
        when the shutdown is done.

        Has no effect on the compute queue.
        """
        for key, value in list(self.queues.items()):
            if value is q:
                del self.queues[key]
                break
        if q is self.computeQueue:
            return defer.succeed(None)
        engine = getattr(q, 'engine', None)
        d = q.call(engine.dispose) if engine is not None else defer.succeed(None)
        return d.addCallback(lambda _: q.shutdown())

    def __call__(self, *url, **kw):
        """
        Returns a C{Deferred} that fires with an C{asynqueue.ThreadQueue}
        that has an C{SQLAlchemy} engine for the supplied url and
        keywords attached to it. A repeat call with the same url-kw
        parameters gets the same queue.

        With no I{url} argument, the shared compute queue is returned.
        """
        def gotQueue(q):
            self.queues[key] = q
            return q

        if not url:
            return defer.succeed(self.getCompute())
        url = url[0]
        key = hash((url, tuple(sorted(kw.items()))))
        if key in self.queues:
            return defer.succeed(self.queues[key])
        return self.newQueue(url, **kw).addCallback(gotQueue)


def runInThread(f, *args, **kw):
    """
    Runs C{f(*args, **kw)} on the shared compute queue, returning a
    C{Deferred} that fires with its result or errbacks with its
    exception.
    """
    return Factory.getCompute().call(f, *args, **kw)


__all__ = ['Factory', 'runInThread']
