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
Asynchronous results-store transactions via C{SQLAlchemy} and
C{Twisted}. Runs and their evidence records go into a L{ResultsStore},
a subclass of L{AccessBroker}.
"""

import json, logging, functools
from datetime import datetime, timezone

from twisted.internet import defer, reactor
from twisted.python.failure import Failure

import sqlalchemy as SA

import asynqueue

from selfsim import errors, queue

log = logging.getLogger(__name__)


def transaction(self, func, *t_args, **t_kw):
    """
    Runs C{func} inside one begin/commit block on the broker's
    connection. This is what actually runs in the queue thread; an
    exception rolls the block back and comes out as a
    L{errors.TransactionError} describing the call.
    """
    trans = self.connection.begin()
    if not hasattr(func, '__self__'):
        t_args = (self,) + t_args
    self._inTransaction = True
    try:
        result = func(*t_args, **t_kw)
    except Exception as e:
        trans.rollback()
        text = asynqueue.Info().setCall(
            func, t_args, t_kw).aboutException(exception=e)
        raise errors.TransactionError(text)
    else:
        trans.commit()
        return result
    finally:
        self._inTransaction = False


def transact(f):
    """
    Decorates a method I{f} of an L{AccessBroker} so that calling it
    queues C{f(self, *args, **kw)} as a transaction of its own in the
    broker's thread queue.

    The call returns a C{Deferred} right away, firing with whatever
    I{f} returned or failing with its L{errors.TransactionError}.
    Rows must be fetched inside I{f}, since nothing lazy may leave the
    thread. Called from inside another transaction, I{f} just runs as
    part of that one.
    """
    @functools.wraps(f)
    def substituteFunction(self, *args, **kw):
        def oops(failureObj):
            # Keep the failure out of the errback chain until the lock
            # is released
            return [failureObj]

        @defer.inlineCallbacks
        def doTransaction():
            if self.singleton or not self.running:
                yield self.lock.acquire()
                if not self.singleton:
                    self.lock.release()
            result = yield self.q.call(
                transaction, self, f, *args, **kw).addErrback(oops)
            if self.singleton:
                self.lock.release()
            if isinstance(result, list):
                if len(result) == 1 and isinstance(result[0], Failure):
                    result[0].raiseException()
            return result

        if getattr(self, '_inTransaction', False):
            return f(self, *args, **kw)
        return doTransaction()

    return substituteFunction


def wait(f):
    """
    Decorates a broker method whose C{Deferred} result
    L{AccessBroker.shutdown} must see fire before it closes anything.
    """
    @functools.wraps(f)
    def substituteFunction(self, *args, **kw):
        result = f(self, *args, **kw)
        if isinstance(result, defer.Deferred):
            self.dt.put(result)
        return result

    return substituteFunction


class AccessBroker(object):
    """
    I own one database connection and run every transaction on it,
    one at a time, in a thread queue of my own.

    Construct me with an RFC-1738 url. Keywords go to
    C{SA.create_engine}, except for I{verbose} and I{spew}, which go to
    the queue. Nothing runs until my L{startup} has defined the tables.

    @ivar q: The C{asynqueue.ThreadQueue} with my engine attached.

    @ivar connection: The SQLAlchemy connection I run transactions
      on, made in the queue's thread.
    """
    # A single class-wide queue factory
    qFactory = queue.Factory()

    def __init__(self, url, **kw):
        @defer.inlineCallbacks
        def startup(null):
            self.q = yield self.qFactory(url, **kw)
            self.connection = yield self.q.call(self.q.engine.connect)
            yield defer.maybeDeferred(self.startup)
            log.debug("Results store at {} is running".format(url))
            self.running = True
            self.lock.release()
            reactor.addSystemEventTrigger(
                'before', 'shutdown', self.shutdown)

        self.running = False
        self.lock = asynqueue.DeferredLock()
        self.lock.acquire().addCallback(startup)
        self.dt = asynqueue.DeferredTracker()

    @property
    def singleton(self):
        if not hasattr(self, '_singleton'):
            engine = getattr(getattr(self, 'q', None), 'engine', None)
            self._singleton = getattr(engine, 'name', 'sqlite') == 'sqlite'
        return self._singleton

    @defer.inlineCallbacks
    def waitUntilRunning(self):
        """
        Returns a C{Deferred} that fires when the broker is running and
        ready for transactions.
        """
        if not self.running:
            yield self.lock.acquire()
            self.lock.release()

    @defer.inlineCallbacks
    def table(self, name, *cols, **kw):
        """
        Defines the table I{name} with columns I{cols}, creating it in
        the database unless it is already there.

        Keywords named C{index_<suffix>} or C{unique_<suffix>} each
        define an index on the sequence of column names given as their
        value. Other keywords go to C{SA.Table}, except for
        I{attribute}, naming my attribute that gets the table object
        (I{name} by default).
        """
        def makeTable():
            if not hasattr(self, '_meta'):
                self._meta = SA.MetaData()
            indexes = {}
            for key in list(kw.keys()):
                if key.startswith('index_'):
                    unique = False
                elif key.startswith('unique_'):
                    unique = True
                else:
                    continue
                indexes[key] = kw.pop(key), unique
            kw.setdefault('extend_existing', True)
            table = SA.Table(name, self._meta, *cols, **kw)
            table.create(self.q.engine, checkfirst=True)
            for key, (names, unique) in indexes.items():
                index = SA.Index(
                    key, *[table.c[x] for x in names], unique=unique)
                index.create(self.q.engine, checkfirst=True)
            setattr(self, attribute, table)
            return table

        attribute = kw.pop('attribute', name)
        if not hasattr(self, attribute):
            yield self.q.call(makeTable)

    def startup(self):
        """
        Defines my tables, before any transaction runs and after my
        queue and connection exist. B{Override it}.
        """
        return defer.succeed(None)

    @defer.inlineCallbacks
    def shutdown(self, *null):
        """
        Shuts down my database transaction functionality and threaded
        task queue, returning a C{Deferred} that fires when all queued
        tasks are done and the shutdown is complete.

        Repeated calls after I've already shut down are rewarded with a
        C{Deferred} that fires immediately.
        """
        def closeConnection():
            conn = getattr(self, 'connection', None)
            if conn is not None:
                conn.close()

        yield self.dt.deferToAll()
        if self.running:
            self._haveShutdown = True
            self.running = False
            yield self.q.call(closeConnection)
            if self.q.isRunning():
                with self.lock.context() as d:
                    yield d
            yield self.qFactory.kill(self.q)
        elif not getattr(self, '_haveShutdown', False):
            yield self.waitUntilRunning()
            yield self.shutdown()

    @wait
    def deferToQueue(self, func, *args, **kw):
        """
        Dispatches I{func(*args, **kw)} as a task via my queue once I'm
        running, returning a C{Deferred} to its eventual result. There
        will be no shutdown of my queue until that result is obtained.
        """
        return self.waitUntilRunning().addCallback(
            lambda _: self.q.call(func, *args, **kw))


class ResultsStore(AccessBroker):
    """
    I keep a record of solver runs and of the evidence records of the
    verification suites, one row per record, linked to the run that
    produced them.

    Construct me with a database url, e.g., C{sqlite:///results.db}.
    """
    RUN_FIELDS = (
        'converged', 'iterations', 'residual', 'kappa', 'wall_time_s')

    @defer.inlineCallbacks
    def startup(self):
        yield self.table(
            'runs',
            SA.Column('id', SA.Integer, primary_key=True),
            SA.Column('command', SA.String(32), nullable=False),
            SA.Column('created', SA.DateTime, nullable=False),
            SA.Column('config_json', SA.Text),
            SA.Column('converged', SA.Boolean),
            SA.Column('iterations', SA.Integer),
            SA.Column('residual', SA.Float),
            SA.Column('kappa', SA.Float),
            SA.Column('wall_time_s', SA.Float),
            attribute='runsTable',
        )
        yield self.table(
            'checks',
            SA.Column('id', SA.Integer, primary_key=True),
            SA.Column('run_id', SA.ForeignKey('runs.id'), nullable=False),
            SA.Column('name', SA.String(64), nullable=False),
            SA.Column('anchor', SA.String(64)),
            SA.Column('status', SA.String(8), nullable=False),
            SA.Column('measured', SA.Float),
            SA.Column('threshold', SA.Float),
            index_run=['run_id'],
            attribute='checksTable',
        )

    @staticmethod
    def _finite(value):
        if value is None:
            return None
        value = float(value)
        return value if value == value and abs(value) != float('inf') else None

    @transact
    def addRun(self, command, config, report=None):
        """
        Inserts a run of I{command} with its I{config} dict and the
        summary fields of its optional solver I{report}, returning the
        new run ID.
        """
        row = {
            'command': command,
            'created': datetime.now(timezone.utc).replace(tzinfo=None),
            'config_json': json.dumps(config, sort_keys=True, default=str),
        }
        if report is not None:
            info = report.asDict()
            row['converged'] = bool(info.get('converged'))
            row['iterations'] = info.get('iterations')
            for name in ('residual', 'kappa', 'wall_time_s'):
                row[name] = self._finite(info.get(name))
        rp = self.connection.execute(SA.insert(self.runsTable).values(**row))
        return rp.inserted_primary_key[0]

    @transact
    def addChecks(self, runID, records):
        """
        Inserts the evidence I{records} (C{CheckRecord} objects) of run
        I{runID}, returning how many went in.
        """
        rows = [{
            'run_id': runID,
            'name': r.name,
            'anchor': r.anchor,
            'status': r.status,
            'measured': self._finite(r.measured),
            'threshold': self._finite(r.threshold),
        } for r in records]
        if rows:
            self.connection.execute(SA.insert(self.checksTable), rows)
        return len(rows)

    @wait
    @defer.inlineCallbacks
    def record(self, command, config, report=None, records=()):
        """
        Adds a run and its evidence records, returning a C{Deferred}
        that fires with the new run ID.
        """
        runID = yield self.addRun(command, config, report)
        N = yield self.addChecks(runID, records)
        log.info("Stored run {:d} ({}) with {:d} checks".format(
            runID, command, N))
        return runID

    def _rows(self, selectObj):
        return [dict(row._mapping) for row in
                self.connection.execute(selectObj)]

    @transact
    def runs(self):
        """
        Returns a list of dicts, one for each stored run in ID order.
        """
        t = self.runsTable
        return self._rows(SA.select(t).order_by(t.c.id))

    @transact
    def checks(self, runID):
        """
        Returns a list of dicts for the evidence records of run I{runID}.
        """
        c = self.checksTable.c
        return self._rows(
            SA.select(self.checksTable).where(c.run_id == runID).order_by(c.id))

    @transact
    def failures(self, runID):
        """
        Returns the names of the records of run I{runID} that failed.
        """
        c = self.checksTable.c
        rp = self.connection.execute(
            SA.select(c.name).where(
                SA.and_(c.run_id == runID, c.status == 'fail')).order_by(c.id))
        return [row[0] for row in rp]


__all__ = ['transact', 'wait', 'AccessBroker', 'ResultsStore']
