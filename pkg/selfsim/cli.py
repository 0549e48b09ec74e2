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
The C{selfsim} command: solve for self-similar profiles and their
prefactors, run the verification suites, tabulate the representation
measure, and take the weighted norms of a saved profile.

Every command writes its outputs atomically into the output
directory and exits with 0 on success, 1 on a usage or configuration
error, 2 when a solver does not converge, and 3 on a numeric failure
or a failed check.
"""

import io, sys, json, logging, argparse

import numpy as np

from twisted.internet import defer, task
from twisted.python.filepath import FilePath

from selfsim import errors
from selfsim.config import RunConfig
from selfsim.database import ResultsStore
from selfsim.diagnostics import (
    SUITES, hardFailures, recordsJSON, run_suites_async, write_records_csv)
from selfsim.kernels import KernelSpec, gamma_closed_form, gamma_jump
from selfsim.laplace import seminorm, transform
from selfsim.profiles import Profile, mass, mu_view, read_csv, write_csv
from selfsim.boundary import nearzero_fit
from selfsim.queue import Factory, runInThread
from selfsim.solver import solve_prefactor, solve_selfsim

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger(__name__)

# Flag destination -> config key
FLAGS = (
    ('kernel', 'kernel.family'),
    ('alpha', 'kernel.alpha'),
    ('epsilon', 'kernel.epsilon'),
    ('grid_min', 'grid.x_min'),
    ('grid_max', 'grid.x_max'),
    ('grid_n', 'grid.n'),
    ('tol', 'solver.tol'),
    ('max_iter', 'solver.max_iter'),
    ('damping', 'solver.damping'),
    ('normalization', 'solver.normalization'),
    ('theta', 'run.theta'),
    ('seed', 'run.seed'),
    ('output', 'run.output'),
    ('db', 'run.db'),
)


class ArgumentParser(argparse.ArgumentParser):
    """
    I raise L{errors.ConfigError} on a usage error instead of exiting.
    """
    def error(self, message):
        raise errors.ConfigError('usage', message)


def buildParser():
    common = ArgumentParser(add_help=False)
    arg = common.add_argument
    arg('--config', help="File of 'section.key = value' lines")
    arg('--kernel', help="Kernel family: constant, power or brownian")
    arg('--alpha', type=float, help="Singularity exponent, in [0, 1/2)")
    arg('--epsilon', type=float, help="Size of the W part of the kernel")
    arg('--grid-min', type=float, help="Smallest grid node")
    arg('--grid-max', type=float, help="Largest grid node")
    arg('--grid-n', type=int, help="Number of grid nodes")
    arg('--tol', type=float, help="Solver residual tolerance")
    arg('--max-iter', type=int, help="Solver iteration limit")
    arg('--damping', type=float, help="Solver damping, in (0, 1]")
    arg('--normalization', help="decay_rate or mass")
    arg('--theta', type=float, help="Norm parameter, in (alpha, 1/2)")
    arg('--seed', type=int, help="Seed of the random test families")
    arg('--output', help="Output directory")
    arg('--db', help="SQLAlchemy url of a results store to record runs in")
    arg('-v', '--verbose', action='store_true', help="Log at DEBUG level")
    parser = ArgumentParser(
        prog='selfsim',
        description="Self-similar coagulation profiles and their checks")
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True
    sub.add_parser(
        'solve-profile', parents=[common],
        help="Solve the self-similar profile equation")
    sub.add_parser(
        'solve-prefactor', parents=[common],
        help="Solve the prefactor equation for mu")
    p = sub.add_parser(
        'verify', parents=[common], help="Run verification suites")
    p.add_argument(
        '--suites', default='norms,operator',
        help="Comma-separated subset of {}".format(", ".join(SUITES)))
    p = sub.add_parser(
        'gamma', parents=[common],
        help="Tabulate the representation measure of W")
    p.add_argument(
        '--points', type=int, default=9,
        help="Points per axis, log-spaced over [0.1, 10]")
    p = sub.add_parser(
        'norms', parents=[common],
        help="Print the weighted seminorms of a profile CSV")
    p.add_argument('profile', help="CSV written by solve-profile")
    p.add_argument(
        '--view', choices=('mu', 'f'), default='mu',
        help="Take the norms of mu = f e^x (default) or of f")
    return parser


_handler = None

def setupLogging(verbose=False):
    """
    Has the C{selfsim} logger write to stderr, at DEBUG level if
    I{verbose}.
    """
    global _handler
    logger = logging.getLogger('selfsim')
    if _handler is None:
        _handler = logging.StreamHandler()
        _handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        logger.addHandler(_handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def resolveConfig(args):
    """
    Returns the validated L{RunConfig} from the config file named by
    the I{--config} flag, if any, overridden by the other flags.
    """
    config = RunConfig.fromFile(args.config) if args.config else RunConfig()
    for dest, key in FLAGS:
        config.set(key, getattr(args, dest))
    return config.validate()


def _jsonDefault(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError("Can't serialize {}".format(type(obj).__name__))

def dumpJSON(data):
    return json.dumps(data, indent=2, sort_keys=True, default=_jsonDefault)


def writeAtomic(config, name, writer):
    """
    Writes the file I{name} in the output directory by calling
    I{writer} with an open text file, replacing any existing file in
    one rename. Returns the path.
    """
    fh = io.StringIO(newline='')
    if isinstance(writer, str):
        fh.write(writer)
    else:
        writer(fh)
    fp = FilePath(config.output_dir)
    if not fp.isdir():
        fp.makedirs()
    fp = fp.child(name)
    fp.setContent(fh.getvalue().encode('utf-8'))
    log.info("Wrote {}".format(fp.path))
    return fp.path


@defer.inlineCallbacks
def recordRun(config, command, report=None, records=()):
    """
    Records the run in the results store at I{config.db}, if there is
    one.
    """
    if not config.db:
        return
    store = ResultsStore(config.db)
    try:
        yield store.waitUntilRunning()
        yield store.record(command, config.asDict(), report, records)
    finally:
        yield store.shutdown()


@defer.inlineCallbacks
def cmd_solve_profile(config, args=None):
    spec = config.kernelSpec()
    init = Profile.sample(config.gridObject(), lambda x: 2.0*np.exp(-2.0*x))
    f, report = yield runInThread(
        solve_selfsim, spec, init, config.solverOptions())
    info = {
        'config': config.asDict(),
        'report': report.asDict(),
        'decay_rate': f.decay_rate,
        'tail_amp': f.tail_amp,
        'mass': mass(f),
    }
    if spec.hasW and spec.epsilon > 0:
        try:
            beta, const, spread = nearzero_fit(spec, f)
        except errors.FitFailure as e:
            log.warning("No near-zero fit: {}".format(e))
        else:
            info['near_zero'] = {
                'beta': beta, 'constant': const, 'spread': spread}
    writeAtomic(config, 'profile.csv', lambda fh: write_csv(f, fh))
    writeAtomic(config, 'profile.json', dumpJSON(info))
    yield recordRun(config, 'solve-profile', report)
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def _writePrefactor(mu):
    def writer(fh):
        fh.write("x,mu\n")
        for row in zip(mu.grid.nodes, mu.values):
            fh.write("{:.17g},{:.17g}\n".format(*row))
    return writer

@defer.inlineCallbacks
def cmd_solve_prefactor(config, args=None):
    spec = config.kernelSpec()
    mu, report = yield runInThread(
        solve_prefactor, spec, 1.0, config.solverOptions(),
        config.gridObject())
    info = {
        'config': config.asDict(),
        'report': report.asDict(),
        'mu_min': float(mu.values.min()),
        'mu_max': float(mu.values.max()),
    }
    writeAtomic(config, 'prefactor.csv', _writePrefactor(mu))
    writeAtomic(config, 'prefactor.json', dumpJSON(info))
    yield recordRun(config, 'solve-prefactor', report)
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


@defer.inlineCallbacks
def cmd_verify(config, args):
    names = [x.strip() for x in args.suites.split(',') if x.strip()]
    if not names:
        raise errors.ConfigError('suites', "No suites named")
    for name in names:
        if name not in SUITES:
            raise errors.ConfigError(
                'suites', "Unknown suite '{}'".format(name))
    records = yield run_suites_async(
        names, alpha=config.alpha, theta=config.resolvedTheta,
        seed=config.seed, opts=config.solverOptions(),
        grid=config.gridObject())
    writeAtomic(
        config, 'evidence.json', recordsJSON(records, config.asDict()))
    writeAtomic(
        config, 'evidence.csv', lambda fh: write_records_csv(records, fh))
    yield recordRun(config, 'verify', records=records)
    failed = hardFailures(records)
    for r in failed:
        log.error("Check {} failed: {} vs {}".format(
            r.name, r.measured, r.threshold))
    return EXIT_NUMERIC if failed else EXIT_OK


def gammaTable(alpha, points):
    """
    Returns the CSV text tabulating the regular part of the
    representation measure for exponent I{alpha} over a log-spaced
    square of I{points} per axis, with the diagonal weight in a header
    comment and the difference from the jump-density route in the last
    column.
    """
    if points < 1:
        raise errors.ConfigError('points', "Need at least one point")
    repr = gamma_closed_form(alpha)
    spec = KernelSpec(alpha=alpha, family='power')
    fh = io.StringIO(newline='')
    fh.write("# alpha = {:.17g}\n".format(alpha))
    fh.write("# diag_coeff = {:.17g}\n".format(repr.diag_coeff))
    fh.write("xi,eta,gamma_regular,jump_difference\n")
    values = np.geomspace(0.1, 10.0, points)
    for xi in values:
        for eta in values:
            g = repr.regular(xi, eta)
            jump = gamma_jump(spec, xi/eta)/eta
            fh.write("{:.17g},{:.17g},{:.17g},{:.3e}\n".format(
                xi, eta, g, abs(g - jump)))
    return fh.getvalue()

def cmd_gamma(config, args):
    writeAtomic(config, 'gamma.csv', gammaTable(config.alpha, args.points))
    return defer.succeed(EXIT_OK)


def profileNorms(f, theta, view='mu'):
    """
    Returns a list of L{NormResult} dicts for M{k = 0, 1, 2} of the
    profile I{f}, or of its M{mu = f e^x} view.
    """
    L = transform(mu_view(f) if view == 'mu' else f)
    return [seminorm(L, k, theta).asDict() for k in (0, 1, 2)]

def cmd_norms(config, args):
    try:
        with open(args.profile) as fh:
            f = read_csv(fh)
    except OSError as e:
        raise errors.ConfigError('profile', str(e))
    results = profileNorms(f, config.resolvedTheta, args.view)
    sys.stdout.write(dumpJSON(results) + "\n")
    return defer.succeed(EXIT_OK)


COMMANDS = {
    'solve-profile': cmd_solve_profile,
    'solve-prefactor': cmd_solve_prefactor,
    'verify': cmd_verify,
    'gamma': cmd_gamma,
    'norms': cmd_norms,
}


@defer.inlineCallbacks
def run(argv=None):
    """
    Runs the command line I{argv}, returning a C{Deferred} that fires
    with the exit code.
    """
    try:
        args = buildParser().parse_args(argv)
        setupLogging(args.verbose)
        config = resolveConfig(args)
        code = yield COMMANDS[args.command](config, args)
    except (errors.ConfigError, errors.DomainError) as e:
        log.error(str(e))
        code = EXIT_CONFIG
    except errors.SelfsimError as e:
        log.error("{}: {}".format(e.__class__.__name__, e))
        code = EXIT_NUMERIC
    return code


def main(argv=None):
    """
    Console entry point.
    """
    @defer.inlineCallbacks
    def _main(reactor):
        try:
            code = yield run(argv)
        finally:
            yield Factory.shutdownCompute()
        if code:
            raise SystemExit(code)

    if argv is None:
        argv = sys.argv[1:]
    task.react(_main)


if __name__ == '__main__':
    main()


__all__ = ['run', 'main', 'buildParser', 'resolveConfig', 'gammaTable',
           'profileNorms']
