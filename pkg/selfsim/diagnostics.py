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
Verification suites. Each suite instantiates a family of inequalities
or identities on test inputs and returns L{CheckRecord} objects, the
rows of the evidence table.

Where an inequality has an explicit constant the record passes or
fails on it; where the constant is unspecified the record reports the
largest ratio seen and passes if it is finite.
"""

import csv, json, logging
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from selfsim import errors
from selfsim.kernels import (
    KernelSpec, gamma_closed_form, verify_repr, gamma_weighted_integral,
    gamma_eta_integral)
from selfsim.laplace import (
    LaplaceEval, transform, muBarTransform, seminorm, fullnorm, pGrid,
    lambda_weight, default_theta)
from selfsim.linop import (
    apply_Lhat, inverseEval, operator_trace, lhatEval,
    transform_L_physical)
from selfsim.profiles import ExpMixture, Grid, Profile
from selfsim.solver import SolverOptions, contraction_probe


SUITES = ('norms', 'operator', 'kernel', 'uniqueness')
PASS, FAIL, INCONCLUSIVE = 'pass', 'fail', 'inconclusive'

# Reference labels of the properties the records check
NORM_EQUIVALENCE = 'Lemma norm:equ'
INTERPOLATION = 'Lemma interpolation'
CUTOFF = 'Lemma elem:est:norm'
POSITIVITY = 'Lemma norm:est:pos'
SPLIT = 'Lemma norm:est:split'
REGULARIZED = 'Lemma reg:weight'
NORM_ORDER = 'eq:norm:order'
LAMBDA = 'eq:Lambda'
INVERSION = 'eq:inverse:1'
LINEARIZATION = 'eq:lin:coag:lap'
REPRESENTATION = 'Prop. P.repkernels'
GAMMA_INTEGRAL = 'Lemma est:Gamma:int'
GAMMA_ETA = 'Lemma Gamma:eta:int'
SMALLNESS = 'eq:S2E1'
KNOWN_ANCHORS = frozenset([
    NORM_EQUIVALENCE, INTERPOLATION, CUTOFF, POSITIVITY, SPLIT,
    REGULARIZED, NORM_ORDER, LAMBDA, INVERSION, LINEARIZATION,
    REPRESENTATION, GAMMA_INTEGRAL, GAMMA_ETA, SMALLNESS])

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckRecord(object):
    """
    I am one row of the evidence table.

    @ivar anchor: The reference label of the property checked, one of
      L{KNOWN_ANCHORS}.
    @ivar threshold: The bound I{measured} is held to, or C{None} for an
      empirical constant.
    """
    name: str
    anchor: str
    status: str
    measured: Optional[float]
    threshold: Optional[float]

    def asDict(self):
        return asdict(self)


def _bounded(name, anchor, measured, threshold):
    """
    Returns a record passing when I{measured} is at most I{threshold}.
    """
    ok = measured is not None and np.isfinite(measured)
    status = PASS if ok and measured <= threshold else FAIL
    return CheckRecord(name, anchor, status, _float(measured), threshold)


def _empirical(name, anchor, measured):
    ok = measured is not None and np.isfinite(measured)
    return CheckRecord(
        name, anchor, PASS if ok else FAIL, _float(measured), None)


def _float(x):
    return None if x is None else float(x)


def _ratio(a, b):
    return None if b == 0 else a/b


def _maxOf(values):
    values = [v for v in values if v is not None]
    return max(values) if values else 0.0


def randomMixtures(seed, count=20):
    """
    Returns I{count} random nonnegative mixtures M{sum c_i e^(-a_i x)}
    with 3 to 6 terms, M{a_i} in M{[0.5, 3]} and M{c_i} in M{[0, 1]},
    followed by the signed differences of successive pairs.
    """
    rng = np.random.default_rng(seed)
    mixtures = []
    for k in range(count):
        m = rng.integers(3, 7)
        a = rng.uniform(0.5, 3.0, m)
        c = rng.uniform(0.0, 1.0, m)
        mixtures.append(ExpMixture(list(zip(c, a, [0]*m))))
    differences = [
        mixtures[k] - mixtures[k+1] for k in range(0, count - 1, 2)]
    return mixtures, differences


def shiftedEval(L, n):
    """
    Returns the transform of M{e^(-n x) w}, that is M{Omega(p + n)}.
    """
    def shifted(f):
        return None if f is None else (lambda p: f(np.asarray(p) + n))
    return LaplaceEval(
        shifted(L.omega0), shifted(L.omega1), shifted(L.omega2),
        L.domain_min, shifted(L.omega3))


#--- Norms --------------------------------------------------------------------

def _landau(L, theta):
    s0, s1, s2 = [seminorm(L, k, theta).value for k in range(3)]
    return _ratio(s1, 2.0*np.sqrt(s0*s2))


def _positivity(L):
    p = pGrid()
    left = np.abs(L.omega1(p))*p
    right = L.omega0(p/2)
    return float(np.max(left/right)) if np.all(right > 0) else None


def run_norm_suite(profiles, theta, signed=()):
    """
    Checks the weighted-norm inequalities on the nonnegative test inputs
    I{profiles} and, where positivity is not assumed, on the I{signed}
    ones too. Inputs need an C{integrate} method.
    """
    nonneg = [transform(w) for w in profiles]
    every = nonneg + [transform(w) for w in signed]
    records = []
    # Equivalence of full and top seminorm
    ratios = [_ratio(fullnorm(L, 2, theta), seminorm(L, 2, theta).value)
              for L in nonneg]
    records.append(_empirical(
        'norm_equivalence', NORM_EQUIVALENCE,
        _maxOf(ratios)))
    # Landau interpolation with constant 2
    records.append(_bounded(
        'landau_interpolation', INTERPOLATION,
        _maxOf([_landau(L, theta) for L in every]), 1.0 + 1e-9))
    # Positivity: |Omega'(p)| <= Omega(p/2)/p
    records.append(_bounded(
        'positivity_derivative', POSITIVITY,
        _maxOf([_positivity(L) for L in nonneg]), 1.0 + 1e-12))
    # Cutoff by e^(-n x)
    ratios = []
    for L in every:
        for n in (1, 2, 5):
            S = shiftedEval(L, n)
            for k in range(3):
                ratios.append(_ratio(
                    seminorm(S, k, theta).value, seminorm(L, k, theta).value))
    records.append(_bounded(
        'cutoff', CUTOFF,
        _maxOf(ratios), 1.0 + 1e-6))
    # Split with constant n^(2-theta)
    ratios = []
    for L in every:
        base = L - shiftedEval(L, 1)
        for n in (1, 2, 5):
            part = L - shiftedEval(L, n)
            for k in range(3):
                ratios.append(_ratio(
                    seminorm(part, k, theta).value,
                    n**(2.0 - theta)*seminorm(base, k, theta).value))
    records.append(_bounded(
        'split', SPLIT,
        _maxOf(ratios), 1.0 + 1e-6))
    # Regularized weight
    ratios = [_ratio(fullnorm(L - shiftedEval(L, 1), 1, theta + 1.0),
                     fullnorm(L, 2, theta)) for L in every]
    records.append(_empirical(
        'regularized_weight', REGULARIZED,
        _maxOf(ratios)))
    # Ordering in chi
    ratios = [_ratio(fullnorm(L, 2, 0.5*theta), fullnorm(L, 2, theta))
              for L in every]
    records.append(_bounded(
        'norm_order', NORM_ORDER, _maxOf(ratios), 1.0 + 1e-9))
    # Lambda sandwich
    rng = np.random.default_rng(0)
    s = np.exp(rng.uniform(-8.0, 8.0, 1000))
    chi = rng.uniform(1e-3, 1.0, 1000)
    lam = lambda_weight(s, chi)
    middle = (1.0 + s)**(1.0 - chi)/s
    violation = max(
        np.max((lam - middle)/middle), np.max((middle - 2**(1 - chi)*lam)/middle))
    records.append(_bounded(
        'lambda_sandwich', LAMBDA, max(violation, 0.0), 1e-12))
    for r in records:
        log.info("{}: {} ({})".format(r.name, r.status, r.measured))
    return records


#--- Operator -----------------------------------------------------------------

def _mixtureEval(terms):
    return transform(ExpMixture(terms))


def _roundTripInputs():
    return (
        ('1/p', muBarTransform()),
        ('1/(1+p)', _mixtureEval([(1.0, 1.0, 0)])),
        ('1/(1+p)^2', _mixtureEval([(1.0, 1.0, 1)])))


def run_operator_suite(theta, seed=0, count=400):
    """
    Checks the transformed linear operator: closed-form value, round
    trips both ways, commutation with the physical-space operator and
    empirical bounds for it and its inverse.
    """
    records = []
    p = np.geomspace(0.01, 100.0, 9)
    for label, G in _roundTripInputs():
        trace = operator_trace(G, label, p)
        records.append(_bounded(
            "roundtrip_inverse G=" + label, INVERSION,
            trace.inverse_roundtrip_error, 1e-5))
        forward = apply_Lhat(inverseEval(G), p)
        g = G(p)
        records.append(_bounded(
            "roundtrip_forward G=" + label, INVERSION,
            float(np.max(np.abs(forward - g)/np.abs(g))), 1e-5))
    q = pGrid(50)
    value = apply_Lhat(muBarTransform(), q)
    records.append(_bounded(
        'closed_form', LINEARIZATION,
        float(np.max(np.abs(value + 1.0/q)*q)), 1e-8))
    omega = ExpMixture([(1.0, 1.0, 0), (1.0, 1.0, 1)])
    spec = KernelSpec()
    errs = []
    for pk in (0.5, 2.0, 5.0):
        physical = transform_L_physical(spec, omega, pk)
        laplace = apply_Lhat(transform(omega), pk)
        errs.append(abs(physical - laplace)/abs(laplace))
    records.append(_bounded(
        'commutation', LINEARIZATION,
        max(errs), 1e-4))
    mixtures, _ = randomMixtures(seed, 10)
    forwardRatios, inverseRatios = [], []
    for w in mixtures:
        L = transform(w)
        size = fullnorm(L, 2, theta, count)
        forwardRatios.append(_ratio(fullnorm(lhatEval(L), 2, theta, count), size))
        inverseRatios.append(_ratio(fullnorm(inverseEval(L), 2, theta, count), size))
    records.append(_empirical(
        'operator_bound', LINEARIZATION, _maxOf(forwardRatios)))
    records.append(_empirical(
        'inverse_bound', INVERSION, _maxOf(inverseRatios)))
    return records


#--- Kernel -------------------------------------------------------------------

def _gammaBound(repr, count=1000, seed=0):
    rng = np.random.default_rng(seed)
    xi = np.exp(rng.uniform(-10.0, 10.0, count))
    eta = np.exp(rng.uniform(-10.0, 10.0, count))
    a = repr.alpha
    values = np.abs(repr.regular(xi, eta))*(xi + eta)**(1.0 - a)
    return float(np.max(values/(xi**-a + eta**-a)))


def run_kernel_suite(alphas, theta=None):
    """
    Checks the representation of M{W/(y+z)} for the power kernel at
    each of I{alphas}, and the finiteness of the weighted integrals of
    M{|Gamma|}.
    """
    records = []
    for alpha in alphas:
        spec = KernelSpec(epsilon=1.0, alpha=alpha, family='power')
        repr = gamma_closed_form(alpha)
        th = theta if theta is not None and theta > alpha else default_theta(alpha)
        tag = "alpha={:g}".format(alpha)
        for y, z in ((1.0, 1.0), (1.0, 4.0), (3.0, 0.5)):
            name = "reconstruction {} ({:g},{:g})".format(tag, y, z)
            try:
                residual = verify_repr(repr, spec, y, z)
            except errors.NumericFailure as e:
                records.append(CheckRecord(
                    name, REPRESENTATION, INCONCLUSIVE,
                    _float(e.estimate), 1e-4))
            else:
                records.append(_bounded(
                    name, REPRESENTATION, residual, 1e-4))
        records.append(_bounded(
            "gamma_bound " + tag, REPRESENTATION,
            _gammaBound(repr), 1.0 + 1e-6))
        records.append(_empirical(
            "gamma_int " + tag, GAMMA_INTEGRAL,
            gamma_weighted_integral(repr, 1, 1, th)))
        records.append(_empirical(
            "gamma_int_eta " + tag, GAMMA_INTEGRAL,
            gamma_weighted_integral(repr, 1, 1, th, pureEta=True)))
        xis = (1e-1, 1e-2, 1e-3, 1e-4)
        ratios = [gamma_eta_integral(repr, xi, th)/(xi**-alpha + np.log(1/xi))
                  for xi in xis]
        records.append(_empirical(
            "gamma_eta_growth " + tag, GAMMA_ETA,
            max(ratios)))
    return records


#--- Uniqueness ---------------------------------------------------------------

def _inits(grid):
    return (Profile.sample(grid, lambda x: np.exp(-x)),
            Profile.sample(grid, lambda x: 0.5*(1.0 + x)*np.exp(-x)))


def run_uniqueness_suite(alpha, eps_list, opts=None, grid=None):
    """
    Solves from two starts at each M{epsilon} and records the distance
    between the results, the uniform bound on M{||mu||_2}, and that
    M{|mu - 1|_0} shrinks with M{epsilon}.
    """
    opts = opts or SolverOptions()
    grid = grid or Grid()
    theta = opts.theta or default_theta(alpha)
    records, rows = [], []
    for eps in eps_list:
        family = 'power' if eps > 0 else 'constant'
        spec = KernelSpec(epsilon=eps, alpha=alpha, family=family)
        tag = "eps={:g}".format(eps)
        try:
            probe = contraction_probe(spec, *_inits(grid), opts=opts)
        except errors.SelfsimError as e:
            log.warning("Uniqueness probe {} failed: {}".format(tag, e))
            records.append(CheckRecord(
                "probe " + tag, SMALLNESS, INCONCLUSIVE, None, 1e-6))
            continue
        if probe.inconclusive:
            records.append(CheckRecord(
                "probe " + tag, SMALLNESS, INCONCLUSIVE,
                probe.distance_norm0, 1e-6))
        else:
            records.append(_bounded(
                "probe " + tag, SMALLNESS, probe.distance_norm0, 1e-6))
        records.append(_bounded(
            "mu_bound " + tag, SMALLNESS, probe.norm2, 6.0))
        report = probe.reports[0]
        if None not in (report['final_norm_m'], report['kappa']):
            rows.append((eps, report['final_norm_m'], report['kappa']))
    positive = sorted(r for r in rows if r[0] > 0)
    if len(positive) > 1:
        norms = [r[1] for r in positive]
        increasing = all(a < b for a, b in zip(norms, norms[1:]))
        records.append(CheckRecord(
            'smallness', SMALLNESS,
            PASS if increasing else FAIL, norms[-1], None))
        # The number of distinct signs of kappa, one when it keeps its sign
        signs = {np.sign(r[2]) for r in positive}
        records.append(_bounded(
            'kappa_sign', SMALLNESS, float(len(signs)), 1.0))
    return records


#--- Running and writing -----------------------------------------------------

def run_suites(names, alpha=0.25, theta=None, seed=0, opts=None, grid=None,
               eps_list=(0.1, 0.05, 0.025)):
    """
    Runs the named suites and returns all their records.

    @raise errors.ConfigError: A name is unknown or none is given.
    """
    if not names:
        raise errors.ConfigError('suites', "No suites named")
    for name in names:
        if name not in SUITES:
            raise errors.ConfigError(
                'suites', "Unknown suite '{}'".format(name))
    theta = theta or default_theta(alpha)
    records = []
    if 'norms' in names:
        mixtures, differences = randomMixtures(seed)
        records.extend(run_norm_suite(mixtures, theta, differences))
    if 'operator' in names:
        records.extend(run_operator_suite(theta, seed))
    if 'kernel' in names:
        records.extend(run_kernel_suite([alpha] if alpha > 0 else [0.25]))
    if 'uniqueness' in names:
        records.extend(run_uniqueness_suite(alpha, eps_list, opts, grid))
    return records


def run_suites_async(names, **kw):
    """
    Runs L{run_suites} on the compute queue, returning a C{Deferred}.
    """
    from selfsim.queue import runInThread
    return runInThread(run_suites, names, **kw)


def hardFailures(records):
    return [r for r in records if r.status == FAIL]


def recordsJSON(records, config=None):
    """
    Returns the evidence table as JSON text, with the resolved I{config}
    if given.
    """
    data = {'records': [r.asDict() for r in records]}
    if config is not None:
        data['config'] = config
    return json.dumps(data, indent=2, sort_keys=True)


def write_records_csv(records, fh):
    writer = csv.writer(fh, lineterminator='\n')
    writer.writerow(['name', 'anchor', 'status', 'measured', 'threshold'])
    for r in records:
        writer.writerow([
            r.name, r.anchor, r.status,
            '' if r.measured is None else "{:.17g}".format(r.measured),
            '' if r.threshold is None else "{:.17g}".format(r.threshold)])


__all__ = [
    'KNOWN_ANCHORS', 'CheckRecord', 'randomMixtures', 'shiftedEval',
    'run_norm_suite', 'run_operator_suite', 'run_kernel_suite',
    'run_uniqueness_suite',
    'run_suites', 'run_suites_async', 'hardFailures', 'recordsJSON',
    'write_records_csv']
