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
Fixed-point solvers for the self-similar profile equation and for the
prefactor equation, with the probes built on them.

The profile solver iterates the integrated form of the equation.
Differentiating M{x^2 f(x) = int_0^x int_(x-y)^inf y K f f} gives
M{(x^2 f)' = x beta_K f - C} with M{beta_K(x) = int K(x,z) f(z) dz}
and the gain M{C(x) = int_0^x K(y,x-y) y f(y) f(x-y) dy}, so::

    S(f)(x) = x^-2 e^P(x) int_x^inf C(xi) e^-P(xi) dxi,   P' = beta_K/x

Since M{S(c g) = c^2 x^-2 e^(c P_g) int C_g e^(-c P_g)}, each iterate
I{g} gets the amplitude I{c} solving M{N(S(c g)) = c N(g)} before the
damped step, with M{N} approximating M{int f}. The decay or mass
normalization then pins the rescaling family.

The prefactor equation is quadratic too, M{T(c mu) = c^2 T(mu)}, and
is iterated projectively::

    mu <- (1-d) mu + d T(mu)/lam,   lam = N(T(mu))/N(mu)

with a fixed positive functional I{N}; the solution is M{mu/lam}.
"""

import logging, time
from dataclasses import dataclass, asdict, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from selfsim import errors
from selfsim.laplace import (
    transform, muBarTransform, seminorm, fullnorm, default_theta)
from selfsim.profiles import (
    Grid, GridFunction, Profile, LayerModel, fitDecay, rescale,
    normalize_decay, mu_view)
from selfsim.quadrature import (
    gaussLegendre, gradedRule, jacobiRule, logRule, panelRule)


NORMALIZATIONS = ('decay_rate', 'mass')
GL_OUTER = 5
TAIL_SPAN = 46.0
TINY = 1e-300

log = logging.getLogger(__name__)

@dataclass(frozen=True)
class SolverOptions(object):
    """
    Iteration settings shared by both solvers.
    """
    max_iter: int = 500
    tol: float = 1e-9
    damping: float = 0.5
    normalization: str = 'decay_rate'
    theta: Optional[float] = None

    def __post_init__(self):
        if not self.tol > 0:
            raise errors.DomainError("tol must be positive")
        if not 0 < self.damping <= 1:
            raise errors.DomainError("damping must lie in (0, 1]")
        if self.max_iter < 1:
            raise errors.DomainError("max_iter must be positive")
        if self.normalization not in NORMALIZATIONS:
            raise errors.DomainError(
                "Unknown normalization '{}'".format(self.normalization))

    def asDict(self):
        return asdict(self)


@dataclass
class SolverReport(object):
    """
    I record one solver run.

    @ivar final_norm_m: M{|mu - 1|_(0,theta)} of the result, or C{None}
      if it could not be measured.
    @ivar kappa: M{2(U(1) - 1)} with M{U(1) = int f}, or C{None}.
    @ivar clips: Node values clipped to zero, over all iterations.
    @ivar scale: The product of all rescaling factors applied.
    @ivar amplitude: The last amplitude (profile solver) or projective
      factor (prefactor solver).
    @ivar error: The message of a failure that ended the iteration.
    """
    iterations: int = 0
    residual_history: list = field(default_factory=list)
    contraction_history: list = field(default_factory=list)
    final_norm_m: Optional[float] = None
    kappa: Optional[float] = None
    converged: bool = False
    wall_time_s: float = 0.0
    clips: int = 0
    scale: float = 1.0
    amplitude: float = 1.0
    normalization: str = 'decay_rate'
    d_star: Optional[float] = None
    D_star: Optional[float] = None
    error: Optional[str] = None

    @property
    def residual(self):
        return self.residual_history[-1] if self.residual_history else None

    def asDict(self):
        result = asdict(self)
        result['residual'] = self.residual
        return result


class ConvolutionRule(object):
    """
    I hold the quadrature geometry of the profile equation on a grid,
    for kernels that are sums of monomials M{c y^a z^b}::

      x_i^2 f(x_i) = sum c int_0^x_i y^(1+a) f(y) F_b(x_i - y) dy

    with M{F_b(s) = int_s^inf z^b f}. The nodes of all rows are stored
    flat, with their row index, so one iteration is a few vectorized
    evaluations and a C{bincount}.
    """
    def __init__(self, grid, n=6, levels=8):
        self.grid = grid
        x = grid.nodes
        lowY, lowW = gradedRule(0.0, grid.x_min, 'a', 0.25, 4, n)
        gridY, gridW = panelRule(x, n)
        Y, W, I = [], [], []
        for i in range(grid.n):
            if i == 0:
                y, w = gradedRule(0.0, x[0], 'both', 0.25, levels, n)
            else:
                lastY, lastW = gradedRule(x[i-1], x[i], 'b', 0.25, levels, n)
                m = (i - 1)*n
                y = np.concatenate([lowY, gridY[:m], lastY])
                w = np.concatenate([lowW, gridW[:m], lastW])
            Y.append(y)
            W.append(w)
            I.append(np.full(len(y), i))
        self.Y = np.concatenate(Y)
        self.W = np.concatenate(W)
        self.I = np.concatenate(I)
        self.S = x[self.I] - self.Y
        self._powers = {}
        log.debug("Convolution rule: {:d} nodes".format(len(self.Y)))

    def power(self, e):
        if e not in self._powers:
            self._powers[e] = self.Y**e
        return self._powers[e]

    def rows(self, f, terms):
        """
        Returns M{int_0^x_i int_(x_i-y)^inf y K f(y) f(z) dz dy} at every
        node.
        """
        fY = f(self.Y)
        acc = np.zeros_like(self.Y)
        for c, a, b in terms:
            acc += c*self.power(1.0 + a)*f.upperIntegral(b, self.S)
        return np.bincount(
            self.I, weights=self.W*fY*acc, minlength=self.grid.n)

class GainRule(object):
    """
    I hold the quadrature of the gain term at every grid node, folded
    onto half the interval by symmetry::

      C(x) = int_0^x K(y, x-y) y f(y) f(x-y) dy
           = x int_0^(x/2) K(y, x-y) f(y) f(x-y) dy

    Panels end at the grid nodes, where the interpolant has its kinks,
    with a graded rule below I{x_min}. The kernel is evaluated once.
    """
    def __init__(self, spec, grid, n=6, levels=8):
        self.grid = grid
        x = grid.nodes
        Y, W, I = [], [], []
        for i, xi in enumerate(x):
            half = 0.5*xi
            y, w = gradedRule(
                0.0, min(half, grid.x_min), 'a', 0.25, levels, n)
            if half > grid.x_min:
                upper = panelRule(np.concatenate([x[x < half], [half]]), n)
                y = np.concatenate([y, upper[0]])
                w = np.concatenate([w, upper[1]])
            Y.append(y)
            W.append(w)
            I.append(np.full(len(y), i))
        self.Y = np.concatenate(Y)
        self.I = np.concatenate(I)
        self.Z = x[self.I] - self.Y
        self.W = np.concatenate(W)*spec.K(self.Y, self.Z)
        log.debug("Gain rule: {:d} nodes".format(len(self.Y)))

    def __call__(self, f):
        values = self.W*f(self.Y)*f(self.Z)
        return self.grid.nodes*np.bincount(
            self.I, weights=values, minlength=self.grid.n)


def _exponent(spec, g):
    """
    Returns a vectorized M{P(t) = int^t beta_K(s; g) ds/s}, up to a
    constant.

    For a kernel that is a sum of monomials M{c y^a z^b}, M{beta_K(s) =
    sum c M_b s^a} and M{P} is in closed form. Otherwise I tabulate
    M{beta_K} at the nodes and integrate it in M{log s}, continuing
    linearly in M{log s} beyond I{x_max}.
    """
    terms = spec.separable()
    if terms is not None:
        moments = [(c, a, g.moment(b)) for c, a, b in terms]

        def P(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            for c, a, M in moments:
                out += c*M*(np.log(t) if a == 0 else t**a/a)
            return out
        return P
    x = g.grid.nodes
    z, w = logRule(1e-12, x[-1] + TAIL_SPAN/g.tail_rate, 0.25, 8)
    beta = spec.K(x[:, None], z[None, :]) @ (w*g(z))
    s = np.log(x)
    table = integrate.cumulative_trapezoid(beta, s, initial=0.0)

    def P(t):
        u = np.log(np.asarray(t, dtype=float))
        return np.where(
            u > s[-1], table[-1] + beta[-1]*(u - s[-1]),
            np.interp(u, s, table))
    return P


class _Image(object):
    """
    I am the integrated map M{S} at M{f = c g} for one iterate I{g},
    for any amplitude I{c}.

    The outer integral runs over Gauss panels between the nodes and
    over the tail beyond I{x_max}. Between nodes, M{log h} with M{h =
    C e^(r xi)} is interpolated quadratically in M{log xi} on the
    log-uniform nodes, continued past I{x_max} as a power law; M{e^(-r xi - P(xi))} is evaluated
    exactly. Both are exact for M{K = 2} and M{g = e^-x}.
    """
    def __init__(self, gain, spec, g):
        x = g.grid.nodes
        r = g.tail_rate
        if not r > 0:
            raise errors.FitFailure(
                "Tail rate {:.4g} is not positive".format(r))
        P = _exponent(spec, g)
        C = gain(g)
        logh = np.log(np.maximum(C, TINY)) + r*x
        s = np.log(x)
        t, w = panelRule(s, GL_OUTER)
        k = np.repeat(np.arange(len(x) - 1), GL_OUTER)
        m = np.maximum(k, 1)
        u = (t - s[m])/(s[m+1] - s[m])
        inner = (0.5*u*(u - 1.0)*logh[m-1] + (1.0 - u**2)*logh[m]
                 + 0.5*u*(u + 1.0)*logh[m+1])
        xiIn = np.exp(t)
        slope = (logh[-1] - logh[-2])/(s[-1] - s[-2])
        xiOut, wOut = panelRule(
            np.linspace(x[-1], x[-1] + TAIL_SPAN/r, 47), GL_OUTER)
        outer = logh[-1] + slope*(np.log(xiOut) - s[-1])
        self.x = x
        self.xi = np.concatenate([xiIn, xiOut])
        self.w = np.concatenate([w*xiIn, wOut])
        self.k = np.concatenate([k, np.full(len(xiOut), len(x) - 1)])
        self.logC = np.concatenate([inner, outer]) - r*self.xi
        self.Px = P(x)
        self.Pxi = P(self.xi)

    def __call__(self, c):
        """
        Returns M{S(c g)} at the nodes.
        """
        E = self.logC - c*self.Pxi
        top = E.max()
        buckets = np.bincount(
            self.k, weights=self.w*np.exp(E - top), minlength=len(self.x))
        J = np.cumsum(buckets[::-1])[::-1]
        with np.errstate(over='ignore'):
            values = c**2*np.exp(c*self.Px + top)*J/self.x**2
        if not np.all(np.isfinite(values)):
            raise errors.NumericFailure(
                "Non-finite image at amplitude {:.6g}".format(c), c)
        return values

    def amplitude(self, N, values, steps=60):
        """
        Returns the root I{c} of M{N(S(c g)) = c N(g)}, bracketed by
        stepping geometrically from one.

        @raise errors.NumericFailure: No bracket was found.
        """
        target = np.dot(N, values)

        def excess(c):
            return np.dot(N, self(c)) - c*target

        lo = hi = 1.0
        f = excess(1.0)
        for k in range(steps):
            if f > 0:
                lo, hi = hi, 1.5*hi
                f = excess(hi)
                if f <= 0:
                    break
            elif f < 0:
                lo, hi = lo/1.5, lo
                f = excess(lo)
                if f >= 0:
                    break
            else:
                return lo
        else:
            raise errors.NumericFailure(
                "No amplitude bracket in {:d} steps".format(steps), f)
        return optimize.brentq(excess, lo, hi, xtol=1e-15)


def _normalize(f, mode):
    """
    Returns I{f} rescaled per the normalization I{mode}, and the
    factor used.
    """
    if mode == 'mass':
        a = f.mass()
    else:
        rate = fitDecay(f.grid.nodes, f.values)[0]
        if not rate > 0:
            raise errors.FitFailure(
                "Fitted decay rate {:.4g} is not positive".format(rate))
        a = 1.0/rate
    if abs(a - 1.0) < 1e-14:
        return f, 1.0
    return rescale(f, a), a


def _withLayer(spec, f):
    """
    Returns I{f} carrying a boundary-layer model measured from itself
    when the kernel has one.
    """
    if not (spec.epsilon > 0 and spec.alpha > 0):
        return f
    layer = LayerModel(
        2.0*f.moment(0.0), spec.c_w*f.moment(spec.alpha),
        spec.epsilon, spec.alpha)
    return Profile(f.grid, f.values, tail_rate=f.tail_rate, layer=layer)


def _clip(mu, report):
    negative = mu < 0
    count = int(negative.sum())
    if count:
        report.clips += count
        log.warning("Clipped {:d} negative values ({:d} so far)".format(
            count, report.clips))
        mu = np.where(negative, 0.0, mu)
    return mu


def _muNorm(f, theta):
    m = transform(mu_view(f)) - muBarTransform()
    return seminorm(m, 0, theta).value


def _measure(spec, f, theta, report):
    """
    Sets M{|mu - 1|_(0,theta)} and M{kappa} of the solution I{f} in
    I{report}, both taken on its decay-normalized view. A measure that
    fails stays C{None}.
    """
    try:
        if report.normalization == 'mass':
            f = normalize_decay(f)[0]
        view = Profile(f.grid, f.values, tail_rate=1.0, layer=f.layer)
        report.kappa = 2.0*(view.moment(0.0) - 1.0)
        report.final_norm_m = _muNorm(view, theta)
    except errors.SelfsimError as e:
        log.warning("Could not measure the solution: {}".format(e))


def solve_selfsim(spec, init, opts=None, callback=None):
    """
    Solves the profile equation for the kernel of I{spec}, starting
    from the profile I{init}, and returns the solution profile with a
    L{SolverReport}.

    Non-convergence is not an error: I return the best iterate seen and
    a report with C{converged} false. Neither is a failure inside the
    iteration, which also ends it, leaving its message in the report's
    C{error}.

    @param callback: Called as C{callback(k, mu)} with each normalized
      iterate, if supplied.
    """
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    grid = init.grid
    x = grid.nodes
    gain = GainRule(spec, grid)
    N = np.gradient(x)
    weight = np.minimum(1.0, x**2)
    report = SolverReport(normalization=opts.normalization)
    g, a = _normalize(_withLayer(spec, init), opts.normalization)
    report.scale *= a
    g = _withLayer(spec, g)
    best, result = np.inf, g
    previous = None
    for k in range(opts.max_iter):
        try:
            image = _Image(gain, spec, g)
            c = image.amplitude(N, g.values)
            f = c*g.values
            Sf = image(c)
            residual = float(np.max(
                weight*np.abs(f - Sf)*np.exp(g.tail_rate*x)))
            report.residual_history.append(residual)
            report.iterations = k + 1
            report.amplitude = float(c)
            if residual < best:
                best, result = residual, g.withValues(f, tail_rate=g.tail_rate)
            if previous:
                report.contraction_history.append(residual/previous)
            previous = residual
            log.debug("Iteration {:d}: residual {:.3e}, amplitude {:.9f}".format(
                k, residual, c))
            if residual < opts.tol:
                report.converged = True
                break
            new = _clip((1.0 - opts.damping)*f + opts.damping*Sf, report)
            g, a = _normalize(
                Profile(grid, new, layer=g.layer), opts.normalization)
            report.scale *= a
            g = _withLayer(spec, g)
        except errors.SelfsimError as e:
            report.error = str(e)
            log.warning(
                "Iteration {:d} failed ({}); keeping the best iterate".format(
                    k, e))
            break
        if callback is not None:
            callback(k, g.values*np.exp(x))
    if report.converged:
        log.info("Converged after {:d} iterations, residual {:.3e}".format(
            report.iterations, report.residual))
    else:
        log.warning(
            "No convergence in {:d} iterations; best residual {:.3e}".format(
                report.iterations, best))
    result = _withLayer(spec, result)
    _measure(spec, result, opts.theta or default_theta(spec.alpha), report)
    report.wall_time_s = time.perf_counter() - t0
    return result, report


def equation_residual(spec, f):
    """
    Returns M{sup_i w(x_i) |x_i^2 f(x_i) - int int y K f f| / (x_i^2
    f(x_i) + 1e-12)} with M{w = min(1, x^2)}, for separable kernels.

    @raise errors.UnsupportedOperation: The kernel is not separable.
    """
    terms = spec.separable()
    if terms is None:
        raise errors.UnsupportedOperation(
            "Equation residual needs a separable kernel")
    x = f.grid.nodes
    lhs = x**2*f.values
    rhs = ConvolutionRule(f.grid).rows(f, terms)
    return float(np.max(np.minimum(1.0, x**2)*np.abs(lhs - rhs)/(lhs + 1e-12)))


class _PrefactorMap(object):
    """
    I am the map M{mu -> (1/2x) int_0^x K(y, x-y) mu(y) mu(x-y) dy},
    written on M{[0,1]} by homogeneity and integrated per kernel
    monomial with the Gauss-Jacobi weight M{s^a (1-s)^b}.
    """
    def __init__(self, spec, grid, n=24):
        self.grid = grid
        self.logx = np.log(grid.nodes)
        terms = spec.separable()
        if terms is None:
            s, w = gradedRule(0.0, 1.0, 'both', 0.25, 10, 8)
            self.rules = [(s, 0.5*w*spec.K(s, 1.0 - s))]
        else:
            self.rules = []
            for c, a, b in terms:
                s, w = jacobiRule(n, b, a)
                self.rules.append((s, 0.5*c*w))

    def interpolate(self, mu, q):
        return np.interp(np.log(q), self.logx, mu)

    def __call__(self, mu):
        x = self.grid.nodes
        out = np.zeros_like(x)
        for s, w in self.rules:
            left = self.interpolate(mu, np.outer(x, s))
            right = self.interpolate(mu, np.outer(x, 1.0 - s))
            out += (left*right) @ w
        return out


def _runningAverage(grid, mu):
    """
    Returns M{(1/x) int_0^x mu} at the nodes, M{mu} being constant
    below the grid.
    """
    x = grid.nodes
    steps = 0.5*(mu[1:] + mu[:-1])*np.diff(x)
    cumulative = mu[0]*x[0] + np.concatenate([[0.0], np.cumsum(steps)])
    return cumulative/x


def solve_prefactor(spec, init, opts=None, grid=None):
    """
    Solves M{x mu(x) = (1/2) int_0^x K(y, x-y) mu(y) mu(x-y) dy} on the
    nodes of I{grid}, starting from I{init} (a scalar or node values),
    and returns the solution as a L{GridFunction} with constant
    extension, plus a L{SolverReport} carrying M{d*} and M{D*}, the
    bounds of M{(1/x) int_0^x mu}.
    """
    opts = opts or SolverOptions()
    grid = grid or Grid()
    t0 = time.perf_counter()
    x = grid.nodes
    mu = np.broadcast_to(np.asarray(init, dtype=float), x.shape).copy()
    if not np.all(mu > 0):
        raise errors.DomainError("Prefactor init must be positive")
    T = _PrefactorMap(spec, grid)
    N = np.gradient(x)*np.exp(-x)
    report = SolverReport(normalization='none')
    best, bestMu = np.inf, mu
    previous = None
    for k in range(opts.max_iter):
        Tmu = T(mu)
        lam = np.dot(N, Tmu)/np.dot(N, mu)
        residual = float(np.max(np.abs(mu - Tmu/lam))/lam)
        report.residual_history.append(residual)
        report.iterations = k + 1
        report.amplitude = float(lam)
        if residual < best:
            best, bestMu = residual, mu/lam
        log.debug("Prefactor iteration {:d}: residual {:.3e}".format(
            k, residual))
        if residual < opts.tol:
            report.converged = True
            break
        new = _clip((1.0 - opts.damping)*mu + opts.damping*Tmu/lam, report)
        update = float(np.max(np.abs(new - mu)))
        if previous:
            report.contraction_history.append(update/previous)
        previous = update
        mu = new/lam
    if not report.converged:
        log.warning("Prefactor iteration did not converge")
    averages = _runningAverage(grid, bestMu)
    report.d_star = float(averages.min())
    report.D_star = float(averages.max())
    report.wall_time_s = time.perf_counter() - t0
    return GridFunction(grid, bestMu, tail_rate=0.0), report


@dataclass
class ProbeReport(object):
    """
    I compare two solves of the same equation from different starts.

    @ivar ratios: Successive ratios of the iterate distances.
    @ivar contraction_factor: The geometric mean of the last ratios, or
      C{None} if there were too few.
    @ivar norm2: M{||mu||_(2,theta)} of the first branch.
    """
    distance_norm0: Optional[float] = None
    distance_sup: Optional[float] = None
    ratios: list = field(default_factory=list)
    contraction_factor: Optional[float] = None
    norm2: Optional[float] = None
    inconclusive: bool = False
    reports: list = field(default_factory=list)

    def asDict(self):
        return asdict(self)


def _recorder():
    history = []
    return history, lambda k, mu: history.append(mu.copy())


def _probeReport(results, histories, theta):
    (f1, r1), (f2, r2) = results
    probe = ProbeReport(reports=[r1.asDict(), r2.asDict()])
    if not (r1.converged and r2.converged):
        probe.inconclusive = True
        log.warning("Contraction probe inconclusive: a branch diverged")
    diff = transform(mu_view(f1)) - transform(mu_view(f2))
    probe.distance_norm0 = seminorm(diff, 0, theta).value
    probe.norm2 = fullnorm(transform(mu_view(f1)), 2, theta)
    probe.distance_sup = float(
        np.max(np.abs(f1.values - f2.values))/np.max(f1.values))
    h1, h2 = histories
    d = [np.max(np.abs(a - b)) for a, b in zip(h1, h2)]
    probe.ratios = [
        float(d[k+1]/d[k]) for k in range(len(d) - 1) if d[k] > 0]
    tail = [r for r in probe.ratios[-10:] if r > 0]
    if tail:
        probe.contraction_factor = float(np.exp(np.mean(np.log(tail))))
    return probe


def contraction_probe(spec, init1, init2, opts=None):
    """
    Solves from I{init1} and I{init2} with the same options and returns
    a L{ProbeReport} of their final distance and of the empirical
    contraction of their iterates.
    """
    opts = opts or SolverOptions()
    histories, results = [], []
    for init in (init1, init2):
        history, callback = _recorder()
        histories.append(history)
        results.append(solve_selfsim(spec, init, opts, callback))
    theta = opts.theta or default_theta(spec.alpha)
    return _probeReport(results, histories, theta)


def contraction_probe_async(spec, init1, init2, opts=None):
    """
    Runs both branches of L{contraction_probe} on the compute queue,
    returning a C{Deferred} that fires with the L{ProbeReport}.
    """
    from twisted.internet import defer
    from selfsim.queue import runInThread
    opts = opts or SolverOptions()
    histories, dList = [], []
    for init in (init1, init2):
        history, callback = _recorder()
        histories.append(history)
        dList.append(runInThread(solve_selfsim, spec, init, opts, callback))
    theta = opts.theta or default_theta(spec.alpha)
    d = defer.gatherResults(dList, consumeErrors=True)
    d.addCallback(_probeReport, histories, theta)
    return d


def smallness_curve(spec_family, eps_list, opts=None, grid=None):
    """
    Solves for each M{epsilon} in I{eps_list} with the kernel template
    I{spec_family} and returns one row per M{epsilon} with M{|mu -
    1|_0} and M{kappa}. A failed solve is flagged in its row.
    """
    opts = opts or SolverOptions()
    grid = grid or Grid()
    rows = []
    for eps in eps_list:
        spec = spec_family.withEpsilon(eps)
        row = {'epsilon': eps, 'norm': None, 'kappa': None,
               'converged': False, 'error': None}
        init = Profile.sample(grid, lambda x: np.exp(-x))
        try:
            f, report = solve_selfsim(spec, init, opts)
        except errors.SelfsimError as e:
            row['error'] = str(e)
            log.warning("Smallness row eps={:g} failed: {}".format(eps, e))
        else:
            row.update(
                norm=report.final_norm_m, kappa=report.kappa,
                converged=report.converged)
        rows.append(row)
    return rows


def decay_bounds(f, x_lo=1.0):
    """
    Returns (c1, c2), the tightest rates with M{e^(-c1 x) <= f(x) <=
    e^(-c2 x)} at the nodes in M{[x_lo, x_max]}.

    @raise errors.FitFailure: I{f} is not positive there.
    """
    x = f.grid.nodes
    mask = x >= x_lo
    v = f.values[mask]
    if not np.all(v > 0):
        raise errors.FitFailure("Decay bounds need positive values")
    rates = -np.log(v)/x[mask]
    return float(rates.max()), float(rates.min())


def dyadic_means(f, R0=1.0):
    """
    Returns rows M{(R, int_R^2R mu, int_R^2R mu / R)} for M{R = R0,
    2 R0, ...} with M{2R <= x_max}, and the largest ratio.
    """
    mu = mu_view(f)
    t, w = gaussLegendre(16)
    rows = []
    R = R0
    while 2*R <= f.grid.x_max:
        z = 1.5*R + 0.5*R*t
        value = float(0.5*R*np.dot(w, mu(z)))
        rows.append((R, value, value/R))
        R *= 2
    C = max(r[2] for r in rows) if rows else None
    return rows, C


__all__ = [
    'SolverOptions', 'SolverReport', 'ConvolutionRule', 'GainRule',
    'solve_selfsim', 'equation_residual', 'solve_prefactor', 'ProbeReport',
    'contraction_probe', 'contraction_probe_async', 'smallness_curve',
    'decay_bounds', 'dyadic_means']
