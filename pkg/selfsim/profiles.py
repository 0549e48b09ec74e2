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
Profiles on a log-uniform grid, with a parametric exponential tail
beyond the grid and a near-zero model below it, plus analytic
exponential mixtures that serve as exact references.

Every density object here answers the same two integral questions,
which is all the transform and bilinear code needs:

  - C{integrate(sigma, p)} = M{int_0^inf x^sigma e^(-p x) w(x) dx}
  - C{upperIntegral(b, s)} = M{int_s^inf z^b w(z) dz}
"""

import csv, logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special

from selfsim import errors
from selfsim.quadrature import gaussLegendre, jacobiRule, panelRule


FIT_WINDOW = 0.6
GL_GRID = 5
GL_PARTIAL = 3

log = logging.getLogger(__name__)


def _asArray(p):
    p = np.asarray(p, dtype=float)
    return p.ndim == 0, np.atleast_1d(p)


def upperGamma(s, y):
    """
    Returns M{Gamma(s, y)} for real I{s} of either sign, by downward
    recurrence from positive I{s} and the exponential integral at zero.
    """
    y = np.asarray(y, dtype=float)
    if s > 0:
        return special.gammaincc(s, y)*special.gamma(s)
    if s == 0:
        return special.exp1(y)
    with np.errstate(divide='ignore', over='ignore'):
        return (upperGamma(s + 1.0, y) - y**s*np.exp(-y))/s


@dataclass(frozen=True)
class Grid(object):
    """
    I am a log-uniform grid of I{n} nodes from I{x_min} to I{x_max}.
    """
    x_min: float = 1e-4
    x_max: float = 40.0
    n: int = 600

    def __post_init__(self):
        if not 0 < self.x_min < 1 < self.x_max:
            raise errors.DomainError(
                "Grid needs 0 < x_min < 1 < x_max, got [{}, {}]".format(
                    self.x_min, self.x_max))
        if self.n < 16:
            raise errors.DomainError("Grid needs at least 16 nodes")

    @cached_property
    def nodes(self):
        x = np.geomspace(self.x_min, self.x_max, self.n)
        x[0], x[-1] = self.x_min, self.x_max
        x.setflags(write=False)
        return x

    @cached_property
    def ratio(self):
        return (self.x_max/self.x_min)**(1.0/(self.n - 1))

    def asDict(self):
        return {'x_min': self.x_min, 'x_max': self.x_max, 'n': self.n}


@dataclass(frozen=True)
class LayerModel(object):
    """
    The near-zero ansatz M{f(x) = f(x0) (x/x0)^(beta-2) exp(-(eps m/a)
    (x^-a - x0^-a))} for a profile with a boundary layer.
    """
    beta: float
    m_alpha: float
    epsilon: float
    alpha: float

    def shape(self, x, x0):
        c = self.epsilon*self.m_alpha/self.alpha
        with np.errstate(over='ignore', under='ignore'):
            return (x/x0)**(self.beta - 2.0)*np.exp(
                -c*(x**-self.alpha - x0**-self.alpha))

    def rescaled(self, a):
        return LayerModel(
            self.beta, self.m_alpha*a**-self.alpha, self.epsilon, self.alpha)


def fitDecay(x, values, x_max=None):
    """
    Fits M{log f = c - r x} by least squares over the tail window
    M{[0.6 x_max, x_max]}, returning (r, c).

    @raise errors.FitFailure: The window holds non-positive or
      increasing values, or too few nodes.
    """
    x = np.asarray(x)
    values = np.asarray(values)
    if x_max is None:
        x_max = x[-1]
    mask = (x >= FIT_WINDOW*x_max) & (x <= x_max)
    if mask.sum() < 3:
        raise errors.FitFailure("Fewer than three nodes in the tail window")
    v = values[mask]
    if not np.all(v > 0):
        raise errors.FitFailure("Non-positive values in the tail window")
    if np.any(np.diff(v) > 0):
        raise errors.FitFailure("Tail is not monotone decreasing")
    slope, intercept = np.polyfit(x[mask], np.log(v), 1)
    return -slope, intercept


class GridFunction(object):
    """
    I am a real function on M{(0, inf)} known by its values at the
    nodes of a L{Grid}.

    Between nodes I interpolate M{log w} linearly in M{x} where both
    node values are positive, which is exact for exponentials, and
    M{w} itself linearly otherwise. Beyond I{x_max} I am M{A
    e^(-r x)}. Below I{x_min} I follow my L{LayerModel} if I have one,
    else M{w(x_min) exp(s0 (x - x_min))} with M{s0} the log slope of
    the first interval.

    @ivar tail_rate: The rate I{r}, fitted from the tail window unless
      supplied.
    @ivar tail_amp: The amplitude I{A}, matched to the last node.
    """
    def __init__(self, grid, values, tail_rate=None, layer=None):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n,):
            raise errors.DomainError(
                "Expected {:d} values, got {}".format(grid.n, values.shape))
        if not np.all(np.isfinite(values)):
            raise errors.NumericFailure("Non-finite profile values")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.layer = layer
        x = grid.nodes
        if tail_rate is None:
            if np.all(values[x >= FIT_WINDOW*grid.x_max] == 0):
                tail_rate = 1.0
            else:
                tail_rate = fitDecay(x, values)[0]
        self.tail_rate = float(tail_rate)
        self.tail_amp = float(values[-1]*np.exp(self.tail_rate*grid.x_max))
        self._dx = np.diff(x)
        self._pos = (values[:-1] > 0) & (values[1:] > 0)
        with np.errstate(divide='ignore', invalid='ignore'):
            slope = np.diff(np.log(np.where(values > 0, values, 1.0)))/self._dx
        self._slope = np.where(self._pos, slope, 0.0)
        self._cache = {}

    def __repr__(self):
        return "<{} n={:d} r={:.6g} A={:.6g}>".format(
            self.__class__.__name__, self.grid.n,
            self.tail_rate, self.tail_amp)

    @property
    def decay_rate(self):
        return self.tail_rate

    def withValues(self, values, **kw):
        """
        Returns a new instance of my class on my grid with different
        node I{values}.
        """
        kw.setdefault('layer', self.layer)
        return self.__class__(self.grid, values, **kw)

    #--- Pointwise evaluation -------------------------------------------------

    def _nearZero(self, x):
        v0, x0 = self.values[0], self.grid.x_min
        if self.layer is not None:
            return v0*self.layer.shape(x, x0)
        return v0*np.exp(self._slope[0]*(x - x0))

    def _interior(self, x, k):
        v, xk = self.values, self.grid.nodes[k]
        t = x - xk
        out = np.empty_like(x)
        pos = self._pos[k]
        out[pos] = v[k][pos]*np.exp(self._slope[k][pos]*t[pos])
        lin = ~pos
        out[lin] = v[k][lin] + (v[k+1][lin] - v[k][lin])*t[lin]/self._dx[k][lin]
        return out

    def _index(self, x):
        k = np.searchsorted(self.grid.nodes, x, side='right') - 1
        return np.clip(k, 0, self.grid.n - 2)

    def __call__(self, x):
        scalar, x = _asArray(x)
        out = np.empty_like(x)
        lo, hi = x < self.grid.x_min, x > self.grid.x_max
        mid = ~(lo | hi)
        if lo.any():
            out[lo] = self._nearZero(x[lo])
        if hi.any():
            out[hi] = self.tail_amp*np.exp(-self.tail_rate*x[hi])
        if mid.any():
            out[mid] = self._interior(x[mid], self._index(x[mid]))
        return float(out[0]) if scalar else out

    #--- Integrals ------------------------------------------------------------

    @cached_property
    def _gridRule(self):
        x, w = panelRule(self.grid.nodes, GL_GRID)
        return x, w, self(x)

    def _lowRule(self, sigma, U):
        """
        Nodes and weights, per upper limit in I{U}, for M{int_0^U x^sigma
        g(x) dx}; rows follow I{U}.
        """
        U = U[:, None]
        if self.layer is None:
            t, w = jacobiRule(32, 0.0, sigma)
            return U*t[None, :], U**(sigma + 1.0)*w[None, :]
        s, w = panelRule(np.arange(-40.0, 0.5, 1.0), 8)
        x = U*np.exp(s)[None, :]
        return x, x**(sigma + 1.0)*w[None, :]

    def integrate(self, sigma, p):
        """
        Returns M{int_0^inf x^sigma e^(-p x) w(x) dx}, vectorized over
        I{p}.

        @raise errors.DomainError: M{sigma <= -1}, or M{p + r <= 0} so
          the tail integral diverges.
        """
        if not sigma > -1:
            raise errors.DomainError(
                "sigma must exceed -1, got {}".format(sigma))
        scalar, p = _asArray(p)
        c = self.tail_rate + p
        if not np.all(c > 0):
            raise errors.DomainError(
                "Tail integral diverges for p <= {}".format(-self.tail_rate))
        # Low part
        U = np.minimum(self.grid.x_min, 30.0/np.maximum(p, 1e-300))
        xl, wl = self._lowRule(sigma, U)
        low = np.sum(wl*self._nearZero(xl)*np.exp(-p[:, None]*xl), axis=1)
        # Grid part
        x, w, v = self._gridRule
        gw = w*x**sigma*v
        mid = np.empty_like(p)
        for k in range(0, len(p), 256):
            pk = p[k:k+256]
            with np.errstate(under='ignore'):
                mid[k:k+256] = np.exp(-np.outer(pk, x)) @ gw
        # Tail part
        s, X = sigma + 1.0, self.grid.x_max
        if self.tail_amp == 0:
            tail = np.zeros_like(p)
        else:
            tail = self.tail_amp*upperGamma(s, c*X)/c**s
        result = low + mid + tail
        return float(result[0]) if scalar else result

    def moment(self, sigma):
        """
        Returns M{int_0^inf x^sigma w(x) dx}.

        @raise errors.DomainError: M{sigma <= -1}.
        """
        return self.integrate(sigma, 0.0)

    def mass(self):
        return self.moment(1.0)

    def _partial(self, b, s, k):
        """
        Returns M{int_s^x[k+1] z^b w(z) dz} for I{s} inside interval I{k}.
        """
        x1 = self.grid.nodes[k+1]
        h = x1 - s
        if b == 0:
            fs = self._interior(s, k)
            pos = self._pos[k]
            with np.errstate(over='ignore'):
                expo = fs*h*special.exprel(self._slope[k]*h)
            return np.where(pos, expo, 0.5*(fs + self.values[k+1])*h)
        t, w = gaussLegendre(GL_PARTIAL)
        z = s[:, None] + 0.5*h[:, None]*(1.0 + t[None, :])
        kk = np.broadcast_to(k[:, None], z.shape)
        fz = self._interior(z.ravel(), kk.ravel()).reshape(z.shape)
        return 0.5*h*np.sum(w[None, :]*z**b*fz, axis=1)

    def _lowPartial(self, b, s):
        """
        Returns M{int_s^x_min z^b w(z) dz} for M{0 <= s < x_min}.
        """
        x0 = self.grid.x_min
        if self.layer is None:
            # w = z^(1+b) removes the endpoint power
            t, wt = gaussLegendre(8)
            e = 1.0 + b
            w0, w1 = s**e, x0**e
            wq = w0[:, None] + 0.5*(w1 - w0)[:, None]*(1.0 + t[None, :])
            fz = self._nearZero(wq**(1.0/e))
            return 0.5*(w1 - w0)*np.sum(wt[None, :]*fz, axis=1)/e
        t, wt = gaussLegendre(8)
        lo = np.log(np.maximum(s, x0*np.exp(-40.0)))
        edges = lo[:, None] + (np.log(x0) - lo)[:, None]*np.linspace(0, 1, 5)
        total = np.zeros_like(s)
        for j in range(4):
            a, c = edges[:, j], edges[:, j+1]
            tau = a[:, None] + 0.5*(c - a)[:, None]*(1.0 + t[None, :])
            z = np.exp(tau)
            total += 0.5*(c - a)*np.sum(
                wt[None, :]*z**(1.0 + b)*self._nearZero(z), axis=1)
        return total

    def _upperTables(self, b):
        """
        Returns cumulative integrals M{C[k] = int_x[k]^inf z^b w} and
        the tail integral, cached per I{b}.
        """
        key = ('upper', b)
        if key not in self._cache:
            x = self.grid.nodes
            k = np.arange(self.grid.n - 1)
            J = self._partial(b, x[:-1].copy(), k)
            r, A, X = self.tail_rate, self.tail_amp, self.grid.x_max
            if A == 0:
                tail = 0.0
            elif r <= 0:
                raise errors.DomainError(
                    "Upper integral diverges with tail rate {}".format(r))
            else:
                tail = A*upperGamma(b + 1.0, r*X)/r**(b + 1.0)
            C = np.concatenate([np.cumsum(J[::-1])[::-1], [0.0]]) + tail
            self._cache[key] = C
        return self._cache[key]

    def upperIntegral(self, b, s):
        """
        Returns M{int_s^inf z^b w(z) dz}, vectorized over I{s} >= 0.
        """
        if not b > -1:
            raise errors.DomainError("b must exceed -1, got {}".format(b))
        scalar, s = _asArray(s)
        C = self._upperTables(b)
        out = np.empty_like(s)
        x0, X = self.grid.x_min, self.grid.x_max
        lo, hi = s < x0, s > X
        mid = ~(lo | hi)
        if lo.any():
            out[lo] = self._lowPartial(b, s[lo]) + C[0]
        if hi.any():
            r, A = self.tail_rate, self.tail_amp
            out[hi] = 0.0 if A == 0 else A*upperGamma(
                b + 1.0, r*s[hi])/r**(b + 1.0)
        if mid.any():
            k = self._index(s[mid])
            out[mid] = self._partial(b, s[mid], k) + C[k+1]
        return float(out[0]) if scalar else out


class Profile(GridFunction):
    """
    I am a nonnegative L{GridFunction}: a profile M{f}.
    """
    def __init__(self, grid, values, tail_rate=None, layer=None):
        if np.any(np.asarray(values) < 0):
            raise errors.DomainError("Profile values must be nonnegative")
        super(Profile, self).__init__(grid, values, tail_rate, layer)

    @classmethod
    def sample(cls, grid, f, **kw):
        """
        Returns a profile with node values of the vectorized function
        I{f}.
        """
        return cls(grid, f(grid.nodes), **kw)


class ExpMixture(object):
    """
    I am the analytic function M{sum_i c_i x^k_i e^(-a_i x)}, given as
    a sequence of M{(c, a, k)} triples with integer M{k >= 0}.

    My integrals are closed forms, so I serve as the exact reference
    for everything that works on grids.
    """
    def __init__(self, terms):
        self.terms = tuple(
            (float(c), float(a), int(k)) for c, a, k in terms)

    def __repr__(self):
        return "<ExpMixture {}>".format(
            " + ".join("{:g} x^{:d} e^-{:g}x".format(c, k, a)
                       for c, a, k in self.terms) or "0")

    def __call__(self, x):
        scalar, x = _asArray(x)
        out = np.zeros_like(x)
        for c, a, k in self.terms:
            out += c*x**k*np.exp(-a*x)
        return float(out[0]) if scalar else out

    def __add__(self, other):
        return ExpMixture(self.terms + other.terms)

    def __mul__(self, scale):
        return ExpMixture([(scale*c, a, k) for c, a, k in self.terms])

    __rmul__ = __mul__

    def __neg__(self):
        return self*-1.0

    def __sub__(self, other):
        return self + (-other)

    @property
    def isNonnegative(self):
        return all(c >= 0 for c, a, k in self.terms)

    def shifted(self, d):
        """
        Returns me times M{e^(-d x)}.
        """
        return ExpMixture([(c, a + d, k) for c, a, k in self.terms])

    def integrate(self, sigma, p):
        if not sigma > -1:
            raise errors.DomainError(
                "sigma must exceed -1, got {}".format(sigma))
        scalar, p = _asArray(p)
        out = np.zeros_like(p)
        for c, a, k in self.terms:
            if not np.all(a + p > 0):
                raise errors.DomainError(
                    "Transform diverges for p <= {}".format(-a))
            s = sigma + k + 1.0
            out += c*special.gamma(s)/(a + p)**s
        return float(out[0]) if scalar else out

    def moment(self, sigma):
        return self.integrate(sigma, 0.0)

    def mass(self):
        return self.moment(1.0)

    def upperIntegral(self, b, s):
        scalar, s = _asArray(s)
        out = np.zeros_like(s)
        for c, a, k in self.terms:
            if not a > 0:
                raise errors.DomainError(
                    "Upper integral diverges for a = {}".format(a))
            e = b + k + 1.0
            out += c*upperGamma(e, a*s)/a**e
        return float(out[0]) if scalar else out

    def onGrid(self, grid):
        """
        Returns my samples on I{grid} as a L{Profile} if I am
        nonnegative, else as a L{GridFunction}, with the tail rate set
        to my slowest exponential.
        """
        rate = min(a for c, a, k in self.terms) if self.terms else 1.0
        cls = Profile if self.isNonnegative else GridFunction
        return cls(grid, self(grid.nodes), tail_rate=rate)


def muBar():
    """
    Returns the constant-kernel solution in M{mu} form, M{mu = 1}.
    """
    return ExpMixture([(1.0, 0.0, 0)])


def mass(p):
    """
    Returns M{int_0^inf x f(x) dx}.
    """
    return p.mass()


def moment(p, sigma):
    """
    Returns M{int_0^inf z^sigma f(z) dz}.

    @raise errors.DomainError: M{sigma <= -1}.
    """
    return p.moment(sigma)


def rescale(p, a):
    """
    Returns M{g(x) = a f(a x)} on the same grid.
    """
    if not a > 0:
        raise errors.DomainError("Rescaling factor must be positive")
    if a == 1:
        return p
    layer = p.layer.rescaled(a) if p.layer is not None else None
    return p.__class__(
        p.grid, a*p(a*p.grid.nodes),
        tail_rate=p.tail_rate*a, layer=layer)


def normalize_decay(p, tol=1e-3):
    """
    Rescales I{p} so that its fitted tail decay rate is one, returning
    the rescaled profile and the factor used.

    @raise errors.FitFailure: The tail cannot be fitted.
    """
    x = p.grid.nodes
    a = 1.0
    g = p
    for k in range(4):
        rate = fitDecay(x, g.values)[0]
        if rate <= 0:
            raise errors.FitFailure(
                "Fitted decay rate {:.4g} is not positive".format(rate))
        if abs(rate - 1.0) < 1e-12 or (k and abs(rate - 1.0) < tol):
            break
        a /= rate
        g = rescale(p, a)
    else:
        rate = fitDecay(x, g.values)[0]
        if abs(rate - 1.0) > tol:
            raise errors.FitFailure(
                "Decay normalization left rate {:.6g}".format(rate))
    log.debug("Decay normalization: factor {:.9g}".format(a))
    return g, a


def mu_view(p):
    """
    Returns M{mu(x) = f(x) e^x} as a L{GridFunction}; its tail is
    M{A e^(-(r-1) x)}, the constant I{A} when M{r = 1}.
    """
    x = p.grid.nodes
    return GridFunction(
        p.grid, p.values*np.exp(x), tail_rate=p.tail_rate - 1.0,
        layer=p.layer)


def f_view(mu):
    """
    Returns M{f(x) = mu(x) e^-x} as a L{Profile}.
    """
    x = mu.grid.nodes
    return Profile(
        mu.grid, np.clip(mu.values*np.exp(-x), 0.0, None),
        tail_rate=mu.tail_rate + 1.0, layer=mu.layer)


def write_csv(p, fh):
    """
    Writes I{p} to the open text file I{fh} with columns C{x,f,mu},
    one row per node, 17 significant digits.
    """
    x = p.grid.nodes
    mu = p.values*np.exp(x)
    writer = csv.writer(fh, lineterminator='\n')
    writer.writerow(['x', 'f', 'mu'])
    for row in zip(x, p.values, mu):
        writer.writerow(["{:.17g}".format(v) for v in row])


def read_csv(fh):
    """
    Reads a profile written by L{write_csv}, rebuilding its grid from
    the first and last I{x} and the row count.
    """
    reader = csv.reader(fh)
    header = next(reader)
    if header[:2] != ['x', 'f']:
        raise errors.FitFailure("Not a profile CSV: header {}".format(header))
    rows = np.array([[float(v) for v in row[:2]] for row in reader if row])
    grid = Grid(rows[0, 0], rows[-1, 0], len(rows))
    return Profile(grid, rows[:, 1])


__all__ = [
    'upperGamma', 'Grid', 'LayerModel', 'fitDecay', 'GridFunction', 'Profile',
    'ExpMixture', 'muBar', 'mass', 'moment', 'rescale', 'normalize_decay',
    'mu_view', 'f_view', 'write_csv', 'read_csv']
