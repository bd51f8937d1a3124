"""
This Module holds the count distributions the rating is built on: the Poisson
distribution of an ideal forecast and the negative binomial (gamma-Poisson mixture)
parametrized by mean and variance, which describes the imperfect reference grades.

Besides pmf/cdf/median it provides the expectation functionals the metrics need:
    E|X - s|  (first term of the ranked probability score)
    E|X - Y|  for X, Y iid (second term)
    E|X - S|  for independent X (forecast) and S (observations of some grade)

All functions accept scalars or numpy arrays and are pure, so they can be
called from any number of threads.
"""
# -*- coding: utf-8 -*-
# pylint: disable=invalid-name

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.special
import scipy.stats

from RatingUtils import GlobalSettings
from .RatingErrors import DegenerateDispersion, RateOutOfRange

logger = logging.getLogger(__name__)

LOG_2 = math.log(2.0)

# number of grid cells evaluated at once when summing over truncated supports
CHUNK_CELLS = 2 ** 21


@dataclass(frozen=True)
class TruncationPolicy:
    """
    Decides where sums over the unbounded count support are cut off.
    The bound starts at ceil(mean + sigmas * stddev + offset) and grows by half
    until the tail beyond it carries less than tail_tolerance.
    """

    tail_tolerance: float = GlobalSettings.TAIL_TOLERANCE
    sigmas: float = GlobalSettings.TRUNCATION_SIGMAS
    offset: int = GlobalSettings.TRUNCATION_OFFSET
    max_extensions: int = 64

    def __post_init__(self):
        if not 0.0 < self.tail_tolerance < 1e-6:
            raise ValueError("tail_tolerance must lie in (0, 1e-6), got " + str(self.tail_tolerance))
        if self.sigmas < 12:
            raise ValueError("the truncation bound must cover at least 12 standard deviations")

    def initial_bound(self, mean, variance):
        """ceil(mean + sigmas * sqrt(variance) + offset), elementwise"""
        mean = np.asarray(mean, dtype=np.float64)
        variance = np.asarray(variance, dtype=np.float64)
        return np.ceil(mean + self.sigmas * np.sqrt(variance) + self.offset).astype(np.int64)

    def hard_cap(self, mean, variance, tail):
        """
        Returns the summation bound K per element, such that tail(K) < tail_tolerance.
        tail is a vectorized function K -> P(X > K).
        """
        bound = np.atleast_1d(self.initial_bound(mean, variance)).copy()
        for _ in range(self.max_extensions):
            short = np.asarray(tail(bound)) >= self.tail_tolerance
            if not np.any(short):
                break
            logger.debug("extending truncation bound for %d rates", int(np.sum(short)))
            bound[short] = np.ceil(bound[short] * 1.5).astype(np.int64)
        return bound


DEFAULT_POLICY = TruncationPolicy()


def check_rate(mu):
    mu = np.asarray(mu, dtype=np.float64)
    if np.any(~np.isfinite(mu)) or np.any(mu <= 0):
        raise RateOutOfRange("rates must be positive and finite")
    if np.any(mu > GlobalSettings.MAX_RATE):
        raise RateOutOfRange("rates above " + str(GlobalSettings.MAX_RATE) + " are not supported")
    return mu


@dataclass(frozen=True)
class PoissonDist:
    """
    Poisson distribution with rate mu, the distribution an ideal forecast believes in
    """

    mu: float

    def __post_init__(self):
        check_rate(self.mu)

    @property
    def mean(self):
        return self.mu

    @property
    def variance(self):
        return self.mu

    def logpmf(self, k):
        return poisson_logpmf(k, self.mu)

    def cdf(self, k):
        return poisson_cdf(k, self.mu)

    def sf(self, k):
        return poisson_sf(k, self.mu)

    def support_bound(self, policy=DEFAULT_POLICY):
        return int(policy.hard_cap(self.mu, self.mu, self.sf)[0])


@dataclass(frozen=True)
class NegBinDist:
    """
    Negative binomial distribution with given mean and variance > mean.
    Internally it is the gamma-Poisson mixture with
    shape = mu^2 / (variance - mu) and success probability p = mu / variance.
    """

    mu: float
    variance: float

    def __post_init__(self):
        check_rate(self.mu)
        if not self.variance > self.mu:
            raise DegenerateDispersion("negative binomial needs variance > mean, got mean "
                                       + str(self.mu) + " and variance " + str(self.variance))
        if not (np.isfinite(self.shape) and self.shape > 0 and 0 < self.p < 1):
            raise DegenerateDispersion("dispersion too close to Poisson to be represented")

    @property
    def mean(self):
        return self.mu

    @property
    def shape(self):
        return nb_shape(self.mu, self.variance)

    @property
    def p(self):
        return self.mu / self.variance

    def logpmf(self, k):
        return nb_logpmf(k, self.mu, self.variance)

    def cdf(self, k):
        return nb_cdf(k, self.mu, self.variance)

    def sf(self, k):
        return nb_sf(k, self.mu, self.variance)

    def support_bound(self, policy=DEFAULT_POLICY):
        return int(policy.hard_cap(self.mu, self.variance, self.sf)[0])


def nb_from_mean_variance(mu, variance):
    """
    Builds the negative binomial with the given mean and variance.
    Raises DegenerateDispersion when variance <= mu, callers must use Poisson then.
    """
    return NegBinDist(float(mu), float(variance))


######################################################################
# vectorized primitives
######################################################################

def nb_shape(mu, variance):
    mu = np.asarray(mu, dtype=np.float64)
    return mu * mu / (np.asarray(variance, dtype=np.float64) - mu)


def poisson_logpmf(k, mu):
    k = np.asarray(k, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = scipy.special.xlogy(k, mu) - mu - scipy.special.gammaln(k + 1.0)
    return np.where(k >= 0, out, -np.inf)


def poisson_cdf(k, mu):
    """P(X <= k); zero for k < 0"""
    k = np.floor(np.asarray(k, dtype=np.float64))
    return np.where(k >= 0, scipy.special.pdtr(np.maximum(k, 0.0), mu), 0.0)


def poisson_sf(k, mu):
    """P(X > k)"""
    k = np.floor(np.asarray(k, dtype=np.float64))
    return np.where(k >= 0, scipy.special.pdtrc(np.maximum(k, 0.0), mu), 1.0)


def nb_logpmf(k, mu, variance):
    k = np.asarray(k, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    variance = np.asarray(variance, dtype=np.float64)
    n = nb_shape(mu, variance)
    p = mu / variance
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (scipy.special.gammaln(k + n) - scipy.special.gammaln(n) - scipy.special.gammaln(k + 1.0)
               + n * np.log(p) + scipy.special.xlog1py(k, -p))
    return np.where(k >= 0, out, -np.inf)


def _nb_cdf_shape(k, n, p):
    # I_p(n, k + 1)
    k = np.floor(np.asarray(k, dtype=np.float64))
    return np.where(k >= 0, scipy.special.betainc(n, np.maximum(k, 0.0) + 1.0, p), 0.0)


def nb_cdf(k, mu, variance):
    mu = np.asarray(mu, dtype=np.float64)
    return _nb_cdf_shape(k, nb_shape(mu, variance), mu / np.asarray(variance, dtype=np.float64))


def nb_sf(k, mu, variance):
    mu = np.asarray(mu, dtype=np.float64)
    n = nb_shape(mu, variance)
    p = mu / np.asarray(variance, dtype=np.float64)
    k = np.floor(np.asarray(k, dtype=np.float64))
    return np.where(k >= 0, scipy.special.betainc(np.maximum(k, 0.0) + 1.0, n, 1.0 - p), 1.0)


def poisson_median(mu):
    """
    Smallest integer m with P(X <= m) >= 1/2, elementwise.
    The median lies in [mu - log 2, mu + 1/3], so a short upward search from
    floor(mu - log 2) finds it.
    """
    mu = np.asarray(mu, dtype=np.float64)
    m = np.maximum(np.floor(mu - LOG_2) - 1.0, 0.0)
    for _ in range(8):
        below = poisson_cdf(m, mu) < 0.5
        if not np.any(below):
            break
        m = np.where(below, m + 1.0, m)
    return m.astype(np.int64)


def poisson_abs_dev(mu, s):
    """
    E|X - s| for X ~ Poisson(mu), from the partial expectation identity
    E|X - s| = mu - s + 2 (s F(s) - mu F(s - 1)).
    """
    mu = np.asarray(mu, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    out = mu - s + 2.0 * (s * poisson_cdf(s, mu) - mu * poisson_cdf(s - 1.0, mu))
    return np.maximum(out, np.abs(mu - s))


def nb_abs_dev(mu, variance, s):
    """
    E|X - s| for X negative binomial. Uses x pmf(x; n, p) = mu pmf(x - 1; n + 1, p)
    for the partial expectation.
    """
    mu = np.asarray(mu, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    n = nb_shape(mu, variance)
    p = mu / np.asarray(variance, dtype=np.float64)
    partial = mu * _nb_cdf_shape(s - 1.0, n + 1.0, p)
    out = mu - s + 2.0 * (s * _nb_cdf_shape(s, n, p) - partial)
    return np.maximum(out, np.abs(mu - s))


def poisson_abs_diff_iid(mu):
    """
    E|X - Y| for X, Y iid Poisson(mu). The difference is Skellam distributed,
    which gives 2 mu exp(-2 mu) (I0(2 mu) + I1(2 mu)).
    """
    mu = np.asarray(mu, dtype=np.float64)
    return 2.0 * mu * (scipy.special.ive(0, 2.0 * mu) + scipy.special.ive(1, 2.0 * mu))


def _grid_widths(bounds):
    # pad K + 1 up to a multiple of a quarter of its leading power of two
    cells = bounds + 1
    step = np.maximum(16, 2 ** np.floor(np.log2(cells)).astype(np.int64) // 4)
    return (np.ceil(cells / step) * step).astype(np.int64)


def _support_sum(bounds, term):
    """
    Sums term(rows, k) over k = 0..K_row for every row.
    Rows with equal padded width share one rectangular grid, evaluated in chunks of
    at most CHUNK_CELLS cells. Terms past a row's own bound are kept, they only
    add tail mass below the tolerance.
    """
    bounds = np.asarray(bounds, dtype=np.int64)
    out = np.zeros(len(bounds), dtype=np.float64)
    if len(bounds) == 0:
        return out
    widths = _grid_widths(bounds)
    for width in np.unique(widths):
        rows = np.flatnonzero(widths == width)
        k = np.arange(width, dtype=np.float64)[None, :]
        step = max(1, CHUNK_CELLS // int(width))
        for start in range(0, len(rows), step):
            chunk = rows[start:start + step]
            out[chunk] = np.sum(term(chunk, k), axis=1)
    return out


def _poisson_cdf_rows(mu, k):
    """cdf on the contiguous grid k = 0, 1, ... for a column of rates, by cumulative summation"""
    logp = scipy.special.xlogy(k, mu) - mu - scipy.special.gammaln(k + 1.0)
    return np.minimum(np.cumsum(np.exp(logp), axis=1), 1.0)


def _nb_cdf_rows(n, p, k):
    logp = (scipy.special.gammaln(k + n) - scipy.special.gammaln(n) - scipy.special.gammaln(k + 1.0)
            + n * np.log(p) + k * np.log1p(-p))
    return np.minimum(np.cumsum(np.exp(logp), axis=1), 1.0)


def nb_abs_diff_iid(mu, variance, policy=DEFAULT_POLICY):
    """
    E|X - Y| for X, Y iid negative binomial, as 2 sum_k F(k) (1 - F(k))
    over the truncated support.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    variance = np.broadcast_to(np.asarray(variance, dtype=np.float64), mu.shape)
    bounds = policy.hard_cap(mu, variance, lambda K: nb_sf(K, mu, variance))
    n = nb_shape(mu, variance)
    p = mu / variance

    def term(rows, k):
        F = _nb_cdf_rows(n[rows, None], p[rows, None], k)
        return 2.0 * F * (1.0 - F)

    return _support_sum(bounds, term)


def cross_abs_dev(mu, actual_mu, actual_variance, policy=DEFAULT_POLICY):
    """
    E|X - S| for independent X ~ Poisson(mu) and S with the given mean and variance
    (Poisson where variance equals the mean, negative binomial above), computed as
    sum_k F_X(k) (1 - F_S(k)) + F_S(k) (1 - F_X(k)) over the truncated support.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    actual_mu = np.broadcast_to(np.asarray(actual_mu, dtype=np.float64), mu.shape)
    actual_variance = np.broadcast_to(np.asarray(actual_variance, dtype=np.float64), mu.shape)
    out = np.empty(mu.shape, dtype=np.float64)

    poisson_rows = np.flatnonzero(actual_variance <= actual_mu)
    if len(poisson_rows):
        m, a = mu[poisson_rows], actual_mu[poisson_rows]
        bounds = np.maximum(policy.hard_cap(m, m, lambda K: poisson_sf(K, m)),
                            policy.hard_cap(a, a, lambda K: poisson_sf(K, a)))

        def poisson_term(rows, k):
            F_x = _poisson_cdf_rows(m[rows, None], k)
            F_s = _poisson_cdf_rows(a[rows, None], k)
            return F_x * (1.0 - F_s) + F_s * (1.0 - F_x)

        out[poisson_rows] = _support_sum(bounds, poisson_term)

    nb_rows = np.flatnonzero(actual_variance > actual_mu)
    if len(nb_rows):
        m, a, v = mu[nb_rows], actual_mu[nb_rows], actual_variance[nb_rows]
        n = nb_shape(a, v)
        p = a / v
        bounds = np.maximum(policy.hard_cap(m, m, lambda K: poisson_sf(K, m)),
                            policy.hard_cap(a, v, lambda K: nb_sf(K, a, v)))

        def nb_term(rows, k):
            F_x = _poisson_cdf_rows(m[rows, None], k)
            F_s = _nb_cdf_rows(n[rows, None], p[rows, None], k)
            return F_x * (1.0 - F_s) + F_s * (1.0 - F_x)

        out[nb_rows] = _support_sum(bounds, nb_term)

    return out


######################################################################
# operations on distribution objects
######################################################################

def pmf(dist, k):
    """Probability of count k, evaluated in log space. Zero outside the support."""
    k_arr = np.asarray(k, dtype=np.float64)
    value = np.exp(dist.logpmf(k_arr))
    value = np.where((k_arr >= 0) & (k_arr == np.floor(k_arr)), value, 0.0)
    return value if np.ndim(value) else float(value)


def cdf(dist, k):
    """P(X <= k)"""
    value = dist.cdf(k)
    return value if np.ndim(value) else float(value)


def median(dist):
    """Smallest m with cdf(m) >= 1/2"""
    if isinstance(dist, PoissonDist):
        return int(poisson_median(dist.mu))
    m = float(scipy.stats.nbinom.ppf(0.5, dist.shape, dist.p))
    while m > 0 and dist.cdf(m - 1) >= 0.5:
        m -= 1
    while dist.cdf(m) < 0.5:
        m += 1
    return int(m)


def expected_abs_dev(dist, s):
    """E|X - s|, s a nonnegative integer (or array of them)"""
    if isinstance(dist, PoissonDist):
        value = poisson_abs_dev(dist.mu, s)
    else:
        value = nb_abs_dev(dist.mu, dist.variance, s)
    return value if np.ndim(value) else float(value)


def expected_abs_diff_iid(dist, policy=DEFAULT_POLICY):
    """E|X - Y| for two independent draws of dist"""
    if isinstance(dist, PoissonDist):
        return float(poisson_abs_diff_iid(dist.mu))
    return float(nb_abs_diff_iid(dist.mu, dist.variance, policy)[0])
