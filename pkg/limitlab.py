"""
Exact laws and distances: the crossing and simple-chord distributions, the
count of simple-chord-free diagrams, normal/Poisson reference laws,
Kolmogorov and total-variation distances, and the Stein bounds evaluated
numerically.

Exact distributions are carried as Fractions over Python integers; floats
appear only when comparing against a continuous or infinite reference law.
"""
import math
import logging
from bisect import bisect_right
from collections import Counter
from itertools import accumulate
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import special, stats

from diagram_core import InvalidSize, Rng, enumerate_all, num_diagrams, sample_uniform
from chord_statistics import count_crossings_naive, count_length_j, crossing_mean_variance

logger = logging.getLogger("steinlab.limitlab")

POISSON_TAIL = 1e-12
STEIN_NORMAL_CONSTANT = 12920
VARIANCE_TERM_CONSTANT = 432 ** 2


class InvalidPmf(ValueError):
    pass


class EmptySample(ValueError):
    pass


@dataclass
class Pmf:
    """Exact probability mass function on the non-negative integers"""
    weight: dict
    validate: bool = field(default=True, repr=False, compare=False)
    _running: Optional[list] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.weight = {int(x): Fraction(w) for x, w in sorted(self.weight.items())}
        if not self.validate:
            return
        if not self.weight:
            raise InvalidPmf("empty support")
        for x, w in self.weight.items():
            if x < 0:
                raise InvalidPmf(f"negative support point {x}")
            if w <= 0:
                raise InvalidPmf(f"non-positive weight {w} at {x}")
        total = sum(self.weight.values())
        if total != 1:
            raise InvalidPmf(f"weights sum to {total}, not 1")

    @classmethod
    def from_counts(cls, counts):
        """Normalize a histogram {value: count}; zero counts are dropped"""
        total = sum(counts.values())
        return cls({x: Fraction(c, total) for x, c in counts.items() if c})

    @property
    def support(self):
        return list(self.weight)

    def __getitem__(self, x):
        return self.weight.get(x, Fraction(0))

    def items(self):
        return self.weight.items()

    def mean(self):
        return sum(x * w for x, w in self.weight.items())

    def variance(self):
        mu = self.mean()
        return sum(x * x * w for x, w in self.weight.items()) - mu * mu

    def cdf(self, x):
        """P(X <= x), read from the running totals over the sorted support"""
        if self._running is None:
            self._running = list(accumulate(self.weight.values()))
        idx = bisect_right(self.support, x)
        return self._running[idx - 1] if idx else Fraction(0)

    def to_dict(self):
        return {str(x): f"{w.numerator}/{w.denominator}" for x, w in self.weight.items()}


@dataclass
class BoundReport:
    n: int
    term1: float
    term2: float
    total: float
    mode: str
    comparison: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    @property
    def dominates(self):
        return self.comparison is None or self.total >= self.comparison

    def to_dict(self):
        return {
            "n": self.n,
            "term1": self.term1,
            "term2": self.term2,
            "total": self.total,
            "mode": self.mode,
            "comparison": self.comparison,
            "metadata": self.metadata,
        }


@dataclass
class SamplingBudget:
    """Monte Carlo sizes for the two-stage variance estimator"""
    diagrams: int = 400
    quadruples: int = 64
    bootstrap: int = 200
    seed: int = 20240101
    stream: int = 0


@dataclass
class VarianceTerm:
    value: float
    method: str
    exact: Optional[Fraction] = None
    std_error: Optional[float] = None
    max_abs_increment: int = 0


def _poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = p.copy()
    out[:len(q)] += q
    return out


def _times_q_integer(poly, m):
    """poly * (1 + q + ... + q^(m-1)) through a sliding window of prefix sums"""
    padded = np.concatenate([poly, np.zeros(m - 1, dtype=object)])
    prefix = np.cumsum(padded)
    shifted = np.concatenate([np.zeros(m, dtype=object), prefix[:-m]])
    return prefix - shifted


def crossing_polynomial(n):
    """
    Touchard-Riordan coefficients T_{n,k}: the number of diagrams of size n
    with k crossings, as a list of integers indexed by k.

    Left-to-right over the linearized diagram, with the open chords as state:
    closing one of m open chords crosses the j chords opened after it and
    still open, j = 0..m-1, hence the factor 1 + q + ... + q^(m-1).
    """
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    size = 2 * n
    states = {0: np.array([1], dtype=object)}
    for step in range(size):
        remaining = size - step - 1
        nxt = {}
        for m, poly in states.items():
            if m + 1 <= remaining:
                nxt[m + 1] = _poly_add(nxt[m + 1], poly) if m + 1 in nxt else poly
            if m >= 1:
                closed = _times_q_integer(poly, m)
                nxt[m - 1] = _poly_add(nxt[m - 1], closed) if m - 1 in nxt else closed
        states = nxt
    coefficients = [int(c) for c in states[0]]
    while len(coefficients) > 1 and coefficients[-1] == 0:
        coefficients.pop()
    return coefficients


def crossing_pmf_exact(n):
    """Exact law of the crossing number X_n"""
    total = num_diagrams(n)
    return Pmf({k: Fraction(t, total) for k, t in enumerate(crossing_polynomial(n)) if t})


def cycle_matchings(length, k):
    """Ways to pick k pairwise non-adjacent edges of a cycle with `length` edges"""
    if k == 0:
        return 1
    if 2 * k > length:
        return 0
    return length * math.comb(length - k, k) // (length - k)


def _inclusion_exclusion_terms(n):
    """Integer numerators of e_k: c(2n, k) * (2n - 2k - 1)!!"""
    return [cycle_matchings(2 * n, k) * num_diagrams(n - k) for k in range(n + 1)]


def simple_chord_pmf_exact(n):
    """Exact law of the simple-chord count S_n"""
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    if n == 1:
        return Pmf({2: Fraction(1)})
    terms = _inclusion_exclusion_terms(n)
    total = num_diagrams(n)
    weight = {}
    for m in range(n + 1):
        count = sum((-1) ** (k - m) * math.comb(k, m) * terms[k] for k in range(m, n + 1))
        if count:
            weight[m] = Fraction(count, total)
    return Pmf(weight)


def simple_chord_free_count(n):
    """s(n): the number of diagrams of size n without a simple chord"""
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    if n == 1:
        return 0
    return sum((-1) ** k * t for k, t in enumerate(_inclusion_exclusion_terms(n)))


def scfree_bounds(n):
    """
    Lower and upper bounds on s(n) / (2n-1)!!:
    (exp(-1/(2n-1)) -/+ 10/n) / e.
    """
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    centre = math.exp(-1.0 / (2 * n - 1))
    return (centre - 10.0 / n) / math.e, (centre + 10.0 / n) / math.e


def length_j_pmf_exact(n, j):
    """Exact law of the length-j chord count, by enumeration (small n only)"""
    counts = Counter(count_length_j(d, j) for d in enumerate_all(n))
    return Pmf.from_counts(counts)


def normal_cdf(x):
    """Standard normal CDF, 0.5 * erfc(-x / sqrt(2))"""
    return float(0.5 * special.erfc(-x / math.sqrt(2.0)))


def poisson_pmf(lam, k):
    """exp(-lam) lam^k / k!, evaluated in the log domain"""
    if lam <= 0:
        raise ValueError(f"Poisson mean must be positive, got {lam}")
    if k < 0:
        return 0.0
    return float(np.exp(k * math.log(lam) - lam - special.gammaln(k + 1)))


def poisson_truncation_point(lam, tail=POISSON_TAIL):
    """Smallest K with P(Poisson(lam) > K) <= tail"""
    k = max(int(math.ceil(lam)), 0)
    while stats.poisson.sf(k, lam) > tail:
        k += 1
    return k


def dkw_radius(m, delta):
    """Radius r with P(sup |F_m - F| > r) <= delta"""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * m))


def kolmogorov_distance_to_normal(p, mu, sigma):
    """
    sup_x |F(x) - Phi((x - mu) / sigma)|. The supremum sits at an atom, either
    at F(x) or at the left limit F(x-).
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    mu = float(mu)
    sigma = float(sigma)
    distance = 0.0
    for x, w in p.items():
        phi = normal_cdf((x - mu) / sigma)
        at = p.cdf(x)
        distance = max(distance, abs(float(at) - phi), abs(float(at - w) - phi))
    assert 0.0 <= distance <= 1.0
    return distance


def empirical_kolmogorov(samples):
    """Kolmogorov distance between the empirical CDF of samples and N(0, 1)"""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise EmptySample("empirical Kolmogorov distance needs at least one sample")
    return float(stats.kstest(values, "norm").statistic)


def tv_distance_to_poisson(p, lam, tail=POISSON_TAIL):
    """
    Half the L1 distance between p and Poisson(lam). The Poisson mass beyond the
    truncation point K (at most `tail`) is added in full.
    """
    if lam <= 0:
        raise ValueError(f"Poisson mean must be positive, got {lam}")
    cutoff = max(max(p.support), poisson_truncation_point(lam, tail))
    total = 0.0
    for k in range(cutoff + 1):
        total += abs(float(p[k]) - poisson_pmf(lam, k))
    beyond = float(stats.poisson.sf(cutoff, lam))
    logger.debug(f"Poisson({lam}) truncated at {cutoff}, tail mass {beyond:.3e}")
    return 0.5 * (total + beyond)


def poisson_tv_between(lam1, lam2, tail=POISSON_TAIL):
    """d_TV(Poisson(lam1), Poisson(lam2))"""
    cutoff = max(poisson_truncation_point(lam1, tail), poisson_truncation_point(lam2, tail))
    ks = np.arange(cutoff + 1)
    diff = np.abs(stats.poisson.pmf(ks, lam1) - stats.poisson.pmf(ks, lam2)).sum()
    beyond = stats.poisson.sf(cutoff, lam1) + stats.poisson.sf(cutoff, lam2)
    return float(0.5 * (diff + beyond))


def tv_bound_simple(n):
    """Summands 2n/(2n-1)^2 and 8n/(2n-1)^2 of the simple-chord Poisson bound, and their total"""
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    scale = Fraction(1, (2 * n - 1) ** 2)
    first, second = 2 * n * scale, 8 * n * scale
    return first, second, first + second


def sb_variance_term(n, method="exact", budget=None):
    """
    Var(E[X^s - X | pi]) for the crossing coupling, an upper bound for the
    X-conditioned variance in the Stein bound.

    exact: every diagram of size n, every quadruple.
    monte_carlo: budget.diagrams uniform diagrams, budget.quadruples uniform
    quadruples each; the within-diagram noise is subtracted from the spread of
    the per-diagram means, and the standard error is bootstrapped over diagrams.
    """
    import sizebias

    if n < 2:
        raise InvalidSize(f"the crossing coupling needs n >= 2, got {n}")
    budget = budget or SamplingBudget()

    if method == "exact":
        quadruples = list(sizebias.iter_quadruples(n))
        total = first = second = 0
        worst = 0
        for d in enumerate_all(n):
            deltas = sizebias.coupling_increments(d, quadruples)
            worst = max(worst, max(abs(x) for x in deltas))
            delta = Fraction(sum(deltas), len(quadruples))
            total += 1
            first += delta
            second += delta * delta
        value = second / total - (first / total) ** 2
        logger.info(f"Exact variance term for n={n}: {value} over {total} diagrams")
        return VarianceTerm(float(value), "exact", exact=value, max_abs_increment=worst)

    if method != "monte_carlo":
        raise ValueError(f"unknown method {method!r}")

    if budget.diagrams < 2:
        raise InvalidSize(f"two-stage estimate needs 2 diagrams or more, got {budget.diagrams}")
    rng = Rng(budget.seed, budget.stream)
    q = budget.quadruples
    means = np.empty(budget.diagrams)
    within = np.empty(budget.diagrams)
    worst = 0
    for row in range(budget.diagrams):
        d = sample_uniform(n, rng)
        sample = [sizebias.sample_quadruple(n, rng.generator) for _ in range(q)]
        deltas = np.array(sizebias.coupling_increments(d, sample), dtype=float)
        worst = max(worst, int(np.abs(deltas).max()))
        means[row] = deltas.mean()
        within[row] = deltas.var(ddof=1) if q > 1 else 0.0

    def estimate(idx):
        return max(float(means[idx].var(ddof=1) - within[idx].mean() / q), 0.0)

    everything = np.arange(budget.diagrams)
    value = estimate(everything)
    replicates = [
        estimate(rng.generator.choice(everything, size=everything.size, replace=True))
        for _ in range(budget.bootstrap)
    ]
    std_error = float(np.std(replicates, ddof=1)) if budget.bootstrap > 1 else None
    logger.info(f"Monte Carlo variance term for n={n}: {value:.6g} (se {std_error})")
    return VarianceTerm(value, "monte_carlo", std_error=std_error, max_abs_increment=worst)


def stein_normal_bound(n, mode="theoretical", budget=None, method=None, exact_limit=60):
    """
    Evaluate 2 mu / sigma^2 sqrt(Var(E[X^s - X | .])) + 8 mu D^2 / sigma^3 for the
    crossing number.

    theoretical: mu <= n^2/6, sigma^2 >= n^3/45, Var <= 432^2 n and D = 4n, the
    almost-sure bound on |X^s - X|.
    empirical: exact mu and sigma, the variance term from sb_variance_term and D
    the largest |X^s - X| observed.

    comparison is the exact Kolmogorov distance of the standardized crossing
    number when n <= exact_limit.
    """
    if n < 2:
        raise InvalidSize(f"the Stein bound needs n >= 2, got {n}")
    metadata = {"second_term": "almost-sure bound" if mode == "theoretical" else "observed maximum"}

    if mode == "theoretical":
        mu = n * n / 6.0
        var = n ** 3 / 45.0
        term1 = 2.0 * mu / var * math.sqrt(VARIANCE_TERM_CONSTANT * n)
        term2 = 8.0 * mu * (4.0 * n) ** 2 / var ** 1.5
    elif mode == "empirical":
        mu_exact, var_exact = crossing_mean_variance(n)
        mu, var = float(mu_exact), float(var_exact)
        vt = sb_variance_term(n, method or ("exact" if n <= 5 else "monte_carlo"), budget)
        metadata.update({"variance_method": vt.method, "variance_term": vt.value,
                         "max_abs_increment": vt.max_abs_increment})
        term1 = 2.0 * mu / var * math.sqrt(vt.value)
        term2 = 8.0 * mu * vt.max_abs_increment ** 2 / var ** 1.5
    else:
        raise ValueError(f"unknown mode {mode!r}")

    comparison = None
    if n <= exact_limit:
        mu_exact, var_exact = crossing_mean_variance(n)
        comparison = kolmogorov_distance_to_normal(
            crossing_pmf_exact(n), mu_exact, math.sqrt(var_exact))

    assert term1 >= 0 and term2 >= 0
    return BoundReport(n, term1, term2, term1 + term2, mode, comparison, metadata)


def brute_force_pmf(n, statistic):
    """Histogram of statistic(d) over every diagram of size n"""
    return Pmf.from_counts(Counter(statistic(d) for d in enumerate_all(n)))


def brute_force_crossing_pmf(n):
    return brute_force_pmf(n, count_crossings_naive)
