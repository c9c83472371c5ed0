"""
Size-bias couplings for the crossing number and the simple-chord count, the
size-bias transform of an exact law, and the exact check that each coupling
realizes that transform.
"""
import math
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from diagram_core import ChordDiagram, ChordDiagramError, InvalidSize, enumerate_all, num_diagrams
from chord_statistics import count_crossings_fast, count_crossings_naive, count_simple_chords
from limitlab import Pmf, brute_force_pmf

logger = logging.getLogger("steinlab.sizebias")

# Sizes up to which verify_size_bias_exact finishes in minutes
EXACT_VERIFY_LIMITS = {"crossings": 4, "simple_chords": 5}


class ZeroMean(ValueError):
    pass


class InvalidQuadruple(ValueError):
    pass


@dataclass(frozen=True)
class Quadruple:
    """Points a < b < c < d of [2n]; a crossing at this index means chords (a, c) and (b, d)"""
    a: int
    b: int
    c: int
    d: int

    def check(self, n):
        if not 1 <= self.a < self.b < self.c < self.d <= 2 * n:
            raise InvalidQuadruple(f"{self.as_tuple()} is not increasing within [1, {2 * n}]")
        return self

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)


@dataclass
class CouplingOutcome:
    original: ChordDiagram
    coupled: ChordDiagram
    index: Union[Quadruple, int]
    stat_before: int
    stat_after: int

    @property
    def delta(self):
        return self.stat_after - self.stat_before


@dataclass
class VerificationReport:
    n: int
    statistic: str
    match: bool
    rows: list = field(default_factory=list)
    error: Optional[str] = None

    def to_dict(self):
        return {
            "n": self.n,
            "statistic": self.statistic,
            "match": self.match,
            "rows": [
                {"value": x, "coupled": str(c), "size_biased": str(s), "ok": ok}
                for x, c, s, ok in self.rows
            ],
            "error": self.error,
        }


def num_quadruples(n):
    return math.comb(2 * n, 4)


def iter_quadruples(n):
    """All quadruples of [2n] in colexicographic order"""
    for d in range(4, 2 * n + 1):
        for c in range(3, d):
            for b in range(2, c):
                for a in range(1, b):
                    yield Quadruple(a, b, c, d)


def sample_quadruple(n, generator):
    a, b, c, d = sorted(int(x) + 1 for x in generator.choice(2 * n, size=4, replace=False))
    return Quadruple(a, b, c, d)


def size_bias_pmf(p):
    """P(X^s = x) = x P(X = x) / E X"""
    mean = p.mean()
    if mean <= 0:
        raise ZeroMean("the size-bias transform needs a strictly positive mean")
    return Pmf({x: x * w / mean for x, w in p.items() if x > 0})


def couple_crossings(d, quadruple, rematch_partial=True, before=None):
    """
    Force a crossing at quadruple (a, b, c, d). Every chord meeting {a, b, c, d}
    is removed and (a, c), (b, d) are added. The freed outside partners R are
    then rematched: (pi(a), pi(c)) and (pi(b), pi(d)) when |R| = 4, the two
    points of R joined when |R| = 2, nothing when |R| = 0.

    With rematch_partial=False the |R| = 2 step is skipped, which leaves two
    points unmatched. `before` may carry the already known crossing number of d.
    """
    quadruple.check(d.n)
    a, b, c, e = (p - 1 for p in quadruple.as_tuple())
    if before is None:
        before = count_crossings_fast(d)
    pi = d.partner
    if pi[a] == c and pi[b] == e:
        return CouplingOutcome(d, d, quadruple, before, before)

    inside = {a, b, c, e}
    outside = {q: pi[q] for q in inside if pi[q] not in inside}
    partner = list(pi)
    for q in inside:
        partner[q] = -1
    for r in outside.values():
        partner[r] = -1
    partner[a], partner[c] = c, a
    partner[b], partner[e] = e, b

    if len(outside) == 4:
        for x, y in ((a, c), (b, e)):
            partner[pi[x]], partner[pi[y]] = pi[y], pi[x]
    elif len(outside) == 2 and rematch_partial:
        r, s = outside.values()
        partner[r], partner[s] = s, r

    coupled = ChordDiagram(tuple(partner))
    after = count_crossings_fast(coupled)
    assert abs(after - before) <= 4 * d.n
    return CouplingOutcome(d, coupled, quadruple, before, after)


def couple_simple(d, i):
    """
    Force the simple chord (i, i+1): chords (i, pi(i)) and (i+1, pi(i+1)) are
    replaced by (i, i+1) and (pi(i), pi(i+1)); every other chord stays.
    """
    i = d.wrap(i)
    j = d.wrap(i + 1)
    before = count_simple_chords(d)
    if d.has_chord(i, j):
        return CouplingOutcome(d, d, i, before, before)

    partner = list(d.partner)
    x, y = i - 1, j - 1
    px, py = partner[x], partner[y]
    partner[x], partner[y] = y, x
    partner[px], partner[py] = py, px
    coupled = ChordDiagram(tuple(partner))
    after = count_simple_chords(coupled)
    assert after >= 1
    return CouplingOutcome(d, coupled, i, before, after)


def coupling_increments(d, quadruples):
    """X(coupled) - X(d) for each quadruple, X the crossing number"""
    before = count_crossings_fast(d)
    return [couple_crossings(d, quadruple, before=before).delta for quadruple in quadruples]


def conditional_mean_increment(d, sample_size=None, generator=None):
    """
    E(X^s - X | pi): the average crossing increment over all quadruples, or
    over sample_size uniform quadruples (an unbiased estimate) when given.
    """
    if d.n < 2:
        raise InvalidSize("the crossing coupling needs n >= 2")
    if sample_size is None:
        increments = coupling_increments(d, iter_quadruples(d.n))
        return Fraction(sum(increments), num_quadruples(d.n))
    if generator is None:
        raise ValueError("subsampled mode needs a generator")
    sample = [sample_quadruple(d.n, generator) for _ in range(sample_size)]
    return sum(coupling_increments(d, sample)) / sample_size


def _crossing_coupled_law(n, coupler):
    counts = Counter()
    for d in enumerate_all(n):
        for quadruple in iter_quadruples(n):
            counts[count_crossings_naive(coupler(d, quadruple).coupled)] += 1
    return counts


def _simple_coupled_law(n, coupler):
    counts = Counter()
    for d in enumerate_all(n):
        for i in range(1, 2 * n + 1):
            counts[count_simple_chords(coupler(d, i).coupled)] += 1
    return counts


def verify_size_bias_exact(n, statistic, coupler=None):
    """
    Exact law of the coupled statistic over every (diagram, index) pair,
    compared as rationals with the size-bias transform of the brute-force law.
    Indexes are uniform: quadruples for crossings, positions for simple chords.
    """
    if statistic == "crossings":
        if n < 2:
            raise InvalidSize("the crossing coupling needs n >= 2")
        coupler = coupler or couple_crossings
        law_of, exact_stat = _crossing_coupled_law, count_crossings_naive
    elif statistic == "simple_chords":
        coupler = coupler or couple_simple
        law_of, exact_stat = _simple_coupled_law, count_simple_chords
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    if n > EXACT_VERIFY_LIMITS[statistic]:
        logger.warning(f"Exact size-bias check for {statistic} at n={n} enumerates "
                       f"{num_diagrams(n)} diagrams and may take very long")

    target = size_bias_pmf(brute_force_pmf(n, exact_stat))
    try:
        counts = law_of(n, coupler)
    except (ChordDiagramError, AssertionError) as e:
        logger.error(f"Coupling for {statistic} at n={n} produced an invalid diagram: {e}")
        return VerificationReport(n, statistic, False, error=f"invalid coupled diagram: {e}")

    total = sum(counts.values())
    rows = []
    for x in sorted(set(counts) | set(target.support)):
        coupled = Fraction(counts.get(x, 0), total)
        rows.append((x, coupled, target[x], coupled == target[x]))
    match = all(ok for *_, ok in rows)
    logger.info(f"Size-bias check {statistic} n={n}: {'match' if match else 'MISMATCH'}")
    return VerificationReport(n, statistic, match, rows)


@dataclass
class IncrementProfile:
    """Exact averages of the simple-chord indicator changes under couple_simple"""
    n: int
    adjacent: set
    other: set
    monotone_violations: int
    adjacent_survivors: int


def simple_increment_profile(n):
    """
    For each position i and each k != i, with X_k the simple-chord indicator at
    k before and X_k' after forcing position i:
      adjacent: the values of E(X_k - X_k') for k = i +/- 1;
      other: the values of E(X_k' - X_k) for the remaining k;
      monotone_violations: cases with X_k' < X_k for a non-adjacent k;
      adjacent_survivors: cases with X_k' = 1 for an adjacent k.
    """
    if n < 2:
        raise InvalidSize("the simple-chord profile needs n >= 2")
    size = 2 * n
    diagrams = list(enumerate_all(n))
    adjacent = Counter()
    other = Counter()
    violations = survivors = 0
    for d in diagrams:
        for i in range(1, size + 1):
            coupled = couple_simple(d, i).coupled
            for k in range(1, size + 1):
                if k == i:
                    continue
                was = int(d.has_chord(k, k + 1))
                now = int(coupled.has_chord(k, k + 1))
                if d.wrap(k) in (d.wrap(i - 1), d.wrap(i + 1)):
                    adjacent[(i, k)] += was - now
                    survivors += now
                else:
                    other[(i, k)] += now - was
                    violations += int(now < was)
    total = len(diagrams)
    return IncrementProfile(
        n=n,
        adjacent={Fraction(v, total) for v in adjacent.values()},
        other={Fraction(v, total) for v in other.values()},
        monotone_violations=violations,
        adjacent_survivors=survivors,
    )


def stein_poisson_coupling_bound(n):
    """Exact E|S + 1 - S^s| over uniform diagrams and uniform positions"""
    total = Fraction(0)
    count = 0
    for d in enumerate_all(n):
        for i in range(1, 2 * n + 1):
            outcome = couple_simple(d, i)
            total += abs(outcome.stat_before + 1 - outcome.stat_after)
            count += 1
    return total / count
