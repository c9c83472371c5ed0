"""Chord diagrams: representation, validation, uniform sampling and enumeration.

Points are numbered 1..2n clockwise around the circle. Internally a diagram is
stored as a 0-based partner tuple, so ``partner[i - 1] == j - 1`` whenever
(i, j) is a chord. Positional arithmetic is modulo 2n.
"""
import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

logger = logging.getLogger("steinlab.diagram_core")


class InvalidSize(ValueError):
    """A size parameter (n, k, ...) is outside its admissible range"""


class ChordDiagramError(ValueError):
    """Pairs that do not describe a perfect matching of [2n]"""


class DuplicateEndpoint(ChordDiagramError):
    pass


class IncompleteMatching(ChordDiagramError):
    pass


class SelfLoop(ChordDiagramError):
    pass


class OutOfRange(ChordDiagramError):
    pass


def double_factorial(m):
    """m!! for odd or even m >= -1, with (-1)!! = 0!! = 1"""
    if m < -1:
        raise InvalidSize(f"double factorial undefined for {m}")
    return math.prod(range(m, 0, -2))


def num_diagrams(n):
    """Number of chord diagrams of size n, (2n-1)!!"""
    if n < 0:
        raise InvalidSize(f"n must be non-negative, got {n}")
    return double_factorial(2 * n - 1)


def catalan(n):
    """Catalan number, the count of non-crossing diagrams of size n"""
    return math.comb(2 * n, n) // (n + 1)


def _is_perfect_involution(partner):
    size = len(partner)
    for i, j in enumerate(partner):
        if not 0 <= j < size or j == i or partner[j] != i:
            return False
    return True


@dataclass(frozen=True)
class ChordDiagram:
    """A fixed-point free involution on [2n], immutable once built"""
    partner: tuple

    def __post_init__(self):
        object.__setattr__(self, "partner", tuple(int(p) for p in self.partner))
        if not self.partner or len(self.partner) % 2:
            raise ChordDiagramError("a diagram needs an even, positive number of points")
        if not _is_perfect_involution(self.partner):
            raise ChordDiagramError(f"not a fixed-point free involution: {self.partner}")

    @property
    def n(self):
        return len(self.partner) // 2

    @property
    def size(self):
        """Number of points, 2n"""
        return len(self.partner)

    def partner_of(self, point):
        """Partner of a 1-based point, 1-based"""
        return self.partner[point - 1] + 1

    def wrap(self, point):
        """Map any integer onto [2n] modulo 2n"""
        return (point - 1) % self.size + 1

    def has_chord(self, i, j):
        return self.partner[self.wrap(i) - 1] == self.wrap(j) - 1

    def chords(self):
        """Sorted list of chords (i, j) with i < j, 1-based"""
        return [(i + 1, j + 1) for i, j in enumerate(self.partner) if i < j]

    def to_dict(self):
        return {"n": self.n, "chords": [list(c) for c in self.chords()]}

    @classmethod
    def from_dict(cls, data):
        return from_pairs([tuple(c) for c in data.get("chords", [])], n=data.get("n"))

    def __repr__(self):
        return f"ChordDiagram({self.chords()})"


def from_pairs(pairs, n=None):
    """
    Build a diagram from 1-based pairs, validating that they form a perfect
    matching of [2n]. When n is omitted it is taken to be len(pairs).
    """
    pairs = [tuple(p) for p in pairs]
    if n is None:
        n = len(pairs)
    if n < 1:
        raise InvalidSize("a chord diagram needs at least one chord")
    size = 2 * n
    partner = [-1] * size

    for pair in pairs:
        if len(pair) != 2:
            raise ChordDiagramError(f"not a pair: {pair}")
        i, j = (int(p) for p in pair)
        if i == j:
            raise SelfLoop(f"pair ({i},{j}) joins a point to itself")
        for p in (i, j):
            if not 1 <= p <= size:
                raise OutOfRange(f"point {p} outside [1, {size}]")
        for p in (i, j):
            if partner[p - 1] != -1:
                raise DuplicateEndpoint(f"point {p} appears in more than one pair")
        partner[i - 1] = j - 1
        partner[j - 1] = i - 1

    unmatched = [p + 1 for p, q in enumerate(partner) if q == -1]
    if unmatched:
        raise IncompleteMatching(f"points {unmatched} are unmatched")

    return ChordDiagram(tuple(partner))


@dataclass
class Rng:
    """
    Reproducible random stream: PCG64 seeded through
    numpy.random.SeedSequence(seed, spawn_key=(stream,)). Identical
    (seed, stream) pairs replay identical draws; distinct streams of one seed
    are statistically independent.
    """
    seed: int
    stream: int = 0
    _generator: np.random.Generator = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidSize(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream < 0:
            raise InvalidSize(f"stream must be non-negative, got {self.stream}")

    @property
    def generator(self):
        if self._generator is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    def spawn(self, stream):
        """A fresh stream of the same seed"""
        return Rng(self.seed, stream)


def sample_uniform(n, rng):
    """
    Uniform chord diagram of size n. The least unmatched point is matched to a
    uniformly chosen unmatched point, repeatedly; all n choices are drawn in a
    single call so a stream's output is fixed by (seed, stream).
    """
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    highs = np.arange(2 * n - 1, 0, -2)
    picks = rng.generator.integers(0, highs)

    pool = list(range(2 * n))
    partner = [0] * (2 * n)
    for pick in picks:
        a = pool.pop(0)
        b = pool.pop(int(pick))
        partner[a] = b
        partner[b] = a
    return ChordDiagram(tuple(partner))


def enumerate_all(n):
    """
    Every diagram of size n exactly once. Order: point 1 is matched to each
    candidate in increasing order, then the same rule recurses on the least
    unmatched point.
    """
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    size = 2 * n
    partner = [-1] * size

    def extend(first):
        while first < size and partner[first] != -1:
            first += 1
        if first == size:
            yield ChordDiagram(tuple(partner))
            return
        for other in range(first + 1, size):
            if partner[other] == -1:
                partner[first] = other
                partner[other] = first
                yield from extend(first + 1)
                partner[first] = -1
                partner[other] = -1

    yield from extend(0)


def chord_set_probability(n, k):
    """Probability that a uniform diagram of size n contains k given disjoint chords"""
    if n < 1 or not 1 <= k <= n:
        raise InvalidSize(f"need 1 <= k <= n, got n={n}, k={k}")
    return Fraction(1, math.prod(range(2 * n - 1, 2 * n - 2 * k, -2)))
