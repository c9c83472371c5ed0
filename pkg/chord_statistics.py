"""Statistics of a chord diagram: crossings, nestings, simple and length-j chords, components."""
import math
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from diagram_core import enumerate_all

logger = logging.getLogger("steinlab.chord_statistics")


class LengthOutOfRange(ValueError):
    """Chord length j outside 0 <= j <= n - 2"""


@dataclass
class DiagramStats:
    n: int
    crossings: int
    nestings: int
    simple_chords: int
    components: int
    length_counts: dict = field(default_factory=dict)

    def check(self):
        """Raise AssertionError if the statistics are mutually inconsistent"""
        assert self.crossings + self.nestings <= math.comb(self.n, 2)
        if self.n == 1:
            assert self.simple_chords == 2
        else:
            assert self.simple_chords <= self.n
        assert 1 <= self.components <= self.n
        return self

    def to_dict(self):
        return {
            "n": self.n,
            "crossings": self.crossings,
            "nestings": self.nestings,
            "simple_chords": self.simple_chords,
            "components": self.components,
            "length_counts": {str(j): c for j, c in sorted(self.length_counts.items())},
        }


class FenwickTree:
    """
    Prefix counts over indexes 1..max_index, all initially zero.
    """
    __slots__ = ("max_index", "tree")

    def __init__(self, max_index):
        assert max_index > 0
        self.max_index = max_index
        self.tree = [0] * (max_index + 1)

    def increment(self, index, v):
        j = index
        while j <= self.max_index:
            self.tree[j] += v
            j += j & -j

    def get_cumulative_frequency(self, index):
        j = index
        s = 0
        while j > 0:
            s += self.tree[j]
            j -= j & -j
        return s


def _relation(a, c, b, d):
    """Classify chords (a, c), (b, d) with a < c and b < d"""
    if a > b:
        a, c, b, d = b, d, a, c
    if b < c < d:
        return "crossing"
    if d < c:
        return "nesting"
    return "sequential"


def _pair_relations(d):
    chords = d.chords()
    for x in range(len(chords)):
        a, c = chords[x]
        for y in range(x + 1, len(chords)):
            b, e = chords[y]
            yield x, y, _relation(a, c, b, e)


def count_crossings_naive(d):
    """Crossing pairs of chords, by checking every pair"""
    return sum(1 for _, _, kind in _pair_relations(d) if kind == "crossing")


def count_crossings_fast(d):
    """
    Crossing pairs of chords in O(n log n). Sweeping the linearized diagram,
    closing a chord opened at o at position p crosses exactly the chords
    opened inside (o, p) that are still open.
    """
    size = d.size
    tree = FenwickTree(size)
    crossings = 0
    for p, q in enumerate(d.partner):
        if q > p:
            tree.increment(p + 1, 1)
        else:
            crossings += tree.get_cumulative_frequency(p) - tree.get_cumulative_frequency(q + 1)
            tree.increment(q + 1, -1)
    return crossings


def count_nestings(d):
    return sum(1 for _, _, kind in _pair_relations(d) if kind == "nesting")


def count_sequential_pairs(d):
    """Pairs of chords that neither cross nor nest"""
    return sum(1 for _, _, kind in _pair_relations(d) if kind == "sequential")


def _count_offset(d, offset):
    size = d.size
    partner = d.partner
    return sum(1 for i in range(size) if partner[i] == (i + offset) % size)


def count_simple_chords(d):
    """
    Positions i in [2n] with partner(i) = i + 1 (mod 2n). For n = 1 both
    positions qualify, so the single chord is counted twice.
    """
    return _count_offset(d, 1)


def count_length_j(d, j):
    """Positions i in [2n] with partner(i) = i + j + 1 (mod 2n), 0 <= j <= n - 2"""
    if not (0 <= j <= d.n - 2 or (j == 0 and d.n == 1)):
        raise LengthOutOfRange(f"length {j} outside [0, {d.n - 2}] for n={d.n}")
    return _count_offset(d, j + 1)


def count_components(d):
    """Connected components of the chord intersection graph"""
    edges = [(x, y) for x, y, kind in _pair_relations(d) if kind == "crossing"]
    rows = [x for x, _ in edges]
    cols = [y for _, y in edges]
    graph = csr_matrix((np.ones(len(edges), dtype=np.int8), (rows, cols)), shape=(d.n, d.n))
    components, _ = connected_components(graph, directed=False)
    return int(components)


def diagram_stats(d, js=None):
    """All statistics of one diagram; js selects the chord lengths to count"""
    if js is None:
        js = range(0, max(d.n - 1, 1))
    crossings = nestings = 0
    for _, _, kind in _pair_relations(d):
        if kind == "crossing":
            crossings += 1
        elif kind == "nesting":
            nestings += 1
    return DiagramStats(
        n=d.n,
        crossings=crossings,
        nestings=nestings,
        simple_chords=count_simple_chords(d),
        components=count_components(d),
        length_counts={j: count_length_j(d, j) for j in js},
    )


def crossing_mean_variance(n):
    """Exact mean n(n-1)/6 and variance n(n-1)(n+3)/45 of the crossing number"""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return Fraction(n * (n - 1), 6), Fraction(n * (n - 1) * (n + 3), 45)


def crossing_nesting_joint(n):
    """Exact joint counts N(k, l) of (crossings, nestings) over all diagrams of size n"""
    joint = Counter()
    for d in enumerate_all(n):
        joint[(count_crossings_naive(d), count_nestings(d))] += 1
    return dict(joint)
