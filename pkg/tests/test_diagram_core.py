import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from diagram_core import (ChordDiagram, ChordDiagramError, DuplicateEndpoint, IncompleteMatching,
                          InvalidSize, OutOfRange, Rng, SelfLoop, catalan, chord_set_probability,
                          double_factorial, enumerate_all, from_pairs, num_diagrams, sample_uniform)


def test_counts():
    assert [num_diagrams(n) for n in range(0, 6)] == [1, 1, 3, 15, 105, 945]
    assert double_factorial(-1) == 1
    assert double_factorial(7) == 105
    assert [catalan(n) for n in range(1, 6)] == [1, 2, 5, 14, 42]
    with pytest.raises(InvalidSize):
        num_diagrams(-1)


def test_from_pairs_round_trip(example_diagram):
    assert example_diagram.n == 6
    assert example_diagram.partner_of(1) == 8
    assert example_diagram.partner_of(12) == 11
    assert example_diagram.chords() == [(1, 8), (2, 9), (3, 4), (5, 7), (6, 10), (11, 12)]
    assert ChordDiagram.from_dict(example_diagram.to_dict()) == example_diagram


def test_pair_order_is_irrelevant():
    assert from_pairs([(4, 3), (2, 1)]) == from_pairs([(1, 2), (3, 4)])


@pytest.mark.parametrize("pairs, error", [
    ([(1, 1), (2, 3)], SelfLoop),
    ([(1, 2), (3, 5)], OutOfRange),
    ([(1, 2), (2, 3)], DuplicateEndpoint),
    ([(1, 2), (3, 4)], IncompleteMatching),
])
def test_from_pairs_rejects(pairs, error):
    n = 3 if error is IncompleteMatching else None
    with pytest.raises(error):
        from_pairs(pairs, n=n)


def test_invalid_partner_tuple():
    with pytest.raises(ChordDiagramError):
        ChordDiagram((1, 0, 2))
    with pytest.raises(ChordDiagramError):
        ChordDiagram((1, 0, -1, 2))


def test_wrap_and_has_chord():
    d = from_pairs([(1, 4), (2, 3)])
    assert d.wrap(5) == 1
    assert d.wrap(0) == 4
    assert d.has_chord(4, 5)
    assert d.has_chord(2, 3)
    assert not d.has_chord(1, 2)


def test_enumeration_order_n2():
    assert [d.chords() for d in enumerate_all(2)] == [
        [(1, 2), (3, 4)],
        [(1, 3), (2, 4)],
        [(1, 4), (2, 3)],
    ]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_is_complete(n):
    diagrams = list(enumerate_all(n))
    assert len(diagrams) == num_diagrams(n)
    assert len(set(diagrams)) == len(diagrams)


def test_sampling_is_reproducible():
    assert sample_uniform(8, Rng(42, 3)) == sample_uniform(8, Rng(42, 3))

    rng_a, rng_b = Rng(42, 0), Rng(42, 1)
    draws_a = [sample_uniform(10, rng_a) for _ in range(5)]
    draws_b = [sample_uniform(10, rng_b) for _ in range(5)]
    assert draws_a != draws_b


def test_sample_n1():
    assert sample_uniform(1, Rng(0)).chords() == [(1, 2)]


def test_rng_rejects_bad_seed():
    with pytest.raises(InvalidSize):
        Rng(-1)
    with pytest.raises(InvalidSize):
        Rng(2 ** 64)
    assert Rng(5).spawn(2) == Rng(5, 2)


def test_sampling_is_uniform_n3():
    rng = Rng(20240101, 0)
    counts = Counter(sample_uniform(3, rng) for _ in range(15000))
    assert len(counts) == 15
    observed = [counts[d] for d in enumerate_all(3)]
    assert stats.chisquare(observed).pvalue > 1e-6


def test_chord_set_probability():
    assert chord_set_probability(3, 1) == Fraction(1, 5)
    assert chord_set_probability(3, 3) == Fraction(1, 15)
    with pytest.raises(InvalidSize):
        chord_set_probability(3, 4)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 15), seed=st.integers(0, 2 ** 32), stream=st.integers(0, 100))
def test_samples_are_perfect_matchings(n, seed, stream):
    d = sample_uniform(n, Rng(seed, stream))
    points = sorted(p for chord in d.chords() for p in chord)
    assert points == list(range(1, 2 * n + 1))
    assert all(d.partner_of(d.partner_of(i)) == i for i in range(1, 2 * n + 1))


@pytest.mark.parametrize("chords", [[(1, 2)], [(2, 7), (4, 9)]])
def test_chord_set_frequency(chords):
    rng = Rng(99, 0)
    m = 40000
    hits = sum(all(d.has_chord(i, j) for i, j in chords)
               for d in (sample_uniform(5, rng) for _ in range(m)))
    p = float(chord_set_probability(5, len(chords)))
    assert abs(hits / m - p) <= 4 * math.sqrt(p * (1 - p) / m)


@pytest.mark.slow
def test_sampling_is_uniform_n3_large():
    rng = Rng(20240101, 1)
    counts = Counter(sample_uniform(3, rng) for _ in range(150000))
    observed = [counts[d] for d in enumerate_all(3)]
    assert stats.chisquare(observed).pvalue > 1e-6


@pytest.mark.slow
def test_sampling_frequencies_n2():
    rng = Rng(5, 0)
    m = 300000
    counts = Counter(sample_uniform(2, rng) for _ in range(m))
    se = math.sqrt((1 / 3) * (2 / 3) / m)
    for d in enumerate_all(2):
        assert abs(counts[d] / m - 1 / 3) <= 4 * se
