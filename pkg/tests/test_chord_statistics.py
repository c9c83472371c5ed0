import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from diagram_core import Rng, enumerate_all, from_pairs, num_diagrams, sample_uniform
from chord_statistics import (FenwickTree, LengthOutOfRange, count_components, count_crossings_fast,
                              count_crossings_naive, count_length_j, count_nestings,
                              count_sequential_pairs, count_simple_chords, crossing_mean_variance,
                              crossing_nesting_joint, diagram_stats)


def test_example_diagram(example_diagram):
    summary = diagram_stats(example_diagram).check()
    assert summary.crossings == 4
    assert summary.nestings == 4
    assert summary.components == 3
    assert summary.simple_chords == 2
    assert summary.length_counts[0] == 2
    assert summary.length_counts[1] == 1
    assert count_sequential_pairs(example_diagram) == 7


def test_single_chord_counts_twice():
    d = from_pairs([(1, 2)])
    assert count_simple_chords(d) == 2
    assert count_crossings_fast(d) == 0
    assert count_components(d) == 1


def test_wraparound_simple_chord():
    d = from_pairs([(1, 4), (2, 3)])
    assert count_simple_chords(d) == 2
    assert count_nestings(d) == 1


def test_length_out_of_range(example_diagram):
    with pytest.raises(LengthOutOfRange):
        count_length_j(example_diagram, 5)
    with pytest.raises(LengthOutOfRange):
        count_length_j(example_diagram, -1)


def test_fenwick_tree():
    tree = FenwickTree(8)
    for index in (1, 3, 3, 8):
        tree.increment(index, 1)
    assert tree.get_cumulative_frequency(2) == 1
    assert tree.get_cumulative_frequency(3) == 3
    assert tree.get_cumulative_frequency(8) == 4


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_crossing_moments_by_enumeration(n):
    values = [count_crossings_naive(d) for d in enumerate_all(n)]
    mean = Fraction(sum(values), len(values))
    variance = Fraction(sum(v * v for v in values), len(values)) - mean ** 2
    assert (mean, variance) == crossing_mean_variance(n)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_crossing_nesting_joint_is_symmetric(n):
    joint = crossing_nesting_joint(n)
    assert sum(joint.values()) == num_diagrams(n)
    for (k, l), count in joint.items():
        assert joint.get((l, k)) == count


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 40), seed=st.integers(0, 2 ** 32))
def test_counters_agree(n, seed):
    d = sample_uniform(n, Rng(seed))
    crossings = count_crossings_naive(d)
    assert count_crossings_fast(d) == crossings
    assert crossings + count_nestings(d) + count_sequential_pairs(d) == math.comb(n, 2)
    diagram_stats(d).check()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_fast_crossings_on_every_diagram(n):
    for d in enumerate_all(n):
        assert count_crossings_fast(d) == count_crossings_naive(d)


def test_components_of_nested_and_crossing_blocks():
    assert count_components(from_pairs([(1, 3), (2, 4), (5, 8), (6, 7)])) == 3
    assert count_components(from_pairs([(1, 4), (2, 6), (3, 5)])) == 1


@pytest.mark.slow
def test_fast_crossings_at_n200():
    rng = Rng(7)
    for _ in range(10 ** 4):
        d = sample_uniform(200, rng)
        assert count_crossings_fast(d) == count_crossings_naive(d)
