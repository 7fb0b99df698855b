import random

import pytest
from hypothesis import given, settings, strategies as st

from _support import family_table, fixture, fixture_table, small_fixtures
from khtwist.diagram import connected_sum, disjoint_union, parse_braid, parse_pd
from khtwist.homology import compute, homology_table, unknot_table
from khtwist.limits import CapExceeded
from khtwist.local import build_local_complex, crossing_order


@pytest.mark.parametrize("name", small_fixtures(12))
def test_agrees_with_cube_on_fixtures(name):
    assert fixture_table(name, "local") == fixture_table(name)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), min_size=1, max_size=9))
def test_agrees_with_cube_on_random_braids(word):
    d = parse_braid(word, 4)
    assert compute(d, engine="local") == compute(d)


def test_free_loops_are_tensored_back():
    assert compute(parse_pd("U[1]"), engine="local") == unknot_table()
    d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3] U[7]")
    assert compute(d, engine="local") == compute(d)


def test_split_and_connected_sums():
    a, b = fixture("trefoil_left"), fixture("4_1")
    for d in (disjoint_union(a, b), connected_sum(a, b, a.edges[0], b.edges[0])):
        assert compute(d, engine="local") == compute(d)


@pytest.mark.parametrize("name", ["6_3", "8_9"])
def test_order_does_not_matter(name):
    d = fixture(name)
    ref = fixture_table(name)
    rng = random.Random(11)
    for _ in range(3):
        order = list(range(len(d.crossings)))
        rng.shuffle(order)
        assert homology_table(build_local_complex(d, order=order)) == ref


def test_greedy_order_is_a_permutation():
    d = fixture("12a_1283")
    assert sorted(crossing_order(d)) == list(range(12))
    assert crossing_order(parse_pd("U[1]")) == []


def test_reduction_keeps_complex_small():
    stats = []
    cx = build_local_complex(fixture("8_9"), stats=stats)
    assert len(stats) == 8
    assert cx.check_d_squared()
    assert cx.total_rank() < 2 ** 8


def test_family_beyond_cube_range():
    t = family_table("n=2 k=4", "local")
    assert t == family_table("n=2 k=0", "local") == family_table("n=2 k=0")


def test_cap():
    with pytest.raises(CapExceeded):
        build_local_complex(fixture("12a_1283"), cap=10)
