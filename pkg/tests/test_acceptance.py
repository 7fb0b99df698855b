"""Acceptance criteria 1 to 10.

Each test records one line ``criterion N PASS|FAIL ...`` that is printed in
the pytest terminal summary (and directly when run as a script).  All
comparisons are exact: homology tables, polynomials and matrices are
compared entry by entry over the integers, so the tolerance is zero.
"""

from __future__ import annotations

import functools
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

import _support
from _support import (catalogue_diagram, catalogue_table, family_diagram, family_table, fixture,
                      fixture_table, minor_gcd_factors, small_fixtures)
from khtwist.cube import build_complex, face_anticommutes, iter_faces
from khtwist.diagram import mirror, parse_braid, parse_pd
from khtwist.family import FamilySpec, TangleWord, check_compatible, gcd_annotation
from khtwist.homology import compute, diagonal_width, jones_from_table, smith_normal_form
from khtwist.les import build_les, check_rank_exactness, check_ses_chain_level
from khtwist.local import build_local_complex
from khtwist.polynomials import homflypt, kauffman_jones

TOLERANCE = "exact (integer equality, zero tolerance)"

# family diagrams with at most 12 crossings used by criteria 3 and 10
SMALL_FAMILIES = [
    "n=1 k=0", "n=1 k=1", "n=1 k=2", "n=2 k=0",
    'braid="-s1 s2 -s1 -s1 -s1" k=0', 'braid="-s1 s2 -s1 -s1 -s1" k=1',
    'n=1 T="+" U="-" k=0', 'n=1 T="-" U="" k=1',
]


@functools.lru_cache(maxsize=None)
def _les(name: str, index: int):
    return build_les(fixture(name), index)


def criterion(number: int, budget: str):
    """Record a PASS/FAIL line with the runtime for one criterion."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            status, note = "FAIL", ""
            try:
                result = fn(*args, **kwargs)
                status = "PASS"
                if isinstance(result, str):
                    note = f" [{result}]"
                return None
            finally:
                elapsed = time.perf_counter() - start
                line = (f"criterion {number} {status}: tolerance {TOLERANCE}; "
                        f"runtime {elapsed:.2f} s (budget {budget}){note}")
                _support.ACCEPTANCE_LINES[number] = line
                print(line)

        return run

    return wrap


RIGHT_TREFOIL_GOLDEN = {(0, 1): (1, ()), (0, 3): (1, ()), (2, 5): (1, ()),
                        (3, 7): (0, (2,)), (3, 9): (1, ())}


@criterion(1, "milliseconds")
def test_criterion_1_base_cases():
    assert compute(parse_pd("U[1]")).entries == {(0, -1): (1, ()), (0, 1): (1, ())}
    L = {(0, -2): (1, ()), (0, 0): (2, ()), (0, 2): (1, ())}
    assert compute(parse_pd("U[2]")).entries == L
    assert fixture_table("unlink2").entries == L
    assert compute(parse_braid("s1 -s1", 2)).entries == L
    return "unknot Z at (0,-1),(0,1); unlink Z_-2 + Z^2_0 + Z_2"


@criterion(2, "< 1 s")
def test_criterion_2_trefoil_golden():
    d = parse_braid("s1 s1 s1", 2)
    t = compute(d)
    # cross-validation before the golden is trusted
    assert jones_from_table(t) == kauffman_jones(d)
    text = "\n".join(f"X[{','.join(map(str, x.edges))}]" for x in d.crossings)
    for perm in ([2, 0, 1], [1, 2, 0], [2, 1, 0]):
        reordered = parse_pd(" ".join(text.split("\n")[i] for i in perm))
        assert compute(reordered) == t
    assert compute(d, engine="local") == t
    assert t.entries == RIGHT_TREFOIL_GOLDEN
    # the left-handed PD input gives the mirror
    assert fixture_table("trefoil_left").free_ranks() == t.mirrored_ranks()
    return "right trefoil; Z/2 at (3,7)"


@criterion(3, "< 1 min total")
def test_criterion_3_euler_characteristic():
    count = 0
    for name in small_fixtures(12):
        assert jones_from_table(fixture_table(name)) == kauffman_jones(fixture(name)), name
        count += 1
    for text in SMALL_FAMILIES:
        d = family_diagram(text)
        assert len(d.crossings) <= 12
        assert jones_from_table(family_table(text)) == kauffman_jones(d), text
        count += 1
    return f"{count} diagrams"


@criterion(4, "<= 5 min")
def test_criterion_4_kanenobu_triple():
    specs = ["n=1 k=0", "n=1 k=1", "n=1 k=2"]
    diagrams = [family_diagram(s) for s in specs]
    assert [len(d.crossings) for d in diagrams] == [8, 10, 12]
    # computed afresh (not from the shared cache) so the runtime is honest
    tables = [compute(d) for d in diagrams]
    assert tables[0] == tables[1] == tables[2]
    jones = [kauffman_jones(d) for d in diagrams]
    assert jones[0] == jones[1] == jones[2]
    assert homflypt(diagrams[0]) != homflypt(diagrams[1])
    return "8/10/12 crossings; HOMFLYPT k=0 != k=1"


@criterion(5, "<= 1 min")
def test_criterion_5_8_8_and_10_129():
    a, b = compute(fixture("8_8")), compute(fixture("10_129"))
    assert a == b
    assert kauffman_jones(fixture("8_8")) == kauffman_jones(fixture("10_129"))
    return "tables equal"


@criterion(6, "seconds")
def test_criterion_6_chain_level_ses():
    checked = 0
    for name in small_fixtures(10):
        d = fixture(name)
        for i in range(len(d.crossings)):
            inst = _les(name, i)
            verdict = check_ses_chain_level(inst)
            assert verdict.ok, (name, i, verdict.mismatches[:1])
            checked += 1
    inst = build_les(parse_braid("s1 s1 s1", 2), 2)
    assert not check_ses_chain_level(inst, c_override=inst.c + 1).ok
    assert not check_ses_chain_level(inst, c_override=inst.c - 1).ok
    return f"{checked} crossings; wrong-shift control fails"


@criterion(7, "seconds")
def test_criterion_7_rank_exactness():
    checked = 0
    rng = random.Random(2)
    for name in small_fixtures(10):
        d = fixture(name)
        for i in range(len(d.crossings)):
            inst = _les(name, i)
            assert check_rank_exactness(inst).exact, (name, i)
            term = rng.choice("ABC")
            slots = {"A": inst.table1, "B": inst.table, "C": inst.table0}[term].entries
            u, q = rng.choice(sorted(slots))
            if term == "A":
                u, q = u - inst.sub_shift[0], q - inst.sub_shift[1]
            elif term == "C":
                u, q = u - inst.quotient_shift[0], q - inst.quotient_shift[1]
            assert not check_rank_exactness(inst, perturb={(term, u, q): 1}).exact, (name, i, term)
            checked += 1
    return f"{checked} instances, each perturbation detected"


@criterion(8, "<= 15 min")
def test_criterion_8_infinite_family():
    n = 2
    tables = {}
    for l in (0, 1, 2):
        text = f"n={n} l={l}"
        d = family_diagram(text)
        assert len(d.crossings) == 12 + 4 * l
        tables[l] = family_table(text, "local")
    assert tables[0] == tables[1] == tables[2]
    # independent engine on the member the cube can reach
    assert family_table("n=2 l=0") == tables[0]
    gcds = {l: gcd_annotation(n, l) for l in (0, 1, 2, 3, 5)}
    assert gcds == {0: 5, 1: 1, 2: 1, 3: 1, 5: 5}
    return "n=2, l=0,1,2 at 12/16/20 crossings; gcd(l,5) = " + ", ".join(
        f"l={l}:{g}" for l, g in gcds.items())


QUADRUPLE = ["13n_164", "13n_922", "13n_161", "13n_795"]


@pytest.mark.slow
@criterion(9, "<= 60 min")
def test_criterion_9_thirteen_crossing_quadruple():
    tables = [compute(fixture(name), cap=13, label=name) for name in QUADRUPLE]
    assert all(t == tables[0] for t in tables)
    assert all(compute(fixture(name), engine="local") == tables[0] for name in QUADRUPLE)
    assert diagonal_width(tables[0]) == 3
    # the fixtures are checked against the published table as well
    assert compute(catalogue_diagram(QUADRUPLE[0]), engine="local") == catalogue_table(QUADRUPLE[0])
    return "four 13-crossing tables equal; support in 3 diagonals"


twist_words = st.lists(st.sampled_from(["+", "-", "L+", "L-"]), max_size=3).map(
    lambda g: TangleWord(tuple(g)))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(twist_words, twist_words, st.integers(1, 2), st.integers(-2, 2))
def _compatibility_agrees(T, U, n, k):
    report = check_compatible(FamilySpec(braid_n=n, tangle_T=T, tangle_U=U, twist_power=k))
    assert report.by_writhe == report.by_counts == report.compatible


@criterion(10, "< 5 min")
def test_criterion_10_property_suites():
    builds = 0
    for name in small_fixtures(12):
        assert build_complex(fixture(name)).check_d_squared(), name
        assert build_local_complex(fixture(name)).check_d_squared(), name
        builds += 2
    for text in SMALL_FAMILIES:
        assert build_complex(family_diagram(text)).check_d_squared(), text
        builds += 1

    rng = random.Random(10)
    for _ in range(200):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        M = [[rng.choice([0, 0, 0, 1, -1, 2, -2, 3, 4, 6]) for _ in range(n)] for _ in range(m)]
        assert smith_normal_form(M) == minor_gcd_factors(M), M

    faces = 0
    for name in small_fixtures(6):
        d = fixture(name)
        for f in iter_faces(len(d.crossings)):
            assert face_anticommutes(d, *f), (name, f)
            faces += 1
    for _ in range(20):
        word = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(2, 6))]
        d = parse_braid(word, 3)
        for f in iter_faces(len(word)):
            assert face_anticommutes(d, *f), (word, f)
            faces += 1

    _compatibility_agrees()

    for name in small_fixtures(10):
        t = fixture_table(name)
        assert compute(mirror(fixture(name))).free_ranks() == t.mirrored_ranks(), name
    return f"{builds} builds, 200 SNF cases, {faces} faces"


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
