import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _support import (catalogue, catalogue_diagram, catalogue_table, fixture, fixture_table,
                      minor_gcd_factors, small_fixtures)
from khtwist.cube import build_complex
from khtwist.diagram import mirror, parse_braid, parse_pd
from khtwist.homology import (HomologyTable, compare_tables, compute, diagonal_width, homology_table,
                              jones_from_table, poincare_polynomial, smith_normal_form,
                              sparse_rank_and_torsion, tensor_unknots, unknot_table, unlink_table)
from khtwist.polynomials import kauffman_jones

small_int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


class TestSmith:
    def test_examples(self):
        assert smith_normal_form([[2, 0], [0, 3]]) == [1, 6]
        assert smith_normal_form([[2, 4], [6, 8]]) == [2, 4]
        assert smith_normal_form([[0, 0], [0, 0]]) == []
        assert smith_normal_form([[-5]]) == [5]
        assert smith_normal_form([]) == []

    def test_transforms(self):
        M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
        f, U, V = smith_normal_form(M, transforms=True)
        assert f == [2, 6, 12]
        D = _matmul(_matmul(U, M), V)
        assert D == [[2, 0, 0], [0, 6, 0], [0, 0, 12]]
        assert abs(round(np.linalg.det(np.array(U, float)))) == 1
        assert abs(round(np.linalg.det(np.array(V, float)))) == 1

    @settings(max_examples=150, deadline=None)
    @given(small_int_matrices)
    def test_against_minor_gcds(self, M):
        assert smith_normal_form(M) == minor_gcd_factors(M)

    def test_against_minor_gcds_fixed_seed(self):
        rng = random.Random(7)
        for _ in range(200):
            m, n = rng.randint(1, 4), rng.randint(1, 4)
            M = [[rng.choice([0, 0, 1, -1, 2, 3, -4, 6]) for _ in range(n)] for _ in range(m)]
            assert smith_normal_form(M) == minor_gcd_factors(M)

    @settings(max_examples=60, deadline=None)
    @given(small_int_matrices)
    def test_sparse_agrees_with_dense(self, M):
        rows, cols, vals = [], [], []
        for i, row in enumerate(M):
            for j, v in enumerate(row):
                if v:
                    rows.append(i), cols.append(j), vals.append(v)
        f = smith_normal_form(M)
        assert sparse_rank_and_torsion((len(M), len(M[0])), rows, cols, vals) == (
            len(f), [x for x in f if x > 1])


class TestTable:
    def test_normalisation(self):
        t = HomologyTable({(0, 1): (0, ()), (1, 3): (2, (3, 1)), (2, 5): (0, (2,))})
        assert t.entries == {(1, 3): (2, (3,)), (2, 5): (0, (2,))}
        with pytest.raises(ValueError):
            HomologyTable({(0, 0): (0, (2, 3))})

    def test_json_round_trip(self):
        t = fixture_table("8_8")
        again = HomologyTable.from_json(t.to_json())
        assert again == t and again.label == t.label
        assert t.to_json() == again.to_json()

    def test_format(self):
        text = unknot_table().format()
        assert text.splitlines()[0].split() == ["u\\q", "-1", "1"]
        assert HomologyTable().format() == "(zero)"
        assert "T2" in fixture_table("3_1").format() or "T2" in fixture_table("trefoil_left").format()

    def test_unknot_and_unlink(self):
        assert compute(parse_pd("U[1]")) == unknot_table()
        for name in ("unknot_kink_neg", "unknot_kink_pos", "unknot_two_kinks"):
            assert fixture_table(name) == unknot_table()
        assert fixture_table("unlink2") == unlink_table(2)
        assert compute(parse_braid("s1 -s1", 2)) == unlink_table(2)

    def test_right_trefoil_golden(self):
        t = compute(parse_braid("s1 s1 s1", 2))
        assert t.entries == {(0, 1): (1, ()), (0, 3): (1, ()), (2, 5): (1, ()),
                             (3, 7): (0, (2,)), (3, 9): (1, ())}

    def test_left_trefoil_is_mirror(self):
        right = compute(parse_braid("s1 s1 s1", 2))
        left = fixture_table("trefoil_left")
        assert left.free_ranks() == right.mirrored_ranks()
        # torsion moves down one homological degree under mirroring
        assert left.entries[(-2, -7)] == (0, (2,))

    def test_jones_from_table(self):
        for name in small_fixtures(8):
            assert jones_from_table(fixture_table(name)) == kauffman_jones(fixture(name))

    def test_poincare(self):
        p = poincare_polynomial(unlink_table(2))
        assert dict(p.items()) == {(0, -2): 1, (0, 0): 2, (0, 2): 1}

    def test_compare(self):
        a = fixture_table("4_1")
        assert compare_tables(a, a).equal
        cmp = compare_tables(a, fixture_table("5_2"))
        assert not cmp.equal and cmp.format().startswith("different")

    def test_diagonal_width(self):
        assert diagonal_width(fixture_table("4_1")) == 2
        assert diagonal_width(fixture_table("8_8")) == 2
        assert diagonal_width(HomologyTable()) == 0
        assert diagonal_width(fixture_table("10_129")) == 2


class TestInvariance:
    @pytest.mark.parametrize("name", ["4_1", "5_2", "6_1", "trefoil_left"])
    def test_relabelling(self, name):
        d = fixture(name)
        perm = list(range(1, 2 * len(d.crossings) + 1))
        random.Random(3).shuffle(perm)
        table = dict(zip(sorted({e for x in d.crossings for e in x.edges}), perm))
        text = " ".join(f"X[{','.join(str(table[e]) for e in x.edges)}]" for x in d.crossings)
        assert compute(parse_pd(text)) == fixture_table(name)

    @pytest.mark.parametrize("name", ["3_1", "6_3", "8_9"])
    def test_crossing_order(self, name):
        d = fixture(name)
        text = "\n".join(f"X[{','.join(map(str, x.edges))}]" for x in reversed(d.crossings))
        assert compute(parse_pd(text)) == fixture_table(name)

    def test_braid_moves(self):
        # Markov stabilisation and a braid relation on the same closure
        base = compute(parse_braid("s1 s1 s1", 2))
        assert compute(parse_braid("s1 s1 s1 s2", 3)) == base
        assert compute(parse_braid("s1 s2 s1 s2 -s1", 3)) == compute(parse_braid("s2 s1 s2 s2 -s1", 3))

    @pytest.mark.parametrize("name", [n for n in small_fixtures(10) if n != "unknot"])
    def test_mirror_duality(self, name):
        """Free ranks reflect; torsion in degree u moves to degree 1-u."""
        t = fixture_table(name)
        m = compute(mirror(fixture(name)))
        assert m.free_ranks() == t.mirrored_ranks()
        tors = {(u, q): x for (u, q), (_, x) in t.entries.items() if x}
        mtors = {(1 - u, -q): x for (u, q), (_, x) in m.entries.items() if x}
        assert tors == mtors


class TestEngines:
    def test_workers(self):
        d = fixture("8_9")
        assert compute(d, workers=2) == fixture_table("8_9")

    def test_rational(self):
        t = compute(fixture("6_1"), rational=True)
        assert all(not x for _, x in t.entries.values())
        assert t.free_ranks() == fixture_table("6_1").free_ranks()

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            compute(fixture("3_1"), engine="magic")

    def test_tensor_unknots(self):
        t = fixture_table("trefoil_left")
        d = parse_pd("\n".join(f"X[{','.join(map(str, x.edges))}]" for x in fixture("trefoil_left").crossings)
                     + "\nU[1]")
        assert compute(d) == tensor_unknots(t, 1)
        assert tensor_unknots(unknot_table(), 1) == unlink_table(2)
        assert tensor_unknots(unknot_table(), 2) == unlink_table(3)

    def test_tensor_merges_torsion(self):
        t = HomologyTable({(0, 0): (0, (2,)), (0, 2): (0, (3,))})
        assert tensor_unknots(t, 1).entries[(0, 1)] == (0, (6,))

    def test_homology_of_complex(self):
        cx = build_complex(fixture("4_1"))
        assert homology_table(cx, label="x").label == "x"


@pytest.mark.parametrize("name", sorted(k for k in catalogue() if len(fixture(k).crossings) <= 12))
def test_matches_published_tables(name):
    assert compute(catalogue_diagram(name), cap=14) == catalogue_table(name)
