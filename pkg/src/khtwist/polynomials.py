"""Polynomial invariants computed without homology.

``kauffman_jones`` is the state sum for the unnormalised Jones polynomial;
circles are counted by label propagation over all states at once, sharing
no code with the cube.  ``homflypt`` runs the crossing-switch skein
recursion towards descending diagrams.
"""

from __future__ import annotations

from collections import Counter
from functools import reduce

import numpy as np

from .diagram import Diagram, relabel, smooth, switch
from .limits import check_cap
from .laurent import Q_PLUS_QINV, LaurentPoly, TwoVarPoly


def circle_counts(d: Diagram, chunk: int = 1 << 16) -> np.ndarray:
    """Number of circles in every state, indexed by the state's bit pattern.

    Bit i of the state index is the resolution of crossing i.
    """
    n = len(d.crossings)
    labels = d.edges
    pos = {lab: k for k, lab in enumerate(labels)}
    E = len(labels)
    edges = np.array([[pos[e] for e in x.edges] for x in d.crossings], dtype=np.int64).reshape(n, 4)
    total = 1 << n
    out = np.empty(total, dtype=np.int64)
    for start in range(0, total, chunk):
        states = np.arange(start, min(total, start + chunk), dtype=np.int64)
        comp = np.broadcast_to(np.arange(E, dtype=np.int64), (len(states), E)).copy()
        joins = []
        for i in range(n):
            bit = ((states >> i) & 1).astype(bool)
            a, b, c, e = edges[i]
            # resolution 0: (a,b),(c,e); resolution 1: (a,e),(b,c)
            joins.append((np.full(len(states), a), np.where(bit, e, b)))
            joins.append((np.where(bit, b, c), np.where(bit, c, e)))
        rows = np.arange(len(states))
        changed = True
        while changed:
            changed = False
            for u, v in joins:
                cu, cv = comp[rows, u], comp[rows, v]
                m = np.minimum(cu, cv)
                if np.any(cu != cv):
                    changed = True
                    comp[rows, u] = m
                    comp[rows, v] = m
            # pointer jumping keeps the number of sweeps small
            comp = np.take_along_axis(comp, comp, axis=1)
        out[start:start + len(states)] = (comp == np.arange(E)).sum(axis=1)
    return out + d.free_loops


def kauffman_jones(d: Diagram, cap: int | None = None) -> LaurentPoly:
    """Unnormalised Jones polynomial, with value q^-1 + q on the unknot."""
    check_cap(d, cap)
    n = len(d.crossings)
    if n == 0:
        return Q_PLUS_QINV ** d.free_loops
    loops = circle_counts(d)
    heights = np.array([bin(s).count("1") for s in range(1 << n)])
    tally = Counter(zip(heights.tolist(), loops.tolist()))
    total = LaurentPoly()
    powers: dict[int, LaurentPoly] = {}
    for (h, ell), cnt in tally.items():
        if ell not in powers:
            powers[ell] = Q_PLUS_QINV ** ell
        total = total + powers[ell].shift(h) * ((-1) ** h * cnt)
    sign = (-1) ** d.n_minus
    return total.shift(d.n_plus - 2 * d.n_minus) * sign


def normalized_jones(d: Diagram) -> LaurentPoly:
    """Jones polynomial with value 1 on the unknot, still in the variable q."""
    return divide_by_q_plus_qinv(kauffman_jones(d))


def divide_by_q_plus_qinv(p: LaurentPoly) -> LaurentPoly:
    rem = dict(p.coeffs)
    out: dict[int, int] = {}
    while rem:
        top = max(rem)
        c = rem.pop(top)
        if c == 0:
            continue
        out[top - 1] = c
        rem[top - 2] = rem.get(top - 2, 0) - c
        if rem[top - 2] == 0:
            del rem[top - 2]
        if rem and min(rem) < min(p.coeffs) - 1:
            raise ValueError("polynomial is not divisible by q + q^-1")
    return LaurentPoly(out)


# -- HOMFLYPT -------------------------------------------------------------------

A = TwoVarPoly({(1, 0): 1})
A_INV = TwoVarPoly({(-1, 0): 1})
Z = TwoVarPoly({(0, 1): 1})
ONE = TwoVarPoly({(0, 0): 1})
# (a - a^-1) / z, the value ratio between a split circle and nothing
DELTA = TwoVarPoly({(1, -1): 1, (-1, -1): -1})


def _first_bad_crossing(d: Diagram, seed: int) -> int | None:
    """First crossing met from below when walking from the base points.

    Components are walked in order of their lowest label, rotated by
    ``seed``; each starts from the edge ``seed`` steps after its lowest one.
    """
    comps = list(d.components)
    if seed:
        k = seed % len(comps)
        comps = comps[k:] + comps[:k]
    met: set[int] = set()
    for comp in comps:
        start = seed % len(comp)
        walk = comp[start:] + comp[:start]
        for lab in walk:
            i, pos = d.head(lab)
            if i in met:
                continue
            met.add(i)
            if pos in (0, 2):
                return i
    return None


def homflypt(d: Diagram, cap: int | None = None, seed: int = 0) -> TwoVarPoly:
    """HOMFLYPT polynomial with a P(L+) - a^-1 P(L-) = z P(L0), P(unknot) = 1.

    ``seed`` varies the base points of the descending-diagram recursion; the
    answer must not depend on it.
    """
    check_cap(d, cap)
    memo: dict = {}

    def rec(dd: Diagram) -> TwoVarPoly:
        key = _key(dd)
        if key in memo:
            return memo[key]
        bad = _first_bad_crossing(dd, seed) if dd.crossings else None
        if bad is None:
            out = reduce(lambda x, y: x * y, [DELTA] * (dd.num_components - 1), ONE)
        else:
            x = dd.crossings[bad]
            sw = rec(switch(dd, bad))
            zero = rec(smooth(dd, bad, x.oriented_resolution()).diagram)
            if x.sign > 0:
                out = sw.shift(-2, 0) + zero.shift(-1, 1)
            else:
                out = sw.shift(2, 0) - zero.shift(1, 1)
        memo[key] = out
        return out

    return rec(d)


def _key(d: Diagram):
    r = relabel(d)
    return (tuple((x.edges, x.sign) for x in r.crossings), r.free_loops)
