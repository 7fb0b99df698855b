"""Integral homology of bigraded complexes via Smith normal form.

Each differential is reduced on its own: unit pivots are eliminated
sparsely (cheapest pivot first, in the Markowitz sense), and whatever is
left is handed to a dense Smith normal form over Python integers.  Only
the rank and the invariant factors are kept, which is all the homology
needs::

    free(u, q) = dim C(u, q) - rank d_out - rank d_in
    torsion(u, q) = invariant factors > 1 of d_in
"""

from __future__ import annotations

import heapq
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cube import BigradedComplex
from .laurent import LaurentPoly, TwoVarPoly

Slot = tuple[int, int]


# -- Smith normal form ------------------------------------------------------------

def smith_normal_form(M, transforms: bool = False):
    """Invariant factors d1 | d2 | ... of an integer matrix.

    With ``transforms`` returns ``(factors, U, V)`` where ``U @ M @ V`` is the
    diagonal matrix of factors padded with zeros (all entries Python ints).
    Pivots are chosen with least absolute value.
    """
    A = [[int(v) for v in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row dst += f * row src
        if f:
            A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
            if U is not None:
                U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        if f:
            for row in A:
                row[dst] += f * row[src]
            if V is not None:
                for row in V:
                    row[dst] += f * row[src]

    factors = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                add_col(j, t, -(A[t][j] // p))
            rest = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, k, kind = min(rest)
                swap_rows(t, k) if kind == "r" else swap_cols(t, k)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if U is not None:
                U[t] = [-a for a in U[t]]
        factors.append(A[t][t])
        t += 1
    if transforms:
        return factors, U, V
    return factors


def sparse_rank_and_torsion(shape, rows, cols, vals) -> tuple[int, list[int]]:
    """Rank and invariant factors > 1 of a sparse integer matrix.

    Unit entries are eliminated with exact integer row operations, choosing
    the pivot that touches the fewest other entries.  The residue without
    unit entries goes to :func:`smith_normal_form`.
    """
    R: dict[int, dict[int, int]] = {}
    C: dict[int, set[int]] = {}
    for r, c, v in zip(rows, cols, vals):
        v = int(v)
        if not v:
            continue
        row = R.setdefault(int(r), {})
        c = int(c)
        row[c] = row.get(c, 0) + v
        if row[c] == 0:
            del row[c]
            C[c].discard(int(r))
        else:
            C.setdefault(c, set()).add(int(r))
    rank = 0
    heap = [(len(row), r) for r, row in R.items()]
    heapq.heapify(heap)
    dead: set[int] = set()
    while heap:
        length, r = heapq.heappop(heap)
        if r in dead or r not in R:
            continue
        row = R[r]
        if len(row) != length:
            heapq.heappush(heap, (len(row), r))
            continue
        if not row:
            del R[r]
            continue
        units = [c for c, v in row.items() if v in (1, -1)]
        if not units:
            continue  # stays for the dense phase
        pc = min(units, key=lambda c: len(C[c]))
        pv = row[pc]
        for r2 in list(C[pc]):
            if r2 == r:
                continue
            row2 = R[r2]
            f = row2[pc] * pv
            for c, v in row.items():
                nv = row2.get(c, 0) - f * v
                if nv:
                    if c not in row2:
                        C[c].add(r2)
                    row2[c] = nv
                else:
                    if c in row2:
                        del row2[c]
                        C[c].discard(r2)
            heapq.heappush(heap, (len(row2), r2))
        for c in row:
            C[c].discard(r)
        del C[pc]
        del R[r]
        rank += 1
    rest = {r: row for r, row in R.items() if row}
    if not rest:
        return rank, []
    cols_left = sorted({c for row in rest.values() for c in row})
    cidx = {c: k for k, c in enumerate(cols_left)}
    dense = []
    for r in sorted(rest):
        line = [0] * len(cols_left)
        for c, v in rest[r].items():
            line[cidx[c]] = v
        dense.append(line)
    factors = smith_normal_form(dense)
    return rank + len(factors), [f for f in factors if f > 1]


# -- homology tables -----------------------------------------------------------------

@dataclass
class HomologyTable:
    """``entries[(u, q)] = (free_rank, torsion)``, normalised (no empty slots)."""

    entries: dict[Slot, tuple[int, tuple[int, ...]]] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        clean = {}
        for (u, q), (rank, tors) in self.entries.items():
            tors = tuple(sorted(int(t) for t in tors if t > 1))
            for a, b in zip(tors, tors[1:]):
                if b % a:
                    raise ValueError(f"torsion {tors} at {(u, q)} is not a divisibility chain")
            if rank or tors:
                clean[(int(u), int(q))] = (int(rank), tors)
        self.entries = dict(sorted(clean.items()))

    def __eq__(self, other):
        return isinstance(other, HomologyTable) and self.entries == other.entries

    def rank(self, u: int, q: int) -> int:
        return self.entries.get((u, q), (0, ()))[0]

    def torsion(self, u: int, q: int) -> tuple[int, ...]:
        return self.entries.get((u, q), (0, ()))[1]

    def shifted(self, du: int, dq: int) -> "HomologyTable":
        return HomologyTable({(u + du, q + dq): v for (u, q), v in self.entries.items()}, self.label)

    def mirrored_ranks(self) -> dict[Slot, int]:
        return {(-u, -q): r for (u, q), (r, _) in self.entries.items() if r}

    def free_ranks(self) -> dict[Slot, int]:
        return {k: r for k, (r, _) in self.entries.items() if r}

    def diagonals(self) -> list[int]:
        """Sorted values of q - 2u carrying nonzero homology."""
        return sorted({q - 2 * u for (u, q) in self.entries})

    def to_json(self) -> str:
        rows = [{"q": q, "rank": r, "torsion": list(t), "u": u}
                for (u, q), (r, t) in self.entries.items()]
        return json.dumps({"homology": rows, "knot": self.label}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "HomologyTable":
        data = json.loads(text)
        return cls({(r["u"], r["q"]): (r["rank"], tuple(r["torsion"])) for r in data["homology"]},
                   data.get("knot", ""))

    def format(self) -> str:
        """Text grid: one row per u, one column per q, entries like ``1+T2``."""
        if not self.entries:
            return "(zero)"
        us = sorted({u for u, _ in self.entries})
        qs = sorted({q for _, q in self.entries})
        cells = {}
        for (u, q), (r, t) in self.entries.items():
            parts = [str(r)] if r else []
            parts += [f"T{x}" for x in t]
            cells[(u, q)] = "+".join(parts)
        width = max(4, max(len(c) for c in cells.values()) + 1)
        head = "u\\q".ljust(5) + "".join(str(q).rjust(width) for q in qs)
        lines = [head]
        for u in us:
            lines.append(str(u).ljust(5) + "".join(cells.get((u, q), ".").rjust(width) for q in qs))
        return "\n".join(lines)

    __str__ = format


def _reduce_one(args):
    key, shape, rows, cols, vals = args
    return key, sparse_rank_and_torsion(shape, rows, cols, vals)


def homology_table(cx: BigradedComplex, workers: int = 1, label: str = "",
                   rational: bool = False) -> HomologyTable:
    """Homology of ``cx``; ``workers > 1`` reduces differentials in parallel processes.

    With ``rational`` the torsion is dropped (ranks only).
    """
    jobs = []
    for key in sorted(cx.diffs):
        m = cx.diffs[key].tocoo()
        if m.nnz:
            jobs.append((key, m.shape, m.row, m.col, m.data))
    results: dict[Slot, tuple[int, list[int]]] = {}
    if workers > 1 and len(jobs) > 1:
        # largest jobs first so the pool stays busy
        jobs.sort(key=lambda j: -len(j[2]))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, res in pool.map(_reduce_one, jobs, chunksize=1):
                results[key] = res
    else:
        for job in jobs:
            key, res = _reduce_one(job)
            results[key] = res
    entries = {}
    for (u, q), dim in cx.dims.items():
        r_out = results.get((u, q), (0, []))[0]
        r_in, tors = results.get((u - 1, q), (0, []))
        free = dim - r_out - r_in
        if free < 0:
            raise ArithmeticError(f"negative rank at {(u, q)}: is d^2 = 0?")
        entries[(u, q)] = (free, () if rational else tuple(tors))
    return HomologyTable(entries, label)


def poincare_polynomial(t: HomologyTable) -> TwoVarPoly:
    """Sum of rank * u^i q^j over the free parts."""
    return TwoVarPoly({k: r for k, (r, _) in t.entries.items()}, names=("u", "q"))


def jones_from_table(t: HomologyTable) -> LaurentPoly:
    """Graded Euler characteristic: the Poincare polynomial at u = -1."""
    return poincare_polynomial(t).specialize_first(-1)


@dataclass
class Comparison:
    equal: bool
    diff: list[tuple[Slot, tuple, tuple]]

    def format(self) -> str:
        if self.equal:
            return "equal"
        lines = ["different"]
        for slot, a, b in self.diff:
            lines.append(f"  {slot}: {_fmt_entry(a)} vs {_fmt_entry(b)}")
        return "\n".join(lines)


def _fmt_entry(e):
    r, t = e
    return "+".join(([str(r)] if r or not t else []) + [f"T{x}" for x in t]) or "0"


def compare_tables(a: HomologyTable, b: HomologyTable) -> Comparison:
    diff = []
    for key in sorted(set(a.entries) | set(b.entries)):
        ea = a.entries.get(key, (0, ()))
        eb = b.entries.get(key, (0, ()))
        if ea != eb:
            diff.append((key, ea, eb))
    return Comparison(not diff, diff)


def diagonal_width(t: HomologyTable) -> int:
    """Number of consecutive diagonals q - 2u (steps of 2) spanned by the support."""
    ds = t.diagonals()
    if not ds:
        return 0
    return (ds[-1] - ds[0]) // 2 + 1


def unknot_table() -> HomologyTable:
    return HomologyTable({(0, -1): (1, ()), (0, 1): (1, ())}, "unknot")


def unlink_table(components: int) -> HomologyTable:
    from math import comb

    return HomologyTable({(0, 2 * p - components): (comb(components, p), ())
                          for p in range(components + 1)}, f"unlink{components}")


def tensor_unknots(t: HomologyTable, loops: int) -> HomologyTable:
    """Table of the split union of ``t``'s link with ``loops`` crossingless circles."""
    entries = dict(t.entries)
    for _ in range(loops):
        acc: dict[Slot, tuple[int, list[int]]] = {}
        for (u, q), (r, tor) in entries.items():
            for dq in (-1, 1):
                old_r, old_t = acc.get((u, q + dq), (0, []))
                acc[(u, q + dq)] = (old_r + r, old_t + list(tor))
        entries = {s: (r, tuple(f for f in smith_normal_form([[x if i == j else 0 for j in range(len(tor))]
                                                               for i, x in enumerate(tor)]) if f > 1))
                   for s, (r, tor) in acc.items()}
    return HomologyTable(entries, t.label)


ENGINES = ("cube", "local")


def compute(d, workers: int = 1, cap: int | None = None, label: str = "",
            rational: bool = False, engine: str = "cube") -> HomologyTable:
    """Build the complex of a diagram with the chosen engine and take its homology.

    ``cube`` is the full cube of resolutions; ``local`` adds crossings one at
    a time with delooping and Gaussian elimination (see :mod:`khtwist.local`).
    """
    if engine == "cube":
        from .cube import build_complex

        return homology_table(build_complex(d, cap=cap), workers=workers, label=label, rational=rational)
    if engine == "local":
        from .local import build_local_complex

        t = homology_table(build_local_complex(d, cap=cap), workers=workers, label=label, rational=rational)
        return tensor_unknots(t, d.free_loops)
    raise ValueError(f"unknown engine {engine!r}")
