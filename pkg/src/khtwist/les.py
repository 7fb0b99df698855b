"""Long exact sequences of Khovanov homology at a crossing.

Smoothing crossing x splits C(D) into the subcomplex A (bit x = 1, a
shifted copy of C(D_1)) and the quotient C (bit x = 0, a shifted copy of
C(D_0)).  The induced long sequence, for each q,

    ... -> A^u -> B^u -> C^u -> A^{u+1} -> ...

with B = Kh(D), is checked here at the level of ranks over Q, together
with the torsion consequences available when a neighbour is free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cube import SesSplit, ses_shifts, split_at_crossing
from .diagram import Diagram, DiagramError, smooth
from .homology import HomologyTable, compute

Slot = tuple[int, int]


@dataclass
class LesInstance:
    base: Diagram
    index: int
    sign: int
    c: int
    table: HomologyTable
    table0: HomologyTable
    table1: HomologyTable
    diagram0: Diagram
    diagram1: Diagram
    sub_shift: tuple[int, int]
    quotient_shift: tuple[int, int]

    @property
    def coherent(self) -> int:
        """Which smoothing keeps the orientation (0 for a positive crossing)."""
        return 0 if self.sign > 0 else 1

    def A(self, u: int, q: int) -> tuple[int, tuple[int, ...]]:
        du, dq = self.sub_shift
        return self.table1.entries.get((u + du, q + dq), (0, ()))

    def B(self, u: int, q: int):
        return self.table.entries.get((u, q), (0, ()))

    def C(self, u: int, q: int):
        du, dq = self.quotient_shift
        return self.table0.entries.get((u + du, q + dq), (0, ()))

    def q_values(self) -> list[int]:
        qs = {q for _, q in self.table.entries}
        qs |= {q - self.sub_shift[1] for _, q in self.table1.entries}
        qs |= {q - self.quotient_shift[1] for _, q in self.table0.entries}
        return sorted(qs)

    def u_range(self) -> tuple[int, int]:
        us = {u for u, _ in self.table.entries}
        us |= {u - self.sub_shift[0] for u, _ in self.table1.entries}
        us |= {u - self.quotient_shift[0] for u, _ in self.table0.entries}
        if not us:
            return 0, 0
        return min(us), max(us)

    def to_dict(self) -> dict:
        return {
            "crossing": self.index,
            "sign": self.sign,
            "c": self.c,
            "sub_shift": list(self.sub_shift),
            "quotient_shift": list(self.quotient_shift),
            "tables": {
                "base": json.loads(self.table.to_json())["homology"],
                "resolution0": json.loads(self.table0.to_json())["homology"],
                "resolution1": json.loads(self.table1.to_json())["homology"],
            },
        }


def build_les(d: Diagram, index: int, workers: int = 1, cap: int | None = None,
              tables: dict | None = None) -> LesInstance:
    """Compute the three homology tables and the grading shifts at crossing ``index``.

    ``tables`` may carry an already computed table of ``d`` under key ``"base"``.
    """
    if not d.crossings:
        raise DiagramError("diagram has no crossing")
    if not 0 <= index < len(d.crossings):
        raise DiagramError(f"crossing index {index} out of range")
    x = d.crossings[index]
    d0 = smooth(d, index, 0).diagram
    d1 = smooth(d, index, 1).diagram
    noncoherent = d1 if x.sign > 0 else d0
    c = noncoherent.n_minus - d.n_minus
    sub_shift, quot_shift = ses_shifts(x.sign, c)
    tables = tables or {}
    base = tables.get("base") or compute(d, workers=workers, cap=cap)
    t0 = compute(d0, workers=workers, cap=cap)
    t1 = compute(d1, workers=workers, cap=cap)
    return LesInstance(d, index, x.sign, c, base, t0, t1, d0, d1, sub_shift, quot_shift)


@dataclass
class QLine:
    q: int
    dims: list[int]
    labels: list[str]
    ranks: list[int]
    exact: bool


@dataclass
class ExactnessVerdict:
    exact: bool
    lines: list[QLine] = field(default_factory=list)

    @property
    def failures(self) -> list[int]:
        return [ln.q for ln in self.lines if not ln.exact]

    def format(self) -> str:
        out = [f"{'q':>5}  {'verdict':8} dims"]
        for ln in self.lines:
            out.append(f"{ln.q:>5}  {'exact' if ln.exact else 'FAIL':8} {' '.join(map(str, ln.dims))}")
        out.append("exact" if self.exact else "not exact at q = " + ", ".join(map(str, self.failures)))
        return "\n".join(out)

    def to_dict(self) -> dict:
        return {"exact": self.exact,
                "lines": [{"q": ln.q, "dims": ln.dims, "ranks": ln.ranks, "exact": ln.exact}
                          for ln in self.lines]}


def exactness_witness(dims: list[int]) -> tuple[bool, list[int]]:
    """Ranks forced on the maps of a finite sequence 0 -> V1 -> ... -> Vk -> 0.

    The map out of term i has rank dim V_i minus the rank coming in; the
    sequence can be exact iff every such rank is >= 0 and the last is 0.
    """
    ranks = []
    prev = 0
    for dim in dims:
        r = dim - prev
        ranks.append(r)
        prev = r
    ok = all(r >= 0 for r in ranks) and (not ranks or ranks[-1] == 0)
    return ok, ranks


def les_sequence(inst: LesInstance, q: int) -> tuple[list[int], list[str]]:
    lo, hi = inst.u_range()
    dims, labels = [], []
    for u in range(lo, hi + 1):
        for name, get in (("A", inst.A), ("B", inst.B), ("C", inst.C)):
            dims.append(get(u, q)[0])
            labels.append(f"{name}{u}")
    return dims, labels


def check_rank_exactness(inst: LesInstance, perturb: dict | None = None) -> ExactnessVerdict:
    """Decide for every q-line whether the rational long sequence can be exact.

    ``perturb`` maps ``(term, u, q)`` with term in "ABC" to a rank offset, for
    negative controls.
    """
    perturb = perturb or {}
    lines = []
    for q in inst.q_values():
        dims, labels = les_sequence(inst, q)
        lo, _ = inst.u_range()
        for (term, u, qq), delta in perturb.items():
            if qq == q:
                k = 3 * (u - lo) + "ABC".index(term)
                if 0 <= k < len(dims):
                    dims[k] += delta
        ok, ranks = exactness_witness(dims)
        lines.append(QLine(q, dims, labels, ranks, ok))
    return ExactnessVerdict(all(ln.exact for ln in lines), lines)


def forced_isomorphisms(inst: LesInstance) -> list[tuple[str, int, int]]:
    """Slots where a vanishing neighbour forces B^u_q to be isomorphic to A or C.

    Returns (partner, u, q) for B^u_q = C^u_q (A^u = A^{u+1} = 0) and for
    A^u_q = B^u_q (C^{u-1} = C^u = 0), over Q.
    """
    out = []
    lo, hi = inst.u_range()
    for q in inst.q_values():
        for u in range(lo - 1, hi + 2):
            if not inst.A(u, q)[0] and not inst.A(u + 1, q)[0]:
                out.append(("C", u, q))
            if not inst.C(u - 1, q)[0] and not inst.C(u, q)[0]:
                out.append(("A", u, q))
    return out


@dataclass
class TorsionCheck:
    slot: Slot
    partner: str
    base: tuple[int, ...]
    other: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.base == self.other


def torsion_transfer(inst: LesInstance) -> list[TorsionCheck]:
    """Torsion identifications valid in any long exact sequence.

    If A^u = 0 and A^{u+1} is free then tor B^u = tor C^u.  If C^{u-1} = 0
    and C^u is free then tor A^u = tor B^u.
    """
    checks = []
    lo, hi = inst.u_range()
    for q in inst.q_values():
        for u in range(lo, hi + 1):
            a0, a1 = inst.A(u, q), inst.A(u + 1, q)
            if a0 == (0, ()) and not a1[1]:
                checks.append(TorsionCheck((u, q), "C", inst.B(u, q)[1], inst.C(u, q)[1]))
            cm, c0 = inst.C(u - 1, q), inst.C(u, q)
            if cm == (0, ()) and not c0[1]:
                checks.append(TorsionCheck((u, q), "A", inst.B(u, q)[1], inst.A(u, q)[1]))
    return checks


def check_ses_chain_level(inst: LesInstance, c_override: int | None = None) -> SesSplit:
    """Exact matrix comparison of the sub/quotient pieces with the smoothed complexes."""
    return split_at_crossing(inst.base, inst.index, c_override=c_override)
