"""The Khovanov chain complex of a diagram, built from the cube of resolutions.

States are integers whose bit i is the smoothing of crossing i.  In each
state the circles are ordered by their smallest edge label, with free loops
last.  A generator is a (state, mask) pair: circle j carries v+ when bit
``ell - 1 - j`` of the mask is set, so ascending masks enumerate the labels
lexicographically with v- before v+.

Gradings of a generator with p circles labelled v+::

    u = |s| - n_-
    q = (2p - ell) + |s| + n_+ - 2 n_-

The edge flipping bit i carries the sign (-1)^(number of 1-bits below i).
Differentials preserve q, so the complex is stored as one sparse matrix per
(u, q) slot, mapping slot (u, q) to slot (u + 1, q).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

from .diagram import SMOOTHING_PAIRS, Diagram, DiagramError, smooth
from .limits import CapExceeded, check_cap

Slot = tuple[int, int]
V_MINUS, V_PLUS = 0, 1


# -- states ---------------------------------------------------------------------

@dataclass(frozen=True)
class ResolutionState:
    bits: tuple[int, ...]
    circles: tuple[tuple[int, ...], ...]
    """Edge labels of each circle, sorted; free loops appear last as ``()``."""

    @property
    def height(self) -> int:
        return sum(self.bits)

    @property
    def ell(self) -> int:
        return len(self.circles)

    @property
    def index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def circle_of(self, label: int) -> int:
        for j, c in enumerate(self.circles):
            if label in c:
                return j
        raise KeyError(label)


class _Circles:
    """Circle decomposition of every state by union-find over edge labels."""

    def __init__(self, d: Diagram):
        self.d = d
        self.n = len(d.crossings)
        self.labels = d.edges
        self.pos = {lab: k for k, lab in enumerate(self.labels)}
        self.E = len(self.labels)
        self.ends = [[self.pos[e] for e in x.edges] for x in d.crossings]

    def of_state(self, s: int) -> tuple[list[int], int]:
        """Circle index of each edge position, and the number of circles."""
        parent = list(range(self.E))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, ends in enumerate(self.ends):
            for p, q in SMOOTHING_PAIRS[(s >> i) & 1]:
                ra, rb = find(ends[p]), find(ends[q])
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
        roots = [find(a) for a in range(self.E)]
        # the root is the smallest position, and positions follow label order
        order = {r: j for j, r in enumerate(sorted(set(roots)))}
        circ = [order[r] for r in roots]
        return circ, len(order) + self.d.free_loops

    def all_states(self):
        circ = np.empty((1 << self.n, self.E), dtype=np.int16)
        ell = np.empty(1 << self.n, dtype=np.int64)
        for s in range(1 << self.n):
            c, l = self.of_state(s)
            circ[s] = c
            ell[s] = l
        return circ, ell


def resolve(d: Diagram, bits: Sequence[int]) -> ResolutionState:
    bits = tuple(int(b) for b in bits)
    if len(bits) != len(d.crossings) or any(b not in (0, 1) for b in bits):
        raise DiagramError("need one 0/1 bit per crossing")
    s = sum(b << i for i, b in enumerate(bits))
    if not d.crossings:
        return ResolutionState(bits, ((),) * d.free_loops)
    circ, ell = _Circles(d).of_state(s)
    groups: dict[int, list[int]] = {}
    for k, c in enumerate(circ):
        groups.setdefault(c, []).append(d.edges[k])
    circles = tuple(tuple(groups[j]) for j in sorted(groups)) + ((),) * d.free_loops
    return ResolutionState(bits, circles)


# -- edge maps --------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeMap:
    """Elementary cobordism between adjacent states.

    ``kind`` is ``"merge"`` (``inputs`` two circles, ``outputs`` one) or
    ``"split"`` (one input, two outputs).  ``carry`` sends every untouched
    source circle to its target circle.
    """

    kind: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    carry: dict[int, int]
    crossing: int
    sign: int


def _edge_data(d: Diagram, circ_s, ell_s, circ_t, ell_t, i: int, s: int) -> EdgeMap:
    pos = [circ_s[k] for k in _crossing_positions(d, i)]
    pos_t = [circ_t[k] for k in _crossing_positions(d, i)]
    labelled_s = ell_s - d.free_loops
    labelled_t = ell_t - d.free_loops
    # first position of each source circle, for carrying untouched circles
    first = {}
    for k, cj in enumerate(circ_s):
        first.setdefault(cj, k)
    carry = {}
    if pos[0] != pos[2]:
        kind, ins, outs = "merge", (pos[0], pos[2]), (pos_t[0],)
    else:
        kind, ins, outs = "split", (pos[0],), (pos_t[0], pos_t[1])
    for j in range(labelled_s):
        if j not in ins:
            carry[j] = int(circ_t[first[j]])
    for f in range(d.free_loops):
        carry[labelled_s + f] = labelled_t + f
    sign = -1 if bin(s & ((1 << i) - 1)).count("1") % 2 else 1
    return EdgeMap(kind, tuple(int(x) for x in ins), tuple(int(x) for x in outs), carry, i, sign)


def _crossing_positions(d: Diagram, i: int) -> list[int]:
    labels = d.edges
    pos = {lab: k for k, lab in enumerate(labels)}
    return [pos[e] for e in d.crossings[i].edges]


def edge_map(d: Diagram, source: ResolutionState, target: ResolutionState) -> EdgeMap:
    diff = [i for i, (x, y) in enumerate(zip(source.bits, target.bits)) if x != y]
    if len(diff) != 1 or source.bits[diff[0]] != 0:
        raise DiagramError("states are not joined by a cube edge")
    i = diff[0]
    cs = _Circles(d)
    circ_s, ell_s = cs.of_state(source.index)
    circ_t, ell_t = cs.of_state(target.index)
    return _edge_data(d, circ_s, ell_s, circ_t, ell_t, i, source.index)


def apply_frobenius(tag: EdgeMap, labels: Sequence[int], target_ell: int) -> list[tuple[int, tuple[int, ...]]]:
    """Image of a labelling (tuple of V_MINUS/V_PLUS per circle) under m or Delta.

    Returns ``(coefficient, target labelling)`` pairs, without the edge sign.
    """
    base = [None] * target_ell
    for j, k in tag.carry.items():
        base[k] = labels[j]
    if tag.kind == "merge":
        x, y = (labels[j] for j in tag.inputs)
        if x == V_MINUS and y == V_MINUS:
            return []
        base[tag.outputs[0]] = V_PLUS if (x == V_PLUS and y == V_PLUS) else V_MINUS
        return [(1, tuple(base))]
    x = labels[tag.inputs[0]]
    k1, k2 = tag.outputs
    out = []
    if x == V_PLUS:
        for pair in ((V_MINUS, V_PLUS), (V_PLUS, V_MINUS)):
            img = list(base)
            img[k1], img[k2] = pair
            out.append((1, tuple(img)))
    else:
        img = list(base)
        img[k1] = img[k2] = V_MINUS
        out.append((1, tuple(img)))
    return sorted(out, key=lambda t: t[1])


# -- the complex ------------------------------------------------------------------

def _rank_table(ell: int) -> np.ndarray:
    """Index of each mask among the masks with the same popcount."""
    masks = np.arange(1 << ell)
    pops = _popcount(masks)
    out = np.empty(1 << ell, dtype=np.int64)
    seen = np.zeros(ell + 1, dtype=np.int64)
    for m in range(1 << ell):
        p = pops[m]
        out[m] = seen[p]
        seen[p] += 1
    return out


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    out = np.zeros_like(a)
    while np.any(a):
        out += a & 1
        a = a >> 1
    return out


@dataclass
class BigradedComplex:
    """Free bigraded complex: ``dims[(u, q)]`` and ``diffs[(u, q)]`` (slot to u+1)."""

    n_plus: int
    n_minus: int
    dims: dict[Slot, int]
    diffs: dict[Slot, sparse.csr_matrix]
    diagram: Diagram | None = None
    _basis: dict[Slot, list[tuple[int, int]]] | None = field(default=None, repr=False)

    def slots(self) -> list[Slot]:
        return sorted(self.dims)

    def differential(self, u: int, q: int) -> sparse.csr_matrix:
        """Matrix of the map from slot (u, q) to (u + 1, q), possibly empty."""
        if (u, q) in self.diffs:
            return self.diffs[(u, q)]
        return sparse.csr_matrix((self.dims.get((u + 1, q), 0), self.dims.get((u, q), 0)), dtype=np.int64)

    def total_rank(self) -> int:
        return sum(self.dims.values())

    def basis(self, u: int, q: int) -> list[tuple[int, int]]:
        """``(state, mask)`` pairs of slot (u, q), in matrix order."""
        if self._basis is None:
            raise ValueError("complex was built without basis bookkeeping")
        return self._basis.get((u, q), [])

    def check_d_squared(self) -> bool:
        for (u, q), m in self.diffs.items():
            nxt = self.diffs.get((u + 1, q))
            if nxt is None:
                continue
            prod = nxt @ m
            if prod.count_nonzero():
                return False
        return True

    def dump(self) -> str:
        """Dense listing of every nonzero differential, one slot per block."""
        lines = []
        for (u, q) in sorted(self.diffs):
            m = self.diffs[(u, q)]
            if not m.count_nonzero():
                continue
            lines.append(f"# d: ({u},{q}) -> ({u + 1},{q})  {m.shape[0]}x{m.shape[1]}")
            for row in m.toarray():
                lines.append(" ".join(f"{int(v):2d}" for v in row))
        return "\n".join(lines)


def build_complex(d: Diagram, cap: int | None = None, keep_basis: bool = False,
                  debug: bool = False) -> BigradedComplex:
    """Assemble the Khovanov complex of ``d``.

    Raises :class:`CapExceeded` above ``cap`` crossings (default 14, or the
    ``KH_CAP`` environment variable).  With ``debug`` the identity d^2 = 0 is
    checked before returning.
    """
    check_cap(d, cap)
    n = len(d.crossings)
    npl, nmi = d.n_plus, d.n_minus
    if n == 0:
        ell = d.free_loops
        dims: dict[Slot, int] = {}
        basis: dict[Slot, list] = {}
        for m in range(1 << ell):
            q = 2 * bin(m).count("1") - ell
            dims[(0, q)] = dims.get((0, q), 0) + 1
            basis.setdefault((0, q), []).append((0, m))
        return BigradedComplex(0, 0, dims, {}, d, basis if keep_basis else None)

    cs = _Circles(d)
    circ, ell = cs.all_states()
    heights = _popcount(np.arange(1 << n))
    max_ell = int(ell.max())
    ranks = {l: _rank_table(l) for l in range(max_ell + 1)}
    pops = {l: _popcount(np.arange(1 << l)) for l in range(max_ell + 1)}

    # block offsets: states ascending, then masks in rank order
    dims = {}
    offsets = np.zeros((1 << n, max_ell + 1), dtype=np.int64)
    for s in range(1 << n):
        h, l = int(heights[s]), int(ell[s])
        for p in range(l + 1):
            key = (h - nmi, 2 * p - l + h + npl - 2 * nmi)
            offsets[s, p] = dims.get(key, 0)
            dims[key] = dims.get(key, 0) + comb(l, p)

    positions = [_crossing_positions(d, i) for i in range(n)]
    free = d.free_loops
    coo: dict[Slot, list] = {}
    for s in range(1 << n):
        ls = int(ell[s])
        cs_s = circ[s]
        masks = np.arange(1 << ls, dtype=np.int64)
        src_pop = pops[ls]
        src_idx = offsets[s, src_pop] + ranks[ls]
        h = int(heights[s])
        bits = [(masks >> (ls - 1 - j)) & 1 for j in range(ls)]
        first = {}
        for k, cj in enumerate(cs_s.tolist()):
            first.setdefault(cj, k)
        for i in range(n):
            if (s >> i) & 1:
                continue
            t = s | (1 << i)
            lt = int(ell[t])
            ct = circ[t]
            sign = -1 if bin(s & ((1 << i) - 1)).count("1") % 2 else 1
            p = positions[i]
            ca, cc = int(cs_s[p[0]]), int(cs_s[p[2]])
            touched = {ca, cc}
            base = np.zeros(1 << ls, dtype=np.int64)
            for j in range(ls - free):
                if j in touched:
                    continue
                k = int(ct[first[j]])
                base |= bits[j] << (lt - 1 - k)
            for f in range(free):
                base |= bits[ls - free + f] << (lt - 1 - (lt - free + f))
            if ca != cc:
                k = int(ct[p[0]])
                b1, b2 = bits[ca], bits[cc]
                keep = (b1 | b2).astype(bool)
                tgt = base[keep] | ((b1 & b2)[keep] << (lt - 1 - k))
                cols = src_idx[keep]
            else:
                k1, k2 = int(ct[p[0]]), int(ct[p[1]])
                b = bits[ca].astype(bool)
                plus = base[b]
                t1 = plus | (1 << (lt - 1 - k2))
                t2 = plus | (1 << (lt - 1 - k1))
                tgt = np.concatenate([base[~b], t1, t2])
                cols = np.concatenate([src_idx[~b], src_idx[b], src_idx[b]])
                srcm = np.concatenate([masks[~b], masks[b], masks[b]])
            if ca != cc:
                srcm = masks[keep]
            rows = offsets[t, pops[lt][tgt]] + ranks[lt][tgt]
            qs = 2 * src_pop[srcm] - ls + h + npl - 2 * nmi
            if debug:
                qt = 2 * pops[lt][tgt] - lt + h + 1 + npl - 2 * nmi
                assert np.array_equal(qs, qt), "differential does not preserve q"
            for q in np.unique(qs).tolist():
                sel = qs == q
                coo.setdefault((h - nmi, q), []).append((rows[sel], cols[sel], sign))

    diffs = {}
    for key, parts in coo.items():
        r = np.concatenate([x[0] for x in parts])
        c = np.concatenate([x[1] for x in parts])
        v = np.concatenate([np.full(len(x[0]), x[2], dtype=np.int64) for x in parts])
        shape = (dims.get((key[0] + 1, key[1]), 0), dims[key])
        diffs[key] = sparse.csr_matrix((v, (r, c)), shape=shape, dtype=np.int64)

    basis = None
    if keep_basis:
        basis = {}
        for s in range(1 << n):
            h, l = int(heights[s]), int(ell[s])
            order = sorted(range(1 << l), key=lambda m: (bin(m).count("1"), m))
            for m in order:
                key = (h - nmi, 2 * bin(m).count("1") - l + h + npl - 2 * nmi)
                basis.setdefault(key, []).append((s, m))
    cx = BigradedComplex(npl, nmi, dims, diffs, d, basis)
    if debug and not cx.check_d_squared():
        raise AssertionError("d^2 != 0")
    return cx


def state_generator_counts(d: Diagram) -> dict[int, int]:
    """Sum of 2^ell over the states of each height (before grading shifts)."""
    n = len(d.crossings)
    cs = _Circles(d)
    out: dict[int, int] = {}
    for s in range(1 << n):
        _, l = cs.of_state(s)
        h = bin(s).count("1")
        out[h] = out.get(h, 0) + (1 << l)
    return out


def iter_faces(n: int) -> Iterator[tuple[int, int, int]]:
    """Square faces of the n-cube as (state, i, j) with bits i < j unset."""
    for s in range(1 << n):
        for i in range(n):
            if (s >> i) & 1:
                continue
            for j in range(i + 1, n):
                if not (s >> j) & 1:
                    yield s, i, j


def face_anticommutes(d: Diagram, s: int, i: int, j: int) -> bool:
    """Check that the two paths around one square face sum to zero."""
    cs = _Circles(d)
    states = {}
    for t in (s, s | 1 << i, s | 1 << j, s | 1 << i | 1 << j):
        states[t] = cs.of_state(t)

    def step(vec, src, k):
        tgt = src | 1 << k
        (c1, l1), (c2, l2) = states[src], states[tgt]
        tag = _edge_data(d, c1, l1, c2, l2, k, src)
        out: dict[tuple, int] = {}
        for lab, coeff in vec.items():
            for c, img in apply_frobenius(tag, lab, l2):
                out[img] = out.get(img, 0) + coeff * c * tag.sign
        return {k2: v for k2, v in out.items() if v}

    l0 = states[s][1]
    for m in range(1 << l0):
        lab = tuple((m >> (l0 - 1 - j2)) & 1 for j2 in range(l0))
        a = step(step({lab: 1}, s, i), s | 1 << i, j)
        b = step(step({lab: 1}, s, j), s | 1 << j, i)
        total = dict(a)
        for k2, v in b.items():
            total[k2] = total.get(k2, 0) + v
        if any(total.values()):
            return False
    return True


# -- the short exact sequence at a crossing -------------------------------------------

@dataclass
class SesSplit:
    """Sub/quotient pieces of C(d) at one crossing, matched with resolved complexes.

    ``sub_shift`` and ``quotient_shift`` are (du, dq) so that slot (u, q) of
    the piece corresponds to slot (u + du, q + dq) of the resolved complex.
    """

    index: int
    sign: int
    c: int
    sub_diagram: Diagram
    quotient_diagram: Diagram
    sub_shift: tuple[int, int]
    quotient_shift: tuple[int, int]
    sub_dims: dict[Slot, int]
    quotient_dims: dict[Slot, int]
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def ses_shifts(sign: int, c: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Grading shifts (sub, quotient) written as displacements of (u, q).

    Positive crossing: sub is Kh^{u-c-1}_{q-3c-2} of the 1-smoothing and the
    quotient Kh^u_{q-1} of the 0-smoothing.  Negative crossing: sub is
    Kh^u_{q+1} of the 1-smoothing, quotient Kh^{u-c}_{q-3c-1} of the 0-smoothing.
    """
    if sign > 0:
        return (-c - 1, -3 * c - 2), (0, -1)
    return (0, 1), (-c, -3 * c - 1)


def _circle_match(d: Diagram, sm, s_big: int, s_small: int, cs_big: _Circles, cs_small: _Circles):
    """Permutation sending circles of d's state to circles of the smoothed state."""
    circ_b, ell_b = cs_big.of_state(s_big)
    circ_s, ell_s = cs_small.of_state(s_small) if sm.diagram.crossings else ([], sm.diagram.free_loops)
    pos_small = {lab: k for k, lab in enumerate(sm.diagram.edges)}
    labelled_b = ell_b - d.free_loops
    labelled_s = ell_s - sm.diagram.free_loops
    perm = {}
    new_loops = 0
    groups: dict[int, list[int]] = {}
    for k, cj in enumerate(circ_b):
        groups.setdefault(cj, []).append(d.edges[k])
    for j in range(labelled_b):
        targets = {sm.edge_map[lab] for lab in groups[j]} - {None}
        if targets:
            lab = next(iter(targets))
            perm[j] = circ_s[pos_small[lab]]
        else:
            perm[j] = labelled_s + d.free_loops + new_loops
            new_loops += 1
    for f in range(d.free_loops):
        perm[labelled_b + f] = labelled_s + f
    return perm, ell_b, ell_s


def split_at_crossing(d: Diagram, index: int, c_override: int | None = None,
                      cap: int | None = None) -> SesSplit:
    """Split C(d) by the bit of crossing ``index`` and compare with C(d_0), C(d_1).

    The subcomplex (bit = 1) must equal C(d_1) up to the gauge
    (-1)^(number of 1-bits above ``index``) and the grading shift of
    :func:`ses_shifts`; the quotient (bit = 0) must equal C(d_0) exactly.
    ``c_override`` replaces the true c, as a negative control.
    """
    if not d.crossings:
        raise DiagramError("diagram has no crossing to split at")
    x = d.crossings[index]
    sm1, sm0 = smooth(d, index, 1), smooth(d, index, 0)
    c_true = (sm1 if x.sign > 0 else sm0).diagram.n_minus - d.n_minus
    c = c_true if c_override is None else c_override
    sub_shift, quot_shift = ses_shifts(x.sign, c)
    big = build_complex(d, cap=cap, keep_basis=True)
    mismatches: list[str] = []
    sub_dims: dict[Slot, int] = {}
    quot_dims: dict[Slot, int] = {}
    cs_big = _Circles(d)
    for sm, bitval, shift, dims_out in ((sm1, 1, sub_shift, sub_dims), (sm0, 0, quot_shift, quot_dims)):
        small = build_complex(sm.diagram, cap=cap, keep_basis=True)
        cs_small = _Circles(sm.diagram)
        index_small = {key: {g: k for k, g in enumerate(small.basis(*key))} for key in small.dims}
        maps: dict[Slot, tuple[list[int], list[int], list[int]]] = {}
        perm_cache = {}
        for key in sorted(big.dims):
            gens = big.basis(*key)
            keep, targets, signs = [], [], []
            for k, (s, m) in enumerate(gens):
                if (s >> index) & 1 != bitval:
                    continue
                low = s & ((1 << index) - 1)
                s_small = low | ((s >> (index + 1)) << index)
                if s not in perm_cache:
                    perm_cache[s] = _circle_match(d, sm, s, s_small, cs_big, cs_small)
                perm, lb, ls = perm_cache[s]
                m_small = 0
                for j in range(lb):
                    if (m >> (lb - 1 - j)) & 1:
                        m_small |= 1 << (ls - 1 - perm[j])
                tkey = (key[0] + shift[0], key[1] + shift[1])
                pos = index_small.get(tkey, {}).get((s_small, m_small))
                if pos is None:
                    mismatches.append(f"generator {(s, m)} in slot {key} has no partner in slot {tkey}")
                    continue
                keep.append(k)
                targets.append(pos)
                gauge = bin(s >> (index + 1)).count("1") % 2 if bitval == 1 else 0
                signs.append(-1 if gauge else 1)
            if keep:
                dims_out[key] = len(keep)
                maps[key] = (keep, targets, signs)
                tkey = (key[0] + shift[0], key[1] + shift[1])
                if small.dims.get(tkey, 0) != len(keep):
                    mismatches.append(f"slot {key}: {len(keep)} generators vs {small.dims.get(tkey, 0)} in {tkey}")
        if sum(dims_out.values()) != small.total_rank():
            mismatches.append("generator counts of the piece and the smoothed complex differ")
        if mismatches:
            continue
        for key, (keep, targets, signs) in maps.items():
            nxt = (key[0] + 1, key[1])
            if nxt not in maps:
                continue
            kn, tn, sn = maps[nxt]
            piece = big.differential(*key)[kn][:, keep].toarray()
            tkey = (key[0] + shift[0], key[1] + shift[1])
            ref = small.differential(*tkey).toarray()
            # reorder the small complex's matrix into the piece's basis
            ref = ref[np.ix_(tn, targets)] * np.outer(sn, signs)
            if not np.array_equal(piece, ref):
                mismatches.append(f"differential out of slot {key} differs from the smoothed complex")
    return SesSplit(index, x.sign, c, sm1.diagram, sm0.diagram, sub_shift, quot_shift,
                    sub_dims, quot_dims, mismatches)
