"""Oriented planar link diagrams.

A diagram is stored in PD form.  Every crossing lists its four incident edge
labels counterclockwise, starting at the incoming end of the under-strand,
so positions 0 -> 2 carry the under-strand and positions 1, 3 the
over-strand.  A crossing is positive when the over-strand runs from
position 3 to position 1 (the usual right-handed convention: turning the
over-strand a quarter turn counterclockwise lines it up with the
under-strand).

The two smoothings of a crossing are fixed by positions alone:

* 0-smoothing joins positions (0, 1) and (2, 3);
* 1-smoothing joins positions (0, 3) and (1, 2).

With these conventions the 0-smoothing of a positive crossing, and the
1-smoothing of a negative one, is the oriented smoothing.

Raw PD tuples handed to :func:`orient` only need the geometric data: the
counterclockwise order and the under-strand at positions 0 and 2.  The
orientation is then fixed component by component and each crossing is
rotated by half a turn where needed, which keeps the smoothing types.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Slot = tuple[int, int]  # (crossing index, position)

SMOOTHING_PAIRS = {
    0: ((0, 1), (2, 3)),
    1: ((0, 3), (1, 2)),
}


class DiagramError(ValueError):
    """Malformed diagram input or an operation the diagram does not support."""


@dataclass(frozen=True)
class Crossing:
    edges: tuple[int, int, int, int]
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DiagramError(f"crossing sign must be +1 or -1, got {self.sign}")

    @property
    def over_in(self) -> int:
        """Position where the over-strand enters."""
        return 3 if self.sign > 0 else 1

    @property
    def over_out(self) -> int:
        return 1 if self.sign > 0 else 3

    def oriented_resolution(self) -> int:
        """The smoothing that respects orientation (0 for positive crossings)."""
        return 0 if self.sign > 0 else 1

    def __str__(self):
        a, b, c, d = self.edges
        return f"X[{a},{b},{c},{d}]"


@dataclass(frozen=True)
class Diagram:
    """An oriented link diagram with an explicit count of crossingless circles."""

    crossings: tuple[Crossing, ...] = ()
    free_loops: int = 0

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))
        if self.free_loops < 0:
            raise DiagramError("free_loops must be non-negative")
        heads: dict[int, Slot] = {}
        tails: dict[int, Slot] = {}
        for i, x in enumerate(self.crossings):
            for pos, label in enumerate(x.edges):
                if pos in (0, x.over_in):
                    if label in heads:
                        raise DiagramError(f"edge {label} enters two crossings")
                    heads[label] = (i, pos)
                else:
                    if label in tails:
                        raise DiagramError(f"edge {label} leaves two crossings")
                    tails[label] = (i, pos)
        if heads.keys() != tails.keys():
            bad = sorted(set(heads) ^ set(tails))
            raise DiagramError(f"edges {bad} do not close up consistently")
        object.__setattr__(self, "_heads", heads)
        object.__setattr__(self, "_tails", tails)

    # -- counts -----------------------------------------------------------
    def __len__(self):
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for x in self.crossings if x.sign > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for x in self.crossings if x.sign < 0)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def edges(self) -> list[int]:
        return sorted(self._heads)

    def head(self, label: int) -> Slot:
        """Slot where ``label`` enters a crossing."""
        return self._heads[label]

    def tail(self, label: int) -> Slot:
        return self._tails[label]

    def next_edge(self, label: int) -> int:
        i, pos = self._heads[label]
        return self.crossings[i].edges[(pos + 2) % 4]

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Edge cycles in traversal order, each starting from its lowest label.

        Free loops are not listed; see :attr:`num_components`.
        """
        seen: set[int] = set()
        comps = []
        for start in self.edges:
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            e = self.next_edge(start)
            while e != start:
                cycle.append(e)
                seen.add(e)
                e = self.next_edge(e)
            comps.append(tuple(cycle))
        return tuple(comps)

    @property
    def num_components(self) -> int:
        return len(self.components) + self.free_loops

    def component_of(self, label: int) -> int:
        for k, comp in enumerate(self.components):
            if label in comp:
                return k
        raise KeyError(label)

    def is_knot(self) -> bool:
        return self.num_components == 1

    def raw(self) -> list[tuple[int, int, int, int]]:
        return [x.edges for x in self.crossings]

    def __str__(self):
        return to_pd(self)


# -- orientation ------------------------------------------------------------

def _slot_table(raw: Sequence[Sequence[int]]) -> dict[int, list[Slot]]:
    table: dict[int, list[Slot]] = {}
    for i, x in enumerate(raw):
        for pos, label in enumerate(x):
            table.setdefault(label, []).append((i, pos))
    return table


def _other_slot(table, label, slot):
    a, b = table[label]
    return b if a == slot else a


def _trace_entries(raw, table, entry: Slot) -> list[Slot]:
    """Entry slots met when walking a component, starting by entering ``entry``."""
    out = []
    cur = entry
    while True:
        out.append(cur)
        i, pos = cur
        exit_slot = (i, (pos + 2) % 4)
        label = raw[i][exit_slot[1]]
        cur = _other_slot(table, label, exit_slot)
        if cur == entry:
            return out


def _default_entry(raw, comp_slots: Iterable[Slot], comp_labels: set[int]) -> Slot:
    slots = sorted(comp_slots)
    under = [s for s in slots if s[1] in (0, 2)]
    if under:
        i = under[0][0]
        # the listed first edge of the crossing is taken as incoming
        for s in under:
            if s[0] == i and s[1] == 0:
                return s
        return (i, 2)
    # over-only component: travel towards increasing edge labels
    i = slots[0][0]
    labels = sorted(comp_labels)
    b, d = raw[i][1], raw[i][3]
    nxt = labels[(labels.index(b) + 1) % len(labels)]
    return (i, 1) if nxt == d else (i, 3)


def orient(raw: Sequence[Sequence[int]], free_loops: int = 0,
           prefer: Mapping[int, Slot] | None = None) -> Diagram:
    """Orient raw PD data and return the canonical :class:`Diagram`.

    ``prefer`` maps edge labels to the slot the edge should run into.  For
    each component the lowest preferred label present decides its
    direction; components without one follow the PD reading (the first
    listed edge at the lowest crossing the component passes under is
    incoming).
    """
    raw = [tuple(x) for x in raw]
    if any(len(x) != 4 for x in raw):
        raise DiagramError("every crossing needs exactly four edge labels")
    table = _slot_table(raw)
    bad = sorted(lab for lab, s in table.items() if len(s) != 2)
    if bad:
        raise DiagramError("edge labels " + ",".join(map(str, bad)) + " unbalanced")
    prefer = prefer or {}

    entries: set[Slot] = set()
    visited: set[Slot] = set()
    for i in range(len(raw)):
        for pos in range(4):
            if (i, pos) in visited:
                continue
            # collect the component through this slot (direction-free walk)
            walk = _trace_entries(raw, table, (i, pos))
            comp_slots = set(walk) | {(j, (p + 2) % 4) for j, p in walk}
            visited |= comp_slots
            labels = {raw[j][p] for j, p in comp_slots}
            pref = sorted(lab for lab in labels if lab in prefer)
            if pref:
                entry = prefer[pref[0]]
                if entry not in comp_slots:
                    raise DiagramError(f"preferred slot for edge {pref[0]} is not on its component")
            else:
                entry = _default_entry(raw, comp_slots, labels)
            entries.update(_trace_entries(raw, table, entry))

    crossings = []
    for i, x in enumerate(raw):
        under_in = 0 if (i, 0) in entries else 2
        over_in = 1 if (i, 1) in entries else 3
        if under_in == 2:
            x = (x[2], x[3], x[0], x[1])
            over_in = (over_in + 2) % 4
        crossings.append(Crossing(x, 1 if over_in == 3 else -1))
    return Diagram(tuple(crossings), free_loops)


def reverse_components(d: Diagram, which: Iterable[int]) -> Diagram:
    """Reverse the orientation of the listed components (indices into ``d.components``)."""
    which = set(which)
    prefer = {}
    for k, comp in enumerate(d.components):
        lab = comp[0]
        prefer[lab] = d.tail(lab) if k in which else d.head(lab)
    return orient(d.raw(), d.free_loops, prefer)


def relabel(d: Diagram) -> Diagram:
    """Renumber edges 1, 2, ... along each component in traversal order."""
    mapping = {}
    for comp in d.components:
        for lab in comp:
            mapping[lab] = len(mapping) + 1
    crossings = tuple(Crossing(tuple(mapping[e] for e in x.edges), x.sign) for x in d.crossings)
    return Diagram(crossings, d.free_loops)


# -- text formats -------------------------------------------------------------

_TERM = re.compile(r"([XU])\[([^\]]*)\]")


def parse_pd(text: str, reverse: Iterable[int] = ()) -> Diagram:
    """Parse ``X[a,b,c,d] ...`` with an optional ``U[m]`` free-loop count.

    A surrounding ``PD[...]`` and commas between terms are tolerated.
    ``reverse`` lists components whose inferred orientation is flipped.
    """
    body = text.strip()
    if body.startswith("PD[") and body.endswith("]"):
        body = body[3:-1]
    pos = 0
    raw = []
    loops = 0
    for m in _TERM.finditer(body):
        gap = body[pos:m.start()]
        if gap.strip(" \t\r\n,"):
            raise DiagramError(f"malformed PD term near {gap.strip()!r}")
        pos = m.end()
        kind, args = m.group(1), m.group(2)
        try:
            values = [int(v) for v in args.split(",")]
        except ValueError:
            raise DiagramError(f"malformed PD term {m.group(0)!r}") from None
        if kind == "U":
            if len(values) != 1 or values[0] < 0:
                raise DiagramError(f"malformed free-loop term {m.group(0)!r}")
            loops += values[0]
        else:
            if len(values) != 4 or min(values) < 1:
                raise DiagramError(f"crossing {m.group(0)!r} needs four positive labels")
            raw.append(tuple(values))
    if body[pos:].strip(" \t\r\n,"):
        raise DiagramError(f"malformed PD text near {body[pos:].strip()!r}")
    if not raw and not loops:
        raise DiagramError("empty PD code")
    d = orient(raw, loops)
    if reverse:
        d = reverse_components(d, reverse)
    return d


def to_pd(d: Diagram) -> str:
    parts = [f"U[{d.free_loops}]"] if d.free_loops else []
    parts.extend(str(x) for x in d.crossings)
    return " ".join(parts)


_GEN = re.compile(r"^(-?)s(\d+)$")


def parse_braid_word(word: str) -> list[int]:
    """``"s1 -s2 s1"`` -> ``[1, -2, 1]``."""
    out = []
    for tok in word.replace(",", " ").split():
        m = _GEN.match(tok)
        if not m or int(m.group(2)) < 1:
            raise DiagramError(f"bad braid generator {tok!r}")
        out.append(-int(m.group(2)) if m.group(1) else int(m.group(2)))
    return out


def format_braid_word(gens: Iterable[int]) -> str:
    return " ".join(f"s{g}" if g > 0 else f"-s{-g}" for g in gens)


def parse_braid(word: str | Sequence[int], strands: int) -> Diagram:
    """Closure of a braid word; every generator contributes one crossing."""
    gens = parse_braid_word(word) if isinstance(word, str) else list(word)
    if strands < 2:
        raise DiagramError("a braid needs at least two strands")
    for g in gens:
        if not 1 <= abs(g) < strands:
            raise DiagramError(f"generator s{abs(g)} out of range for {strands} strands")
    lay = Layout()
    top = [lay.new() for _ in range(strands)]
    cur = list(top)
    for g in gens:
        i = abs(g) - 1
        cur[i], cur[i + 1] = lay.twist(cur[i], cur[i + 1], 1 if g > 0 else -1)
    for a, b in zip(cur, top):
        lay.join(a, b)
    return lay.finish(downward=top)


class Layout:
    """Incremental builder for diagrams drawn top to bottom.

    Strand ends carry integer labels; ``join`` identifies two labels (an arc
    with no crossing).  Crossings are stored as raw PD tuples keyed by the
    corners NW, NE (ends arriving from above) and SW, SE (ends leaving below).
    """

    def __init__(self):
        self._next = 0
        self._parent: dict[int, int] = {}
        self.raw: list[tuple[int, int, int, int]] = []
        self._upper: list[tuple[int, int]] = []

    def new(self) -> int:
        self._next += 1
        self._parent[self._next] = self._next
        return self._next

    def find(self, a: int) -> int:
        root = a
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[a] != root:
            self._parent[a], a = root, self._parent[a]
        return root

    def join(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self._parent[max(ra, rb)] = min(ra, rb)

    def crossing(self, nw: int, ne: int, sw: int, se: int, sign: int, flip: bool = False):
        """Crossing in a small square; ``sign`` is its type as a braid generator.

        ``+1`` puts the NW-SE arc under (the positive generator when both
        strands run downward), ``-1`` puts the NE-SW arc under.  ``flip``
        turns the square over about its horizontal axis.
        """
        if sign > 0:
            x, upper = (se, ne, nw, sw), (2, 1)
        else:
            x, upper = (sw, se, ne, nw), (3, 2)
        if flip:
            x = x[::-1]
            upper = tuple(3 - p for p in upper)
        self.raw.append(x)
        self._upper.append(upper)

    def twist(self, left: int, right: int, sign: int) -> tuple[int, int]:
        """Braid generator on two strands arriving from above; returns the new ends."""
        sw, se = self.new(), self.new()
        self.crossing(left, right, sw, se, sign)
        return sw, se

    def finish(self, downward: Iterable[int] = ()) -> Diagram:
        """Resolve identifications; ``downward`` labels are oriented away from the top."""
        raw = [tuple(self.find(e) for e in x) for x in self.raw]
        used = {e for x in raw for e in x}
        roots = {self.find(e) for e in self._parent}
        loops = len(roots - used)
        prefer = {}
        if raw:
            table = _slot_table(raw)
            for lab in downward:
                r = self.find(lab)
                if r in table and r not in prefer:
                    slots = [s for s in table[r] if s[1] in self._upper[s[0]]]
                    prefer[r] = slots[0] if slots else table[r][0]
        d = orient(raw, loops, prefer)
        return relabel(d)


# -- local operations ------------------------------------------------------

def _switched(x: Crossing) -> Crossing:
    a, b, c, d = x.edges
    if x.sign > 0:
        return Crossing((d, a, b, c), -1)
    return Crossing((b, c, d, a), 1)


def switch(d: Diagram, index: int) -> Diagram:
    """Swap over and under at one crossing, keeping the orientation."""
    xs = list(d.crossings)
    xs[index] = _switched(xs[index])
    return Diagram(tuple(xs), d.free_loops)


def mirror(d: Diagram) -> Diagram:
    """Swap over and under everywhere.  Smoothing types 0 and 1 trade places."""
    return Diagram(tuple(_switched(x) for x in d.crossings), d.free_loops)


@dataclass(frozen=True)
class Smoothing:
    """Result of smoothing one crossing.

    ``edge_map`` sends each old edge label to its label in ``diagram``, or to
    ``None`` when the edge closed up into a new free loop.
    """

    diagram: Diagram
    edge_map: dict[int, int | None]
    index: int
    resolution: int
    coherent: bool


def smooth(d: Diagram, index: int, resolution: int) -> Smoothing:
    """Smooth crossing ``index`` and re-orient canonically.

    Each component of the result follows the original direction of its
    lowest-labelled edge; an arc merged through the smoothing carries the
    smaller of its end labels.
    """
    if not 0 <= index < len(d.crossings):
        raise DiagramError(f"crossing index {index} out of range")
    if resolution not in (0, 1):
        raise DiagramError("resolution must be 0 or 1")
    x = d.crossings[index]
    at_x: dict[int, list[int]] = {}
    for pos, lab in enumerate(x.edges):
        at_x.setdefault(lab, []).append(pos)
    # ends that leave the crossing, keyed by position
    ext: dict[int, Slot | None] = {}
    for pos, lab in enumerate(x.edges):
        if len(at_x[lab]) == 2:
            ext[pos] = None
        else:
            h, t = d.head(lab), d.tail(lab)
            ext[pos] = t if h == (index, pos) else h
    partner = {}
    for p, q in SMOOTHING_PAIRS[resolution]:
        partner[p], partner[q] = q, p
    # positions are linked by the smoothing and by labels used twice at x
    adj = {p: {partner[p]} for p in range(4)}
    for poss in at_x.values():
        if len(poss) == 2:
            adj[poss[0]].add(poss[1])
            adj[poss[1]].add(poss[0])
    edge_map: dict[int, int | None] = {}
    renames: dict[Slot, int] = {}
    new_heads: dict[int, Slot] = {}
    loops = 0
    seen: set[int] = set()
    for start in range(4):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            p = stack.pop()
            comp.append(p)
            for q in adj[p] - seen:
                seen.add(q)
                stack.append(q)
        ends = sorted(p for p in comp if ext[p] is not None)
        labels = {x.edges[p] for p in comp}
        if not ends:
            loops += 1
            for lab in labels:
                edge_map[lab] = None
            continue
        e0, e1 = ends
        keep = min(x.edges[e0], x.edges[e1])
        for lab in labels:
            edge_map[lab] = keep
        k_end = e0 if x.edges[e0] == keep else e1
        o_end = e1 if k_end == e0 else e0
        # the kept label's original direction orients the merged arc
        new_heads[keep] = ext[k_end] if d.tail(keep) == (index, k_end) else ext[o_end]
        renames[ext[e0]] = keep
        renames[ext[e1]] = keep
    for lab in d.edges:
        edge_map.setdefault(lab, lab)
    shift = lambda s: (s[0] - (s[0] > index), s[1])  # noqa: E731
    raw = []
    for j, y in enumerate(d.crossings):
        if j == index:
            continue
        raw.append(tuple(renames.get((j, p), lab) for p, lab in enumerate(y.edges)))
    prefer = {}
    for lab in d.edges:
        if edge_map[lab] == lab:
            prefer[lab] = shift(new_heads.get(lab, d.head(lab)))
    out = orient(raw, d.free_loops + loops, prefer) if raw else Diagram((), d.free_loops + loops)
    return Smoothing(out, edge_map, index, resolution, resolution == x.oriented_resolution())


def compute_c(d: Diagram, index: int, resolution: int) -> int:
    """``n_-`` of the smoothed diagram minus ``n_-`` of ``d``, canonical orientation."""
    return smooth(d, index, resolution).diagram.n_minus - d.n_minus


def connected_sum(d1: Diagram, d2: Diagram, edge1: int | None = None,
                  edge2: int | None = None) -> Diagram:
    """Splice two knot diagrams along ``edge1`` of ``d1`` and ``edge2`` of ``d2``."""
    for d in (d1, d2):
        if d.num_components != 1:
            raise DiagramError("connected sum needs single-component diagrams")
    if not d1.crossings:
        return d2
    if not d2.crossings:
        return d1
    d1 = relabel(d1)
    d2 = relabel(d2)
    off = 2 * len(d1.crossings)
    d2 = Diagram(tuple(Crossing(tuple(e + off for e in x.edges), x.sign) for x in d2.crossings))
    e1 = 1 if edge1 is None else edge1
    e2 = off + (1 if edge2 is None else edge2)
    h1, h2 = d1.head(e1), d2.head(e2)
    xs1 = [list(x.edges) for x in d1.crossings]
    xs2 = [list(x.edges) for x in d2.crossings]
    # e1 now runs into d2, and e2 runs back into d1
    xs2[h2[0]][h2[1]] = e1
    xs1[h1[0]][h1[1]] = e2
    crossings = [Crossing(tuple(e), x.sign) for e, x in zip(xs1, d1.crossings)]
    crossings += [Crossing(tuple(e), x.sign) for e, x in zip(xs2, d2.crossings)]
    return relabel(Diagram(tuple(crossings)))


def disjoint_union(d1: Diagram, d2: Diagram) -> Diagram:
    """Split union, drawn with ``d2`` far away from ``d1``."""
    off = max(d1.edges, default=0)
    xs = list(d1.crossings)
    xs += [Crossing(tuple(e + off for e in x.edges), x.sign) for x in d2.crossings]
    return Diagram(tuple(xs), d1.free_loops + d2.free_loops)
