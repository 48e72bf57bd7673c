"""Motif graphs and their partition contractions.

A motif is a small simple graph on vertices 1..k. Stacking `copies`
labeled copies of the motif over the rows of a copies x k grid and merging
vertices along a grid partition yields a contraction graph; the vertex and
edge deficiencies of those contractions, collected over all connected
row-injective partitions, form an integer diagram whose upper convex hull
drives the cumulant bounds in the bounds module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Optional

from .errors import ContractionError, SizeLimitError
from .partitions import (
    Partition,
    _code_is_connected,
    check_cell_cap,
)

AUTOMORPHISM_VERTEX_CAP = 8


@dataclass(frozen=True)
class MotifGraph:
    """Simple graph on vertices 1..vertex_count with a normalized edge tuple."""

    vertex_count: int
    edges: tuple

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("motif needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.vertex_count and 1 <= v <= self.vertex_count):
                raise ValueError(f"edge ({u},{v}) outside vertex range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset:
        return frozenset(b if a == v else a for a, b in self.edges if v in (a, b))

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in set(self.edges)

    def is_connected(self) -> bool:
        seen = {1}
        stack = [1]
        while stack:
            for w in self.neighbors(stack.pop()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        vs = set(vertices)
        return sum(1 for u, v in self.edges if u in vs and v in vs)

    def __repr__(self) -> str:
        return f"MotifGraph(v={self.vertex_count}, edges={list(self.edges)})"


def motif(name: str) -> MotifGraph:
    """Named built-ins: triangle, path<k>, cycle<k>, complete<k>, star<k>.

    star<k> is the k-leaf star on k+1 vertices with hub 1.
    """
    if name == "triangle":
        return motif("cycle3")
    m = re.fullmatch(r"(path|cycle|complete|star)(\d+)", name)
    if not m:
        raise ValueError(f"unknown motif name {name!r}")
    kind, size = m.group(1), int(m.group(2))
    if kind == "path":
        if size < 1:
            raise ValueError("path needs >= 1 vertex")
        return MotifGraph(size, tuple((i, i + 1) for i in range(1, size)))
    if kind == "cycle":
        if size < 3:
            raise ValueError("cycle needs >= 3 vertices")
        return MotifGraph(size, tuple((i, i + 1) for i in range(1, size)) + ((1, size),))
    if kind == "complete":
        if size < 1:
            raise ValueError("complete graph needs >= 1 vertex")
        return MotifGraph(size, tuple(combinations(range(1, size + 1), 2)))
    # star
    if size < 1:
        raise ValueError("star needs >= 1 leaf")
    return MotifGraph(size + 1, tuple((1, i) for i in range(2, size + 2)))


def motif_from_edge_list(text: str) -> MotifGraph:
    """Parse 'u v' pairs, one per line, 1-indexed; blank lines and # comments skipped."""
    edges = []
    top = 0
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'u v' pair, got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        top = max(top, u, v)
    if not edges:
        raise ValueError("edge list is empty")
    return MotifGraph(top, tuple(edges))


def automorphism_count(g: MotifGraph) -> int:
    """Vertex permutations preserving the edge set, by brute force."""
    k = g.vertex_count
    if k > AUTOMORPHISM_VERTEX_CAP:
        raise SizeLimitError(
            f"automorphism counting is brute force; {k} vertices exceeds "
            f"cap {AUTOMORPHISM_VERTEX_CAP}")
    edges = set(g.edges)
    count = 0
    for perm in permutations(range(1, k + 1)):
        relabeled = {tuple(sorted((perm[u - 1], perm[v - 1]))) for u, v in edges}
        if relabeled == edges:
            count += 1
    return count


@dataclass(frozen=True)
class ContractionResult:
    """Blocks and the merged edge structure of a stacked-copies contraction."""

    blocks: tuple          # tuple of tuples of (row, col) cells
    multi_edges: tuple     # one sorted block-index pair per surviving motif edge slot
    simple_edges: frozenset  # deduplicated block-index pairs

    @property
    def vertex_count(self) -> int:
        return len(self.blocks)

    @property
    def edge_count(self) -> int:
        return len(self.simple_edges)


def contract(p: Partition, g: MotifGraph) -> ContractionResult:
    """Merge the stacked motif copies along the blocks of p.

    Each grid row carries one copy of the motif over its cells; an edge
    (u, v) of the motif in row i becomes an edge between the blocks of
    cells (i, u) and (i, v). A partition placing both endpoints in one
    block would create a self-loop and is rejected.
    """
    if p.cols != g.vertex_count:
        raise ValueError(
            f"partition has {p.cols} columns but motif has {g.vertex_count} vertices")
    multi = []
    for i in range(p.rows):
        base = i * p.cols
        for u, v in g.edges:
            a, b = p.code[base + u - 1], p.code[base + v - 1]
            if a == b:
                raise ContractionError(
                    f"cells ({i+1},{u}) and ({i+1},{v}) share a block; "
                    "contraction would create a self-loop")
            multi.append((a, b) if a < b else (b, a))
    return ContractionResult(blocks=p.blocks(),
                             multi_edges=tuple(multi),
                             simple_edges=frozenset(multi))


# -- full contraction scans over connected row-injective partitions -------


@lru_cache(maxsize=None)
def _contraction_scan(g: MotifGraph, copies: int) -> tuple:
    """One pass over all connected non-flat partitions of the copies x k grid.

    Returns (profile, witnesses) where profile maps block count r to
    [number of partitions, minimal contraction edge count] and witnesses
    maps each distinct deficiency point (x, y) to one witness code.
    """
    k = g.vertex_count
    m = copies * k
    gedges = [(u - 1, v - 1) for u, v in g.edges]
    total_edges = copies * len(gedges)
    code = [0] * m
    rowused = [set() for _ in range(copies)]
    profile: dict = {}
    witnesses: dict = {}

    def leaf():
        if not _code_is_connected(code, copies, k):
            return
        nblocks = max(code) + 1
        es = set()
        for i in range(copies):
            base = i * k
            for u, v in gedges:
                a, b = code[base + u], code[base + v]
                es.add((a, b) if a < b else (b, a))
        ecount = len(es)
        entry = profile.get(nblocks)
        if entry is None:
            profile[nblocks] = [1, ecount]
        else:
            entry[0] += 1
            if ecount < entry[1]:
                entry[1] = ecount
        pt = (m - nblocks, total_edges - ecount)
        if pt not in witnesses:
            witnesses[pt] = tuple(code)

    def rec(t: int, nmax: int):
        if t == m:
            leaf()
            return
        used = rowused[t // k]
        for b in range(nmax + 1):
            if b in used:
                continue
            code[t] = b
            used.add(b)
            rec(t + 1, nmax if b < nmax else nmax + 1)
            used.discard(b)

    rec(0, 0)
    return (profile, witnesses)


def contraction_profile(g: MotifGraph, copies: int,
                        cap: Optional[int] = None) -> dict:
    """Map block count r -> (partition count, minimal contraction edge count)."""
    check_cell_cap(copies, g.vertex_count, cap)
    profile, _ = _contraction_scan(g, copies)
    return {r: (cnt, mn) for r, (cnt, mn) in sorted(profile.items())}


def min_edge_count(g: MotifGraph, copies: int, r: int,
                   cap: Optional[int] = None) -> int:
    """Minimal contraction edge count over connected non-flat partitions with r blocks."""
    profile = contraction_profile(g, copies, cap)
    if r not in profile:
        raise ValueError(
            f"no connected non-flat partition of {copies}x{g.vertex_count} "
            f"has {r} blocks")
    return profile[r][1]


@dataclass(frozen=True)
class DiagramPoint:
    """A (vertex deficiency, edge deficiency) point with one witness partition."""

    x: int
    y: int
    witness: Partition


def deficiency_diagram(g: MotifGraph, copies: int,
                       cap: Optional[int] = None) -> tuple:
    """Distinct deficiency points of all contractions, sorted by (x, y).

    x = copies*k - (blocks of the contraction),
    y = copies*e(motif) - (edges of the contraction).
    """
    check_cell_cap(copies, g.vertex_count, cap)
    _, witnesses = _contraction_scan(g, copies)
    k = g.vertex_count
    return tuple(DiagramPoint(x, y, Partition(copies, k, code))
                 for (x, y), code in sorted(witnesses.items()))


# -- upper convex hull ----------------------------------------------------


def _point_xy(p) -> tuple:
    if isinstance(p, DiagramPoint):
        return (p.x, p.y)
    x, y = p
    return (int(x), int(y))


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def upper_hull(points: Iterable) -> list:
    """Vertices of the upper boundary of the convex hull, left to right.

    Collinear interior points are not vertices; use on_upper_hull for
    boundary membership.
    """
    pts = sorted(set(_point_xy(p) for p in points))
    if not pts:
        raise ValueError("empty point set")
    if len(set(x for x, _ in pts)) == 1:
        return [max(pts, key=lambda p: p[1])]
    hull = []
    for p in reversed(pts):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull[::-1]


def on_upper_hull(points: Iterable) -> set:
    """Subset of the input points lying on the upper hull boundary."""
    pts = set(_point_xy(p) for p in points)
    hull = upper_hull(pts)
    if len(hull) == 1:
        return {hull[0]}
    members = set()
    for p in pts:
        for a, b in zip(hull, hull[1:]):
            if a[0] <= p[0] <= b[0] and _cross(a, b, p) == 0:
                members.add(p)
                break
    return members


# -- balance ---------------------------------------------------------------


def is_strongly_balanced(g: MotifGraph) -> bool:
    """Edge density e(H)/(v(H)-1) of every subgraph at most that of g itself.

    Checked over induced subgraphs on all vertex subsets of size >= 2,
    which is sufficient: adding edges over a fixed vertex set only raises
    the density ratio.
    """
    if g.vertex_count < 2:
        raise ValueError("balance is defined for motifs with >= 2 vertices")
    if not g.is_connected():
        raise ValueError("balance check requires a connected motif")
    eg, vg = g.edge_count, g.vertex_count
    verts = range(1, vg + 1)
    for size in range(2, vg + 1):
        for subset in combinations(verts, size):
            eh = g.induced_edge_count(subset)
            if eh * (vg - 1) > eg * (size - 1):
                return False
    return True
