"""Set partitions of a rows x cols grid.

Partitions are canonically encoded as restricted-growth strings over the
row-major cell order: code[t] is the block label of the t-th cell, blocks
are numbered by first occurrence, so two partitions are equal iff their
codes are equal and plain tuple comparison gives a total enumeration order.

The module provides the lattice operations (meet/join), the two structural
predicates used throughout the package (no block holds two cells of one
row; rows are linked into one component through shared blocks), streaming
enumeration of all/filtered partitions, and the index-matrix machinery
that counts how many distinct-index tuples realize a given partition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import SizeLimitError

# Enumerations over grids with more cells than this raise SizeLimitError
# unless the caller passes an explicit higher cap.
DEFAULT_CELL_CAP = 12

# When enabled, fast predicate paths are cross-checked against their
# lattice definitions (meet with the row partition, join against the top).
STRICT_DEBUG = False

Cell = tuple  # (row, col), 1-based


def bell_number(n: int) -> int:
    """Number of set partitions of an n-element set (Bell triangle)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def check_cell_cap(rows: int, cols: int, cap: Optional[int] = None) -> None:
    """Raise SizeLimitError when the grid exceeds the enumeration cap."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be >= 1")
    limit = DEFAULT_CELL_CAP if cap is None else cap
    cells = rows * cols
    if cells > limit:
        raise SizeLimitError(
            f"grid of {rows}x{cols}={cells} cells exceeds cap {limit} "
            f"(about {bell_number(cells):.3g} partitions); raise the cap to override"
        )


def falling_factorial(n: int, r: int) -> int:
    """n (n-1) ... (n-r+1); zero when r > n."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if r > n:
        return 0
    out = 1
    for i in range(r):
        out *= n - i
    return out


def _canonical_code(labels: Sequence) -> tuple:
    """Relabel an arbitrary block labeling into restricted-growth form."""
    seen = {}
    out = []
    for lab in labels:
        if lab not in seen:
            seen[lab] = len(seen)
        out.append(seen[lab])
    return tuple(out)


class Partition:
    """A set partition of the rows x cols grid, held as its canonical code."""

    __slots__ = ("rows", "cols", "code")

    def __init__(self, rows: int, cols: int, code: Sequence[int]):
        code = tuple(code)
        if rows < 1 or cols < 1:
            raise ValueError("grid dimensions must be >= 1")
        if len(code) != rows * cols:
            raise ValueError("code length does not match the grid")
        mx = -1
        for c in code:
            if c > mx + 1 or c < 0:
                raise ValueError("code is not in restricted-growth form")
            if c > mx:
                mx = c
        self.rows = rows
        self.cols = cols
        self.code = code

    # -- construction -------------------------------------------------

    @classmethod
    def from_blocks(cls, rows: int, cols: int, blocks) -> "Partition":
        """Build from an iterable of cell collections covering the grid."""
        label = {}
        for i, blk in enumerate(blocks):
            for cell in blk:
                if cell in label:
                    raise ValueError(f"cell {cell} appears in two blocks")
                label[cell] = i
        cells = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
        if set(label) != set(cells):
            raise ValueError("blocks do not cover the grid exactly")
        return cls(rows, cols, _canonical_code([label[c] for c in cells]))

    @classmethod
    def bottom(cls, rows: int, cols: int) -> "Partition":
        """All-singletons partition."""
        return cls(rows, cols, range(rows * cols))

    @classmethod
    def top(cls, rows: int, cols: int) -> "Partition":
        """Single-block partition."""
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def row_partition(cls, rows: int, cols: int) -> "Partition":
        """One block per grid row."""
        return cls(rows, cols, [t // cols for t in range(rows * cols)])

    # -- basic structure ----------------------------------------------

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    @property
    def block_count(self) -> int:
        return max(self.code) + 1

    def blocks(self) -> tuple:
        """Blocks as tuples of (row, col) cells in row-major order."""
        out = [[] for _ in range(self.block_count)]
        for t, b in enumerate(self.code):
            out[b].append((t // self.cols + 1, t % self.cols + 1))
        return tuple(tuple(blk) for blk in out)

    def cell_block(self, row: int, col: int) -> int:
        """Block label of a 1-based cell."""
        return self.code[(row - 1) * self.cols + (col - 1)]

    # -- lattice operations -------------------------------------------

    def _require_same_ground(self, other: "Partition") -> None:
        if self.shape != other.shape:
            raise ValueError(f"ground sets differ: {self.shape} vs {other.shape}")

    def meet(self, other: "Partition") -> "Partition":
        """Coarsest partition finer than both; blocks are pairwise intersections."""
        self._require_same_ground(other)
        return Partition(self.rows, self.cols,
                         _canonical_code(list(zip(self.code, other.code))))

    def join(self, other: "Partition") -> "Partition":
        """Finest partition coarser than both, via components of the union relation."""
        self._require_same_ground(other)
        m = len(self.code)
        parent = list(range(m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for code in (self.code, other.code):
            first = {}
            for t, b in enumerate(code):
                if b in first:
                    ra, rb = find(first[b]), find(t)
                    if ra != rb:
                        parent[ra] = rb
                else:
                    first[b] = t
        return Partition(self.rows, self.cols, _canonical_code([find(t) for t in range(m)]))

    def refines(self, other: "Partition") -> bool:
        """True when every block of self lies inside a block of other."""
        self._require_same_ground(other)
        image = {}
        for a, b in zip(self.code, other.code):
            if image.setdefault(a, b) != b:
                return False
        return True

    # -- structural predicates ----------------------------------------

    def is_non_flat(self) -> bool:
        """True iff no block holds two cells of the same row."""
        fast = _code_is_non_flat(self.code, self.rows, self.cols)
        if STRICT_DEBUG:
            bottom = Partition.bottom(self.rows, self.cols)
            via_meet = self.meet(Partition.row_partition(self.rows, self.cols)) == bottom
            assert fast == via_meet, "row-duplicate check disagrees with lattice meet"
        return fast

    def is_connected(self) -> bool:
        """True iff the rows form a single component through shared blocks."""
        fast = _code_is_connected(self.code, self.rows, self.cols)
        if STRICT_DEBUG:
            top = Partition.top(self.rows, self.cols)
            via_join = self.join(Partition.row_partition(self.rows, self.cols)) == top
            assert fast == via_join, "row-linkage check disagrees with lattice join"
        return fast

    # -- text forms ----------------------------------------------------

    def to_text(self) -> str:
        """Block form, e.g. '{(1,1)(2,1)}{(1,2)}', blocks ordered by first cell."""
        parts = []
        for blk in self.blocks():
            parts.append("{" + "".join(f"({r},{c})" for r, c in blk) + "}")
        return "".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        """Parse the block form emitted by to_text."""
        blocks = []
        pos = 0
        for m in re.finditer(r"\{((?:\(\d+,\d+\))+)\}", text):
            if m.start() != pos:
                raise ValueError(f"malformed partition text near {text[pos:m.start()]!r}")
            pos = m.end()
            blocks.append([(int(r), int(c))
                           for r, c in re.findall(r"\((\d+),(\d+)\)", m.group(1))])
        if pos != len(text) or not blocks:
            raise ValueError("malformed partition text")
        rows = max(r for blk in blocks for r, _ in blk)
        cols = max(c for blk in blocks for _, c in blk)
        return cls.from_blocks(rows, cols, blocks)

    def code_string(self) -> str:
        """Restricted-growth code as comma-separated integers."""
        return ",".join(str(c) for c in self.code)

    @classmethod
    def from_code_string(cls, rows: int, cols: int, text: str) -> "Partition":
        return cls(rows, cols, [int(x) for x in text.split(",")])

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, Partition)
                and self.shape == other.shape and self.code == other.code)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.code))

    def __repr__(self) -> str:
        return f"Partition({self.rows}x{self.cols}, {self.to_text()})"


def _code_is_non_flat(code: Sequence[int], rows: int, cols: int) -> bool:
    for r in range(rows):
        row = code[r * cols:(r + 1) * cols]
        if len(set(row)) != cols:
            return False
    return True


def _code_is_connected(code: Sequence[int], rows: int, cols: int) -> bool:
    parent = list(range(rows))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first = {}
    for t, b in enumerate(code):
        r = t // cols
        if b in first:
            ra, rb = find(first[b]), find(r)
            if ra != rb:
                parent[ra] = rb
        else:
            first[b] = r
    root = find(0)
    return all(find(r) == root for r in range(rows))


# -- enumeration --------------------------------------------------------


def iter_partition_codes(rows: int, cols: int) -> Iterator[tuple]:
    """All restricted-growth codes of the grid in lexicographic order."""
    m = rows * cols
    code = [0] * m

    def rec(t: int, nmax: int):
        if t == m:
            yield tuple(code)
            return
        for b in range(nmax + 1):
            code[t] = b
            yield from rec(t + 1, nmax if b < nmax else nmax + 1)

    yield from rec(0, 0)


def iter_nonflat_codes(rows: int, cols: int) -> Iterator[tuple]:
    """Codes with no same-row cells sharing a block, lexicographic order."""
    m = rows * cols
    code = [0] * m
    rowused = [set() for _ in range(rows)]

    def rec(t: int, nmax: int):
        if t == m:
            yield tuple(code)
            return
        used = rowused[t // cols]
        for b in range(nmax + 1):
            if b in used:
                continue
            code[t] = b
            used.add(b)
            yield from rec(t + 1, nmax if b < nmax else nmax + 1)
            used.discard(b)

    yield from rec(0, 0)


def iter_cnf_codes(rows: int, cols: int,
                   block_count: Optional[int] = None) -> Iterator[tuple]:
    """Connected non-flat codes, optionally restricted to an exact block count.

    Prunes on the block-count window while generating: a prefix with b blocks
    and u unassigned cells can only finish with between b and b+u blocks.
    """
    m = rows * cols
    code = [0] * m
    rowused = [set() for _ in range(rows)]

    def rec(t: int, nmax: int):
        if block_count is not None:
            if nmax > block_count or nmax + (m - t) < block_count:
                return
        if t == m:
            if _code_is_connected(code, rows, cols):
                yield tuple(code)
            return
        used = rowused[t // cols]
        for b in range(nmax + 1):
            if b in used:
                continue
            code[t] = b
            used.add(b)
            yield from rec(t + 1, nmax if b < nmax else nmax + 1)
            used.discard(b)

    yield from rec(0, 0)


def enumerate_partitions(rows: int, cols: int,
                         cap: Optional[int] = None) -> Iterator[Partition]:
    """Stream every partition of the grid exactly once, in code order.

    The cap check runs eagerly, before the stream is touched.
    """
    check_cell_cap(rows, cols, cap)
    return (Partition(rows, cols, code) for code in iter_partition_codes(rows, cols))


def enumerate_cnf(rows: int, cols: int, block_count: Optional[int] = None,
                  cap: Optional[int] = None) -> Iterator[Partition]:
    """Stream the connected non-flat partitions, optionally with a fixed block count."""
    check_cell_cap(rows, cols, cap)
    return (Partition(rows, cols, code)
            for code in iter_cnf_codes(rows, cols, block_count))


# -- index matrices ------------------------------------------------------


@dataclass(frozen=True)
class IndexMatrix:
    """Stacked index tuples: each row is a tuple of distinct indices in 1..n."""

    entries: tuple
    n: int

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if not rows:
            raise ValueError("index matrix needs at least one row")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("rows have unequal length")
            if len(set(row)) != width:
                raise ValueError(f"repeated entry within row {row}")
            for v in row:
                if not 1 <= v <= self.n:
                    raise ValueError(f"entry {v} outside 1..{self.n}")

    @property
    def shape(self) -> tuple:
        return (len(self.entries), len(self.entries[0]))


def partition_of_index_matrix(matrix: IndexMatrix) -> Partition:
    """Group grid cells whose matrix entries coincide; non-flat by construction."""
    rows, cols = matrix.shape
    labels = [matrix.entries[t // cols][t % cols] for t in range(rows * cols)]
    return Partition(rows, cols, _canonical_code(labels))


def count_index_matrices(p: Partition, n: int) -> int:
    """How many index matrices realize p: n falling to the number of blocks."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not p.is_non_flat():
        raise ValueError("count is defined for non-flat partitions only")
    return falling_factorial(n, p.block_count)


def count_maximal_cnf(rows: int, cols: int) -> int:
    """Closed-form count of maximal connected non-flat partitions of the grid."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be >= 1")
    out = cols ** (rows - 1)
    for i in range(1, rows):
        out *= 1 + (cols - 1) * i
    return out
