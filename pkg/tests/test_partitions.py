"""Partition lattice, enumeration, predicates, and index-matrix counting."""

import math
from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gustats.partitions as parts
from gustats import (
    IndexMatrix,
    Partition,
    SizeLimitError,
    bell_number,
    count_index_matrices,
    count_maximal_cnf,
    enumerate_cnf,
    enumerate_partitions,
    falling_factorial,
    partition_of_index_matrix,
)


def codes(rows, cols, cnf=False):
    it = enumerate_cnf(rows, cols) if cnf else enumerate_partitions(rows, cols)
    return [p.code for p in it]


# -- enumeration -------------------------------------------------------------


@pytest.mark.parametrize("rows,cols,count", [(1, 3, 5), (1, 1, 1), (2, 2, 15)])
def test_enumeration_counts(rows, cols, count):
    assert len(codes(rows, cols)) == count
    assert count == bell_number(rows * cols)


def test_enumeration_order_is_strict():
    for rows, cols in [(1, 4), (2, 2), (2, 3)]:
        cs = codes(rows, cols)
        assert all(a < b for a, b in zip(cs, cs[1:]))
        assert len(set(cs)) == len(cs)


def test_enumeration_cap():
    with pytest.raises(SizeLimitError, match="partitions"):
        list(enumerate_partitions(4, 4))
    # explicit override allows larger grids
    stream = enumerate_partitions(4, 4, cap=16)
    assert next(iter(stream)).block_count == 1


def test_cnf_stream_matches_predicates():
    expected = [p.code for p in enumerate_partitions(2, 3)
                if p.is_non_flat() and p.is_connected()]
    assert codes(2, 3, cnf=True) == expected


def test_cnf_counts():
    assert len(codes(1, 3, cnf=True)) == 1           # only the all-singleton one
    assert codes(1, 3, cnf=True) == [(0, 1, 2)]
    assert len(codes(2, 2, cnf=True)) == 6


def test_cnf_block_count_filter():
    by_count = {}
    for p in enumerate_cnf(2, 3):
        by_count.setdefault(p.block_count, []).append(p.code)
    for r, want in by_count.items():
        got = [p.code for p in enumerate_cnf(2, 3, block_count=r)]
        assert got == want
    assert list(enumerate_cnf(2, 3, block_count=2)) == []


# -- lattice operations -------------------------------------------------------


def test_meet_trivial_cases():
    for p in enumerate_partitions(2, 2):
        assert p.meet(Partition.bottom(2, 2)) == Partition.bottom(2, 2)
        assert p.meet(p) == p


def test_join_trivial_cases():
    for p in enumerate_partitions(2, 2):
        assert p.join(Partition.top(2, 2)) == Partition.top(2, 2)
        assert p.join(p) == p


def test_meet_rows_with_columns_is_bottom():
    rows = Partition.row_partition(2, 2)
    cols = Partition.from_blocks(2, 2, [[(1, 1), (2, 1)], [(1, 2), (2, 2)]])
    assert rows.meet(cols) == Partition.bottom(2, 2)


def test_join_rows_with_matching_is_top():
    rows = Partition.row_partition(2, 2)
    match = Partition.from_blocks(2, 2, [[(1, 1), (2, 1)], [(1, 2)], [(2, 2)]])
    assert rows.join(match) == Partition.top(2, 2)


def test_mismatched_ground_raises():
    with pytest.raises(ValueError, match="ground"):
        Partition.bottom(2, 2).meet(Partition.bottom(1, 4))
    with pytest.raises(ValueError, match="ground"):
        Partition.bottom(2, 2).join(Partition.bottom(1, 4))


@st.composite
def partition_pairs(draw):
    rows = draw(st.integers(1, 4))
    cols = draw(st.integers(1, max(1, 8 // rows)))
    m = rows * cols

    def one():
        code, top = [], 0
        for _ in range(m):
            b = draw(st.integers(0, top))
            code.append(b)
            top = max(top, b + 1)
        return Partition(rows, cols, code)

    return one(), one(), one()


@settings(max_examples=120, deadline=None)
@given(partition_pairs())
def test_lattice_laws(triple):
    a, b, c = triple
    assert a.meet(b) == b.meet(a)
    assert a.join(b) == b.join(a)
    assert a.meet(b).meet(c) == a.meet(b.meet(c))
    assert a.join(b).join(c) == a.join(b.join(c))
    assert a.meet(a.join(b)) == a
    assert a.join(a.meet(b)) == a
    assert a.meet(b).refines(a)
    assert a.refines(a.join(b))


# -- predicates ---------------------------------------------------------------


def test_non_flat_basic():
    assert not Partition.from_blocks(1, 2, [[(1, 1), (1, 2)]]).is_non_flat()
    assert Partition.bottom(3, 2).is_non_flat()


def test_non_flat_grid_examples():
    # a 3x4 grid: one column-spanning chain keeps rows distinct inside blocks
    nonflat = Partition.from_blocks(3, 4, [
        [(1, 1), (2, 1), (3, 1)], [(1, 3), (2, 3)], [(2, 2), (3, 2)],
        [(3, 3), (2, 4)], [(1, 2)], [(1, 4)], [(3, 4)]])
    assert nonflat.is_non_flat()
    # merging the two chains puts (3,1) and (3,2) into one block
    flat = Partition.from_blocks(3, 4, [
        [(1, 1), (2, 1), (3, 1), (3, 2), (2, 2)], [(1, 3), (2, 3)],
        [(3, 3), (2, 4)], [(1, 2)], [(1, 4)], [(3, 4)]])
    assert not flat.is_non_flat()


def test_connected_basic():
    for p in enumerate_partitions(1, 3):
        assert p.is_connected()
    assert not Partition.bottom(2, 2).is_connected()


def test_connected_grid_examples():
    linked = Partition.from_blocks(5, 4, [
        [(1, 1), (2, 1)], [(4, 2), (2, 2)], [(3, 2), (1, 2)], [(1, 3), (2, 4)],
        [(4, 1), (5, 1)], [(5, 2), (4, 3), (3, 4), (2, 3)],
        [(1, 4)], [(3, 1)], [(3, 3)], [(4, 4)], [(5, 3)], [(5, 4)]])
    assert linked.is_connected()
    split = Partition.from_blocks(5, 4, [
        [(1, 1), (2, 1), (2, 2), (2, 3)], [(1, 2), (1, 3), (1, 4), (2, 4)],
        [(4, 1), (5, 1)], [(3, 2), (4, 2)], [(5, 2), (5, 3), (5, 4)],
        [(4, 3), (3, 4)], [(3, 1)], [(3, 3)], [(4, 4)]])
    assert not split.is_connected()


def test_strict_debug_cross_check():
    parts.STRICT_DEBUG = True
    try:
        for p in enumerate_partitions(2, 3):
            p.is_non_flat()
            p.is_connected()
    finally:
        parts.STRICT_DEBUG = False


# -- index matrices -----------------------------------------------------------


def test_index_matrix_validation():
    with pytest.raises(ValueError, match="repeated"):
        IndexMatrix(entries=((1, 1),), n=3)
    with pytest.raises(ValueError, match="outside"):
        IndexMatrix(entries=((1, 4),), n=3)


def test_partition_of_index_matrix_worked_example():
    matrix = IndexMatrix(entries=(
        (26, 15, 25, 23),
        (19, 23, 17, 5),
        (24, 18, 12, 20),
        (15, 17, 7, 2),
        (2, 26, 27, 30)), n=30)
    p = partition_of_index_matrix(matrix)
    expected = Partition.from_blocks(5, 4, [
        [(1, 1), (5, 2)], [(1, 2), (4, 1)], [(1, 3)], [(1, 4), (2, 2)],
        [(2, 1)], [(2, 3), (4, 2)], [(2, 4)], [(3, 1)], [(3, 2)], [(3, 3)],
        [(3, 4)], [(4, 3)], [(4, 4), (5, 1)], [(5, 3)], [(5, 4)]])
    assert p == expected
    assert p.block_count == 15
    assert p.is_non_flat()


def test_partition_of_index_matrix_small():
    assert partition_of_index_matrix(IndexMatrix(((1, 2, 3),), 3)) == \
        Partition.bottom(1, 3)
    assert partition_of_index_matrix(IndexMatrix(((1, 2), (1, 2)), 3)) == \
        Partition.from_blocks(2, 2, [[(1, 1), (2, 1)], [(1, 2), (2, 2)]])


def test_index_matrix_always_non_flat(rng):
    for _ in range(50):
        n = rng.randint(2, 6)
        j = rng.randint(1, 3)
        k = rng.randint(1, min(2, n))
        rows = tuple(tuple(rng.sample(range(1, n + 1), k)) for _ in range(j))
        assert partition_of_index_matrix(IndexMatrix(rows, n)).is_non_flat()


def test_count_index_matrices_values():
    assert count_index_matrices(Partition.bottom(1, 2), 3) == 6
    p = Partition.bottom(2, 2)  # 4 blocks
    assert count_index_matrices(p, 4) == math.factorial(4)
    five = Partition.bottom(1, 5)
    assert count_index_matrices(five, 4) == 0


def test_count_index_matrices_rejects_flat():
    flat = Partition.from_blocks(1, 2, [[(1, 1), (1, 2)]])
    with pytest.raises(ValueError, match="non-flat"):
        count_index_matrices(flat, 5)


@pytest.mark.parametrize("j,k,n", [(1, 2, 5), (2, 2, 5), (3, 2, 6), (2, 3, 7)])
def test_count_index_matrices_brute_force(j, k, n):
    # group every stack of distinct-index tuples by the partition it realizes
    from collections import Counter
    realized = Counter()
    for stack in product(permutations(range(1, n + 1), k), repeat=j):
        realized[partition_of_index_matrix(IndexMatrix(stack, n)).code] += 1
    for p in enumerate_partitions(j, k):
        if not p.is_non_flat():
            assert realized[p.code] == 0
        elif p.block_count <= n:
            assert count_index_matrices(p, n) == realized[p.code]


# -- cardinalities -------------------------------------------------------------


def test_cnf_cardinality_bound_small():
    for rows, cols in [(1, 3), (2, 2), (2, 3), (3, 2)]:
        count = sum(1 for _ in enumerate_cnf(rows, cols))
        assert count <= math.factorial(rows) ** cols * math.factorial(cols) ** (rows - 1)


def test_count_maximal_cnf_values():
    assert count_maximal_cnf(1, 5) == 1
    assert count_maximal_cnf(2, 2) == 4
    assert count_maximal_cnf(3, 2) == 24


def test_count_maximal_cnf_sandwich():
    for rows in range(1, 6):
        for cols in range(2, 5):
            val = count_maximal_cnf(rows, cols)
            base = ((cols - 1) * cols) ** (rows - 1)
            assert base * math.factorial(rows - 1) <= val <= base * math.factorial(rows)


def test_falling_factorial():
    assert falling_factorial(5, 0) == 1
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(3, 5) == 0


# -- text forms -----------------------------------------------------------------


def test_text_round_trip():
    for p in enumerate_partitions(2, 3):
        assert Partition.from_text(p.to_text()) == p
        assert Partition.from_code_string(2, 3, p.code_string()) == p


def test_text_rejects_garbage():
    with pytest.raises(ValueError):
        Partition.from_text("{(1,1)")
    with pytest.raises(ValueError):
        Partition.from_text("")
