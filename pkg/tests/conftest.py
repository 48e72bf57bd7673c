"""Shared builders for randomized-but-seeded model specs."""

import random

import pytest
from gmpy2 import mpq

from gustats import FiniteModelSpec


def random_probs(rnd, size, denom=8):
    """Strictly positive rational probabilities summing to 1."""
    while True:
        cuts = sorted(rnd.randint(1, denom - 1) for _ in range(size - 1))
        vals = [cuts[0]] if size > 1 else [denom]
        vals += [b - a for a, b in zip(cuts, cuts[1:])]
        if size > 1:
            vals.append(denom - cuts[-1])
        if all(v > 0 for v in vals):
            return tuple(mpq(v, denom) for v in vals)


def random_model(seed, k=2, marks=2, edge_marks=2):
    """A dense random rational kernel model, reproducible from the seed."""
    rnd = random.Random(seed)
    vp = random_probs(rnd, marks)
    ep = random_probs(rnd, edge_marks)
    pair_slots = k * (k - 1) // 2
    size = marks ** k * edge_marks ** pair_slots
    kernel = tuple(mpq(rnd.randint(-6, 6), rnd.randint(1, 4)) for _ in range(size))
    labels = tuple(chr(ord("a") + i) for i in range(marks))
    elabels = tuple(f"e{i}" for i in range(edge_marks))
    return FiniteModelSpec(k=k, vertex_labels=labels, vertex_probs=vp,
                           edge_labels=elabels, edge_probs=ep, kernel=kernel)


@pytest.fixture
def rng():
    return random.Random(20260810)
