"""Exact rational moments and cumulants of sums over distinct-index tuples.

The statistic is S = sum over ordered k-tuples of distinct indices in 1..n
of a kernel evaluated on per-index marks (i.i.d.) and per-pair marks
(i.i.d., symmetric). Its j-th raw moment equals a sum over row-injective
partitions of the j x k grid: each partition identifies which index marks
and which pair marks coincide across the j kernel factors, contributes the
count of index tuples realizing it (a falling factorial), and an integral
that is a finite weighted sum here because mark spaces are finite.

Everything in this module is exact big-rational arithmetic; no floats.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import comb, factorial, lcm
from typing import Optional, Sequence

from gmpy2 import mpq

from .errors import SizeLimitError
from .motifs import MotifGraph, automorphism_count, motif, motif_from_edge_list
from .partitions import (
    check_cell_cap,
    falling_factorial,
    iter_cnf_codes,
    iter_nonflat_codes,
    iter_partition_codes,
)

BRUTE_FORCE_STATE_CAP = 10_000_000
KERNEL_TABLE_CAP = 10_000_000


def rational(x) -> mpq:
    """Coerce int, Fraction, mpq, 'a/b' string, or (num, den) pair to mpq.

    Floats are read at their printed decimal value (0.1 becomes 1/10), so
    probabilities written in JSON configs mean what they say.
    """
    if isinstance(x, mpq):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, float):
        return mpq(Fraction(repr(x)))
    if isinstance(x, str):
        return mpq(x)
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return mpq(int(x[0]), int(x[1]))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def _pair_slots(k: int) -> list:
    """Positions (u, v), u < v, of the pair arguments, in lexicographic order."""
    return [(u, v) for u in range(k) for v in range(u + 1, k)]


@dataclass(frozen=True)
class FiniteModelSpec:
    """Finite mark spaces and a total rational kernel table.

    kernel is a flat tuple of length m**k * q**P with P = k(k-1)/2 pair
    slots; the entry for vertex marks (x_1..x_k) and pair marks
    (y_(1,2), y_(1,3), ..., y_(k-1,k)) sits at index
    vcode * q**P + ecode with big-endian digit order.
    """

    k: int
    vertex_labels: tuple
    vertex_probs: tuple
    edge_labels: tuple
    edge_probs: tuple
    kernel: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("kernel arity k must be >= 1")
        object.__setattr__(self, "vertex_labels", tuple(self.vertex_labels))
        object.__setattr__(self, "edge_labels", tuple(self.edge_labels))
        vp = tuple(rational(x) for x in self.vertex_probs)
        ep = tuple(rational(x) for x in self.edge_probs)
        kern = tuple(rational(x) for x in self.kernel)
        object.__setattr__(self, "vertex_probs", vp)
        object.__setattr__(self, "edge_probs", ep)
        object.__setattr__(self, "kernel", kern)
        for probs, name in ((vp, "vertex"), (ep, "edge")):
            if not probs:
                raise ValueError(f"{name} space is empty")
            if any(p < 0 for p in probs):
                raise ValueError(f"{name} probabilities must be nonnegative")
            if sum(probs) != 1:
                raise ValueError(f"{name} probabilities must sum to 1")
        if len(self.vertex_labels) != len(vp) or len(self.edge_labels) != len(ep):
            raise ValueError("labels and probabilities differ in length")
        if len(kern) != self.table_size:
            raise ValueError(
                f"kernel table has {len(kern)} entries, expected {self.table_size}")

    @property
    def vertex_size(self) -> int:
        return len(self.vertex_labels)

    @property
    def edge_size(self) -> int:
        return len(self.edge_labels)

    @property
    def pair_slot_count(self) -> int:
        return self.k * (self.k - 1) // 2

    @property
    def table_size(self) -> int:
        return self.vertex_size ** self.k * self.edge_size ** self.pair_slot_count

    def kernel_value(self, vertex_marks: Sequence[int], pair_marks: Sequence[int]) -> mpq:
        """Kernel entry for mark indices (not labels)."""
        idx = 0
        for x in vertex_marks:
            idx = idx * self.vertex_size + x
        for y in pair_marks:
            idx = idx * self.edge_size + y
        return self.kernel[idx]

    def sup_norm(self) -> mpq:
        return max(abs(v) for v in self.kernel)

    @classmethod
    def from_function(cls, k, vertex_space, edge_space, fn) -> "FiniteModelSpec":
        """Tabulate fn(vertex_mark_indices, pair_mark_indices) over the domain.

        vertex_space and edge_space are (labels, probs) pairs.
        """
        vlabels, vprobs = vertex_space
        elabels, eprobs = edge_space
        m, q = len(vlabels), len(elabels)
        P = k * (k - 1) // 2
        if m ** k * q ** P > KERNEL_TABLE_CAP:
            raise SizeLimitError("kernel table would exceed the size cap")
        table = [rational(fn(xs, ys))
                 for xs in product(range(m), repeat=k)
                 for ys in product(range(q), repeat=P)]
        return cls(k=k, vertex_labels=tuple(vlabels), vertex_probs=tuple(vprobs),
                   edge_labels=tuple(elabels), edge_probs=tuple(eprobs),
                   kernel=tuple(table))


def vertex_model(k, labels, probs, fn) -> FiniteModelSpec:
    """A spec whose kernel depends on vertex marks only (singleton pair space)."""
    return FiniteModelSpec.from_function(
        k, (tuple(labels), tuple(probs)), (("*",), (mpq(1),)),
        lambda xs, ys: fn(xs))


# -- the partition-sum moment identity ------------------------------------


def _integral_for_code(spec: FiniteModelSpec, code: tuple, order: int) -> mpq:
    """Weighted sum of the identified kernel product for one grid partition.

    Vertex variables are shared within blocks; pair variables are shared
    per unordered block pair arising from the within-row pair slots. The
    sum over pair variables factorizes across components of the pair-
    variable co-occurrence relation, which keeps the exponent small.
    """
    k = spec.k
    m = spec.vertex_size
    q = spec.edge_size
    nblocks = max(code) + 1
    rows = [code[i * k:(i + 1) * k] for i in range(order)]
    slots = _pair_slots(k)

    evar_ids: dict = {}
    row_evars = []
    for rb in rows:
        ids = []
        for u, v in slots:
            a, b = rb[u], rb[v]
            if a == b:
                raise AssertionError(
                    "pair endpoints collapsed into one block; partition is not row-injective")
            key = (a, b) if a < b else (b, a)
            ids.append(evar_ids.setdefault(key, len(evar_ids)))
        row_evars.append(tuple(ids))
    n_evars = len(evar_ids)

    parent = list(range(n_evars))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ids in row_evars:
        for e in ids[1:]:
            ra, rb_ = find(ids[0]), find(e)
            if ra != rb_:
                parent[ra] = rb_
    comp_vars: dict = {}
    for e in range(n_evars):
        comp_vars.setdefault(find(e), []).append(e)
    comp_rows: dict = {root: [] for root in comp_vars}
    bare_rows = []
    for i, ids in enumerate(row_evars):
        if ids:
            comp_rows[find(ids[0])].append(i)
        else:
            bare_rows.append(i)
    comps = [(tuple(comp_vars[r]), tuple(comp_rows[r])) for r in comp_vars]

    vprobs = spec.vertex_probs
    eprobs = spec.edge_probs
    kern = spec.kernel
    yval = [0] * n_evars
    total = mpq(0)

    for assign in product(range(m), repeat=nblocks):
        w = mpq(1)
        for b in assign:
            w *= vprobs[b]
        if w == 0:
            continue
        # vertex part of each row's kernel index; edge digits shift in below
        vparts = []
        for rb in rows:
            idx = 0
            for b in rb:
                idx = idx * m + assign[b]
            vparts.append(idx)
        val = w
        for i in bare_rows:
            val *= kern[vparts[i]]
        if val == 0:
            continue
        for vars_, rows_ in comps:
            s = mpq(0)
            for evals in product(range(q), repeat=len(vars_)):
                pw = mpq(1)
                for y in evals:
                    pw *= eprobs[y]
                if pw == 0:
                    continue
                for pos, e in enumerate(vars_):
                    yval[e] = evals[pos]
                term = pw
                for i in rows_:
                    idx = vparts[i]
                    for e in row_evars[i]:
                        idx = idx * q + yval[e]
                    term *= kern[idx]
                    if term == 0:
                        break
                s += term
            val *= s
            if val == 0:
                break
        total += val
    return total


@lru_cache(maxsize=None)
def _moment_profile(spec: FiniteModelSpec, order: int) -> tuple:
    """Aggregated n-free integrals: pairs (block count, summed integral)."""
    weights: dict = {}
    for code in iter_nonflat_codes(order, spec.k):
        val = _integral_for_code(spec, code, order)
        if val != 0:
            r = max(code) + 1
            weights[r] = weights.get(r, mpq(0)) + val
    return tuple(sorted(weights.items()))


def moment(spec: FiniteModelSpec, n: int, order: int,
           cap: Optional[int] = None) -> mpq:
    """Exact j-th raw moment of the distinct-index kernel sum."""
    if n < 1 or order < 1:
        raise ValueError("n and order must be >= 1")
    check_cell_cap(order, spec.k, cap)
    return sum((falling_factorial(n, r) * w for r, w in _moment_profile(spec, order)),
               mpq(0))


def brute_force_moment(spec: FiniteModelSpec, n: int, order: int,
                       state_cap: int = BRUTE_FORCE_STATE_CAP) -> mpq:
    """Independent oracle: exhaust every joint mark realization.

    Enumerates all vertex-mark words of length n and all pair-mark words
    over the n(n-1)/2 index pairs, evaluates the full statistic on each
    realization and averages its order-th power under the product law.
    """
    if n < spec.k:
        raise ValueError("n must be at least the kernel arity")
    m, q, k = spec.vertex_size, spec.edge_size, spec.k
    npairs = n * (n - 1) // 2
    states = m ** n * q ** npairs
    if states > state_cap:
        raise SizeLimitError(
            f"{states} joint realizations exceed the cap {state_cap}")

    pair_id = {}
    for i in range(n):
        for j2 in range(i + 1, n):
            pair_id[(i, j2)] = len(pair_id)
    slots = _pair_slots(k)

    tuples = list(permutations(range(n), k))
    tup_pairids = []
    for beta in tuples:
        ids = []
        for u, v in slots:
            a, b = beta[u], beta[v]
            ids.append(pair_id[(a, b) if a < b else (b, a)])
        tup_pairids.append(tuple(ids))

    vprobs, eprobs, kern = spec.vertex_probs, spec.edge_probs, spec.kernel
    total = mpq(0)
    for xs in product(range(m), repeat=n):
        wx = mpq(1)
        for x in xs:
            wx *= vprobs[x]
        if wx == 0:
            continue
        vparts = []
        for beta in tuples:
            idx = 0
            for pos in beta:
                idx = idx * m + xs[pos]
            vparts.append(idx)
        for ys in product(range(q), repeat=npairs):
            wy = mpq(1)
            for y in ys:
                wy *= eprobs[y]
            if wy == 0:
                continue
            s = mpq(0)
            for t in range(len(tuples)):
                idx = vparts[t]
                for pid in tup_pairids[t]:
                    idx = idx * q + ys[pid]
                s += kern[idx]
            total += wx * wy * s ** order
    return total


def v_statistic_moment(spec: FiniteModelSpec, n: int, order: int,
                       cap: Optional[int] = None) -> mpq:
    """Moment of the repeated-index variant: all partitions, vertex-only kernel."""
    if spec.edge_size != 1:
        raise ValueError("repeated-index moments need a vertex-only kernel "
                         "(singleton pair space)")
    if n < 1 or order < 1:
        raise ValueError("n and order must be >= 1")
    check_cell_cap(order, spec.k, cap)
    m = spec.vertex_size
    k = spec.k
    vprobs, kern = spec.vertex_probs, spec.kernel
    total = mpq(0)
    for code in iter_partition_codes(order, k):
        nblocks = max(code) + 1
        cnt = falling_factorial(n, nblocks)
        if cnt == 0:
            continue
        rows = [code[i * k:(i + 1) * k] for i in range(order)]
        acc = mpq(0)
        for assign in product(range(m), repeat=nblocks):
            w = mpq(1)
            for b in assign:
                w *= vprobs[b]
            if w == 0:
                continue
            for rb in rows:
                idx = 0
                for b in rb:
                    idx = idx * m + assign[b]
                w *= kern[idx]
                if w == 0:
                    break
            acc += w
        total += cnt * acc
    return total


# -- cumulants -------------------------------------------------------------


def moments_to_cumulants(moments: Sequence) -> list:
    """Raw moments m_1.. -> cumulants, computed two independent ways.

    The set-partition expansion and the classical binomial recursion are
    both evaluated and must agree exactly.
    """
    ms = [rational(x) for x in moments]
    if not ms:
        raise ValueError("need at least one moment")
    J = len(ms)

    via_partitions = []
    for j in range(1, J + 1):
        acc = mpq(0)
        for code in iter_partition_codes(1, j):
            sizes = Counter(code).values()
            nblocks = max(code) + 1
            term = mpq((-1) ** (nblocks - 1) * factorial(nblocks - 1))
            for sz in sizes:
                term *= ms[sz - 1]
            acc += term
        via_partitions.append(acc)

    via_recursion = []
    for j in range(1, J + 1):
        v = ms[j - 1]
        for i in range(1, j):
            v -= comb(j - 1, i - 1) * via_recursion[i - 1] * ms[j - 1 - i]
        via_recursion.append(v)

    assert via_partitions == via_recursion, \
        "partition expansion and recursion disagree"
    return via_recursion


@dataclass(frozen=True)
class CumulantReport:
    """Exact moments and cumulants of the statistic up to a given order."""

    n: int
    k: int
    order: int
    moments: tuple
    cumulants: tuple

    def __post_init__(self):
        assert self.cumulants[0] == self.moments[0]
        if self.order >= 2:
            assert self.cumulants[1] == self.moments[1] - self.moments[0] ** 2


def cumulant_report(spec: FiniteModelSpec, n: int, order: int,
                    cap: Optional[int] = None) -> CumulantReport:
    ms = [moment(spec, n, j, cap) for j in range(1, order + 1)]
    return CumulantReport(n=n, k=spec.k, order=order,
                          moments=tuple(ms),
                          cumulants=tuple(moments_to_cumulants(ms)))


# -- one-coordinate projections and the variance split ---------------------


def marginal(spec: FiniteModelSpec, ell: int) -> dict:
    """Kernel mean with vertex coordinate ell pinned, as label -> rational."""
    if not 1 <= ell <= spec.k:
        raise ValueError(f"coordinate must be in 1..{spec.k}")
    m, q, k = spec.vertex_size, spec.edge_size, spec.k
    P = spec.pair_slot_count
    vprobs, eprobs, kern = spec.vertex_probs, spec.edge_probs, spec.kernel
    q_to_slots = q ** P
    out = {}
    for x in range(m):
        acc = mpq(0)
        for others in product(range(m), repeat=k - 1):
            xs = others[:ell - 1] + (x,) + others[ell - 1:]
            w = mpq(1)
            for o in others:
                w *= vprobs[o]
            if w == 0:
                continue
            idx = 0
            for d in xs:
                idx = idx * m + d
            base = idx * q_to_slots
            for ys in product(range(q), repeat=P):
                wy = mpq(1)
                for y in ys:
                    wy *= eprobs[y]
                if wy == 0:
                    continue
                eidx = 0
                for y in ys:
                    eidx = eidx * q + y
                acc += w * wy * kern[base + eidx]
        out[spec.vertex_labels[x]] = acc
    return out


def linear_projection_variance(spec: FiniteModelSpec) -> mpq:
    """Variance of the summed one-coordinate projections at a single mark.

    Positive iff the statistic has a nondegenerate linear part; the
    normal-approximation bounds in the bounds module assume positivity.
    """
    per_mark = [mpq(0)] * spec.vertex_size
    for ell in range(1, spec.k + 1):
        marg = marginal(spec, ell)
        for x, lab in enumerate(spec.vertex_labels):
            per_mark[x] += marg[lab]
    mean = sum((p * g for p, g in zip(spec.vertex_probs, per_mark)), mpq(0))
    mean_sq = sum((p * g * g for p, g in zip(spec.vertex_probs, per_mark)), mpq(0))
    return mean_sq - mean * mean


@dataclass(frozen=True)
class VarianceDecomposition:
    """Second cumulant split into its dominant and small-block parts."""

    leading: mpq
    remainder: mpq


def variance_decomposition(spec: FiniteModelSpec, n: int,
                           cap: Optional[int] = None) -> VarianceDecomposition:
    """Split the variance into the maximal-overlap term and the rest.

    leading = (n falling to 2k-1) times the linear projection variance;
    the remainder is cross-checked to equal the contribution of connected
    row-injective partitions with at most 2k-2 blocks.
    """
    k = spec.k
    if n < 2 * k - 1:
        raise ValueError(f"n must be at least {2 * k - 1}")
    leading = falling_factorial(n, 2 * k - 1) * linear_projection_variance(spec)
    m1 = moment(spec, n, 1, cap)
    m2 = moment(spec, n, 2, cap)
    remainder = (m2 - m1 * m1) - leading

    mean_integral = _integral_for_code(spec, tuple(range(k)), 1)
    small = mpq(0)
    for code in iter_cnf_codes(2, k):
        nblocks = max(code) + 1
        if nblocks <= 2 * k - 2:
            cov = _integral_for_code(spec, code, 2) - mean_integral ** 2
            small += falling_factorial(n, nblocks) * cov
    assert small == remainder, \
        "remainder is not carried by the small-block partitions alone"
    return VarianceDecomposition(leading=leading, remainder=remainder)


# -- subgraph-count kernels -------------------------------------------------


@dataclass(frozen=True)
class SubgraphKernelSpec:
    """Marked random-graph subgraph counting as a kernel model.

    Vertices carry i.i.d. finite marks; an edge between marks (a, b)
    appears independently with probability p * connection[a][b]. The
    kernel indicates that all motif edges are present, scaled by the
    motif's automorphism count so the statistic counts subgraphs once.
    """

    motif: MotifGraph
    mark_labels: tuple
    mark_probs: tuple
    connection: tuple
    p: mpq

    def __post_init__(self):
        object.__setattr__(self, "mark_labels", tuple(self.mark_labels))
        probs = tuple(rational(x) for x in self.mark_probs)
        object.__setattr__(self, "mark_probs", probs)
        conn = tuple(tuple(rational(x) for x in row) for row in self.connection)
        object.__setattr__(self, "connection", conn)
        object.__setattr__(self, "p", rational(self.p))
        m = len(self.mark_labels)
        if len(probs) != m or any(p < 0 for p in probs) or sum(probs) != 1:
            raise ValueError("mark probabilities must be nonnegative and sum to 1")
        if len(conn) != m or any(len(row) != m for row in conn):
            raise ValueError("connection table must be square over the marks")
        for a in range(m):
            for b in range(m):
                if conn[a][b] != conn[b][a]:
                    raise ValueError("connection table must be symmetric")
                if not 0 <= conn[a][b] <= 1:
                    raise ValueError("connection values must lie in [0,1]")
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0,1]")

    def expand(self) -> FiniteModelSpec:
        """Exact finite-model form of the indicator kernel.

        Pair marks are uniform on a grid of D atoms with D the lcm of the
        denominators of the retention probabilities p*connection[a][b];
        thresholding atom t at t <= D * p * H gives each pair exactly its
        Bernoulli retention probability, so the expansion is
        distribution-exact while staying rational.
        """
        g = self.motif
        k = g.vertex_count
        m = len(self.mark_labels)
        a_g = automorphism_count(g)
        theta = [[self.p * self.connection[a][b] for b in range(m)] for a in range(m)]
        dens = [int(theta[a][b].denominator) for a in range(m) for b in range(m)]
        grid = lcm(*dens) if dens else 1
        slots = _pair_slots(k)
        slot_of_pair = {pair: i for i, pair in enumerate(slots)}
        motif_slots = [(slot_of_pair[(u - 1, v - 1)], u - 1, v - 1) for u, v in g.edges]
        inv_a = mpq(1, a_g)

        def fn(xs, ys):
            for slot, u, v in motif_slots:
                if ys[slot] + 1 > grid * theta[xs[u]][xs[v]]:
                    return mpq(0)
            return inv_a

        edge_labels = tuple(str(t + 1) for t in range(grid))
        edge_probs = tuple(mpq(1, grid) for _ in range(grid))
        return FiniteModelSpec.from_function(
            k, (self.mark_labels, self.mark_probs), (edge_labels, edge_probs), fn)


def mean_subgraph_count(spec: SubgraphKernelSpec, n: int) -> mpq:
    """Exact expected subgraph count, directly from the mark distribution."""
    g = spec.motif
    k = g.vertex_count
    if n < k:
        raise ValueError("n must be at least the motif size")
    m = len(spec.mark_labels)
    conn = spec.connection
    acc = mpq(0)
    for xs in product(range(m), repeat=k):
        w = mpq(1)
        for x in xs:
            w *= spec.mark_probs[x]
        if w == 0:
            continue
        for u, v in g.edges:
            w *= conn[xs[u - 1]][xs[v - 1]]
            if w == 0:
                break
        acc += w
    return (falling_factorial(n, k) * spec.p ** g.edge_count
            / automorphism_count(g)) * acc


# -- JSON forms --------------------------------------------------------------


def _rat_to_json(x) -> list:
    x = rational(x)
    return [int(x.numerator), int(x.denominator)]


def model_to_json(spec) -> dict:
    """JSON dict for either spec flavor (schema 1)."""
    if isinstance(spec, FiniteModelSpec):
        return {
            "schema": 1,
            "type": "finite_model",
            "k": spec.k,
            "vertex_space": {"labels": list(spec.vertex_labels),
                             "probs": [_rat_to_json(p) for p in spec.vertex_probs]},
            "edge_space": {"labels": list(spec.edge_labels),
                           "probs": [_rat_to_json(p) for p in spec.edge_probs]},
            "kernel": [_rat_to_json(v) for v in spec.kernel],
        }
    if isinstance(spec, SubgraphKernelSpec):
        return {
            "schema": 1,
            "type": "subgraph_kernel",
            "motif": {"vertices": spec.motif.vertex_count,
                      "edges": [list(e) for e in spec.motif.edges]},
            "marks": {"labels": list(spec.mark_labels),
                      "probs": [_rat_to_json(p) for p in spec.mark_probs]},
            "connection": [[_rat_to_json(v) for v in row] for row in spec.connection],
            "p": _rat_to_json(spec.p),
        }
    raise TypeError(f"cannot serialize {type(spec).__name__}")


def _motif_from_json(d) -> MotifGraph:
    if isinstance(d, str):
        return motif(d)
    if "name" in d:
        return motif(d["name"])
    if "path" in d:
        with open(d["path"], "r", encoding="utf-8") as fh:
            return motif_from_edge_list(fh.read())
    return MotifGraph(int(d["vertices"]), tuple(tuple(e) for e in d["edges"]))


def model_from_json(d: dict):
    """Parse a spec dict produced by model_to_json (or hand-written)."""
    if d.get("schema") != 1:
        raise ValueError("unsupported or missing schema version (expected 1)")
    kind = d.get("type")
    if kind == "finite_model":
        return FiniteModelSpec(
            k=int(d["k"]),
            vertex_labels=tuple(d["vertex_space"]["labels"]),
            vertex_probs=tuple(rational(p) for p in d["vertex_space"]["probs"]),
            edge_labels=tuple(d["edge_space"]["labels"]),
            edge_probs=tuple(rational(p) for p in d["edge_space"]["probs"]),
            kernel=tuple(rational(v) for v in d["kernel"]),
        )
    if kind == "subgraph_kernel":
        return SubgraphKernelSpec(
            motif=_motif_from_json(d["motif"]),
            mark_labels=tuple(d["marks"]["labels"]),
            mark_probs=tuple(rational(p) for p in d["marks"]["probs"]),
            connection=tuple(tuple(rational(v) for v in row)
                             for row in d["connection"]),
            p=rational(d["p"]),
        )
    raise ValueError(f"unknown spec type {kind!r}")


def report_to_json(report: CumulantReport) -> dict:
    return {
        "schema": 1,
        "n": report.n,
        "k": report.k,
        "order": report.order,
        "moments": [_rat_to_json(v) for v in report.moments],
        "cumulants": [_rat_to_json(v) for v in report.cumulants],
    }


def report_from_json(d: dict) -> CumulantReport:
    if d.get("schema") != 1:
        raise ValueError("unsupported or missing schema version (expected 1)")
    return CumulantReport(
        n=int(d["n"]), k=int(d["k"]), order=int(d["order"]),
        moments=tuple(rational(v) for v in d["moments"]),
        cumulants=tuple(rational(v) for v in d["cumulants"]))


def report_to_csv(report: CumulantReport) -> str:
    lines = ["order,moment,cumulant"]
    for j, (mom, kap) in enumerate(zip(report.moments, report.cumulants), start=1):
        lines.append(f"{j},{mom},{kap}")
    return "\n".join(lines) + "\n"


def report_from_csv(text: str, n: int = 0, k: int = 0) -> CumulantReport:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if lines[0] != "order,moment,cumulant":
        raise ValueError("unexpected CSV header")
    moments, cumulants = [], []
    for expected, line in enumerate(lines[1:], start=1):
        j, mom, kap = line.split(",")
        if int(j) != expected:
            raise ValueError("orders out of sequence")
        moments.append(mpq(mom))
        cumulants.append(mpq(kap))
    return CumulantReport(n=n, k=k, order=len(moments),
                          moments=tuple(moments), cumulants=tuple(cumulants))
