"""Monte Carlo engine for the binomial random-connection model.

Vertices carry i.i.d. positions or finite marks; each unordered pair is
connected independently with probability p_n * H(x_i, x_j), where p_n
follows a power schedule in n. Replicates draw from counter-based
(Philox) streams keyed by a mix of the master seed and the replicate
index, so serial and parallel runs produce bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import norm

from .errors import DegenerateSampleError
from .exact import SubgraphKernelSpec, linear_projection_variance, rational
from .motifs import MotifGraph, automorphism_count, is_strongly_balanced

_MASK64 = (1 << 64) - 1
P_FLOOR = 1e-12


def _mix64(x: int) -> int:
    """SplitMix64 step: decorrelates consecutive integers into stream keys."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def replicate_seed(master: int, replicate_id: int) -> int:
    """Stream key for one replicate: master xor mix(replicate index)."""
    return (master ^ _mix64(replicate_id)) & _MASK64


def _cell_seed(master: int, cell_index: int) -> int:
    # extra mixing layer so cell/replicate derivations cannot collide
    return _mix64(master ^ _mix64(cell_index))


# -- model specification -----------------------------------------------------


@dataclass(frozen=True)
class UniformCube:
    """Points i.i.d. uniform on [0,1]^dim."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class FiniteMarks:
    """Points i.i.d. from a finite mark law (probabilities kept rational)."""

    labels: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        probs = tuple(rational(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != len(self.labels) or sum(probs) != 1 or any(p < 0 for p in probs):
            raise ValueError("mark probabilities must be nonnegative and sum to 1")


@dataclass(frozen=True)
class ConstantConnection:
    value: float

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError("connection value must lie in [0,1]")


@dataclass(frozen=True)
class HardBall:
    """Connect iff the Euclidean distance is at most the radius (no wrapping)."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class ExpDecay:
    """Connection probability exp(-rate * distance)."""

    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be >= 0")


@dataclass(frozen=True)
class TableConnection:
    """Symmetric connection table over finite marks (values kept rational)."""

    values: tuple

    def __post_init__(self):
        rows = tuple(tuple(rational(v) for v in row) for row in self.values)
        object.__setattr__(self, "values", rows)
        m = len(rows)
        for a in range(m):
            if len(rows[a]) != m:
                raise ValueError("connection table must be square")
            for b in range(m):
                if rows[a][b] != rows[b][a]:
                    raise ValueError("connection table must be symmetric")
                if not 0 <= rows[a][b] <= 1:
                    raise ValueError("connection values must lie in [0,1]")


@dataclass(frozen=True)
class RcmSpec:
    """One random-connection model instance: size, law, connection, schedule."""

    n: int
    point_law: object
    connection: object
    p_coeff: float
    p_exponent: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.p_coeff <= 0:
            raise ValueError("schedule coefficient must be positive")
        geometric = isinstance(self.connection, (HardBall, ExpDecay))
        if geometric and not isinstance(self.point_law, UniformCube):
            raise ValueError("distance-based connections need uniform-cube points")
        if isinstance(self.connection, TableConnection):
            if not isinstance(self.point_law, FiniteMarks):
                raise ValueError("a connection table needs a finite mark law")
            if len(self.connection.values) != len(self.point_law.labels):
                raise ValueError("connection table does not match the mark labels")

    @property
    def p_value(self) -> float:
        """Retention probability min(1, c * n**-a), clamped away from zero."""
        p = min(1.0, self.p_coeff * float(self.n) ** (-self.p_exponent))
        return max(p, P_FLOOR)


@dataclass(frozen=True)
class AdjacencyGraph:
    """Sampled graph as per-vertex neighbor bitmasks."""

    n: int
    masks: tuple

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.masks[u] >> v & 1)

    @property
    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self.masks) // 2


def sample_graph(spec: RcmSpec, seed: int) -> AdjacencyGraph:
    """Draw one graph; fully determined by (spec, seed)."""
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    n = spec.n
    law = spec.point_law
    points = marks = None
    if isinstance(law, UniformCube):
        points = rng.random((n, law.dim))
    elif isinstance(law, FiniteMarks):
        probs = np.array([float(p) for p in law.probs], dtype=float)
        probs /= probs.sum()
        marks = rng.choice(len(law.labels), size=n, p=probs)
    else:
        raise TypeError(f"unknown point law {type(law).__name__}")

    if n == 1:
        return AdjacencyGraph(n=1, masks=(0,))
    iu, ju = np.triu_indices(n, 1)
    conn = spec.connection
    if isinstance(conn, ConstantConnection):
        strength = np.full(iu.shape, float(conn.value))
    elif isinstance(conn, HardBall):
        dist = np.linalg.norm(points[iu] - points[ju], axis=1)
        strength = (dist <= conn.radius).astype(float)
    elif isinstance(conn, ExpDecay):
        dist = np.linalg.norm(points[iu] - points[ju], axis=1)
        strength = np.exp(-conn.rate * dist)
    elif isinstance(conn, TableConnection):
        table = np.array([[float(v) for v in row] for row in conn.values])
        strength = table[marks[iu], marks[ju]]
    else:
        raise TypeError(f"unknown connection {type(conn).__name__}")

    keep = rng.random(iu.shape[0]) < spec.p_value * strength
    masks = [0] * n
    for a, b in zip(iu[keep], ju[keep]):
        a, b = int(a), int(b)
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    return AdjacencyGraph(n=n, masks=tuple(masks))


# -- injective subgraph counting ---------------------------------------------


def _search_order(g: MotifGraph) -> list:
    """Motif vertices ordered greedily: high degree first, then most-connected."""
    remaining = set(range(1, g.vertex_count + 1))
    order = []
    while remaining:
        if not order:
            pick = max(remaining, key=lambda v: (g.degree(v), -v))
        else:
            placed = set(order)
            pick = max(remaining,
                       key=lambda v: (len(g.neighbors(v) & placed), g.degree(v), -v))
        order.append(pick)
        remaining.discard(pick)
    return order


def count_injective_homomorphisms(adj: AdjacencyGraph, g: MotifGraph) -> int:
    """Backtracking count of edge-preserving injections of the motif."""
    k = g.vertex_count
    n = adj.n
    if k > n:
        return 0
    order = _search_order(g)
    pos_of = {v: i for i, v in enumerate(order)}
    preds = []
    for i, v in enumerate(order):
        preds.append([pos_of[w] for w in g.neighbors(v) if pos_of[w] < i])
    full = (1 << n) - 1
    masks = adj.masks
    assign = [0] * k
    count = 0

    def rec(depth: int, used: int):
        nonlocal count
        cand = full & ~used
        for q in preds[depth]:
            cand &= masks[assign[q]]
        if depth == k - 1:
            count += cand.bit_count()
            return
        while cand:
            low = cand & -cand
            cand ^= low
            assign[depth] = low.bit_length() - 1
            rec(depth + 1, used | low)

    rec(0, 0)
    return count


def count_subgraphs(adj: AdjacencyGraph, g: MotifGraph) -> int:
    """Injective copies of the motif, each counted once."""
    homs = count_injective_homomorphisms(adj, g)
    a_g = automorphism_count(g)
    copies, rem = divmod(homs, a_g)
    if rem:
        raise RuntimeError(
            f"{homs} injections are not divisible by the automorphism count {a_g}")
    return copies


# -- replicates ---------------------------------------------------------------


@dataclass(frozen=True)
class CountSample:
    replicate_id: int
    n: int
    count: int
    seed_used: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("counts are nonnegative")


def _one_replicate(spec: RcmSpec, g: MotifGraph, master: int, r: int) -> CountSample:
    seed = replicate_seed(master, r)
    graph = sample_graph(spec, seed)
    return CountSample(replicate_id=r, n=spec.n,
                       count=count_subgraphs(graph, g), seed_used=seed)


def _replicate_chunk(args) -> list:
    spec, g, master, start, stop = args
    return [_one_replicate(spec, g, master, r) for r in range(start, stop)]


def run_replicates(spec: RcmSpec, g: MotifGraph, reps: int, seed: int,
                   threads: int = 1) -> list:
    """Independent replicates; output is ordered by replicate id and does not
    depend on the worker count."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if threads <= 1:
        return [_one_replicate(spec, g, seed, r) for r in range(reps)]
    from concurrent.futures import ProcessPoolExecutor

    bounds_ = np.linspace(0, reps, 4 * threads + 1, dtype=int)
    chunks = [(spec, g, seed, int(a), int(b))
              for a, b in zip(bounds_, bounds_[1:]) if a < b]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_replicate_chunk, chunks))
    out = [s for part in parts for s in part]
    out.sort(key=lambda s: s.replicate_id)
    return out


# -- empirical statistics -----------------------------------------------------


def sample_cumulants(samples: Sequence, order: int = 4) -> list:
    """Unbiased k-statistics for orders 1..order (order at most 4)."""
    if not 1 <= order <= 4:
        raise ValueError("order must be between 1 and 4")
    xs = np.asarray(samples, dtype=float)
    r = xs.size
    if r < order + 1:
        raise ValueError(f"need at least {order + 1} samples for order {order}")
    mean = xs.mean()
    d = xs - mean
    out = [float(mean)]
    if order >= 2:
        m2 = float((d ** 2).mean())
        out.append(r / (r - 1) * m2)
    if order >= 3:
        m3 = float((d ** 3).mean())
        out.append(r * r / ((r - 1) * (r - 2)) * m3)
    if order >= 4:
        m4 = float((d ** 4).mean())
        out.append(r * r * ((r + 1) * m4 - 3 * (r - 1) * m2 ** 2)
                   / ((r - 1) * (r - 2) * (r - 3)))
    return out


def ks_distance_to_normal(samples: Sequence, mean: Optional[float] = None,
                          sd: Optional[float] = None) -> float:
    """Sup distance between the standardized empirical CDF and the normal CDF.

    Standardizes by the sample mean and population-style standard deviation
    unless exact values are supplied; the supremum is evaluated at the
    empirical jump points.
    """
    xs = np.asarray(samples, dtype=float)
    if xs.size == 0:
        raise ValueError("empty sample")
    mu = xs.mean() if mean is None else float(mean)
    sigma = xs.std() if sd is None else float(sd)
    if sigma <= 0:
        raise DegenerateSampleError("sample is constant; no standardization exists")
    z = np.sort((xs - mu) / sigma)
    cdf = norm.cdf(z)
    steps = np.arange(1, xs.size + 1) / xs.size
    return float(max(np.max(steps - cdf), np.max(cdf - (steps - 1 / xs.size))))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


# -- experiments ---------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """A grid of model instances: one motif, n grid, schedule list, one seed."""

    motif: MotifGraph
    motif_name: str
    point_law: object
    connection: object
    n_grid: tuple
    schedules: tuple   # (coefficient, exponent) pairs
    reps: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "schedules",
                           tuple((float(c), float(a)) for c, a in self.schedules))
        if not self.n_grid or not self.schedules:
            raise ValueError("n grid and schedule list must be nonempty")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")


@dataclass(frozen=True)
class SummaryRow:
    """Per-(n, schedule) empirical summary."""

    n: int
    c: float
    a: float
    p: float
    reps: int
    mean: float
    variance: float
    k3: Optional[float]
    k4: Optional[float]
    ks: Optional[float]
    p_zero: float
    wilson_low: float
    wilson_high: float
    mean_se: float
    p_positive: float
    sandwich_lower: float
    sandwich_upper: float


@dataclass(frozen=True)
class ExperimentResult:
    motif_name: str
    seed: int
    reps: int
    rows: tuple                  # SummaryRow per cell
    cells: tuple                 # ((n, c, a), tuple(CountSample)) per cell


def _summarize(n: int, c: float, a: float, p: float, counts: Sequence[int]) -> SummaryRow:
    reps = len(counts)
    xs = np.asarray(counts, dtype=float)
    mean = float(xs.mean())
    variance = float(xs.var(ddof=1)) if reps > 1 else 0.0
    k3 = k4 = None
    if reps >= 5:
        _, _, k3, k4 = sample_cumulants(counts, 4)
    ks = None
    if xs.std() > 0:
        ks = ks_distance_to_normal(counts)
    zeros = int(np.sum(xs == 0))
    lo, hi = wilson_interval(zeros, reps)
    m2 = float((xs ** 2).mean())
    sandwich_lower = mean * mean / m2 if m2 > 0 else 0.0
    return SummaryRow(
        n=n, c=c, a=a, p=p, reps=reps, mean=mean, variance=variance,
        k3=k3, k4=k4, ks=ks,
        p_zero=zeros / reps, wilson_low=lo, wilson_high=hi,
        mean_se=math.sqrt(variance / reps) if reps > 0 else 0.0,
        p_positive=1.0 - zeros / reps,
        sandwich_lower=sandwich_lower, sandwich_upper=mean)


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run every (n, schedule) cell of the grid with derived seeds."""
    rows = []
    cells = []
    index = 0
    for n in config.n_grid:
        for c, a in config.schedules:
            spec = RcmSpec(n=n, point_law=config.point_law,
                           connection=config.connection, p_coeff=c, p_exponent=a)
            samples = run_replicates(spec, config.motif, config.reps,
                                     _cell_seed(config.seed, index), threads)
            counts = [s.count for s in samples]
            rows.append(_summarize(n, c, a, spec.p_value, counts))
            cells.append(((n, c, a), tuple(samples)))
            index += 1
    return ExperimentResult(motif_name=config.motif_name, seed=config.seed,
                            reps=config.reps, rows=tuple(rows), cells=tuple(cells))


def threshold_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Containment-threshold run: same grid execution, stricter preconditions.

    The motif must be strongly balanced, and for a finite mark law the
    expanded kernel must have a nonzero linear part (checkable exactly);
    continuous laws carry no such exact check.
    """
    if not is_strongly_balanced(config.motif):
        raise ValueError("threshold experiments need a strongly balanced motif")
    law, conn = config.point_law, config.connection
    if isinstance(law, FiniteMarks):
        m = len(law.labels)
        if isinstance(conn, TableConnection):
            table = conn.values
        elif isinstance(conn, ConstantConnection):
            table = tuple((rational(str(conn.value)),) * m for _ in range(m))
        else:
            table = None
        if table is not None:
            probe = SubgraphKernelSpec(motif=config.motif, mark_labels=law.labels,
                                       mark_probs=law.probs, connection=table,
                                       p=rational(1))
            if linear_projection_variance(probe.expand()) == 0:
                raise ValueError(
                    "kernel has no linear part under this mark law/connection; "
                    "threshold preconditions fail")
    return run_experiment(config, threads)


# -- serialization -------------------------------------------------------------


def samples_to_csv(cells: Iterable) -> str:
    """Replicate CSV: one row per count sample, cell metadata attached."""
    lines = ["n,c,a,replicate_id,seed_used,count"]
    for (n, c, a), samples in cells:
        for s in samples:
            lines.append(f"{n},{c!r},{a!r},{s.replicate_id},{s.seed_used},{s.count}")
    return "\n".join(lines) + "\n"


def samples_from_csv(text: str) -> list:
    """Parse samples_to_csv output back into ((n,c,a), [CountSample]) cells."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    if lines[0] != "n,c,a,replicate_id,seed_used,count":
        raise ValueError("unexpected replicate CSV header")
    cells: dict = {}
    for line in lines[1:]:
        n, c, a, rid, seed_used, count = line.split(",")
        key = (int(n), float(c), float(a))
        cells.setdefault(key, []).append(
            CountSample(replicate_id=int(rid), n=int(n),
                        count=int(count), seed_used=int(seed_used)))
    return [(key, samples) for key, samples in cells.items()]


def summary_to_json(result: ExperimentResult) -> dict:
    return {
        "schema": 1,
        "motif": result.motif_name,
        "seed": result.seed,
        "reps": result.reps,
        "rows": [vars(row).copy() for row in result.rows],
    }


def point_law_from_json(d: dict):
    kind = d.get("type")
    if kind == "uniform":
        return UniformCube(dim=int(d.get("dim", 1)))
    if kind == "finite":
        return FiniteMarks(labels=tuple(d["labels"]),
                           probs=tuple(rational(p) for p in d["probs"]))
    raise ValueError(f"unknown point law type {kind!r}")


def connection_from_json(d: dict):
    kind = d.get("type")
    if kind == "constant":
        return ConstantConnection(value=float(d["value"]))
    if kind == "hard_ball":
        return HardBall(radius=float(d["radius"]))
    if kind == "exp_decay":
        return ExpDecay(rate=float(d["rate"]))
    if kind == "table":
        return TableConnection(values=tuple(tuple(rational(v) for v in row)
                                            for row in d["values"]))
    raise ValueError(f"unknown connection type {kind!r}")
