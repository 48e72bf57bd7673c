"""Sampling, counting, k-statistics, KS distance, experiment plumbing."""

import math
from math import comb

import numpy as np
import pytest
from scipy.stats import norm

from gustats import (
    AdjacencyGraph,
    ConstantConnection,
    DegenerateSampleError,
    ExpDecay,
    ExperimentConfig,
    FiniteMarks,
    HardBall,
    MotifGraph,
    RcmSpec,
    TableConnection,
    UniformCube,
    count_subgraphs,
    ks_distance_to_normal,
    mean_subgraph_count,
    motif,
    rational,
    replicate_seed,
    run_experiment,
    run_replicates,
    sample_cumulants,
    sample_graph,
    threshold_experiment,
    wilson_interval,
)
from gustats.exact import SubgraphKernelSpec
from gustats.simulate import samples_from_csv, samples_to_csv, summary_to_json

TRIANGLE = motif("triangle")


def er_spec(n, p):
    return RcmSpec(n=n, point_law=UniformCube(1),
                   connection=ConstantConnection(1.0), p_coeff=p, p_exponent=0.0)


# -- spec validation -------------------------------------------------------------


def test_rcm_spec_validation():
    with pytest.raises(ValueError, match="coefficient"):
        RcmSpec(n=3, point_law=UniformCube(1),
                connection=ConstantConnection(0.5), p_coeff=0.0, p_exponent=0.0)
    with pytest.raises(ValueError, match="uniform-cube"):
        RcmSpec(n=3, point_law=FiniteMarks(("a",), (1,)),
                connection=HardBall(0.3), p_coeff=1.0, p_exponent=0.0)
    with pytest.raises(ValueError, match="finite mark"):
        RcmSpec(n=3, point_law=UniformCube(1),
                connection=TableConnection(((rational(1),),)), p_coeff=1.0,
                p_exponent=0.0)


def test_p_schedule_clamps():
    spec = RcmSpec(n=10, point_law=UniformCube(1),
                   connection=ConstantConnection(1.0), p_coeff=5.0, p_exponent=0.0)
    assert spec.p_value == 1.0
    tiny = RcmSpec(n=10, point_law=UniformCube(1),
                   connection=ConstantConnection(1.0), p_coeff=1e-30, p_exponent=0.0)
    assert tiny.p_value == 1e-12


# -- sampling ---------------------------------------------------------------------


def test_sure_connection_gives_complete_graph():
    g = sample_graph(er_spec(5, 1.0), seed=7)
    assert g.edge_count == comb(5, 2)
    assert all(g.has_edge(u, v) for u in range(5) for v in range(u + 1, 5))


def test_single_vertex_graph():
    g = sample_graph(er_spec(1, 1.0), seed=7)
    assert g.n == 1 and g.edge_count == 0


def test_sampling_is_deterministic_per_seed():
    spec = RcmSpec(n=12, point_law=UniformCube(2), connection=HardBall(0.4),
                   p_coeff=0.7, p_exponent=0.1)
    assert sample_graph(spec, 99) == sample_graph(spec, 99)
    assert sample_graph(spec, 99) != sample_graph(spec, 100)


def test_edge_count_matches_binomial_mean():
    spec = er_spec(4, 0.5)
    reps = 10_000
    total = sum(sample_graph(spec, replicate_seed(5, r)).edge_count
                for r in range(reps))
    mean = total / reps
    se = math.sqrt(6 * 0.25 / reps)
    assert abs(mean - 3.0) <= 3 * se


def test_finite_marks_with_table():
    spec = RcmSpec(n=30, point_law=FiniteMarks(("a", "b"), ("1/2", "1/2")),
                   connection=TableConnection((("1", "0"), ("0", "1"))),
                   p_coeff=1.0, p_exponent=0.0)
    g = sample_graph(spec, 11)
    assert 0 < g.edge_count < comb(30, 2)  # only same-mark pairs may connect


def test_exp_decay_connection_runs():
    spec = RcmSpec(n=10, point_law=UniformCube(3), connection=ExpDecay(2.0),
                   p_coeff=1.0, p_exponent=0.0)
    assert sample_graph(spec, 3).n == 10


# -- counting ----------------------------------------------------------------------


def test_count_on_complete_graphs():
    for n in range(2, 9):
        g = sample_graph(er_spec(n, 1.0), seed=1)
        for k in range(2, min(4, n) + 1):
            assert count_subgraphs(g, motif(f"complete{k}")) == comb(n, k)


def test_count_empty_graph():
    empty = AdjacencyGraph(n=5, masks=(0,) * 5)
    assert count_subgraphs(empty, TRIANGLE) == 0


def test_count_path_motif_by_hand():
    # path a-b-c-d holds the 3-vertex paths (a,b,c) and (b,c,d)
    path = AdjacencyGraph(n=4, masks=(0b0010, 0b0101, 0b1010, 0b0100))
    assert count_subgraphs(path, motif("path3")) == 2
    assert count_subgraphs(path, TRIANGLE) == 0


def test_count_motif_larger_than_graph():
    g = sample_graph(er_spec(2, 1.0), seed=1)
    assert count_subgraphs(g, TRIANGLE) == 0


# -- replicates ---------------------------------------------------------------------


def test_single_replicate_matches_direct_call():
    spec = er_spec(5, 0.5)
    [sample] = run_replicates(spec, TRIANGLE, 1, seed=31)
    direct = count_subgraphs(sample_graph(spec, replicate_seed(31, 0)), TRIANGLE)
    assert sample.count == direct
    assert sample.replicate_id == 0 and sample.n == 5


def test_replicates_deterministic_and_thread_invariant():
    spec = er_spec(6, 0.4)
    serial = run_replicates(spec, TRIANGLE, 40, seed=77)
    again = run_replicates(spec, TRIANGLE, 40, seed=77)
    threaded = run_replicates(spec, TRIANGLE, 40, seed=77, threads=2)
    assert serial == again == threaded


def test_replicate_mean_and_variance_track_exact_values():
    from gustats import cumulant_report

    exact = SubgraphKernelSpec(motif=TRIANGLE, mark_labels=("x",), mark_probs=(1,),
                               connection=((rational(1),),), p="1/2")
    mu = float(mean_subgraph_count(exact, 4))
    kappa2 = float(cumulant_report(exact.expand(), 4, 2).cumulants[1])
    samples = run_replicates(er_spec(4, 0.5), TRIANGLE, 20_000, seed=2024)
    counts = np.array([s.count for s in samples], dtype=float)
    ks = sample_cumulants(counts, 2)
    se_mean = math.sqrt(ks[1] / len(counts))
    assert abs(ks[0] - mu) <= 3 * se_mean
    # spread of the variance estimator from the sample's fourth moment
    d = counts - counts.mean()
    se_var = math.sqrt(max((d ** 4).mean() - ks[1] ** 2, 0.0) / len(counts))
    assert abs(ks[1] - kappa2) <= 3 * se_var


def test_hard_ball_mean_consistency():
    # two estimator routes: graph replicates vs direct triple sampling of the
    # per-tuple success probability
    n, p, radius, reps = 12, 0.6, 0.35, 4000
    spec = RcmSpec(n=n, point_law=UniformCube(2), connection=HardBall(radius),
                   p_coeff=p, p_exponent=0.0)
    counts = np.array([s.count for s in
                       run_replicates(spec, TRIANGLE, reps, seed=314)], dtype=float)
    rng = np.random.Generator(np.random.Philox(key=2718))
    triples = rng.random((200_000, 3, 2))
    close = np.ones(len(triples), dtype=bool)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        close &= np.linalg.norm(triples[:, i] - triples[:, j], axis=1) <= radius
    theta_hat = close.mean()
    direct = comb(n, 3) * p ** 3 * theta_hat
    se_direct = comb(n, 3) * p ** 3 * math.sqrt(theta_hat * (1 - theta_hat)
                                                / len(triples))
    se_counts = counts.std(ddof=1) / math.sqrt(reps)
    assert abs(counts.mean() - direct) <= 3 * (se_counts + se_direct)


# -- statistics -----------------------------------------------------------------------


def test_sample_cumulants_constant():
    ks = sample_cumulants([5] * 10, 4)
    assert ks == [5.0, 0.0, 0.0, 0.0]


def test_sample_cumulants_bernoulli_variance():
    xs = [0, 1] * 5000
    ks = sample_cumulants(xs, 2)
    assert ks[1] == pytest.approx(0.25, rel=1e-3)


def test_sample_cumulants_demand_enough_data():
    with pytest.raises(ValueError, match="at least"):
        sample_cumulants([1, 2, 3], 4)


def test_ks_two_point_sample():
    assert ks_distance_to_normal([-1.0, 1.0]) == pytest.approx(norm.cdf(1) - 0.5)


def test_ks_near_normal_quantiles():
    r = 400
    qs = norm.ppf((np.arange(1, r + 1)) / (r + 1))
    assert ks_distance_to_normal(qs, mean=0.0, sd=1.0) < 0.02


def test_ks_rejects_constant_sample():
    with pytest.raises(DegenerateSampleError):
        ks_distance_to_normal([3, 3, 3])


def test_wilson_interval_basics():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and hi < 0.05
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0) and lo > 0.95
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi


# -- experiments -----------------------------------------------------------------------


def small_config(**overrides):
    base = dict(motif=TRIANGLE, motif_name="triangle",
                point_law=UniformCube(1), connection=ConstantConnection(1.0),
                n_grid=(4, 5), schedules=((0.5, 0.0),), reps=60, seed=5)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_run_experiment_shape_and_determinism():
    res1 = run_experiment(small_config())
    res2 = run_experiment(small_config())
    assert res1 == res2
    assert len(res1.rows) == 2
    for row in res1.rows:
        assert row.variance >= 0
        assert 0 <= row.p_zero <= 1
        assert row.wilson_low <= row.p_zero <= row.wilson_high
        assert row.ks is None or 0 <= row.ks <= 1
        assert row.sandwich_lower - 1e-12 <= row.p_positive <= row.sandwich_upper + 1e-12


def test_sure_containment_has_no_zeros():
    res = run_experiment(small_config(schedules=((1.0, 0.0),), n_grid=(3, 4, 5)))
    assert all(row.p_zero == 0.0 for row in res.rows)


def test_threshold_requires_strongly_balanced():
    paw = MotifGraph(4, ((1, 2), (2, 3), (1, 3), (3, 4)))
    with pytest.raises(ValueError, match="strongly balanced"):
        threshold_experiment(small_config(motif=paw, motif_name="paw"))


def test_threshold_rejects_degenerate_finite_kernel():
    cfg = small_config(point_law=FiniteMarks(("a", "b"), ("1/2", "1/2")),
                       connection=ConstantConnection(0.5))
    with pytest.raises(ValueError, match="linear part"):
        threshold_experiment(cfg)


def test_threshold_accepts_informative_finite_kernel():
    # the table must not be symmetric under swapping the marks, or the
    # projections collapse to a constant
    cfg = small_config(point_law=FiniteMarks(("a", "b"), ("1/2", "1/2")),
                       connection=TableConnection((("1", "1/2"), ("1/2", "1/4"))),
                       n_grid=(4,), reps=30)
    res = threshold_experiment(cfg)
    assert len(res.rows) == 1


# -- serialization -----------------------------------------------------------------------


def test_replicate_csv_round_trip():
    res = run_experiment(small_config())
    text = samples_to_csv(res.cells)
    parsed = samples_from_csv(text)
    assert [(key, tuple(samples)) for key, samples in parsed] == list(res.cells)


def test_summary_json_fields():
    res = run_experiment(small_config())
    doc = summary_to_json(res)
    assert doc["schema"] == 1 and doc["motif"] == "triangle"
    assert len(doc["rows"]) == len(res.rows)
    assert {"n", "c", "a", "p", "mean", "ks", "p_zero"} <= set(doc["rows"][0])
