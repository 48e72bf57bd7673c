"""Command-line entry point.

Subcommands: partitions, diagram, exact, simulate, report. Every run is
deterministic: simulation configs must carry a seed, nothing reads the
wall clock, and files are written atomically (temp file + rename).

Exit codes: 0 success, 2 usage/config error, 3 resource-cap error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, exact, motifs, partitions, simulate
from .errors import CriticalRegimeError, SizeLimitError


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _resolve_out(args, path) -> Path:
    p = Path(path)
    if args.out_dir and not p.is_absolute():
        return Path(args.out_dir) / p
    return p


def _load_motif(text: str) -> motifs.MotifGraph:
    if Path(text).exists():
        return motifs.motif_from_edge_list(Path(text).read_text(encoding="utf-8"))
    return motifs.motif(text)


# -- partitions ----------------------------------------------------------------


def cmd_partitions(args) -> int:
    if args.blocks is not None and not args.cnf:
        raise ValueError("--blocks only filters the --cnf stream")
    if args.cnf:
        stream = partitions.enumerate_cnf(args.j, args.k, block_count=args.blocks,
                                          cap=args.cap)
    else:
        stream = partitions.enumerate_partitions(args.j, args.k, cap=args.cap)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["code", "blocks"])
    count = 0
    for p in stream:
        writer.writerow([p.code_string(), p.to_text()])
        count += 1
    _write_atomic(_resolve_out(args, args.out), buf.getvalue())
    print(f"wrote {count} partitions of the {args.j}x{args.k} grid to {args.out}")
    return 0


# -- diagram -------------------------------------------------------------------


def cmd_diagram(args) -> int:
    g = _load_motif(args.motif)
    points = motifs.deficiency_diagram(g, args.j, cap=args.cap)
    hull_vertices = set(motifs.upper_hull(points))
    on_hull = motifs.on_upper_hull(points)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["x", "y", "witness_code", "on_hull", "is_vertex"])
    for pt in points:
        writer.writerow([pt.x, pt.y, pt.witness.code_string(),
                         int((pt.x, pt.y) in on_hull),
                         int((pt.x, pt.y) in hull_vertices)])
    _write_atomic(_resolve_out(args, args.out), buf.getvalue())
    table_path = args.d_table
    if table_path is None:
        out = Path(args.out)
        table_path = str(out.with_name(out.stem + "_dtable.csv"))
    profile = motifs.contraction_profile(g, args.j, cap=args.cap)
    tbuf = io.StringIO()
    twriter = csv.writer(tbuf)
    twriter.writerow(["r", "count", "min_edges"])
    for r, (count, min_edges) in profile.items():
        twriter.writerow([r, count, min_edges])
    _write_atomic(_resolve_out(args, table_path), tbuf.getvalue())
    print(f"wrote {len(points)} diagram points to {args.out} "
          f"and the block-count table to {table_path}")
    return 0


# -- exact ---------------------------------------------------------------------


def _rat_json(x) -> list:
    x = exact.rational(x)
    return [int(x.numerator), int(x.denominator)]


def cmd_exact(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec_doc = json.load(fh)
    loaded = exact.model_from_json(spec_doc)
    subgraph_spec = None
    if isinstance(loaded, exact.SubgraphKernelSpec):
        subgraph_spec = loaded
        model = loaded.expand()
    else:
        model = loaded
    report = exact.cumulant_report(model, args.n, args.order, cap=args.cap)

    checks = []
    sup = model.sup_norm()
    for j in range(1, args.order + 1):
        bound = bounds.kernel_cumulant_bound(args.n, model.k, sup, j)
        checks.append({"order": j, "kind": "sup_norm",
                       "bound": _rat_json(bound),
                       "ok": abs(report.cumulants[j - 1]) <= bound})
    out = {
        "schema": 1,
        "type": spec_doc.get("type"),
        "n": args.n,
        "k": model.k,
        "order": args.order,
        "moments": [_rat_json(v) for v in report.moments],
        "cumulants": [_rat_json(v) for v in report.cumulants],
        "bound_checks": checks,
    }
    if subgraph_spec is not None:
        g = subgraph_spec.motif
        p = subgraph_spec.p
        out["mean_exact"] = _rat_json(exact.mean_subgraph_count(subgraph_spec, args.n))
        for j in range(2, args.order + 1):
            bound = bounds.subgraph_cumulant_bound(g, args.n, p, j, cap=args.cap)
            checks.append({"order": j, "kind": "partition_resolved",
                           "bound": _rat_json(bound),
                           "ok": abs(report.cumulants[j - 1]) <= bound})
            if motifs.is_strongly_balanced(g):
                try:
                    rbound = bounds.regime_bound(g, args.n, p, j)
                except CriticalRegimeError:
                    continue
                checks.append({"order": j, "kind": "regime",
                               "regime": bounds.pointwise_regime(g, args.n, p),
                               "bound": _rat_json(rbound),
                               "ok": abs(report.cumulants[j - 1]) <= rbound})
    if args.order >= 3 and report.cumulants[1] > 0:
        k2 = report.cumulants[1]
        normalized = [0.0, 1.0]
        normalized += [float(report.cumulants[j - 1]) / float(k2) ** (j / 2)
                       for j in range(3, args.order + 1)]
        fit = bounds.fit_statulevicius(normalized, gamma=model.k,
                                       orders=range(3, args.order + 1))
        out["statulevicius_fit"] = fit.to_json()
    if args.oracle:
        match = all(
            exact.brute_force_moment(model, args.n, j) == report.moments[j - 1]
            for j in range(1, args.order + 1))
        out["oracle_match"] = bool(match)
    _write_atomic(_resolve_out(args, args.out), json.dumps(out, indent=2) + "\n")
    if args.csv:
        _write_atomic(_resolve_out(args, args.csv), exact.report_to_csv(report))
    print(f"wrote exact report (order {args.order}, n={args.n}) to {args.out}")
    return 0


# -- simulate --------------------------------------------------------------------


def _config_from_json(doc: dict) -> tuple:
    if doc.get("schema") != 1:
        raise ValueError("unsupported or missing schema version (expected 1)")
    for field in ("motif", "point_law", "connection", "n_grid", "schedules",
                  "reps", "seed"):
        if field not in doc:
            raise ValueError(f"config is missing required field {field!r}")
    motif_name = doc["motif"]
    config = simulate.ExperimentConfig(
        motif=_load_motif(motif_name),
        motif_name=motif_name,
        point_law=simulate.point_law_from_json(doc["point_law"]),
        connection=simulate.connection_from_json(doc["connection"]),
        n_grid=tuple(doc["n_grid"]),
        schedules=tuple((s["c"], s["a"]) for s in doc["schedules"]),
        reps=int(doc["reps"]),
        seed=int(doc["seed"]),
    )
    return config, doc.get("mode", "summary"), doc.get("out", {})


def cmd_simulate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    config, mode, outs = _config_from_json(doc)
    if mode == "threshold":
        result = simulate.threshold_experiment(config, threads=args.threads)
    elif mode == "summary":
        result = simulate.run_experiment(config, threads=args.threads)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep_path = _resolve_out(args, outs.get("replicates", "replicates.csv"))
    sum_path = _resolve_out(args, outs.get("summary", "summary.json"))
    _write_atomic(rep_path, simulate.samples_to_csv(result.cells))
    _write_atomic(sum_path,
                  json.dumps(simulate.summary_to_json(result), indent=2) + "\n")
    print(f"wrote {sum(len(c[1]) for c in result.cells)} replicates to {rep_path} "
          f"and the summary to {sum_path}")
    return 0


# -- report -----------------------------------------------------------------------


def _augment_row(motif_name: str, row: dict) -> dict:
    g = _load_motif(motif_name)
    cls = bounds.classify_regime(g, Fraction(str(row["a"])))
    out = dict(row)
    out["variance_regime"] = cls.variance_regime
    out["containment_regime"] = cls.containment_regime
    out["fit_gamma"] = g.vertex_count
    out["delta_fit"] = None
    if row.get("variance") and row["variance"] > 0 and row.get("k3") is not None:
        var = row["variance"]
        normalized = [0.0, 1.0, row["k3"] / var ** 1.5, row["k4"] / var ** 2]
        fit = bounds.fit_statulevicius(normalized, gamma=g.vertex_count,
                                       orders=(3, 4))
        out["delta_fit"] = None if fit.vacuous else fit.delta
    return out


def cmd_report(args) -> int:
    if not args.inputs:
        raise ValueError("no input summaries given")
    merged = []
    sources = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("schema") != 1:
            raise ValueError(f"{path}: unsupported schema")
        sources.append(str(path))
        for row in doc["rows"]:
            merged.append({"source": str(path), "motif": doc["motif"],
                           **_augment_row(doc["motif"], row)})
    out = {"schema": 1, "sources": sources, "rows": merged}
    _write_atomic(_resolve_out(args, args.out), json.dumps(out, indent=2) + "\n")
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["motif", "source", "n", "c", "a", "metric", "value"])
        for row in merged:
            for metric in ("ks", "p_zero", "delta_fit", "mean", "variance"):
                if row.get(metric) is not None:
                    writer.writerow([row["motif"], row["source"], row["n"],
                                     row["c"], row["a"], metric, row[metric]])
        _write_atomic(_resolve_out(args, args.csv), buf.getvalue())
    print(f"merged {len(merged)} rows from {len(sources)} summaries into {args.out}")
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gustats",
        description="Exact partition-diagram moments/cumulants and "
                    "random-connection-model subgraph counting.")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker count for simulation replicates")
    parser.add_argument("--cap", type=int, default=None,
                        help="override the grid-cell enumeration cap")
    parser.add_argument("--out-dir", default=None,
                        help="base directory for relative output paths")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", help="enumerate grid partitions")
    p.add_argument("--j", type=int, required=True, help="number of grid rows")
    p.add_argument("--k", type=int, required=True, help="number of grid columns")
    p.add_argument("--cnf", action="store_true",
                   help="only connected row-injective partitions")
    p.add_argument("--blocks", type=int, default=None,
                   help="restrict the --cnf stream to an exact block count")
    p.add_argument("--out", default="partitions.csv")
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("diagram", help="deficiency diagram of a motif")
    p.add_argument("--motif", required=True, help="built-in name or edge-list file")
    p.add_argument("--j", type=int, required=True, help="number of stacked copies")
    p.add_argument("--out", default="diagram.csv")
    p.add_argument("--d-table", default=None,
                   help="path for the per-block-count min-edge table "
                        "(default: derived from --out)")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("exact", help="exact moments/cumulants of a kernel model")
    p.add_argument("--spec", required=True, help="model spec JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against brute-force enumeration")
    p.add_argument("--out", default="exact.json")
    p.add_argument("--csv", default=None,
                   help="also write the moment/cumulant table as CSV")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="run a simulation experiment config")
    p.add_argument("--config", required=True, help="experiment JSON file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="merge simulation summaries")
    p.add_argument("--inputs", nargs="*", default=[], help="summary JSON files")
    p.add_argument("--out", default="report.json")
    p.add_argument("--csv", default=None, help="also write a plot-ready long CSV")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
