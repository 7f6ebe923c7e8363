"""Batch front end: build polytopes from latent CSVs, compose networks,
verify spec suites, and run the pixel-space box baseline.

Exit codes for `verify`: 0 all HOLDS, 2 any VIOLATED, 3 any UNKNOWN,
1 for configuration or file errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import geometry, nnmodel, verifier
from .speclang import load_manifest
from .verifier import Budget

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED, EXIT_UNKNOWN = 0, 1, 2, 3


def _parse_range(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    if not _:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return float(lo), float(hi)


def _load_vector(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return np.array([float(tok) for tok in fh.read().split()], dtype=np.float64)


def cmd_build_polytope(args) -> int:
    samples = geometry.load_samples_csv(args.csv)
    lo, hi = args.action_range
    kept = geometry.filter_samples(samples, (lo, hi), args.sigma_cap)
    if not kept:
        print(f"error: no samples with action in [{lo}, {hi}] survive filtering", file=sys.stderr)
        return EXIT_ERROR
    pts = np.array([s.z for s in kept])
    tags = {s.tag for s in kept}
    tag = tags.pop() if len(tags) == 1 else "mixed"
    stem = os.path.splitext(os.path.basename(args.out))[0]
    if args.mode == "hull":
        poly = geometry.convex_hull(pts, action_interval=(lo, hi), source_tag=tag, poly_id=f"{stem}:base")
    else:
        k = int(args.mode.split(":", 1)[1])
        poly = geometry.outer_approximate(
            pts, k, seed=args.seed, action_interval=(lo, hi), source_tag=tag, poly_id=f"{stem}:base"
        )
    if args.epsilon > 0:
        poly = geometry.inflate(poly, args.epsilon)
    geometry.save_polytope(poly, args.out)
    print(
        f"{args.out}: dim={poly.dim} vertices={poly.n_vertices()} "
        f"halfspaces={len(poly.halfspaces)} action=[{lo:g},{hi:g}] "
        f"epsilon={poly.inflation_radius:g} tag={tag} samples={len(kept)}/{len(samples)}"
    )
    return EXIT_OK


def cmd_compose(args) -> int:
    decoder = nnmodel.load_network(args.decoder)
    controller = nnmodel.load_network(args.controller)
    combined = nnmodel.compose(decoder, controller)
    nnmodel.save_network(combined, args.out)
    print(
        f"{args.out}: input_dim={combined.input_dim} layers={len(combined.layers)} "
        f"relus={combined.relu_count()} output_dim={combined.output_dim}"
    )
    return EXIT_OK


_TABLE_COLS = ("spec", "kind", "status", "paper", "lower", "upper", "time_s", "subproblems")


def _format_table(rows: list[dict]) -> str:
    def cell(row, col):
        v = row[col]
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    widths = {c: max(len(c), *(len(cell(r, c)) for r in rows)) if rows else len(c) for c in _TABLE_COLS}
    lines = ["  ".join(c.ljust(widths[c]) for c in _TABLE_COLS)]
    lines.append("  ".join("-" * widths[c] for c in _TABLE_COLS))
    for r in rows:
        lines.append("  ".join(cell(r, c).ljust(widths[c]) for c in _TABLE_COLS))
    return "\n".join(lines)


def cmd_verify(args) -> int:
    if args.network:
        net = nnmodel.load_network(args.network)
        net_desc = {"network": args.network}
    else:
        if not (args.decoder and args.controller):
            print("error: need --network or both --decoder and --controller", file=sys.stderr)
            return EXIT_ERROR
        net = nnmodel.compose(nnmodel.load_network(args.decoder), nnmodel.load_network(args.controller))
        net_desc = {"decoder": args.decoder, "controller": args.controller}
    entries = load_manifest(args.specs)
    budget = Budget(max_subproblems=args.max_subproblems, timeout_s=args.timeout)

    records = []
    table_rows = []
    for entry in entries:
        poly = geometry.load_polytope(entry.polytope_path)
        result = verifier.verify_spec(net, entry.spec, poly, method=args.method, budget=budget, seed=args.seed)
        rec = result.to_record()
        rec["kind"] = entry.spec.kind.value
        rec["polytope"] = entry.polytope_path
        records.append(rec)
        table_rows.append(
            {
                "spec": entry.spec.id,
                "kind": entry.spec.kind.value,
                "status": result.status,
                "paper": result.paper_status,
                "lower": float(np.min(result.lower)),
                "upper": float(np.max(result.upper)),
                "time_s": float(result.wall_time_s),
                "subproblems": int(result.subproblems),
            }
        )

    report = {
        "config": {
            **net_desc,
            "specs": args.specs,
            "method": args.method,
            "timeout_s": args.timeout,
            "max_subproblems": args.max_subproblems,
            "seed": args.seed,
            "input_dim": net.input_dim,
        },
        "results": records,
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        out_path = os.path.join(args.out, "report.json")
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
        print(f"report written to {out_path}")
    print(_format_table(table_rows))

    statuses = {r["status"] for r in records}
    if verifier.VIOLATED in statuses:
        return EXIT_VIOLATED
    if verifier.UNKNOWN in statuses:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_oracle(args) -> int:
    net = nnmodel.load_network(args.network)
    poly = geometry.load_polytope(args.polytope)
    pts = geometry.sample_points(poly, args.n, args.seed)
    outs = np.atleast_2d(nnmodel.forward(net, pts))
    lo = outs.min(axis=0)
    hi = outs.max(axis=0)
    print(f"sampled n={args.n} seed={args.seed} min={lo.tolist()} max={hi.tolist()}")
    n_relu = net.relu_count()
    if n_relu <= verifier.ENUM_RELU_CAP:
        res = verifier.exact_range_enumerate(net, poly)
        print(
            f"exact (enumeration over {res.subproblems} cells): "
            f"min={res.lower.tolist()} max={res.upper.tolist()}"
        )
    else:
        print(f"exact enumeration skipped: {n_relu} ReLUs exceed the cap of {verifier.ENUM_RELU_CAP}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    controller = nnmodel.load_network(args.controller)
    x0 = _load_vector(args.image)
    if x0.shape[0] != controller.input_dim:
        print(
            f"error: image vector has {x0.shape[0]} entries, controller expects {controller.input_dim}",
            file=sys.stderr,
        )
        return EXIT_ERROR
    box = verifier.BoxPerturbation(x0, args.delta)
    result = verifier.verify_box_baseline(controller, box, args.interval, spec_id="pixel-box")
    rec = result.to_record()
    rec["pixel_dim"] = controller.input_dim
    rec["delta"] = args.delta
    if args.paired_report:
        with open(args.paired_report, "r", encoding="utf-8") as fh:
            paired = json.load(fh)
        latent_dim = int(paired["config"]["input_dim"])
        latent_times = [float(r["wall_time_s"]) for r in paired["results"]]
        rec["latent_dim"] = latent_dim
        rec["dim_ratio"] = controller.input_dim / latent_dim
        rec["latent_wall_time_s"] = latent_times
        print(
            f"input dims: pixel={controller.input_dim} latent={latent_dim} "
            f"ratio={rec['dim_ratio']:g}"
        )
        print(
            f"wall times: pixel={result.wall_time_s:.6g}s "
            f"latent={', '.join(f'{t:.6g}s' for t in latent_times)}"
        )
    print(
        f"pixel-box: status={result.status} paper={result.paper_status} "
        f"bounds=[{float(np.min(result.lower)):.6g}, {float(np.max(result.upper)):.6g}] "
        f"time={result.wall_time_s:.6g}s"
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        out_path = os.path.join(args.out, "baseline.json")
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(rec, fh, indent=1)
            fh.write("\n")
        print(f"report written to {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latentverify", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    bp = sub.add_parser("build-polytope", help="filter a latent CSV and build a polytope file")
    bp.add_argument("--csv", required=True)
    bp.add_argument("--action-range", type=_parse_range, required=True, metavar="LO:HI")
    bp.add_argument("--epsilon", type=float, default=0.0)
    bp.add_argument("--mode", default="hull", help="hull or outer:K")
    bp.add_argument("--sigma-cap", type=float, default=2.0)
    bp.add_argument("--seed", type=int, default=0)
    bp.add_argument("--out", required=True)
    bp.set_defaults(func=cmd_build_polytope)

    cp = sub.add_parser("compose", help="stack controller after decoder into one NNW file")
    cp.add_argument("--decoder", required=True)
    cp.add_argument("--controller", required=True)
    cp.add_argument("--out", required=True)
    cp.set_defaults(func=cmd_compose)

    vp = sub.add_parser("verify", help="verify a spec manifest and emit a report")
    vp.add_argument("--network", help="combined network (alternative to --decoder/--controller)")
    vp.add_argument("--decoder")
    vp.add_argument("--controller")
    vp.add_argument("--specs", required=True, help="spec manifest JSON")
    vp.add_argument("--method", choices=("crown", "bab"), default="bab")
    vp.add_argument("--timeout", type=float, default=60.0)
    vp.add_argument("--max-subproblems", type=int, default=10_000)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--out", help="directory for report.json")
    vp.set_defaults(func=cmd_verify)

    op = sub.add_parser("oracle", help="sampled extrema plus exact enumeration when small")
    op.add_argument("--network", required=True)
    op.add_argument("--polytope", required=True)
    op.add_argument("--n", type=int, default=1000)
    op.add_argument("--seed", type=int, default=0)
    op.set_defaults(func=cmd_oracle)

    blp = sub.add_parser("baseline", help="pixel-space box verification of the controller")
    blp.add_argument("--controller", required=True)
    blp.add_argument("--image", required=True, help="whitespace-separated pixel vector file")
    blp.add_argument("--delta", type=float, required=True)
    blp.add_argument("--interval", type=_parse_range, required=True, metavar="LO:HI")
    blp.add_argument("--paired-report", help="verify report.json of the paired latent run")
    blp.add_argument("--out", help="directory for baseline.json")
    blp.set_defaults(func=cmd_baseline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, nnmodel.NetworkFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
