"""Command-line surface: generate, build, analyze, probe, sweep, validate.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .analysis import UNREACHABLE
from .build import build_bucketed, build_naive, load_graph, save_graph, validate_graph
from .experiments import analyze_graph, generate_points, load_config, metric_records, sweep
from .geometry import (
    ModelParams,
    PolarPoint,
    calibrate_tube_cutoff,
    hyperbolic_distance,
    radial_cdf,
    radial_quantile,
)
from .points import load_points, rng_for, sample_binomial, save_points, STREAM_PROBES
from .probes import (
    distances_to_core,
    extract_core,
    find_exploding_path,
    simultaneous_breadth_exploration,
)


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hrglab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample a point file")
    gen.add_argument("--n", type=int, required=True, help="target vertex count")
    gen.add_argument("--alpha", type=float, required=True)
    gen.add_argument("--nu", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--model", choices=["binomial", "poisson"], default="binomial")
    gen.add_argument("--out", required=True, help="output point file (.hrgp)")

    bld = sub.add_parser("build", help="build the adjacency graph from a point file")
    bld.add_argument("points", help="input point file")
    bld.add_argument("--method", choices=["bucketed", "naive"], default="bucketed")
    bld.add_argument("--c0", type=float, default=10.0, help="type-sum cutoff for pruning windows")
    bld.add_argument("--out", required=True, help="output graph file (.hrgg)")

    ana = sub.add_parser("analyze", help="measure a built graph; emits metric JSON-lines")
    ana.add_argument("points")
    ana.add_argument("graph")
    ana.add_argument("--pairs", type=int, default=500)
    ana.add_argument("--seed", type=int, default=0)
    ana.add_argument("--out", help="metrics JSON-lines path (default: stdout only)")

    prb = sub.add_parser("probe", help="run structural probes; emits JSON-lines records")
    prb.add_argument("points")
    prb.add_argument("graph")
    prb.add_argument("--probes", default="core", help="comma list: core,exploding,distance_to_core,umbrella")
    prb.add_argument("--pairs", type=int, default=200, help="sampled roots per probe")
    prb.add_argument("--seed", type=int, default=0)
    prb.add_argument("--zeta", type=float, default=None)
    prb.add_argument("--omega-mode", choices=["loglog", "log"], default="loglog")
    prb.add_argument("--out", help="records JSON-lines path (default: stdout)")

    swp = sub.add_parser("sweep", help="run a config grid and aggregate the results")
    swp.add_argument("config", help="flat key=value config file")
    swp.add_argument("--out", help="override the config's output directory")
    swp.add_argument("--threads", type=int, help="override the config's job parallelism")

    val = sub.add_parser("validate", help="run the built-in invariant suites")
    val.add_argument("--n", type=int, default=500)
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--eps", type=float, default=0.2)
    val.add_argument("--c0", type=float, default=10.0)
    return parser


def _cmd_generate(args) -> int:
    params = ModelParams.from_n(args.n, args.alpha, args.nu)
    ps = generate_points(params, args.model, args.seed)
    save_points(ps, args.out)
    print(f"wrote {args.out}: {len(ps)} points (model={args.model}, seed={args.seed})")
    return 0


def _cmd_build(args) -> int:
    ps = load_points(args.points)
    g = build_naive(ps) if args.method == "naive" else build_bucketed(ps, c0=args.c0)
    save_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n} m={g.m} method={g.build_method}")
    return 0


def _cmd_analyze(args) -> int:
    ps = load_points(args.points)
    g = load_graph(args.graph, ps)
    row = analyze_graph(ps, g, pairs=args.pairs, seed=args.seed)
    records = metric_records(Path(args.graph).stem, row)
    if args.out:
        with open(args.out, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
    print(json.dumps(row.as_dict()))
    return 0


def _probe_records(ps, g, probes, num_roots, seed, zeta, omega_mode):
    params = ps.params
    rng = rng_for(seed, STREAM_PROBES)
    records = []
    omega = math.log(math.log(params.big_r)) if omega_mode == "loglog" else math.log(params.big_r)
    for probe in probes:
        if probe == "core":
            report = extract_core(g, omega=omega)
            records.append(
                {
                    "probe": "core", "root": None, "seed": seed,
                    "outcome": "clique" if report.clique_verified else "not_clique",
                    "path_or_size": int(len(report.core)), "rounds": None,
                    "validation_passed": bool(report.clique_verified),
                }
            )
        elif probe == "exploding":
            thr = math.log(math.log(params.big_r))
            starts = np.flatnonzero(ps.types >= thr)
            if len(starts) == 0:
                continue
            roots = rng.choice(starts, size=min(num_roots, len(starts)), replace=False)
            for root in roots:
                path = find_exploding_path(g, int(root), zeta=zeta)
                records.append(
                    {
                        "probe": "exploding", "root": int(root), "seed": seed,
                        "outcome": "found" if path is not None else "none",
                        "path_or_size": None if path is None else len(path.vertices),
                        "rounds": None,
                        "validation_passed": path is not None,
                    }
                )
        elif probe == "distance_to_core":
            dist = distances_to_core(g)
            roots = rng.integers(0, g.n, size=min(num_roots, g.n))
            for root in roots:
                d = int(dist[root])
                records.append(
                    {
                        "probe": "distance_to_core", "root": int(root), "seed": seed,
                        "outcome": "ok" if d != UNREACHABLE else "unreachable",
                        "path_or_size": None if d == UNREACHABLE else d,
                        "rounds": None, "validation_passed": True,
                    }
                )
        elif probe == "umbrella":
            roots = rng.integers(0, g.n, size=min(num_roots, g.n))
            for root in roots:
                state, umbrella = simultaneous_breadth_exploration(g, int(root))
                records.append(
                    {
                        "probe": "umbrella", "root": int(root), "seed": seed,
                        "outcome": "ok" if umbrella is not None else (state.failure or "failed"),
                        "path_or_size": None if umbrella is None else umbrella.size,
                        "rounds": state.rounds,
                        "validation_passed": umbrella is not None,
                    }
                )
        else:
            raise UsageError(f"unknown probe {probe!r}")
    return records


def _cmd_probe(args) -> int:
    ps = load_points(args.points)
    g = load_graph(args.graph, ps)
    probes = [p.strip() for p in args.probes.split(",") if p.strip()]
    records = _probe_records(ps, g, probes, args.pairs, args.seed, args.zeta, args.omega_mode)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for rec in records:
            out.write(json.dumps(rec) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.out or args.threads:
        from dataclasses import replace

        config = replace(
            config,
            out_dir=args.out or config.out_dir,
            threads=args.threads or config.threads,
        )
    summary = sweep(config)
    print(f"wrote {summary}")
    return 0


def _cmd_validate(args) -> int:
    """Small built-in invariant battery; any failure exits 2."""
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}{(': ' + detail) if detail else ''}")

    params = ModelParams.from_n(args.n, 0.75, 1.0)
    rng = rng_for(args.seed, STREAM_PROBES)

    u = rng.random(10_000)
    r = radial_quantile(u, params)
    err = float(np.abs(radial_cdf(r, params) - u).max())
    record("radial quantile/cdf roundtrip", err < 1e-12, f"max err {err:.2e}")

    pts = [
        PolarPoint(float(rr), float(th))
        for rr, th in zip(radial_quantile(rng.random(300), params), rng.random(300) * 2 * math.pi)
    ]
    sym_ok = all(
        math.isclose(hyperbolic_distance(a, b), hyperbolic_distance(b, a), rel_tol=0, abs_tol=0)
        for a, b in zip(pts[:-1], pts[1:])
    )
    record("distance symmetry", sym_ok)
    tri_ok = True
    for a, b, c in zip(pts[::3], pts[1::3], pts[2::3]):
        if hyperbolic_distance(a, c) > hyperbolic_distance(a, b) + hyperbolic_distance(b, c) + 1e-9:
            tri_ok = False
            break
    record("triangle inequality", tri_ok)

    try:
        tube = calibrate_tube_cutoff(params, eps=args.eps, c0=args.c0, num_pairs=100_000, seed=args.seed)
        record("tube calibration", True, f"c0 = {tube.c0:g}")
    except RuntimeError as exc:
        record("tube calibration", False, str(exc))

    equal = True
    for seed in range(args.seed, args.seed + 3):
        ps = sample_binomial(params, args.n, seed)
        g_naive = build_naive(ps)
        g_fast = build_bucketed(ps)
        if not (
            np.array_equal(g_naive.offsets, g_fast.offsets)
            and np.array_equal(g_naive.neighbors, g_fast.neighbors)
        ):
            equal = False
            break
    record("builder equivalence", equal, f"n = {args.n}, 3 seeds")

    ps = sample_binomial(params, args.n, args.seed)
    g = build_bucketed(ps)
    try:
        validate_graph(g)
        record("graph invariants", True, f"n={g.n} m={g.m}")
    except ValueError as exc:
        record("graph invariants", False, str(exc))
    report = extract_core(g)
    record("core clique", report.clique_verified, f"core size {len(report.core)}")

    if all(ok for _, ok, _ in checks):
        return 0
    raise ValidationFailure(f"{sum(not ok for _, ok, _ in checks)} validation check(s) failed")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "generate": _cmd_generate,
            "build": _cmd_build,
            "analyze": _cmd_analyze,
            "probe": _cmd_probe,
            "sweep": _cmd_sweep,
            "validate": _cmd_validate,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
