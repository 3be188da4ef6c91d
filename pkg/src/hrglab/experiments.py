"""Batch experiment machinery: configuration grids, per-graph analysis rows,
JSON-lines metric records, and sweep aggregation."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .analysis import (
    SAME_COMPONENT_PAIRS,
    clustering_coefficient,
    connected_components,
    degree_histogram,
    sample_pair_distances,
    tail_exponent_estimate,
)
from .build import Graph, build_bucketed, load_graph, save_graph
from .geometry import ModelParams
from .points import PointSet, load_points, sample_binomial, sample_poisson, save_points, rng_for, STREAM_PROBES
from .probes import core_type_threshold, simultaneous_breadth_exploration

__all__ = [
    "ExperimentConfig",
    "ScalingRow",
    "load_config",
    "parse_config",
    "generate_points",
    "analyze_graph",
    "run_cell_seed",
    "sweep",
]

VALID_PROBES = ("core", "exploding", "distance_to_core", "umbrella")


@dataclass(frozen=True)
class ExperimentConfig:
    """A sweep grid plus the knobs shared by every cell."""

    n_list: tuple[int, ...]
    alpha_list: tuple[float, ...]
    nu_list: tuple[float, ...] = (1.0,)
    seeds: tuple[int, ...] = (0,)
    model: str = "binomial"
    pairs: int = 500
    probes: tuple[str, ...] = ()
    out_dir: str = "runs"
    eps: float = 0.2
    c0: float = 10.0
    zeta: float | None = None
    omega_mode: str = "loglog"
    threads: int = 1

    def __post_init__(self) -> None:
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ValueError("n grid must be nonempty with n >= 1")
        if any(a <= 0 for a in self.alpha_list) or any(v <= 0 for v in self.nu_list):
            raise ValueError("alpha and nu grids must be positive")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct per cell")
        if self.model not in ("binomial", "poisson"):
            raise ValueError(f"model must be binomial or poisson, got {self.model!r}")
        if self.omega_mode not in ("loglog", "log"):
            raise ValueError(f"omega_mode must be loglog or log, got {self.omega_mode!r}")
        for p in self.probes:
            if p not in VALID_PROBES:
                raise ValueError(f"unknown probe {p!r}; valid: {VALID_PROBES}")

    def cells(self):
        for n in self.n_list:
            for alpha in self.alpha_list:
                for nu in self.nu_list:
                    yield n, alpha, nu


def _parse_values(raw: str) -> list[str]:
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


def _parse_seeds(raw: str) -> tuple[int, ...]:
    out: list[int] = []
    for tok in _parse_values(raw):
        if ".." in tok:
            lo, hi = tok.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    return tuple(out)


def parse_config(text: str) -> ExperimentConfig:
    """Flat key = value grammar; '#' starts a comment, lists are
    comma-separated, seed ranges may be written lo..hi."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().lower()
        if key in values:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = raw.strip()
    known = {
        "n", "alpha", "nu", "seeds", "model", "pairs", "probes", "out",
        "eps", "c0", "zeta", "omega_mode", "threads",
    }
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "n" not in values or "alpha" not in values:
        raise ValueError("config requires at least 'n' and 'alpha'")
    probes_raw = values.get("probes", "none")
    probes = () if probes_raw in ("none", "") else tuple(_parse_values(probes_raw))
    zeta_raw = values.get("zeta", "auto")
    return ExperimentConfig(
        n_list=tuple(int(v) for v in _parse_values(values["n"])),
        alpha_list=tuple(float(v) for v in _parse_values(values["alpha"])),
        nu_list=tuple(float(v) for v in _parse_values(values.get("nu", "1.0"))),
        seeds=_parse_seeds(values.get("seeds", "0")),
        model=values.get("model", "binomial"),
        pairs=int(values.get("pairs", "500")),
        probes=probes,
        out_dir=values.get("out", "runs"),
        eps=float(values.get("eps", "0.2")),
        c0=float(values.get("c0", "10")),
        zeta=None if zeta_raw == "auto" else float(zeta_raw),
        omega_mode=values.get("omega_mode", "loglog"),
        threads=int(values.get("threads", "1")),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


# ---------------------------------------------------------------------------
# single-graph analysis


@dataclass(frozen=True)
class ScalingRow:
    """One analyzed (cell, seed): every field is reproducible from the
    persisted point and graph files alone."""

    n: int
    alpha: float
    nu: float
    seed: int
    mean_d: float | None
    ratio_to_log_r: float | None
    two_tau: float | None
    giant_fraction: float
    beta_hat: float | None
    clustering: float | None
    core_size: int
    umbrella_q95: float | None = None
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["notes"] = list(self.notes)
        return d


def generate_points(params: ModelParams, model: str, seed: int) -> PointSet:
    if model == "binomial":
        return sample_binomial(params, int(round(params.n_target)), seed)
    if model == "poisson":
        return sample_poisson(params, seed)
    raise ValueError(f"unknown model {model!r}")


def _umbrella_sizes(g: Graph, labeling, num_roots: int, seed: int) -> np.ndarray:
    eligible = np.flatnonzero(labeling.labels != np.arange(g.n)) if g.n else np.empty(0, int)
    # vertices whose label differs from their own index sit in a component of
    # size >= 2 together with the representative; add representatives of
    # multi-vertex components too
    reps = np.unique(labeling.labels[eligible]) if len(eligible) else np.empty(0, int)
    eligible = np.union1d(eligible, reps)
    if len(eligible) == 0:
        return np.empty(0)
    rng = rng_for(seed, STREAM_PROBES)
    roots = rng.choice(eligible, size=min(num_roots, len(eligible)), replace=False)
    sizes = []
    for root in roots:
        _, umbrella = simultaneous_breadth_exploration(g, int(root))
        if umbrella is not None:
            sizes.append(umbrella.size)
    return np.array(sizes, dtype=float)


def analyze_graph(
    ps: PointSet,
    g: Graph,
    pairs: int = 500,
    seed: int = 0,
    probes: tuple[str, ...] = (),
) -> ScalingRow:
    params = ps.params
    labeling = connected_components(g)
    notes: list[str] = []
    mean_d = ratio = None
    if g.n >= 2 and labeling.sizes[0] >= 2:
        sample = sample_pair_distances(g, labeling, pairs, SAME_COMPONENT_PAIRS, seed)
        mean_d = sample.mean
        ratio = sample.ratio_to_log_r
    else:
        notes.append("distances skipped: no component with two vertices")
    tau = params.tau
    beta = None
    try:
        beta = tail_exponent_estimate(degree_histogram(g), seed=seed).beta_hat
    except ValueError as exc:
        notes.append(f"beta_hat skipped: {exc}")
    clustering = None
    try:
        clustering = clustering_coefficient(g, mode="sampled", samples=min(1000, max(g.n, 1)), seed=seed)
    except ValueError as exc:
        notes.append(f"clustering skipped: {exc}")
    core_size = int(np.sum(ps.types >= core_type_threshold(params.big_r))) if len(ps) else 0
    umbrella_q95 = None
    if "umbrella" in probes:
        sizes = _umbrella_sizes(g, labeling, num_roots=max(pairs, 1), seed=seed)
        if len(sizes):
            umbrella_q95 = float(np.quantile(sizes, 0.95))
        else:
            notes.append("umbrella_q95 skipped: no umbrella-eligible component")
    return ScalingRow(
        n=int(round(params.n_target)),
        alpha=params.alpha,
        nu=params.nu,
        seed=seed,
        mean_d=mean_d,
        ratio_to_log_r=ratio,
        two_tau=None if tau is None else 2.0 * tau,
        giant_fraction=labeling.giant_fraction if g.n else 0.0,
        beta_hat=beta,
        clustering=clustering,
        core_size=core_size,
        umbrella_q95=umbrella_q95,
        notes=tuple(notes),
    )


def metric_records(experiment_id: str, row: ScalingRow) -> list[dict]:
    """JSON-lines rows {experiment_id, params, seed, metric, value, stderr}."""
    params = {"n": row.n, "alpha": row.alpha, "nu": row.nu}
    out = []
    for metric, value in (
        ("mean_distance", row.mean_d),
        ("ratio_to_log_r", row.ratio_to_log_r),
        ("two_tau", row.two_tau),
        ("giant_fraction", row.giant_fraction),
        ("beta_hat", row.beta_hat),
        ("clustering", row.clustering),
        ("core_size", row.core_size),
        ("umbrella_q95", row.umbrella_q95),
    ):
        out.append(
            {
                "experiment_id": experiment_id,
                "params": params,
                "seed": row.seed,
                "metric": metric,
                "value": value,
                "stderr": None,
            }
        )
    return out


# ---------------------------------------------------------------------------
# sweep


def _cell_id(n: int, alpha: float, nu: float) -> str:
    return f"n{n}_a{alpha:g}_nu{nu:g}"


def run_cell_seed(config: ExperimentConfig, n: int, alpha: float, nu: float, seed: int) -> dict:
    """Generate, build, analyze one (cell, seed); writes the staged files and
    returns the ScalingRow dict."""
    out = Path(config.out_dir)
    (out / "points").mkdir(parents=True, exist_ok=True)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    params = ModelParams.from_n(n, alpha, nu)
    stem = f"{_cell_id(n, alpha, nu)}_s{seed}"
    points_path = out / "points" / f"{stem}.hrgp"
    graph_path = out / "graphs" / f"{stem}.hrgg"
    if points_path.exists():
        ps = load_points(points_path)
    else:
        ps = generate_points(params, config.model, seed)
        save_points(ps, points_path)
    if graph_path.exists():
        g = load_graph(graph_path, ps)
    else:
        g = build_bucketed(ps, c0=config.c0)
        save_graph(g, graph_path)
    row = analyze_graph(ps, g, pairs=config.pairs, seed=seed, probes=config.probes)
    return row.as_dict()


def _run_job(args):
    config, n, alpha, nu, seed = args
    try:
        return {"ok": True, "cell": _cell_id(n, alpha, nu), "seed": seed,
                "row": run_cell_seed(config, n, alpha, nu, seed)}
    except Exception as exc:  # partial failures recorded, sweep continues
        return {"ok": False, "cell": _cell_id(n, alpha, nu), "seed": seed, "error": str(exc)}


_AGGREGATED = ("mean_d", "ratio_to_log_r", "giant_fraction", "beta_hat", "clustering",
               "core_size", "umbrella_q95")


def sweep(config: ExperimentConfig) -> Path:
    """Run every (cell, seed), write per-cell JSON-lines and the summary CSV;
    returns the summary path."""
    out = Path(config.out_dir)
    (out / "cells").mkdir(parents=True, exist_ok=True)
    jobs = [(config, n, a, v, s) for (n, a, v) in config.cells() for s in config.seeds]
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]

    by_cell: dict[str, list[dict]] = {}
    for res in results:
        by_cell.setdefault(res["cell"], []).append(res)
    summary_path = out / "summary.csv"
    columns = ["cell", "n", "alpha", "nu", "seeds_ok", "seeds_failed", "two_tau"]
    for name in _AGGREGATED:
        columns += [f"{name}_mean", f"{name}_stderr"]
    lines = [",".join(columns)]
    for cell, cell_results in sorted(by_cell.items()):
        rows = [r["row"] for r in cell_results if r["ok"]]
        failures = [r for r in cell_results if not r["ok"]]
        with open(out / "cells" / f"{cell}.jsonl", "w") as fh:
            for r in cell_results:
                if r["ok"]:
                    for rec in metric_records(f"{cell}_s{r['seed']}", ScalingRow(**{
                            **r["row"], "notes": tuple(r["row"]["notes"])})):
                        fh.write(json.dumps(rec) + "\n")
                else:
                    fh.write(json.dumps(r) + "\n")
        if rows:
            first = rows[0]
            fields = [cell, str(first["n"]), f"{first['alpha']:g}", f"{first['nu']:g}",
                      str(len(rows)), str(len(failures)),
                      "" if first["two_tau"] is None else f"{first['two_tau']:.12g}"]
        else:
            fields = [cell, "", "", "", "0", str(len(failures)), ""]
        for name in _AGGREGATED:
            vals = np.array([r[name] for r in rows if rows and r[name] is not None], dtype=float)
            if len(vals):
                mean = float(vals.mean())
                stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
                fields += [f"{mean:.12g}", f"{stderr:.12g}"]
            else:
                fields += ["", ""]
        lines.append(",".join(fields))
    summary_path.write_text("\n".join(lines) + "\n")
    return summary_path
