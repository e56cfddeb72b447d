"""Experiment orchestration: config handling, model/alpha sweeps, reports.

A run parses one dataset, performs the chronological split, evaluates the
requested models over the eligible test users, and writes three kinds of
output into the chosen directory:

* ``metrics.csv``   one row per (model, graph, alpha) configuration
* ``hist_hybrid_<alpha>.csv``  degree histograms of the hybrid lists
* ``stats.txt``     dataset statistics plus run provenance notes

Reruns with the same config and seed are byte-identical apart from the
``runtime_ms`` column, independent of worker count.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .datasets import (InteractionLog, chronological_split, dataset_stats,
                       parse_movielens, parse_netflix, select_test_users)
from .evaluate import (EvalSetup, build_eval_setup, evaluate_model, graph_scorer,
                       histogram_for_lists, item_cf_scorer, markov_scorer,
                       popularity_scorer, sweep_hybrid, user_cf_scorer)
from .metrics import (DIVERSITY_EXACT_THRESHOLD, DIVERSITY_SAMPLE_PAIRS,
                      MetricsReport)
from .stategraph import build_ac_graph, build_at_graph

ALL_MODELS = ("pm", "sm", "hybrid", "usercf", "itemcf", "popularity", "markov")


def default_alpha_grid() -> list[float]:
    return [round(0.05 * k, 2) for k in range(21)]


@dataclass
class ExperimentConfig:
    """Everything a benchmark run needs; mirrors the CLI flags."""

    dataset: str = ""
    format: str = "movielens"           # movielens | netflix
    train_fraction: float = 0.9
    list_size: int = 10
    models: tuple[str, ...] = ALL_MODELS
    alpha_grid: list[float] = field(default_factory=default_alpha_grid)
    graph: str = "at"                   # at | ac
    blend: str = "score"                # score | rank
    markov_order: int = 2
    neighbors: int = 50
    threshold: float = 2.5
    threads: int = 1
    seed: int = 0
    out: str = "polarec_out"

    def validate(self) -> None:
        if self.format not in ("movielens", "netflix"):
            raise ValueError(f"unknown format {self.format!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train-fraction must be in (0, 1)")
        if self.list_size < 1:
            raise ValueError("list-size must be >= 1")
        if self.graph not in ("at", "ac"):
            raise ValueError(f"graph must be 'at' or 'ac', got {self.graph!r}")
        if self.blend not in ("score", "rank"):
            raise ValueError(f"blend must be 'score' or 'rank', got {self.blend!r}")
        for a in self.alpha_grid:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha outside [0, 1]: {a}")
        unknown = set(self.models) - set(ALL_MODELS)
        if unknown:
            raise ValueError(f"unknown models: {sorted(unknown)}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def parse_alpha_grid(spec: str) -> list[float]:
    """Accept 'start:stop:step' or a comma-separated list of values."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError("alpha grid range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("alpha grid step must be positive")
        k = int(np.floor((stop - start) / step + 1e-9))
        return [round(start + i * step, 10) for i in range(k + 1)]
    return [round(float(p), 10) for p in spec.split(",") if p.strip()]


def load_config_file(path) -> dict:
    """Flat ``key = value`` experiment manifest; '#' starts a comment."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, val = line.split("=", 1)
        else:
            key, _, val = line.partition(" ")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def config_from_sources(file_values: dict | None = None, **cli_values) -> ExperimentConfig:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    cfg = ExperimentConfig()
    names = {f.name for f in fields(ExperimentConfig)}
    merged: dict = {}
    for source in (file_values or {}, {k: v for k, v in cli_values.items() if v is not None}):
        for key, val in source.items():
            key = key.replace("-", "_")
            if key not in names:
                raise ValueError(f"unknown config key {key!r}")
            merged[key] = val
    for key, val in merged.items():
        if key == "models":
            val = tuple(m.strip() for m in val.split(",") if m.strip()) \
                if isinstance(val, str) else tuple(val)
        elif key == "alpha_grid":
            val = parse_alpha_grid(val) if isinstance(val, str) else [float(a) for a in val]
        elif isinstance(val, str):
            current = getattr(cfg, key)
            if isinstance(current, bool):
                val = val.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                val = int(val)
            elif isinstance(current, float):
                val = float(val)
        setattr(cfg, key, val)
    cfg.validate()
    return cfg


def load_dataset(config: ExperimentConfig) -> InteractionLog:
    path = Path(config.dataset)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")
    if config.format == "movielens":
        return parse_movielens(path)
    return parse_netflix(path)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    reports: list[MetricsReport]
    stats_text: str
    out_dir: Path


def _summary_line(r: MetricsReport) -> str:
    def fmt(x):
        return "   -  " if x is None else f"{x:6.4f}"

    alpha = "  -  " if r.alpha is None else f"{r.alpha:5.2f}"
    return (f"{r.model:<10s} {r.graph or '-':<3s} a={alpha}  R={fmt(r.recovery)}  "
            f"P={fmt(r.precision)}  C={fmt(r.coverage_bits)}  D={fmt(r.diversity)}  "
            f"S={fmt(r.novelty_bits)}")


def run_experiment(config: ExperimentConfig, *, log_stream=None) -> ExperimentResult:
    """Execute one configured benchmark run and write its reports."""
    config.validate()
    stream = log_stream if log_stream is not None else sys.stdout

    def say(msg: str) -> None:
        print(msg, file=stream, flush=True)

    t_start = time.perf_counter()
    log = load_dataset(config)
    stats = dataset_stats(log)
    say(f"parsed {stats.n_ratings} ratings from {stats.n_users} users on "
        f"{stats.n_items} items ({stats.skipped} malformed lines skipped)")

    split = chronological_split(log, config.train_fraction)
    split.test_users = select_test_users(split, config.list_size)
    if len(split.test_users) == 0:
        raise RuntimeError(
            "no eligible test users: "
            f"train has {split.train.n_users} users / {len(split.train)} events, "
            f"test has {split.test.n_users} users / {len(split.test)} events; "
            f"eligibility needs >=1 train rating and >{config.list_size} test ratings")
    say(f"split {len(split.train)}/{len(split.test)} train/test events; "
        f"{len(split.test_users)} eligible test users")

    setup = build_eval_setup(split, config.list_size, config.threshold)

    graph = None
    if any(m in config.models for m in ("pm", "sm", "hybrid")):
        build = build_at_graph if config.graph == "at" else build_ac_graph
        t0 = time.perf_counter()
        graph = build(split.train, setup.index, config.threshold)
        say(f"built {graph.kind} graph: {graph.n_states} states, {graph.n_edges} edges "
            f"({time.perf_counter() - t0:.2f}s)")

    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports: list[MetricsReport] = []
    histograms: dict[float, "np.ndarray"] = {}

    for model in config.models:
        if model == "pm":
            rep = evaluate_model(setup, graph_scorer(setup, graph, "pm"), model="pm",
                                 graph=config.graph, threads=config.threads, seed=config.seed)
            reports.append(rep)
        elif model == "sm":
            rep = evaluate_model(setup, graph_scorer(setup, graph, "sm"), model="sm",
                                 graph=config.graph, threads=config.threads, seed=config.seed)
            reports.append(rep)
        elif model == "hybrid":
            rows = sweep_hybrid(setup, graph, config.alpha_grid, blend=config.blend,
                                threads=config.threads, seed=config.seed)
            for row in rows:
                reports.append(row.report)
                histograms[row.alpha] = row.lists
        elif model == "usercf":
            rep = evaluate_model(setup, user_cf_scorer(setup, config.neighbors),
                                 model="usercf", threads=config.threads, seed=config.seed)
            reports.append(rep)
        elif model == "itemcf":
            rep = evaluate_model(setup, item_cf_scorer(setup), model="itemcf",
                                 threads=config.threads, seed=config.seed)
            reports.append(rep)
        elif model == "popularity":
            rep = evaluate_model(setup, popularity_scorer(setup), model="popularity",
                                 threads=config.threads, seed=config.seed)
            reports.append(rep)
        elif model == "markov":
            rep = evaluate_model(setup, markov_scorer(setup, config.markov_order),
                                 model="markov", threads=config.threads, seed=config.seed,
                                 secondary=setup.pop_counts.astype(np.float64))
            reports.append(rep)
        say(_summary_line(reports[-1]) if model != "hybrid" else
            f"hybrid     {config.graph}  swept {len(config.alpha_grid)} alpha values")

    (out_dir / "metrics.csv").write_text(
        MetricsReport.CSV_HEADER + "\n" + "\n".join(r.csv_row() for r in reports) + "\n",
        encoding="utf-8")

    for alpha, lists in sorted(histograms.items()):
        hist = histogram_for_lists(setup, lists)
        name = f"hist_hybrid_{alpha:.2f}.csv"
        (out_dir / name).write_text("\n".join(hist.csv_lines()) + "\n", encoding="utf-8")

    notes = _stats_notes(config, setup, stats)
    (out_dir / "stats.txt").write_text(notes, encoding="utf-8")

    say(f"wrote {out_dir / 'metrics.csv'} ({len(reports)} rows) "
        f"in {time.perf_counter() - t_start:.1f}s")
    for r in reports:
        say(_summary_line(r))
    return ExperimentResult(config=config, reports=reports, stats_text=notes, out_dir=out_dir)


def _stats_notes(config: ExperimentConfig, setup: EvalSetup, stats) -> str:
    n_test = len(setup.test_users)
    if n_test <= DIVERSITY_EXACT_THRESHOLD:
        div_note = f"diversity_mode  exact ({n_test * (n_test - 1) // 2} pairs)"
    else:
        div_note = (f"diversity_mode  sampled ({DIVERSITY_SAMPLE_PAIRS} pairs, "
                    f"seed {config.seed})")
    lines = [
        "# dataset",
        stats.format(),
        "",
        "# run",
        f"format           {config.format}",
        f"train_fraction   {config.train_fraction}",
        f"list_size        {config.list_size}",
        f"graph            {config.graph}",
        f"blend            {config.blend}",
        f"rating_threshold {config.threshold}",
        f"markov_order     {config.markov_order}",
        f"cf_neighbors     {config.neighbors}",
        f"seed             {config.seed}",
        f"test_users       {n_test}",
        div_note,
        "entropy_base     2 (coverage and novelty reported in bits; "
        "coverage counts normalised over total recommendation slots)",
        "tie_rule         score desc, then ascending item id "
        "(netflix same-day events ordered by item id)",
    ]
    return "\n".join(lines) + "\n"
