"""Command-line front end for benchmark runs.

Flags mirror :class:`polarec.experiment.ExperimentConfig`; values from
``--config FILE`` fill in anything not given on the command line.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import config_from_sources, load_config_file, run_experiment


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polarec",
        description="Offline recommender benchmark: polarity-state graph models, "
                    "classic baselines, five-metric evaluation.")
    p.add_argument("--dataset", help="path to the ratings file or Netflix directory")
    p.add_argument("--format", choices=["movielens", "netflix"],
                   help="input wire format (default movielens)")
    p.add_argument("--train-fraction", type=float, dest="train_fraction",
                   help="chronological training share (default 0.9)")
    p.add_argument("--list-size", type=int, dest="list_size",
                   help="recommendation list size N (default 10)")
    p.add_argument("--models",
                   help="comma list from pm,sm,hybrid,usercf,itemcf,popularity,markov "
                        "(default: all)")
    p.add_argument("--alpha-grid", dest="alpha_grid",
                   help="'start:stop:step' or comma list (default 0:1:0.05)")
    p.add_argument("--graph", choices=["at", "ac"],
                   help="state graph kind: at = sequence aware, ac = co-occurrence")
    p.add_argument("--blend", choices=["score", "rank"],
                   help="hybrid blending on raw scores or per-model ranks")
    p.add_argument("--markov-order", type=int, dest="markov_order",
                   help="classic Markov baseline order (default 2)")
    p.add_argument("--neighbors", type=int,
                   help="user-CF neighbourhood size (default 50)")
    p.add_argument("--threshold", type=float,
                   help="Like/Dislike rating threshold (default 2.5)")
    p.add_argument("--threads", type=int, help="evaluation worker count (default 1)")
    p.add_argument("--seed", type=int, help="RNG seed for sampled diversity (default 0)")
    p.add_argument("--out", help="output directory (default polarec_out)")
    p.add_argument("--config", help="flat key=value config file; flags override it")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values = vars(args)
    config_path = values.pop("config", None)
    file_values = load_config_file(config_path) if config_path else None
    try:
        config = config_from_sources(file_values, **values)
        if not config.dataset:
            raise ValueError("--dataset is required (flag or config file)")
        run_experiment(config)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
