"""End-to-end benchmark: the accuracy/diversity trade-off under one knob.

Runs the full evaluation pipeline -- chronological split, state graphs,
blend sweep, baselines, five metrics -- on the bundled synthetic corpus, or
on a real MovieLens ratings file if you pass its path:

    python demos/04_benchmark_sweep.py [path/to/ratings.dat]

Watch the precision column fall and the novelty column rise as the blend
moves from the forward scorer (0.0) to the backward scorer (1.0), while
coverage and diversity peak somewhere in between.
"""

import sys
import tempfile
from pathlib import Path

from polarec import ExperimentConfig, run_experiment
from polarec.synthetic import make_synthetic_log


def main():
    out = Path(tempfile.mkdtemp(prefix="polarec_demo_"))
    if len(sys.argv) > 1:
        dataset = sys.argv[1]
        print(f"using ratings file {dataset}")
    else:
        dataset = str(out / "synthetic.csv")
        print("no dataset given; generating the synthetic corpus "
              "(pass a MovieLens ratings.dat for the real thing)")
        log = make_synthetic_log(n_users=600, n_items=300, seed=0)
        with open(dataset, "w", encoding="utf-8") as fh:
            for u, i, r, t in zip(log.user, log.item, log.rating, log.timestamp):
                fh.write(f"{u}::{i}::{r}::{t}\n")

    config = ExperimentConfig(
        dataset=dataset,
        format="movielens",
        models=("pm", "sm", "hybrid", "popularity", "markov"),
        alpha_grid=[round(0.1 * k, 1) for k in range(11)],
        graph="ac",
        out=str(out),
        threads=2,
    )
    run_experiment(config)
    print(f"\nfull reports under {out}")
    print("metrics.csv columns: model,graph,alpha,n,recovery,precision,"
          "coverage_bits,diversity,novelty_bits,test_users,runtime_ms")


if __name__ == "__main__":
    main()
