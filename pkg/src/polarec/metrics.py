"""The five offline evaluation measures.

* recovery: mean normalised rank of relevant items over the full candidate
  ranking (0.5 is random, lower is better).
* precision at N: mean share of relevant items in the top-N list.
* coverage entropy: Shannon entropy (bits) of how recommendation slots are
  spread over items.  Raw per-item list shares do not form a distribution,
  so counts are normalised over total slots; this convention is echoed in
  every report.
* inter-list diversity: mean pairwise 1 - overlap/N between users' lists;
  exact all-pairs up to a user-count threshold, seeded pair sampling above.
* self-information novelty: mean per-list sum of log2(test users / item
  raters), raters floored at 1.

Users without relevant test items are excluded from recovery and precision
averages but still contribute lists to the other three measures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIVERSITY_EXACT_THRESHOLD = 2000
DIVERSITY_SAMPLE_PAIRS = 100_000


@dataclass
class MetricsReport:
    """One evaluated configuration; None marks an undefined measure."""

    model: str
    graph: str
    alpha: float | None
    n: int
    recovery: float | None
    precision: float | None
    coverage_bits: float
    diversity: float | None
    novelty_bits: float
    test_users: int
    runtime_ms: float

    CSV_HEADER = ("model,graph,alpha,n,recovery,precision,coverage_bits,"
                  "diversity,novelty_bits,test_users,runtime_ms")

    def csv_row(self) -> str:
        def num(x):
            return "" if x is None else f"{x:.12g}"

        alpha = "" if self.alpha is None else f"{self.alpha:.12g}"
        return ",".join([self.model, self.graph, alpha, str(self.n),
                         num(self.recovery), num(self.precision),
                         num(self.coverage_bits), num(self.diversity),
                         num(self.novelty_bits), str(self.test_users),
                         f"{self.runtime_ms:.3f}"])


def user_recovery(rank_positions: np.ndarray, n_candidates: int) -> float:
    """Single-user recovery: mean 1-based relevant rank over candidate count."""
    if len(rank_positions) == 0:
        raise ValueError("user has no relevant items")
    return float(np.mean(rank_positions) / n_candidates)


def recovery(rankings: dict, judgments: dict) -> float | None:
    """Mean normalised relevant-item rank across test users.

    ``rankings`` maps user -> full candidate ranking (best first);
    ``judgments`` maps user -> set of relevant items.  Users with no
    relevant items are skipped; returns None when nobody qualifies.
    """
    vals = []
    for user, ranked in rankings.items():
        relevant = judgments.get(user, ())
        if not relevant:
            continue
        pos = {item: r for r, item in enumerate(ranked, start=1)}
        ranks = np.array([pos[i] for i in relevant if i in pos], dtype=np.int64)
        if len(ranks) == 0:
            continue
        vals.append(user_recovery(ranks, len(ranked)))
    return float(np.mean(vals)) if vals else None


def precision_at_n(lists: dict, judgments: dict, n: int) -> float | None:
    """Mean |top-N list ∩ relevant| / N over users with relevant items."""
    vals = []
    for user, rec in lists.items():
        relevant = judgments.get(user, ())
        if not relevant:
            continue
        rel = set(relevant)
        vals.append(sum(1 for i in rec if i in rel) / n)
    return float(np.mean(vals)) if vals else None


def coverage_entropy(lists, candidate_count: int | None = None) -> float:
    """Shannon entropy (bits) of recommendation counts over items."""
    counts: dict = {}
    for rec in (lists.values() if isinstance(lists, dict) else lists):
        for item in rec:
            counts[item] = counts.get(item, 0) + 1
    return entropy_bits(np.array(list(counts.values()), dtype=np.float64))


def entropy_bits(counts: np.ndarray) -> float:
    """Entropy of a count vector normalised over its own total."""
    counts = counts[counts > 0]
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts / total
    return float(-(p * np.log2(p)).sum())


def interlist_diversity(lists, n: int, pair_sample: int | None = None,
                        seed: int = 0,
                        exact_threshold: int = DIVERSITY_EXACT_THRESHOLD) -> float | None:
    """Mean pairwise 1 - (shared items)/N between users' lists.

    All pairs are enumerated up to ``exact_threshold`` users; beyond that a
    fixed-seed uniform sample of ``pair_sample`` pairs is used (default
    100,000).  Returns None for fewer than two lists.
    """
    rows = [frozenset(rec) for rec in (lists.values() if isinstance(lists, dict) else lists)]
    u = len(rows)
    if u < 2:
        return None
    if u <= exact_threshold and pair_sample is None:
        acc = 0.0
        for a in range(u):
            sa = rows[a]
            for b in range(a + 1, u):
                acc += 1.0 - len(sa & rows[b]) / n
        return acc / (u * (u - 1) / 2)
    pairs = pair_sample or DIVERSITY_SAMPLE_PAIRS
    rng = np.random.default_rng(seed)
    ia = rng.integers(0, u, size=pairs)
    ib = rng.integers(0, u - 1, size=pairs)
    ib = np.where(ib >= ia, ib + 1, ib)   # uniform over ordered pairs a != b
    acc = 0.0
    for a, b in zip(ia, ib):
        acc += 1.0 - len(rows[a] & rows[b]) / n
    return acc / pairs


def self_info_novelty(lists, train_item_counts, test_user_count: int) -> float:
    """Mean per-list sum of log2(test users / item raters), raters floored at 1."""
    if test_user_count < 1:
        raise ValueError("test_user_count must be positive")
    vals = []
    for rec in (lists.values() if isinstance(lists, dict) else lists):
        bits = 0.0
        for item in rec:
            rels = max(1, int(train_item_counts.get(item, 0))
                       if hasattr(train_item_counts, "get") else int(train_item_counts[item]))
            bits += np.log2(test_user_count / rels)
        vals.append(bits)
    return float(np.mean(vals)) if vals else 0.0
