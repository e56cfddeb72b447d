"""Batch offline evaluation over the eligible test users.

The harness prepares per-user candidate masks and relevance judgments once,
then evaluates models through a chunk-oriented scorer protocol: a scorer
receives a list of user ids and returns one dense score row per user over
all training items.  The hybrid sweep scores each user's forward/backward
vectors once and re-blends them across the whole alpha grid, so a full
sweep costs a single scoring pass.

Chunks are reduced in a fixed order, which makes results byte-identical
across worker counts.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics as metrics_mod
from .baselines import ClassicMarkov, ItemCF, UserCF
from .datasets import InteractionLog, SplitDataset, binarize_array, select_test_users
from .models import UserState, profile_state_vectors, rank_positions
from .stategraph import ItemIndex, StateGraph

CHUNK = 256


@dataclass
class EvalSetup:
    """Shared, immutable per-run evaluation state."""

    train: InteractionLog
    test: InteractionLog
    n: int
    index: ItemIndex
    deduped_train: InteractionLog
    pop_counts: np.ndarray          # raw train rating count per dense item
    rels_counts: np.ndarray         # distinct train raters per dense item
    test_users: np.ndarray
    user_train_pos: dict[int, np.ndarray]   # user -> dense trained item positions
    user_states: dict[int, UserState]       # user -> polarity sub-states
    judgments: dict[int, np.ndarray]        # user -> relevant dense positions

    @property
    def n_items(self) -> int:
        return self.index.n_items


def build_eval_setup(split: SplitDataset, n: int, threshold: float = 2.5) -> EvalSetup:
    """Precompute candidate masks, profiles and judgments for a split."""
    train, test = split.train, split.test
    index = ItemIndex.from_log(train)
    deduped = train.dedup_latest()
    pop_counts = np.bincount(index.position(train.item), minlength=index.n_items)
    rels_counts = np.bincount(index.position(deduped.item), minlength=index.n_items)
    test_users = split.test_users
    if test_users is None:
        test_users = select_test_users(split, n)
    test_users = np.asarray(test_users, dtype=np.int64)

    user_train_pos: dict[int, np.ndarray] = {}
    user_states: dict[int, UserState] = {}
    for u in test_users:
        idx = deduped.user_events(int(u))
        pos = index.position(deduped.item[idx])
        bits = binarize_array(deduped.rating[idx], threshold)
        order = np.argsort(pos)
        user_train_pos[int(u)] = pos[order]
        states = 2 * pos[order] + bits[order]
        m = len(states)
        user_states[int(u)] = UserState(int(u), states, np.full(m, 1.0 / m))

    deduped_test = test.dedup_latest()
    judgments: dict[int, np.ndarray] = {}
    for u in test_users:
        u = int(u)
        try:
            idx = deduped_test.user_events(u)
        except KeyError:
            judgments[u] = np.zeros(0, dtype=np.int64)
            continue
        liked = idx[binarize_array(deduped_test.rating[idx], threshold) == 1]
        items = deduped_test.item[liked]
        known = items[index.contains(items)]
        pos = np.unique(index.position(known))
        pos = np.setdiff1d(pos, user_train_pos[u], assume_unique=True)
        judgments[u] = pos
    return EvalSetup(train, test, n, index, deduped, pop_counts.astype(np.int64),
                     rels_counts.astype(np.int64), test_users,
                     user_train_pos, user_states, judgments)


@dataclass
class Accumulator:
    """Running metric sums for one model configuration."""

    n: int
    rec_sum: float = 0.0
    rec_cnt: int = 0
    prec_sum: float = 0.0
    prec_cnt: int = 0
    lists: list[np.ndarray] = field(default_factory=list)  # one (n,) item-position row per user

    def lists_matrix(self) -> np.ndarray:
        if not self.lists:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.vstack(self.lists)


def _rank_candidates(scores_cand: np.ndarray, secondary_cand: np.ndarray | None,
                     ascending: bool) -> np.ndarray:
    """Candidate ordering, best first; residual ties keep ascending item id."""
    primary = scores_cand if ascending else -scores_cand
    if secondary_cand is None:
        return np.argsort(primary, kind="stable")
    return np.lexsort((-secondary_cand, primary))


def _eval_user_scores(setup: EvalSetup, user: int, scores: np.ndarray,
                      acc: Accumulator, *, secondary: np.ndarray | None = None,
                      ascending: bool = False) -> None:
    """Rank one user's candidates and fold the per-user metric terms."""
    mask = np.ones(setup.n_items, dtype=bool)
    mask[setup.user_train_pos[user]] = False
    cand = np.flatnonzero(mask)
    order = _rank_candidates(scores[cand], None if secondary is None else secondary[cand],
                             ascending)
    top = cand[order[:setup.n]]
    row = np.full(setup.n, -1, dtype=np.int64)
    row[:len(top)] = top
    acc.lists.append(row)

    jud = setup.judgments[user]
    if len(jud) > 0:
        rank_of = np.empty(len(cand), dtype=np.int64)
        rank_of[order] = np.arange(1, len(cand) + 1)
        ranks = rank_of[np.searchsorted(cand, jud)]
        acc.rec_sum += float(np.mean(ranks)) / len(cand)
        acc.rec_cnt += 1
        acc.prec_sum += float(np.isin(top, jud).sum()) / setup.n
        acc.prec_cnt += 1


def _finalize(setup: EvalSetup, acc: Accumulator, *, model: str, graph: str,
              alpha: float | None, runtime_ms: float, seed: int = 0) -> metrics_mod.MetricsReport:
    rows = acc.lists_matrix()
    flat = rows[rows >= 0]
    coverage = metrics_mod.entropy_bits(np.bincount(flat, minlength=setup.n_items).astype(np.float64))
    n_test = len(setup.test_users)
    bits = np.log2(n_test / np.maximum(setup.rels_counts, 1))
    novelty = float(np.mean([bits[r[r >= 0]].sum() for r in rows])) if len(rows) else 0.0
    lists_as_sets = [set(r[r >= 0].tolist()) for r in rows]
    diversity = metrics_mod.interlist_diversity(lists_as_sets, setup.n, seed=seed)
    return metrics_mod.MetricsReport(
        model=model, graph=graph, alpha=alpha, n=setup.n,
        recovery=acc.rec_sum / acc.rec_cnt if acc.rec_cnt else None,
        precision=acc.prec_sum / acc.prec_cnt if acc.prec_cnt else None,
        coverage_bits=coverage, diversity=diversity, novelty_bits=novelty,
        test_users=n_test, runtime_ms=runtime_ms)


def _chunks(users: np.ndarray, size: int = CHUNK) -> list[np.ndarray]:
    return [users[i:i + size] for i in range(0, len(users), size)]


def _run_chunked(setup: EvalSetup, work, threads: int) -> list:
    """Apply ``work`` to user chunks, preserving chunk order in the result."""
    chunks = _chunks(setup.test_users)
    if threads <= 1 or len(chunks) <= 1:
        return [work(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, chunks))


# -- single-model evaluation ---------------------------------------------------


def evaluate_model(setup: EvalSetup, scorer, *, model: str, graph: str = "",
                   alpha: float | None = None, threads: int = 1, seed: int = 0,
                   secondary: np.ndarray | None = None,
                   ascending: bool = False) -> metrics_mod.MetricsReport:
    """Evaluate one scorer over all test users.

    ``scorer(users)`` returns a (len(users), n_items) dense score array.
    ``secondary`` adds a tie-breaking key (e.g. popularity) before the item
    id; ``ascending`` flips score order for rank-valued scorers.
    """
    t0 = time.perf_counter()

    def work(chunk_users: np.ndarray) -> Accumulator:
        acc = Accumulator(setup.n)
        rows = scorer([int(u) for u in chunk_users])
        for u, scores in zip(chunk_users, rows):
            _eval_user_scores(setup, int(u), scores, acc,
                              secondary=secondary, ascending=ascending)
        return acc

    parts = _run_chunked(setup, work, threads)
    acc = Accumulator(setup.n)
    for p in parts:
        acc.rec_sum += p.rec_sum
        acc.rec_cnt += p.rec_cnt
        acc.prec_sum += p.prec_sum
        acc.prec_cnt += p.prec_cnt
        acc.lists.extend(p.lists)
    ms = (time.perf_counter() - t0) * 1000.0
    return _finalize(setup, acc, model=model, graph=graph, alpha=alpha,
                     runtime_ms=ms, seed=seed)


# -- scorers -------------------------------------------------------------------


def graph_scorer(setup: EvalSetup, graph: StateGraph, which: str):
    """PM or SM dense item scores from the state graph."""
    if which not in ("pm", "sm"):
        raise ValueError("which must be 'pm' or 'sm'")

    def scorer(users: list[int]) -> np.ndarray:
        out = np.empty((len(users), setup.n_items))
        for r, u in enumerate(users):
            pm_vec, sm_vec = profile_state_vectors(graph, setup.user_states[u])
            vec = pm_vec if which == "pm" else sm_vec
            pair = vec.reshape(-1, 2)
            out[r] = pair[:, 1] - pair[:, 0]
        return out

    return scorer


def pm_sm_pair_scorer(setup: EvalSetup, graph: StateGraph):
    """Both PM and SM item scores in one pass; used by the hybrid sweep."""

    def scorer(users: list[int]) -> tuple[np.ndarray, np.ndarray]:
        pm = np.empty((len(users), setup.n_items))
        sm = np.empty((len(users), setup.n_items))
        for r, u in enumerate(users):
            pm_vec, sm_vec = profile_state_vectors(graph, setup.user_states[u])
            pm[r] = pm_vec.reshape(-1, 2)[:, 1] - pm_vec.reshape(-1, 2)[:, 0]
            sm[r] = sm_vec.reshape(-1, 2)[:, 1] - sm_vec.reshape(-1, 2)[:, 0]
        return pm, sm

    return scorer


def user_cf_scorer(setup: EvalSetup, neighbors: int | None = 50):
    model = UserCF(setup.train, neighbors, index=setup.index)

    def scorer(users: list[int]) -> np.ndarray:
        upos = np.array([model.m.user_position(u) for u in users])
        sims = model.similarity_block(upos)
        out = np.empty((len(users), setup.n_items))
        for r in range(len(users)):
            out[r] = model.predictions_for(int(upos[r]), sims[r])
        return out

    return scorer


def item_cf_scorer(setup: EvalSetup):
    model = ItemCF(setup.train, index=setup.index)

    def scorer(users: list[int]) -> np.ndarray:
        return np.stack([model.predict_all(u) for u in users])

    return scorer


def popularity_scorer(setup: EvalSetup):
    counts = setup.pop_counts.astype(np.float64)

    def scorer(users: list[int]) -> np.ndarray:
        return np.broadcast_to(counts, (len(users), len(counts)))

    return scorer


def markov_scorer(setup: EvalSetup, order: int = 2):
    model = ClassicMarkov(setup.train, order, index=setup.index)
    all_pos = np.arange(setup.n_items)

    def scorer(users: list[int]) -> np.ndarray:
        out = np.empty((len(users), setup.n_items))
        for r, u in enumerate(users):
            out[r] = model.scores_for_context(model.context_of(u), all_pos)
        return out

    return scorer


def random_scorer(setup: EvalSetup, seed: int):
    """Seeded uniform random scores; recovery of this ranker sits at 0.5."""

    def scorer(users: list[int]) -> np.ndarray:
        out = np.empty((len(users), setup.n_items))
        for r, u in enumerate(users):
            rng = np.random.default_rng((seed, u))
            out[r] = rng.random(setup.n_items)
        return out

    return scorer


# -- hybrid sweep ----------------------------------------------------------------


@dataclass
class SweepRow:
    alpha: float
    report: metrics_mod.MetricsReport
    lists: np.ndarray   # (test_users, n) dense item positions, -1 padded


def sweep_hybrid(setup: EvalSetup, graph: StateGraph, alphas, *, blend: str = "score",
                 threads: int = 1, seed: int = 0) -> list[SweepRow]:
    """Evaluate the PM/SM blend at every alpha with one scoring pass."""
    if blend not in ("score", "rank"):
        raise ValueError("blend must be 'score' or 'rank'")
    alphas = [float(a) for a in alphas]
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"alpha outside [0, 1]: {a}")
    pair = pm_sm_pair_scorer(setup, graph)
    t0 = time.perf_counter()

    def work(chunk_users: np.ndarray) -> list[Accumulator]:
        accs = [Accumulator(setup.n) for _ in alphas]
        pm, sm = pair([int(u) for u in chunk_users])
        for r, u in enumerate(chunk_users):
            u = int(u)
            mask = np.ones(setup.n_items, dtype=bool)
            mask[setup.user_train_pos[u]] = False
            cand = np.flatnonzero(mask)
            pm_c, sm_c = pm[r][cand], sm[r][cand]
            if blend == "rank":
                pm_c, sm_c = (rank_positions(pm_c).astype(np.float64),
                              rank_positions(sm_c).astype(np.float64))
            jud = setup.judgments[u]
            jidx = np.searchsorted(cand, jud)
            for ai, a in enumerate(alphas):
                blended = a * sm_c + (1.0 - a) * pm_c
                order = np.argsort(blended if blend == "rank" else -blended, kind="stable")
                acc = accs[ai]
                top = cand[order[:setup.n]]
                row = np.full(setup.n, -1, dtype=np.int64)
                row[:len(top)] = top
                acc.lists.append(row)
                if len(jud) > 0:
                    rank_of = np.empty(len(cand), dtype=np.int64)
                    rank_of[order] = np.arange(1, len(cand) + 1)
                    ranks = rank_of[jidx]
                    acc.rec_sum += float(np.mean(ranks)) / len(cand)
                    acc.rec_cnt += 1
                    acc.prec_sum += float(np.isin(top, jud).sum()) / setup.n
                    acc.prec_cnt += 1
        return accs

    parts = _run_chunked(setup, work, threads)
    scoring_ms = (time.perf_counter() - t0) * 1000.0
    rows = []
    for ai, a in enumerate(alphas):
        t1 = time.perf_counter()
        acc = Accumulator(setup.n)
        for p in parts:
            src = p[ai]
            acc.rec_sum += src.rec_sum
            acc.rec_cnt += src.rec_cnt
            acc.prec_sum += src.prec_sum
            acc.prec_cnt += src.prec_cnt
            acc.lists.extend(src.lists)
        ms = scoring_ms / len(alphas) + (time.perf_counter() - t1) * 1000.0
        report = _finalize(setup, acc, model="hybrid", graph=graph.kind.lower(),
                           alpha=a, runtime_ms=ms, seed=seed)
        rows.append(SweepRow(alpha=a, report=report, lists=acc.lists_matrix()))
    return rows


# -- degree histograms -------------------------------------------------------------


@dataclass
class DegreeHistogram:
    """Occurrences of recommended items bucketed by training popularity."""

    bin_edges: np.ndarray   # len == len(counts) + 1; [low, high) buckets
    counts: np.ndarray

    def csv_lines(self) -> list[str]:
        lines = ["bin_low,bin_high,count"]
        for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
            lines.append(f"{lo:g},{hi:g},{c}")
        return lines


def log2_bucket_edges(max_count: int) -> np.ndarray:
    """[0,1), [1,2), [2,4), [4,8) ... power-of-two popularity buckets."""
    top = max(int(max_count), 1)
    edges = [0, 1]
    while edges[-1] <= top:
        edges.append(edges[-1] * 2)
    return np.array(edges, dtype=np.float64)


def emit_degree_histogram(lists, train_item_counts, buckets=None) -> DegreeHistogram:
    """Bucket every recommended-item occurrence by its training popularity."""
    if hasattr(train_item_counts, "get"):
        pops = [int(train_item_counts.get(i, 0))
                for rec in (lists.values() if isinstance(lists, dict) else lists)
                for i in rec]
    else:
        counts = np.asarray(train_item_counts)
        pops = [int(counts[i])
                for rec in (lists.values() if isinstance(lists, dict) else lists)
                for i in rec]
    pops = np.array(pops, dtype=np.int64) if pops else np.zeros(0, dtype=np.int64)
    if buckets is None:
        buckets = log2_bucket_edges(int(pops.max()) if len(pops) else 1)
    buckets = np.asarray(buckets, dtype=np.float64)
    counts, _ = np.histogram(pops, bins=buckets)
    return DegreeHistogram(bin_edges=buckets, counts=counts.astype(np.int64))


def histogram_for_lists(setup: EvalSetup, lists_matrix: np.ndarray,
                        buckets=None) -> DegreeHistogram:
    """Degree histogram of a dense (users, n) list matrix."""
    flat = lists_matrix[lists_matrix >= 0]
    pops = setup.pop_counts[flat]
    if buckets is None:
        buckets = log2_bucket_edges(int(setup.pop_counts.max()) if setup.n_items else 1)
    counts, _ = np.histogram(pops, bins=np.asarray(buckets, dtype=np.float64))
    return DegreeHistogram(bin_edges=np.asarray(buckets, dtype=np.float64),
                           counts=counts.astype(np.int64))
