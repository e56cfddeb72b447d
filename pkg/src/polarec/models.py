"""Per-user scoring models on the polarity-state graphs.

The forward model (PM) scores a candidate by the probability of stepping
from the user's profile into the candidate's Like state minus its Dislike
state; it favours popular items.  The backward model (SM) scores by the
probability that the user's profile was the origin given the candidate
state; it favours items specific to the profile.  A single blending
parameter trades one against the other, either on raw scores or on ranks.

All scorers are pure functions of immutable inputs; score vectors are plain
dicts keyed by item id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import InteractionLog, binarize_array
from .stategraph import ItemIndex, StateGraph

MODEL_TAGS = ("PM", "SM", "Hybrid", "UserCF", "ItemCF", "Popularity", "ClassicMarkov")


@dataclass
class UserState:
    """A user's training profile: one weighted sub-state per rated item."""

    user: int
    sub_states: np.ndarray            # dense state ids, one per deduped rating
    weights: np.ndarray               # sum to 1; uniform 1/m by default

    @property
    def size(self) -> int:
        return len(self.sub_states)


@dataclass
class ScoreVector:
    """Model scores over a candidate item set."""

    scores: dict[int, float]
    model_tag: str

    def items_array(self) -> np.ndarray:
        return np.array(sorted(self.scores), dtype=np.int64)


@dataclass
class RecommendationList:
    """Top-N items, best first.  ``short`` flags |candidates| < N."""

    items: list[int]
    short: bool = False

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def user_state(train: InteractionLog, user: int, index: ItemIndex | None = None) -> UserState:
    """Profile of ``user``: deduped training ratings as uniform sub-states."""
    index = index or ItemIndex.from_log(train)
    d = train.dedup_latest()
    idx = d.user_events(user)   # KeyError when the user has no training history
    states = 2 * index.position(d.item[idx]) + binarize_array(d.rating[idx])
    states = np.sort(states)
    m = len(states)
    return UserState(user=int(user), sub_states=states, weights=np.full(m, 1.0 / m))


def profile_state_vectors(graph: StateGraph, state: UserState) -> tuple[np.ndarray, np.ndarray]:
    """Dense per-state PM and SM transition mass for one user profile.

    PM entry s: sum_k w_k * forward_prob(sub_k, s).
    SM entry s: sum_k w_k * backward_prob(sub_k, s).
    """
    indptr, indices, data = graph.adj.indptr, graph.adj.indices, graph.adj.data
    subs = state.sub_states
    starts, ends = indptr[subs], indptr[subs + 1]
    lens = ends - starts
    if lens.sum() == 0:
        zero = np.zeros(graph.n_states)
        return zero, zero.copy()
    # gather the sub-state rows of the adjacency in one flat pass
    flat = np.concatenate([np.arange(s, e) for s, e in zip(starts, ends)])
    cols = indices[flat]
    vals = data[flat].astype(np.float64)
    out = graph.out_strength[subs].astype(np.float64)
    fwd_coef = np.divide(state.weights, out, out=np.zeros_like(out), where=out > 0)
    pm = np.bincount(cols, weights=vals * np.repeat(fwd_coef, lens), minlength=graph.n_states)
    mass = np.bincount(cols, weights=vals * np.repeat(state.weights, lens), minlength=graph.n_states)
    in_s = graph.in_strength.astype(np.float64)
    sm = np.divide(mass, in_s, out=np.zeros_like(mass), where=in_s > 0)
    return pm, sm


def _item_scores(state_vec: np.ndarray) -> np.ndarray:
    """Like-state mass minus Dislike-state mass, per dense item position."""
    pairs = state_vec.reshape(-1, 2)
    return pairs[:, 1] - pairs[:, 0]


def pm_item_scores(graph: StateGraph, state: UserState) -> np.ndarray:
    pm, _ = profile_state_vectors(graph, state)
    return _item_scores(pm)


def sm_item_scores(graph: StateGraph, state: UserState) -> np.ndarray:
    _, sm = profile_state_vectors(graph, state)
    return _item_scores(sm)


def _score_vector(graph, per_item: np.ndarray, candidates, tag: str) -> ScoreVector:
    cand = np.asarray(sorted(candidates), dtype=np.int64)
    pos = graph.index.position(cand)
    return ScoreVector({int(i): float(per_item[p]) for i, p in zip(cand, pos)}, tag)


def pm_scores(graph: StateGraph, state: UserState, candidates) -> ScoreVector:
    """Forward-probability scores over the candidate items."""
    return _score_vector(graph, pm_item_scores(graph, state), candidates, "PM")


def sm_scores(graph: StateGraph, state: UserState, candidates) -> ScoreVector:
    """Backward-probability scores over the candidate items."""
    return _score_vector(graph, sm_item_scores(graph, state), candidates, "SM")


def _check_blend(pm: ScoreVector, sm: ScoreVector, alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if pm.scores.keys() != sm.scores.keys():
        raise ValueError("pm and sm score vectors cover different candidates")


def hybrid_scores(pm: ScoreVector, sm: ScoreVector, alpha: float) -> ScoreVector:
    """Linear blend alpha*SM + (1-alpha)*PM of raw scores."""
    _check_blend(pm, sm, alpha)
    blended = {i: alpha * sm.scores[i] + (1.0 - alpha) * pm.scores[i] for i in pm.scores}
    return ScoreVector(blended, "Hybrid")


def rank_positions(scores: np.ndarray) -> np.ndarray:
    """1-based ranks, best score first; ties go to the earlier array slot.

    Callers keep score arrays in ascending-item order, so the stable argsort
    on the negated scores realises the id tie rule for free.
    """
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = np.arange(1, len(order) + 1)
    return ranks


def hybrid_ranks(pm: ScoreVector, sm: ScoreVector, alpha: float) -> ScoreVector:
    """Blend per-model ranks instead of scores; lower combined value = better."""
    _check_blend(pm, sm, alpha)
    items = np.array(sorted(pm.scores), dtype=np.int64)
    r_pm = rank_positions(np.array([pm.scores[i] for i in items]))
    r_sm = rank_positions(np.array([sm.scores[i] for i in items]))
    combined = alpha * r_sm + (1.0 - alpha) * r_pm
    return ScoreVector({int(i): float(c) for i, c in zip(items, combined)}, "Hybrid")


def top_n(scores: ScoreVector, n: int) -> RecommendationList:
    """The n best-scoring candidates, ties broken by ascending item id."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    items = np.array(sorted(scores.scores), dtype=np.int64)
    vals = np.array([scores.scores[i] for i in items])
    order = np.argsort(-vals, kind="stable")
    take = order[:n]
    return RecommendationList(items=[int(items[k]) for k in take], short=len(items) < n)


def candidate_items(train: InteractionLog, user: int) -> np.ndarray:
    """All training items the user has not rated, ascending by id."""
    all_items = train.item_ids
    try:
        seen = np.unique(train.item[train.user_events(user)])
    except KeyError:
        seen = np.zeros(0, dtype=np.int64)
    return np.setdiff1d(all_items, seen, assume_unique=True)
