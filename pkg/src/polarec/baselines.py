"""Classic recommenders used as comparison baselines.

Four models: user-based and item-based collaborative filtering with Pearson
similarities, most-popular-unrated, and an order-m item Markov chain with
back-off.  Each model has a fitted class for batch evaluation plus small
convenience functions mirroring the single-prediction contracts.

All similarity computations center ratings at global per-user (or per-item)
training means and are restricted to co-rated entries; pairs with fewer than
two co-rated entries or zero variance get similarity 0.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numba import njit

from .datasets import InteractionLog
from .models import RecommendationList
from .stategraph import ItemIndex


class RatingMatrix:
    """Sparse user x item training ratings (deduped, latest rating wins)."""

    def __init__(self, train: InteractionLog, index: ItemIndex | None = None):
        d = train.dedup_latest()
        self.index = index or ItemIndex.from_log(train)
        self.user_ids = d.user_ids
        rows = np.searchsorted(self.user_ids, d.user)
        cols = self.index.position(d.item)
        shape = (len(self.user_ids), self.index.n_items)
        self.ratings = sp.csr_matrix((d.rating.astype(np.float64), (rows, cols)), shape=shape)
        self.ratings.sum_duplicates()
        self.binary = self.ratings.copy()
        self.binary.data = np.ones_like(self.binary.data)
        counts = np.asarray(self.binary.sum(axis=1)).ravel()
        sums = np.asarray(self.ratings.sum(axis=1)).ravel()
        self.user_means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
        icounts = np.asarray(self.binary.sum(axis=0)).ravel()
        isums = np.asarray(self.ratings.sum(axis=0)).ravel()
        self.item_means = np.divide(isums, icounts, out=np.zeros_like(isums), where=icounts > 0)
        self.item_rater_counts = icounts.astype(np.int64)

    @property
    def n_users(self) -> int:
        return self.ratings.shape[0]

    @property
    def n_items(self) -> int:
        return self.ratings.shape[1]

    def user_position(self, user: int) -> int:
        pos = int(np.searchsorted(self.user_ids, user))
        if pos >= len(self.user_ids) or self.user_ids[pos] != user:
            raise KeyError(f"user {user!r} has no training ratings")
        return pos

    def user_row(self, upos: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(self.ratings.indptr[upos], self.ratings.indptr[upos + 1])
        return self.ratings.indices[sl], self.ratings.data[sl]

    def centered_by_user(self) -> sp.csr_matrix:
        cc = self.ratings.copy()
        cc.data = cc.data - np.repeat(self.user_means, np.diff(cc.indptr))
        return cc

    def centered_by_item(self) -> sp.csr_matrix:
        cc = self.ratings.copy()
        cc.data = cc.data - self.item_means[cc.indices]
        return cc


def pearson_similarity(ratings_i, ratings_j, mean_i: float | None = None,
                       mean_j: float | None = None) -> float:
    """Pearson correlation of two co-rated vectors around the given means.

    The means default to the vector means but callers normally pass global
    training means.  Returns 0 for fewer than two co-rated entries or when
    either centered vector has zero norm.
    """
    x = np.asarray(ratings_i, dtype=np.float64)
    y = np.asarray(ratings_j, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("co-rated vectors differ in length")
    if x.size < 2:
        return 0.0
    xc = x - (np.mean(x) if mean_i is None else mean_i)
    yc = y - (np.mean(y) if mean_j is None else mean_j)
    den = np.sqrt(np.sum(xc * xc)) * np.sqrt(np.sum(yc * yc))
    if den == 0.0:
        return 0.0
    return float(np.sum(xc * yc) / den)


@njit(cache=True, nogil=True)
def _fill_topk(order, sims, indptr, indices, dev, k, num, den, cnt):
    # users arrive in descending |sim|; each item keeps its first k raters
    for idx in range(order.shape[0]):
        u = order[idx]
        s = sims[u]
        if s == 0.0:
            break  # remaining users all have |sim| == 0
        a = abs(s)
        for p in range(indptr[u], indptr[u + 1]):
            o = indices[p]
            if cnt[o] < k:
                num[o] += s * dev[p]
                den[o] += a
                cnt[o] += 1


class UserCF:
    """User-based CF: mean-centered weighted average over the k most
    similar raters of each target item (k=None removes the cap)."""

    def __init__(self, train: InteractionLog, k_neighbors: int | None = 50,
                 index: ItemIndex | None = None):
        self.m = RatingMatrix(train, index)
        self.k = k_neighbors
        self.cc = self.m.centered_by_user()
        self.cc2 = self.cc.copy()
        self.cc2.data = self.cc2.data ** 2

    def similarity_block(self, upositions: np.ndarray) -> np.ndarray:
        """Similarities of the given users against all users, shape (b, U)."""
        cct = self.cc[upositions].T.toarray()
        cc2t = self.cc2[upositions].T.toarray()
        bt = self.m.binary[upositions].T.toarray()
        num = self.cc @ cct                 # (U, b)
        d1 = self.m.binary @ cc2t           # sum of the block user's sq devs over co-rated
        d2 = self.cc2 @ bt
        ncom = self.m.binary @ bt
        den = np.sqrt(d1) * np.sqrt(d2)
        ok = (ncom >= 2) & (den > 0)
        sim = np.where(ok, num / np.where(den > 0, den, 1.0), 0.0).T
        sim[np.arange(len(upositions)), upositions] = 0.0
        return sim

    def predictions_for(self, upos: int, sims: np.ndarray) -> np.ndarray:
        """Predicted ratings of one user for every item."""
        order = np.argsort(-np.abs(sims), kind="stable")
        k = self.k if self.k is not None else self.m.n_users
        num = np.zeros(self.m.n_items)
        den = np.zeros(self.m.n_items)
        cnt = np.zeros(self.m.n_items, dtype=np.int64)
        _fill_topk(order, sims, self.cc.indptr, self.cc.indices, self.cc.data,
                   k, num, den, cnt)
        mean = self.m.user_means[upos]
        return np.where(den > 0, mean + num / np.where(den > 0, den, 1.0), mean)

    def predict_all(self, user: int) -> np.ndarray:
        upos = self.m.user_position(user)
        sims = self.similarity_block(np.array([upos]))[0]
        return self.predictions_for(upos, sims)

    def predict(self, user: int, item: int) -> float:
        return float(self.predict_all(user)[self.m.index.position([item])[0]])


class ItemCF:
    """Item-based CF: similarity-weighted average of the user's own ratings."""

    def __init__(self, train: InteractionLog, index: ItemIndex | None = None):
        self.m = RatingMatrix(train, index)
        cc = self.m.centered_by_item().tocsc()
        cc2 = cc.copy()
        cc2.data = cc2.data ** 2
        b = self.m.binary.tocsc()
        num = (cc.T @ cc).toarray()
        d1 = (cc2.T @ b).toarray()          # d1[o, i] = sum_u cc[u,o]^2 * b[u,i]
        ncom = (b.T @ b).toarray()
        den = np.sqrt(d1) * np.sqrt(d1.T)
        ok = (ncom >= 2) & (den > 0)
        sim = np.where(ok, num / np.where(den > 0, den, 1.0), 0.0)
        np.fill_diagonal(sim, 0.0)
        self.sim = sim
        self.abs_sim = np.abs(sim)

    def predict_all(self, user: int) -> np.ndarray:
        upos = self.m.user_position(user)
        cols, vals = self.m.user_row(upos)
        num = self.sim[:, cols] @ vals
        den = self.abs_sim[:, cols].sum(axis=1)
        mean = self.m.user_means[upos]
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), mean)

    def predict(self, user: int, item: int) -> float:
        return float(self.predict_all(user)[self.m.index.position([item])[0]])


class PopularityModel:
    """Most-rated unrated items; raw training event counts per item."""

    def __init__(self, train: InteractionLog, index: ItemIndex | None = None):
        self.index = index or ItemIndex.from_log(train)
        self.counts = np.bincount(self.index.position(train.item),
                                  minlength=self.index.n_items).astype(np.int64)

    def ranked_candidates(self, candidate_pos: np.ndarray) -> np.ndarray:
        order = np.argsort(-self.counts[candidate_pos], kind="stable")
        return candidate_pos[order]


class ClassicMarkov:
    """Order-m item-sequence Markov recommender with back-off.

    Transition scores are distinct-user n-gram counts: the share of users
    whose sequences continue the target user's last-m context with the
    candidate.  When the context was never seen, the order drops by one;
    score ties (and the all-zero case) order by popularity then item id.
    """

    def __init__(self, train: InteractionLog, order: int = 2,
                 index: ItemIndex | None = None):
        if order < 1:
            raise ValueError("markov order must be >= 1")
        self.order = order
        self.index = index or ItemIndex.from_log(train)
        d = train.dedup_latest()
        self.train = d
        self.pop = PopularityModel(train, self.index)
        n_items = max(self.index.n_items, 1)
        n_users = max(d.n_users, 1)
        if n_items ** (order + 1) * n_users >= 2 ** 62:
            raise ValueError("markov order too large for this item count")
        ev_order, uids, _ = d.grouped()
        pos = self.index.position(d.item[ev_order]) if len(d) else np.zeros(0, np.int64)
        urow = np.searchsorted(uids, d.user[ev_order]) if len(d) else np.zeros(0, np.int64)
        self._tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        n = len(pos)
        for g in range(1, order + 2):
            if n < g:
                self._tables[g] = (np.zeros(0, np.int64), np.zeros(0, np.int64))
                continue
            code = pos[: n - g + 1].copy()
            for t in range(1, g):
                code = code * n_items + pos[t: n - g + 1 + t]
            same_user = urow[: n - g + 1] == urow[g - 1:]
            code, users = code[same_user], urow[: n - g + 1][same_user]
            uniq = np.unique(code * n_users + users)
            grams, counts = np.unique(uniq // n_users, return_counts=True)
            self._tables[g] = (grams, counts.astype(np.int64))

    def _lookup(self, g: int, codes: np.ndarray) -> np.ndarray:
        grams, counts = self._tables[g]
        if len(grams) == 0:
            return np.zeros(len(codes), dtype=np.int64)
        pos = np.searchsorted(grams, codes)
        pos_c = np.minimum(pos, len(grams) - 1)
        hit = grams[pos_c] == codes
        return np.where(hit, counts[pos_c], 0)

    def context_of(self, user: int) -> np.ndarray:
        idx = self.train.user_events(user)   # KeyError for unknown users
        seq = self.index.position(self.train.item[idx])
        return seq[-self.order:]

    def scores_for_context(self, context: np.ndarray, candidate_pos: np.ndarray) -> np.ndarray:
        """Eq.-style count-ratio scores with back-off; zeros when unseen."""
        n_items = self.index.n_items
        for g in range(min(self.order, len(context)), 0, -1):
            ctx = context[-g:]
            code = ctx[0]
            for t in range(1, g):
                code = code * n_items + ctx[t]
            ctx_count = self._lookup(g, np.array([code]))[0]
            if ctx_count > 0:
                cont = code * n_items + candidate_pos
                return self._lookup(g + 1, cont) / ctx_count
        return np.zeros(len(candidate_pos))

    def ranked_candidates(self, user: int, candidate_pos: np.ndarray) -> np.ndarray:
        scores = self.scores_for_context(self.context_of(user), candidate_pos)
        order = np.lexsort((-self.pop.counts[candidate_pos], -scores))
        return candidate_pos[order]


# -- single-call convenience forms --------------------------------------------


def _candidate_positions(index: ItemIndex, train: InteractionLog, user: int) -> np.ndarray:
    try:
        seen = np.unique(index.position(train.item[train.user_events(user)]))
    except KeyError:
        seen = np.zeros(0, dtype=np.int64)
    mask = np.ones(index.n_items, dtype=bool)
    mask[seen] = False
    return np.flatnonzero(mask)


def user_cf_predict(train: InteractionLog, user: int, item: int,
                    k_neighbors: int | None = 50) -> float:
    """Eq.-2 style prediction of ``user``'s rating on ``item``."""
    return UserCF(train, k_neighbors).predict(user, item)


def item_cf_predict(train: InteractionLog, user: int, item: int) -> float:
    """Eq.-3 style prediction via item-item similarities."""
    return ItemCF(train).predict(user, item)


def popularity_recommend(train: InteractionLog, user: int, n: int) -> RecommendationList:
    """Top-n most-rated items the user has not rated."""
    if n <= 0:
        raise ValueError("n must be positive")
    model = PopularityModel(train)
    cand = _candidate_positions(model.index, train, user)
    ranked = model.ranked_candidates(cand)[:n]
    return RecommendationList(items=[int(model.index.ids[p]) for p in ranked],
                              short=len(cand) < n)


def classic_markov_recommend(train: InteractionLog, user: int, order: int = 2,
                             n: int = 10) -> RecommendationList:
    """Top-n continuation of the user's recent item sequence."""
    if n <= 0:
        raise ValueError("n must be positive")
    model = ClassicMarkov(train, order)
    cand = _candidate_positions(model.index, train, user)
    ranked = model.ranked_candidates(user, cand)[:n]
    return RecommendationList(items=[int(model.index.ids[p]) for p in ranked],
                              short=len(cand) < n)
