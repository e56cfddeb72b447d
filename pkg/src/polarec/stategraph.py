"""Weighted state graphs over the 2*I Like/Dislike item states.

Each training item contributes two graph nodes (its Like state and its
Dislike state, dense ids ``2*pos + polarity_bit``).  Two aggregation rules
are supported:

* **AT** (aggregated transition): edge (a, b) counts users with a
  consecutive rating pair a -> b in their time-ordered training sequence.
* **AC** (aggregated co-occurrence): edge (a, b) counts users who rated
  both endpoint items with the given polarities, order ignored; both
  directions are stored, so the matrix is symmetric.

Transition probabilities are maximum-likelihood estimates: edge weight over
the weighted out-strength of the source (forward) or the weighted
in-strength of the target (backward).  Graphs are immutable once built and
safe for concurrent readers.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .datasets import InteractionLog, Polarity, binarize_array


class ItemIndex:
    """Dense index over the distinct items of a training log (ascending id)."""

    def __init__(self, item_ids: np.ndarray):
        self.ids = np.unique(np.asarray(item_ids, dtype=np.int64))

    @classmethod
    def from_log(cls, log: InteractionLog) -> "ItemIndex":
        return cls(log.item)

    @property
    def n_items(self) -> int:
        return self.ids.shape[0]

    @property
    def n_states(self) -> int:
        return 2 * self.n_items

    def position(self, items) -> np.ndarray:
        """Dense positions of raw item ids; raises on unknown items."""
        items = np.asarray(items, dtype=np.int64)
        if items.size and self.n_items == 0:
            raise KeyError("empty item index")
        pos = np.searchsorted(self.ids, items)
        bad = (pos >= self.n_items) | (self.ids[np.minimum(pos, self.n_items - 1)] != items)
        if np.any(bad):
            raise KeyError(f"items not in index: {np.unique(items[bad])[:5]}")
        return pos

    def contains(self, items) -> np.ndarray:
        items = np.asarray(items, dtype=np.int64)
        if self.n_items == 0:
            return np.zeros(items.shape, dtype=bool)
        pos = np.minimum(np.searchsorted(self.ids, items), self.n_items - 1)
        return self.ids[pos] == items

    def state_of(self, item, polarity: Polarity) -> int:
        return 2 * int(self.position([item])[0]) + polarity.bit

    def like_state(self, item) -> int:
        return self.state_of(item, Polarity.LIKE)

    def dislike_state(self, item) -> int:
        return self.state_of(item, Polarity.DISLIKE)

    def item_of(self, state: int) -> tuple[int, Polarity]:
        return int(self.ids[state // 2]), Polarity(state % 2)


class StateGraph:
    """Immutable weighted digraph over polarity states with cached strengths."""

    def __init__(self, kind: str, adj: sp.csr_matrix, index: ItemIndex | None = None):
        if kind not in ("AT", "AC"):
            raise ValueError(f"kind must be 'AT' or 'AC', got {kind!r}")
        self.kind = kind
        self.index = index
        adj = sp.csr_matrix(adj, dtype=np.int64)
        adj.sum_duplicates()
        adj.eliminate_zeros()
        self.adj = adj
        self.adj_t = adj.T.tocsr()  # by-target adjacency for in-neighbour scans
        self.out_strength = np.asarray(adj.sum(axis=1)).ravel().astype(np.int64)
        self.in_strength = np.asarray(adj.sum(axis=0)).ravel().astype(np.int64)

    @classmethod
    def from_edges(cls, kind: str, n_states: int, edges, index: ItemIndex | None = None) -> "StateGraph":
        """Build from (from_state, to_state, weight) triples."""
        edges = list(edges)
        if edges:
            f, t, w = map(np.asarray, zip(*edges))
        else:
            f = t = w = np.zeros(0, dtype=np.int64)
        adj = sp.coo_matrix((w, (f, t)), shape=(n_states, n_states)).tocsr()
        return cls(kind, adj, index)

    @property
    def n_states(self) -> int:
        return self.adj.shape[0]

    @property
    def n_edges(self) -> int:
        return self.adj.nnz

    @property
    def total_weight(self) -> int:
        return int(self.adj.data.sum())

    def weight(self, from_state: int, to_state: int) -> int:
        return int(self.adj[from_state, to_state])

    def forward_prob(self, from_state: int, to_state: int) -> float:
        """MLE transition probability: weight / out-strength of the source."""
        out = self.out_strength[from_state]
        if out == 0:
            return 0.0
        return self.weight(from_state, to_state) / out

    def backward_prob(self, from_state: int, to_state: int) -> float:
        """MLE origin probability: weight / in-strength of the target."""
        into = self.in_strength[to_state]
        if into == 0:
            return 0.0
        return self.weight(from_state, to_state) / into

    def out_edges(self, state: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(self.adj.indptr[state], self.adj.indptr[state + 1])
        return self.adj.indices[sl], self.adj.data[sl]

    def in_edges(self, state: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(self.adj_t.indptr[state], self.adj_t.indptr[state + 1])
        return self.adj_t.indices[sl], self.adj_t.data[sl]

    # -- persistence -----------------------------------------------------------

    def save_csv(self, path) -> None:
        """Edge-list CSV with kind and item table in header comments."""
        coo = self.adj.tocoo()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# kind={self.kind}\n")
            if self.index is not None:
                fh.write("# items=" + ",".join(str(i) for i in self.index.ids) + "\n")
            else:
                fh.write(f"# states={self.n_states}\n")
            fh.write("from_state,to_state,weight\n")
            for f, t, w in zip(coo.row, coo.col, coo.data):
                fh.write(f"{f},{t},{w}\n")

    @classmethod
    def load_csv(cls, path) -> "StateGraph":
        with open(path, "r", encoding="utf-8") as fh:
            head = fh.readline().strip()
            if not head.startswith("# kind="):
                raise ValueError("missing kind header")
            kind = head.split("=", 1)[1]
            second = fh.readline().strip()
            index = None
            if second.startswith("# items="):
                body = second.split("=", 1)[1]
                ids = np.array([int(x) for x in body.split(",")] if body else [], dtype=np.int64)
                index = ItemIndex(ids)
                n_states = 2 * len(ids)
            elif second.startswith("# states="):
                n_states = int(second.split("=", 1)[1])
            else:
                raise ValueError("missing item table / state count header")
            header = fh.readline().strip()
            if header != "from_state,to_state,weight":
                raise ValueError("missing edge list header")
            data = np.loadtxt(fh, dtype=np.int64, delimiter=",", ndmin=2)
        if data.size == 0:
            data = data.reshape(0, 3)
        adj = sp.coo_matrix((data[:, 2], (data[:, 0], data[:, 1])),
                            shape=(n_states, n_states)).tocsr()
        return cls(kind, adj, index)


def _state_sequences(train: InteractionLog, index: ItemIndex, threshold: float):
    """Per-user, time-ordered state ids of a deduplicated training log.

    Returns (states, user_starts): concatenated per-user sequences and the
    boundaries between users.
    """
    d = train.dedup_latest()
    order, _, starts = d.grouped()
    pos = index.position(d.item[order])
    bits = binarize_array(d.rating[order], threshold)
    return 2 * pos + bits, starts


def build_at_graph(train: InteractionLog, index: ItemIndex | None = None,
                   threshold: float = 2.5) -> StateGraph:
    """Aggregated transition graph: one edge per consecutive rating pair."""
    index = index or ItemIndex.from_log(train)
    states, starts = _state_sequences(train, index, threshold)
    if len(states) == 0:
        return StateGraph("AT", sp.csr_matrix((index.n_states, index.n_states), dtype=np.int64), index)
    src = states[:-1]
    dst = states[1:]
    # drop the pairs that straddle a user boundary
    within = np.ones(len(states) - 1, dtype=bool)
    within[starts[1:-1] - 1] = False
    src, dst = src[within], dst[within]
    adj = sp.coo_matrix((np.ones(len(src), dtype=np.int64), (src, dst)),
                        shape=(index.n_states, index.n_states)).tocsr()
    return StateGraph("AT", adj, index)


def build_ac_graph(train: InteractionLog, index: ItemIndex | None = None,
                   threshold: float = 2.5) -> StateGraph:
    """Aggregated co-occurrence graph: symmetric user co-rating counts."""
    index = index or ItemIndex.from_log(train)
    d = train.dedup_latest()
    if len(d) == 0:
        return StateGraph("AC", sp.csr_matrix((index.n_states, index.n_states), dtype=np.int64), index)
    states = 2 * index.position(d.item) + binarize_array(d.rating, threshold)
    urow = np.searchsorted(d.user_ids, d.user)
    incidence = sp.coo_matrix(
        (np.ones(len(d), dtype=np.int64), (urow, states)),
        shape=(d.n_users, index.n_states)).tocsr()
    adj = (incidence.T @ incidence).tocsr()
    adj = adj - sp.diags(adj.diagonal(), format="csr").astype(np.int64)
    return StateGraph("AC", adj, index)
