"""Rating-log ingestion: dataset parsers, Like/Dislike binarization, and
the chronological train/test split used by the offline benchmark.

All downstream structures (state graphs, rating matrices, user profiles) are
built from :class:`InteractionLog`, an immutable column store of rating
events.  Per-user event order is always ascending by timestamp; ties are
broken either by original input order ("input", the MovieLens default) or by
ascending item id ("item", used for Netflix day-granularity dumps so that
transition edges are deterministic).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path

import numpy as np

LIKE_THRESHOLD = 2.5

_EPOCH = date(1970, 1, 1)


class Polarity(Enum):
    """The two per-item rating states."""

    DISLIKE = 0
    LIKE = 1

    @property
    def bit(self) -> int:
        return self.value


def binarize(rating: int, threshold: float = LIKE_THRESHOLD) -> Polarity:
    """Map a 1-5 star rating to Like/Dislike around the threshold."""
    if not 1 <= rating <= 5:
        raise ValueError(f"rating must be in [1, 5], got {rating!r}")
    return Polarity.LIKE if rating > threshold else Polarity.DISLIKE


def binarize_array(ratings: np.ndarray, threshold: float = LIKE_THRESHOLD) -> np.ndarray:
    """Vectorised :func:`binarize`; returns the polarity bit (1=Like)."""
    if ratings.size and (ratings.min() < 1 or ratings.max() > 5):
        raise ValueError("ratings outside [1, 5]")
    return (ratings > threshold).astype(np.int64)


class InteractionLog:
    """Immutable column store of (user, item, rating, timestamp) events.

    Events are kept in original input order; time-ordered per-user views are
    derived lazily and cached.  ``skipped`` counts malformed input lines that
    the parser dropped.
    """

    def __init__(self, user, item, rating, timestamp, *, tiebreak: str = "input",
                 skipped: int = 0, deduped: bool = False):
        self.user = np.ascontiguousarray(user, dtype=np.int64)
        self.item = np.ascontiguousarray(item, dtype=np.int64)
        self.rating = np.ascontiguousarray(rating, dtype=np.int64)
        self.timestamp = np.ascontiguousarray(timestamp, dtype=np.int64)
        n = self.user.shape[0]
        if not (self.item.shape[0] == self.rating.shape[0] == self.timestamp.shape[0] == n):
            raise ValueError("event columns differ in length")
        if tiebreak not in ("input", "item"):
            raise ValueError(f"unknown tiebreak {tiebreak!r}")
        self.tiebreak = tiebreak
        self.skipped = int(skipped)
        self.deduped = bool(deduped)
        self._order = None          # permutation: grouped by user, time-ordered
        self._user_ids = None       # unique users, ascending
        self._user_starts = None    # slice boundaries into _order, len == n_users+1
        self._deduped = None        # memoised dedup_latest result

    # -- basic shape ---------------------------------------------------------

    def __len__(self) -> int:
        return self.user.shape[0]

    @property
    def n_events(self) -> int:
        return len(self)

    @property
    def user_ids(self) -> np.ndarray:
        self._ensure_index()
        return self._user_ids

    @property
    def n_users(self) -> int:
        return self.user_ids.shape[0]

    @property
    def item_ids(self) -> np.ndarray:
        return np.unique(self.item)

    @property
    def n_items(self) -> int:
        return self.item_ids.shape[0]

    def item_counts(self) -> dict[int, int]:
        """Event count per item (the item_index view)."""
        ids, counts = np.unique(self.item, return_counts=True)
        return dict(zip(ids.tolist(), counts.tolist()))

    # -- per-user ordered views ----------------------------------------------

    def _ensure_index(self) -> None:
        if self._order is not None:
            return
        if self.tiebreak == "item":
            keys = (self.item, self.timestamp, self.user)
        else:
            keys = (self.timestamp, self.user)
        order = np.lexsort(keys)  # stable: residual ties keep input order
        self._order = order
        users_sorted = self.user[order]
        ids, starts = np.unique(users_sorted, return_index=True)
        self._user_ids = ids
        self._user_starts = np.append(starts, len(order))

    def user_events(self, user: int) -> np.ndarray:
        """Indices of a user's events, ascending by (timestamp, tiebreak)."""
        self._ensure_index()
        pos = np.searchsorted(self._user_ids, user)
        if pos >= len(self._user_ids) or self._user_ids[pos] != user:
            raise KeyError(f"user {user!r} has no events in this log")
        return self._order[self._user_starts[pos]:self._user_starts[pos + 1]]

    def iter_users(self):
        """Yield (user_id, event index array) in ascending user order."""
        self._ensure_index()
        for k, uid in enumerate(self._user_ids):
            yield int(uid), self._order[self._user_starts[k]:self._user_starts[k + 1]]

    def user_counts(self) -> np.ndarray:
        """Events per user, aligned with ``user_ids``."""
        self._ensure_index()
        return np.diff(self._user_starts)

    def grouped(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(order, user_ids, user_starts) for vectorised per-user scans."""
        self._ensure_index()
        return self._order, self._user_ids, self._user_starts

    # -- derived logs ----------------------------------------------------------

    def subset(self, mask: np.ndarray) -> "InteractionLog":
        """New log with the selected events, input order preserved."""
        return InteractionLog(self.user[mask], self.item[mask], self.rating[mask],
                              self.timestamp[mask], tiebreak=self.tiebreak,
                              deduped=self.deduped)

    def dedup_latest(self) -> "InteractionLog":
        """Keep only the latest rating per (user, item) pair.

        "Latest" follows the per-user event order, so timestamp ties resolve
        by the log's tie rule.  Idempotent and memoised (logs are immutable,
        and every graph and model consumes the same deduplicated view).
        """
        if self.deduped:
            return self
        if self._deduped is not None:
            return self._deduped
        order, _, _ = self.grouped()
        # within 'order', a user's events are time-ascending: keep the last
        # occurrence of each (user, item) pair in that ordering.
        keys = np.stack([self.user[order], self.item[order]], axis=1)
        _, last = np.unique(keys[::-1], axis=0, return_index=True)
        keep = np.sort(order[len(order) - 1 - last])
        self._deduped = InteractionLog(self.user[keep], self.item[keep], self.rating[keep],
                                       self.timestamp[keep], tiebreak=self.tiebreak,
                                       deduped=True)
        return self._deduped

    # -- serialization ---------------------------------------------------------

    def to_csv(self, path) -> None:
        """Write the internal CSV form: user,item,rating,timestamp."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("user,item,rating,timestamp\n")
            for u, i, r, t in zip(self.user, self.item, self.rating, self.timestamp):
                fh.write(f"{u},{i},{r},{t}\n")

    @classmethod
    def from_csv(cls, path, *, tiebreak: str = "input") -> "InteractionLog":
        with open(path, "r", encoding="utf-8") as fh:
            fh.readline()  # header
            body = fh.read()
        if not body.strip():
            data = np.zeros((0, 4), dtype=np.int64)
        else:
            data = np.loadtxt(io.StringIO(body), dtype=np.int64, delimiter=",", ndmin=2)
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3], tiebreak=tiebreak)


@dataclass
class SplitDataset:
    """Chronological train/test split plus the evaluation-eligible users."""

    train: InteractionLog
    test: InteractionLog
    test_users: np.ndarray | None = None


def _empty_log(tiebreak="input", skipped=0) -> InteractionLog:
    z = np.zeros(0, dtype=np.int64)
    return InteractionLog(z, z, z, z, tiebreak=tiebreak, skipped=skipped)


def _as_text_lines(source):
    """Accept a path, bytes, or file-like object and yield text lines."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    return data.decode("utf-8", errors="replace").splitlines()


def parse_movielens(source) -> InteractionLog:
    """Parse MovieLens ``UserID::MovieID::Rating::Timestamp`` lines.

    Malformed lines (wrong field count, non-integer fields, rating outside
    1-5, negative timestamp) are skipped and counted in ``log.skipped``.
    """
    try:
        lines = _as_text_lines(source)
    except OSError as exc:
        raise OSError(f"cannot read MovieLens source: {exc}") from exc
    users, items, ratings, stamps = [], [], [], []
    skipped = 0
    for line in lines:
        line = line.strip()
        if not line:
            continue
        parts = line.split("::")
        if len(parts) != 4:
            skipped += 1
            continue
        try:
            u, i, r, t = int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])
        except ValueError:
            skipped += 1
            continue
        if not (1 <= r <= 5) or t < 0:
            skipped += 1
            continue
        users.append(u)
        items.append(i)
        ratings.append(r)
        stamps.append(t)
    if not users:
        return _empty_log(skipped=skipped)
    return InteractionLog(users, items, ratings, stamps, tiebreak="input", skipped=skipped)


def _netflix_date_to_days(text: str) -> int:
    return (date.fromisoformat(text) - _EPOCH).days


def _parse_netflix_stream(lines, users, items, ratings, stamps) -> int:
    """Parse one or more ``MovieID:`` sections from an iterable of lines."""
    skipped = 0
    movie = None
    saw_header = False
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.endswith(":"):
            try:
                movie = int(line[:-1])
            except ValueError:
                raise ValueError(f"bad Netflix header line: {line!r}")
            saw_header = True
            continue
        if not saw_header:
            raise ValueError("Netflix stream does not start with a 'MovieID:' header")
        parts = line.split(",")
        if len(parts) != 3:
            skipped += 1
            continue
        try:
            u = int(parts[0])
            r = int(parts[1])
            t = _netflix_date_to_days(parts[2])
        except ValueError:
            skipped += 1
            continue
        if not (1 <= r <= 5) or t < 0:
            skipped += 1
            continue
        users.append(u)
        items.append(movie)
        ratings.append(r)
        stamps.append(t)
    if not saw_header:
        raise ValueError("Netflix stream does not start with a 'MovieID:' header")
    return skipped


def parse_netflix(source) -> InteractionLog:
    """Parse Netflix-prize per-movie files.

    ``source`` may be a directory of per-movie files, a single file holding
    one or more ``MovieID:`` sections, or an iterable of file-like streams.
    Dates become days since 1970-01-01; same-day events order by item id.
    """
    users, items, ratings, stamps = [], [], [], []
    skipped = 0
    if isinstance(source, (str, Path)) and Path(source).is_dir():
        streams = sorted(p for p in Path(source).iterdir() if p.is_file())
        if not streams:
            return _empty_log(tiebreak="item")
        for p in streams:
            skipped += _parse_netflix_stream(_as_text_lines(p), users, items, ratings, stamps)
    elif isinstance(source, (str, Path, bytes)) or hasattr(source, "read"):
        skipped += _parse_netflix_stream(_as_text_lines(source), users, items, ratings, stamps)
    else:
        for stream in source:
            skipped += _parse_netflix_stream(_as_text_lines(stream), users, items, ratings, stamps)
    if not users:
        return _empty_log(tiebreak="item", skipped=skipped)
    return InteractionLog(users, items, ratings, stamps, tiebreak="item", skipped=skipped)


def chronological_split(log: InteractionLog, train_fraction: float) -> SplitDataset:
    """Globally time-sort all events and cut at ``train_fraction``.

    Equal timestamps at the cut keep their original input order (stable
    sort), so splits are reproducible run to run.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(log) == 0:
        raise ValueError("cannot split an empty log")
    order = np.argsort(log.timestamp, kind="stable")
    n_train = int(np.floor(train_fraction * len(log)))
    in_train = np.zeros(len(log), dtype=bool)
    in_train[order[:n_train]] = True
    return SplitDataset(train=log.subset(in_train), test=log.subset(~in_train))


def select_test_users(split: SplitDataset, list_size: int) -> np.ndarray:
    """Users with >= 1 training rating and more than ``list_size`` test ratings."""
    if list_size < 1:
        raise ValueError("list_size must be positive")
    train_users = split.train.user_ids
    if len(split.test) == 0:
        return np.zeros(0, dtype=np.int64)
    test_ids, test_counts = np.unique(split.test.user, return_counts=True)
    enough = test_ids[test_counts > list_size]
    return enough[np.isin(enough, train_users)]


@dataclass
class DatasetStats:
    """Headline statistics of a rating log."""

    n_users: int
    n_items: int
    n_ratings: int
    t_min: int
    t_max: int
    degree_percentiles: dict[int, float] = field(default_factory=dict)
    top20_share: float = 0.0
    skipped: int = 0

    def format(self) -> str:
        lines = [
            f"users            {self.n_users}",
            f"items            {self.n_items}",
            f"ratings          {self.n_ratings}",
            f"skipped_lines    {self.skipped}",
            f"timestamp_range  [{self.t_min}, {self.t_max}]",
            f"top20pct_item_rating_share  {self.top20_share:.4f}",
        ]
        for p in sorted(self.degree_percentiles):
            lines.append(f"item_degree_p{p:<3d} {self.degree_percentiles[p]:g}")
        return "\n".join(lines)


def dataset_stats(log: InteractionLog) -> DatasetStats:
    """Counts, rating timespan, item-degree percentiles, top-20% share."""
    if len(log) == 0:
        return DatasetStats(0, 0, 0, 0, 0, {}, 0.0, log.skipped)
    _, counts = np.unique(log.item, return_counts=True)
    counts_desc = np.sort(counts)[::-1]
    n_top = max(1, int(np.ceil(0.2 * len(counts_desc))))
    share = counts_desc[:n_top].sum() / counts_desc.sum()
    pct = {p: float(np.percentile(counts, p)) for p in (10, 25, 50, 75, 90, 99)}
    return DatasetStats(
        n_users=log.n_users,
        n_items=log.n_items,
        n_ratings=len(log),
        t_min=int(log.timestamp.min()),
        t_max=int(log.timestamp.max()),
        degree_percentiles=pct,
        top20_share=float(share),
        skipped=log.skipped,
    )
