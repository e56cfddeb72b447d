"""Shared fixtures: tiny handmade logs, the synthetic corpus, and the
optional MovieLens-1M dataset.

The MovieLens-1M file is resolved from the POLAREC_ML1M environment
variable or a few conventional locations.  Tests that need it skip with an
explicit reason when it is absent; set POLAREC_REQUIRE_ML1M=1 to turn those
skips into failures (e.g. in CI environments that mount the dataset).
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from polarec.datasets import InteractionLog, chronological_split, parse_movielens, select_test_users
from polarec.synthetic import make_synthetic_log

ML1M_CANDIDATES = (
    "data/ml-1m/ratings.dat",
    "ml-1m/ratings.dat",
    "ratings.dat",
)


def ml1m_path() -> Path | None:
    env = os.environ.get("POLAREC_ML1M")
    if env:
        p = Path(env)
        if p.is_dir():
            p = p / "ratings.dat"
        if p.exists():
            return p
    root = Path(__file__).resolve().parents[1]
    for rel in ML1M_CANDIDATES:
        p = root / rel
        if p.exists():
            return p
    return None


def require_ml1m():
    """Skip (or fail, under POLAREC_REQUIRE_ML1M) when the dataset is absent."""
    p = ml1m_path()
    if p is None:
        msg = ("MovieLens-1M ratings.dat not found; set POLAREC_ML1M or place it "
               "under data/ml-1m/ (the dataset is not bundled and is never "
               "downloaded automatically)")
        if os.environ.get("POLAREC_REQUIRE_ML1M"):
            pytest.fail(msg)
        pytest.skip(msg)
    return p


@pytest.fixture(scope="session")
def ml1m_log():
    path = require_ml1m()
    return parse_movielens(path)


@pytest.fixture(scope="session")
def ml1m_split(ml1m_log):
    split = chronological_split(ml1m_log, 0.9)
    split.test_users = select_test_users(split, 10)
    return split


def make_log(rows, tiebreak="input") -> InteractionLog:
    """rows: (user, item, rating, timestamp) tuples in input order."""
    if not rows:
        z = np.zeros(0, dtype=np.int64)
        return InteractionLog(z, z, z, z, tiebreak=tiebreak)
    u, i, r, t = zip(*rows)
    return InteractionLog(u, i, r, t, tiebreak=tiebreak)


@pytest.fixture
def figure1_log():
    """One user: 23 Dislike, 532 Like, 43 Like, 389 Dislike (time order)."""
    return make_log([
        (7, 23, 2, 1),
        (7, 532, 4, 10),
        (7, 43, 4, 21),
        (7, 389, 1, 23),
    ])


@pytest.fixture
def small_log():
    """Four users over four items with mixed polarities and sequences."""
    return make_log([
        (1, 10, 5, 1), (1, 20, 4, 2),
        (2, 10, 4, 1), (2, 20, 2, 2), (2, 30, 5, 3),
        (3, 10, 5, 1), (3, 30, 1, 2),
        (4, 20, 4, 1), (4, 40, 3, 2),
    ])


@pytest.fixture(scope="session")
def synthetic_log():
    return make_synthetic_log(n_users=600, n_items=300, seed=0)


@pytest.fixture(scope="session")
def synthetic_split(synthetic_log):
    split = chronological_split(synthetic_log, 0.9)
    split.test_users = select_test_users(split, 10)
    return split


def random_fixture_events(rng, max_users=10, max_items=8):
    """Random small event set with distinct per-user timestamps."""
    n_users = rng.integers(2, max_users + 1)
    n_items = rng.integers(2, max_items + 1)
    rows = []
    for u in range(1, n_users + 1):
        k = rng.integers(1, n_items + 1)
        items = rng.choice(np.arange(1, n_items + 1), size=k, replace=False)
        times = rng.choice(np.arange(1, 1000), size=k, replace=False)
        for i, t in zip(items, times):
            rows.append((u, int(i), int(rng.integers(1, 6)), int(t)))
    return rows
