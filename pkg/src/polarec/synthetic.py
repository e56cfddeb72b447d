"""Seeded synthetic rating logs for demos and integration tests.

The generator produces the structural features the benchmark exercises:
long-tailed item popularity, genre-clustered user tastes (collaborative
signal), genre-runs inside each user's sequence (sequential signal), and
staggered user arrival so a global chronological split leaves late joiners
with enough test ratings.
"""

from __future__ import annotations

import numpy as np

from .datasets import InteractionLog


def make_synthetic_log(n_users: int = 600, n_items: int = 300, n_genres: int = 8,
                       mean_ratings: float = 40.0, seed: int = 0) -> InteractionLog:
    """A reproducible rating log with recommender-friendly structure."""
    rng = np.random.default_rng(seed)
    genre_of = rng.integers(0, n_genres, size=n_items)
    pop = (np.arange(1, n_items + 1, dtype=np.float64)) ** -0.9
    rng.shuffle(pop)

    users, items, ratings, stamps = [], [], [], []
    horizon = 1_000_000
    for u in range(1, n_users + 1):
        n_u = int(np.clip(rng.lognormal(np.log(mean_ratings), 0.6), 4, 4 * mean_ratings))
        join = rng.integers(0, int(horizon * 0.95))
        span = rng.integers(horizon // 20, horizon // 3)
        taste = rng.dirichlet(np.full(n_genres, 0.4))
        genre = rng.choice(n_genres, p=taste)
        seen = set()
        times = np.sort(rng.integers(join, join + span, size=n_u))
        for k in range(n_u):
            if rng.random() > 0.7:          # drift to another favoured genre
                genre = rng.choice(n_genres, p=taste)
            w = pop * np.where(genre_of == genre, 5.0, 1.0)
            for i in seen:
                w[i] = 0.0
            total = w.sum()
            if total <= 0:
                break
            item = rng.choice(n_items, p=w / total)
            seen.add(item)
            affinity = taste[genre_of[item]] * n_genres   # ~1 when indifferent
            base = 2.4 + 1.3 * np.tanh(affinity - 1.0) + rng.normal(0.0, 0.9)
            rating = int(np.clip(round(base), 1, 5))
            users.append(u)
            items.append(item + 1)
            ratings.append(rating)
            stamps.append(int(times[k]))
    return InteractionLog(users, items, ratings, stamps)
