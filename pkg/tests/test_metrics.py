"""The five evaluation measures against hand-computed and naive oracles."""

import numpy as np
import pytest

from polarec.metrics import (coverage_entropy, entropy_bits, interlist_diversity,
                             precision_at_n, recovery, self_info_novelty)

from oracles import (naive_diversity, naive_entropy_bits, naive_novelty,
                     naive_recovery)


# -- recovery ----------------------------------------------------------------------

def test_recovery_first_of_hundred():
    rankings = {1: list(range(1, 101))}
    judgments = {1: [1]}          # relevant item ranked 1st of 100
    assert recovery(rankings, judgments) == pytest.approx(0.01, abs=1e-12)


def test_recovery_last_of_c():
    c = 40
    rankings = {1: list(range(1, c + 1))}
    judgments = {1: [c]}
    assert recovery(rankings, judgments) == pytest.approx(1.0, abs=1e-12)


def test_recovery_random_is_about_half():
    rng = np.random.default_rng(5)
    items = list(range(200))
    rankings = {}
    judgments = {}
    for u in range(400):
        ranked = list(rng.permutation(items))
        rankings[u] = ranked
        judgments[u] = list(rng.choice(items, size=5, replace=False))
    val = recovery(rankings, judgments)
    assert val == pytest.approx(0.5, abs=0.02)


def test_recovery_excludes_users_without_relevant():
    rankings = {1: [10, 20], 2: [10, 20]}
    judgments = {1: [20], 2: []}
    assert recovery(rankings, judgments) == pytest.approx(1.0, abs=1e-12)


def test_recovery_empty_returns_none():
    assert recovery({}, {}) is None


def test_recovery_reversal_identity():
    rng = np.random.default_rng(6)
    c = 37
    items = list(range(c))
    for _ in range(20):
        ranked = list(rng.permutation(items))
        rel = list(rng.choice(items, size=4, replace=False))
        forward = recovery({1: ranked}, {1: rel})
        backward = recovery({1: ranked[::-1]}, {1: rel})
        assert backward == pytest.approx(1.0 + 1.0 / c - forward, abs=1e-12)


def test_recovery_matches_naive():
    rng = np.random.default_rng(7)
    rankings = {u: list(rng.permutation(50)) for u in range(9)}
    judgments = {u: list(rng.choice(50, size=3, replace=False)) for u in range(9)}
    assert recovery(rankings, judgments) == pytest.approx(
        naive_recovery(rankings, judgments), abs=1e-12)


# -- precision -------------------------------------------------------------------------

def test_precision_all_relevant():
    lists = {u: [1, 2, 3] for u in range(4)}
    judgments = {u: [1, 2, 3] for u in range(4)}
    assert precision_at_n(lists, judgments, 3) == pytest.approx(1.0)


def test_precision_no_overlap():
    lists = {u: [1, 2] for u in range(4)}
    judgments = {u: [9] for u in range(4)}
    assert precision_at_n(lists, judgments, 2) == pytest.approx(0.0)


def test_precision_arithmetic_oracle():
    # overlaps 2, 0, 1 at n=10 -> (0.2 + 0.0 + 0.1) / 3 = 0.1
    lists = {1: [1, 2, 3], 2: [4, 5], 3: [6, 7]}
    judgments = {1: [1, 2], 2: [99], 3: [7]}
    assert precision_at_n(lists, judgments, 10) == pytest.approx(0.1, abs=1e-12)


def test_precision_excludes_users_without_relevant():
    lists = {1: [1], 2: [2]}
    judgments = {1: [1], 2: []}
    assert precision_at_n(lists, judgments, 1) == pytest.approx(1.0)


# -- coverage entropy ---------------------------------------------------------------------

def test_coverage_single_item_zero():
    lists = {u: [7] for u in range(5)}
    assert coverage_entropy(lists) == 0.0


def test_coverage_uniform_is_log2():
    lists = {u: [u] for u in range(8)}   # 8 distinct single-item lists
    assert coverage_entropy(lists) == pytest.approx(3.0, abs=1e-12)


def test_coverage_hand_fixture_1_5_bits():
    # counts (2,1,1) -> entropy of (0.5, 0.25, 0.25) = 1.5 bits
    lists = {1: [1, 2], 2: [1, 3]}
    assert coverage_entropy(lists) == pytest.approx(1.5, abs=1e-12)


def test_coverage_matches_naive_random():
    rng = np.random.default_rng(8)
    lists = {u: list(rng.choice(30, size=5, replace=False)) for u in range(40)}
    assert coverage_entropy(lists) == pytest.approx(naive_entropy_bits(lists), abs=1e-12)


def test_coverage_permutation_invariant_and_uniform_max():
    rng = np.random.default_rng(9)
    lists = [list(rng.choice(20, size=4, replace=False)) for _ in range(30)]
    base = coverage_entropy(lists)
    rng.shuffle(lists)
    assert coverage_entropy(lists) == pytest.approx(base, abs=1e-12)
    # the uniform count vector maximises entropy for the same support size
    support = {i for rec in lists for i in rec}
    assert base <= np.log2(len(support)) + 1e-12


# -- inter-list diversity ---------------------------------------------------------------------

def test_diversity_identical_lists_zero():
    lists = {u: [1, 2, 3] for u in range(6)}
    assert interlist_diversity(lists, 3) == pytest.approx(0.0)


def test_diversity_disjoint_lists_one():
    lists = {u: [10 * u + 1, 10 * u + 2] for u in range(5)}
    assert interlist_diversity(lists, 2) == pytest.approx(1.0)


def test_diversity_hand_enumeration():
    # lists [a,b],[a,c],[d,e]: distances 0.5, 1, 1 -> mean 5/6
    lists = {1: ["a", "b"], 2: ["a", "c"], 3: ["d", "e"]}
    assert interlist_diversity(lists, 2) == pytest.approx(5 / 6, abs=1e-12)


def test_diversity_single_user_none():
    assert interlist_diversity({1: [1, 2]}, 2) is None


def test_diversity_matches_naive():
    rng = np.random.default_rng(10)
    lists = {u: list(rng.choice(25, size=5, replace=False)) for u in range(30)}
    assert interlist_diversity(lists, 5) == pytest.approx(
        naive_diversity(lists, 5), abs=1e-12)


def test_diversity_sampled_close_to_exact_on_200_users():
    rng = np.random.default_rng(11)
    lists = {u: list(rng.choice(60, size=10, replace=False)) for u in range(200)}
    exact = interlist_diversity(lists, 10)
    sampled = interlist_diversity(lists, 10, pair_sample=20_000, seed=3)
    assert abs(exact - sampled) < 0.01


# -- novelty ---------------------------------------------------------------------------------

def test_novelty_all_items_at_user_count():
    lists = {u: [1, 2] for u in range(4)}
    counts = {1: 64, 2: 64}
    assert self_info_novelty(lists, counts, 64) == pytest.approx(0.0, abs=1e-12)


def test_novelty_log2_sixteen():
    lists = {1: [7]}
    assert self_info_novelty(lists, {7: 4}, 64) == pytest.approx(4.0, abs=1e-12)


def test_novelty_zero_count_floored_to_one():
    lists = {1: [7]}
    assert self_info_novelty(lists, {}, 64) == pytest.approx(np.log2(64), abs=1e-12)


def test_novelty_matches_naive():
    rng = np.random.default_rng(12)
    lists = {u: list(rng.choice(20, size=4, replace=False)) for u in range(25)}
    counts = {i: int(rng.integers(0, 300)) for i in range(20)}
    assert self_info_novelty(lists, counts, 123) == pytest.approx(
        naive_novelty(lists, counts, 123), abs=1e-10)


def test_entropy_bits_empty():
    assert entropy_bits(np.zeros(0)) == 0.0
