"""polarec: polarity-state recommender models and an offline benchmark.

Items are split into Like/Dislike states; two maximum-likelihood scorers on
the resulting transition graphs (a forward, precision-oriented one and a
backward, specificity-oriented one) blend through a single parameter that
trades accuracy against novelty and diversity.  The package also ships the
four classic baselines and the five-metric offline evaluation suite used to
benchmark them.
"""

from .baselines import (ClassicMarkov, ItemCF, PopularityModel, RatingMatrix,
                        UserCF, classic_markov_recommend, item_cf_predict,
                        pearson_similarity, popularity_recommend, user_cf_predict)
from .datasets import (InteractionLog, Polarity, SplitDataset, binarize,
                       chronological_split, dataset_stats, parse_movielens,
                       parse_netflix, select_test_users)
from .evaluate import (DegreeHistogram, EvalSetup, build_eval_setup,
                       emit_degree_histogram, evaluate_model, sweep_hybrid)
from .experiment import ExperimentConfig, run_experiment
from .metrics import (MetricsReport, coverage_entropy, interlist_diversity,
                      precision_at_n, recovery, self_info_novelty)
from .models import (RecommendationList, ScoreVector, UserState, candidate_items,
                     hybrid_ranks, hybrid_scores, pm_scores, sm_scores, top_n,
                     user_state)
from .stategraph import ItemIndex, StateGraph, build_ac_graph, build_at_graph

__version__ = "0.1.0"

__all__ = [
    "ClassicMarkov", "DegreeHistogram", "EvalSetup", "ExperimentConfig",
    "InteractionLog", "ItemCF", "ItemIndex", "MetricsReport", "Polarity",
    "PopularityModel", "RatingMatrix", "RecommendationList", "ScoreVector",
    "SplitDataset", "StateGraph", "UserCF", "UserState", "binarize",
    "build_ac_graph", "build_at_graph", "build_eval_setup", "candidate_items",
    "chronological_split", "classic_markov_recommend", "coverage_entropy",
    "dataset_stats", "emit_degree_histogram", "evaluate_model", "hybrid_ranks",
    "hybrid_scores", "interlist_diversity", "item_cf_predict", "parse_movielens",
    "parse_netflix", "pearson_similarity", "pm_scores", "popularity_recommend",
    "precision_at_n", "recovery", "run_experiment", "select_test_users",
    "self_info_novelty", "sm_scores", "sweep_hybrid", "top_n", "user_cf_predict",
    "user_state",
]
