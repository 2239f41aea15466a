"""Filter feature selection for high-dimensional, low-sample-size data."""

from .baselines import build_similarity_graph, euclidean_distance_matrix, fisher_score, laplacian_score
from .classify import accuracy, fit_linear_svm, fit_nearest_centroid, predict
from .core import (
    FeatureHistogram,
    FeatureRanking,
    aggregate_histograms,
    between_pair_mask,
    pwfp_select,
    rank_and_select,
    resolve_beta,
    score_features,
    within_pair_mask,
)
from .dataset import SplitSpec, load_csv, load_libsvm, stratified_split, zscore_normalize
from .errors import ConfigError, ParseError, PwfpError, ValidationError
from .harness import ExperimentConfig, beta_sweep, run_experiment, summarize
from .synthetic import make_planted

__version__ = "0.1.0"
