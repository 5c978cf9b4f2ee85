"""Block-model least squares for m-uniform random hypergraphs.

Sampling from simple and full hypergraphon models, estimation of the
hyperedge probability tensor by alternating block-model least squares with
spectral initialization, missing-entry hyperedge prediction, and the
experiment runners behind the ``hgon`` command-line tool.
"""

from .estimator import (
    BlockProbabilities,
    FitResult,
    HypergraphBlockModel,
    block_model_loss,
    blockwise_means,
    fit_block_model,
    incidence_capacity,
    incidence_counts,
    rate_optimal_k,
    spectral_init,
    update_assignments,
)
from .metrics import TrialSummary, normalized_error, summarize_trials
from .models import (
    FullHypergraphon,
    HypergraphSample,
    SimpleHypergraphon,
    constant_model,
    logistic_model,
    model_from_config,
    product_model,
)
from .prediction import (
    MissingEdgePredictor,
    ObservationMask,
    PredictionResult,
    auc,
    fit_missing,
    load_hyperedge_list,
    masked_block_probabilities,
    predict_missing,
    sample_mask,
    save_predictions,
)
from .tensor import (
    AdjacencyTensor,
    ProbabilityTensor,
    collapse,
    frobenius_sq_diff,
    load_adjacency,
    load_probability,
    make_hyperedge,
    save_adjacency,
    save_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyTensor",
    "BlockProbabilities",
    "FitResult",
    "FullHypergraphon",
    "HypergraphBlockModel",
    "HypergraphSample",
    "MissingEdgePredictor",
    "ObservationMask",
    "PredictionResult",
    "ProbabilityTensor",
    "SimpleHypergraphon",
    "TrialSummary",
    "auc",
    "block_model_loss",
    "blockwise_means",
    "collapse",
    "constant_model",
    "fit_block_model",
    "fit_missing",
    "frobenius_sq_diff",
    "incidence_capacity",
    "incidence_counts",
    "load_adjacency",
    "load_hyperedge_list",
    "load_probability",
    "logistic_model",
    "make_hyperedge",
    "masked_block_probabilities",
    "model_from_config",
    "normalized_error",
    "predict_missing",
    "product_model",
    "rate_optimal_k",
    "sample_mask",
    "save_adjacency",
    "save_predictions",
    "save_probability",
    "spectral_init",
    "summarize_trials",
    "update_assignments",
    "__version__",
]
