from .external import (EPS, ExternalScoreError, export_scores,
                       import_external_scores)
from .features import D, bucket, cosine, featurize, fnv1a64
from .model import (DEFAULT_EPOCH_GRID, DEFAULT_L2, DEFAULT_LR, ScorerError,
                    ScorerModel, SplitSpec, score_comments, stratified_split,
                    train_reference_scorer)

__all__ = [
    "featurize", "cosine", "bucket", "fnv1a64", "D",
    "ScorerModel", "ScorerError", "SplitSpec", "train_reference_scorer",
    "score_comments", "stratified_split",
    "DEFAULT_EPOCH_GRID", "DEFAULT_LR", "DEFAULT_L2",
    "export_scores", "import_external_scores", "ExternalScoreError", "EPS",
]
