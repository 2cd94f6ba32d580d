from .models import (
    OMITTED,
    CandidateRecord,
    CleaningRules,
    CommentRecord,
    DataError,
    Dataset,
    ItemRecord,
    ResponseEvent,
)
from .io import load_dataset, save_dataset
from .cleaning import apply_cleaning
from .synth import GroundTruth, SynthSpec, generate_synthetic

__all__ = [
    "OMITTED",
    "CandidateRecord",
    "CleaningRules",
    "CommentRecord",
    "DataError",
    "Dataset",
    "ItemRecord",
    "ResponseEvent",
    "load_dataset",
    "save_dataset",
    "apply_cleaning",
    "GroundTruth",
    "SynthSpec",
    "generate_synthetic",
]
