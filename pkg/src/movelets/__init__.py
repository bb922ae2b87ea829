"""Discriminative multidimensional subsequences ("movelets") for trajectory classification."""

from .alignment import Alignment, master_alignment, rank_row
from .discovery import Candidate, Movelet, discover, enumerate_combinations
from .features import FeatureMatrix, knn_classify, transform
from .model import (
    Dataset,
    DataError,
    DimensionDescriptor,
    MoveletError,
    Schema,
    SchemaError,
    Trajectory,
    load_dataset,
    load_schema,
    validate_dataset,
)
from .relevance import OrderPoint, Relevance, master_relevance

__version__ = "0.1.0"
