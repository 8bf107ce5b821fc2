"""Data structures shared by the simulator, the policies and the harness."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .exceptions import DataError

GREATER_THAN_THRESHOLD = "greater_than_threshold"
PRESENCE = "presence"
BINARIZE_KINDS = (GREATER_THAN_THRESHOLD, PRESENCE)


def _frozen_array(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeedbackMatrix:
    """Binary user-attraction matrix W, one row per user, one column per item."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise DataError(f"feedback matrix must be 2-D with at least one user and item, got shape {bits.shape}")
        if not np.isin(bits, (0, 1)).all():
            raise DataError("feedback matrix entries must be 0 or 1")
        object.__setattr__(self, "bits", _frozen_array(bits, np.uint8))

    @property
    def users(self):
        return self.bits.shape[0]

    @property
    def items(self):
        return self.bits.shape[1]

    def rows(self, index):
        return FeedbackMatrix(self.bits[np.asarray(index, dtype=int)])


@dataclass(frozen=True)
class RecommendationList:
    items: Tuple[int, ...]

    def __post_init__(self):
        items = tuple(int(e) for e in self.items)
        if not items:
            raise DataError("a recommendation list needs at least one item")
        if len(set(items)) != len(items):
            raise DataError(f"recommended items must be distinct: {items}")
        if min(items) < 0:
            raise DataError(f"item indices must be non-negative: {items}")
        object.__setattr__(self, "items", items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, k):
        return self.items[k]

    def check_items(self, n_items):
        if max(self.items) >= n_items:
            raise DataError(f"item index {max(self.items)} out of range for {n_items} items")

    def as_array(self):
        return np.fromiter(self.items, dtype=int, count=len(self.items))


@dataclass(frozen=True)
class ClickFeedback:
    """1-based click position, or None when the user clicked nothing (C_t = inf)."""

    position: Optional[int] = None

    def __post_init__(self):
        if self.position is not None and int(self.position) < 1:
            raise DataError(f"click position must be >= 1, got {self.position}")

    @property
    def clicked(self):
        return self.position is not None

    def observed_count(self, K):
        """min{C_t, K}: how many leading positions were examined."""
        if self.position is None:
            return K
        if self.position > K:
            raise DataError(f"click position {self.position} is beyond a list of length {K}")
        return self.position


NO_CLICK = ClickFeedback(None)


@dataclass(frozen=True)
class AttractionProbabilities:
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or ((probs < 0) | (probs > 1)).any() or not np.isfinite(probs).all():
            raise DataError("attraction probabilities must be a vector in [0, 1]")
        object.__setattr__(self, "probs", _frozen_array(probs, float))


@dataclass(frozen=True)
class ItemFeatures:
    """Item feature vectors x_e (rows of ``vectors``), each with norm <= 1."""

    vectors: np.ndarray
    scale: float = 1.0
    degenerate: bool = False

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] < 1:
            raise DataError(f"features must be an L x d matrix with d >= 1, got shape {vectors.shape}")
        if not np.isfinite(vectors).all():
            raise DataError("features must be finite")
        if (np.linalg.norm(vectors, axis=1) > 1.0 + 1e-12).any():
            raise DataError("every feature vector must have norm <= 1")
        object.__setattr__(self, "vectors", _frozen_array(vectors, float))

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def n_items(self):
        return self.vectors.shape[0]


@dataclass(frozen=True)
class FeatureSplit:
    train: FeedbackMatrix
    test: FeedbackMatrix
    split_seed: int
    train_rows: Tuple[int, ...] = ()
    test_rows: Tuple[int, ...] = ()


@dataclass(frozen=True)
class RatingTriple:
    user: str
    item: str
    rating: float


@dataclass(frozen=True)
class BinarizeRule:
    kind: str = GREATER_THAN_THRESHOLD
    threshold: float = 3.0

    def __post_init__(self):
        if self.kind not in BINARIZE_KINDS:
            raise DataError(f"unknown binarize rule {self.kind!r}, expected one of {BINARIZE_KINDS}")
        if not np.isfinite(self.threshold):
            raise DataError("binarize threshold must be finite")


@dataclass
class RegretTrace:
    """Cumulative regret and reward at checkpoints, aggregated over runs."""

    steps: np.ndarray
    mean_regret: np.ndarray
    stderr: np.ndarray
    mean_reward: np.ndarray
    per_run_final: np.ndarray
    per_run_regret: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    per_run_reward: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    label: str = ""

    def __post_init__(self):
        if len(self.mean_regret) != len(self.steps):
            raise DataError("mean_regret and steps must have the same length")

    @property
    def runs(self):
        return len(self.per_run_final)
