"""Item features from a rank-d truncated SVD of the training half of W.

The rows of V * Sigma become the feature vectors. They are rescaled globally
by max(1, largest norm) so that every ||x_e|| <= 1.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from . import settings
from .exceptions import DataError
from .items import FeatureSplit, ItemFeatures
from .numerics import make_rng, truncated_svd

logger = logging.getLogger(__name__)


def split_rows(W, seed):
    """Randomly permute the users; the first floor(m/2) train the features, the rest test."""
    if W.users < 2:
        raise DataError(f"need at least 2 users to split, got {W.users}")
    order = make_rng(seed).permutation(W.users)
    half = W.users // 2
    train_rows, test_rows = order[:half], order[half:]
    logger.debug(f"Split {W.users} users into {half} train / {W.users - half} test (seed {seed})")
    return FeatureSplit(
        train=W.rows(train_rows),
        test=W.rows(test_rows),
        split_seed=seed,
        train_rows=tuple(int(i) for i in train_rows),
        test_rows=tuple(int(i) for i in test_rows),
    )


def features_from_matrix(train, d):
    if d < 1 or d > min(train.shape):
        raise DataError(f"d={d} must be between 1 and min{train.shape}={min(train.shape)}")
    factors = truncated_svd(train, d)
    raw = factors.V * factors.S
    if not raw.any():
        logger.warning("Training matrix is all zeros; every feature vector is zero")
        return ItemFeatures(raw, scale=1.0, degenerate=True)
    scale = max(1.0, float(np.linalg.norm(raw, axis=1).max()))
    return ItemFeatures(raw / scale, scale=scale)


def build_features(split, d):
    """x_e(i) = V[e, i] * S[i] from the train split, scaled into the unit ball."""
    features = features_from_matrix(split.train.bits.astype(float), d)
    logger.info(f"Built {features.n_items} item features of dimension {d} (scale {features.scale:.6g})")
    return features


def write_features(features, path, item_ids=None):
    """CSV with header item,f1,...,fd and one row per item."""
    if item_ids is None:
        item_ids = range(features.n_items)
    df = pd.DataFrame(features.vectors, columns=[f"f{i + 1}" for i in range(features.dim)])
    df.insert(0, "item", list(item_ids))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=settings.FEATURE_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {features.n_items} feature vectors to {path}")
    return path
