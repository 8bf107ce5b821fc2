import itertools
import json
from pathlib import Path

import numpy as np
import pytest

from cascade_bandits.items import FeedbackMatrix, ItemFeatures, RecommendationList

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_matrix(rng, users, items, density=0.3):
    return FeedbackMatrix((rng.random((users, items)) < density).astype(np.uint8))


def exhaustive_optimum(W, K):
    """Best coverage over all K-subsets; only feasible for tiny L."""
    best_value, best_set = -1.0, None
    for subset in itertools.combinations(range(W.items), K):
        value = W.bits[:, list(subset)].any(axis=1).mean()
        if value > best_value:
            best_value, best_set = value, subset
    return best_value, RecommendationList(best_set)


def unit_features(rng, L, d):
    X = rng.standard_normal((L, d))
    return ItemFeatures(X / np.linalg.norm(X, axis=1, keepdims=True))


@pytest.fixture
def write_config(tmp_path):
    def _write(**fields):
        fields.setdefault("out_dir", str(tmp_path / "out"))
        path = tmp_path / "config.json"
        path.write_text(json.dumps(fields), encoding="utf-8")
        return path

    return _write
