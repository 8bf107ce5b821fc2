"""Ranked bandits with one linear Thompson sampler per list position.

Position k is updated only when it was examined, with the click indicator of
position k; a click further down the list counts as a 0 for position k.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import DataError
from ..items import RecommendationList
from ..numerics import sample_mvn
from .base import Policy
from .linear import LinearState, check_compatible, observe


@dataclass(frozen=True)
class RankedState:
    per_position: Tuple[LinearState, ...]

    @classmethod
    def initial(cls, K, dim, sigma):
        return cls(tuple(LinearState.initial(dim, sigma) for _ in range(K)))

    @property
    def K(self):
        return len(self.per_position)


def ranked_lin_ts_select(state, feats, K, rng):
    """For k = 1..K draw theta^k from position k's posterior and take its best unused item."""
    if K != state.K:
        raise DataError(f"state holds {state.K} positions but K={K}")
    check_compatible(state.per_position[0], feats, K)
    available = np.ones(feats.n_items, dtype=bool)
    chosen = []
    for position in state.per_position:
        theta = sample_mvn(position.theta_bar, position.minv, rng)
        scores = np.where(available, feats.vectors @ theta, -np.inf)
        best = int(np.argmax(scores))
        available[best] = False
        chosen.append(best)
    return RecommendationList(tuple(chosen))


def ranked_lin_ts_update(state, A_t, c_t, feats):
    A_t.check_items(feats.n_items)
    positions = list(state.per_position)
    for k in range(c_t.observed_count(len(A_t))):
        positions[k] = observe(positions[k], feats.vectors[A_t[k]], c_t.position == k + 1)
    return RankedState(tuple(positions))


class RankedLinTS(Policy):
    name = "ranked_lin_ts"

    def __init__(self, features, K, sigma, rng=None):
        super().__init__(features.n_items, K, rng)
        self.features = features
        self.state = RankedState.initial(K, features.dim, sigma)

    def select(self):
        return ranked_lin_ts_select(self.state, self.features, self.K, self.rng)

    def update(self, A_t, click):
        self.state = ranked_lin_ts_update(self.state, A_t, click, self.features)
