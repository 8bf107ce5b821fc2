"""Common policy interface plus the two reference policies used by the harness."""

import numpy as np

from ..items import RecommendationList


class Policy:
    """Selects a list of K items each step, then learns from the click on it.

    Every instance owns one seeded random stream; deterministic policies never
    draw from it.
    """

    name = "policy"

    def __init__(self, n_items, K, rng=None):
        self.n_items = n_items
        self.K = K
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def select(self):
        raise NotImplementedError

    def update(self, A_t, click):
        pass

    def __repr__(self):
        return f"{type(self).__name__}(L={self.n_items}, K={self.K})"


class OraclePolicy(Policy):
    """Always recommends a fixed list (A* in oracle-replay mode)."""

    name = "oracle"

    def __init__(self, optimal, n_items, rng=None):
        super().__init__(n_items, len(optimal), rng)
        self.optimal = optimal

    def select(self):
        return self.optimal


class UniformRandomPolicy(Policy):
    """Uniformly random K items in random order; the no-learning baseline."""

    name = "uniform_random"

    def select(self):
        return RecommendationList(tuple(self.rng.choice(self.n_items, size=self.K, replace=False)))
