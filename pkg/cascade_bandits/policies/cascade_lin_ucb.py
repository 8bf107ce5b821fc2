import numpy as np

from ..environment import top_k
from ..exceptions import DataError
from .base import Policy
from .linear import LinearState, check_compatible, lin_update


def lin_ucb_scores(state, feats, c):
    """U(e) = min{x_e^T theta_bar + c * sqrt(x_e^T M^-1 x_e), 1}."""
    X = feats.vectors
    width = np.einsum("ij,jk,ik->i", X, state.minv.inv, X)
    return np.minimum(X @ state.theta_bar + c * np.sqrt(np.maximum(width, 0.0)), 1.0)


def lin_ucb_select(state, feats, K, c):
    if c <= 0:
        raise DataError(f"c must be positive, got {c}")
    check_compatible(state, feats, K)
    return top_k(lin_ucb_scores(state, feats, c), K)


class CascadeLinUCB(Policy):
    name = "cascade_lin_ucb"

    def __init__(self, features, K, sigma, c, rng=None):
        super().__init__(features.n_items, K, rng)
        self.features = features
        self.c = c
        self.state = LinearState.initial(features.dim, sigma)

    def select(self):
        return lin_ucb_select(self.state, self.features, self.K, self.c)

    def update(self, A_t, click):
        self.state = lin_update(self.state, A_t, click, self.features)
