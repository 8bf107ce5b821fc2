from ..environment import top_k
from ..numerics import sample_mvn
from .base import Policy
from .linear import LinearState, check_compatible, lin_update


def lin_ts_select(state, feats, K, rng):
    """Sample theta ~ N(theta_bar, M^-1) and recommend the K best items under it."""
    check_compatible(state, feats, K)
    theta = sample_mvn(state.theta_bar, state.minv, rng)
    return top_k(feats.vectors @ theta, K)


class CascadeLinTS(Policy):
    name = "cascade_lin_ts"

    def __init__(self, features, K, sigma, rng=None):
        super().__init__(features.n_items, K, rng)
        self.features = features
        self.state = LinearState.initial(features.dim, sigma)

    def select(self):
        return lin_ts_select(self.state, self.features, self.K, self.rng)

    def update(self, A_t, click):
        self.state = lin_update(self.state, A_t, click, self.features)
