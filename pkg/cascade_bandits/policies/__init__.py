from ..exceptions import ConfigError
from .base import OraclePolicy, Policy, UniformRandomPolicy
from .cascade_lin_ts import CascadeLinTS, lin_ts_select
from .cascade_lin_ucb import CascadeLinUCB, lin_ucb_scores, lin_ucb_select
from .cascade_ucb1 import CascadeUCB1, Ucb1State, ucb1_scores, ucb1_select, ucb1_update
from .linear import LinearState, lin_update
from .ranked_lin_ts import RankedLinTS, RankedState, ranked_lin_ts_select, ranked_lin_ts_update

ALGORITHMS = (
    CascadeUCB1.name,
    CascadeLinTS.name,
    CascadeLinUCB.name,
    RankedLinTS.name,
    UniformRandomPolicy.name,
)
LINEAR_ALGORITHMS = (CascadeLinTS.name, CascadeLinUCB.name, RankedLinTS.name)


def make_policy(algo, features, K, sigma, c=None, rng=None):
    if algo == CascadeUCB1.name:
        return CascadeUCB1(features.n_items, K, rng)
    if algo == CascadeLinTS.name:
        return CascadeLinTS(features, K, sigma, rng)
    if algo == CascadeLinUCB.name:
        if c is None:
            raise ConfigError("cascade_lin_ucb needs a confidence constant c")
        return CascadeLinUCB(features, K, sigma, c, rng)
    if algo == RankedLinTS.name:
        return RankedLinTS(features, K, sigma, rng)
    if algo == UniformRandomPolicy.name:
        return UniformRandomPolicy(features.n_items, K, rng)
    raise ConfigError(f"unknown algorithm {algo!r}, expected one of {ALGORITHMS}")
