from dataclasses import dataclass

import numpy as np

from ..environment import top_k
from ..exceptions import DataError
from .base import Policy


@dataclass(frozen=True)
class Ucb1State:
    """Per-item observation counts T(e), empirical means w-hat(e) and the step counter t."""

    counts: np.ndarray
    means: np.ndarray
    t: int = 1

    @classmethod
    def initial(cls, n_items):
        return cls(np.zeros(n_items, dtype=np.int64), np.zeros(n_items), 1)


def ucb1_scores(state):
    """w-hat(e) + sqrt(1.5 ln t / T(e)); never-observed items get +inf."""
    scores = np.full(state.counts.shape[0], np.inf)
    seen = state.counts > 0
    scores[seen] = state.means[seen] + np.sqrt(1.5 * np.log(state.t) / state.counts[seen])
    return scores


def ucb1_select(state, K):
    if K > state.counts.shape[0]:
        raise DataError(f"K={K} exceeds the number of items L={state.counts.shape[0]}")
    return top_k(ucb1_scores(state), K)


def ucb1_update(state, A_t, c_t):
    counts = state.counts.copy()
    means = state.means.copy()
    for k in range(c_t.observed_count(len(A_t))):
        e = A_t[k]
        counts[e] += 1
        means[e] += (float(c_t.position == k + 1) - means[e]) / counts[e]
    return Ucb1State(counts, means, state.t + 1)


class CascadeUCB1(Policy):
    name = "cascade_ucb1"

    def __init__(self, n_items, K, rng=None):
        super().__init__(n_items, K, rng)
        self.state = Ucb1State.initial(n_items)

    def select(self):
        return ucb1_select(self.state, self.K)

    def update(self, A_t, click):
        self.state = ucb1_update(self.state, A_t, click)
