"""Cascade-model simulator: clicks, rewards, regret and the greedy optimum A*."""

import logging
from typing import NamedTuple

import numpy as np

from .exceptions import DataError
from .items import AttractionProbabilities, ClickFeedback, FeedbackMatrix, NO_CLICK, RecommendationList

logger = logging.getLogger(__name__)


def _values(A, w):
    w = np.asarray(w, dtype=float)
    idx = A.as_array()
    if idx.max() >= w.shape[0]:
        raise DataError(f"item index {idx.max()} out of range for a weight vector of length {w.shape[0]}")
    return w[idx]


# ---------- CASCADE MODEL ----------
def reward(A, w):
    """f(A, w) = 1 - prod_k (1 - w(a_k)); w may be a 0/1 realization or probabilities."""
    return float(1.0 - np.prod(1.0 - _values(A, w)))


expected_reward = reward


def simulate_click(A, w_row):
    """Position of the first attractive item in A (1-based), or no click."""
    hits = np.flatnonzero(_values(A, w_row) > 0)
    if hits.size == 0:
        return NO_CLICK
    return ClickFeedback(int(hits[0]) + 1)


def observed_weights(A, c):
    """Weights revealed by click c: {a_k: 1[c = k]} for k <= min{c, K}."""
    n_observed = c.observed_count(len(A))
    return {A[k]: int(c.position == k + 1) for k in range(n_observed)}


def attraction_probs(W):
    return AttractionProbabilities(W.bits.mean(axis=0))


def coverage(W, A):
    """Fraction of users attracted by at least one item of A."""
    A.check_items(W.items)
    return float(W.bits[:, A.as_array()].any(axis=1).mean())


# ---------- ORACLES ----------
def greedy_oracle(W, K):
    """Greedy max-coverage list: add the item attracting most not-yet-covered users."""
    if K < 1 or K > W.items:
        raise DataError(f"K={K} must be between 1 and the number of items L={W.items}")
    bits = W.bits.astype(np.int64)
    covered = np.zeros(W.users, dtype=bool)
    chosen = []
    for _ in range(K):
        gains = bits[~covered].sum(axis=0)
        gains[chosen] = -1
        best = int(np.argmax(gains))
        chosen.append(best)
        covered |= bits[:, best].astype(bool)
    logger.debug(f"Greedy A* {chosen} covers {covered.mean():.4f} of {W.users} users")
    return RecommendationList(tuple(chosen))


def top_k(scores, K):
    """Indices of the K largest scores in decreasing order, ties to the lowest index."""
    scores = np.asarray(scores, dtype=float)
    if K < 1 or K > scores.shape[0]:
        raise DataError(f"K={K} must be between 1 and the number of items L={scores.shape[0]}")
    order = np.argsort(-scores, kind="stable")[:K]
    return RecommendationList(tuple(int(e) for e in order))


# ---------- ENVIRONMENTS ----------
class StepOutcome(NamedTuple):
    click: ClickFeedback
    regret: float
    reward: float


class ClickEnvironment:
    """Draws one weight vector w_t per step and scores lists against the baseline A*."""

    n_items: int
    optimal: RecommendationList

    def sample_weights(self, rng):
        raise NotImplementedError

    def step(self, A_t, rng):
        A_t.check_items(self.n_items)
        w = self.sample_weights(rng)
        gained = reward(A_t, w)
        return StepOutcome(simulate_click(A_t, w), reward(self.optimal, w) - gained, gained)


class MatrixEnvironment(ClickEnvironment):
    """Users are rows of W, drawn uniformly with replacement; A* is the greedy list."""

    def __init__(self, W, K):
        self.W = W
        self.K = K
        self.n_items = W.items
        self.optimal = greedy_oracle(W, K)
        self.wbar = attraction_probs(W).probs

    def sample_weights(self, rng):
        return self.W.bits[rng.integers(self.W.users)]

    def optimal_reward(self):
        return coverage(self.W, self.optimal)

    def list_reward(self, A):
        return coverage(self.W, A)


class BernoulliEnvironment(ClickEnvironment):
    """Items attract independently with probabilities w-bar; A* is the exact top-K."""

    def __init__(self, wbar, K):
        self.wbar = AttractionProbabilities(wbar).probs
        self.K = K
        self.n_items = self.wbar.shape[0]
        self.optimal = top_k(self.wbar, K)

    def sample_weights(self, rng):
        return (rng.random(self.n_items) < self.wbar).astype(np.uint8)

    def optimal_reward(self):
        return expected_reward(self.optimal, self.wbar)

    def list_reward(self, A):
        return expected_reward(A, self.wbar)


def env_step(env, A_t, rng):
    """One interaction: draw w_t, return the click on A_t and R = f(A*, w_t) - f(A_t, w_t)."""
    return env.step(A_t, rng)
