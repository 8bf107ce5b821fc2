"""Shared statistics of the linear policies: M^-1, B and the posterior mean."""

from dataclasses import dataclass

import numpy as np

from .. import settings
from ..exceptions import DataError
from ..numerics import PDMatrixInverse, rank_one_update


@dataclass(frozen=True)
class LinearState:
    minv: PDMatrixInverse
    b: np.ndarray
    sigma: float
    theta_bar: np.ndarray

    @classmethod
    def initial(cls, dim, sigma=settings.DEFAULT_SIGMA):
        """M_0 = I_d and B_0 = 0."""
        return cls.from_parts(PDMatrixInverse.identity(dim), np.zeros(dim), sigma)

    @classmethod
    def from_parts(cls, minv, b, sigma):
        if sigma <= 0:
            raise DataError(f"sigma must be positive, got {sigma}")
        if not isinstance(minv, PDMatrixInverse):
            minv = PDMatrixInverse(minv)
        b = np.array(b, dtype=float)
        if b.shape != (minv.dim,):
            raise DataError(f"B must have length {minv.dim}, got shape {b.shape}")
        b.setflags(write=False)
        theta_bar = minv.inv @ b / sigma**2
        theta_bar.setflags(write=False)
        return cls(minv=minv, b=b, sigma=float(sigma), theta_bar=theta_bar)

    @property
    def dim(self):
        return self.minv.dim


def check_compatible(state, feats, K):
    if feats.dim != state.dim:
        raise DataError(f"feature dimension {feats.dim} does not match model dimension {state.dim}")
    if K < 1 or K > feats.n_items:
        raise DataError(f"K={K} must be between 1 and the number of items L={feats.n_items}")


def observe(state, x, attracted):
    """Fold one observed item into the statistics: M += x x^T / sigma^2, B += x * w."""
    minv = rank_one_update(state.minv, x, state.sigma)
    b = state.b + x if attracted else state.b
    return LinearState.from_parts(minv, b, state.sigma)


def lin_update(state, A_t, c_t, feats):
    """Update with every examined position k <= min{C_t, K}; later positions are unobserved."""
    A_t.check_items(feats.n_items)
    for k in range(c_t.observed_count(len(A_t))):
        state = observe(state, feats.vectors[A_t[k]], c_t.position == k + 1)
    return state
