"""Small dense linear-algebra kernel for the linear bandit policies.

Random numbers come from ``numpy.random.Generator`` objects backed by the
PCG64 bit generator; standard normal variates use numpy's ziggurat sampler.
Both are platform independent for a fixed seed.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack
from sklearn.utils.extmath import svd_flip

from . import settings
from .exceptions import DataError, NotPositiveDefiniteError

logger = logging.getLogger(__name__)


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _as_vector(x, dim, name="x"):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != dim:
        raise DataError(f"{name} must be a vector of length {dim}, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise DataError(f"{name} contains non-finite entries")
    return x


def resymmetrize(a):
    return 0.5 * (a + a.T)


# ---------- POSITIVE-DEFINITE INVERSE ----------
@dataclass(frozen=True)
class PDMatrixInverse:
    """Holds M^-1 for a positive-definite gram matrix M; M itself is never stored."""

    inv: np.ndarray

    def __post_init__(self):
        inv = np.array(self.inv, dtype=float)
        if inv.ndim != 2 or inv.shape[0] != inv.shape[1] or inv.shape[0] < 1:
            raise DataError(f"inverse must be a non-empty square matrix, got shape {inv.shape}")
        if np.abs(inv - inv.T).max() > settings.SYMMETRY_TOL:
            raise DataError("inverse must be symmetric")
        inv.setflags(write=False)
        object.__setattr__(self, "inv", inv)

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    @property
    def dim(self):
        return self.inv.shape[0]


def rank_one_update(state, x, sigma=settings.DEFAULT_SIGMA):
    """Inverse of (M + sigma^-2 x x^T) from M^-1 (Sherman-Morrison), O(d^2)."""
    if sigma <= 0:
        raise DataError(f"sigma must be positive, got {sigma}")
    x = _as_vector(x, state.dim)
    mx = state.inv @ x
    denom = x @ mx + sigma * sigma
    return PDMatrixInverse(resymmetrize(state.inv - np.outer(mx, mx) / denom))


def cholesky(cov):
    """Lower Cholesky factor; raises NotPositiveDefiniteError naming the failing pivot."""
    cov = np.ascontiguousarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DataError(f"covariance must be square, got shape {cov.shape}")
    if not np.isfinite(cov).all():
        raise DataError("covariance contains non-finite entries")
    factor, info = lapack.dpotrf(cov, lower=1, clean=1)
    if info > 0:
        # LAPACK reports the order of the first non-positive leading minor
        raise NotPositiveDefiniteError(info - 1)
    if info < 0:
        raise DataError(f"invalid argument {-info} passed to dpotrf")
    return factor


def sample_mvn(mean, cov, rng):
    """Draw from N(mean, cov) as mean + L z with L the Cholesky factor of cov."""
    if isinstance(cov, PDMatrixInverse):
        cov = cov.inv
    cov = np.asarray(cov, dtype=float)
    mean = _as_vector(mean, cov.shape[0], "mean")
    factor = cholesky(cov)
    return mean + factor @ rng.standard_normal(mean.shape[0])


# ---------- TRUNCATED SVD ----------
@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.S.shape[0]

    def reconstruct(self):
        return (self.U * self.S) @ self.V.T


def truncated_svd(
    A,
    d,
    rng=None,
    oversamples=settings.SVD_OVERSAMPLES,
    max_iter=settings.SVD_MAX_ITER,
    tol=settings.SVD_TOL,
):
    """Rank-d SVD by orthogonal (subspace) power iteration with oversampling.

    The largest-magnitude entry of every column of V is made non-negative so
    the factors are reproducible.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise DataError("matrix contains non-finite entries")
    rows, cols = A.shape
    if d < 1 or d > min(rows, cols):
        raise DataError(f"rank d={d} must be between 1 and min{A.shape}={min(rows, cols)}")

    if rng is None:
        rng = make_rng(0)
    k = min(d + oversamples, rows, cols)
    Q, _ = np.linalg.qr(A @ rng.standard_normal((cols, k)))

    previous = None
    for iteration in range(max_iter):
        Z, _ = np.linalg.qr(A.T @ Q)
        Q, _ = np.linalg.qr(A @ Z)
        u_small, s, vt = np.linalg.svd(Q.T @ A, full_matrices=False)
        if previous is not None and np.abs(s[:d] - previous).max() <= tol * max(s[0], 1.0):
            logger.debug(f"SVD converged after {iteration + 1} iterations")
            break
        previous = s[:d]
    else:
        if max_iter == 0:
            u_small, s, vt = np.linalg.svd(Q.T @ A, full_matrices=False)
        else:
            logger.debug(f"SVD stopped at max_iter={max_iter}")

    U = Q @ u_small[:, :d]
    U, vt = svd_flip(U, vt[:d], u_based_decision=False)
    return SvdFactors(U=U, S=s[:d].copy(), V=vt.T)
