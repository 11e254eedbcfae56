"""Small dense linear-algebra kernels with an explicit tolerance policy.

One global policy: numerical rank counts singular values above a relative
SVD threshold (default 1e-10 of the largest).  Desk-scale Gaussian matrices
have singular-value gaps many orders above this, so decisions are crisp;
the gap is recorded anyway so borderline calls can be surfaced as fragile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_RANK_TOL",
    "FRAGILE_GAP",
    "RankDecision",
    "numerical_rank",
    "batched_ranks",
    "LeastSquaresResult",
    "least_squares",
    "hermitian_top_eig",
    "null_space_vector",
]

DEFAULT_RANK_TOL = 1e-10
FRAGILE_GAP = 10.0


@dataclass(frozen=True)
class RankDecision:
    """Outcome of a numerical rank computation, with the decision gap."""

    rank: int
    smallest_kept_sv: float
    largest_dropped_sv: float
    tol_used: float

    @property
    def gap(self) -> float:
        """Ratio smallest kept / largest dropped; inf when nothing was dropped."""
        if self.largest_dropped_sv <= 0.0:
            return np.inf
        if self.rank == 0:
            return 0.0
        return self.smallest_kept_sv / self.largest_dropped_sv

    @property
    def fragile(self) -> bool:
        """A decision within a 10x gap of the threshold is flagged as flaky."""
        return self.gap < FRAGILE_GAP


def numerical_rank(M, tol_rel: float = DEFAULT_RANK_TOL) -> RankDecision:
    """Rank = number of singular values above tol_rel * sigma_max."""
    M = np.asarray(M)
    if not (np.all(np.isfinite(M.real)) and np.all(np.isfinite(M.imag))):
        raise ValueError("numerical_rank requires finite entries")
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    s = np.linalg.svd(M, compute_uv=False)
    smax = float(s[0]) if s.size else 0.0
    tol = tol_rel * smax
    rank = int(np.sum(s > tol))
    kept = float(s[rank - 1]) if rank > 0 else 0.0
    dropped = float(s[rank]) if rank < s.size else 0.0
    return RankDecision(rank=rank, smallest_kept_sv=kept, largest_dropped_sv=dropped, tol_used=tol)


def batched_ranks(stack: np.ndarray, tol_rel: float = DEFAULT_RANK_TOL):
    """Ranks and fragility flags for a (..., m, k) stack of matrices.

    Returns (ranks, fragile) with the leading batch shape.  Used by the
    distance enumeration, where hundreds of thousands of tiny SVDs are
    needed; the decisions match numerical_rank exactly.
    """
    s = np.linalg.svd(stack, compute_uv=False)
    smax = s[..., 0]
    tol = tol_rel * smax
    ranks = np.sum(s > tol[..., None], axis=-1)
    nsv = s.shape[-1]
    idx_kept = np.clip(ranks - 1, 0, nsv - 1)
    idx_drop = np.clip(ranks, 0, nsv - 1)
    kept = np.take_along_axis(s, idx_kept[..., None], axis=-1)[..., 0]
    dropped = np.where(ranks < nsv, np.take_along_axis(s, idx_drop[..., None], axis=-1)[..., 0], 0.0)
    fragile = (ranks > 0) & (ranks < nsv) & (dropped > 0) & (kept < FRAGILE_GAP * dropped)
    return ranks, fragile


@dataclass(frozen=True)
class LeastSquaresResult:
    """Minimum-norm least-squares solution with its residual norm.

    degenerate is set when the system matrix is numerically rank deficient;
    the solution is still returned and the caller decides what to do.
    """

    x: np.ndarray
    residual_norm: float
    degenerate: bool


def least_squares(M, b) -> LeastSquaresResult:
    """Minimize ||Mx - b||_2 for a tall (m >= k) system."""
    M = np.asarray(M)
    b = np.asarray(b).reshape(-1)
    m, k = M.shape
    if m < k:
        raise ValueError(f"least_squares expects m >= k, got {m}x{k}")
    decision = numerical_rank(M)
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    residual = float(np.linalg.norm(M @ x - b))
    return LeastSquaresResult(x=x, residual_norm=residual, degenerate=decision.rank < k)


def hermitian_top_eig(X) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and a unit top eigenvector of a Hermitian X."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("hermitian_top_eig requires a square matrix")
    scale = max(1.0, float(np.max(np.abs(X))))
    if np.max(np.abs(X - X.conj().T)) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian within tolerance 1e-12")
    w, v = np.linalg.eigh((X + X.conj().T) / 2.0)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    v1 = v[:, 0] / np.linalg.norm(v[:, 0])
    return w, v1


def null_space_vector(M, tol_rel: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """A unit right-null vector of M (the smallest right singular vector).

    Raises when M is numerically full column rank, i.e. has no null space.
    """
    M = np.asarray(M)
    m, c = M.shape
    u, s, vt = np.linalg.svd(M)
    smax = float(s[0]) if s.size else 0.0
    rank = int(np.sum(s > tol_rel * smax))
    if rank >= c:
        raise ValueError("matrix is numerically full column rank; no null vector")
    v = vt[-1].conj()
    resid = float(np.linalg.norm(M @ v))
    if smax > 0 and resid > 1e-10 * smax:
        raise ValueError(f"null vector residual {resid:.3e} exceeds 1e-10 * sigma_max")
    return v
