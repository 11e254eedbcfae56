"""Exact desk-scale l0 phase retrieval over the complexes.

Per candidate support I of size k, the magnitudes give m real-linear
equations tr(phi_i phi_i^* X) = y_i^2 in the Hermitian lift X = x x^*
(k^2 real unknowns, phi_i the conjugated i-th row restricted to I).  With
m >= k^2 generic rows the Hermitian solution is unique, so solving the
linear system and extracting the top eigenpair recovers x exactly; a
candidate is accepted only when the system residual, positive
semidefiniteness, and the rank-one defect lambda_2 / lambda_1 all pass.
The lifted path is exact for k <= 3 at the m = 4k - 2 threshold (where
m >= k^2 holds); beyond that the solver degrades to multi-start damped
Gauss-Newton refinement and labels its output heuristic.

A collision probe searches for two non-phase-equivalent sparse vectors
with identical magnitudes; it is a falsification attempt, never a proof
of uniqueness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import Field, MeasurementEnsemble, SparseVector, as_measurement, phase_equivalent
from .numerics import hermitian_top_eig
from .solver_real import SearchStats, SolutionSet, _dedup_insert

__all__ = [
    "LiftedSolveReport",
    "CollisionProbe",
    "GaussNewtonResult",
    "solve_l0_complex",
    "refine_gauss_newton",
    "collision_probe_complex",
    "column_magnitude_collision_1sparse",
]

RANK1_TOL = 1e-6
PSD_TOL = 1e-8


@dataclass(frozen=True)
class LiftedSolveReport:
    """One per-support lifted solve: the Hermitian candidate and its spectrum."""

    support: tuple[int, ...]
    X: np.ndarray
    eigenvalues: np.ndarray
    rank1_defect: float
    accepted: bool
    x_hat: SparseVector | None


@dataclass(frozen=True)
class CollisionProbe:
    """Best near-collision found by the optimization probe."""

    pair: tuple[SparseVector, SparseVector] | None
    objective: float
    restarts: int
    verdict: str  # collision_found | no_collision_found


@dataclass(frozen=True)
class GaussNewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    objective_history: tuple[float, ...]
    diverged: bool


def _lift_system(A_I: np.ndarray, k: int) -> np.ndarray:
    """Real m x k^2 system matrix for tr(phi phi^* X) = y^2 over Hermitian X.

    Unknown order: k diagonal entries, then (Re, Im) for each off-diagonal
    pair (p, q) with p < q.
    """
    m = A_I.shape[0]
    phi_outer = np.conj(A_I)[:, :, None] * A_I[:, None, :]  # rows of phi phi^*
    G = np.empty((m, k * k))
    for p in range(k):
        G[:, p] = phi_outer[:, p, p].real
    col = k
    for p in range(k):
        for q in range(p + 1, k):
            G[:, col] = 2.0 * phi_outer[:, q, p].real
            G[:, col + 1] = -2.0 * phi_outer[:, q, p].imag
            col += 2
    return G


def _assemble_hermitian(v: np.ndarray, k: int) -> np.ndarray:
    X = np.zeros((k, k), dtype=np.complex128)
    for p in range(k):
        X[p, p] = v[p]
    col = k
    for p in range(k):
        for q in range(p + 1, k):
            X[p, q] = v[col] + 1j * v[col + 1]
            X[q, p] = v[col] - 1j * v[col + 1]
            col += 2
    return X


def _lifted_support_solve(
    A_I: np.ndarray,
    y: np.ndarray,
    support: tuple[int, ...],
    n: int,
    tol: float,
) -> LiftedSolveReport:
    k = len(support)
    G = _lift_system(A_I, k)
    rhs = y**2
    v, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    resid = float(np.linalg.norm(G @ v - rhs))
    ymax = float(y.max(initial=0.0))
    resid_tol = tol * max(1.0, ymax**2) * np.sqrt(len(y))  # lifted system lives on y^2 scale
    tol_abs = tol * max(1.0, ymax)
    X = _assemble_hermitian(v, k)
    eigs, v1 = hermitian_top_eig(X)
    lam1 = float(eigs[0])
    defect = 0.0 if k == 1 or lam1 <= 0 else max(0.0, float(eigs[1])) / lam1
    accepted = (
        resid <= resid_tol
        and lam1 > 0
        and float(eigs[-1]) >= -PSD_TOL * lam1
        and defect <= RANK1_TOL
    )
    x_hat = None
    if accepted:
        x_vals = np.sqrt(lam1) * v1
        if np.min(np.abs(x_vals)) > tol_abs and _meas_err(A_I, x_vals, y) <= tol_abs:
            x_hat = SparseVector(Field.COMPLEX, n, support, x_vals).canonical()
        else:
            accepted = False
    return LiftedSolveReport(
        support=support, X=X, eigenvalues=eigs, rank1_defect=defect, accepted=accepted, x_hat=x_hat
    )


def solve_l0_complex(
    A: MeasurementEnsemble,
    y,
    k_max: int,
    tol: float = 1e-8,
    allow_heuristic: bool = False,
    heuristic_restarts: int = 8,
    seed: int = 0,
) -> SolutionSet:
    """Solve min ||x||_0 subject to |Ax| = y over the complexes.

    Support sizes with k <= 3 and m >= k^2 use the exact lifted path;
    larger sizes use multi-start Gauss-Newton refinement and are only
    scanned when allow_heuristic is set (classes found there are labeled
    "refined" and the solution set is flagged heuristic).
    """
    if A.field is not Field.COMPLEX:
        raise ValueError("solve_l0_complex requires a complex ensemble")
    y = as_measurement(y)
    if y.m != A.m:
        raise ValueError(f"measurement length {y.m} does not match m={A.m}")
    if not (0 <= k_max <= min(A.m, A.n)):
        raise ValueError(f"k_max must be in [0, min(m, n)] = [0, {min(A.m, A.n)}]")

    def exact_level(k: int) -> bool:
        return k <= 3 and A.m >= k * k

    if not allow_heuristic and any(not exact_level(k) for k in range(1, k_max + 1)):
        bad = min(k for k in range(1, k_max + 1) if not exact_level(k))
        raise ValueError(
            f"support size {bad} needs the heuristic path (k > 3 or m < k^2); "
            "pass allow_heuristic=True to enable it"
        )

    yv = y.magnitudes
    tol_abs = tol * max(1.0, float(yv.max(initial=0.0)))
    stats = SearchStats()
    if np.all(yv <= tol_abs):
        return SolutionSet(0, [SparseVector.zero(Field.COMPLEX, A.n)], [float(yv.max(initial=0.0))], stats)

    heuristic_used = False
    for k in range(1, k_max + 1):
        classes: list[SparseVector] = []
        residuals: list[float] = []
        methods: list[str] = []
        defects: list[float | None] = []
        lifted = exact_level(k)
        for support in itertools.combinations(range(A.n), k):
            stats.supports_tried += 1
            A_I = A.entries[:, support]
            if lifted:
                stats.patterns_tried += 1
                report = _lifted_support_solve(A_I, yv, support, A.n, tol)
                if report.accepted and report.x_hat is not None:
                    before = len(classes)
                    _dedup_insert(classes, residuals, report.x_hat, _meas_err(A_I, report.x_hat.values, yv), tol_abs)
                    if len(classes) > before:
                        methods.append("lifted")
                        defects.append(report.rank1_defect)
            else:
                heuristic_used = True
                for cand in _refined_support_solve(
                    A_I, yv, support, A.n, tol_abs, heuristic_restarts, seed, k, stats
                ):
                    before = len(classes)
                    _dedup_insert(classes, residuals, cand, _meas_err(A_I, cand.values, yv), tol_abs)
                    if len(classes) > before:
                        methods.append("refined")
                        defects.append(None)
        if classes:
            return SolutionSet(
                k, classes, residuals, stats, heuristic=heuristic_used, methods=methods, rank1_defects=defects
            )
    return SolutionSet(None, [], [], stats, heuristic=heuristic_used, methods=[], rank1_defects=[])


def _meas_err(A_I: np.ndarray, values: np.ndarray, y: np.ndarray) -> float:
    return float(np.max(np.abs(np.abs(A_I @ values) - y)))


def _refined_support_solve(
    A_I: np.ndarray,
    y: np.ndarray,
    support: tuple[int, ...],
    n: int,
    tol_abs: float,
    restarts: int,
    seed: int,
    k: int,
    stats: SearchStats,
):
    """Multi-start Gauss-Newton candidates on one support (heuristic path)."""
    scale = max(1.0, float(y.max(initial=0.0)))
    out = []
    for r in range(restarts):
        stats.patterns_tried += 1
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k, _support_key(support), r)))
        x0 = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) * scale
        res = refine_gauss_newton(A_I, y, x0)
        if res.diverged:
            continue
        x = res.x
        if np.min(np.abs(x)) > tol_abs and _meas_err(A_I, x, y) <= tol_abs:
            out.append(SparseVector(Field.COMPLEX, n, support, x).canonical())
    return out


def _support_key(support: tuple[int, ...]) -> int:
    key = 0
    for i in support:
        key |= 1 << i
    return key


def refine_gauss_newton(
    A_I: np.ndarray,
    y,
    x_init: np.ndarray,
    iters: int = 200,
    tol: float = 1e-12,
) -> GaussNewtonResult:
    """Damped Gauss-Newton on f_i(x) = |a_i x|^2 - y_i^2 over (Re x, Im x).

    The step length is halved on non-decrease of the objective, so the
    objective is monotonically non-increasing across accepted steps.
    Divergence (objective above 10x the initial value) is reported for
    the caller to discard.
    """
    y = as_measurement(y).magnitudes
    x = np.asarray(x_init, dtype=np.complex128).reshape(-1).copy()
    if np.all(x == 0):
        raise ValueError("x_init must be nonzero")
    m, k = A_I.shape
    y2 = y**2

    def objective(xc):
        r = A_I @ xc
        return float(np.linalg.norm(np.abs(r) ** 2 - y2))

    obj = objective(x)
    history = [obj]
    steps = 0
    for _ in range(iters):
        if obj <= tol:
            break
        r = A_I @ x
        f = np.abs(r) ** 2 - y2
        # d|r_i|^2 / dRe(x_j) = 2 Re(conj(r_i) A_ij); /dIm = -2 Im(conj(r_i) A_ij)
        cr = np.conj(r)[:, None] * A_I
        J = np.concatenate([2.0 * cr.real, -2.0 * cr.imag], axis=1)
        delta, *_ = np.linalg.lstsq(J, -f, rcond=None)
        step = delta[:k] + 1j * delta[k:]
        alpha = 1.0
        improved = False
        while alpha >= 1e-12:
            cand = x + alpha * step
            cand_obj = objective(cand)
            if cand_obj < obj:
                x, obj = cand, cand_obj
                improved = True
                break
            alpha *= 0.5
        if not improved:
            break
        history.append(obj)
        steps += 1
    diverged = obj > history[0] * 10 + 1e-30
    return GaussNewtonResult(
        x=x, residual=obj, iterations=steps, objective_history=tuple(history), diverged=diverged
    )


def column_magnitude_collision_1sparse(A: MeasurementEnsemble, rel_tol: float = 1e-10) -> bool:
    """True iff two distinct columns have elementwise-proportional magnitudes.

    That is exactly the condition for a 1-sparse collision |c| |a_i| =
    |c'| |a_j|, so it decides k = 1 uniqueness for the ensemble.
    """
    mags = np.abs(A.entries)
    for i, j in itertools.combinations(range(A.n), 2):
        u, v = mags[:, i], mags[:, j]
        denom = float(v @ v)
        if denom == 0.0:
            if float(u @ u) == 0.0:
                return True
            continue
        c = float(u @ v) / denom
        if c <= 0:
            continue
        if np.max(np.abs(u - c * v)) <= rel_tol * max(1.0, float(np.max(u))):
            return True
    return False


def _batched_gauss_newton(A_J: np.ndarray, targets: np.ndarray, x0: np.ndarray, iters: int = 120):
    """Levenberg-damped Gauss-Newton over a batch of restarts.

    A_J: (m, k); targets: (R, m) magnitude targets; x0: (R, k) complex
    starts.  Steps are accepted per restart only when the objective
    decreases.  Returns (x, objective) with objective the 2-norm of the
    magnitude mismatch |A v| - t.
    """
    R, k = x0.shape
    x = x0.copy()
    t2 = targets**2

    def sq_obj(xc):
        r = xc @ A_J.T
        return np.linalg.norm(np.abs(r) ** 2 - t2, axis=1)

    obj = sq_obj(x)
    lam = np.full(R, 1e-3)
    for _ in range(iters):
        r = x @ A_J.T  # (R, m)
        f = np.abs(r) ** 2 - t2
        cr = np.conj(r)[:, :, None] * A_J[None, :, :]  # (R, m, k)
        J = np.concatenate([2.0 * cr.real, -2.0 * cr.imag], axis=2)  # (R, m, 2k)
        JtJ = np.einsum("rmi,rmj->rij", J, J)
        Jtf = np.einsum("rmi,rm->ri", J, f)
        A_ = JtJ + lam[:, None, None] * np.eye(2 * k)[None]
        try:
            delta = np.linalg.solve(A_, -Jtf[..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        step = delta[:, :k] + 1j * delta[:, k:]
        cand = x + step
        cand_obj = sq_obj(cand)
        better = cand_obj < obj
        x[better] = cand[better]
        obj[better] = cand_obj[better]
        lam = np.where(better, lam * 0.5, lam * 4.0)
        lam = np.clip(lam, 1e-12, 1e6)
        if np.all(obj <= 1e-24):
            break
    mag_obj = np.linalg.norm(np.abs(x @ A_J.T) - targets, axis=1)
    return x, mag_obj


def collision_probe_complex(
    A: MeasurementEnsemble,
    k: int,
    restarts: int,
    seed: int,
) -> CollisionProbe:
    """Search for a k-sparse collision by optimization over support pairs.

    For each ordered support pair (I, J) a random unit u on I is fixed and
    || |A_I u| - |A_J v| ||_2 is minimized over v, with `restarts` random
    starts (u is resampled per restart).  Finding a non-phase-equivalent
    pair below 1e-8 yields verdict collision_found; otherwise
    no_collision_found.  A negative verdict is evidence, not proof.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    entries = A.entries.astype(np.complex128)
    n = A.n
    best_obj = np.inf
    best_pair = None
    supports = list(itertools.combinations(range(n), k))
    for si, I in enumerate(supports):
        A_I = entries[:, I]
        for sj, J in enumerate(supports):
            A_J = entries[:, J]
            ss = np.random.SeedSequence(seed, spawn_key=(si, sj))
            rng = np.random.default_rng(ss)
            u = rng.standard_normal((restarts, k)) + 1j * rng.standard_normal((restarts, k))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            targets = np.abs(u @ A_I.T)  # (R, m)
            v0 = rng.standard_normal((restarts, k)) + 1j * rng.standard_normal((restarts, k))
            v, obj = _batched_gauss_newton(A_J, targets, v0)
            order = np.argsort(obj, kind="stable")
            for idx in order:
                if obj[idx] >= best_obj and obj[idx] > 1e-8:
                    break
                uu = SparseVector(Field.COMPLEX, n, I, u[idx]).canonical()
                small = np.abs(v[idx]) <= 1e-12
                if small.any():
                    continue
                vv = SparseVector(Field.COMPLEX, n, J, v[idx]).canonical()
                if phase_equivalent(uu, vv, 1e-6):
                    continue
                if obj[idx] < best_obj:
                    best_obj = float(obj[idx])
                    best_pair = (uu, vv)
                if best_obj <= 1e-8:
                    return CollisionProbe(best_pair, best_obj, restarts, "collision_found")
                break
    verdict = "collision_found" if (best_pair is not None and best_obj <= 1e-8) else "no_collision_found"
    return CollisionProbe(best_pair, best_obj if best_pair else np.inf, restarts, verdict)
