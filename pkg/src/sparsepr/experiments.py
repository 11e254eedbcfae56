"""Threshold experiments: recovery-rate sweeps, collision construction,
and the bidirectional recoverability check.

Reproduces the desk-scale phenomenology: real recovery succeeds at
m = 2k and admits explicit collisions at m = 2k - 1; complex recovery
succeeds at m = 4k - 2.  All randomness derives from a base seed through
numpy SeedSequence spawn keys (documented per function), so identical
configurations reproduce byte-identical success counts independent of
execution order.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distance import certify_unique
from .model import (
    Field,
    MeasurementEnsemble,
    SparseVector,
    generate_ensemble,
    measure,
    phase_equivalent,
)
from .numerics import null_space_vector
from .solver_complex import solve_l0_complex
from .solver_real import feasible_classes, solve_l0_real

__all__ = [
    "SweepConfig",
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "draw_sparse_signal",
    "build_collision_real",
    "BidirectionalReport",
    "bidirectional_uniqueness_check",
    "emit_results",
    "parse_sweep_csv",
]

MIN_SIGNAL_MAGNITUDE = 0.1


@dataclass(frozen=True)
class SweepConfig:
    """One recovery-rate sweep over a range of measurement counts.

    Signals have uniformly random supports and standard (complex) normal
    values, redrawn until every magnitude clears MIN_SIGNAL_MAGNITUDE so
    the nominal sparsity is numerically unambiguous.
    """

    field: Field
    n: int
    k: int
    m_range: tuple[int, int]
    trials_per_m: int
    base_seed: int
    tol: float = 1e-8

    def __post_init__(self):
        lo, hi = self.m_range
        if lo > hi or lo < 1:
            raise ValueError(f"bad m_range {self.m_range}")
        if self.trials_per_m < 1:
            raise ValueError("trials_per_m must be >= 1")
        if self.k < 1 or self.k > self.n:
            raise ValueError("k must be in [1, n]")
        if lo < self.k:
            raise ValueError(f"solver needs k <= m for every m in range; got k={self.k}, m_range={self.m_range}")

    def to_json_dict(self) -> dict:
        return {
            "field": self.field.value,
            "n": self.n,
            "k": self.k,
            "m_range": list(self.m_range),
            "trials_per_m": self.trials_per_m,
            "base_seed": self.base_seed,
            "tol": self.tol,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SweepConfig":
        return cls(
            field=Field.from_label(d["field"]),
            n=int(d["n"]),
            k=int(d["k"]),
            m_range=(int(d["m_range"][0]), int(d["m_range"][1])),
            trials_per_m=int(d["trials_per_m"]),
            base_seed=int(d["base_seed"]),
            tol=float(d.get("tol", 1e-8)),
        )

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class SweepRow:
    m: int
    trials: int
    successes: int
    rate: float
    mean_ms: float
    fragile: int
    heuristic: bool = False


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple[SweepRow, ...]


def draw_sparse_signal(
    fld: Field,
    n: int,
    k: int,
    rng: np.random.Generator,
    min_magnitude: float = MIN_SIGNAL_MAGNITUDE,
) -> SparseVector:
    """Uniform random support; values redrawn until none is near zero."""
    support = tuple(int(i) for i in np.sort(rng.choice(n, size=k, replace=False)))
    while True:
        if fld is Field.REAL:
            values = rng.standard_normal(k)
        else:
            values = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        if k == 0 or np.min(np.abs(values)) >= min_magnitude:
            return SparseVector(fld, n, support, values)


def _trial_randomness(base_seed: int, m: int, trial: int):
    """Ensemble seed and signal generator for one (m, trial) cell.

    Derivation: SeedSequence(base_seed, spawn_key=(m, trial)) spawns two
    children; the first's 64-bit state seeds the ensemble, the second
    drives the signal draw.
    """
    ss = np.random.SeedSequence(base_seed, spawn_key=(m, trial))
    ens_ss, sig_ss = ss.spawn(2)
    ensemble_seed = int(ens_ss.generate_state(1, dtype=np.uint64)[0])
    return ensemble_seed, np.random.default_rng(sig_ss)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Recovery rate per m: success = exactly one class, phase-equal to truth.

    Complex rows whose support sizes fall outside the exact lifted regime
    (k > 3 or m < k^2) run the refinement fallback and are flagged
    heuristic; assertions downstream must exclude them.  A trial counts
    as fragile when an accepted class sits within 10x of the residual
    tolerance.
    """
    rows = []
    lo, hi = cfg.m_range
    for m in range(lo, hi + 1):
        heuristic = cfg.field is Field.COMPLEX and (cfg.k > 3 or m < cfg.k * cfg.k)
        successes = 0
        fragile = 0
        elapsed = 0.0
        for trial in range(cfg.trials_per_m):
            ensemble_seed, sig_rng = _trial_randomness(cfg.base_seed, m, trial)
            A = generate_ensemble(cfg.field, m, cfg.n, ensemble_seed)
            truth = draw_sparse_signal(cfg.field, cfg.n, cfg.k, sig_rng)
            y = measure(A, truth)
            t0 = time.perf_counter()
            if cfg.field is Field.REAL:
                sol = solve_l0_real(A, y, cfg.k, tol=cfg.tol)
            else:
                sol = solve_l0_complex(A, y, cfg.k, tol=cfg.tol, allow_heuristic=heuristic)
            elapsed += time.perf_counter() - t0
            if sol.k_star is not None and len(sol.classes) == 1 and phase_equivalent(
                sol.classes[0], truth, 1e-8
            ):
                successes += 1
            tol_abs = cfg.tol * max(1.0, float(y.magnitudes.max(initial=0.0)))
            if sol.residuals and max(sol.residuals) > tol_abs / 10.0:
                fragile += 1
        rows.append(
            SweepRow(
                m=m,
                trials=cfg.trials_per_m,
                successes=successes,
                rate=successes / cfg.trials_per_m,
                mean_ms=1000.0 * elapsed / cfg.trials_per_m,
                fragile=fragile,
                heuristic=heuristic,
            )
        )
    return SweepResult(config=cfg, rows=tuple(rows))


def build_collision_real(A: MeasurementEnsemble, k: int) -> tuple[SparseVector, SparseVector]:
    """Two k-sparse vectors with disjoint supports and Ax = Az exactly.

    Requires m <= 2k - 1 (so the stacked matrix [A_I, -A_J] has a null
    vector) and 2k <= n (disjoint supports exist).  Support pairs are
    tried in lexicographic order; a null vector with a numerically zero
    coordinate is rejected and the next pair is tried.
    """
    if A.field is not Field.REAL:
        raise ValueError("build_collision_real requires a real ensemble")
    if A.m > 2 * k - 1:
        raise ValueError(f"need m <= 2k - 1 = {2 * k - 1}, got m = {A.m}")
    if 2 * k > A.n:
        raise ValueError(f"need 2k <= n for disjoint supports, got k = {k}, n = {A.n}")
    for I in itertools.combinations(range(A.n), k):
        rest = [j for j in range(A.n) if j not in I]
        for J in itertools.combinations(rest, k):
            M = np.concatenate([A.columns(I), -A.columns(J)], axis=1)
            v = null_space_vector(M)
            if np.min(np.abs(v)) <= 1e-8:
                continue  # a zero coordinate would break genuine k-sparsity
            x = SparseVector(Field.REAL, A.n, I, v[:k]).canonical()
            z = SparseVector(Field.REAL, A.n, tuple(J), v[k:]).canonical()
            return x, z
    raise RuntimeError("no non-degenerate disjoint collision pair found")


@dataclass(frozen=True)
class BidirectionalReport:
    """Outcome of checking both directions of the recoverability bound."""

    certified: bool
    forward_ok: bool | None
    converse_ok: bool | None
    details: dict


def bidirectional_uniqueness_check(
    A: MeasurementEnsemble,
    k: int,
    trials: int = 100,
    base_seed: int = 2024,
) -> BidirectionalReport:
    """Forward: certification implies unique recovery on random trials.
    Converse: a failed certificate is backed by an exhibited ambiguity.

    The converse exhibit is, in order of preference: an explicit
    disjoint-support collision (m <= 2k - 1); a non-equivalent pair split
    from the distance witness's null vector; or, when the witness null
    vector collapses to a phase-equivalent pair (possible on crafted
    matrices), two distinct feasible classes of |Ax| = y with l0 norm at
    most 2k for the witness-derived measurement.
    """
    cert = certify_unique(A, k)
    details: dict = {"d": cert.d, "certified_k": (cert.d - 1) // 2, "spark_ok": cert.spark_ok}

    if cert.certified:
        failures = 0
        for t in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(k, t)))
            truth = draw_sparse_signal(Field.REAL, A.n, k, rng)
            sol = solve_l0_real(A, measure(A, truth), k)
            ok = (
                sol.k_star is not None
                and len(sol.classes) == 1
                and phase_equivalent(sol.classes[0], truth, 1e-8)
            )
            failures += not ok
        details["forward_trials"] = trials
        details["forward_failures"] = failures
        return BidirectionalReport(True, failures == 0, None, details)

    # Converse: exhibit the ambiguity behind the failed certificate.
    if A.m <= 2 * k - 1 and 2 * k <= A.n:
        x, z = build_collision_real(A, k)
        y = measure(A, x)
        mismatch = float(np.max(np.abs(y.magnitudes - measure(A, z).magnitudes)))
        ok = mismatch <= 1e-10 * max(1.0, float(y.magnitudes.max())) and not phase_equivalent(
            x, z, 1e-6
        )
        details.update({"path": "disjoint_collision", "mismatch": mismatch})
        return BidirectionalReport(False, None, ok, details)

    if k > (cert.d - 1) // 2 and cert.witness is not None:
        w = cert.witness
        phases = w.pattern(A.m).phases
        M = np.concatenate([A.columns(w.I), -phases[:, None] * A.columns(w.J)], axis=1)
        v = null_space_vector(M)
        x_part, z_part = v[: len(w.I)], v[len(w.I) :]
        x = SparseVector.from_dense(Field.REAL, _place(A.n, w.I, x_part), tol=1e-12)
        z = SparseVector.from_dense(Field.REAL, _place(A.n, w.J, z_part), tol=1e-12)
        y = measure(A, x)
        if x.sparsity and z.sparsity and not phase_equivalent(x, z, 1e-6):
            mismatch = float(np.max(np.abs(y.magnitudes - measure(A, z).magnitudes)))
            details.update({"path": "witness_collision", "mismatch": mismatch})
            return BidirectionalReport(False, None, mismatch <= 1e-8, details)
        # Phase-collapsed witness: show the feasible set of the witness
        # measurement holds >= 2 classes within sparsity 2k.
        classes = feasible_classes(A, y, min(2 * k, min(A.m, A.n)))
        details.update(
            {"path": "feasible_multiplicity", "classes_found": len(classes)}
        )
        return BidirectionalReport(False, None, len(classes) >= 2, details)

    # Certificate failed on the spark side: exhibit a P = I linear collision.
    sol_cols = cert.limiting_witness
    details["path"] = "spark_collision"
    if not isinstance(sol_cols, tuple) or not sol_cols:
        return BidirectionalReport(False, None, False, details)
    cols = tuple(sol_cols)
    v = null_space_vector(A.columns(cols))
    half = (len(cols) + 1) // 2
    x = SparseVector.from_dense(Field.REAL, _place(A.n, cols[:half], v[:half]), tol=1e-12)
    z = SparseVector.from_dense(Field.REAL, _place(A.n, cols[half:], -v[half:]), tol=1e-12)
    ok = (
        x.sparsity <= k
        and z.sparsity <= k
        and not phase_equivalent(x, z, 1e-6)
        and float(np.max(np.abs(measure(A, x).magnitudes - measure(A, z).magnitudes))) <= 1e-8
    )
    return BidirectionalReport(False, None, ok, details)


def _place(n: int, support, values) -> np.ndarray:
    x = np.zeros(n)
    x[list(support)] = values
    return x


# ---------------------------------------------------------------------------
# Result emission: CSV, JSON, and gnuplot-ready data.
# ---------------------------------------------------------------------------

_CSV_HEADER = "m,trials,successes,rate,mean_ms,fragile"


def _row_fields(row: SweepRow) -> list[str]:
    return [
        str(row.m),
        str(row.trials),
        str(row.successes),
        repr(float(row.rate)),
        repr(float(row.mean_ms)),
        str(row.fragile),
    ]


def emit_results(result: SweepResult, fmt: str, path) -> Path:
    """Write a sweep result as csv, json, or gnuplot data; returns the path.

    Float columns use repr so a parse-back reproduces values exactly;
    emission of a fixed result object is byte-stable.
    """
    path = Path(path)
    if fmt == "csv":
        lines = [_CSV_HEADER] + [",".join(_row_fields(r)) for r in result.rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {
            "config": result.config.to_json_dict(),
            "rows": [
                {
                    "m": r.m,
                    "trials": r.trials,
                    "successes": r.successes,
                    "rate": r.rate,
                    "mean_ms": r.mean_ms,
                    "fragile": r.fragile,
                    "heuristic": r.heuristic,
                }
                for r in result.rows
            ],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "gnuplot":
        header = [
            "# sparsepr sweep",
            "# config: " + json.dumps(result.config.to_json_dict(), sort_keys=True),
            "# columns: m trials successes rate mean_ms fragile",
        ]
        lines = header + [" ".join(_row_fields(r)) for r in result.rows]
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv, json, or gnuplot")
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"failed writing results to {path}: {exc}") from exc
    return path


def parse_sweep_csv(path) -> list[SweepRow]:
    """Parse back a CSV written by emit_results (heuristic flag not stored)."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError(f"{path}:1: missing sweep CSV header")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 6:
            raise ValueError(f"{path}:{i}: expected 6 columns, got {len(parts)}")
        rows.append(
            SweepRow(
                m=int(parts[0]),
                trials=int(parts[1]),
                successes=int(parts[2]),
                rate=float(parts[3]),
                mean_ms=float(parts[4]),
                fragile=int(parts[5]),
            )
        )
    return rows
