"""Phase-generalized minimum distance, spark, and uniqueness certification.

For a real m-by-n ensemble A with m < n, a configuration is a concatenated
matrix M(I, J, P) = [A_I, P A_J] built from two nonempty column supports
with |I| + |J| <= m and an admissible diagonal sign matrix P (not a
multiple of the identity; enumerated modulo a global flip by fixing the
first diagonal entry to +1).

The distance d is one more than the smallest rank among configurations
that witness a genuine ambiguity, capped so that d <= m + 1.

Counting rule.  Write w = |I intersect J| and l for the number of +1
entries of P.  Every configuration carries a structural null space of
dimension max(w - l, 0) + max(w - (m - l), 0): signals supported on the
shared columns whose measurements vanish on one sign class satisfy
Ax = PAx, producing null vectors with x = +-z that break no uniqueness
(and exist for every generic ensemble once the pattern is unbalanced
relative to w).  A configuration therefore counts as a witness exactly
when

    rank([A_I, P A_J]) < |I| + |J| - max(w - l, 0) - max(w - (m - l), 0),

i.e. when its rank falls below the structural value.  Any two solutions
x != +-z with equal sparsity and Ax = PAz force a null vector outside the
structural space, so their configuration always counts: certification
built on this rule is sound.  For disjoint supports the rule reduces to
the plain column-rank-deficiency test.

A k-sparse signal is certifiably unique when k <= floor((d - 1) / 2) AND
every 2k columns of A are independent (the spark condition covers the
phase-free P = I collision, which the admissible-P distance excludes).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import Field, MeasurementEnsemble, PhasePattern
from .numerics import DEFAULT_RANK_TOL, batched_ranks, numerical_rank

__all__ = [
    "Witness",
    "DistanceReport",
    "SparkReport",
    "CertificationReport",
    "phase_gen_min_distance",
    "witness_rank",
    "schur_reduced_block",
    "spark_at_least",
    "certify_unique",
    "sign_patterns",
]

# Cap chunk memory in the batched enumeration (float64 elements).
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class Witness:
    """A distance-minimizing configuration (supports plus sign-pattern bits)."""

    I: tuple[int, ...]
    J: tuple[int, ...]
    pattern_bits: int

    def pattern(self, m: int) -> PhasePattern:
        return PhasePattern.from_bits(m, self.pattern_bits)


@dataclass(frozen=True)
class DistanceReport:
    """Phase-generalized minimum distance with its minimizing witness."""

    m: int
    n: int
    d: int
    min_rank: int
    witness: Witness | None
    overlap_class: str  # disjoint | full | partial
    overlap: int  # |I intersect J|
    certified_k: int
    fragile: bool

    def to_json_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "I": list(self.witness.I),
                "J": list(self.witness.J),
                "P_bits": self.witness.pattern_bits,
            }
        return {
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "min_rank": self.min_rank,
            "certified_k": self.certified_k,
            "overlap_class": self.overlap_class,
            "overlap": self.overlap,
            "witness": w,
            "fragile": self.fragile,
        }


@dataclass(frozen=True)
class SparkReport:
    """Result of checking that every set of s-1 columns is independent."""

    s: int
    deficient_columns: tuple[int, ...] | None

    @property
    def ok(self) -> bool:
        return self.deficient_columns is None


@dataclass(frozen=True)
class CertificationReport:
    """Uniqueness certificate for k-sparse recovery from magnitudes."""

    m: int
    n: int
    k: int
    d: int
    min_rank: int
    certified: bool
    spark_ok: bool
    witness: Witness | None
    fragile: bool
    limiting_witness: object  # Witness, tuple of spark columns, or None

    def to_json_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "I": list(self.witness.I),
                "J": list(self.witness.J),
                "P_bits": self.witness.pattern_bits,
            }
        return {
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "min_rank": self.min_rank,
            "certified": self.certified,
            "spark_ok": self.spark_ok,
            "witness": w,
            "fragile": self.fragile,
        }


def sign_patterns(m: int) -> tuple[np.ndarray, np.ndarray]:
    """All admissible sign patterns modulo global flip, as a (npat, m) array.

    Row b-1 holds the pattern with integer code b (first entry +1, bit i of
    b flips entry i+1); code 0 (the identity) is excluded.  Also returns the
    per-pattern count of +1 entries.
    """
    if m < 2:
        return np.zeros((0, m)), np.zeros(0, dtype=int)
    codes = np.arange(1, 2 ** (m - 1))
    bits = (codes[:, None] >> np.arange(m - 1)[None, :]) & 1
    signs = np.ones((codes.size, m))
    signs[:, 1:] = 1.0 - 2.0 * bits
    return signs, np.sum(signs > 0, axis=1).astype(int)


def _classify_overlap(I: tuple[int, ...], J: tuple[int, ...]) -> tuple[str, int]:
    w = len(set(I) & set(J))
    if w == 0:
        return "disjoint", 0
    if I == J:
        return "full", w
    return "partial", w


def _support_masks(combos: np.ndarray) -> np.ndarray:
    """Encode index tuples as integer bitmasks for fast overlap counting."""
    masks = np.zeros(len(combos), dtype=np.uint64)
    for col in range(combos.shape[1]):
        masks |= np.uint64(1) << combos[:, col].astype(np.uint64)
    return masks


def phase_gen_min_distance(
    A: MeasurementEnsemble,
    max_support: int | None = None,
    tol_rel: float = DEFAULT_RANK_TOL,
) -> DistanceReport:
    """Exhaustive phase-generalized minimum distance of a real ensemble.

    Enumerates ordered support pairs by increasing |I| + |J|, then
    lexicographically, and sign patterns by their integer code; the
    reported witness is the first configuration achieving the minimum.
    When max_support truncates the search below |I| + |J| = m, the report
    is a certified lower bound on the distance (still sound for
    certification, possibly conservative).
    """
    if A.field is not Field.REAL:
        raise ValueError("phase-generalized minimum distance is defined for real ensembles only")
    m, n = A.m, A.n
    if m >= n:
        raise ValueError(f"distance requires m < n, got m={m}, n={n}")
    if max_support is None:
        max_support = m - 1
    if not (1 <= max_support <= m):
        raise ValueError("max_support must be in [1, m]")
    max_support = min(max_support, m - 1, n)
    t_max = min(m, 2 * max_support)

    signs, l_counts = sign_patterns(m)
    npat = signs.shape[0]
    entries = A.entries

    if npat == 0 or t_max < 2:
        # m = 1: no admissible pattern and no valid support pair exists.
        return DistanceReport(m, n, m + 1, m, None, "disjoint", 0, m // 2, False)

    best_key = None  # (score, total, I, J, code)
    cap_key = None  # first full-rank configuration at size t_max
    fragile_any = False

    for total in range(2, t_max + 1):
        for a in range(1, min(total - 1, max_support) + 1):
            b = total - a
            if b < 1 or b > max_support:
                continue
            combos_i = np.array(list(itertools.combinations(range(n), a)), dtype=int)
            combos_j = np.array(list(itertools.combinations(range(n), b)), dtype=int)
            ci, cj = len(combos_i), len(combos_j)
            masks_i = _support_masks(combos_i)
            masks_j = _support_masks(combos_j)
            chunk = max(1, _CHUNK_ELEMENTS // max(1, cj * npat * m * total))
            for lo in range(0, ci, chunk):
                sel = combos_i[lo : lo + chunk]
                # stack shape: (chunk, cj, npat, m, a + b)
                left = entries[:, sel.T].transpose(2, 0, 1)  # (chunk, m, a)
                right = entries[:, combos_j.T].transpose(2, 0, 1)  # (cj, m, b)
                stack = np.empty((sel.shape[0], cj, npat, m, total))
                stack[..., :a] = left[:, None, None, :, :]
                stack[..., a:] = signs[None, None, :, :, None] * right[None, :, None, :, :]
                ranks, fragile = batched_ranks(stack, tol_rel)
                fragile_any = fragile_any or bool(fragile.any())

                # Structural rank: total minus the dimension forced by shared
                # columns meeting an unbalanced sign pattern.
                w = np.bitwise_count(masks_i[lo : lo + chunk, None] & masks_j[None, :]).astype(int)
                trivial = np.maximum(w[:, :, None] - l_counts[None, None, :], 0) + np.maximum(
                    w[:, :, None] - (m - l_counts)[None, None, :], 0
                )
                eligible = ranks < (total - trivial)
                if eligible.any():
                    flat = np.where(eligible.reshape(-1), ranks.reshape(-1), np.iinfo(np.int64).max)
                    pos = int(np.argmin(flat))
                    score = int(flat[pos])
                    ii, jj, pp = np.unravel_index(pos, ranks.shape)
                    key = (
                        score,
                        total,
                        tuple(int(v) for v in sel[ii]),
                        tuple(int(v) for v in combos_j[jj]),
                        int(pp) + 1,
                    )
                    if best_key is None or key < best_key:
                        best_key = key
                if total == t_max:
                    full = (ranks == t_max) & ~eligible
                    if full.any():
                        pos = int(np.argmax(full.reshape(-1)))
                        ii, jj, pp = np.unravel_index(pos, ranks.shape)
                        key = (
                            t_max,
                            total,
                            tuple(int(v) for v in sel[ii]),
                            tuple(int(v) for v in combos_j[jj]),
                            int(pp) + 1,
                        )
                        if cap_key is None or key < cap_key:
                            cap_key = key

    if best_key is None or (cap_key is not None and cap_key < best_key):
        best_key = cap_key
    if best_key is None:
        # Degenerate corner: nothing deficient was counted and no full-rank
        # representative exists at size t_max.  Report the cap without witness.
        return DistanceReport(m, n, t_max + 1, t_max, None, "disjoint", 0, t_max // 2, fragile_any)

    score, total, I, J, code = best_key
    witness = Witness(I=I, J=J, pattern_bits=code)
    overlap_class, overlap = _classify_overlap(I, J)
    d = score + 1
    return DistanceReport(
        m=m,
        n=n,
        d=d,
        min_rank=score,
        witness=witness,
        overlap_class=overlap_class,
        overlap=overlap,
        certified_k=(d - 1) // 2,
        fragile=fragile_any,
    )


def witness_rank(
    A: MeasurementEnsemble,
    I,
    J,
    P: PhasePattern,
    tol_rel: float = DEFAULT_RANK_TOL,
) -> int:
    """Numerical rank of the concatenated configuration [A_I, P A_J]."""
    I = tuple(int(i) for i in I)
    J = tuple(int(j) for j in J)
    for idx in (*I, *J):
        if not (0 <= idx < A.n):
            raise ValueError(f"support index {idx} out of range [0, {A.n})")
    if P.m != A.m:
        raise ValueError("phase pattern length does not match ensemble rows")
    phases = P.phases.astype(A.field.dtype)
    M = np.concatenate([A.columns(I), phases[:, None] * A.columns(J)], axis=1)
    return numerical_rank(M, tol_rel).rank


def schur_reduced_block(
    A: MeasurementEnsemble,
    I,
    J,
    P: PhasePattern,
) -> np.ndarray:
    """Reduced block B of a partial-overlap configuration.

    After splitting the rows by sign and rearranging the columns as
    [shared, I-only, J-only], the shared columns are eliminated from each
    row group with a Schur complement, leaving B (stacked from both
    groups) with the property rank(M) = 2w + rank(B), where w is the
    overlap size.  Requires at least w rows of each sign and invertible
    w-by-w pivot blocks (generic position).
    """
    I, J = tuple(I), tuple(J)
    shared = sorted(set(I) & set(J))
    w = len(shared)
    if w == 0 or I == J:
        raise ValueError("Schur reduction applies to partial-overlap configurations")
    only_i = [i for i in I if i not in shared]
    only_j = [j for j in J if j not in shared]
    plus = P.phases.real > 0
    l = int(plus.sum())
    m = A.m
    if l < w or m - l < w:
        raise ValueError("need at least w rows of each sign for the reduction")

    def reduce_group(rows: np.ndarray, negate_j: bool) -> np.ndarray:
        cols = shared + only_i + only_j
        G = A.entries[np.ix_(rows, cols)].copy()
        if negate_j:
            G[:, w + len(only_i) :] *= -1.0
        pivot = G[:w, :w]
        if np.linalg.matrix_rank(pivot) < w:
            raise ValueError("singular pivot block; reduction undefined")
        top_rest = G[:w, w:]
        bottom_shared = G[w:, :w]
        bottom_rest = G[w:, w:]
        return bottom_rest - bottom_shared @ np.linalg.solve(pivot, top_rest)

    rows_plus = np.where(plus)[0]
    rows_minus = np.where(~plus)[0]
    C_prime = reduce_group(rows_plus, negate_j=False)
    D_prime = reduce_group(rows_minus, negate_j=True)
    return np.vstack([C_prime, D_prime])


def spark_at_least(A: MeasurementEnsemble, s: int, tol_rel: float = DEFAULT_RANK_TOL) -> SparkReport:
    """Brute-force check that every subset of fewer than s columns is independent.

    On failure the first (smallest, then lexicographic) dependent subset is
    reported.
    """
    if s < 1 or s > min(A.m, A.n) + 1:
        raise ValueError(f"s must be in [1, min(m, n) + 1], got {s}")
    entries = A.entries
    for size in range(1, s):
        combos = np.array(list(itertools.combinations(range(A.n), size)), dtype=int)
        stack = entries[:, combos.T].transpose(2, 0, 1)  # (ncombos, m, size)
        ranks, _ = batched_ranks(stack, tol_rel)
        bad = ranks < size
        if bad.any():
            first = int(np.argmax(bad))
            return SparkReport(s=s, deficient_columns=tuple(int(c) for c in combos[first]))
    return SparkReport(s=s, deficient_columns=None)


def certify_unique(A: MeasurementEnsemble, k: int, max_support: int | None = None) -> CertificationReport:
    """Certify unique k-sparse recovery from phaseless measurements.

    Certified when k <= floor((d - 1) / 2) and additionally every 2k
    columns of A are independent (spark condition, covering the P = I
    collision the distance definition excludes).  When not certified the
    binding witness is returned: the distance witness if the d-bound
    fails, else the deficient spark columns.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    report = phase_gen_min_distance(A, max_support=max_support)
    k_bound_ok = k <= report.certified_k
    if 2 * k <= min(A.m, A.n):
        spark_report = spark_at_least(A, 2 * k + 1)
        spark_ok = spark_report.ok
    else:
        # Fewer than 2k rows or columns: 2k independent columns are impossible.
        spark_report = SparkReport(s=2 * k + 1, deficient_columns=None)
        spark_ok = False
    certified = k_bound_ok and spark_ok
    limiting: object = None
    if not k_bound_ok:
        limiting = report.witness
    elif not spark_ok:
        limiting = spark_report.deficient_columns
    return CertificationReport(
        m=A.m,
        n=A.n,
        k=k,
        d=report.d,
        min_rank=report.min_rank,
        certified=certified,
        spark_ok=spark_ok,
        witness=report.witness,
        fragile=report.fragile,
        limiting_witness=limiting,
    )
