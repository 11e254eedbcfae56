import itertools

import numpy as np
import pytest

from sparsepr import (
    Field,
    MeasurementEnsemble,
    PhasePattern,
    certify_unique,
    generate_ensemble,
    phase_gen_min_distance,
    schur_reduced_block,
    spark_at_least,
    witness_rank,
)
from oracles import svd_rank

CRAFTED = MeasurementEnsemble.from_entries(Field.REAL, [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])


def test_crafted_distance():
    rep = phase_gen_min_distance(CRAFTED)
    assert rep.d == 2 and rep.min_rank == 1
    assert rep.witness.I == (0,) and rep.witness.J == (0,) and rep.witness.pattern_bits == 1
    assert rep.overlap_class == "full" and rep.certified_k == 0
    assert rep.d <= CRAFTED.m + 1


def test_gaussian_4x8_distance():
    A = generate_ensemble(Field.REAL, 4, 8, 42)
    rep = phase_gen_min_distance(A)
    assert rep.d == 5 == A.m + 1
    assert witness_rank(A, rep.witness.I, rep.witness.J, rep.witness.pattern(A.m)) == rep.min_rank


def test_distance_rejects_wide_and_complex():
    with pytest.raises(ValueError):
        phase_gen_min_distance(generate_ensemble(Field.REAL, 5, 5, 0))
    with pytest.raises(ValueError):
        phase_gen_min_distance(generate_ensemble(Field.COMPLEX, 2, 4, 0))


def test_distance_bound_on_degenerates():
    # d <= m + 1 must hold on crafted degenerate inputs too
    cases = [
        CRAFTED,
        MeasurementEnsemble.from_entries(Field.REAL, [[1.0, 1.0, 2.0], [2.0, 2.0, 1.0]]),
        MeasurementEnsemble.from_entries(Field.REAL, np.zeros((2, 4)) + [[1, 1, 1, 1], [1, 1, 1, 1]]),
        MeasurementEnsemble.from_entries(
            Field.REAL, [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 0.0, 1.0], [0.0, 0.0, 1.0, 1.0]]
        ),
    ]
    for A in cases:
        rep = phase_gen_min_distance(A)
        assert 1 <= rep.d <= A.m + 1
        if rep.witness is not None:
            assert len(rep.witness.I) + len(rep.witness.J) <= A.m
            got = witness_rank(A, rep.witness.I, rep.witness.J, rep.witness.pattern(A.m))
            assert got == rep.min_rank


def test_duplicated_column_distance():
    # a duplicated column forces a size-3 witness mixing both copies
    A = MeasurementEnsemble.from_entries(
        Field.REAL, [[1.0, 1.0, 0.3, -0.7], [2.0, 2.0, 1.1, 0.4], [-0.5, -0.5, 0.9, 1.3]]
    )
    rep = phase_gen_min_distance(A)
    assert rep.d <= 3


def test_spark_examples():
    A = generate_ensemble(Field.REAL, 4, 8, 42)
    assert spark_at_least(A, 5).ok
    dup = MeasurementEnsemble.from_entries(
        Field.REAL, [[1.0, 1.0, 0.2], [0.5, 0.5, 1.0], [2.0, 2.0, 0.1]]
    )
    rep = spark_at_least(dup, 3)
    assert not rep.ok and rep.deficient_columns == (0, 1)
    assert spark_at_least(CRAFTED, 3).ok


def test_spark_validates_s():
    A = generate_ensemble(Field.REAL, 3, 5, 0)
    with pytest.raises(ValueError):
        spark_at_least(A, 5)


def test_certify_examples():
    A = generate_ensemble(Field.REAL, 4, 8, 42)
    rep2 = certify_unique(A, 2)
    assert rep2.certified and rep2.d == 5 and rep2.spark_ok
    rep3 = certify_unique(A, 3)
    assert not rep3.certified
    A3 = generate_ensemble(Field.REAL, 3, 8, 42)
    assert not certify_unique(A3, 2).certified
    repc = certify_unique(CRAFTED, 1)
    assert not repc.certified and repc.d == 2
    assert repc.limiting_witness is not None


def test_certify_json_shape():
    rep = certify_unique(generate_ensemble(Field.REAL, 4, 8, 42), 2)
    d = rep.to_json_dict()
    assert set(d) == {"m", "n", "k", "d", "min_rank", "certified", "spark_ok", "witness", "fragile"}
    assert set(d["witness"]) == {"I", "J", "P_bits"}


def test_witness_rank_cases():
    A = generate_ensemble(Field.REAL, 4, 8, 42)
    # disjoint supports of size 2 keep full rank for every admissible pattern
    for bits in range(1, 8):
        P = PhasePattern.from_bits(4, bits)
        assert witness_rank(A, (0, 1), (2, 3), P) == 4
    # identity-like pattern duplicates the columns
    P_id = PhasePattern.identity(Field.REAL, 4)
    assert witness_rank(A, (0, 1), (0, 1), P_id) == 2
    P = PhasePattern.from_bits(2, 1)
    assert witness_rank(CRAFTED, (0,), (0,), P) == 1
    with pytest.raises(ValueError):
        witness_rank(A, (0, 9), (1,), P_id)


def test_schur_reduction_matches_rank():
    # rank(M) = 2w + rank(B) wherever the reduction is defined (m <= 6)
    checked = 0
    for m, seed in ((4, 0), (5, 1), (6, 2)):
        A = generate_ensemble(Field.REAL, m, 7, seed)
        k = 2
        supports = list(itertools.combinations(range(7), k))
        for I in supports[:8]:
            for J in supports[:8]:
                w = len(set(I) & set(J))
                if w == 0 or I == J:
                    continue
                for bits in range(1, 2 ** (m - 1)):
                    P = PhasePattern.from_bits(m, bits)
                    l = int(np.sum(P.phases > 0))
                    if l < w or m - l < w:
                        continue
                    phases = P.phases
                    M = np.concatenate(
                        [A.entries[:, list(I)], phases[:, None] * A.entries[:, list(J)]], axis=1
                    )
                    B = schur_reduced_block(A, I, J, P)
                    assert svd_rank(M) == 2 * w + svd_rank(B)
                    checked += 1
    assert checked > 200


def test_schur_rejects_non_partial():
    A = generate_ensemble(Field.REAL, 4, 6, 3)
    P = PhasePattern.from_bits(4, 1)
    with pytest.raises(ValueError):
        schur_reduced_block(A, (0, 1), (2, 3), P)
    with pytest.raises(ValueError):
        schur_reduced_block(A, (0, 1), (0, 1), P)


def test_max_support_truncation_is_conservative():
    A = generate_ensemble(Field.REAL, 6, 8, 4)
    full = phase_gen_min_distance(A)
    trunc = phase_gen_min_distance(A, max_support=2)
    assert trunc.d <= full.d
    assert trunc.certified_k <= full.certified_k
