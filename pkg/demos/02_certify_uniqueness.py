#!/usr/bin/env python3
"""Certify unique sparse recovery by exhaustive rank enumeration.

The certificate has two ingredients: the phase-generalized minimum
distance d (every sign-pattern configuration [A_I, P A_J] small enough
must carry full structural rank) and a spark condition covering plain
linear collisions.  k-sparse recovery is certified when
k <= floor((d - 1) / 2) and every 2k columns are independent.
"""

import json

from sparsepr import (
    Field,
    MeasurementEnsemble,
    certify_unique,
    generate_ensemble,
    phase_gen_min_distance,
    spark_at_least,
    witness_rank,
)

A = generate_ensemble(Field.REAL, 4, 8, seed=42)
rep = phase_gen_min_distance(A)
print(f"Gaussian 4x8 (seed 42): d = {rep.d} = m + 1, certified sparsity {rep.certified_k}")
print(f"witness: I={rep.witness.I} J={rep.witness.J} bits={rep.witness.pattern_bits} "
      f"({rep.overlap_class} overlap), rank {rep.min_rank}")
print(f"fragile rank decisions: {rep.fragile}")

for k in (1, 2, 3):
    cert = certify_unique(A, k)
    print(f"  certify k={k}: certified={cert.certified} "
          f"(bound {(cert.d - 1) // 2}, spark_ok={cert.spark_ok})")

print()
print("A crafted counterexample: zero entries create a deficient witness")
C = MeasurementEnsemble.from_entries(Field.REAL, [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
repc = phase_gen_min_distance(C)
w = repc.witness
print(f"matrix {C.entries.tolist()}")
print(f"d = {repc.d}: column 0 is invariant under flipping row 1, so")
print(f"[a_0, P a_0] with P = diag(1,-1) has rank "
      f"{witness_rank(C, w.I, w.J, w.pattern(C.m))} instead of 2")
cert = certify_unique(C, 1)
print(f"certify k=1: {cert.certified} (the certificate refuses this matrix)")
print(f"spark is fine ({spark_at_least(C, 3).ok}); the phaseless structure is the problem")

print()
print("Certification report as shipped JSON:")
print(json.dumps(certify_unique(A, 2).to_json_dict(), indent=2, sort_keys=True))

print()
print("The certificate is monotone in the evidence: over 10 seeds at m = 2k,")
print("the distance is always m + 1, matching the generic-ensemble analysis.")
ds = [phase_gen_min_distance(generate_ensemble(Field.REAL, 6, 8, s)).d for s in range(10)]
print(f"m=6, n=8 distances: {ds}")
assert all(d == 7 for d in ds)
