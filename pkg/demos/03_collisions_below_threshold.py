#!/usr/bin/env python3
"""Exhibit the necessity side: below m = 2k, uniqueness genuinely fails.

A null vector of [A_I, -A_J] over disjoint supports splits into two
k-sparse signals with literally identical measurements.  The
bidirectional check packages this: certified instances must recover
uniquely on random trials, failed certificates must be backed by an
exhibited ambiguity.  A complex optimization probe searches for
collisions at the 4k - 2 threshold (and is expected to find none).
"""

import numpy as np

from sparsepr import (
    Field,
    MeasurementEnsemble,
    build_collision_real,
    collision_probe_complex,
    generate_ensemble,
    bidirectional_uniqueness_check,
    measure,
    solve_l0_real,
)

print("Explicit collision at m = 2k - 1 (k = 2, m = 3, n = 8):")
A = generate_ensemble(Field.REAL, 3, 8, seed=42)
x, z = build_collision_real(A, k=2)
yx, yz = measure(A, x).magnitudes, measure(A, z).magnitudes
print(f"  x on {x.support}: {np.round(x.values, 4)}")
print(f"  z on {z.support}: {np.round(z.values, 4)}")
print(f"  max | |Ax| - |Az| | = {np.max(np.abs(yx - yz)):.2e}")
sol = solve_l0_real(A, yx, k_max=2)
print(f"  the solver sees the ambiguity: {len(sol.classes)} classes at k = {sol.k_star}")

print()
print("Bidirectional check on the 4x8 ensemble:")
A48 = generate_ensemble(Field.REAL, 4, 8, seed=42)
fwd = bidirectional_uniqueness_check(A48, 2)
print(f"  k=2 certified: forward 100/100 unique -> forward_ok={fwd.forward_ok}")
conv = bidirectional_uniqueness_check(A48, 3)
print(f"  k=3 not certified: converse path '{conv.details['path']}' -> "
      f"converse_ok={conv.converse_ok}")

print()
print("Crafted matrix: the witness pair collapses to a global sign, but the")
print("witness measurement still feeds two distinct solution classes:")
C = MeasurementEnsemble.from_entries(Field.REAL, [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
rc = bidirectional_uniqueness_check(C, 1)
print(f"  path '{rc.details['path']}', classes found: {rc.details['classes_found']}, "
      f"converse_ok={rc.converse_ok}")

print()
print("Complex collision probe at m = 4k - 2 (falsification attempt):")
Ac = generate_ensemble(Field.COMPLEX, 6, 6, seed=0)
probe = collision_probe_complex(Ac, k=2, restarts=100, seed=0)
print(f"  verdict: {probe.verdict}, best objective {probe.objective:.4f}")
print("  (a negative verdict is evidence consistent with the threshold, not a proof)")

print()
print("And a probe that must find one (real 1x2 embedding, k = 1):")
A12 = MeasurementEnsemble.from_entries(Field.REAL, [[1.0, 2.0]])
p12 = collision_probe_complex(A12, k=1, restarts=5, seed=0)
u, v = p12.pair
print(f"  verdict: {p12.verdict}: u on {u.support}, v on {v.support}, "
      f"objective {p12.objective:.2e}")
