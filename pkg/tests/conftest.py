import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sparsepr import (
    Field,
    draw_sparse_signal,
    generate_ensemble,
    measure,
    phase_equivalent,
    phase_gen_min_distance,
    solve_l0_real,
)

GENERIC_SEEDS = range(20)
SIGNALS_PER_SEED = 20


@pytest.fixture(scope="session")
def generic_distance_sweep():
    """Distance reports for Gaussian ensembles at m = 2k, n = 8, 20 seeds.

    Shared between the distance-value acceptance criterion and the
    invariant suite; the m = 6 enumerations dominate the suite's runtime.
    """
    reports = {}
    for k in (1, 2, 3):
        for seed in GENERIC_SEEDS:
            A = generate_ensemble(Field.REAL, 2 * k, 8, seed)
            reports[(k, seed)] = (A, phase_gen_min_distance(A))
    return reports


@pytest.fixture(scope="session")
def real_recovery_sweep():
    """Recovery trials at m = 2k, n = 8: 20 seeds x 20 signals per k.

    Shared between the sufficiency criterion and the forward-direction
    gating check.  Returns per-k success counts and wall time.
    """
    out = {}
    for k in (1, 2, 3):
        t0 = time.perf_counter()
        successes = 0
        trials = 0
        for seed in GENERIC_SEEDS:
            A = generate_ensemble(Field.REAL, 2 * k, 8, seed)
            for trial in range(SIGNALS_PER_SEED):
                rng = np.random.default_rng(np.random.SeedSequence(777, spawn_key=(k, seed, trial)))
                truth = draw_sparse_signal(Field.REAL, 8, k, rng)
                sol = solve_l0_real(A, measure(A, truth), k)
                trials += 1
                successes += (
                    sol.k_star == k
                    and len(sol.classes) == 1
                    and phase_equivalent(sol.classes[0], truth, 1e-8)
                )
        out[k] = {
            "successes": successes,
            "trials": trials,
            "seconds": time.perf_counter() - t0,
        }
    return out
