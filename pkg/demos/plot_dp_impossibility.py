"""
Why the second-order term cannot shrink for vanishing error
===========================================================

If the type-I error is forced to vanish like ``n^{-delta}``, the exact
optimum ``min ln Q^n[A]`` stays above ``-n D`` by an amount of order
``sqrt(n ln n)``. The normalized gap below stays positive and climbs
toward the Gaussian heuristic instead of decaying.
"""

import numpy as np

from converse_lab.oracles import dp_impossibility_experiment

p = np.array([0.6, 0.4])
q = np.array([0.3, 0.7])

for delta in (0.5, 1.0, 2.0):
    rows = dp_impossibility_experiment(p, q, delta, [100, 1000, 10_000, 100_000])
    gaps = "  ".join(f"{r.normalized_gap:.4f}" for r in rows)
    print(f"delta = {delta}: {gaps}")

###############################################################################
# For reference, the Gaussian heuristic gives ``sqrt(2 delta V)`` with
# ``V`` the variance of the log-likelihood ratio under ``P``.

llr = np.log(p / q)
d = np.sum(p * llr)
v = np.sum(p * (llr - d) ** 2)
print("sqrt(2 delta V):", [round(float(np.sqrt(2 * dl * v)), 4) for dl in (0.5, 1.0, 2.0)])
