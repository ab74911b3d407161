"""
Converse bounds against the exact Neyman-Pearson exponent
=========================================================

For a pair of Bernoulli laws we compute the exact optimal type-II
exponent ``-ln beta_eps`` with a randomized test and compare it to the
weak, blowup and smoothing converses. Every bound must sit above the
exact value, and the achievability curve must sit below it.
"""

import numpy as np

from converse_lab.bounds import bht_achievability, bht_converse_suite
from converse_lab.oracles import Type1AtMost, np_frontier

p = np.array([0.6, 0.4])
q = np.array([0.3, 0.7])
eps = 0.1

###############################################################################
# Sweep the blocklength and print each curve normalized by ``n``.

print(f"{'n':>6} {'exact':>9} {'achiev':>9} {'weak':>9} {'blowup':>9} {'smooth':>9}")
for n in (10, 30, 100, 300, 1000, 3000):
    exact = -np_frontier(p, q, n, Type1AtMost(eps)).log_type2
    ach = -bht_achievability(p, q, n, eps).log_type2
    suite = bht_converse_suite(p, q, n, eps)
    cols = [exact, ach, suite["weak"].total, suite["blowup"].total, suite["smoothing"].total]
    print(f"{n:>6} " + " ".join(f"{c / n:9.5f}" for c in cols))

###############################################################################
# The smoothing bound splits into a linear term, a ``sqrt(n)`` term and a
# constant; the gap to the exact exponent grows like ``sqrt(n)`` at most.

n = 1000
rep = bht_converse_suite(p, q, n, eps)["smoothing"]
exact = -np_frontier(p, q, n, Type1AtMost(eps)).log_type2
print(f"\nn = {n}: first {rep.first_order:.3f}  second {rep.second_order:.3f}  const {rep.constant:.3f}")
print(f"gap to exact / sqrt(n) = {(rep.total - exact) / np.sqrt(n):.4f}")
