"""
Gaussian source coding with a rate-limited helper
=================================================

The first-order term of the side-information converse has a closed form
for jointly Gaussian pairs. We compare it to the route through the
scaled conjugate of the rate curve and show how it moves between the
no-help and full-help limits as the helper rate grows.
"""

import numpy as np

from converse_lab.applications import side_info_converse_gaussian
from converse_lab.measures import GaussianPair

n, eps, distortion = 200, 0.1, 0.2
pair = GaussianPair(0.8)

print(f"{'ln M1':>8} {'closed':>10} {'dual':>10} {'total':>10}")
for ln_m1 in (0.0, 5.0, 20.0, 60.0, 200.0, np.inf):
    rep = side_info_converse_gaussian(pair, distortion, ln_m1, n, eps)
    print(f"{ln_m1:>8} {rep.first_order:10.4f} {rep.params['dual_first_order']:10.4f} {rep.total:10.4f}")

###############################################################################
# The two limits are ``(n/2) ln(1/d)`` and ``(n/2) ln((1-rho^2)/d)``.

print(n / 2 * np.log(1 / distortion), n / 2 * np.log((1 - 0.64) / distortion))
