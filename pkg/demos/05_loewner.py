"""Loewner-Kufarev view of the same cluster.

The cluster map solves a Loewner-Kufarev equation driven by atoms at the
attachment points. Replacing the atoms by the uniform measure on the
interval gives a deterministic comparison flow f_t. We first check the
integrator on the one case with a closed form, then compare the random
map with f_t on a grid. No threshold applies to the comparison; it is
reported as data.

    python demos/05_loewner.py [n]
"""

import sys

import numpy as np

from constrained_hl import discrepancy_report, run
from constrained_hl.loewner import halving_ratios, point_mass_error

errs, ratios = halving_ratios()
print("point mass driver, step halving error ratios (16 for fourth order):",
      ", ".join(f"{r:.2f}" for r in ratios))
print(f"max relative error on the 100-point grid at dt = 1e-4: {point_mass_error(dt=1e-4):.1e}")

n = int(sys.argv[1]) if len(sys.argv) > 1 else 10**4
xs = run(n, n, seed=0).attachments
grid = [complex(a, b) for b in (0.5, 1.0, 2.0) for a in np.linspace(-2, 2, 5)]
print(f"\nn = {n}, t = 1:     z           |Phi - f|    |f - z|")
for z, a, b in discrepancy_report(xs, n, 1.0, grid):
    print(f"  {z.real:+.1f}{z.imag:+.1f}i   {a:11.3e}  {b:9.3e}")
