"""The scaling law across n, and the ODE behind it.

For t of order one the interval length satisfies
lambda_{nt} ~ sqrt(t log n), and the right end carries half of it.
Convergence is slow in n: the medians sit above 1 and drift down
only a little per decade. We also fit lambda^2 = c t log n over t in [0.1, 1]; the
heuristic ODE d alpha/dt = 1/(8 alpha) predicts c = 1.

    python demos/03_scaling.py [replicas]
"""

import math
import sys

import numpy as np

from constrained_hl import endpoints_at_steps
from constrained_hl.growth import fit_ode_constant

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 16
ts = np.linspace(0.1, 1.0, 10)
for n in (10**4, 10**5, 10**6, 10**7):
    ks = sorted({int(math.floor(n * t)) for t in ts})
    lam, half, c = [], [], []
    for r in range(reps):
        k, L, R = endpoints_at_steps(n, 0, ks, replica=r)
        lam.append((L[-1] + R[-1]) / math.sqrt(math.log(n)))
        half.append(R[-1] / (L[-1] + R[-1]))
        c.append(fit_ode_constant(k / n, L + R, n))
    print(f"n = 1e{int(math.log10(n))}: median lambda ratio {np.median(lam):.3f}"
          f"  (q10 {np.quantile(lam, 0.1):.3f}, q90 {np.quantile(lam, 0.9):.3f})"
          f"  R/lambda {np.median(half):.3f}  fitted c {np.median(c):.3f}")
