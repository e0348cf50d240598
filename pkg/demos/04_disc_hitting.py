"""The disc picture: how soon does the cluster reach the far side?

Conjugating by a Mobius map turns the half-plane model into growth on the
exterior of the unit disc, seeded at angle 0. tau_alpha is the first
particle that lands on the arc of half-width pi*alpha around the antipode.
Although the capacity after k particles is only k/(2n), tau_alpha is o(n):
the arms wrap around the disc long before the cluster is large. The
heuristic prediction is 4 pi^2 n (1 - alpha)^2 / log n.

    python demos/04_disc_hitting.py [n]
"""

import sys

import numpy as np

from constrained_hl import disc_run, tau_alpha_prediction

n = int(sys.argv[1]) if len(sys.argv) > 1 else 10**4
for alpha in (0.3, 0.5, 0.7, 0.9):
    taus = [disc_run(n, 0, alpha, replica=r).tau for r in range(8)]
    reached = [t for t in taus if t is not None]
    med = np.median(reached) if reached else float("nan")
    print(f"alpha = {alpha}: median tau = {med:9.0f}   tau/n = {med / n:.3f}"
          f"   prediction {tau_alpha_prediction(n, alpha):9.0f}"
          f"   not reached {len(taus) - len(reached)}")
