"""A single constrained HL(0) run, read through its interval.

Every particle attaches uniformly on the allowed interval [-L_k, R_k] in
mapped-out coordinates, and each attachment pushes both ends outward. The
interval length lambda_k grows like sqrt(t log n) with t = k/n. This script
grows one run and prints how close it is to that law, then reports the
doubling times T_1, T_2, ... of the interval length.

    python demos/01_single_run.py [n] [seed]
"""

import math
import sys
from pathlib import Path

from constrained_hl import run, stopping_times
from constrained_hl.svg import write_svg

n = int(sys.argv[1]) if len(sys.argv) > 1 else 10**5
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

trace = run(n, 4 * n, seed)
for t in (0.25, 0.5, 1, 2, 4):
    k = int(n * t)
    L, R = trace.endpoints_at(k)
    print(f"t = {t:<5} lambda = {L + R:8.4f}   lambda / sqrt(t log n) = "
          f"{(L + R) / math.sqrt(t * math.log(n)):.3f}   R / lambda = {R / (L + R):.3f}")

rep = stopping_times(trace, delta=0.5)
print(f"\nl(n) = {rep.l_n:.4f}; doubling times {rep.T[:8]}")
print(f"window hit rate {rep.hit_rate():.2f}")

# where the right-front push came from, by dyadic distance to the front
led = trace.right
print("\nright front pushes by scale:")
print(f"  min   {led.count_min:8d} {led.delta_min:.4g}")
for j, v in led.delta.items():
    print(f"  j={j:<3} {led.count(j):8d} {v:.4g}")
print(f"  over  {led.count_over:8d} {led.delta_over:.4g}")

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_svg({"R_k": (trace.k, trace.R), "-L_k": (trace.k, -trace.L)}, out / "interval.svg",
          title=f"allowed interval, n = {n}", xlabel="k", ylabel="endpoint")
print(f"\nwrote {out / 'interval.svg'}")
