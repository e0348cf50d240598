"""What the cluster looks like.

The cluster itself is a union of slits that is hard to draw, so we push the
line Im z = eps forward through the cluster map and plot its image, the
envelope. The height of any envelope stays below sqrt(2t) + eps because
capacity grows linearly, while its diameter follows the interval length.

    python demos/02_cluster_shape.py [n]
"""

import math
import sys
from pathlib import Path

from constrained_hl import envelope, height_bound, run
from constrained_hl.svg import write_svg
from constrained_hl.geometry import diameter, hcap_estimate, max_height

n = int(sys.argv[1]) if len(sys.argv) > 1 else 10**4
out = Path("demo_out")
out.mkdir(exist_ok=True)

xs = run(n, n, seed=1).attachments
series = []
for k in (n // 16, n // 4, n):
    env = envelope(xs[:k], n, eps=1e-5, m=2000)
    t = k / n
    ratio = diameter(env) / math.sqrt(t * math.log(n))
    print(f"t = {t:<7} diameter / sqrt(t log n) = {ratio:.3f}"
          f"   height {max_height(env):.4f} <= {height_bound(k, n):.4f}"
          f"   hcap {hcap_estimate(xs[:k], n):.5f} (k/2n = {k / (2 * n):.5f})")
    series.append((f"t = {t:g}", env.points))

write_svg(series, out / "envelopes.svg", title=f"envelopes, n = {n}", xlabel="Re",
          ylabel="Im", equal_aspect=True)
print(f"wrote {out / 'envelopes.svg'}")
