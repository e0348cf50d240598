"""Cluster geometry read off the conformal maps.

The cluster itself is never traced; instead the horizontal line
``Im z = eps`` is pushed through ``Phi_k`` (the *envelope*), which hugs the
cluster boundary as ``eps -> 0``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .conformal import compose_forward
from .growth import replay


@dataclass
class EnvelopePolyline:
    s: np.ndarray        # real preimage coordinates, increasing
    points: np.ndarray   # complex images Phi_k(s + i eps)
    eps: float
    k: int
    n: int

    @property
    def t(self):
        """Half-plane capacity of the cluster, ``k / (2n)``."""
        return self.k / (2.0 * self.n)


@dataclass
class GeometrySummary:
    diameter: float
    max_height: float
    hcap_estimate: float
    t: float


def envelope(attachments, n, eps=1e-5, m=2000, L=None, R=None):
    """Images of ``m`` equally spaced points ``s + i eps``, ``s`` in ``[-L_K, R_K]``.

    The endpoints are replayed from ``attachments`` unless given. An empty
    attachment list is the identity map over ``[-1, 1]``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if m < 2:
        raise ValueError("need at least two grid points")
    xs = np.asarray(attachments, dtype=np.float64)
    k = xs.size
    if L is None or R is None:
        if k == 0:
            L = R = 1.0
        else:
            Ls, Rs = replay(xs, n)
            L, R = float(Ls[-1]), float(Rs[-1])
    s = np.linspace(-L, R, m)
    pts = compose_forward(s + 1j * eps, xs, n)
    return EnvelopePolyline(s=s, points=np.asarray(pts), eps=eps, k=k, n=n)


def convex_hull(points):
    """Vertices of the convex hull in counter-clockwise order (monotone chain)."""
    pts = sorted(set((float(p.real), float(p.imag)) for p in np.asarray(points).ravel()))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _calipers_diameter(hull):
    h = len(hull)
    if h == 1:
        return 0.0
    if h == 2:
        return math.dist(hull[0], hull[1])

    def area2(a, b, c):
        return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    best = 0.0
    j = 1
    for i in range(h):
        a, b = hull[i], hull[(i + 1) % h]
        # advance the antipodal vertex while it moves away from edge (a, b)
        while area2(a, b, hull[(j + 1) % h]) > area2(a, b, hull[j]):
            j = (j + 1) % h
        best = max(best, math.dist(a, hull[j]), math.dist(b, hull[j]))
    return best


def diameter(env):
    """Largest pairwise distance among envelope points (hull + rotating calipers)."""
    pts = env.points if isinstance(env, EnvelopePolyline) else np.asarray(env)
    if pts.size < 2:
        raise ValueError("diameter needs at least two points")
    return _calipers_diameter(convex_hull(pts))


def max_height(env):
    pts = env.points if isinstance(env, EnvelopePolyline) else np.asarray(env)
    if pts.size == 0:
        raise ValueError("empty envelope")
    return float(np.max(pts.imag))


def height_bound(k, n):
    """Deterministic height bound ``sqrt(2 hcap) = sqrt(k/n)``."""
    return math.sqrt(k / n)


def _hcap_at(xs, n, y):
    dr, di = K.inverse_displacement(0.0, y, xs, 1.0 / n, math.sqrt(1.0 / n))
    # i y (Gamma(iy) - iy)
    return -y * di


def hcap_estimate(attachments, n, y=None):
    """Half-plane capacity of the cluster from ``Gamma`` far up the imaginary axis.

    ``iy (Gamma(iy) - iy) = hcap + O(y^-2)``; evaluated at ``y`` and ``2y``
    and Richardson-extrapolated. ``y`` defaults to ``100 max(1, lambda_K)``.
    """
    xs = np.ascontiguousarray(attachments, dtype=np.float64)
    if xs.size == 0:
        return 0.0
    Ls, Rs = replay(xs, n)
    lam = float(Ls[-1] + Rs[-1])
    y_min = 100.0 * max(1.0, lam)
    if y is None:
        y = y_min
    elif y < y_min:
        raise ValueError(f"y = {y} is below 100 max(1, lambda) = {y_min}")
    h1 = _hcap_at(xs, n, y)
    h2 = _hcap_at(xs, n, 2.0 * y)
    return (4.0 * h2 - h1) / 3.0


def summarize(attachments, n, eps=1e-5, m=2000):
    env = envelope(attachments, n, eps, m)
    return GeometrySummary(diameter=diameter(env), max_height=max_height(env),
                           hcap_estimate=hcap_estimate(attachments, n), t=env.t)
