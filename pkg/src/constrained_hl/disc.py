"""Constrained growth outside the unit disc, by conjugation with a Moebius map.

``m(z) = i (z - 1)/(z + 1)`` sends the exterior of the unit disc onto the
upper half-plane, the unit circle onto the real line (``e^{i theta} ->
-tan(theta/2)``), ``1 -> 0`` and ``infinity -> i``. The dynamics are run
entirely in the half-plane picture with particles of half-plane capacity
``1/(2n)``; angles are read by pulling physical points back with
``m^{-1}``.

A particle is in the target arc when the argument of its physical position
lies in ``[pi(1 - alpha), pi(1 + alpha)]``. Evaluating the physical position
``Phi_k(x)`` costs ``O(k)``, so only candidates with mapped-out coordinate
``|x| >= screen * tan(pi(1 - alpha)/2)`` are evaluated; the screen factor
defaults to 0.9 and ``screen=0`` evaluates every particle.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .growth import replica_rng

INF = complex(math.inf, 0.0)
GAP_MIN = 1e-3
DEFAULT_SCREEN = 0.9


def mobius_to_halfplane(z):
    """``m(z) = i (z - 1)/(z + 1)``; ``m(inf) = i`` and ``m(-1) = inf``."""
    z = complex(z)
    if cmath.isinf(z):
        return 1j
    if z == -1:
        return INF
    return 1j * (z - 1) / (z + 1)


def halfplane_to_disc(w):
    """Inverse of :func:`mobius_to_halfplane`: ``(i + w)/(i - w)``."""
    w = complex(w)
    if cmath.isinf(w):
        return complex(-1.0, 0.0)
    if w == 1j:
        return INF
    return (1j + w) / (1j - w)


def boundary_angle(x):
    """Angle on the unit circle of the real half-plane coordinate ``x``."""
    return -2.0 * math.atan(x)


def tau_alpha_prediction(n, alpha):
    """``4 pi^2 n (1 - alpha)^2 / log n``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return 4.0 * math.pi ** 2 * n * (1.0 - alpha) ** 2 / math.log(n)


@dataclass
class DiscResult:
    """Outcome of :func:`disc_run`.

    ``tau`` is ``None`` when the target was not reached. ``theta``,
    ``arc_lo`` and ``arc_hi`` are per-particle mapped-out angles: the
    attachment and the two ends of the allowed arc before it attached.
    """

    n: int
    alpha: float
    seed: int
    tau: int
    hit_angle: float
    aborted: bool
    attachments: np.ndarray
    theta: np.ndarray
    arc_lo: np.ndarray
    arc_hi: np.ndarray

    @property
    def reached(self):
        return self.tau is not None


def disc_run(n, seed, alpha, max_steps=None, replica=0, screen=DEFAULT_SCREEN,
             chunk=1 << 16, lanes=8):
    """First particle whose physical position lies in the target arc.

    ``max_steps`` defaults to ``4 n``. Runs stop early (``aborted``) when
    the angular gap between the two arms, measured on the allowed arc,
    drops below ``GAP_MIN``. Particles are grown a chunk at a time and the
    screened candidates of each chunk are then checked in order.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if screen < 0:
        raise ValueError("screen must be nonnegative")
    if max_steps is None:
        max_steps = 4 * n
    rng = replica_rng(seed, replica)
    h = math.sqrt(1.0 / n)
    xs = np.zeros(max_steps)
    Ls = np.zeros(max_steps)
    Rs = np.zeros(max_steps)
    Ls[0] = Rs[0] = L = R = h
    c_edge = math.tan(0.5 * math.pi * (1.0 - alpha))
    cos_lim = math.cos(math.pi * (1.0 - alpha))
    k = 1
    tau = None
    angle = math.nan
    aborted = False
    while k < max_steps and tau is None and not aborted:
        us = rng.random(min(chunk, max_steps - k))
        status, done, L, R = K.disc_advance(us, float(n), L, R, xs, Ls, Rs, k, GAP_MIN)
        # particle numbers k+1 .. k+done
        block = np.abs(xs[k:k + done]) >= screen * c_edge
        cand = np.nonzero(block)[0].astype(np.int64) + k + 1
        if cand.size:
            i, ang = K.first_hit(xs, Ls, Rs, cand, float(n), cos_lim, lanes)
            if i >= 0:
                tau = int(cand[i])
                angle = ang
        k += done
        aborted = status == 2 and tau is None
    last = tau if tau is not None else k
    xs = xs[:last].copy()
    # arc columns: interval before particle p attached
    theta = -2.0 * np.arctan(xs)
    arc_lo = np.concatenate([[0.0], -2.0 * np.arctan(Rs[:last - 1])])
    arc_hi = np.concatenate([[0.0], 2.0 * np.arctan(Ls[:last - 1])])
    return DiscResult(n=n, alpha=alpha, seed=seed, tau=tau, hit_angle=angle,
                      aborted=aborted, attachments=xs, theta=theta,
                      arc_lo=arc_lo, arc_hi=arc_hi)
