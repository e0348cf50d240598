"""Loewner-Kufarev flows solved pointwise along backward characteristics.

The flow ``f_t`` solves ``d/dt f_t(z) = f_t'(z) * D_t(z)`` with drift
``D_t(z) = weight * int mu_t(dx) / (x - z)`` and ``f_0 = id``. Along a curve
``w(s)`` with ``w' = -D_s(w)`` the value ``f_s(w(s))`` is constant, so
integrating backwards from ``w(t) = z`` gives ``f_t(z) = w(0)``.

With ``weight = 1`` the flow gains half-plane capacity at unit rate
(a point mass at 0 gives ``sqrt(z^2 - 2t)``). A particle of the cluster
carries capacity ``1/(2n)`` over a time window ``1/n``, so the empirical
driver uses ``weight = 1/2`` (:data:`PARTICLE_WEIGHT`).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K

PARTICLE_WEIGHT = 0.5


class PrecisionError(ArithmeticError):
    """A characteristic came too close to the real axis for the step size."""


@dataclass(frozen=True)
class DrivingMeasure:
    kind: str                       # "point_mass" | "uniform" | "empirical"
    weight: float = 1.0
    position: float = 0.0
    half_width: object = None       # callable s -> a(s) for "uniform"
    attachments: np.ndarray = None  # x_1, x_2, ... for "empirical"
    n: float = None

    def __post_init__(self):
        if self.kind not in ("point_mass", "uniform", "empirical"):
            raise ValueError(f"unknown measure kind {self.kind!r}")

    def breakpoints(self, t):
        """Times in (0, t) where the measure switches atoms."""
        if self.kind != "empirical":
            return []
        k = math.ceil(self.n * t) - 1
        return [j / self.n for j in range(1, k + 1) if j / self.n < t]


def point_mass(position=0.0, weight=1.0):
    return DrivingMeasure("point_mass", weight=weight, position=float(position))


def uniform(half_width, weight=1.0):
    """Uniform probability measure on ``[-a(s), a(s)]``."""
    return DrivingMeasure("uniform", weight=weight, half_width=half_width)


def theorem_uniform(n, weight=1.0):
    """Uniform on ``[-sqrt(s log n)/2, sqrt(s log n)/2]``."""
    logn = math.log(n)
    return uniform(lambda s: 0.5 * math.sqrt(max(s, 0.0) * logn), weight)


def empirical(attachments, n, weight=PARTICLE_WEIGHT):
    """Atom ``x_k`` active on ``[(k-1)/n, k/n)``."""
    xs = np.ascontiguousarray(attachments, dtype=np.float64)
    return DrivingMeasure("empirical", weight=weight, attachments=xs, n=n)


def _uniform_drift(z, a):
    # (1/2a) log((a - z)/(-a - z)) == -atanh(a/z)/a, branch with Im in (0, pi)
    if a == 0.0:
        return -1.0 / z
    return -np.arctanh(a / z) / a


def driver_drift(z, measure, s=0.0):
    """``weight * int mu_s(dx) / (x - z)`` for ``Im z > 0`` (scalar or array ``z``)."""
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(z.imag > 0):
        raise ValueError("drift is singular on the real axis")
    if measure.kind == "point_mass":
        d = measure.weight / (measure.position - z)
    elif measure.kind == "uniform":
        d = measure.weight * _uniform_drift(z, float(measure.half_width(s)))
    else:
        k = min(int(math.floor(measure.n * s)), measure.attachments.size - 1)
        d = measure.weight / (measure.attachments[k] - z)
    return complex(d) if scalar else d


def _drift(w, s, measure):
    # unchecked array drift for the integrator
    if measure.kind == "point_mass":
        return measure.weight / (measure.position - w)
    if measure.kind == "uniform":
        return measure.weight * _uniform_drift(w, float(measure.half_width(s)))
    k = min(int(math.floor(measure.n * s)), measure.attachments.size - 1)
    return measure.weight / (measure.attachments[k] - w)


def _rk4(w, s, h, measure):
    # one step of w' = -D(w, s) from s to s - h, i.e. dw/d(-s) = D
    k1 = _drift(w, s, measure)
    k2 = _drift(w + 0.5 * h * k1, s - 0.5 * h, measure)
    k3 = _drift(w + 0.5 * h * k2, s - 0.5 * h, measure)
    k4 = _drift(w + h * k3, s - h, measure)
    return w + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def _integrate(z, s_hi, s_lo, measure, dt, adaptive, tol, im_floor):
    # all points share the step; a rejected step is halved for the whole batch
    w = z
    s = s_hi
    h = dt
    while s > s_lo:
        step = min(h, s - s_lo)
        if adaptive:
            full = _rk4(w, s, step, measure)
            half = _rk4(_rk4(w, s, 0.5 * step, measure), s - 0.5 * step, 0.5 * step, measure)
            err = np.max(np.abs(full - half) / (1.0 + np.abs(half)))
            if err > tol and step > 1e-12:
                h = 0.5 * step
                continue
            w = half
            h = min(dt, 2.0 * h)
        else:
            w = _rk4(w, s, step, measure)
        s -= step
        low = np.min(w.imag)
        if low < im_floor:
            raise PrecisionError(f"characteristic reached Im = {low:.3g} at s = {s:.6g}")
    return w


def default_dt(t):
    return 1e-4 * max(1.0, t)


def solve_characteristic(z, t, measure, dt=None, adaptive=True, tol=1e-8, exact=True):
    """``f_t(z)`` for the flow driven by ``measure``; ``z`` may be an array.

    Runge-Kutta 4 on the backward characteristic. With ``adaptive`` each step
    is compared against two half steps and halved until they agree to
    ``tol``. Empirical measures are evaluated with their exact slit maps
    unless ``exact=False``; the numeric path splits steps at atom switches.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(z.imag > 0):
        raise ValueError("z must lie in the open upper half-plane")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        w = z
    elif measure.kind == "empirical" and exact:
        w = _empirical_exact(z, t, measure)
    else:
        dt = default_dt(t) if dt is None else dt
        if dt <= 0:
            raise ValueError("dt must be positive")
        cuts = [t] + sorted(measure.breakpoints(t), reverse=True) + [0.0]
        w = z
        for s_hi, s_lo in zip(cuts[:-1], cuts[1:]):
            w = _integrate(w, s_hi, s_lo, measure, dt, adaptive, tol, 10.0 * dt)
    return complex(w) if scalar else np.array(w)


def _empirical_exact(z, t, measure):
    n = measure.n
    xs = measure.attachments
    full = int(math.floor(n * t))
    rem = t - full / n
    if full > xs.size or (full == xs.size and rem > 0):
        raise ValueError("driving measure has too few atoms for time t")
    zr = np.ascontiguousarray(z.real, dtype=np.float64).ravel()
    zi = np.ascontiguousarray(z.imag, dtype=np.float64).ravel()
    if rem > 0:
        # innermost: the partially active atom x_{full+1}
        c = 2.0 * measure.weight * rem
        zr, zi = K.compose_forward_many(zr, zi, xs[full:full + 1], c, math.sqrt(c))
    c = 2.0 * measure.weight / n
    zr, zi = K.compose_forward_many(zr, zi, xs[:full], c, math.sqrt(c))
    return (zr + 1j * zi).reshape(z.shape)


def deterministic_map(z, t, n, dt=None, weight=1.0, **kw):
    """Flow driven by the uniform measure of half-width ``sqrt(s log n)/2``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return solve_characteristic(z, t, theorem_uniform(n, weight), dt=dt, **kw)


def flow_capacity(measure, t, y=50.0, dt=None):
    """Half-plane capacity of ``f_t`` from ``iy (iy - f_t(iy))``, Richardson in ``y``."""
    def at(yy):
        return (1j * yy * (1j * yy - solve_characteristic(1j * yy, t, measure, dt=dt))).real
    return (4.0 * at(2.0 * y) - at(y)) / 3.0


def discrepancy_report(attachments, n, t, grid, dt=None, weight=PARTICLE_WEIGHT):
    """Rows ``(z, |Phi_{nt}(z) - f_t(z)|, |f_t(z) - z|)`` over ``grid``.

    Both flows use the same ``weight`` so that ``Phi_{nt}`` and ``f_t``
    carry equal capacity. Nothing is asserted about the sizes.
    """
    zs = np.array([complex(z) for z in grid], dtype=np.complex128)
    if zs.size == 0:
        return []
    if np.any(zs.imag <= 0):
        raise ValueError("grid points must lie in the upper half-plane")
    if t == 0:
        return [(complex(z), 0.0, 0.0) for z in zs]
    phi = solve_characteristic(zs, t, empirical(attachments, n, weight))
    f = deterministic_map(zs, t, n, dt=dt, weight=weight)
    return [(complex(z), float(a), float(b))
            for z, a, b in zip(zs, np.abs(phi - f), np.abs(f - zs))]


def point_mass_exact(z, t):
    """``sqrt(z^2 - 2t)`` on the upper branch: the flow of a unit point mass at 0."""
    r = cmath.sqrt(complex(z) ** 2 - 2.0 * t)
    return r if r.imag >= 0 else -r


def oracle_grid(points=100):
    """``points`` grid nodes with ``Re z`` in [-2, 2] and ``Im z`` in [0.5, 5]."""
    m = int(round(math.sqrt(points)))
    return [complex(a, b) for b in np.linspace(0.5, 5.0, m) for a in np.linspace(-2.0, 2.0, m)]


def point_mass_error(t=1.0, dt=1e-4, grid=None, adaptive=True):
    """Largest relative error of the solver against :func:`point_mass_exact`."""
    zs = np.array(oracle_grid() if grid is None else grid, dtype=np.complex128)
    f = solve_characteristic(zs, t, point_mass(), dt=dt, adaptive=adaptive)
    exact = np.array([point_mass_exact(z, t) for z in zs])
    return float(np.max(np.abs(f - exact) / np.abs(exact)))


def halving_ratios(z=0.5 + 2j, t=1.0, dts=(0.1, 0.05, 0.025, 0.0125)):
    """Error ratios between consecutive step sizes with fixed-step RK4."""
    mu = point_mass()
    exact = point_mass_exact(z, t)
    errs = [abs(solve_characteristic(z, t, mu, dt=dt, adaptive=False) - exact) for dt in dts]
    return errs, [a / b for a, b in zip(errs[:-1], errs[1:])]
