"""Property checks run by ``constrained-hl verify``.

Each check returns ``(ok, detail)``. They are small versions of the test
suite that need nothing beyond the package itself.
"""

import cmath
import math
from typing import NamedTuple

import numpy as np

from .conformal import (compose_forward, compose_inverse, endpoint_update, push_bounds,
                        slit_forward, slit_inverse)
from .disc import halfplane_to_disc, mobius_to_halfplane
from .geometry import envelope, hcap_estimate, height_bound, max_height
from .growth import replay, run
from .loewner import point_mass, solve_characteristic


class CheckResult(NamedTuple):
    name: str
    ok: bool
    detail: str


def _grid(rng, size):
    return rng.uniform(-3, 3, size) + 1j * rng.uniform(1e-3, 3, size)


def check_branches(rng):
    bad = 0
    for z in _grid(rng, 1000):
        for n in (1, 10, 1000):
            x = rng.uniform(-1, 1)
            if not slit_forward(z, x, n).imag > 0 or slit_inverse(z, x, n).imag < 0:
                bad += 1
    return bad == 0, f"{bad} branch violations"


def check_inverse_identity(rng):
    worst = 0.0
    for z in _grid(rng, 1000):
        x = rng.uniform(-1, 1)
        w = slit_forward(z, x, 100)
        worst = max(worst, abs(slit_inverse(w, x, 100) - z) / (1 + abs(z)))
    return worst <= 1e-10, f"max relative round trip {worst:.2e}"


def check_normalisation(rng):
    worst = 0.0
    for n in (1, 4, 100):
        for y in (1e3, 1e4):
            w = 1j * y
            v = (1j * y * (slit_inverse(w, 0.0, n) - w)).real
            worst = max(worst, abs(v - 0.5 / n) * 2 * n)
    return worst <= 1e-2, f"max relative capacity error {worst:.2e}"


def check_pushes(rng):
    bad = 0
    for _ in range(10000):
        n = int(rng.integers(1, 10**4))
        L, R = rng.uniform(0, 5, 2)
        x = rng.uniform(-L, R)
        L1, R1 = endpoint_update(L, R, x, n)
        h = 1 / math.sqrt(n)
        if not (L < L1 and R < R1 and R1 - R <= h * (1 + 1e-15) and L1 - L <= h * (1 + 1e-15)):
            bad += 1
        if (L1, R1) != endpoint_update(R, L, -x, n)[::-1]:
            bad += 1
        if R - x >= h and R - x <= 10:
            lo, hi = push_bounds(R, x, n)
            d = R - x
            # push in the cancellation-free form
            p = 1.0 / (n * (d + math.sqrt(d * d + 1.0 / n)))
            if not lo <= p <= hi:
                bad += 1
    return bad == 0, f"{bad} push violations"


def check_replay_and_ledger(rng):
    bad = []
    for seed in range(5):
        tr = run(1000, 3000, seed=seed)
        Ls, Rs = replay(tr.attachments, 1000)
        if not (np.array_equal(Ls, tr.L) and np.array_equal(Rs, tr.R)):
            bad.append(f"replay seed {seed}")
        tot = tr.right.total()
        want = tr.R[-1] - tr.R[0]
        if abs(tot - want) > 1e-12 * want:
            bad.append(f"ledger seed {seed}")
        again = run(1000, 3000, seed=seed)
        if not np.array_equal(again.attachments, tr.attachments):
            bad.append(f"determinism seed {seed}")
    return not bad, ", ".join(bad) or "replay, ledger and determinism hold"


def check_reflection(rng):
    bad = 0
    for seed in range(4):
        a = run(1000, 10**4, seed=seed)
        b = run(1000, 10**4, seed=seed, reflect=True)
        bad += not (np.array_equal(a.L, b.R) and np.array_equal(a.R, b.L))
    return bad == 0, f"{bad} runs not mirrored"


def check_round_trip(rng):
    worst = 0.0
    for seed in range(3):
        xs = run(100, 200, seed=seed).attachments
        for z in _grid(rng, 50):
            w = compose_forward(z, xs, 100)
            worst = max(worst, abs(compose_inverse(w, xs, 100) - z))
    return worst <= 1e-9, f"max Phi/Gamma round trip {worst:.2e}"


def check_geometry(rng):
    notes = []
    ok = True
    for k in (1, 10, 200):
        xs = run(100, k, seed=k).attachments
        est = hcap_estimate(xs, 100)
        if abs(est - k / 200) > 0.01 * k / 200:
            ok = False
            notes.append(f"hcap k={k}: {est:.6g}")
        env = envelope(xs, 100, eps=1e-5, m=400)
        if max_height(env) > height_bound(k, 100) + 1e-5 + 1e-6:
            ok = False
            notes.append(f"height k={k}")
    return ok, "; ".join(notes) or "capacity additive and height bounded"


def check_loewner(rng):
    worst = 0.0
    for z in [complex(a, b) for a in np.linspace(-2, 2, 5) for b in (0.5, 1.0, 3.0)]:
        f = solve_characteristic(z, 1.0, point_mass(), dt=1e-3)
        exact = cmath.sqrt(z * z - 2)
        if exact.imag < 0:
            exact = -exact
        worst = max(worst, abs(f - exact) / abs(exact))
    return worst <= 1e-6, f"max relative error vs sqrt(z^2 - 2t): {worst:.2e}"


def check_mobius(rng):
    worst = 0.0
    for _ in range(1000):
        r = 1 + rng.exponential()
        z = r * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        worst = max(worst, abs(halfplane_to_disc(mobius_to_halfplane(z)) - z) / abs(z))
    return worst <= 1e-14, f"max relative round trip {worst:.2e}"


CHECKS = {
    "branches": check_branches,
    "inverse_identity": check_inverse_identity,
    "capacity_normalisation": check_normalisation,
    "push_monotone_reflect_bracket": check_pushes,
    "replay_ledger_determinism": check_replay_and_ledger,
    "reflection": check_reflection,
    "map_round_trip": check_round_trip,
    "capacity_and_height": check_geometry,
    "loewner_point_mass": check_loewner,
    "mobius_round_trip": check_mobius,
}


def run_checks(seed=0, names=None):
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        try:
            ok, detail = fn(rng)
        except Exception as exc:
            ok, detail = False, f"raised {exc!r}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
