"""Compiled inner loops.

Everything here works on split real/imaginary float64 pairs so numba never
boxes complex numbers in the hot paths. The public wrappers live in
``conformal``, ``growth``, ``geometry`` and ``disc``.
"""

import math

import numpy as np
from numba import njit

# scale codes stored in int16 trace columns
MIN_CODE = -32768
OVER_CODE = 32767

# below this |w| / (1/n) the slit maps use the factored square root, which
# does not feel the rounding of 1/n against h*h
_FACTOR_SWITCH = 0.5


@njit(cache=True)
def sqrt_upper_ri(a, b):
    """Square root of a + ib with nonnegative imaginary part."""
    r = math.sqrt(a * a + b * b)
    if not 1e-290 < r < 1e290:
        if a == 0.0 and b == 0.0:
            return 0.0, 0.0
        # rescale by an even power of two to dodge under/overflow
        e = math.frexp(max(abs(a), abs(b)))[1] // 2
        p, q = sqrt_upper_ri(math.ldexp(a, -2 * e), math.ldexp(b, -2 * e))
        return math.ldexp(p, e), math.ldexp(q, e)
    s = math.sqrt(0.5 * (r + abs(a)))
    t = 0.5 * abs(b) / s
    if a >= 0.0:
        return (-s if b < 0.0 else s), t
    return (-t if b < 0.0 else t), s


@njit(cache=True)
def _cmul(a, b, c, d):
    return a * c - b * d, a * d + b * c


@njit(cache=True)
def slit_forward_ri(zr, zi, x, inv, h):
    d = zr - x
    if zi == 0.0:
        ad = abs(d)
        if ad >= h:
            return x + math.copysign(math.sqrt((ad - h) * (ad + h)), d), 0.0
        return x, math.sqrt((h - d) * (h + d))
    wr = (d - zi) * (d + zi) - inv
    wi = 2.0 * d * zi
    if abs(wr) + abs(wi) < _FACTOR_SWITCH * inv:
        # (z-x)^2 - 1/n = (d - h)(d + h); both factors lie in the upper half-plane
        p1, q1 = sqrt_upper_ri(d - h, zi)
        p2, q2 = sqrt_upper_ri(d + h, zi)
        sr, si = _cmul(p1, q1, p2, q2)
        if si < 0.0:
            sr = -sr
            si = -si
        return x + sr, si
    sr, si = sqrt_upper_ri(wr, wi)
    return x + sr, si


@njit(cache=True)
def slit_inverse_ri(wr, wi, x, inv, h):
    d = wr - x
    if wi == 0.0:
        return x + math.copysign(math.sqrt(d * d + inv), d), 0.0
    ar = (d - wi) * (d + wi) + inv
    ai = 2.0 * d * wi
    if abs(ar) + abs(ai) < _FACTOR_SWITCH * inv:
        # (w-x)^2 + 1/n = (d - ih)(d + ih)
        p1, q1 = sqrt_upper_ri(d, wi - h)
        p2, q2 = sqrt_upper_ri(d, wi + h)
        sr, si = _cmul(p1, q1, p2, q2)
        if si < 0.0:
            sr = -sr
            si = -si
        return x + sr, si
    sr, si = sqrt_upper_ri(ar, ai)
    return x + sr, si


@njit(cache=True)
def compose_forward_ri(zr, zi, xs, k, inv, h):
    for j in range(k - 1, -1, -1):
        zr, zi = slit_forward_ri(zr, zi, xs[j], inv, h)
    return zr, zi


@njit(cache=True)
def compose_inverse_ri(wr, wi, xs, k, inv, h):
    for j in range(k):
        wr, wi = slit_inverse_ri(wr, wi, xs[j], inv, h)
    return wr, wi


@njit(cache=True)
def compose_forward_many(zr, zi, xs, inv, h):
    m = zr.shape[0]
    k = xs.shape[0]
    outr = np.empty(m)
    outi = np.empty(m)
    for i in range(m):
        outr[i], outi[i] = compose_forward_ri(zr[i], zi[i], xs, k, inv, h)
    return outr, outi


@njit(cache=True)
def compose_inverse_many(wr, wi, xs, inv, h):
    m = wr.shape[0]
    k = xs.shape[0]
    outr = np.empty(m)
    outi = np.empty(m)
    for i in range(m):
        outr[i], outi[i] = compose_inverse_ri(wr[i], wi[i], xs, k, inv, h)
    return outr, outi


@njit(cache=True)
def inverse_displacement(wr, wi, xs, inv, h):
    """Gamma(w) - w accumulated increment by increment.

    Each increment g(w) - w = (1/n) / (sqrt((w-x)^2 + 1/n) + (w-x)) is
    formed without cancellation, so the sum stays accurate at large |w|.
    """
    sr = 0.0
    si = 0.0
    for j in range(xs.shape[0]):
        d_r = wr - xs[j]
        nr, ni = slit_inverse_ri(wr, wi, xs[j], inv, h)
        qr = nr - xs[j] + d_r
        qi = ni + wi
        den = qr * qr + qi * qi
        sr += inv * qr / den
        si -= inv * qi / den
        wr = nr
        wi = ni
    return sr, si


@njit(cache=True)
def scale_code(d, j_min, j_max, two_jmin):
    if d < two_jmin:
        return MIN_CODE
    e = math.frexp(d)[1]
    j = e - 1
    if j > j_max:
        return OVER_CODE
    return j


@njit(cache=True)
def ledger_add(code, push, j_min, sums, comps, sqs, counts):
    if code == MIN_CODE:
        idx = 0
    elif code == OVER_CODE:
        idx = sums.shape[0] - 1
    else:
        idx = code - j_min + 1
    # Neumaier compensated summation
    s = sums[idx]
    t = s + push
    if abs(s) >= abs(push):
        comps[idx] += (s - t) + push
    else:
        comps[idx] += (push - t) + s
    sums[idx] = t
    sqs[idx] += push * push
    counts[idx] += 1


@njit(cache=True)
def grow_chunk(us, n, L, R, reflect, j_min, j_max,
               out_x, out_L, out_R, out_sR, out_sL, out_pR, out_pL,
               r_sums, r_comps, r_sqs, r_counts, l_sums, l_comps, l_sqs, l_counts):
    """Advance the endpoint recursion over a block of uniforms.

    Per-step outputs are written to the ``out_*`` arrays (same length as
    ``us``); both dyadic ledgers are updated in place. Returns (L, R).
    """
    inv = 1.0 / n
    two_jmin = math.ldexp(1.0, j_min)
    for i in range(us.shape[0]):
        u = us[i]
        if reflect:
            u = 1.0 - u
        x = u * R - (1.0 - u) * L
        dR = R - x
        dL = L + x
        cR = scale_code(dR, j_min, j_max, two_jmin)
        cL = scale_code(dL, j_min, j_max, two_jmin)
        R1 = x + math.sqrt(dR * dR + inv)
        L1 = -x + math.sqrt(dL * dL + inv)
        pR = R1 - R
        pL = L1 - L
        ledger_add(cR, pR, j_min, r_sums, r_comps, r_sqs, r_counts)
        ledger_add(cL, pL, j_min, l_sums, l_comps, l_sqs, l_counts)
        R = R1
        L = L1
        out_x[i] = x
        out_L[i] = L
        out_R[i] = R
        out_sR[i] = cR
        out_sL[i] = cL
        out_pR[i] = pR
        out_pL[i] = pL
    return L, R


@njit(cache=True)
def grow_light(us, n, L, R, out_L, out_R):
    """Endpoint recursion only; used by large ensembles."""
    inv = 1.0 / n
    for i in range(us.shape[0]):
        u = us[i]
        x = u * R - (1.0 - u) * L
        dR = R - x
        dL = L + x
        R = x + math.sqrt(dR * dR + inv)
        L = -x + math.sqrt(dL * dL + inv)
        out_L[i] = L
        out_R[i] = R
    return L, R


@njit(cache=True)
def replay_endpoints(xs, n):
    """Endpoints after each attachment; xs[0] must be the seed particle 0."""
    k = xs.shape[0]
    inv = 1.0 / n
    Ls = np.empty(k)
    Rs = np.empty(k)
    h = math.sqrt(inv)
    L = h
    R = h
    Ls[0] = L
    Rs[0] = R
    for i in range(1, k):
        x = xs[i]
        dR = R - x
        dL = L + x
        R = x + math.sqrt(dR * dR + inv)
        L = -x + math.sqrt(dL * dL + inv)
        Ls[i] = L
        Rs[i] = R
    return Ls, Rs


@njit(cache=True)
def disc_advance(us, n, L, R, xs, Ls, Rs, k, gap_min):
    """Grow particles ``k+1, k+2, ...`` from a block of uniforms.

    ``xs[p-1]`` receives ``x_p`` and ``Ls[p-1], Rs[p-1]`` the endpoints after
    particle ``p``. Stops early (status 2) once the arc gap
    ``2 pi - 2 atan(R) - 2 atan(L)`` drops below ``gap_min``.
    Returns (status, particles_added, L, R).
    """
    inv = 1.0 / n
    for i in range(us.shape[0]):
        u = us[i]
        x = u * R - (1.0 - u) * L
        dR = R - x
        dL = L + x
        R = x + math.sqrt(dR * dR + inv)
        L = -x + math.sqrt(dL * dL + inv)
        xs[k] = x
        Ls[k] = L
        Rs[k] = R
        k += 1
        if 2.0 * math.pi - 2.0 * math.atan(R) - 2.0 * math.atan(L) < gap_min:
            return 2, i + 1, L, R
    return 0, us.shape[0], L, R


@njit(cache=True)
def target_hit(wr, wi, cos_lim):
    """Is arg m^{-1}(w) in [pi(1-alpha), pi(1+alpha)]?  Also returns the argument."""
    # m^{-1}(w) = (i + w)/(i - w)
    nr = wr
    ni = 1.0 + wi
    dr = -wr
    di = 1.0 - wi
    zr = nr * dr + ni * di
    zi = ni * dr - nr * di
    mod = math.sqrt(zr * zr + zi * zi)
    if mod == 0.0:
        return False, 0.0
    return zr / mod <= cos_lim, math.atan2(zi, zr)


@njit(cache=True)
def _box_safe(B, H, cos_lim):
    # the non-target set in the closed half-plane is convex (a lens), so
    # checking the corners of [-B, B] x [0, H] suffices
    if target_hit(B, 0.0, cos_lim)[0] or target_hit(-B, 0.0, cos_lim)[0]:
        return False
    if target_hit(B, H, cos_lim)[0] or target_hit(-B, H, cos_lim)[0]:
        return False
    return True


@njit(cache=True)
def first_hit(xs, Ls, Rs, cand, n, cos_lim, lanes):
    """Index into ``cand`` of the first particle whose physical position is in the target.

    ``cand`` lists particle numbers ``p >= 2`` in increasing order; particle
    ``p`` sits at ``Phi_{p-1}(x_p)``. Candidates are evaluated ``lanes`` at a
    time so the independent map chains overlap. A lane is retired early
    once ``|Re w| <= max(|Re z|, R_j, L_j)`` and ``Im w <= sqrt((p-1)/n)``
    already exclude the target.
    """
    inv = 1.0 / n
    h = math.sqrt(inv)
    nc = cand.shape[0]
    zr = np.empty(lanes)
    zi = np.empty(lanes)
    kk = np.empty(lanes, np.int64)
    live = np.empty(lanes, np.bool_)
    for s in range(0, nc, lanes):
        m = min(nc, s + lanes) - s
        top = 0
        for l in range(m):
            p = cand[s + l]
            zr[l] = xs[p - 1]
            zi[l] = 0.0
            kk[l] = p - 1
            live[l] = True
            if p - 1 > top:
                top = p - 1
        alive = m
        j = top - 1
        while j >= 0 and alive > 0:
            xj = xs[j]
            for l in range(m):
                if live[l] and j < kk[l]:
                    zr[l], zi[l] = slit_forward_ri(zr[l], zi[l], xj, inv, h)
            if j > 0 and (j & 255) == 0:
                # Ls/Rs[j-1] are the endpoints after particle j
                ext = max(Ls[j - 1], Rs[j - 1])
                for l in range(m):
                    if live[l] and j < kk[l]:
                        B = max(abs(zr[l]), ext)
                        if _box_safe(B, math.sqrt(kk[l] * inv), cos_lim):
                            live[l] = False
                            alive -= 1
            j -= 1
        for l in range(m):
            if live[l]:
                hit, ang = target_hit(zr[l], zi[l], cos_lim)
                if hit:
                    return s + l, ang
    return -1, 0.0
