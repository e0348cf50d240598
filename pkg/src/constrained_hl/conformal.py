"""Elementary slit maps, their compositions, and the endpoint recursion.

Conventions
-----------
``F_x(z) = x + sqrt((z - x)^2 - 1/n)`` grows a vertical slit of height
``1/sqrt(n)`` (half-plane capacity ``1/(2n)``) at ``x``. Square roots are
always taken with nonnegative imaginary part; on the real axis the
sign-preserving real formula is used instead, so boundary points follow the
limit from the upper half-plane.

``compose_forward`` evaluates ``Phi_k = F_{x_1} o ... o F_{x_k}`` innermost
first and ``compose_inverse`` evaluates ``Gamma_k = Phi_k^{-1}`` outermost
first, so every elementary map only ever sees points of the closed upper
half-plane.
"""

import math

import numpy as np

from . import _kernels as K


def _slit_height(n):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(1.0 / n)


def sqrt_upper(w):
    """Square root of ``w`` in the closed upper half-plane.

    On the nonnegative real axis the nonnegative root is returned.
    """
    w = complex(w)
    p, q = K.sqrt_upper_ri(w.real, w.imag)
    return complex(p, q)


def slit_forward(z, x, n):
    """Evaluate ``F_x(z)``. Real ``z`` is treated as a boundary point."""
    z = complex(z)
    h = _slit_height(n)
    r, i = K.slit_forward_ri(z.real, z.imag, float(x), 1.0 / n, h)
    return complex(r, i)


def slit_inverse(w, x, n):
    """Evaluate the single-slit mapping-out function ``g_x(w)``.

    ``g_x(w) = x + sqrt((w - x)^2 + 1/n)``; for real ``w`` the sign of
    ``w - x`` is preserved.
    """
    w = complex(w)
    h = _slit_height(n)
    r, i = K.slit_inverse_ri(w.real, w.imag, float(x), 1.0 / n, h)
    return complex(r, i)


def _as_xs(attachments):
    return np.ascontiguousarray(attachments, dtype=np.float64).reshape(-1)


def compose_forward(z, attachments, n):
    """Evaluate ``Phi_k(z)`` for the attachment sequence ``x_1..x_k``.

    ``z`` may be a scalar or an array; arrays are evaluated elementwise.
    """
    xs = _as_xs(attachments)
    h = _slit_height(n)
    if np.ndim(z) == 0:
        z = complex(z)
        r, i = K.compose_forward_ri(z.real, z.imag, xs, xs.shape[0], 1.0 / n, h)
        return complex(r, i)
    z = np.asarray(z, dtype=np.complex128)
    zr = np.ascontiguousarray(z.real.reshape(-1))
    zi = np.ascontiguousarray(z.imag.reshape(-1))
    r, i = K.compose_forward_many(zr, zi, xs, 1.0 / n, h)
    return (r + 1j * i).reshape(z.shape)


def compose_inverse(w, attachments, n):
    """Evaluate ``Gamma_k(w)``.

    Only meaningful for ``w`` outside the cluster hull (for instance
    ``Im(w) > sqrt(k/n)``); this is not checked.
    """
    xs = _as_xs(attachments)
    h = _slit_height(n)
    if np.ndim(w) == 0:
        w = complex(w)
        r, i = K.compose_inverse_ri(w.real, w.imag, xs, xs.shape[0], 1.0 / n, h)
        return complex(r, i)
    w = np.asarray(w, dtype=np.complex128)
    wr = np.ascontiguousarray(w.real.reshape(-1))
    wi = np.ascontiguousarray(w.imag.reshape(-1))
    r, i = K.compose_inverse_many(wr, wi, xs, 1.0 / n, h)
    return (r + 1j * i).reshape(w.shape)


def endpoint_update(L, R, x, n):
    """One step of the interval recursion; returns ``(L', R')``.

    Raises ``ValueError`` if ``x`` lies outside ``[-L, R]``.
    """
    if not (-L <= x <= R):
        raise ValueError(f"attachment {x!r} outside [-{L!r}, {R!r}]")
    inv = 1.0 / n
    dR = R - x
    dL = L + x
    return -x + math.sqrt(dL * dL + inv), x + math.sqrt(dR * dR + inv)


def push_bounds(R, x, n):
    """Bracket for the right-front push of an attachment at distance ``R - x``.

    Returns ``(lo, hi)`` with ``hi = 1/(2n z)`` and
    ``lo = hi - (1/8)/(n^2 z^3)``, ``z = R - x``. The lower bound is the
    alternating Taylor remainder of ``sqrt(z^2 + 1/n)``; it holds whenever
    ``z >= 1/sqrt(n)``.
    """
    z = R - x
    if z < _slit_height(n):
        raise ValueError(f"R - x = {z!r} is below the minimal distance 1/sqrt(n)")
    hi = 1.0 / (2.0 * n * z)
    lo = hi - 0.125 / (n * n * z ** 3)
    return lo, hi
