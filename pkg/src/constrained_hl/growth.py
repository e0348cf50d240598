"""Stochastic dynamics of the constrained HL(0) cluster in mapped-out coordinates.

After ``k`` particles the cluster is mapped out onto ``[-L_k, R_k]``. The
next particle attaches at ``x ~ Uniform[-L_k, R_k]`` and the endpoints move
by the closed-form single-slit recursion (see
:func:`constrained_hl.conformal.endpoint_update`). Every push is classified
by the dyadic scale of its distance to the front and accumulated in a
:class:`DyadicLedger`.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K

MIN_SCALE = K.MIN_CODE
OVER_SCALE = K.OVER_CODE

DEFAULT_CHUNK = 1 << 18


def scale_bounds(n, T=1.0):
    """Return ``(j_min, j_max)``.

    ``j_min`` is the least integer with ``2**j >= 1/sqrt(n)`` and ``j_max``
    the least with ``2**j >= sqrt(T log n)`` (never below ``j_min``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    j_min = _least_pow2_exponent(1.0 / math.sqrt(n))
    target = math.sqrt(T * math.log(n)) if n > 1 else 0.0
    j_max = _least_pow2_exponent(target) if target > 0 else j_min
    return j_min, max(j_min, j_max)


def _least_pow2_exponent(v):
    j = math.frexp(v)[1]  # 2**(j-1) <= v < 2**j
    if math.ldexp(1.0, j - 1) >= v:
        j -= 1
    return j


def dyadic_index(distance, n, T=1.0):
    """Dyadic scale of an attachment at ``distance`` from the front.

    Returns :data:`MIN_SCALE` for ``distance < 2**j_min``, the integer ``j``
    with ``2**j <= distance < 2**(j+1)`` for ``j_min <= j <= j_max``, and
    :data:`OVER_SCALE` beyond ``j_max``.
    """
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance!r}")
    j_min, j_max = scale_bounds(n, T)
    return int(K.scale_code(float(distance), j_min, j_max, math.ldexp(1.0, j_min)))


def scale_label(code):
    if code == MIN_SCALE:
        return "min"
    if code == OVER_SCALE:
        return "over"
    return str(int(code))


@dataclass
class DyadicLedger:
    """Per-scale accumulated front pushes.

    Slot 0 is the min bucket, slots ``1..`` are scales ``j_min..j_max`` and
    the last slot is the over bucket. Sums are compensated (Neumaier).
    """

    j_min: int
    j_max: int
    sums: np.ndarray = None
    comps: np.ndarray = None
    sqs: np.ndarray = None
    counts: np.ndarray = None

    def __post_init__(self):
        size = self.j_max - self.j_min + 3
        if self.sums is None:
            self.sums = np.zeros(size)
            self.comps = np.zeros(size)
            self.sqs = np.zeros(size)
            self.counts = np.zeros(size, dtype=np.int64)

    @property
    def scales(self):
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def totals(self):
        return self.sums + self.comps

    @property
    def delta(self):
        """Mapping ``j -> Delta_j`` over ``j_min..j_max``."""
        tot = self.totals
        return {int(j): float(tot[i + 1]) for i, j in enumerate(self.scales)}

    @property
    def delta_min(self):
        return float(self.totals[0])

    @property
    def delta_over(self):
        return float(self.totals[-1])

    @property
    def count_min(self):
        return int(self.counts[0])

    @property
    def count_over(self):
        return int(self.counts[-1])

    def count(self, j):
        return int(self.counts[j - self.j_min + 1])

    def total(self):
        """Sum of every bucket, exactly rounded."""
        return math.fsum(list(self.sums) + list(self.comps))

    def add(self, code, push):
        K.ledger_add(int(code), float(push), self.j_min,
                     self.sums, self.comps, self.sqs, self.counts)

    def merge(self, other):
        if (self.j_min, self.j_max) != (other.j_min, other.j_max):
            raise ValueError("ledgers cover different scale ranges")
        out = DyadicLedger(self.j_min, self.j_max)
        out.sums = self.sums + other.sums
        out.comps = self.comps + other.comps
        out.sqs = self.sqs + other.sqs
        out.counts = self.counts + other.counts
        return out


class StepRecord(NamedTuple):
    x: float
    scale_R: int
    scale_L: int
    push_R: float
    push_L: float


def replica_rng(seed, replica=0):
    """PCG64 stream for ``(seed, replica)``; SeedSequence hashes both into the state."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(replica),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class GrowthState:
    """Live state of one run. Construct with :func:`new_state`."""

    n: int
    k: int
    L: float
    R: float
    lam: float
    rng: np.random.Generator
    T: float
    right: DyadicLedger
    left: DyadicLedger

    def step(self, u=None, reflect=False):
        return step(self, u=u, reflect=reflect)


def new_state(n, seed, T=1.0, replica=0):
    """State after the seed particle at 0: ``k = 1``, ``L = R = 1/sqrt(n)``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    h = math.sqrt(1.0 / n)
    j_min, j_max = scale_bounds(n, T)
    return GrowthState(n=n, k=1, L=h, R=h, lam=h + h, rng=replica_rng(seed, replica), T=T,
                       right=DyadicLedger(j_min, j_max), left=DyadicLedger(j_min, j_max))


def step(state, u=None, reflect=False):
    """Attach one particle. ``u`` overrides the uniform draw."""
    if u is None:
        u = state.rng.random()
    if reflect:
        u = 1.0 - u
    L, R, n = state.L, state.R, state.n
    inv = 1.0 / n
    x = u * R - (1.0 - u) * L
    dR = R - x
    dL = L + x
    j_min, j_max = state.right.j_min, state.right.j_max
    two = math.ldexp(1.0, j_min)
    cR = int(K.scale_code(dR, j_min, j_max, two))
    cL = int(K.scale_code(dL, j_min, j_max, two))
    R1 = x + math.sqrt(dR * dR + inv)
    L1 = -x + math.sqrt(dL * dL + inv)
    pR = R1 - R
    pL = L1 - L
    state.right.add(cR, pR)
    state.left.add(cL, pL)
    state.L, state.R = L1, R1
    state.lam = L1 + R1
    state.k += 1
    return StepRecord(x, cR, cL, pR, pL)


class RunAborted(RuntimeError):
    """Raised when a run cannot continue; ``partial`` holds the trace so far."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


@dataclass
class Trace:
    """Record of one run.

    ``attachments[i]`` is ``x_{i+1}`` (so ``attachments[0] == 0``). Endpoint
    columns are stored for the steps listed in ``k``; with ``stride == 1``
    that is every step ``1..steps``.
    """

    n: int
    steps: int
    T: float
    seed: int
    attachments: np.ndarray
    k: np.ndarray
    L: np.ndarray
    R: np.ndarray
    scale_R: np.ndarray
    scale_L: np.ndarray
    push_R: np.ndarray
    push_L: np.ndarray
    right: DyadicLedger
    left: DyadicLedger
    stride: int = 1

    @property
    def lam(self):
        return self.L + self.R

    @property
    def full(self):
        return self.stride == 1

    def endpoints_at(self, k):
        """``(L_k, R_k)`` for a recorded step ``k``."""
        i = int(np.searchsorted(self.k, k))
        if i >= len(self.k) or self.k[i] != k:
            raise KeyError(f"step {k} not recorded (stride {self.stride})")
        return float(self.L[i]), float(self.R[i])


def _record_indices(steps, stride, checkpoints):
    ks = set(range(1, steps + 1, stride))
    ks.add(steps)
    for c in checkpoints or ():
        if 1 <= c <= steps:
            ks.add(int(c))
    return np.array(sorted(ks), dtype=np.int64)


def run(n, steps, seed=0, *, T=None, replica=0, reflect=False, stride=None,
        checkpoints=None, chunk=DEFAULT_CHUNK):
    """Run ``steps`` particles (the seed particle counts as step 1).

    ``T`` sets ``j_max`` for the ledgers and defaults to ``steps / n``.
    ``stride`` thins the stored endpoint columns; the default keeps every
    step up to ``10**6`` steps and about ``10**6`` rows beyond that.
    Attachments are always stored in full. ``checkpoints`` lists extra steps
    whose endpoints are always stored.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if T is None:
        T = max(steps / n, 1.0 / n)
    if stride is None:
        stride = max(1, math.ceil(steps / 10**6))
    state = new_state(n, seed, T=T, replica=replica)
    rec_k = _record_indices(steps, stride, checkpoints)
    nrec = len(rec_k)

    xs = np.empty(steps)
    cols = {
        "L": np.empty(nrec), "R": np.empty(nrec),
        "scale_R": np.empty(nrec, dtype=np.int16), "scale_L": np.empty(nrec, dtype=np.int16),
        "push_R": np.empty(nrec), "push_L": np.empty(nrec),
    }
    h = state.R
    xs[0] = 0.0
    # step 1 pushes both fronts out from the empty interval
    cols["L"][0], cols["R"][0] = h, h
    cols["scale_R"][0] = cols["scale_L"][0] = MIN_SCALE
    cols["push_R"][0] = cols["push_L"][0] = h

    def partial(done):
        m = int(np.searchsorted(rec_k, done, side="right"))
        return Trace(n, done, T, seed, xs[:done].copy(), rec_k[:m],
                     *(cols[c][:m] for c in ("L", "R", "scale_R", "scale_L", "push_R", "push_L")),
                     state.right, state.left, stride)

    L, R = state.L, state.R
    j_min, j_max = state.right.j_min, state.right.j_max
    rl, ll = state.right, state.left
    done = 1
    rp = 1  # next record slot
    try:
        while done < steps:
            m = min(chunk, steps - done)
            us = state.rng.random(m)
            bx = np.empty(m)
            bL = np.empty(m)
            bR = np.empty(m)
            bsR = np.empty(m, dtype=np.int16)
            bsL = np.empty(m, dtype=np.int16)
            bpR = np.empty(m)
            bpL = np.empty(m)
            L, R = K.grow_chunk(us, float(n), L, R, reflect, j_min, j_max,
                                bx, bL, bR, bsR, bsL, bpR, bpL,
                                rl.sums, rl.comps, rl.sqs, rl.counts,
                                ll.sums, ll.comps, ll.sqs, ll.counts)
            xs[done:done + m] = bx
            # steps done+1 .. done+m live at block offsets 0 .. m-1
            hi = int(np.searchsorted(rec_k, done + m, side="right"))
            sel = rec_k[rp:hi] - done - 1
            cols["L"][rp:hi] = bL[sel]
            cols["R"][rp:hi] = bR[sel]
            cols["scale_R"][rp:hi] = bsR[sel]
            cols["scale_L"][rp:hi] = bsL[sel]
            cols["push_R"][rp:hi] = bpR[sel]
            cols["push_L"][rp:hi] = bpL[sel]
            rp = hi
            done += m
    except MemoryError as exc:
        state.L, state.R, state.lam, state.k = L, R, L + R, done
        raise RunAborted(f"out of memory after {done} steps", partial(done)) from exc
    state.L, state.R, state.lam, state.k = L, R, L + R, done
    return partial(done)


def replay(attachments, n):
    """Endpoint arrays ``(L, R)`` after each attachment, recomputed from scratch."""
    xs = np.ascontiguousarray(attachments, dtype=np.float64)
    if xs.size == 0 or xs[0] != 0.0:
        raise ValueError("attachment sequence must start with the seed particle at 0")
    return K.replay_endpoints(xs, float(n))


def endpoints_at_steps(n, seed, ks, replica=0, chunk=DEFAULT_CHUNK):
    """``(L_k, R_k)`` at the requested steps without storing a trace.

    Uses the same random stream as :func:`run`, so results agree with a
    full run bit for bit.
    """
    ks = np.asarray(sorted(set(int(k) for k in ks)), dtype=np.int64)
    if ks.size == 0:
        return ks, np.empty(0), np.empty(0)
    if ks[0] < 1:
        raise ValueError("steps start at 1")
    rng = replica_rng(seed, replica)
    h = math.sqrt(1.0 / n)
    L = R = h
    outL = np.empty(ks.size)
    outR = np.empty(ks.size)
    done = 1
    p = 0
    while p < ks.size and ks[p] == 1:
        outL[p] = outR[p] = h
        p += 1
    last = int(ks[-1])
    while done < last:
        m = min(chunk, last - done)
        us = rng.random(m)
        bL = np.empty(m)
        bR = np.empty(m)
        L, R = K.grow_light(us, float(n), L, R, bL, bR)
        hi = int(np.searchsorted(ks, done + m, side="right"))
        sel = ks[p:hi] - done - 1
        outL[p:hi] = bL[sel]
        outR[p:hi] = bR[sel]
        p = hi
        done += m
    return ks, outL, outR


# -- stopping times --------------------------------------------------------

def threshold_length(n):
    """``l(n) = (log n)^3 / sqrt(n)``."""
    return math.log(n) ** 3 / math.sqrt(n)


def first_stopping_time(n, seed, replica=0, max_steps=None, chunk=DEFAULT_CHUNK):
    """``T_1``: first step with ``lambda >= l(n)``, streamed without a trace.

    Returns ``None`` if ``max_steps`` (default ``ceil((log n)^7)``) pass first.
    Same random stream as :func:`run`.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    l_n = threshold_length(n)
    if max_steps is None:
        max_steps = math.ceil(math.log(n) ** 7)
    h = math.sqrt(1.0 / n)
    if 2 * h >= l_n:
        return 1
    rng = replica_rng(seed, replica)
    L = R = h
    done = 1
    while done < max_steps:
        m = min(chunk, max_steps - done)
        bL = np.empty(m)
        bR = np.empty(m)
        L, R = K.grow_light(rng.random(m), float(n), L, R, bL, bR)
        hit = np.flatnonzero(bL + bR >= l_n)
        if hit.size:
            return done + int(hit[0]) + 1
        done += m
    return None


@dataclass
class StoppingReport:
    l_n: float
    delta: float
    eps: float
    T: list
    S: dict
    windows: list = field(default_factory=list)
    reached: bool = True

    @property
    def increments(self):
        return np.diff(self.T)

    def window_hits(self):
        """For each ``k >= 2``: whether ``m_k <= T_k - T_{k-1} <= n_k``."""
        return [m <= dt <= nk for (m, nk), dt in zip(self.windows, self.increments)]

    def hit_rate(self):
        hits = self.window_hits()
        return float(np.mean(hits)) if hits else float("nan")


def default_t_grid(n, T, points=20):
    lo = max(math.log(n) ** 9 / n, 1e-3)
    if lo >= T:
        return [float(T)]
    return [float(v) for v in np.geomspace(lo, T, points)]


def _lam_array(trace_or_lam):
    if isinstance(trace_or_lam, Trace):
        if not trace_or_lam.full:
            raise ValueError("stopping times need a trace recorded at every step")
        return trace_or_lam.lam
    return np.asarray(trace_or_lam, dtype=np.float64)


def stopping_times(trace, delta, n=None, t_grid=None, eps=0.5):
    """Stopping times ``T_1, T_2, ...``, crossing steps ``S(t)`` and windows.

    ``trace`` is a full :class:`Trace` or a sequence ``lam[i] = lambda_{i+1}``
    (in which case ``n`` must be given; it may be non-integer).
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    lam = _lam_array(trace)
    if n is None:
        n = trace.n
    logn = math.log(n)
    l_n = logn ** 3 / math.sqrt(n)

    def first(th, start=0):
        i = int(np.searchsorted(lam[start:], th, side="left")) + start
        return i + 1 if i < lam.size else None

    Ts = []
    windows = []
    t1 = first(l_n)
    reached = t1 is not None
    if reached:
        Ts.append(t1)
        while True:
            prev = Ts[-1]
            nxt = first((1.0 + delta) * lam[prev - 1], prev - 1)
            if nxt is None:
                break
            base = lam[prev - 1] ** 2 * n / logn
            windows.append((2 * delta / (1 + eps) * base, 2 * delta * (1 + eps) * base))
            Ts.append(nxt)
    if t_grid is None:
        t_grid = default_t_grid(n, max(lam.size / n, 1.0 / n))
    S = {}
    for t in t_grid:
        S[float(t)] = first(math.sqrt(t * logn))
    return StoppingReport(l_n=l_n, delta=delta, eps=eps, T=Ts, S=S,
                          windows=windows, reached=reached)


# -- scaling laws ----------------------------------------------------------

class Ratios(NamedTuple):
    lam: float
    R: float
    L: float
    below_range: bool


def theorem_ratio(trace, t):
    """``lambda, R, L`` at step ``floor(n t)`` divided by ``sqrt(t log n)``.

    ``below_range`` flags ``t < (log n)^9 / n`` where no limit is claimed.
    """
    n = trace.n
    k = int(math.floor(n * t))
    if k > trace.steps:
        raise ValueError(f"t*n = {k} exceeds the trace length {trace.steps}")
    if k < 1:
        raise ValueError("t*n must be at least 1")
    L, R = trace.endpoints_at(k)
    return ratios_from_endpoints(L, R, n, t)


def ratios_from_endpoints(L, R, n, t):
    scale = math.sqrt(t * math.log(n))
    below = t < math.log(n) ** 9 / n
    if below:
        warnings.warn(f"t={t} is below (log n)^9/n; ratio reported without a limit claim",
                      stacklevel=3)
    return Ratios((L + R) / scale, R / scale, L / scale, below)


def ode_prediction(t, alpha0):
    """Solution of ``alpha' = 1/(8 alpha)``, ``alpha(0) = alpha0``: ``sqrt(t/4 + alpha0^2)``."""
    if t < 0 or alpha0 < 0:
        raise ValueError("t and alpha0 must be nonnegative")
    return math.sqrt(t / 4.0 + alpha0 * alpha0)


def ode_doubling_time(alpha0, delta):
    """Exact time for the ODE solution to grow from ``alpha0`` to ``(1+delta) alpha0``."""
    return 4.0 * alpha0 ** 2 * ((1.0 + delta) ** 2 - 1.0)


def fit_ode_constant(ts, lams, n):
    """Least-squares ``c`` in ``lambda_{nt}^2 ~ c t log n`` (fit through the origin)."""
    ts = np.asarray(ts, dtype=float)
    y = np.asarray(lams, dtype=float) ** 2
    xv = ts * math.log(n)
    return float(np.dot(xv, y) / np.dot(xv, xv))


# -- per-scale push statistics ---------------------------------------------

# exact integral of the (1/8)/(n^2 z^3) correction over a dyadic cell, per 1/(n^2 2^{3j})
MEAN_CORRECTION = 3.0 / 64.0
VAR_CONSTANT = 0.25


def predicted_push_mean(j, n):
    """Bracket ``(lo, hi)`` for the mean push of an attachment uniform in scale ``j``."""
    hi = math.log(2.0) / (n * 2.0 ** (j + 1))
    return hi - MEAN_CORRECTION / (n * n * 2.0 ** (3 * j)), hi


def predicted_push_var_bound(j, n):
    return VAR_CONSTANT / (n * n * 2.0 ** (2 * j))


class ScaleStats(NamedTuple):
    j: int
    count: int
    mean: float
    var: float
    mean_lo: float
    mean_hi: float
    var_bound: float


def scale_push_stats(ledger, n):
    """Empirical vs predicted push moments for every scale that received arrivals."""
    out = []
    tot = ledger.totals
    for i, j in enumerate(ledger.scales):
        c = int(ledger.counts[i + 1])
        if c == 0:
            continue
        mean = tot[i + 1] / c
        var = max(ledger.sqs[i + 1] / c - mean * mean, 0.0)
        lo, hi = predicted_push_mean(int(j), n)
        out.append(ScaleStats(int(j), c, float(mean), float(var), lo, hi,
                              predicted_push_var_bound(int(j), n)))
    return out


def conditioned_pushes(n, j, size, rng):
    """Right-front pushes for attachments uniform on the dyadic cell of scale ``j``.

    The distance ``d = R - x`` is uniform on ``[2^j, 2^{j+1})``; the push is
    computed with the engine's arithmetic at ``R = 0``.
    """
    d = math.ldexp(1.0, j) * (1.0 + rng.random(size))
    x = -d
    return x + np.sqrt(d * d + 1.0 / n)
