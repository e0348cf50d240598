"""Run configuration and on-disk formats.

All writers are byte-deterministic: floats are written with ``repr`` (the
shortest string that round-trips) and JSON keys keep insertion order.
"""

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .growth import Trace, scale_label


class ConfigError(ValueError):
    """Invalid or unreadable configuration; the CLI maps it to exit status 2."""


@dataclass
class RunConfig:
    n: int = 1000
    T: float = 1.0
    delta: float = 0.5
    epsilon: float = 0.5
    seed: int = 0
    replicas: int = 1
    t_grid: list = None
    envelope_eps: float = 1e-5
    envelope_points: int = 2000
    out_dir: str = "out"

    def __post_init__(self):
        self.validate()

    @property
    def steps(self):
        # n*T can land a hair above an integer in floating point
        v = self.n * self.T
        r = round(v)
        return int(r) if abs(v - r) < 1e-9 * max(1.0, v) else math.ceil(v)

    def validate(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if not self.T > 0:
            raise ConfigError(f"T must be positive, got {self.T!r}")
        if not 0 < self.delta <= 1:
            raise ConfigError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon!r}")
        if not isinstance(self.replicas, (int, np.integer)) or self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not self.envelope_eps > 0:
            raise ConfigError("envelope_eps must be positive")
        if self.envelope_points < 2:
            raise ConfigError("envelope_points must be >= 2")
        if self.t_grid is not None:
            if any(not t > 0 for t in self.t_grid):
                raise ConfigError("t_grid entries must be positive")
            self.t_grid = [float(t) for t in self.t_grid]

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        d = asdict(self)
        d["steps"] = self.steps
        return d


def load_config(path):
    """Read a JSON config file into a dict (validation happens in :class:`RunConfig`)."""
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(d, dict):
        raise ConfigError(f"malformed config {path}: top level must be an object")
    return d


def ensure_out_dir(path):
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {p}: {exc.strerror}") from exc
    if not os.access(p, os.W_OK):
        raise ConfigError(f"output directory {p} is not writable")
    return p


def _f(v):
    return repr(float(v))


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# -- traces ------------------------------------------------------------------

TRACE_HEADER = ("k", "x", "L", "R", "scale", "push_R", "push_L")


def write_trace_csv(trace: Trace, path):
    """One row per recorded step; ``scale`` is the right-front label."""
    xs = trace.attachments
    rows = (
        (int(k), _f(xs[k - 1]), _f(L), _f(R), scale_label(s), _f(pr), _f(pl))
        for k, L, R, s, pr, pl in zip(trace.k, trace.L, trace.R, trace.scale_R,
                                      trace.push_R, trace.push_L)
    )
    _write_rows(path, TRACE_HEADER, rows)


def read_trace_csv(path):
    """Columns of a trace CSV as arrays (``scale`` stays a list of labels)."""
    try:
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = tuple(next(r))
            if header != TRACE_HEADER:
                raise ConfigError(f"{path}: unexpected trace header {header}")
            rows = list(r)
    except OSError as exc:
        raise ConfigError(f"cannot read trace {path}: {exc.strerror}") from exc
    except StopIteration:
        raise ConfigError(f"{path}: empty trace file") from None
    cols = list(zip(*rows)) if rows else [()] * len(TRACE_HEADER)
    out = {"k": np.array(cols[0], dtype=np.int64), "scale": list(cols[4])}
    for name, col in zip(("x", "L", "R"), cols[1:4]):
        out[name] = np.array(col, dtype=np.float64)
    out["push_R"] = np.array(cols[5], dtype=np.float64)
    out["push_L"] = np.array(cols[6], dtype=np.float64)
    return out


def attachments_from_trace_csv(path):
    """Attachment sequence of a trace file recorded at every step."""
    cols = read_trace_csv(path)
    k = cols["k"]
    if k.size == 0 or not np.array_equal(k, np.arange(1, k.size + 1)):
        raise ConfigError(f"{path}: trace is thinned; the envelope needs every step")
    return cols["x"]


# -- other tables --------------------------------------------------------------

def write_envelope_csv(env, path):
    pts = env.points
    _write_rows(path, ("s", "re", "im"),
                ((_f(s), _f(p.real), _f(p.imag)) for s, p in zip(env.s, pts)))


def write_discrepancy_csv(rows, path):
    _write_rows(path, ("z_re", "z_im", "phi_minus_f", "f_minus_id"),
                ((_f(z.real), _f(z.imag), _f(a), _f(b)) for z, a, b in rows))


def write_disc_csv(result, path):
    _write_rows(path, ("k", "theta", "arc_lo", "arc_hi"),
                ((i + 1, _f(t), _f(a), _f(b))
                 for i, (t, a, b) in enumerate(zip(result.theta, result.arc_lo, result.arc_hi))))


def write_scales_csv(trace, path, n=None):
    from .growth import scale_push_stats

    n = trace.n if n is None else n
    rows = []
    for side, led in (("right", trace.right), ("left", trace.left)):
        rows.append((side, "min", led.count_min, _f(led.delta_min), "", "", "", ""))
        for s in scale_push_stats(led, n):
            rows.append((side, s.j, s.count, _f(s.mean * s.count), _f(s.mean), _f(s.mean_lo),
                         _f(s.mean_hi), _f(s.var_bound)))
        rows.append((side, "over", led.count_over, _f(led.delta_over), "", "", "", ""))
    _write_rows(path, ("side", "scale", "count", "delta", "mean", "pred_lo", "pred_hi",
                       "var_bound"), rows)


def write_curve_csv(header, rows, path):
    _write_rows(path, header, ([_f(v) if isinstance(v, float) else v for v in r] for r in rows))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def write_json(obj, path):
    text = json.dumps(_jsonable(obj), indent=2, allow_nan=False)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def trace_summary(trace, cfg=None):
    """Summary dict of a single run, keys in a fixed order."""
    from .growth import stopping_times

    n = trace.n
    L, R = float(trace.L[-1]), float(trace.R[-1])
    t = trace.steps / n
    scale = math.sqrt(t * math.log(n)) if n > 1 else math.nan
    out = {
        "n": n,
        "steps": trace.steps,
        "seed": trace.seed,
        "t": t,
        "L": L,
        "R": R,
        "lambda": L + R,
        "lambda_ratio": (L + R) / scale if scale else None,
        "R_ratio": R / scale if scale else None,
        "L_ratio": L / scale if scale else None,
        "ledger_right": {
            "min": trace.right.delta_min,
            **{str(j): v for j, v in trace.right.delta.items()},
            "over": trace.right.delta_over,
        },
        "ledger_left": {
            "min": trace.left.delta_min,
            **{str(j): v for j, v in trace.left.delta.items()},
            "over": trace.left.delta_over,
        },
    }
    if trace.full and n > 1:
        delta = cfg.delta if cfg else 0.5
        eps = cfg.epsilon if cfg else 0.5
        rep = stopping_times(trace, delta, t_grid=cfg.t_grid if cfg else None, eps=eps)
        out["stopping"] = {
            "l_n": rep.l_n,
            "delta": rep.delta,
            "T": rep.T,
            "S": {repr(k): v for k, v in rep.S.items()},
            "window_hit_rate": rep.hit_rate(),
        }
    return out
