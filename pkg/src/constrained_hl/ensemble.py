"""Replicated runs and their order-independent reduction.

Every statistic is kept as a pool of per-replica samples. Merging two
summaries concatenates and sorts the pools, so the result does not depend on
which replica finished first; floating sums are only formed when a report
is requested, and then with ``math.fsum`` over the sorted pool.
"""

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .disc import disc_run
from .geometry import summarize
from .growth import default_t_grid, replay, run, stopping_times, theorem_ratio
from .io import RunConfig

QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


class ReplicaFailed(RuntimeError):
    def __init__(self, seed, replica, cause):
        # keep every argument in args so the exception survives pickling
        super().__init__(seed, replica, cause)
        self.seed = seed
        self.replica = replica
        self.cause = cause

    def __str__(self):
        return f"replica {self.replica} of seed {self.seed} failed: {self.cause}"


def _merge_pools(a, b):
    out = {}
    for key in sorted(set(a) | set(b), key=repr):
        out[key] = sorted(a.get(key, []) + b.get(key, []))
    return out


@dataclass
class EnsembleSummary:
    n: int
    T: float
    replicas: list = field(default_factory=list)   # sorted replica indices
    lam: dict = field(default_factory=dict)        # t -> lambda ratios
    right: dict = field(default_factory=dict)      # t -> R ratios
    left: dict = field(default_factory=dict)       # t -> L ratios
    pushes: dict = field(default_factory=dict)     # scale -> [(count, delta)]
    windows: list = field(default_factory=list)    # [(hits, total)]
    geometry: dict = field(default_factory=dict)   # name -> samples
    tau: list = field(default_factory=list)        # reached tau_alpha values
    tau_missing: int = 0

    def merge(self, other):
        if (self.n, self.T) != (other.n, other.T):
            raise ValueError("summaries describe different experiments")
        return EnsembleSummary(
            n=self.n, T=self.T,
            replicas=sorted(self.replicas + other.replicas),
            lam=_merge_pools(self.lam, other.lam),
            right=_merge_pools(self.right, other.right),
            left=_merge_pools(self.left, other.left),
            pushes=_merge_pools(self.pushes, other.pushes),
            windows=sorted(self.windows + other.windows),
            geometry=_merge_pools(self.geometry, other.geometry),
            tau=sorted(self.tau + other.tau),
            tau_missing=self.tau_missing + other.tau_missing,
        )

    def median(self, pool, t=None):
        vals = getattr(self, pool)
        if t is not None:
            vals = vals[t]
        return float(np.median(vals)) if len(vals) else math.nan

    def curve(self):
        """Rows ``(t, q10, median, q90)`` of the lambda ratio, plus R and L medians."""
        rows = []
        for t in sorted(self.lam):
            q = np.quantile(self.lam[t], [0.1, 0.5, 0.9])
            rows.append((t, float(q[0]), float(q[1]), float(q[2]),
                         float(np.median(self.right[t])), float(np.median(self.left[t]))))
        return rows

    def to_dict(self):
        def quant(v):
            if not len(v):
                return None
            return {f"q{int(round(q * 100)):02d}": float(x)
                    for q, x in zip(QUANTILES, np.quantile(v, QUANTILES))}

        d = {
            "n": self.n,
            "T": self.T,
            "replicas": len(self.replicas),
            "median_lambda_ratio": self.median("lam", max(self.lam)) if self.lam else None,
            "ratios": {repr(t): {"lambda": quant(self.lam[t]), "R": quant(self.right[t]),
                                 "L": quant(self.left[t])} for t in sorted(self.lam)},
            "pushes": {},
            "window_hit_rate": None,
            "geometry": {k: quant(v) for k, v in sorted(self.geometry.items())},
            "tau": {"samples": list(self.tau), "not_reached": self.tau_missing,
                    "median_over_n": (float(np.median(self.tau)) / self.n) if self.tau else None},
        }
        for j in sorted(self.pushes, key=lambda s: (isinstance(s, str), s)):
            pool = self.pushes[j]
            count = sum(c for c, _ in pool)
            total = math.fsum(v for _, v in pool)
            d["pushes"][str(j)] = {"count": count, "delta": total,
                                   "mean": total / count if count else None}
        hits = sum(h for h, _ in self.windows)
        tot = sum(t for _, t in self.windows)
        d["window_hit_rate"] = hits / tot if tot else None
        return d


def replica_summary(cfg: RunConfig, replica, geometry=False, disc_alpha=None):
    """Statistics of one replica (``(cfg.seed, replica)`` fixes the stream)."""
    n, steps = cfg.n, cfg.steps
    out = EnsembleSummary(n=n, T=cfg.T, replicas=[replica])
    if disc_alpha is not None:
        res = disc_run(n, cfg.seed, disc_alpha, replica=replica)
        if res.tau is None:
            out.tau_missing = 1
        else:
            out.tau = [res.tau]
        return out
    grid = cfg.t_grid or default_t_grid(n, cfg.T)
    grid = [t for t in grid if 1 <= math.floor(n * t) <= steps]
    trace = run(n, steps, cfg.seed, T=cfg.T, replica=replica,
                checkpoints=[math.floor(n * t) for t in grid])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t in grid:
            r = theorem_ratio(trace, t)
            out.lam[t] = [r.lam]
            out.right[t] = [r.R]
            out.left[t] = [r.L]
    led = trace.right
    out.pushes = {"min": [(led.count_min, led.delta_min)],
                  "over": [(led.count_over, led.delta_over)]}
    for j, v in led.delta.items():
        out.pushes[j] = [(led.count(j), v)]
    if n > 1:
        Ls, Rs = replay(trace.attachments, n)
        rep = stopping_times(Ls + Rs, cfg.delta, n=n, t_grid=grid, eps=cfg.epsilon)
        hits = rep.window_hits()
        out.windows = [(int(sum(hits)), len(hits))]
    if geometry:
        g = summarize(trace.attachments, n, eps=cfg.envelope_eps, m=cfg.envelope_points)
        # diameter scales with the time steps/n, not with the capacity g.t = steps/(2n)
        scale = math.sqrt(steps / n * math.log(n))
        out.geometry = {"diameter_ratio": [g.diameter / scale], "max_height": [g.max_height],
                        "hcap": [g.hcap_estimate]}
    return out


def _task(args):
    cfg_dict, replica, geometry, disc_alpha = args
    cfg = RunConfig.from_dict(cfg_dict)
    try:
        return replica_summary(cfg, replica, geometry, disc_alpha)
    except Exception as exc:  # surface the replica identity
        raise ReplicaFailed(cfg.seed, replica, repr(exc)) from exc


def ensemble(cfg: RunConfig, workers=None, geometry=False, disc_alpha=None):
    """Run ``cfg.replicas`` replicas and reduce them.

    ``workers`` defaults to the number of CPUs; one worker runs in-process.
    ``disc_alpha`` switches to the disc experiment and only collects tau.
    """
    if cfg.replicas < 1:
        raise ValueError("replicas must be >= 1")
    workers = workers or os.cpu_count() or 1
    d = {k: v for k, v in cfg.to_dict().items() if k != "steps"}
    tasks = [(d, r, geometry, disc_alpha) for r in range(cfg.replicas)]
    if workers == 1 or cfg.replicas == 1:
        parts = [_task(a) for a in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, cfg.replicas)) as ex:
            parts = list(ex.map(_task, tasks))
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    return total
