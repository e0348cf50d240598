import math
import pickle
import sys

import pytest

from constrained_hl.ensemble import EnsembleSummary, ReplicaFailed, ensemble, replica_summary
from constrained_hl.geometry import summarize
from constrained_hl.growth import run, theorem_ratio
from constrained_hl.io import RunConfig


def test_single_replica_matches_single_run():
    cfg = RunConfig(n=2000, T=1.0, seed=5, t_grid=[0.5, 1.0])
    summ = ensemble(cfg, workers=1)
    tr = run(2000, 2000, seed=5)
    for t in (0.5, 1.0):
        # small n sits outside the asymptotic regime and says so
        with pytest.warns(UserWarning):
            assert summ.lam[t] == [theorem_ratio(tr, t).lam]
    assert summ.pushes["min"] == [(tr.right.count_min, tr.right.delta_min)]


def test_merge_is_order_independent():
    cfg = RunConfig(n=1000, T=1.0, seed=2, t_grid=[0.5, 1.0])
    parts = [replica_summary(cfg, r) for r in range(4)]
    a = parts[0].merge(parts[1]).merge(parts[2]).merge(parts[3])
    b = parts[3].merge(parts[1]).merge(parts[0].merge(parts[2]))
    assert a == b
    assert a.to_dict() == b.to_dict()
    assert a.replicas == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        a.merge(EnsembleSummary(n=5, T=1.0))


def test_parallel_equals_sequential():
    cfg = RunConfig(n=1000, T=1.0, seed=9, replicas=3)
    assert ensemble(cfg, workers=2).to_dict() == ensemble(cfg, workers=1).to_dict()


def test_disc_mode_and_geometry():
    cfg = RunConfig(n=500, T=1.0, seed=1, replicas=2, envelope_points=200)
    d = ensemble(cfg, workers=1, disc_alpha=0.5)
    assert len(d.tau) + d.tau_missing == 2
    g = ensemble(cfg, workers=1, geometry=True)
    assert len(g.geometry["diameter_ratio"]) == 2


def test_replica_failure_is_reported_and_picklable(monkeypatch):
    e = pickle.loads(pickle.dumps(ReplicaFailed(3, 1, "boom")))
    assert (e.seed, e.replica, e.cause) == (3, 1, "boom")
    assert "replica 1" in str(e)

    E = sys.modules["constrained_hl.ensemble"]

    def fail(*a, **k):
        raise FloatingPointError("bad")
    monkeypatch.setattr(E, "run", fail)
    with pytest.raises(ReplicaFailed) as info:
        ensemble(RunConfig(n=100, seed=4), workers=1)
    assert info.value.seed == 4 and info.value.replica == 0


def test_geometry_ratio_uses_time_not_capacity():
    cfg = RunConfig(n=400, T=1.0, seed=3, envelope_points=300)
    s = replica_summary(cfg, 0, geometry=True)
    g = summarize(run(400, 400, seed=3).attachments, 400, eps=cfg.envelope_eps, m=300)
    assert s.geometry["diameter_ratio"] == [g.diameter / math.sqrt(math.log(400))]
