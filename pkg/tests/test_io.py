import json

import numpy as np
import pytest

from constrained_hl import io
from constrained_hl.disc import disc_run
from constrained_hl.geometry import envelope
from constrained_hl.growth import run


def test_steps_rounding():
    assert io.RunConfig(n=100, T=1.0).steps == 100
    assert io.RunConfig(n=100, T=0.3).steps == 30  # 100 * 0.3 = 30.000000000000004
    assert io.RunConfig(n=7, T=0.5).steps == 4
    assert io.RunConfig(n=10**6, T=1.0).to_dict()["steps"] == 10**6


@pytest.mark.parametrize("bad", [
    {"n": 0}, {"n": 2.5}, {"T": 0}, {"delta": 0}, {"delta": 1.5}, {"epsilon": -1},
    {"replicas": 0}, {"seed": -1}, {"envelope_eps": 0}, {"envelope_points": 1},
    {"t_grid": [0.5, -1]}, {"colour": "blue"},
])
def test_config_validation(bad):
    with pytest.raises(io.ConfigError):
        io.RunConfig.from_dict(bad)


def test_config_round_trip_and_files(tmp_path):
    cfg = io.RunConfig(n=50, T=2.0, t_grid=[1, 2])
    assert cfg.t_grid == [1.0, 2.0]
    d = {k: v for k, v in cfg.to_dict().items() if k != "steps"}
    assert io.RunConfig.from_dict(d) == cfg
    p = tmp_path / "c.json"
    p.write_text(json.dumps(d))
    assert io.load_config(p) == d
    p.write_text("{not json")
    with pytest.raises(io.ConfigError):
        io.load_config(p)
    p.write_text("[1, 2]")
    with pytest.raises(io.ConfigError):
        io.load_config(p)
    with pytest.raises(io.ConfigError):
        io.load_config(tmp_path / "missing.json")


def test_out_dir_errors(tmp_path):
    f = tmp_path / "file"
    f.write_text("")
    with pytest.raises(io.ConfigError):
        io.ensure_out_dir(f / "sub")
    assert io.ensure_out_dir(tmp_path / "a" / "b").is_dir()


def test_trace_csv_round_trip(tmp_path):
    tr = run(200, 150, seed=3)
    p = tmp_path / "trace.csv"
    io.write_trace_csv(tr, p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(io.TRACE_HEADER) and len(lines) == 151
    cols = io.read_trace_csv(p)
    assert np.array_equal(cols["x"], tr.attachments)  # repr floats are exact
    assert np.array_equal(cols["L"], tr.L) and np.array_equal(cols["R"], tr.R)
    assert np.array_equal(io.attachments_from_trace_csv(p), tr.attachments)


def test_thinned_trace_is_rejected(tmp_path):
    tr = run(200, 150, seed=3, stride=10)
    p = tmp_path / "trace.csv"
    io.write_trace_csv(tr, p)
    with pytest.raises(io.ConfigError):
        io.attachments_from_trace_csv(p)
    (tmp_path / "bad.csv").write_text("a,b\n")
    with pytest.raises(io.ConfigError):
        io.read_trace_csv(tmp_path / "bad.csv")


def test_writers_are_byte_deterministic(tmp_path):
    cfg = io.RunConfig(n=300, T=1.0)

    def write(d):
        d.mkdir()
        tr = run(300, 300, seed=1)
        io.write_trace_csv(tr, d / "t.csv")
        io.write_scales_csv(tr, d / "s.csv")
        io.write_json({"run": io.trace_summary(tr, cfg), "x": float("nan")}, d / "j.json")
        io.write_envelope_csv(envelope(tr.attachments[:50], 300, m=200), d / "e.csv")
        io.write_disc_csv(disc_run(300, 1, 0.5), d / "d.csv")
        return {f.name: f.read_bytes() for f in sorted(d.iterdir())}

    a, b = write(tmp_path / "a"), write(tmp_path / "b")
    assert a == b
    assert json.loads(a["j.json"])["x"] is None


def test_trace_summary_keys():
    tr = run(1000, 1000, seed=0)
    s = io.trace_summary(tr, io.RunConfig(n=1000))
    assert s["lambda"] == pytest.approx(s["L"] + s["R"])
    assert s["steps"] == 1000 and "ledger_right" in s
