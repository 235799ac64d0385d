from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ml_bler_monte_carlo
from shortcodes.codes import build_ebch
from shortcodes.errors import BracketFailure, ConfigInvalid
from shortcodes.harness import (BLOCK, ExperimentConfig, SimRecord, _Block, _fold, complexity_study, emit,
                                emit_complexity, records_from_csv, records_from_json, records_to_csv,
                                records_to_json, run_bler_point, snr_at, snr_for_target_bler, sweep)


def cfg(code, decoder=None, **kw):
    return ExperimentConfig(code, decoder or {"name": "osd", "order": code.k}, **kw)


def test_config_validation(ebch8):
    with pytest.raises(ConfigInvalid):
        cfg(ebch8, stop_errors=0)
    with pytest.raises(ConfigInvalid):
        cfg(ebch8, snr_grid=(1.0, 1.0))
    with pytest.raises(ConfigInvalid):
        cfg(ebch8, op_cap=-1)


def test_noiseless_channel_has_no_errors(ebch8):
    for dec in ({"name": "ml"}, {"name": "osd", "order": 0}, {"name": "grand"}, {"name": "scl", "L": 2}):
        rec = run_bler_point(cfg(ebch8, dec, max_trials=600), 60.0)
        assert (rec.errors, rec.trials, rec.stopped_by) == (0, 600, "max_trials")


def test_determinism_across_runs_and_workers(ebch8):
    c1 = cfg(ebch8, stop_errors=40, max_trials=5000, master_seed=3, snr_grid=(0.0, 1.0))
    c2 = cfg(ebch8, stop_errors=40, max_trials=5000, master_seed=3, snr_grid=(0.0, 1.0), workers=2)
    a, b, c = sweep(c1), sweep(c1), sweep(c2)
    assert a == b == c
    other = sweep(cfg(ebch8, stop_errors=40, max_trials=5000, master_seed=4, snr_grid=(0.0, 1.0)))
    assert other != a


def test_osd_bler_matches_ml_oracle(ebch8):
    rec = run_bler_point(cfg(ebch8, stop_errors=10**9, max_trials=100000), 2.0)
    ref, se_ref = ml_bler_monte_carlo(ebch8.G.to_array(), 2.0, 10**6, seed=17)
    se = math.sqrt(rec.bler * (1 - rec.bler) / rec.trials + se_ref**2)
    assert abs(rec.bler - ref) < 3 * se
    assert rec.ml_errors == rec.errors  # order-k OSD is ML


def test_sweep_shapes_and_monotone(ebch8):
    assert len(sweep(cfg(ebch8, snr_grid=(1.0,), stop_errors=20))) == 1
    recs = sweep(cfg(ebch8, snr_grid=(-2.0, 0.0, 2.0, 4.0), stop_errors=200))
    for a, b in zip(recs, recs[1:]):
        se = math.sqrt(a.bler * (1 - a.bler) / a.trials + b.bler * (1 - b.bler) / b.trials)
        assert b.bler <= a.bler + 3 * se
    for r in recs:
        assert r.ml_bound <= r.bler and r.errors >= 200


def test_sweep_skips_unmeasurable_points(ebch8):
    recs = sweep(cfg(ebch8, snr_grid=(0.0, 30.0), stop_errors=10, max_trials=1000))
    assert [r.esn0_db for r in recs] == [0.0]


def test_snr_search(ebch8):
    c = cfg(ebch8, {"name": "ml"}, stop_errors=100, max_trials=10**6)
    assert snr_for_target_bler(c, 1.0, bracket=(1.5, 3.0)) == 1.5
    hi = snr_for_target_bler(c, 1e-2, tol_db=0.1)
    lo = snr_for_target_bler(c, 1e-1, tol_db=0.1)
    assert lo < hi
    with pytest.raises(BracketFailure):
        snr_for_target_bler(cfg(ebch8, {"name": "grand"}, op_cap=1, max_trials=300), 1e-2, max_extend=0)


def test_op_cap_bounds_trial_cost():
    code = build_ebch(64, 51)
    cap = 20000
    rec = run_bler_point(cfg(code, {"name": "grand"}, op_cap=cap, stop_errors=30, max_trials=3000), 3.0)
    assert rec.abandoned_count > 0
    # the cap is checked between queries, so one query of at most n flips can overshoot it
    assert rec.max_ops_per_info_bit * code.k <= cap + code.n * (code.n - code.k) + 1
    assert rec.errors >= rec.abandoned_count


def blocks_from(errors, ml):
    out = []
    for i in range(0, len(errors), BLOCK):
        e = np.array(errors[i:i + BLOCK], bool)
        m = np.array(ml[i:i + BLOCK], bool) & e
        out.append(_Block(e, m, np.zeros(e.size, bool), np.ones(e.size, np.int64), np.ones(e.size, np.int64)))
    return out


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=900), st.integers(1, 50),
       st.integers(1, 1000))
def test_fold_stop_rule(events, stop, cap):
    errs = [e for e, _ in events]
    mls = [m for _, m in events]
    budget = [stop]
    rec = _fold(iter(blocks_from(errs, mls)), 1.0, 4, stop, min(cap, len(events)), budget)
    limit = min(cap, len(events))
    assert rec.errors >= stop or rec.trials == limit
    assert rec.trials <= limit
    assert rec.errors == sum(errs[: rec.trials])
    if rec.errors >= stop:
        assert rec.errors == stop and errs[rec.trials - 1]
    assert rec.ml_bound <= rec.bler
    assert rec.bler == pytest.approx(rec.errors / rec.trials)


def test_snr_at_interpolation():
    recs = [SimRecord(1.0, 10, 1, 1e-1, 0, 0, 0, 0, 0, 0), SimRecord(2.0, 10, 1, 1e-3, 0, 0, 0, 0, 0, 0)]
    assert snr_at(recs, 1e-2) == pytest.approx(1.5)
    assert math.isnan(snr_at(recs, 1e-5))


def test_emit_roundtrips(tmp_path, ebch8):
    recs = sweep(cfg(ebch8, snr_grid=(0.0, 1.0), stop_errors=10))
    records_to_csv([], tmp_path / "empty.csv")
    lines = (tmp_path / "empty.csv").read_text().splitlines()
    assert lines[0].startswith("# shortcodes") and lines[1].startswith("esn0_db,") and len(lines) == 2
    records_to_csv(recs, tmp_path / "r.csv")
    records_to_json(recs, tmp_path / "r.json", {"seed": 0})
    assert records_from_csv(tmp_path / "r.csv") == recs
    assert records_from_json(tmp_path / "r.json") == recs
    paths = emit(recs, tmp_path / "out", "s", config_echo=cfg(ebch8).echo())
    assert [p.suffix for p in paths] == [".csv", ".json", ".dat"]
    doc = json.loads(paths[1].read_text())
    assert doc["artifact_version"] and doc["config"]["master_seed"] == 0
    with pytest.raises(ConfigInvalid):
        emit(recs, tmp_path, "s", formats=("xml",))


def test_complexity_study_files(tmp_path, ebch8):
    curves = {"SCL": [{"name": "scl", "L": 1}, {"name": "scl", "L": 16}], "OSD": [{"name": "osd", "order": 4}]}
    pts = complexity_study(ebch8, curves, target=1e-2, stop_errors=50, tol_db=0.2)
    assert [p.label for p in pts] == ["SCL", "SCL", "OSD"]
    assert pts[1].snr_at_target <= pts[0].snr_at_target + 0.3
    paths = emit_complexity(pts, tmp_path, "fig")
    assert sorted(p.name for p in paths) == ["fig.json", "fig_osd.dat", "fig_scl.dat"]
    rows = (tmp_path / "fig_scl.dat").read_text().splitlines()
    assert rows[0].startswith("#") and len(rows) == 3
