"""Experiment configuration, trial loop, CSV output, summaries, channel pairing."""

import os

import numpy as np
import pandas as pd
import pytest
import yaml

from dmasim import geometry as geo
from dmasim.channel import export_channels
from dmasim.errors import ConfigurationError
from dmasim.harness import (
    ExperimentConfig,
    _trial_channels,
    bootstrap_mean_gt,
    build_context,
    generate_channel_pool,
    result_columns,
    run_experiment,
    summarize,
    write_csv,
)

# keep test experiments small; physics defaults stay untouched
FAST = dict(
    frontends=["dma-lpm", "dpa"],
    n_drops=1,
    n_realizations=2,
    n_e=4,
    p_t_dbm=[10.0, 30.0],
    max_iter=10,
    n_restarts=2,
)


def test_config_defaults_valid():
    cfg = ExperimentConfig()
    cfg.validate()
    assert cfg.wavelength == pytest.approx(299792458.0 / 3e9)


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigurationError, match="unknown config keys"):
        ExperimentConfig.from_dict({"bandwith": 1e6})


def test_config_rejects_bad_values():
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"frontends": ["ris"]})
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"p_t_dbm": []})
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"k": 0})
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"mapper": "XYZ"})
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"channel_source": "file"})  # no file given


def test_config_yaml_roundtrip(tmp_path):
    cfg = ExperimentConfig(**FAST)
    path = tmp_path / "cfg.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(cfg.to_dict(), f)
    back = ExperimentConfig.from_yaml(str(path))
    assert back == cfg


def test_run_experiment_shape():
    cfg = ExperimentConfig(**FAST)
    res = run_experiment(cfg)
    # one row per (drop, realization, frontend, power point)
    assert len(res.rows) == 1 * 2 * 2 * 2
    assert res.aborts == []
    cols = result_columns(cfg)
    for row in res.rows:
        assert set(row.keys()) == set(cols)
        assert row["sum_rate"] >= 0.0
        assert row["power_w"] > 0.0


def test_rates_increase_with_power():
    cfg = ExperimentConfig(**FAST)
    df = pd.DataFrame(run_experiment(cfg).rows)
    for (_, _, fe), grp in df.groupby(["drop", "realization", "frontend"]):
        ordered = grp.sort_values("p_t_dbm")["sum_rate"].to_numpy()
        assert ordered[0] <= ordered[1]


def test_determinism_and_csv(tmp_path):
    cfg = ExperimentConfig(**FAST)
    p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    write_csv(run_experiment(cfg), p1)
    write_csv(run_experiment(cfg), p2)
    with open(p1, "rb") as f1, open(p2, "rb") as f2:
        assert f1.read() == f2.read()
    assert os.path.exists(p1 + ".config.yaml")
    snap = yaml.safe_load(open(p1 + ".config.yaml"))
    assert snap["master_seed"] == cfg.master_seed


def test_seed_changes_results():
    cfg_a = ExperimentConfig(**FAST)
    cfg_b = ExperimentConfig(**{**FAST, "master_seed": 999})
    ra = [r["sum_rate"] for r in run_experiment(cfg_a).rows]
    rb = [r["sum_rate"] for r in run_experiment(cfg_b).rows]
    assert ra != rb


def test_channel_pairing_across_frontend_sets():
    # the DMA channel draw for trial (d, r) must not depend on which other
    # front-ends are being simulated
    cfg_a = ExperimentConfig(**{**FAST, "frontends": ["dma-lpm"]})
    cfg_b = ExperimentConfig(**{**FAST, "frontends": ["dma-lpm", "dpa"]})
    ctx_a, ctx_b = build_context(cfg_a), build_context(cfg_b)
    from dmasim.channel import draw_user_drop

    drop = draw_user_drop(1, cfg_a.carrier_frequency, np.random.default_rng(0))
    ha = _trial_channels(ctx_a, drop, 0, 0)[geo.DMA].h
    hb = _trial_channels(ctx_b, drop, 0, 0)[geo.DMA].h
    assert np.array_equal(ha, hb)


def test_parallel_matches_serial():
    cfg_s = ExperimentConfig(**FAST)
    cfg_p = ExperimentConfig(**{**FAST, "n_jobs": 2})
    rows_s = run_experiment(cfg_s).rows
    rows_p = run_experiment(cfg_p).rows
    pd.testing.assert_frame_equal(pd.DataFrame(rows_s), pd.DataFrame(rows_p))


def test_summarize():
    cfg = ExperimentConfig(**FAST)
    res = run_experiment(cfg)
    table = summarize(res)
    assert {"frontend", "p_t_dbm", "sum_rate_mean", "sum_rate_stderr"} <= set(table.columns)
    # 2 frontends x 2 power points
    assert len(table) == 4
    assert (table["sum_rate_count"] == 2).all()
    with pytest.raises(ConfigurationError):
        summarize([])


def test_summarize_from_csv(tmp_path):
    cfg = ExperimentConfig(**FAST)
    path = str(tmp_path / "r.csv")
    write_csv(run_experiment(cfg), path)
    table = summarize(path)
    assert len(table) == 4


def test_channel_file_source(tmp_path):
    cfg = ExperimentConfig(**{**FAST, "frontends": ["dma-lpm"]})
    pool = generate_channel_pool(cfg, geo.DMA, 3)
    assert len(pool) == 3 and pool[0].shape == (16, 1)
    path = str(tmp_path / "pool.dmch")
    export_channels(path, pool)
    cfg_file = ExperimentConfig(
        **{**FAST, "frontends": ["dma-lpm"], "channel_source": "file", "channel_file": path}
    )
    res = run_experiment(cfg_file)
    assert len(res.rows) == 1 * 2 * 1 * 2
    assert res.aborts == []


def test_channel_file_wrong_size(tmp_path):
    cfg = ExperimentConfig(**{**FAST, "frontends": ["dma-lpm"]})
    pool = [np.ones((5, 1), dtype=complex)]
    path = str(tmp_path / "bad.dmch")
    export_channels(path, pool)
    cfg_file = ExperimentConfig(
        **{**FAST, "frontends": ["dma-lpm"], "channel_source": "file", "channel_file": path}
    )
    from dmasim.errors import ChannelFileError

    with pytest.raises(ChannelFileError):
        run_experiment(cfg_file)


def test_bootstrap_mean_gt():
    rng = np.random.default_rng(0)
    hi = rng.normal(10.0, 1.0, size=200)
    lo = rng.normal(5.0, 1.0, size=200)
    assert bootstrap_mean_gt(hi, lo)
    assert not bootstrap_mean_gt(lo, hi)
    same = rng.normal(0.0, 1.0, size=200)
    assert not bootstrap_mean_gt(same, same)
