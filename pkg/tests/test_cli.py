"""Command-line interface: run, summarize, export-channels, validate-config."""

import numpy as np
import pytest
import yaml

from dmasim.channel import import_channel_file
from dmasim.cli import main

FAST = dict(
    frontends=["dma-lpm", "dpa"],
    n_drops=1,
    n_realizations=2,
    n_e=4,
    p_t_dbm=[10.0, 30.0],
    max_iter=10,
    n_restarts=2,
)


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "cfg.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(FAST, f)
    return str(path)


def test_validate_config_ok(cfg_file, capsys):
    assert main(["validate-config", cfg_file]) == 0
    assert "config ok" in capsys.readouterr().out


def test_validate_config_bad(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    with open(path, "w") as f:
        yaml.safe_dump({"frontends": ["nope"]}, f)
    assert main(["validate-config", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_run_and_summarize(cfg_file, tmp_path, capsys):
    out = str(tmp_path / "results.csv")
    assert main(["run", "-c", cfg_file, "-o", out]) == 0
    assert "wrote 8 rows" in capsys.readouterr().out
    assert main(["summarize", out]) == 0
    printed = capsys.readouterr().out
    assert "sum_rate_mean" in printed and "dma-lpm" in printed
    summary_csv = str(tmp_path / "summary.csv")
    assert main(["summarize", out, "-o", summary_csv]) == 0
    with open(summary_csv) as f:
        assert "sum_rate_mean" in f.readline()


def test_run_with_overrides(cfg_file, tmp_path, capsys):
    out = str(tmp_path / "results.csv")
    rc = main([
        "run", "-c", cfg_file, "-o", out,
        "--set", "n_realizations=1",
        "--set", "frontends=[dpa]",
    ])
    assert rc == 0
    assert "wrote 2 rows" in capsys.readouterr().out


def test_run_missing_config_errors(capsys):
    assert main(["run", "-c", "/does/not/exist.yaml"]) == 1
    assert "error:" in capsys.readouterr().err


def test_export_channels(cfg_file, tmp_path, capsys):
    out = str(tmp_path / "pool.dmch")
    rc = main(["export-channels", "-c", cfg_file, "-o", out, "--kind", "DMA", "--count", "4"])
    assert rc == 0
    assert "wrote 4 realizations" in capsys.readouterr().out
    pool = import_channel_file(out)
    assert len(pool) == 4
    assert pool[0].h.shape == (16, 1)


def test_bad_override_rejected(cfg_file):
    with pytest.raises(SystemExit):
        main(["run", "-c", cfg_file, "--set", "novalue"])
