"""CLI surface: flag parsing, config files, output files."""

from pathlib import Path

import pytest

from polarec.cli import main
from polarec.experiment import (config_from_sources, load_config_file,
                                parse_alpha_grid)

DATA = Path(__file__).parent / "data"


def test_parse_alpha_grid_range():
    grid = parse_alpha_grid("0:1:0.25")
    assert grid == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_parse_alpha_grid_default_step_count():
    grid = parse_alpha_grid("0:1:0.05")
    assert len(grid) == 21 and grid[0] == 0.0 and grid[-1] == 1.0
    assert 0.1 in grid


def test_parse_alpha_grid_list():
    assert parse_alpha_grid("0,0.1,1") == [0.0, 0.1, 1.0]


def test_parse_alpha_grid_rejects_bad_step():
    with pytest.raises(ValueError):
        parse_alpha_grid("0:1:0")


def test_config_validation_rejects_unknowns():
    with pytest.raises(ValueError):
        config_from_sources(None, graph="xy")
    with pytest.raises(ValueError):
        config_from_sources(None, models="pm,warp")
    with pytest.raises(ValueError):
        config_from_sources({"no_such_key": "1"})


def test_config_file_then_flag_override(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        "dataset = /data/x.dat\n"
        "list-size = 20\n"
        "graph = ac\n"
        "# a comment\n"
        "alpha-grid = 0,1\n")
    values = load_config_file(cfg_file)
    cfg = config_from_sources(values, list_size=5)
    assert cfg.dataset == "/data/x.dat"
    assert cfg.list_size == 5           # flag wins over file
    assert cfg.graph == "ac"
    assert cfg.alpha_grid == [0.0, 1.0]


def test_cli_end_to_end(tmp_path, capsys):
    rc = main([
        "--dataset", str(DATA / "tiny_movielens.dat"),
        "--format", "movielens",
        "--train-fraction", "0.8",
        "--list-size", "3",
        "--models", "pm,hybrid,popularity",
        "--alpha-grid", "0,0.5,1",
        "--graph", "at",
        "--out", str(tmp_path),
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "eligible test users" in out
    metrics = (tmp_path / "metrics.csv").read_text().splitlines()
    assert len(metrics) == 1 + 1 + 3 + 1      # header + pm + 3 hybrid + popularity
    assert (tmp_path / "stats.txt").exists()
    for alpha in ("0.00", "0.50", "1.00"):
        assert (tmp_path / f"hist_hybrid_{alpha}.csv").exists()
    hist = (tmp_path / "hist_hybrid_0.00.csv").read_text().splitlines()
    assert hist[0] == "bin_low,bin_high,count"


def test_cli_missing_dataset_flag_errors(capsys):
    rc = main(["--models", "pm"])
    assert rc == 2
    assert "dataset" in capsys.readouterr().err


def test_cli_nonexistent_dataset_errors(tmp_path, capsys):
    rc = main(["--dataset", str(tmp_path / "nope.dat"), "--models", "pm"])
    assert rc == 2
    assert "not found" in capsys.readouterr().err


def test_cli_config_file_flag(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        f"dataset = {DATA / 'tiny_movielens.dat'}\n"
        "train-fraction = 0.8\n"
        "list-size = 3\n"
        "models = popularity\n"
        f"out = {tmp_path / 'out'}\n")
    rc = main(["--config", str(cfg_file)])
    assert rc == 0
    assert (tmp_path / "out" / "metrics.csv").exists()


def test_stats_txt_mentions_conventions(tmp_path):
    rc = main([
        "--dataset", str(DATA / "tiny_movielens.dat"),
        "--train-fraction", "0.8", "--list-size", "3",
        "--models", "popularity", "--out", str(tmp_path),
    ])
    assert rc == 0
    stats = (tmp_path / "stats.txt").read_text()
    assert "diversity_mode" in stats
    assert "entropy_base" in stats
    assert "top20pct_item_rating_share" in stats
