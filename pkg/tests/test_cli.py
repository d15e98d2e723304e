# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import argparse

import pytest

from quad_rtd.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, cli_dispatch, parse_seeds


@pytest.fixture
def coarse_config(tmp_path) -> str:
    path = tmp_path / "coarse.txt"
    path.write_text("frs_dt = 0.1\nfrs_samples = 16\n", encoding="utf8")
    return str(path)


def test_no_command_is_a_usage_error() -> None:
    assert cli_dispatch([]) == EXIT_USAGE


def test_unknown_command_is_a_usage_error() -> None:
    assert cli_dispatch(["fly-to-the-moon"]) == EXIT_USAGE


def test_help_exits_cleanly(capsys) -> None:
    assert cli_dispatch(["--help"]) == EXIT_OK
    assert "compute-frs" in capsys.readouterr().out


def test_missing_frs_fails(tmp_path) -> None:
    assert cli_dispatch(["verify", "--quiet", "--frs", str(tmp_path / "none.json")]) == EXIT_FAILURE


def test_bad_config_value_fails(tmp_path) -> None:
    bad = tmp_path / "bad.txt"
    bad.write_text("mass = heavy\n", encoding="utf8")
    assert cli_dispatch(["compute-frs", "--quiet", "--config", str(bad), "--out", str(tmp_path / "f.json")]) == EXIT_FAILURE


def test_run_trial_in_table_mode_needs_a_table(tmp_path, coarse_config) -> None:
    frs_path = str(tmp_path / "frs.json")
    assert cli_dispatch(["compute-frs", "--quiet", "--config", coarse_config, "--out", frs_path]) == EXIT_OK
    assert cli_dispatch(["run-trial", "--quiet", "--config", coarse_config, "--frs", frs_path]) == EXIT_FAILURE


@pytest.mark.parametrize(
    "text, expected",
    [
        ("0..3", [0, 1, 2, 3]),
        ("7..7", [7]),
        ("1,5", [1, 5]),
        ("4", [4]),
    ],
)
def test_parse_seeds(text: str, expected: list[int]) -> None:
    assert parse_seeds(text) == expected


@pytest.mark.parametrize("text", ["a..b", "1,x", "0..1..2"])
def test_parse_seeds_rejects_garbage(text: str) -> None:
    with pytest.raises(argparse.ArgumentTypeError):
        parse_seeds(text)


def test_compute_frs_then_verify(tmp_path, coarse_config, capsys) -> None:
    frs_path = str(tmp_path / "frs.json")
    assert cli_dispatch(["compute-frs", "--quiet", "--config", coarse_config, "--out", frs_path]) == EXIT_OK
    argv = ["verify", "--quiet", "--config", coarse_config, "--frs", frs_path, "--scale", "0.01"]
    assert cli_dispatch([*argv, "--suite", "frs", "--suite", "cover"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "frs conservatism" in out


def test_frs_built_with_another_config_is_rejected(tmp_path, coarse_config) -> None:
    frs_path = str(tmp_path / "frs.json")
    assert cli_dispatch(["compute-frs", "--quiet", "--config", coarse_config, "--out", frs_path]) == EXIT_OK
    other = tmp_path / "other.txt"
    other.write_text("frs_dt = 0.1\nfrs_samples = 16\nv_max = 4\n", encoding="utf8")
    argv = ["verify", "--quiet", "--config", str(other), "--frs", frs_path, "--suite", "cover"]
    assert cli_dispatch(argv) == EXIT_FAILURE
