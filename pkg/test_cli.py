"""
Test script for the cornerflm command line
"""

import json

from click.testing import CliRunner

from cornerflm.config import Settings
from cornerflm.main import cli


def invoke(*args):
    return CliRunner().invoke(cli, list(args))


def test_verify_json():
    result = invoke("verify", "--model", "sq-selfdual", "--order", "7", "--format", "json")
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["order"] == "7"
    assert report["reports"][0]["agree"] is True
    assert report["limits"] == []


def test_verify_selected_limits():
    result = invoke("verify", "--model", "sq-selfdual", "--order", "4", "--format", "json",
                    "--limit", "js:surface:r=3:derived", "--limit", "sq-af:surface")
    assert result.exit_code == 0, result.output
    limits = {row["key"]: row for row in json.loads(result.stdout)["limits"]}
    assert limits["js:surface:r=3:derived"]["agree"] is True
    assert limits["sq-af:surface"]["agree"] is False


def test_asympt_square_corner():
    result = invoke("asympt", "--model", "sq-selfdual", "--target", "corner", "--central-charge", "1",
                    "--corners", "4xpi/2", "--no-numeric", "--format", "json")
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["classification"] == "divergent"
    assert report["C_over_pi2"] == "1/8"
    assert report["xi_coefficient_over_pi2"] == "1/2"
    assert report["numeric_A"] is None


def test_asympt_by_angle():
    result = invoke("asympt", "--model", "tri-chromatic", "--central-charge", "2", "--by-angle",
                    "--no-numeric", "--format", "json")
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["xi_by_angle"] == {"pi/3": "7/96", "2pi/3": "7/60"}


def test_asympt_needs_a_source():
    result = invoke("asympt", "--no-numeric")
    assert result.exit_code == 1


def test_cache_info_on_empty_directory(tmp_path):
    result = invoke("cache", "info", "--cache-dir", str(tmp_path / "empty"), "--format", "json")
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["entries"] == 0


def test_enumerate_small_lattice():
    result = invoke("enumerate", "--model", "sq-selfdual", "--size", "1x2", "--no-cache")
    assert result.exit_code == 0, result.output
    assert result.stdout.strip()


def test_unknown_model_exits_with_one():
    result = invoke("conjecture", "--model", "nope")
    assert result.exit_code == 1
    assert "InvalidConfigError" in result.output


def test_enumerate_with_decomposition_check():
    result = invoke("enumerate", "--model", "sq-selfdual", "--size", "2x3", "--check-cutoff", "6", "--no-cache")
    assert result.exit_code == 0, result.output
    assert "cutoff-6 decomposition" in result.stdout


def test_settings_read_prefixed_environment(monkeypatch):
    monkeypatch.setenv("CORNERFLM_THREADS", "3")
    monkeypatch.setenv("CORNERFLM_SHOW_PROGRESS", "true")
    fresh = Settings()
    assert fresh.threads == 3
    assert fresh.show_progress is True
    assert Settings.model_config["env_prefix"] == "CORNERFLM_"
