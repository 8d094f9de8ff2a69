import json

import pytest
from typer.testing import CliRunner

from speiser_escape.cli import app
from speiser_escape.commands import run_selftest

runner = CliRunner()


def _report(stdout: str) -> dict:
    assert "# effective config" in stdout
    return json.loads(stdout.split("# report\n", 1)[1])


@pytest.fixture
def write_config(tmp_path):
    def write(text: str, name: str = "run.conf"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


def test_dim_bound_command(write_config, tmp_path):
    config = write_config("cover = paper\nrho = 1.0\nescape_radius = 1e6\nlevels = 64\n")
    out = tmp_path / "bound.csv"
    result = runner.invoke(app, ["dim-bound", "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0
    report = _report(result.stdout)
    assert report["target"] == pytest.approx(1.0)
    assert report["gap"] < 0.01
    assert out.read_text().startswith("level,delta,diam,bound\n")


def test_dim_bound_output_is_deterministic(write_config, tmp_path):
    config = write_config("cover = wpexp\nescape_radius = 30\nlevels = 50\n")
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    runner.invoke(app, ["dim-bound", "-c", str(config), "-o", str(first)])
    runner.invoke(app, ["dim-bound", "-c", str(config), "-o", str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_counting_command(write_config, tmp_path):
    config = write_config(
        "variant = plain\nr_min = 5\nr_max = 50\nradii_per_decade = 16\nquadrature_points = 64\n"
    )
    out = tmp_path / "counting.csv"
    result = runner.invoke(app, ["counting", "-c", str(config), "-o", str(out)])
    assert result.exit_code == 0
    report = _report(result.stdout)
    assert report["slope"] == pytest.approx(2.0, abs=0.1)
    assert out.read_text().startswith("r,n,N,m,T\n")


def test_render_command(write_config, tmp_path):
    config = write_config(
        "variant = wp_exp\nx_min = 0\nx_max = 2\ny_min = -1\ny_max = 1\nresolution = 16\ncap = 4\n"
    )
    out = tmp_path / "field.ppm"
    result = runner.invoke(app, ["render", "-c", str(config), "-o", str(out)])
    assert result.exit_code == 0
    report = _report(result.stdout)
    assert (report["width"], report["height"]) == (16, 16)
    assert sum(report["counts"].values()) == 256
    assert out.read_bytes().startswith(b"P6\n16 16\n255\n")
    assert (tmp_path / "field.csv").read_text().startswith("x,y,depth\n")


def test_invalid_config_is_a_usage_error(write_config):
    config = write_config("rho = -2\n")
    assert runner.invoke(app, ["dim-bound", "-c", str(config)]).exit_code == 2


def test_missing_config_is_a_usage_error(tmp_path):
    result = runner.invoke(app, ["counting", "-c", str(tmp_path / "absent.conf")])
    assert result.exit_code == 2


def test_missing_sequence_file_fails(write_config, tmp_path):
    config = write_config(f"cover = file\nsequence_file = {tmp_path / 'absent.csv'}\n")
    result = runner.invoke(app, ["dim-bound", "-c", str(config), "-o", str(tmp_path / "x.csv")])
    assert result.exit_code == 1


def test_unknown_suite_is_a_usage_error():
    assert runner.invoke(app, ["selftest", "--suite", "nope"]).exit_code == 2
    with pytest.raises(ValueError, match="Unknown suite"):
        run_selftest("nope")


def test_covering_suite_passes():
    result = runner.invoke(app, ["selftest", "--suite", "covering"])
    assert result.exit_code == 0
    assert "covering" in result.stdout
    assert "PASS" in result.stdout


def test_tiny_branch_constant_fails_covering_suite():
    result = runner.invoke(app, ["selftest", "--suite", "covering", "--c1", "1e-6"])
    assert result.exit_code == 1
    assert "FAIL" in result.stdout
    (suite,) = run_selftest("covering", 1e-6)
    assert not suite.passed
    assert any("C1 = 1e-06" in failure for failure in suite.failures)


def test_cli_suite_passes():
    (suite,) = run_selftest("cli")
    assert suite.passed, suite.failures
