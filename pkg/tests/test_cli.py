# Copyright 2025 deep-bi
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import logging
import os

import numpy as np
import pytest
from click.testing import CliRunner

from sst_bridge import cli, ortho_design


def _read_json(path):
    with open(path) as f:
        return json.load(f)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def sweep_csv(runner, config_file, tmp_path):
    out_dir = tmp_path / "sweep"
    result = runner.invoke(cli.cli, ["sweep", "--config", config_file, "--out", str(out_dir)])
    assert result.exit_code == 0, result.output
    return str(out_dir / "sweep.csv")


def _denoise(runner, signal, out_dir, *options):
    args = ["denoise", "--signal", signal, *options, "--out", str(out_dir)]
    return runner.invoke(cli.cli, args)


def _select(runner, signal, out_dir, *options):
    args = ["select", "--signal", signal, *options, "--out", str(out_dir)]
    return runner.invoke(cli.cli, args)


def test_cli_verbose_flag_enables_debug_logging(mocker, runner):
    """Test that --verbose flag enables debug logging."""
    setup_logging_mock = mocker.patch("sst_bridge.logger.setup_logging")

    runner.invoke(cli.cli, ["--verbose", "sweep", "--help"])

    setup_logging_mock.assert_called_once_with(level=logging.DEBUG)


def test_cli_without_verbose_uses_info_logging(mocker, runner):
    """Test that CLI without --verbose uses INFO level logging."""
    setup_logging_mock = mocker.patch("sst_bridge.logger.setup_logging")

    runner.invoke(cli.cli, ["sweep", "--help"])

    setup_logging_mock.assert_called_once_with()


def test_cli_main_group_requires_subcommand(runner):
    result = runner.invoke(cli.cli, [])
    assert result.exit_code in (0, 2)
    assert "Usage:" in result.output


class TestDenoise:
    def test_hard_thresholding_keeps_constant_signal(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))
        out_dir = tmp_path / "out"

        result = _denoise(
            runner, signal, out_dir, "--method", "ht", "--lambda", "0.5", "--sigma2", "0"
        )

        assert result.exit_code == 0, result.output
        np.testing.assert_allclose(
            ortho_design.read_vector_csv(str(out_dir / "denoised.csv")), np.ones(16), atol=1e-12
        )
        payload = _read_json(out_dir / "report.json")
        assert payload["k_hat"] == 1
        assert payload["active_set"] == [1]
        assert payload["sure_report"] is None
        assert payload["design"] == ortho_design.BUILTIN_TRIG

    def test_hard_thresholding_warns_that_sure_is_missing(
        self, mocker, runner, signal_file, tmp_path
    ):
        warning_mock = mocker.patch("sst_bridge.logger.warning")
        signal = signal_file(np.ones(16))

        result = _denoise(
            runner, signal, tmp_path / "out", "--method", "ht", "--lambda", "0.5", "--sigma2", "1"
        )

        assert result.exit_code == 0, result.output
        warning_mock.assert_called_once()
        assert "no data-driven SURE" in warning_mock.call_args.args[0]

    def test_soft_thresholding_shrinks_constant_signal(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))
        out_dir = tmp_path / "out"

        result = _denoise(
            runner, signal, out_dir, "--method", "st", "--lambda", "0.5", "--sigma2", "0"
        )

        assert result.exit_code == 0, result.output
        denoised = ortho_design.read_vector_csv(str(out_dir / "denoised.csv"))
        np.testing.assert_allclose(denoised, 0.5 * np.ones(16), atol=1e-12)
        coefficients = ortho_design.read_vector_csv(str(out_dir / "coefficients.csv"))
        assert coefficients[0] == pytest.approx(0.5)
        payload = _read_json(out_dir / "report.json")
        assert payload["k_hat"] == 1
        assert payload["sigma2_source"] == "known"
        assert payload["sure_report"]["dof"]["total"] == 0.0

    def test_zero_signal_gives_zero_output_and_negative_sure(self, runner, signal_file, tmp_path):
        signal = signal_file(np.zeros(16))
        out_dir = tmp_path / "out"

        result = _denoise(
            runner,
            signal,
            out_dir,
            "--method",
            "sst",
            "--lambda",
            "0.3",
            "--m",
            "5",
            "--sigma2",
            "1",
            "--sure",
        )

        assert result.exit_code == 0, result.output
        assert np.all(ortho_design.read_vector_csv(str(out_dir / "denoised.csv")) == 0.0)
        payload = _read_json(out_dir / "report.json")
        assert payload["sure_report"]["sure"] == pytest.approx(-1.0)
        assert payload["rule"] == {"method": "sst", "lambda": 0.3, "m": 5}

    def test_estimated_noise_is_reported(self, runner, signal_file, tmp_path, rng):
        signal = signal_file(rng.standard_normal(16))
        out_dir = tmp_path / "out"

        result = _denoise(runner, signal, out_dir, "--method", "ng", "--lambda", "0.2")

        assert result.exit_code == 0, result.output
        payload = _read_json(out_dir / "report.json")
        assert payload["sigma2_source"] == "estimated"
        assert payload["sigma2"] > 0.0

    def test_even_scaled_soft_order_exits_2(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))

        result = _denoise(
            runner, signal, tmp_path / "out", "--method", "sst", "--lambda", "0.5", "--m", "4"
        )

        assert result.exit_code == 2
        assert "m must be odd" in result.output

    def test_missing_lambda_exits_2(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))

        result = runner.invoke(
            cli.cli, ["denoise", "--signal", signal, "--method", "st", "--out", str(tmp_path)]
        )

        assert result.exit_code == 2
        assert "lambda must be positive" in result.output

    def test_sure_for_hard_thresholding_exits_4(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))

        result = _denoise(
            runner, signal, tmp_path / "out", "--method", "ht", "--lambda", "0.5", "--sure"
        )

        assert result.exit_code == 4
        assert "SURE NOT AVAILABLE" in result.output

    def test_missing_signal_file_exits_3(self, runner, tmp_path):
        missing = str(tmp_path / "nope.csv")

        result = _denoise(runner, missing, tmp_path / "out", "--method", "st", "--lambda", "0.5")

        assert result.exit_code == 3
        assert "INPUT FILE ERROR" in result.output

    def test_odd_length_signal_exits_3(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(7))

        result = _denoise(runner, signal, tmp_path / "out", "--method", "st", "--lambda", "0.5")

        assert result.exit_code == 3

    def test_design_of_wrong_size_exits_3(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))
        design_path = str(tmp_path / "design.csv")
        ortho_design.save_design(ortho_design.build_trig_design(8), design_path)

        result = _denoise(
            runner, signal, tmp_path, "--method", "st", "--lambda", "0.5", "--design", design_path
        )

        assert result.exit_code == 3
        assert "LENGTH MISMATCH" in result.output

    def test_non_orthogonal_design_exits_3(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(4))
        design_path = tmp_path / "eye.csv"
        design_path.write_text("1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n")
        design = str(design_path)

        result = _denoise(
            runner, signal, tmp_path, "--method", "st", "--lambda", "0.5", "--design", design
        )

        assert result.exit_code == 3
        assert "DESIGN NOT ORTHOGONAL" in result.output

    def test_user_design_is_used(self, runner, signal_file, tmp_path):
        design = ortho_design.build_trig_design(8)
        design_path = str(tmp_path / "design.csv")
        ortho_design.save_design(design, design_path)
        signal = signal_file(ortho_design.synthesize(design, [0, 0, 2.0, 0, 0, 0, 0, 0]))
        out_dir = tmp_path / "out"

        result = _denoise(
            runner, signal, out_dir, "--method", "ht", "--lambda", "1", "--design", design_path
        )

        assert result.exit_code == 0, result.output
        payload = _read_json(out_dir / "report.json")
        assert payload["design"] == ortho_design.USER_LOADED
        assert payload["active_set"] == [3]

    def test_bad_sigma2_value_exits_2(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))

        result = _denoise(
            runner, signal, tmp_path, "--method", "st", "--lambda", "0.5", "--sigma2", "loud"
        )

        assert result.exit_code == 2


class TestSelect:
    def test_soft_thresholding_grid_pick(self, runner, signal_file, tmp_path):
        design = ortho_design.build_trig_design(4)
        signal = signal_file(ortho_design.synthesize(design, [3.0, 0.0, 0.0, 0.0]))
        out_dir = tmp_path / "out"

        result = _select(
            runner, signal, out_dir, "--method", "st", "--lambda-grid", "1,2", "--sigma2", "1"
        )

        assert result.exit_code == 0, result.output
        payload = _read_json(out_dir / "selection.json")
        assert payload["rule"] == {"method": "st", "lambda": 1.0}
        assert payload["sure"] == pytest.approx(0.5)
        assert payload["searched"] == 2
        assert payload["n"] == 4

    def test_scaled_soft_uses_default_grids(self, runner, signal_file, tmp_path, rng):
        signal = signal_file(rng.standard_normal(16))
        out_dir = tmp_path / "out"

        result = runner.invoke(
            cli.cli, ["select", "--signal", signal, "--method", "sst", "--out", str(out_dir)]
        )

        assert result.exit_code == 0, result.output
        payload = _read_json(out_dir / "selection.json")
        assert payload["searched"] == 18 * 6
        assert payload["rule"]["m"] in (1, 3, 5, 7, 9, 11)
        assert os.path.exists(out_dir / "denoised.csv")

    def test_hard_thresholding_uses_universal_threshold(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))
        out_dir = tmp_path / "out"

        result = _select(runner, signal, out_dir, "--method", "ht", "--sigma2", "1")

        assert result.exit_code == 0, result.output
        payload = _read_json(out_dir / "selection.json")
        assert payload["sure"] is None
        assert payload["rule"]["lambda"] == pytest.approx(np.sqrt(2 * np.log(16) / 16))

    def test_even_order_in_grid_exits_2(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))

        result = _select(
            runner, signal, tmp_path / "out", "--method", "sst", "--m-grid", "1,2", "--sigma2", "1"
        )

        assert result.exit_code == 2
        assert "m must be odd" in result.output

    @pytest.mark.parametrize("m_grid", ["3.5", "3,5.5", "inf"])
    def test_should_reject_fractional_order_in_grid(self, runner, signal_file, tmp_path, m_grid):
        signal = signal_file(np.ones(16))
        out_dir = tmp_path / "out"

        result = _select(
            runner, signal, out_dir, "--method", "sst", "--m-grid", m_grid, "--sigma2", "1"
        )

        assert result.exit_code == 2
        assert "list of integers" in result.output
        assert not out_dir.exists()

    def test_should_accept_integral_float_orders_in_grid(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))
        out_dir = tmp_path / "out"

        result = _select(
            runner, signal, out_dir, "--method", "sst", "--m-grid", "3.0", "--sigma2", "1"
        )

        assert result.exit_code == 0, result.output
        assert _read_json(out_dir / "selection.json")["rule"]["m"] == 3

    def test_noise_free_estimate_for_universal_threshold_exits_3(
        self, runner, signal_file, tmp_path
    ):
        signal = signal_file(np.zeros(16))

        result = _select(runner, signal, tmp_path / "out", "--method", "ht")

        assert result.exit_code == 3

    def test_malformed_grid_exits_2(self, runner, signal_file, tmp_path):
        signal = signal_file(np.ones(16))

        result = _select(
            runner, signal, tmp_path / "out", "--method", "st", "--lambda-grid", "0.1,x"
        )

        assert result.exit_code == 2


class TestSweep:
    def test_sweep_writes_csv_and_json(self, runner, config_file, tmp_path):
        out_dir = tmp_path / "out"

        result = runner.invoke(cli.cli, ["sweep", "--config", config_file, "--out", str(out_dir)])

        assert result.exit_code == 0, result.output
        lines = (out_dir / "sweep.csv").read_text().splitlines()
        assert lines[0].startswith("lambda,method,risk_mean,risk_sd,sure_mean,dof1_mean")
        assert len(lines) == 1 + 3 * 3
        payload = _read_json(out_dir / "sweep.json")
        assert payload["kind"] == "sweep"
        assert payload["trials"] == 20
        assert payload["seed"] == 7

    def test_same_seed_gives_identical_files(self, runner, config_file, tmp_path):
        for name in ("a", "b"):
            result = runner.invoke(
                cli.cli, ["sweep", "--config", config_file, "--out", str(tmp_path / name)]
            )
            assert result.exit_code == 0, result.output

        assert (tmp_path / "a" / "sweep.csv").read_bytes() == (
            tmp_path / "b" / "sweep.csv"
        ).read_bytes()
        assert (tmp_path / "a" / "sweep.json").read_bytes() == (
            tmp_path / "b" / "sweep.json"
        ).read_bytes()

    def test_worker_count_does_not_change_output(self, runner, config_file, tmp_path):
        base = ["sweep", "--config", config_file]

        serial = runner.invoke(cli.cli, [*base, "--out", str(tmp_path / "serial")])
        parallel = runner.invoke(
            cli.cli, [*base, "--workers", "3", "--out", str(tmp_path / "parallel")]
        )

        assert serial.exit_code == parallel.exit_code == 0
        assert (tmp_path / "serial" / "sweep.csv").read_bytes() == (
            tmp_path / "parallel" / "sweep.csv"
        ).read_bytes()

    def test_seed_override_changes_output(self, runner, config_file, tmp_path):
        runner.invoke(cli.cli, ["sweep", "--config", config_file, "--out", str(tmp_path / "a")])
        runner.invoke(
            cli.cli,
            ["sweep", "--config", config_file, "--seed", "8", "--out", str(tmp_path / "b")],
        )

        assert (tmp_path / "a" / "sweep.csv").read_bytes() != (
            tmp_path / "b" / "sweep.csv"
        ).read_bytes()
        assert _read_json(tmp_path / "b" / "sweep.json")["seed"] == 8

    def test_fig2_preset_has_row_per_lambda_and_method(self, runner, tmp_path):
        out_dir = tmp_path / "out"

        result = runner.invoke(
            cli.cli, ["sweep", "--preset", "fig2", "--trials", "3", "--out", str(out_dir)]
        )

        assert result.exit_code == 0, result.output
        lines = (out_dir / "sweep.csv").read_text().splitlines()
        assert len(lines) == 1 + 37 * 3
        assert {line.split(",")[1] for line in lines[1:]} == {"ht", "st", "sst(m=21)"}

    def test_missing_config_file_exits_3(self, runner, tmp_path):
        result = runner.invoke(
            cli.cli,
            ["sweep", "--config", "/nonexistent/config.yaml", "--out", str(tmp_path)],
        )

        assert result.exit_code == 3
        assert "CONFIG FILE NOT FOUND" in result.output

    def test_invalid_yaml_exits_3(self, runner, invalid_yaml_file, tmp_path):
        result = runner.invoke(
            cli.cli, ["sweep", "--config", invalid_yaml_file, "--out", str(tmp_path)]
        )

        assert result.exit_code == 3
        assert "CONFIGURATION ERROR" in result.output

    def test_incomplete_config_exits_3(self, runner, tmp_path):
        config_path = tmp_path / "partial.yaml"
        config_path.write_text("n: 16\nsigma2: 1.0\n")

        result = runner.invoke(
            cli.cli, ["sweep", "--config", str(config_path), "--out", str(tmp_path / "out")]
        )

        assert result.exit_code == 3
        assert "Missing required config field: true_coeffs" in result.output

    def test_requires_config_or_preset(self, runner, tmp_path):
        result = runner.invoke(cli.cli, ["sweep", "--out", str(tmp_path)])

        assert result.exit_code == 2
        assert "Provide --config or --preset" in result.output


class TestMonteCarlo:
    def test_case1_preset_writes_one_row_per_method(self, runner, tmp_path):
        out_dir = tmp_path / "out"

        result = runner.invoke(
            cli.cli, ["montecarlo", "--preset", "case1", "--trials", "10", "--out", str(out_dir)]
        )

        assert result.exit_code == 0, result.output
        lines = (out_dir / "selection.csv").read_text().splitlines()
        assert lines[0] == "method,risk_mean,risk_sd,khat_mean,khat_sd,serr_mean,serr_sd"
        assert [line.split(",")[0] for line in lines[1:]] == ["ht", "st", "ft", "sst"]
        payload = _read_json(out_dir / "selection.json")
        assert payload["config"]["preset"] == "case1"
        assert payload["trials"] == 10

    def test_case2_quick_mode_reports_spreads(self, runner, tmp_path):
        out_dir = tmp_path / "out"

        result = runner.invoke(
            cli.cli, ["montecarlo", "--preset", "case2", "--quick", "--out", str(out_dir)]
        )

        assert result.exit_code == 0, result.output
        payload = _read_json(out_dir / "selection.json")
        assert payload["trials"] == 200
        for stats in payload["methods"]:
            assert stats["risk_sd"] > 0.0
            assert stats["khat_sd"] > 0.0

    def test_invalid_preset_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            cli.cli, ["montecarlo", "--preset", "table9", "--out", str(tmp_path)]
        )

        assert result.exit_code == 2
        assert "UNKNOWN PRESET" in result.output

    def test_config_file_with_preset_override(self, runner, tmp_path):
        config_path = tmp_path / "exp.json"
        config_path.write_text(json.dumps({"preset": "case1", "trials": 6, "methods": ["st"]}))
        out_dir = tmp_path / "out"

        result = runner.invoke(
            cli.cli, ["montecarlo", "--config", str(config_path), "--out", str(out_dir)]
        )

        assert result.exit_code == 0, result.output
        lines = (out_dir / "selection.csv").read_text().splitlines()
        assert len(lines) == 2


class TestPlot:
    def test_dof_chart_has_all_series(self, runner, sweep_csv, tmp_path):
        out_svg = tmp_path / "dof.svg"

        result = runner.invoke(
            cli.cli, ["plot", "--csv", sweep_csv, "--kind", "dof", "--out", str(out_svg)]
        )

        assert result.exit_code == 0, result.output
        svg = out_svg.read_text()
        for name in ("d1", "d2", "d1+d2", "ht_d2_theory"):
            assert f">{name}</text>" in svg
        assert "sst(m=3)" in svg

    def test_risk_chart_pairs_risk_and_sure(self, runner, sweep_csv, tmp_path):
        out_svg = tmp_path / "charts" / "risk.svg"

        result = runner.invoke(
            cli.cli, ["plot", "--csv", sweep_csv, "--kind", "risk", "--out", str(out_svg)]
        )

        assert result.exit_code == 0, result.output
        svg = out_svg.read_text()
        assert ">risk ht</text>" in svg
        assert ">sure st</text>" in svg
        assert ">sure ht</text>" not in svg

    def test_same_input_gives_identical_svg(self, runner, sweep_csv, tmp_path):
        for name in ("a.svg", "b.svg"):
            out_svg = str(tmp_path / name)
            runner.invoke(cli.cli, ["plot", "--csv", sweep_csv, "--kind", "dof", "--out", out_svg])

        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_empty_csv_exits_3(self, runner, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")

        out_svg = str(tmp_path / "x.svg")

        result = runner.invoke(
            cli.cli, ["plot", "--csv", str(empty), "--kind", "dof", "--out", out_svg]
        )

        assert result.exit_code == 3
        assert "NOT A SWEEP CSV" in result.output

    def test_unknown_curve_exits_3(self, runner, sweep_csv, tmp_path):
        args = ["plot", "--csv", sweep_csv, "--kind", "dof", "--method", "ng"]

        result = runner.invoke(cli.cli, [*args, "--out", str(tmp_path / "x.svg")])

        assert result.exit_code == 3


class TestDesign:
    def test_write_then_check_design(self, runner, tmp_path):
        path = str(tmp_path / "design.csv")

        written = runner.invoke(cli.cli, ["design", "--n", "8", "--out", path])
        checked = runner.invoke(cli.cli, ["design", "--check", path])

        assert written.exit_code == 0, written.output
        assert checked.exit_code == 0, checked.output
        assert ortho_design.load_design(path).n == 8

    def test_odd_size_exits_2(self, runner, tmp_path):
        result = runner.invoke(cli.cli, ["design", "--n", "7", "--out", str(tmp_path / "d.csv")])

        assert result.exit_code == 2

    def test_requires_size_or_check(self, runner):
        result = runner.invoke(cli.cli, ["design"])

        assert result.exit_code == 2

    def test_check_of_non_orthogonal_design_exits_3(self, runner, tmp_path):
        path = tmp_path / "eye.csv"
        path.write_text("1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n")

        result = runner.invoke(cli.cli, ["design", "--check", str(path)])

        assert result.exit_code == 3
