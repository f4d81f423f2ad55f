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
import os
import sys

import click
import numpy as np
import yaml

from . import (
    error_handler,
    exceptions,
    logger,
    mc_harness,
    model_select,
    ortho_design,
    presets,
    report,
    risk_sure,
    svg_plot,
)
from . import config as config_module
from .threshold_ops import ThresholdRule, Variant, apply_vector

EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NO_SURE = 4

METHOD_CHOICE = click.Choice([v.value for v in Variant], case_sensitive=False)


class Sigma2Param(click.ParamType):
    """A non-negative float, or ``estimate`` / ``mad`` to estimate from null coefficients."""

    name = "sigma2"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        text = str(value).strip().lower()
        if text in ("estimate", "mad"):
            return text
        try:
            number = float(text)
        except ValueError:
            self.fail(f"'{value}' is not a number, 'estimate' or 'mad'", param, ctx)
        if not number >= 0.0:
            self.fail(f"sigma2 must be >= 0, got {value}", param, ctx)
        return number


def _float_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"'{value}' is not a comma-separated list of numbers") from None


def _int_list(ctx, param, value):
    numbers = _float_list(ctx, param, value)
    if numbers is None:
        return None
    if not all(v.is_integer() for v in numbers):
        raise click.BadParameter(f"'{value}' is not a comma-separated list of integers")
    return [int(v) for v in numbers]


@click.group()
@click.option("--verbose", is_flag=True, help="Enable verbose debug logging")
@click.pass_context
def cli(ctx, verbose):
    """Thresholding estimators, SURE and Monte Carlo experiments for orthogonal designs."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose

    if verbose:
        import logging

        logger.setup_logging(level=logging.DEBUG)
        logger.debug("Verbose logging enabled")
    else:
        logger.setup_logging()


def _load_signal_and_design(signal_path: str, design_path: str | None):
    y = ortho_design.read_vector_csv(signal_path)
    if design_path:
        design = ortho_design.load_design(design_path)
    else:
        if y.size < 4 or y.size % 2:
            raise exceptions.InputFileError(
                signal_path, f"signal length must be even and >= 4, got {y.size}"
            )
        design = ortho_design.build_trig_design(y.size)
    if design.n != y.size:
        raise exceptions.DimensionMismatchError("signal", design.n, y.size)
    return y, design


def _resolve_sigma2(sigma2, bhat: np.ndarray) -> tuple[float, str]:
    """Known value, or an estimate from the upper half of the coefficients."""
    if isinstance(sigma2, float):
        return sigma2, "known"
    n = bhat.size
    upper_half = range(n // 2 + 1, n + 1)
    if sigma2 == "mad":
        return risk_sure.estimate_sigma_mad_on(bhat, upper_half), "mad"
    return risk_sure.estimate_sigma2(bhat, upper_half), "estimated"


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


@cli.command("denoise")
@click.option("--signal", "signal_path", required=True, help="Single-column CSV signal")
@click.option("--method", required=True, type=METHOD_CHOICE, help="Estimator family")
@click.option("--lambda", "lam", type=float, help="Threshold level")
@click.option("--gamma", type=float, help="FT band parameter (> 1) or AL exponent (> 0)")
@click.option("--m", "m", type=int, help="SST order (odd)")
@click.option("--lambda-r", "lambda_r", type=float, help="AL penalty level lambda_R")
@click.option(
    "--sigma2",
    type=Sigma2Param(),
    default="estimate",
    show_default=True,
    help="Noise variance, or 'estimate' / 'mad' from the upper half of the coefficients",
)
@click.option("--sure", "want_sure", is_flag=True, help="Require a SURE report")
@click.option("--design", "design_path", help="n x n CSV design (default: built-in trig basis)")
@click.option("--out", "out_dir", required=True, help="Output directory")
def denoise(signal_path, method, lam, gamma, m, lambda_r, sigma2, want_sure, design_path, out_dir):
    """Threshold one signal and report SURE.

    Flow: read signal → analyze → threshold coefficients → synthesize →
    write denoised.csv, coefficients.csv and report.json
    """
    try:
        rule = ThresholdRule.build(method.lower(), lam, gamma=gamma, m=m, lambda_r=lambda_r)
        if rule.variant is Variant.HT and want_sure:
            raise exceptions.NoDataDrivenDofError(rule.variant.value)

        y, design = _load_signal_and_design(signal_path, design_path)
        bhat = ortho_design.analyze(design, y)
        sigma2_value, sigma2_source = _resolve_sigma2(sigma2, bhat)
        beta = apply_vector(rule, bhat)
        denoised = ortho_design.synthesize(design, beta)
        chosen = model_select.active_set(bhat, rule.lam)

        payload = {
            "rule": rule.to_dict(),
            "n": design.n,
            "design": design.provenance,
            "sigma2": sigma2_value,
            "sigma2_source": sigma2_source,
            "k_hat": len(chosen),
            "active_set": sorted(chosen),
            "residual": float(np.sum((bhat - beta) ** 2)),
            "sure_report": None,
        }
        if rule.variant is not Variant.HT:
            payload["sure_report"] = risk_sure.sure(rule, bhat, sigma2_value).to_dict()
        else:
            logger.warning("Hard thresholding has no data-driven SURE; sure_report is null")

        _ensure_dir(out_dir)
        ortho_design.write_vector_csv(os.path.join(out_dir, "denoised.csv"), denoised)
        ortho_design.write_vector_csv(os.path.join(out_dir, "coefficients.csv"), beta)
        report.write_json(payload, os.path.join(out_dir, "report.json"))

        logger.success(f"Denoised {design.n} samples with {rule.label} (lambda={rule.lam:g})")
        logger.metric("sigma2", sigma2_value)
        logger.metric("k_hat", len(chosen))
        logger.metric("residual", payload["residual"])
        if payload["sure_report"]:
            logger.metric("sure", payload["sure_report"]["sure"])
        logger.info(f"Outputs written to {out_dir}")

    except exceptions.InvalidRuleError as e:
        error_handler.handle_invalid_rule_error(e)
        sys.exit(EXIT_USAGE)
    except exceptions.NoDataDrivenDofError as e:
        error_handler.handle_no_data_driven_dof_error(e)
        sys.exit(EXIT_NO_SURE)
    except exceptions.InputFileError as e:
        error_handler.handle_input_file_error(e)
        sys.exit(EXIT_INPUT)
    except exceptions.DimensionMismatchError as e:
        error_handler.handle_dimension_mismatch_error(e)
        sys.exit(EXIT_INPUT)
    except exceptions.DesignNotOrthogonalError as e:
        error_handler.handle_design_not_orthogonal_error(e, design_path)
        sys.exit(EXIT_INPUT)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        sys.exit(EXIT_UNEXPECTED)


@cli.command("select")
@click.option("--signal", "signal_path", required=True, help="Single-column CSV signal")
@click.option("--method", required=True, type=METHOD_CHOICE, help="Estimator family")
@click.option(
    "--lambda-grid",
    callback=_float_list,
    help="Comma-separated lambda grid (default: 0.02..0.1 by 0.01, 0.2..1 by 0.1)",
)
@click.option("--gamma-grid", callback=_float_list, help="Comma-separated FT gamma grid")
@click.option("--m-grid", callback=_int_list, help="Comma-separated SST/AL order grid")
@click.option("--sigma2", type=Sigma2Param(), default="estimate", show_default=True)
@click.option("--design", "design_path", help="n x n CSV design (default: built-in trig basis)")
@click.option("--out", "out_dir", required=True, help="Output directory")
def select(signal_path, method, lambda_grid, gamma_grid, m_grid, sigma2, design_path, out_dir):
    """Pick lambda (and gamma or m) by minimizing SURE over a grid.

    Hard thresholding uses the universal threshold instead of a grid search.
    """
    try:
        variant = Variant(method.lower())
        y, design = _load_signal_and_design(signal_path, design_path)
        bhat = ortho_design.analyze(design, y)
        sigma2_value, sigma2_source = _resolve_sigma2(sigma2, bhat)

        if variant is Variant.HT:
            result = model_select.universal_select(bhat, sigma2_value)
        else:
            if variant is Variant.FT:
                hyper = gamma_grid or presets.GAMMA_GRID
            elif variant in (Variant.SST, Variant.AL):
                hyper = m_grid or presets.M_GRID
            else:
                hyper = None
            grid = lambda_grid if lambda_grid is not None else presets.SELECTION_LAMBDA_GRID
            result = model_select.grid_select(variant, grid, hyper, bhat, sigma2_value)

        denoised = ortho_design.synthesize(design, apply_vector(result.rule, bhat))
        payload = result.to_dict()
        payload.update({"sigma2": sigma2_value, "sigma2_source": sigma2_source, "n": design.n})

        _ensure_dir(out_dir)
        ortho_design.write_vector_csv(os.path.join(out_dir, "denoised.csv"), denoised)
        report.write_json(payload, os.path.join(out_dir, "selection.json"))

        logger.success(f"Selected {result.rule.label} at lambda={result.rule.lam:g}")
        logger.metric("k_hat", result.k_hat)
        logger.metric("sure", result.sure)
        logger.metric("searched", result.searched)

    except exceptions.InvalidRuleError as e:
        error_handler.handle_invalid_rule_error(e, command="select")
        sys.exit(EXIT_USAGE)
    except exceptions.EmptyGridError as e:
        error_handler.handle_invalid_rule_error(
            exceptions.InvalidRuleError(method, str(e)), command="select"
        )
        sys.exit(EXIT_USAGE)
    except exceptions.InvalidNoiseLevelError as e:
        logger.error(f"{e}; pass --sigma2 explicitly for this signal")
        sys.exit(EXIT_INPUT)
    except exceptions.InputFileError as e:
        error_handler.handle_input_file_error(e)
        sys.exit(EXIT_INPUT)
    except exceptions.DimensionMismatchError as e:
        error_handler.handle_dimension_mismatch_error(e)
        sys.exit(EXIT_INPUT)
    except exceptions.DesignNotOrthogonalError as e:
        error_handler.handle_design_not_orthogonal_error(e, design_path)
        sys.exit(EXIT_INPUT)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        sys.exit(EXIT_UNEXPECTED)


def _experiment_options(func):
    options = [
        click.option("--config", "config_path", help="Path to experiment YAML or JSON file"),
        click.option("--preset", help="Built-in experiment: case1, case2 or fig2"),
        click.option("--out", "out_dir", required=True, help="Output directory"),
        click.option("--seed", type=click.IntRange(0, config_module.MAX_SEED), help="Master seed"),
        click.option("--trials", type=click.IntRange(min=1), help="Number of Monte Carlo trials"),
        click.option(
            "--quick", is_flag=True, help=f"Use {presets.QUICK_TRIALS} trials unless --trials"
        ),
        click.option("--workers", type=click.IntRange(min=1), help="Worker threads"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _load_experiment(config_path, preset, seed, trials, quick, workers):
    if not config_path and not preset:
        raise click.UsageError("Provide --config or --preset")
    raw = config_module.load_config(config_path) if config_path else {}
    if preset:
        raw["preset"] = preset
    if seed is not None:
        raw["master_seed"] = seed
    if trials is not None:
        raw["trials"] = trials
    elif quick:
        raw["trials"] = presets.QUICK_TRIALS
    if workers is not None:
        raw["workers"] = workers
    return config_module.build_experiment(raw)


def _run_experiment(kind, config_path, preset, seed, trials, quick, workers, out_dir):
    try:
        cfg = _load_experiment(config_path, preset, seed, trials, quick, workers)
        logger.info(
            f"Experiment: preset={cfg.preset or '-'} n={cfg.n} sigma2={cfg.sigma2:g} "
            f"trials={cfg.trials} seed={cfg.master_seed}"
        )
        _ensure_dir(out_dir)
        if kind == "sweep":
            summary = mc_harness.run_sweep(cfg)
            report.write_sweep_csv(summary, os.path.join(out_dir, "sweep.csv"))
            report.write_summary_json(summary, os.path.join(out_dir, "sweep.json"))
        else:
            summary = mc_harness.run_model_selection(cfg)
            report.write_selection_csv(summary, os.path.join(out_dir, "selection.csv"))
            report.write_summary_json(summary, os.path.join(out_dir, "selection.json"))
            logger.table(
                ["method", "risk", "(sd)", "k_hat", "(sd)", "SErr", "(sd)"],
                [
                    [s.method, s.risk_mean, s.risk_sd, s.khat_mean, s.khat_sd]
                    + [s.serr_mean, s.serr_sd]
                    for s in summary.methods
                ],
            )
        logger.info(f"Outputs written to {out_dir}")

    except click.UsageError:
        raise
    except exceptions.InvalidPresetError as e:
        error_handler.handle_invalid_preset_error(e)
        sys.exit(EXIT_USAGE)
    except exceptions.ConfigFileNotFoundError as e:
        error_handler.handle_config_file_not_found_error(e)
        sys.exit(EXIT_INPUT)
    except FileNotFoundError:
        error_handler.handle_config_file_not_found_error(
            exceptions.ConfigFileNotFoundError(config_path)
        )
        sys.exit(EXIT_INPUT)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        error_handler.handle_config_validation_error(
            exceptions.ConfigValidationError(f"cannot parse file: {e}"), config_path
        )
        sys.exit(EXIT_INPUT)
    except (exceptions.ConfigValidationError, exceptions.EmptyGridError) as e:
        if not isinstance(e, exceptions.ConfigValidationError):
            e = exceptions.ConfigValidationError(str(e))
        error_handler.handle_config_validation_error(e, config_path)
        sys.exit(EXIT_INPUT if config_path else EXIT_USAGE)
    except exceptions.InvalidRuleError as e:
        error_handler.handle_invalid_rule_error(e, command=kind)
        sys.exit(EXIT_USAGE)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        sys.exit(EXIT_UNEXPECTED)


@cli.command("sweep")
@_experiment_options
def sweep(config_path, preset, out_dir, seed, trials, quick, workers):
    """Risk, SURE and DOF curves over a lambda grid (writes sweep.csv and sweep.json)."""
    _run_experiment("sweep", config_path, preset, seed, trials, quick, workers, out_dir)


@cli.command("montecarlo")
@_experiment_options
def montecarlo(config_path, preset, out_dir, seed, trials, quick, workers):
    """Model-selection comparison of risk, k_hat and SErr (writes selection.csv/.json)."""
    _run_experiment("montecarlo", config_path, preset, seed, trials, quick, workers, out_dir)


def _dof_series(rows):
    lam = [r["lambda"] for r in rows]
    d1 = [r["dof1_mean"] for r in rows]
    d2 = [r["dof2_mean"] for r in rows]
    total = [
        a + b if a is not None and b is not None else None for a, b in zip(d1, d2, strict=True)
    ]
    return [
        svg_plot.Series("d1", lam, d1),
        svg_plot.Series("d2", lam, d2),
        svg_plot.Series("d1+d2", lam, total),
        svg_plot.Series("ht_d2_theory", lam, [r["ht_d2_theory"] for r in rows], dashed=True),
    ]


def _risk_series(rows):
    methods = list(dict.fromkeys(r["method"] for r in rows))
    series = []
    for method in methods:
        picked = [r for r in rows if r["method"] == method]
        lam = [r["lambda"] for r in picked]
        series.append(svg_plot.Series(f"risk {method}", lam, [r["risk_mean"] for r in picked]))
        if method != Variant.HT.value:
            sure_values = [r["sure_mean"] for r in picked]
            series.append(svg_plot.Series(f"sure {method}", lam, sure_values, dashed=True))
    return series


@cli.command("plot")
@click.option("--csv", "csv_path", required=True, help="Sweep CSV written by `sweep`")
@click.option("--kind", required=True, type=click.Choice(["dof", "risk"]), help="Chart type")
@click.option("--out", "out_svg", required=True, help="Output SVG path")
@click.option("--method", help="Curve label for --kind dof (default: first sst curve)")
def plot(csv_path, kind, out_svg, method):
    """Render sweep curves as a standalone SVG with a log-scaled lambda axis."""
    try:
        rows = report.read_sweep_csv(csv_path)
        labels = list(dict.fromkeys(r["method"] for r in rows))
        if kind == "dof":
            if method is None:
                stein = [label for label in labels if label != Variant.HT.value]
                sst = [label for label in stein if label.startswith("sst")]
                method = (sst or stein or labels)[0]
            picked = sorted((r for r in rows if r["method"] == method), key=lambda r: r["lambda"])
            if not picked:
                raise exceptions.SchemaMismatchError(csv_path, reason=f"no rows for '{method}'")
            series = _dof_series(picked)
            title = f"Degrees of freedom of {method}"
            y_label = "DOF"
        else:
            series = _risk_series(sorted(rows, key=lambda r: r["lambda"]))
            title = "Risk and SURE"
            y_label = "risk"

        svg = svg_plot.render_chart(series, title, "lambda", y_label, log_x=True)
        parent = os.path.dirname(out_svg)
        if parent:
            _ensure_dir(parent)
        with open(out_svg, "w") as f:
            f.write(svg)
        logger.success(f"Wrote {kind} chart to {out_svg}")

    except exceptions.SchemaMismatchError as e:
        error_handler.handle_schema_mismatch_error(e)
        sys.exit(EXIT_INPUT)
    except exceptions.InputFileError as e:
        error_handler.handle_input_file_error(e)
        sys.exit(EXIT_INPUT)
    except ValueError as e:
        error_handler.handle_schema_mismatch_error(
            exceptions.SchemaMismatchError(csv_path, reason=str(e))
        )
        sys.exit(EXIT_INPUT)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        sys.exit(EXIT_UNEXPECTED)


@cli.command("design")
@click.option("--n", "n", type=int, help="Size of the built-in trig design")
@click.option("--out", "out_path", help="Where to write the design CSV")
@click.option("--check", "check_path", help="Validate an existing design CSV")
def design(n, out_path, check_path):
    """Write the built-in trig design, or check a user design for X^T X = n I."""
    try:
        if check_path:
            loaded = ortho_design.load_design(check_path)
            deviation = ortho_design.gram_deviation(loaded.matrix)
            logger.success(f"Design {check_path} is orthogonal (n={loaded.n})")
            logger.metric("max |X^T X - n I|", deviation)
            return

        if n is None or not out_path:
            raise click.UsageError("Provide --n and --out, or --check <file>")
        built = ortho_design.build_trig_design(n)
        ortho_design.save_design(built, out_path)
        logger.success(f"Wrote {n} x {n} trig design to {out_path}")

    except click.UsageError:
        raise
    except exceptions.InvalidDesignSizeError as e:
        logger.error(str(e))
        sys.exit(EXIT_USAGE)
    except exceptions.InputFileError as e:
        error_handler.handle_input_file_error(e)
        sys.exit(EXIT_INPUT)
    except exceptions.DesignNotOrthogonalError as e:
        error_handler.handle_design_not_orthogonal_error(e, check_path)
        sys.exit(EXIT_INPUT)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        sys.exit(EXIT_UNEXPECTED)


if __name__ == "__main__":
    cli()
