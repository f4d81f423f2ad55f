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

import click

from . import exceptions


def display_structured_error(
    title: str,
    reason: str,
    what_to_do: list[str],
    inputs: dict = None,
    help_links: list[str] = None,
) -> None:
    click.echo(err=True)
    click.echo(click.style(f"❌ {title}", fg="red", bold=True), err=True)
    click.echo(err=True)

    click.echo(click.style("REASON", fg="yellow", bold=True), err=True)
    click.echo(reason, err=True)
    click.echo(err=True)

    click.echo(click.style("WHAT YOU CAN DO", fg="cyan", bold=True), err=True)
    for i, action in enumerate(what_to_do, 1):
        click.echo(f"{i}) {action}", err=True)
    click.echo(err=True)

    if inputs:
        click.echo(click.style("INPUT YOU PROVIDED", fg="magenta", bold=True), err=True)
        for key, value in inputs.items():
            if value is None:
                click.echo(f" Missing: {key}", err=True)
            else:
                click.echo(f" {key}: {value}", err=True)
        click.echo(err=True)

    if help_links:
        click.echo(click.style("NEED HELP?", fg="green", bold=True), err=True)
        for link in help_links:
            click.echo(f" → {link}", err=True)
        click.echo(err=True)


def handle_invalid_rule_error(exc: exceptions.InvalidRuleError, command: str = "denoise") -> None:
    display_structured_error(
        title="INVALID ESTIMATOR SETTINGS",
        reason=str(exc),
        what_to_do=[
            "Use a positive --lambda (or --lambda-r for adaptive LASSO)",
            "Firm thresholding needs --gamma greater than 1",
            "Scaled soft thresholding needs an odd --m, e.g. --m 1, 3, 5 or 21",
        ],
        inputs={"--method": exc.variant},
        help_links=[f"sst-bridge {command} --help"],
    )


def handle_no_data_driven_dof_error(
    exc: exceptions.NoDataDrivenDofError | exceptions.NoSteinDerivativeError,
) -> None:
    display_structured_error(
        title="SURE NOT AVAILABLE",
        reason=str(exc),
        what_to_do=[
            "Drop --sure to get the residual and active-set size for hard thresholding",
            "Use --method sst --m 21 for a continuous estimator close to hard thresholding",
            "Run `sst-bridge sweep` to see the theoretical hard-thresholding DOF for a known truth",
        ],
        inputs={"--method": exc.variant},
        help_links=["sst-bridge denoise --help"],
    )


def handle_input_file_error(exc: exceptions.InputFileError) -> None:
    display_structured_error(
        title="INPUT FILE ERROR",
        reason=f'The file "{exc.path}" could not be used: {exc.reason}.',
        what_to_do=[
            "Check that the path is correct and the file is readable",
            "Signals and coefficients are single-column CSV files of real numbers",
            "Designs are square n x n CSV files without a header, with n even",
        ],
        inputs={"File": exc.path},
        help_links=["sst-bridge design --help"],
    )


def handle_dimension_mismatch_error(exc: exceptions.DimensionMismatchError) -> None:
    display_structured_error(
        title="LENGTH MISMATCH",
        reason=str(exc),
        what_to_do=[
            "Make the signal length equal to the design size n",
            "Generate a matching design with: sst-bridge design --n <length> --out design.csv",
        ],
        inputs={"Expected": exc.expected, "Got": exc.actual},
    )


def handle_design_not_orthogonal_error(
    exc: exceptions.DesignNotOrthogonalError, design: str = None
) -> None:
    display_structured_error(
        title="DESIGN NOT ORTHOGONAL",
        reason=f"{exc}.\nEvery SURE and DOF formula here assumes X^T X = n I.",
        what_to_do=[
            "Scale the columns so that each has squared norm n",
            "Check that the columns are mutually orthogonal",
            "Use the built-in design by omitting --design",
        ],
        inputs={"--design": design, "n": exc.n},
        help_links=["sst-bridge design --check <file>"],
    )


def handle_schema_mismatch_error(exc: exceptions.SchemaMismatchError) -> None:
    display_structured_error(
        title="NOT A SWEEP CSV",
        reason=f'The file "{exc.path}" cannot be plotted ({exc.reason}).',
        what_to_do=[
            "Plot the CSV written by `sst-bridge sweep`",
            "Required columns: lambda, method, risk_mean, risk_sd, sure_mean, "
            "dof1_mean, dof2_mean, ht_d1_theory, ht_d2_theory",
        ],
        inputs={"--csv": exc.path},
        help_links=["sst-bridge plot --help"],
    )


def handle_config_file_not_found_error(exc: exceptions.ConfigFileNotFoundError) -> None:
    display_structured_error(
        title="CONFIG FILE NOT FOUND",
        reason=f'The configuration file "{exc.config_path}" could not be found.',
        what_to_do=[
            "Verify the config file path is correct",
            "Ensure the file exists at the specified location",
            "Or start from a built-in experiment with --preset case1, case2 or fig2",
        ],
        inputs={"--config": exc.config_path},
        help_links=["Check the documentation for config file format"],
    )


def handle_config_validation_error(
    exc: exceptions.ConfigValidationError, config: str = None
) -> None:
    display_structured_error(
        title="CONFIGURATION ERROR",
        reason=str(exc),
        what_to_do=[
            "Review your configuration file for missing or invalid settings",
            "Without a preset, these fields are required: n, sigma2, true_coeffs, methods, "
            "lambda_grid, trials",
            "Check that values are in the correct format",
        ],
        inputs={"--config": config},
        help_links=["Check the documentation for config file requirements"],
    )


def handle_invalid_preset_error(exc: exceptions.InvalidPresetError) -> None:
    display_structured_error(
        title="UNKNOWN PRESET",
        reason=f'The preset "{exc.preset}" does not exist.',
        what_to_do=[f"Use one of: {', '.join(exc.known)}"],
        inputs={"--preset": exc.preset},
        help_links=["sst-bridge montecarlo --help"],
    )
