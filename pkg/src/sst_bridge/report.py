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
from typing import Any

import numpy as np
import pandas as pd

from . import exceptions
from .mc_harness import McSummary

SWEEP_COLUMNS = [
    "lambda",
    "method",
    "risk_mean",
    "risk_sd",
    "sure_mean",
    "dof1_mean",
    "dof2_mean",
    "ht_d1_theory",
    "ht_d2_theory",
]
SWEEP_EXTRA_COLUMNS = ["sure_sd", "dof_empirical"]
SELECTION_COLUMNS = [
    "method",
    "risk_mean",
    "risk_sd",
    "khat_mean",
    "khat_sd",
    "serr_mean",
    "serr_sd",
]

# Ten significant digits; missing values are written as empty cells.
FLOAT_FORMAT = "%.10g"


def write_json(payload: dict[str, Any], path: str) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write("\n")


def write_summary_json(summary: McSummary, path: str) -> None:
    write_json(summary.to_dict(), path)


def _write_rows(path: str, columns: list[str], rows: list[dict[str, Any]]) -> None:
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


def write_sweep_csv(summary: McSummary, path: str) -> None:
    """One row per (lambda, method), ordered by lambda then by method order."""
    rank = {method: i for i, method in enumerate(dict.fromkeys(p.method for p in summary.curves))}
    points = sorted(summary.curves, key=lambda p: (p.lam, rank[p.method]))
    _write_rows(path, SWEEP_COLUMNS + SWEEP_EXTRA_COLUMNS, [p.to_dict() for p in points])


def write_selection_csv(summary: McSummary, path: str) -> None:
    _write_rows(path, SELECTION_COLUMNS, [stats.to_dict() for stats in summary.methods])


def _first_bad_cell(mask: pd.DataFrame) -> tuple[int, str]:
    row, col = np.argwhere(mask.to_numpy())[0]
    # header is line 1
    return int(row) + 2, str(mask.columns[col])


def read_sweep_csv(path: str) -> list[dict[str, Any]]:
    """Read a sweep CSV back.

    Args:
        path: CSV written by ``write_sweep_csv`` (extra columns are kept).

    Returns:
        One dict per row; numeric cells become floats, empty cells None and
        ``method`` stays a string.

    Raises:
        InputFileError: The file is missing or cannot be parsed as CSV.
        SchemaMismatchError: Required columns are missing, there are no rows,
            a cell is not numeric or a lambda is not positive.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise exceptions.InputFileError(path, "file not found") from None
    except pd.errors.EmptyDataError:
        raise exceptions.SchemaMismatchError(path, reason="file is empty") from None
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise exceptions.InputFileError(path, str(e)) from None

    missing = [column for column in SWEEP_COLUMNS if column not in frame.columns]
    if missing:
        raise exceptions.SchemaMismatchError(path, missing=missing)
    if frame.empty:
        raise exceptions.SchemaMismatchError(path, reason="no data rows")

    text = frame.drop(columns="method").apply(lambda column: column.str.strip())
    numbers = text.apply(pd.to_numeric, errors="coerce")

    not_numeric = numbers.isna() & (text != "")
    if not_numeric.to_numpy().any():
        line, column = _first_bad_cell(not_numeric)
        value = text.at[line - 2, column]
        raise exceptions.SchemaMismatchError(
            path, reason=f"line {line}: column '{column}' is not numeric ('{value}')"
        )
    bad_lambda = ~(numbers["lambda"] > 0.0)
    if bad_lambda.any():
        line, _ = _first_bad_cell(bad_lambda.to_frame())
        raise exceptions.SchemaMismatchError(
            path, reason=f"line {line}: lambda must be a positive number"
        )

    return [
        {"method": method, **{k: None if pd.isna(v) else float(v) for k, v in values.items()}}
        for method, values in zip(frame["method"], numbers.to_dict("records"), strict=True)
    ]
