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

"""Built-in experiment settings and the standard hyper-parameter grids."""

import copy
from typing import Any

import numpy as np

from . import exceptions

DEFAULT_SEED = 20150722
QUICK_TRIALS = 200

SWEEP_LAMBDA_GRID = (
    [round(0.01 * i, 2) for i in range(1, 11)]
    + [round(0.05 * i, 2) for i in range(3, 21)]
    + [float(i) for i in range(2, 11)]
)
SELECTION_LAMBDA_GRID = [round(0.01 * i, 2) for i in range(2, 11)] + [
    round(0.1 * i, 1) for i in range(2, 11)
]
FINE_LAMBDA_GRID = [float(v) for v in np.geomspace(0.01, 10.0, 100)]
GAMMA_GRID = [1.1, 1.2, 1.5, 2.0, 3.0, 4.0, 5.0]
M_GRID = [1, 3, 5, 7, 9, 11]

LAMBDA_GRIDS = {
    "fig2": SWEEP_LAMBDA_GRID,
    "selection": SELECTION_LAMBDA_GRID,
    "fine": FINE_LAMBDA_GRID,
}

_PRESETS: dict[str, dict[str, Any]] = {
    "case1": {
        "n": 256,
        "sigma2": 1.0,
        "true_coeffs": [[k, 1.0] for k in range(1, 6)],
        "methods": ["ht", "st", "ft", "sst"],
        "lambda_grid": "selection",
        "gamma_grid": GAMMA_GRID,
        "m_grid": M_GRID,
        "trials": 5000,
        "master_seed": DEFAULT_SEED,
        "sigma2_mode": "estimated",
    },
    "case2": {
        "n": 256,
        "sigma2": 1.0,
        "true_coeffs": [[k, 5.0 / k] for k in range(1, 65)],
        "methods": ["ht", "st", "ft", "sst"],
        "lambda_grid": "selection",
        "gamma_grid": GAMMA_GRID,
        "m_grid": M_GRID,
        "trials": 5000,
        "master_seed": DEFAULT_SEED,
        "sigma2_mode": "estimated",
    },
    "fig2": {
        "n": 256,
        "sigma2": 1.0,
        "true_coeffs": [[k, 1.0] for k in range(1, 6)],
        "methods": ["ht", "st", "sst"],
        "lambda_grid": "fig2",
        "gamma_grid": [2.0],
        "m_grid": [21],
        "trials": 5000,
        "master_seed": DEFAULT_SEED,
        "sigma2_mode": "known",
    },
}


def names() -> list[str]:
    return sorted(_PRESETS)


def get_preset(name: str) -> dict[str, Any]:
    """Return a fresh copy of the named preset as a raw config mapping."""
    if name not in _PRESETS:
        raise exceptions.InvalidPresetError(name, names())
    raw = copy.deepcopy(_PRESETS[name])
    raw["preset"] = name
    return raw


def resolve_lambda_grid(value: Any) -> list[float]:
    """Expand a named grid ("fig2", "selection", "fine") or pass a list through."""
    if isinstance(value, str):
        if value not in LAMBDA_GRIDS:
            raise exceptions.ConfigValidationError(
                f"Unknown lambda_grid '{value}'. Known grids: {', '.join(sorted(LAMBDA_GRIDS))}"
            )
        return list(LAMBDA_GRIDS[value])
    return value
