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
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from . import exceptions, presets
from .threshold_ops import FloatArray, Variant

SIGMA2_MODES = ("known", "estimated", "mad")
MAX_SEED = 2**64 - 1

REQUIRED_FIELDS = ["n", "sigma2", "true_coeffs", "methods", "lambda_grid", "trials"]


def load_config(config_path: str) -> dict[str, Any]:
    """Load and parse a YAML or JSON experiment file.

    Args:
        config_path: Path to the config file; ``.json`` files are read as JSON

    Returns:
        Dictionary containing configuration

    Raises:
        FileNotFoundError: If config file doesn't exist
        yaml.YAMLError: If config file is not valid YAML
        json.JSONDecodeError: If a ``.json`` config file is not valid JSON
    """
    with open(config_path) as f:
        if config_path.lower().endswith(".json"):
            config = json.load(f)
        else:
            config = yaml.safe_load(f)

    if not isinstance(config, dict):
        raise exceptions.ConfigValidationError("Config must be a dictionary")

    return config


def validate_config(config: dict[str, Any]) -> None:
    """Validate that config contains required fields.

    A config naming a ``preset`` only needs the fields it overrides.

    Raises:
        ConfigValidationError: If required fields are missing or sigma2_mode is unknown
    """
    if not config.get("preset"):
        for field_name in REQUIRED_FIELDS:
            if field_name not in config:
                raise exceptions.ConfigValidationError(
                    f"Missing required config field: {field_name}"
                )

    mode = config.get("sigma2_mode", "known")
    if mode not in SIGMA2_MODES:
        raise exceptions.ConfigValidationError(
            f"sigma2_mode must be one of {', '.join(SIGMA2_MODES)}, got '{mode}'"
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated Monte Carlo experiment settings. Indices are 1-based."""

    n: int
    sigma2: float
    true_coeffs: tuple[tuple[int, float], ...]
    methods: tuple[str, ...]
    lambda_grid: tuple[float, ...]
    gamma_grid: tuple[float, ...] = tuple(presets.GAMMA_GRID)
    m_grid: tuple[int, ...] = tuple(presets.M_GRID)
    trials: int = 5000
    master_seed: int = presets.DEFAULT_SEED
    sigma2_mode: str = "known"
    zero_index_set: tuple[int, ...] = field(default=())
    preset: str | None = None
    workers: int = 1
    chunk_size: int = 250

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise exceptions.ConfigValidationError(f"n must be an even integer >= 4, got {self.n}")
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0.0):
            raise exceptions.ConfigValidationError(f"sigma2 must be >= 0, got {self.sigma2}")
        seen = set()
        for index, value in self.true_coeffs:
            if not 1 <= index <= self.n:
                raise exceptions.ConfigValidationError(
                    f"true_coeffs index {index} is outside 1..{self.n}"
                )
            if index in seen:
                raise exceptions.ConfigValidationError(f"true_coeffs index {index} is repeated")
            if not math.isfinite(value):
                raise exceptions.ConfigValidationError(f"true_coeffs[{index}] must be finite")
            seen.add(index)
        if not self.methods:
            raise exceptions.EmptyGridError("methods")
        for method in self.methods:
            if method not in Variant._value2member_map_:
                raise exceptions.ConfigValidationError(
                    f"Unknown method '{method}'. Known methods: "
                    + ", ".join(v.value for v in Variant)
                )
        for grid_name in ("lambda_grid", "gamma_grid", "m_grid"):
            if not getattr(self, grid_name):
                raise exceptions.EmptyGridError(grid_name)
        if any(not (math.isfinite(v) and v > 0.0) for v in self.lambda_grid):
            raise exceptions.ConfigValidationError("lambda_grid values must be positive")
        if any(not g > 1.0 for g in self.gamma_grid):
            raise exceptions.ConfigValidationError("gamma_grid values must be > 1")
        if any(m < 1 or m % 2 == 0 for m in self.m_grid):
            raise exceptions.ConfigValidationError("m_grid values must be odd integers >= 1")
        if self.trials < 1:
            raise exceptions.ConfigValidationError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed <= MAX_SEED:
            raise exceptions.ConfigValidationError("master_seed must be an unsigned 64-bit integer")
        if self.sigma2_mode not in SIGMA2_MODES:
            raise exceptions.ConfigValidationError(
                f"sigma2_mode must be one of {', '.join(SIGMA2_MODES)}"
            )
        if not self.zero_index_set:
            object.__setattr__(
                self, "zero_index_set", tuple(range(self.n // 2 + 1, self.n + 1))
            )
        if any(not 1 <= k <= self.n for k in self.zero_index_set):
            raise exceptions.ConfigValidationError(f"zero_index_set must lie within 1..{self.n}")
        if self.workers < 1 or self.chunk_size < 1:
            raise exceptions.ConfigValidationError("workers and chunk_size must be >= 1")

    @property
    def b(self) -> FloatArray:
        """Dense true coefficient vector."""
        b = np.zeros(self.n, dtype=np.float64)
        for index, value in self.true_coeffs:
            b[index - 1] = value
        return b

    @property
    def k_star(self) -> frozenset[int]:
        return frozenset(index for index, value in self.true_coeffs if value != 0.0)

    @property
    def tau(self) -> float:
        return math.sqrt(self.sigma2 / self.n)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "sigma2": self.sigma2,
            "true_coeffs": [[index, value] for index, value in self.true_coeffs],
            "methods": list(self.methods),
            "lambda_grid": list(self.lambda_grid),
            "gamma_grid": list(self.gamma_grid),
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "sigma2_mode": self.sigma2_mode,
            "zero_index_set": list(self.zero_index_set),
            "preset": self.preset,
            "chunk_size": self.chunk_size,
        }


def _as_int(name: str, value: Any) -> int:
    message = f"{name} must be an integer, got {value!r}"
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise exceptions.ConfigValidationError(message)
    try:
        number = float(value)
    except ValueError:
        raise exceptions.ConfigValidationError(message) from None
    if not number.is_integer():
        raise exceptions.ConfigValidationError(message)
    return int(value) if isinstance(value, int) else int(number)


def _as_float(name: str, value: Any) -> float:
    if isinstance(value, bool):
        raise exceptions.ConfigValidationError(f"{name} must be a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise exceptions.ConfigValidationError(f"{name} must be a number, got {value!r}") from None


def _as_list(name: str, value: Any) -> list:
    if not isinstance(value, (list, tuple)):
        raise exceptions.ConfigValidationError(f"{name} must be a list")
    return list(value)


def _parse_true_coeffs(value: Any) -> tuple[tuple[int, float], ...]:
    if isinstance(value, dict):
        pairs = list(value.items())
    else:
        pairs = _as_list("true_coeffs", value)
    parsed = []
    for pair in pairs:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise exceptions.ConfigValidationError(
                "true_coeffs must be a list of [index, value] pairs"
            )
        parsed.append((_as_int("true_coeffs index", pair[0]), _as_float("true_coeffs", pair[1])))
    return tuple(sorted(parsed))


def build_experiment(raw: dict[str, Any]) -> ExperimentConfig:
    """Turn a raw config mapping into an ExperimentConfig.

    When ``preset`` is set, the preset's values are the defaults and any key in
    ``raw`` overrides them.
    """
    merged: dict[str, Any] = {}
    if raw.get("preset"):
        merged.update(presets.get_preset(str(raw["preset"])))
    merged.update({k: v for k, v in raw.items() if v is not None})
    validate_config(merged)

    kwargs: dict[str, Any] = {
        "n": _as_int("n", merged["n"]),
        "sigma2": _as_float("sigma2", merged["sigma2"]),
        "true_coeffs": _parse_true_coeffs(merged["true_coeffs"]),
        "methods": tuple(str(m).lower() for m in _as_list("methods", merged["methods"])),
        "lambda_grid": tuple(
            _as_float("lambda_grid", v)
            for v in _as_list("lambda_grid", presets.resolve_lambda_grid(merged["lambda_grid"]))
        ),
        "trials": _as_int("trials", merged["trials"]),
        "sigma2_mode": merged.get("sigma2_mode", "known"),
        "preset": merged.get("preset"),
    }
    if "gamma_grid" in merged:
        kwargs["gamma_grid"] = tuple(
            _as_float("gamma_grid", v) for v in _as_list("gamma_grid", merged["gamma_grid"])
        )
    if "m_grid" in merged:
        kwargs["m_grid"] = tuple(_as_int("m_grid", v) for v in _as_list("m_grid", merged["m_grid"]))
    if "master_seed" in merged:
        kwargs["master_seed"] = _as_int("master_seed", merged["master_seed"])
    if "zero_index_set" in merged:
        indices = _as_list("zero_index_set", merged["zero_index_set"])
        kwargs["zero_index_set"] = tuple(sorted({_as_int("zero_index_set", k) for k in indices}))
    for key in ("workers", "chunk_size"):
        if key in merged:
            kwargs[key] = _as_int(key, merged[key])

    return ExperimentConfig(**kwargs)
