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
import tempfile

import numpy as np
import pytest
import yaml

from sst_bridge import config, exceptions, presets

VALID_RAW = {
    "n": 16,
    "sigma2": 1.0,
    "true_coeffs": [[1, 2.0], [2, 1.0]],
    "methods": ["ht", "st"],
    "lambda_grid": [0.1, 0.5],
    "trials": 10,
}


def test_should_load_valid_yaml_config(config_file):
    """Test loading a valid YAML experiment file."""
    cfg = config.load_config(config_file)

    assert cfg["n"] == 16
    assert cfg["sigma2"] == 1.0
    assert cfg["true_coeffs"] == [[1, 2.0], [2, 1.0]]
    assert cfg["methods"] == ["ht", "st", "sst"]
    assert cfg["master_seed"] == 7


def test_should_load_json_config():
    """Test that files ending in .json are parsed as JSON."""
    with tempfile.NamedTemporaryFile(mode="w", suffix=".json", delete=False) as f:
        json.dump({"preset": "case2", "trials": 50}, f)
        config_path = f.name

    try:
        cfg = config.load_config(config_path)
        assert cfg == {"preset": "case2", "trials": 50}
    finally:
        os.unlink(config_path)


def test_should_raise_error_when_config_file_not_found():
    """Test that FileNotFoundError is raised for non-existent config files."""
    with pytest.raises(FileNotFoundError):
        config.load_config("/nonexistent/config.yaml")


def test_should_raise_error_when_yaml_is_invalid(invalid_yaml_file):
    """Test that YAMLError is raised for invalid YAML syntax."""
    with pytest.raises(yaml.YAMLError):
        config.load_config(invalid_yaml_file)


def test_should_raise_error_when_yaml_root_is_not_dict():
    """Test that ConfigValidationError is raised when YAML root element is not a dictionary."""
    with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
        f.write("- item1\n- item2")
        f.flush()
        config_path = f.name

    try:
        with pytest.raises(exceptions.ConfigValidationError, match="Config must be a dictionary"):
            config.load_config(config_path)
    finally:
        os.unlink(config_path)


def test_should_validate_config_with_all_required_fields():
    config.validate_config(dict(VALID_RAW))


@pytest.mark.parametrize("missing_field", config.REQUIRED_FIELDS)
def test_should_raise_error_when_required_field_missing(missing_field):
    """Test that ConfigValidationError is raised when any required field is missing."""
    cfg = dict(VALID_RAW)

    # Remove the field being tested
    del cfg[missing_field]

    with pytest.raises(
        exceptions.ConfigValidationError, match=f"Missing required config field: {missing_field}"
    ):
        config.validate_config(cfg)


def test_should_make_other_fields_optional_with_preset():
    config.validate_config({"preset": "case1"})


def test_should_reject_unknown_sigma2_mode():
    with pytest.raises(exceptions.ConfigValidationError, match="sigma2_mode must be one of"):
        config.validate_config({**VALID_RAW, "sigma2_mode": "guess"})


def test_should_build_experiment_from_raw_mapping():
    experiment = config.build_experiment(VALID_RAW)

    assert experiment.n == 16
    assert experiment.true_coeffs == ((1, 2.0), (2, 1.0))
    assert experiment.methods == ("ht", "st")
    assert experiment.lambda_grid == (0.1, 0.5)
    assert experiment.master_seed == presets.DEFAULT_SEED
    assert experiment.sigma2_mode == "known"
    assert experiment.zero_index_set == tuple(range(9, 17))
    np.testing.assert_array_equal(experiment.b[:3], [2.0, 1.0, 0.0])
    assert experiment.k_star == frozenset({1, 2})
    assert experiment.tau == pytest.approx(0.25)


def test_should_merge_overrides_over_preset():
    experiment = config.build_experiment(
        {"preset": "case1", "trials": 30, "master_seed": 5, "sigma2_mode": "known"}
    )

    assert experiment.preset == "case1"
    assert experiment.n == 256
    assert experiment.trials == 30
    assert experiment.master_seed == 5
    assert experiment.sigma2_mode == "known"
    assert experiment.lambda_grid == tuple(presets.SELECTION_LAMBDA_GRID)
    assert experiment.k_star == frozenset(range(1, 6))


def test_should_accept_mapping_for_true_coeffs():
    experiment = config.build_experiment({**VALID_RAW, "true_coeffs": {3: 0.5, 1: 1.5}})

    assert experiment.true_coeffs == ((1, 1.5), (3, 0.5))


def test_should_resolve_named_lambda_grid():
    experiment = config.build_experiment({**VALID_RAW, "lambda_grid": "fine"})

    assert len(experiment.lambda_grid) == 100


def test_should_reject_unknown_named_grid():
    with pytest.raises(exceptions.ConfigValidationError, match="Unknown lambda_grid 'huge'"):
        config.build_experiment({**VALID_RAW, "lambda_grid": "huge"})


def test_should_propagate_unknown_preset():
    with pytest.raises(exceptions.InvalidPresetError):
        config.build_experiment({"preset": "case9"})


@pytest.mark.parametrize(
    "override,expected_error",
    [
        ({"n": 15}, "n must be an even integer >= 4"),
        ({"n": 2}, "n must be an even integer >= 4"),
        ({"n": "sixteen"}, "n must be an integer"),
        ({"sigma2": -1.0}, "sigma2 must be >= 0"),
        ({"sigma2": "noisy"}, "sigma2 must be a number"),
        ({"true_coeffs": [[17, 1.0]]}, "outside 1..16"),
        ({"true_coeffs": [[1, 1.0], [1, 2.0]]}, "index 1 is repeated"),
        ({"true_coeffs": [[1]]}, "list of \\[index, value\\] pairs"),
        ({"true_coeffs": "none"}, "true_coeffs must be a list"),
        ({"methods": ["st", "lasso"]}, "Unknown method 'lasso'"),
        ({"lambda_grid": [0.1, 0.0]}, "lambda_grid values must be positive"),
        ({"gamma_grid": [1.0, 2.0]}, "gamma_grid values must be > 1"),
        ({"m_grid": [1, 2]}, "m_grid values must be odd integers"),
        ({"m_grid": [1.5]}, "m_grid must be an integer"),
        ({"trials": 0}, "trials must be >= 1"),
        ({"trials": True}, "trials must be an integer"),
        ({"master_seed": -1}, "master_seed must be an unsigned 64-bit integer"),
        ({"zero_index_set": [0, 1]}, "zero_index_set must lie within 1..16"),
        ({"workers": 0}, "workers and chunk_size must be >= 1"),
    ],
)
def test_build_experiment_with_invalid_values_should_fail(override, expected_error):
    with pytest.raises(exceptions.ConfigValidationError, match=expected_error):
        config.build_experiment({**VALID_RAW, **override})


@pytest.mark.parametrize("grid", ["methods", "gamma_grid", "m_grid"])
def test_should_reject_empty_grids(grid):
    with pytest.raises(exceptions.EmptyGridError):
        config.build_experiment({**VALID_RAW, grid: []})


def test_should_reject_empty_lambda_grid():
    with pytest.raises(exceptions.EmptyGridError):
        config.build_experiment({**VALID_RAW, "lambda_grid": []})


def test_should_omit_workers_from_json_ready_dict():
    experiment = config.build_experiment({**VALID_RAW, "workers": 4})

    data = experiment.to_dict()

    assert "workers" not in data
    assert data["true_coeffs"] == [[1, 2.0], [2, 1.0]]
    assert json.loads(json.dumps(data)) == data
