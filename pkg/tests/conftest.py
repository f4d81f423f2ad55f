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

import os
import tempfile

import numpy as np
import pytest

from sst_bridge import config, ortho_design


@pytest.fixture
def config_file():
    """Create a temporary experiment config (small, fast) for testing."""
    with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
        f.write("""
        n: 16
        sigma2: 1.0
        true_coeffs: [[1, 2.0], [2, 1.0]]
        methods: [ht, st, sst]
        lambda_grid: [0.1, 0.25, 0.5]
        m_grid: [3]
        gamma_grid: [2.0]
        trials: 20
        master_seed: 7
        """)
        f.flush()
        config_path = f.name

    yield config_path

    if os.path.exists(config_path):
        os.unlink(config_path)


@pytest.fixture
def invalid_yaml_file():
    """Create a temporary invalid YAML file for testing error handling."""
    with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
        f.write("invalid: yaml: content: [")
        f.flush()
        config_path = f.name

    yield config_path

    if os.path.exists(config_path):
        os.unlink(config_path)


@pytest.fixture
def small_experiment():
    """A 16-point experiment with two non-zero coefficients."""
    return config.ExperimentConfig(
        n=16,
        sigma2=1.0,
        true_coeffs=((1, 2.0), (2, 1.0)),
        methods=("ht", "st", "sst"),
        lambda_grid=(0.1, 0.25, 0.5),
        gamma_grid=(2.0,),
        m_grid=(3,),
        trials=40,
        master_seed=11,
        chunk_size=8,
    )


@pytest.fixture
def case1_experiment():
    """Case-1 truth (n=256, five unit coefficients) with known sigma2."""
    return config.build_experiment({"preset": "case1", "sigma2_mode": "known"})


@pytest.fixture
def design16():
    return ortho_design.build_trig_design(16)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def signal_file(tmp_path):
    """Write a signal CSV and return its path; call with the sample values."""

    def _write(values, name="signal.csv"):
        path = tmp_path / name
        ortho_design.write_vector_csv(str(path), values)
        return str(path)

    return _write
