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

import pytest

from sst_bridge import exceptions, presets


def test_should_size_lambda_grids():
    assert len(presets.SWEEP_LAMBDA_GRID) == 37
    assert len(presets.SELECTION_LAMBDA_GRID) == 18
    assert len(presets.FINE_LAMBDA_GRID) == 100


@pytest.mark.parametrize("grid", ["fig2", "selection", "fine"])
def test_should_keep_lambda_grids_strictly_increasing(grid):
    values = presets.LAMBDA_GRIDS[grid]
    assert all(a < b for a, b in zip(values, values[1:], strict=False))
    assert values[0] > 0


def test_should_span_small_to_large_thresholds_in_sweep_grid():
    assert presets.SWEEP_LAMBDA_GRID[0] == 0.01
    assert presets.SWEEP_LAMBDA_GRID[-1] == 10.0
    assert 0.0625 > presets.SWEEP_LAMBDA_GRID[4]


def test_should_list_builtin_preset_names():
    assert presets.names() == ["case1", "case2", "fig2"]


def test_should_decay_case2_truth_harmonically():
    raw = presets.get_preset("case2")

    assert len(raw["true_coeffs"]) == 64
    assert raw["true_coeffs"][0] == [1, 5.0]
    assert raw["true_coeffs"][4] == [5, 1.0]
    assert raw["preset"] == "case2"


def test_should_return_independent_preset_copy():
    raw = presets.get_preset("case1")
    raw["methods"].append("ng")

    assert presets.get_preset("case1")["methods"] == ["ht", "st", "ft", "sst"]


def test_should_compare_ht_st_and_high_order_sst_in_fig2():
    raw = presets.get_preset("fig2")

    assert raw["methods"] == ["ht", "st", "sst"]
    assert raw["m_grid"] == [21]
    assert raw["sigma2_mode"] == "known"


def test_should_list_known_names_for_unknown_preset():
    with pytest.raises(exceptions.InvalidPresetError, match="Known presets: case1, case2, fig2"):
        presets.get_preset("table9")


def test_should_pass_lambda_grid_lists_through():
    assert presets.resolve_lambda_grid([0.3, 0.1]) == [0.3, 0.1]
    assert presets.resolve_lambda_grid("selection") == presets.SELECTION_LAMBDA_GRID
    assert presets.resolve_lambda_grid("selection") is not presets.SELECTION_LAMBDA_GRID
