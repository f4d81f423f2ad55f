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

import xml.etree.ElementTree as ET

import pytest

from sst_bridge import svg_plot

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def curves():
    x = [0.01, 0.1, 1.0, 10.0]
    return [
        svg_plot.Series("d1", x, [250.0, 80.0, 5.0, 0.0]),
        svg_plot.Series("d2", x, [10.0, 60.0, None, 0.0], dashed=True),
    ]


def test_should_render_well_formed_svg(curves):
    svg = svg_plot.render_chart(curves, "DOF", "lambda", "dof")

    root = ET.fromstring(svg)
    assert root.tag == f"{SVG_NS}svg"
    assert len(root.findall(f"{SVG_NS}polyline")) == 2


def test_should_render_deterministic_chart(curves):
    first = svg_plot.render_chart(curves, "DOF", "lambda", "dof")
    second = svg_plot.render_chart(curves, "DOF", "lambda", "dof")

    assert first == second


def test_should_draw_legend_and_decade_ticks(curves):
    svg = svg_plot.render_chart(curves, "DOF", "lambda", "dof")

    assert ">d1</text>" in svg
    assert ">d2</text>" in svg
    for label in ("1e-2", "1e-1", "1e0", "1e1"):
        assert f">{label}</text>" in svg
    assert 'stroke-dasharray="6 4"' in svg


def test_should_skip_missing_values(curves):
    svg = svg_plot.render_chart(curves, "DOF", "lambda", "dof")

    polylines = ET.fromstring(svg).findall(f"{SVG_NS}polyline")
    assert len(polylines[1].get("points").split()) == 3


def test_should_escape_titles():
    svg = svg_plot.render_chart(
        [svg_plot.Series("risk <st>", [1.0, 2.0], [0.1, 0.2])], "a & b", "x", "y", log_x=False
    )

    assert "a &amp; b" in svg
    assert "risk &lt;st&gt;" in svg
    ET.fromstring(svg)


def test_should_render_flat_series():
    svg = svg_plot.render_chart([svg_plot.Series("flat", [0.1, 1.0], [2.0, 2.0])], "t", "x", "y")

    assert "<polyline" in svg


def test_should_raise_when_nothing_to_plot():
    with pytest.raises(ValueError, match="Nothing to plot"):
        svg_plot.render_chart([svg_plot.Series("empty", [0.1], [None])], "t", "x", "y")
