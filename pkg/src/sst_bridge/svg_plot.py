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

"""Self-contained SVG line charts for sweep curves.

Output depends only on the input numbers: fixed canvas, fixed palette and
fixed-precision coordinates.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from xml.sax.saxutils import escape

WIDTH = 720
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 170
MARGIN_TOP = 40
MARGIN_BOTTOM = 55

PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
]


@dataclass(frozen=True)
class Series:
    name: str
    x: Sequence[float]
    y: Sequence[float | None]
    dashed: bool = False


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _points(series: Series, log_x: bool) -> list[tuple[float, float]]:
    points = []
    for x, y in zip(series.x, series.y, strict=True):
        if y is None or not math.isfinite(y) or not math.isfinite(x):
            continue
        if log_x and x <= 0.0:
            continue
        points.append((math.log10(x) if log_x else x, y))
    return points


def _y_range(values: list[float]) -> tuple[float, float]:
    low, high = min(values), max(values)
    if low == high:
        return low - 1.0, high + 1.0
    pad = 0.05 * (high - low)
    return low - pad, high + pad


def render_chart(
    series: Sequence[Series],
    title: str,
    x_label: str,
    y_label: str,
    log_x: bool = True,
) -> str:
    """Render one polyline per series with axes, decade ticks on a log x axis, and a legend."""
    plotted = [(s, _points(s, log_x)) for s in series]
    all_points = [p for _, pts in plotted for p in pts]
    if not all_points:
        raise ValueError("Nothing to plot: every series is empty")

    xs = [p[0] for p in all_points]
    x_low, x_high = min(xs), max(xs)
    if log_x:
        x_low, x_high = math.floor(x_low), math.ceil(x_high)
    if x_low == x_high:
        x_low, x_high = x_low - 1.0, x_high + 1.0
    y_low, y_high = _y_range([p[1] for p in all_points])

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_low) / (x_high - x_low) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (y_high - y) / (y_high - y_low) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15">'
        f"{escape(title)}</text>",
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333333"/>',
    ]

    if log_x:
        x_ticks = [(float(e), f"1e{e}") for e in range(int(x_low), int(x_high) + 1)]
    else:
        x_ticks = [
            (x_low + i * (x_high - x_low) / 5, f"{x_low + i * (x_high - x_low) / 5:.3g}")
            for i in range(6)
        ]
    for value, label in x_ticks:
        px = _fmt(sx(value))
        out.append(
            f'<line x1="{px}" y1="{MARGIN_TOP}" x2="{px}" y2="{MARGIN_TOP + plot_h}" '
            'stroke="#dddddd"/>'
        )
        out.append(
            f'<text x="{px}" y="{MARGIN_TOP + plot_h + 18}" text-anchor="middle">{label}</text>'
        )

    for i in range(6):
        value = y_low + i * (y_high - y_low) / 5
        py = _fmt(sy(value))
        out.append(
            f'<line x1="{MARGIN_LEFT}" y1="{py}" x2="{MARGIN_LEFT + plot_w}" y2="{py}" '
            'stroke="#eeeeee"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{py}" text-anchor="end" '
            f'dominant-baseline="middle">{value:.3g}</text>'
        )

    out.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">'
        f"{escape(x_label)}</text>"
    )
    out.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )

    legend_x = MARGIN_LEFT + plot_w + 15
    for i, (s, pts) in enumerate(plotted):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        if pts:
            coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} '
                f'points="{coords}"/>'
            )
        ly = MARGIN_TOP + 12 + 20 * i
        out.append(
            f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 24}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"{dash}/>'
        )
        out.append(
            f'<text x="{legend_x + 30}" y="{ly}" dominant-baseline="middle">'
            f"{escape(s.name)}</text>"
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
