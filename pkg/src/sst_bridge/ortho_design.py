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

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from . import exceptions
from .threshold_ops import FloatArray

GRAM_TOLERANCE = 1e-8

BUILTIN_TRIG = "builtin-trig"
USER_LOADED = "user-loaded"


def gram_deviation(matrix: ArrayLike) -> float:
    """Return max |X^T X - n I| for a square matrix."""
    x = np.asarray(matrix, dtype=np.float64)
    n = x.shape[0]
    return float(np.max(np.abs(x.T @ x - n * np.eye(n))))


@dataclass(frozen=True, eq=False)
class OrthogonalDesign:
    """Square design with X^T X = n I, validated on construction."""

    matrix: FloatArray = field(repr=False)
    provenance: str = BUILTIN_TRIG

    def __post_init__(self):
        x = np.array(self.matrix, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise exceptions.DimensionMismatchError(
                "design columns", x.shape[0] if x.ndim else 0, x.shape[-1] if x.ndim else 0
            )
        n = x.shape[0]
        if n < 4 or n % 2:
            raise exceptions.InvalidDesignSizeError(n)
        if not np.all(np.isfinite(x)):
            raise exceptions.DesignNotOrthogonalError(n, math.inf, GRAM_TOLERANCE)
        deviation = gram_deviation(x)
        if deviation > GRAM_TOLERANCE:
            raise exceptions.DesignNotOrthogonalError(n, deviation, GRAM_TOLERANCE)
        x.setflags(write=False)
        object.__setattr__(self, "matrix", x)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def columns(self) -> list[FloatArray]:
        return [self.matrix[:, j] for j in range(self.n)]


def build_trig_design(n: int) -> OrthogonalDesign:
    """Real Fourier basis sampled at t_i = 2*pi*(i-1)/n.

    Column order: constant, then sqrt(2)cos(f t), sqrt(2)sin(f t) for
    f = 1..n/2-1, then the alternating column cos(n t / 2).
    """
    if isinstance(n, bool) or int(n) != n or n < 4 or n % 2:
        raise exceptions.InvalidDesignSizeError(n)
    n = int(n)
    t = 2.0 * np.pi * np.arange(n) / n
    x = np.empty((n, n), dtype=np.float64)
    x[:, 0] = 1.0
    root2 = math.sqrt(2.0)
    for f in range(1, n // 2):
        x[:, 2 * f - 1] = root2 * np.cos(f * t)
        x[:, 2 * f] = root2 * np.sin(f * t)
    # exact +-1 instead of cos(pi * i)
    x[:, n - 1] = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return OrthogonalDesign(x, BUILTIN_TRIG)


def _check_length(design: OrthogonalDesign, values: FloatArray, what: str) -> None:
    if values.shape[-1] != design.n:
        raise exceptions.DimensionMismatchError(what, design.n, values.shape[-1])


def analyze(design: OrthogonalDesign, y: ArrayLike) -> FloatArray:
    """Least-squares coefficients X^T y / n.

    Args:
        design: Orthogonal design of size n.
        y: Signal of length n, or rows of such signals.

    Returns:
        Coefficients with the same leading shape as ``y``.

    Raises:
        DimensionMismatchError: The last axis of ``y`` is not n long.
    """
    y = np.asarray(y, dtype=np.float64)
    _check_length(design, y, "signal")
    return y @ design.matrix / design.n


def synthesize(design: OrthogonalDesign, beta: ArrayLike) -> FloatArray:
    beta = np.asarray(beta, dtype=np.float64)
    _check_length(design, beta, "coefficients")
    return beta @ design.matrix.T


def generate_observation(
    design: OrthogonalDesign, b: ArrayLike, sigma2: float, rng: np.random.Generator
) -> FloatArray:
    """Draw y = X b + eps with eps ~ N(0, sigma2 I) from ``rng``."""
    if not sigma2 >= 0.0:
        raise exceptions.InvalidNoiseLevelError(sigma2)
    mean = synthesize(design, b)
    if sigma2 == 0.0:
        return mean
    return mean + math.sqrt(sigma2) * rng.standard_normal(design.n)


def _looks_numeric(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _header_lines(path: str) -> int:
    # a non-numeric first cell marks a header line
    with open(path) as f:
        for i, line in enumerate(f):
            cell = line.split(",")[0].strip()
            if cell:
                return 0 if _looks_numeric(cell) else i + 1
    return 0


def _load_table(path: str, header: bool = False) -> FloatArray:
    try:
        skip = _header_lines(path) if header else 0
        with warnings.catch_warnings():
            # empty input is reported by the callers
            warnings.simplefilter("ignore", UserWarning)
            table = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=skip, dtype=np.float64)
    except FileNotFoundError:
        raise exceptions.InputFileError(path, "file not found") from None
    except (OSError, UnicodeDecodeError) as e:
        raise exceptions.InputFileError(path, str(e)) from None
    except ValueError as e:
        raise exceptions.InputFileError(path, f"not a numeric table: {e}") from None

    bad = np.argwhere(~np.isfinite(table))
    if bad.size:
        row, col = bad[0]
        raise exceptions.InputFileError(
            path, f"row {row + 1}: non-finite value '{table[row, col]}'"
        )
    return table


def read_vector_csv(path: str) -> FloatArray:
    """Read a single-column CSV of reals. A non-numeric first row is taken as a header."""
    table = _load_table(path, header=True)
    if table.size == 0:
        raise exceptions.InputFileError(path, "no values found")
    if table.shape[1] != 1:
        raise exceptions.InputFileError(path, f"expected 1 column, got {table.shape[1]}")
    return table[:, 0]


def write_vector_csv(path: str, values: ArrayLike, header: str | None = None) -> None:
    np.savetxt(
        path, np.asarray(values, dtype=np.float64), fmt="%.17g", header=header or "", comments=""
    )


def load_design(path: str) -> OrthogonalDesign:
    """Load an n x n row-major CSV design and re-check orthogonality.

    Args:
        path: Comma-separated file with n rows of n reals and no header.

    Returns:
        The design, tagged ``USER_LOADED``.

    Raises:
        InputFileError: The file is missing, empty, non-numeric, not square, or
            its size is odd or below 4.
        DesignNotOrthogonalError: ``X^T X`` deviates from ``n I`` by more than
            ``GRAM_TOLERANCE``.
    """
    matrix = _load_table(path)
    if matrix.size == 0:
        raise exceptions.InputFileError(path, "design file is empty")
    n, columns = matrix.shape
    if columns != n:
        raise exceptions.InputFileError(
            path, f"expected {n} columns for a square design, got {columns}"
        )
    if n < 4 or n % 2:
        raise exceptions.InputFileError(path, f"design size must be even and >= 4, got {n}")
    return OrthogonalDesign(matrix, USER_LOADED)


def save_design(design: OrthogonalDesign, path: str) -> None:
    np.savetxt(path, design.matrix, delimiter=",", fmt="%.17g")
