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

"""Degrees of freedom, SURE and noise-variance estimates for thresholding rules.

Coefficients follow b_hat_k ~ N(b_k, tau^2) with tau^2 = sigma2 / n, and DOF is
reported in squared observation units: DOF = sigma2 * sum_k d beta_k / d b_hat_k.
"""

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate
from scipy.stats import norm

from . import exceptions
from .threshold_ops import (
    FloatArray,
    ThresholdRule,
    Variant,
    active_mask,
    apply_array,
    as_coefficients,
    excess_vector,
)

MAD_CONSISTENCY = 0.6744897501


@dataclass(frozen=True)
class DofBreakdown:
    """d1 is the active-count term, d2 the excess (search) term."""

    d1: float
    d2: float
    k_hat: float

    @property
    def total(self) -> float:
        return self.d1 + self.d2

    def to_dict(self) -> dict[str, float]:
        return {"d1": self.d1, "d2": self.d2, "total": self.total, "k_hat": self.k_hat}


@dataclass(frozen=True)
class SureReport:
    residual: float
    sigma2: float
    dof: DofBreakdown
    n: int

    @property
    def sure(self) -> float:
        return self.residual - self.sigma2 + 2.0 * self.dof.total / self.n

    def to_dict(self) -> dict[str, Any]:
        return {
            "residual": self.residual,
            "sigma2": self.sigma2,
            "dof": self.dof.to_dict(),
            "sure": self.sure,
            "n": self.n,
        }


def _require_data_driven(rule: ThresholdRule) -> None:
    if rule.variant is Variant.HT:
        raise exceptions.NoDataDrivenDofError(rule.variant.value)


def _check_sigma2(sigma2: ArrayLike) -> None:
    arr = np.asarray(sigma2, dtype=np.float64)
    if not np.all(arr >= 0.0):
        raise exceptions.InvalidNoiseLevelError(float(np.min(arr)))


def dof_terms(
    rule: ThresholdRule, bhat: ArrayLike, sigma2: ArrayLike
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Row-wise (d1, d2, k_hat) over the last axis of ``bhat``.

    ``sigma2`` broadcasts against the leading axes.
    """
    _require_data_driven(rule)
    _check_sigma2(sigma2)
    bhat = np.asarray(bhat, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    k_hat = np.count_nonzero(active_mask(rule, bhat), axis=-1).astype(np.float64)
    excess = excess_vector(rule, bhat).sum(axis=-1)
    return sigma2 * k_hat, sigma2 * excess, k_hat


def sure_terms(
    rule: ThresholdRule, bhat: ArrayLike, sigma2: ArrayLike
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Row-wise (sure, residual, d1, d2) over the last axis of ``bhat``."""
    d1, d2, _ = dof_terms(rule, bhat, sigma2)
    bhat = np.asarray(bhat, dtype=np.float64)
    n = bhat.shape[-1]
    residual = np.sum((bhat - apply_array(rule, bhat)) ** 2, axis=-1)
    sure_value = residual - np.asarray(sigma2, dtype=np.float64) + 2.0 * (d1 + d2) / n
    return sure_value, residual, d1, d2


def dof(rule: ThresholdRule, bhat: ArrayLike, sigma2: float) -> DofBreakdown:
    """Stein degrees of freedom of ``rule`` at one coefficient vector.

    Args:
        rule: Any rule except hard thresholding.
        bhat: Least-squares coefficients.
        sigma2: Noise variance used to scale both terms.

    Returns:
        ``d1 = sigma2 * k_hat`` and ``d2 = sigma2 * sum(excess)``.

    Raises:
        NoDataDrivenDofError: ``rule`` is hard thresholding.
        InvalidNoiseLevelError: ``sigma2`` is negative.
    """
    bhat = as_coefficients(bhat, "bhat")
    d1, d2, k_hat = dof_terms(rule, bhat, sigma2)
    return DofBreakdown(float(d1), float(d2), float(k_hat))


def sure(rule: ThresholdRule, bhat: ArrayLike, sigma2: float) -> SureReport:
    """SURE for one coefficient vector.

    The residual is ``||b_hat - beta_hat||^2`` and the estimate is
    ``residual - sigma2 + 2 * (d1 + d2) / n``.

    Raises:
        NoDataDrivenDofError: ``rule`` is hard thresholding.
    """
    bhat = as_coefficients(bhat, "bhat")
    _, residual, d1, d2 = sure_terms(rule, bhat, sigma2)
    k_hat = float(np.count_nonzero(active_mask(rule, bhat)))
    breakdown = DofBreakdown(float(d1), float(d2), k_hat)
    return SureReport(float(residual), float(sigma2), breakdown, bhat.size)


def _tau(sigma2: float, n: int) -> float:
    return math.sqrt(sigma2 / n)


def _check_theory_inputs(sigma2: float, lambdas: FloatArray) -> None:
    if not sigma2 > 0.0:
        raise exceptions.InvalidNoiseLevelError(sigma2, allow_zero=False)
    if lambdas.size == 0:
        raise exceptions.EmptyGridError("lambda")
    if not np.all(lambdas > 0.0):
        raise exceptions.InvalidRuleError("ht", "lambda must be positive")


def ht_dof_curve(
    b: ArrayLike, sigma2: float, lambdas: ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Closed-form hard-thresholding (d1, d2) for each level in ``lambdas``.

    d1 = sigma2 * E k_hat; d2 = sigma2 * sum_k lam * (phi_b,tau(lam) + phi_b,tau(-lam)),
    the search degrees of freedom. Both need the true coefficients ``b``.
    """
    b = as_coefficients(b, "b")
    lam = np.atleast_1d(np.asarray(lambdas, dtype=np.float64))
    _check_theory_inputs(sigma2, lam)
    tau = _tau(sigma2, b.size)
    lam_col = lam[:, None]
    upper = norm.sf((lam_col - b) / tau) + norm.sf((lam_col + b) / tau)
    density = norm.pdf(lam_col, loc=b, scale=tau) + norm.pdf(-lam_col, loc=b, scale=tau)
    d1 = sigma2 * upper.sum(axis=1)
    d2 = sigma2 * (lam_col * density).sum(axis=1)
    return d1, d2


def ht_dof_theoretical(b: ArrayLike, sigma2: float, lam: float) -> DofBreakdown:
    """Closed-form hard-thresholding DOF at a single level.

    Args:
        b: True coefficients.
        sigma2: Noise variance, strictly positive.
        lam: Threshold level.

    Returns:
        ``d1`` is ``sigma2`` times the expected active count and ``d2`` the
        search degrees of freedom; ``k_hat`` is the expected active count.
    """
    d1, d2 = ht_dof_curve(b, sigma2, [lam])
    return DofBreakdown(float(d1[0]), float(d2[0]), float(d1[0] / sigma2))


def sst_dof_expected(b: ArrayLike, sigma2: float, lam: float, m: int) -> DofBreakdown:
    """Exact E[dof(SST)] under b_hat_k ~ N(b_k, tau^2), by quadrature.

    Components sharing |b_k| are integrated once.

    Args:
        b: True coefficients; ``tau^2 = sigma2 / len(b)``.
        sigma2: Noise variance, strictly positive.
        lam: Threshold level.
        m: Odd positive order.

    Raises:
        InvalidRuleError: ``lam`` or ``m`` is out of range.
        InvalidNoiseLevelError: ``sigma2`` is not positive.
    """
    rule = ThresholdRule.scaled_soft(lam, m)
    b = as_coefficients(b, "b")
    if not sigma2 > 0.0:
        raise exceptions.InvalidNoiseLevelError(sigma2, allow_zero=False)
    tau = _tau(sigma2, b.size)
    lam, m = rule.lam, rule.m
    magnitudes, counts = np.unique(np.abs(b), return_counts=True)

    expected_active = 0.0
    expected_excess = 0.0
    for c, count in zip(magnitudes, counts, strict=True):
        expected_active += count * (norm.sf((lam - c) / tau) + norm.sf((lam + c) / tau))

        def integrand(u, c=c):
            weight = m * (lam / u) ** (m + 1)
            return weight * (norm.pdf(u, loc=c, scale=tau) + norm.pdf(u, loc=-c, scale=tau))

        upper = max(c, lam) + 40.0 * tau
        candidates = (lam * (1 + 1 / (m + 1)), lam * (1 + 4 / (m + 1)), c)
        points = [p for p in candidates if lam < p < upper]
        value, _ = integrate.quad(
            integrand, lam, upper, points=points or None, limit=200, epsabs=1e-13, epsrel=1e-10
        )
        expected_excess += count * value

    return DofBreakdown(sigma2 * expected_active, sigma2 * expected_excess, expected_active)


def _zero_index_array(zero_index_set: Iterable[int], n: int) -> np.ndarray:
    indices = sorted(set(int(k) for k in zero_index_set))
    if not indices:
        raise exceptions.EmptySelectionSetError("zero index set")
    if indices[0] < 1 or indices[-1] > n:
        raise exceptions.DimensionMismatchError("zero index set range", n, indices[-1])
    return np.asarray(indices, dtype=np.intp) - 1


def estimate_sigma2(bhat: ArrayLike, zero_index_set: Iterable[int]) -> Any:
    """Unbiased sigma2 from null components: (n / |J|) * sum_{k in J} b_hat_k^2.

    ``zero_index_set`` is 1-based. Accepts a single vector (returns a float) or
    rows of vectors (returns an array).

    Raises:
        EmptySelectionSetError: ``zero_index_set`` is empty.
        DimensionMismatchError: An index falls outside ``1..n``.
    """
    bhat = np.asarray(bhat, dtype=np.float64)
    n = bhat.shape[-1]
    idx = _zero_index_array(zero_index_set, n)
    estimate = n * np.mean(bhat[..., idx] ** 2, axis=-1)
    return float(estimate) if bhat.ndim == 1 else estimate


def estimate_sigma_mad(detail: ArrayLike, n: int | None = None) -> Any:
    """sigma2 from the median absolute coefficient: (sqrt(n) * median|d| / 0.6745)^2.

    ``n`` is the design size and defaults to the number of coefficients given.
    """
    detail = np.asarray(detail, dtype=np.float64)
    if detail.size == 0 or detail.shape[-1] == 0:
        raise exceptions.EmptySelectionSetError("coefficient set")
    n = detail.shape[-1] if n is None else n
    sigma = math.sqrt(n) * np.median(np.abs(detail), axis=-1) / MAD_CONSISTENCY
    estimate = sigma * sigma
    return float(estimate) if detail.ndim == 1 else estimate


def estimate_sigma_mad_on(bhat: ArrayLike, zero_index_set: Iterable[int]) -> Any:
    bhat = np.asarray(bhat, dtype=np.float64)
    n = bhat.shape[-1]
    idx = _zero_index_array(zero_index_set, n)
    return estimate_sigma_mad(bhat[..., idx], n=n)
