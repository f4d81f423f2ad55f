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
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import exceptions, risk_sure
from .threshold_ops import FloatArray, ThresholdRule, Variant, as_coefficients


class Candidate(NamedTuple):
    rule: ThresholdRule
    lam: float
    hyper_index: int


@dataclass(frozen=True)
class GridScores:
    """SURE and DOF per candidate on the last axis; leading axes are signals."""

    sure: FloatArray
    dof_total: FloatArray
    lam: FloatArray
    hyper_index: NDArray[np.intp]


@dataclass(frozen=True)
class SelectionResult:
    rule: ThresholdRule
    sure: float | None
    k_hat: int
    active_set: frozenset[int]
    searched: int
    dof: risk_sure.DofBreakdown | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "rule": self.rule.to_dict(),
            "sure": self.sure,
            "k_hat": self.k_hat,
            "active_set": sorted(self.active_set),
            "searched": self.searched,
            "dof": self.dof.to_dict() if self.dof else None,
        }


def active_set(bhat: ArrayLike, lam: float) -> frozenset[int]:
    """1-based indices with |b_hat_k| >= lam."""
    bhat = as_coefficients(bhat, "bhat")
    return frozenset(int(k) + 1 for k in np.flatnonzero(np.abs(bhat) >= lam))


def universal_threshold_rows(sigma2: ArrayLike, n: int) -> FloatArray:
    """Row-wise ``sqrt(2 * sigma2 * log(n) / n)``.

    Args:
        sigma2: Noise variance per signal; zero rows give a zero threshold.
        n: Design size.

    Returns:
        One threshold per entry of ``sigma2``.

    Raises:
        InvalidNoiseLevelError: An entry is negative or not finite.
        ValueError: ``n`` is below 2.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2 for the universal threshold, got {n}")
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    bad = ~(np.isfinite(sigma2) & (sigma2 >= 0.0))
    if np.any(bad):
        raise exceptions.InvalidNoiseLevelError(float(sigma2[bad].flat[0]))
    return np.sqrt(2.0 * sigma2 * math.log(n) / n)


def universal_threshold(sigma2: float, n: int) -> float:
    if not sigma2 > 0.0:
        raise exceptions.InvalidNoiseLevelError(sigma2, allow_zero=False)
    return float(universal_threshold_rows(sigma2, n))


def candidate_rules(
    family: str | Variant,
    lambda_grid: Sequence[float],
    hyper_grid: Sequence[float] | None = None,
) -> list[Candidate]:
    """Expand a family over its grids in (hyper, lambda) order.

    For adaptive LASSO the lambda grid is in threshold units and each hyper value
    m maps to lambda_R = lambda ** (m + 1), gamma = m.
    """
    variant = Variant(family)
    if variant is Variant.HT:
        raise exceptions.NoDataDrivenDofError(variant.value)
    if not lambda_grid:
        raise exceptions.EmptyGridError("lambda_grid")

    if variant in (Variant.ST, Variant.NG):
        return [Candidate(ThresholdRule(variant, lam), float(lam), 0) for lam in lambda_grid]

    if not hyper_grid:
        raise exceptions.EmptyGridError("gamma_grid" if variant is Variant.FT else "m_grid")

    candidates = []
    for h, hyper in enumerate(hyper_grid):
        for lam in lambda_grid:
            if variant is Variant.FT:
                rule = ThresholdRule.firm(lam, hyper)
            elif variant is Variant.SST:
                rule = ThresholdRule.scaled_soft(lam, hyper)
            else:
                rule = ThresholdRule.adaptive_lasso(float(lam) ** (hyper + 1), hyper)
            candidates.append(Candidate(rule, float(lam), h))
    return candidates


def score_grid(
    candidates: Sequence[Candidate], bhat: ArrayLike, sigma2: ArrayLike
) -> GridScores:
    bhat = np.asarray(bhat, dtype=np.float64)
    sure_cols = []
    dof_cols = []
    for candidate in candidates:
        sure_value, _, d1, d2 = risk_sure.sure_terms(candidate.rule, bhat, sigma2)
        sure_cols.append(sure_value)
        dof_cols.append(d1 + d2)
    return GridScores(
        sure=np.stack(sure_cols, axis=-1),
        dof_total=np.stack(dof_cols, axis=-1),
        lam=np.asarray([c.lam for c in candidates], dtype=np.float64),
        hyper_index=np.asarray([c.hyper_index for c in candidates], dtype=np.intp),
    )


def pick_best(scores: GridScores) -> Any:
    """Index of the minimum SURE along the last axis.

    Ties go to the larger lambda, then the smaller DOF, then the earlier hyper value.
    """
    shape = scores.sure.shape
    keys = np.stack(
        [
            np.broadcast_to(scores.hyper_index, shape),
            scores.dof_total,
            np.broadcast_to(-scores.lam, shape),
            scores.sure,
        ]
    )
    best = np.lexsort(keys, axis=-1)[..., 0]
    return int(best) if np.ndim(best) == 0 else best


def grid_select(
    family: str | Variant,
    lambda_grid: Sequence[float],
    hyper_grid: Sequence[float] | None,
    bhat: ArrayLike,
    sigma2: float,
) -> SelectionResult:
    """Pick the SURE minimizer of one family over its grids.

    Args:
        family: Any method except ``ht``.
        lambda_grid: Threshold levels in coefficient units.
        hyper_grid: gamma values for ``ft``, orders for ``sst`` and ``al``;
            ignored for ``st`` and ``ng``.
        bhat: Least-squares coefficients of one signal.
        sigma2: Noise variance used by SURE.

    Returns:
        The chosen rule with its SURE, active set and DOF split.

    Raises:
        NoDataDrivenDofError: ``family`` is hard thresholding.
        EmptyGridError: A required grid is empty.
        InvalidRuleError: A grid value is out of range for the family.
    """
    bhat = as_coefficients(bhat, "bhat")
    candidates = candidate_rules(family, lambda_grid, hyper_grid)
    scores = score_grid(candidates, bhat, sigma2)
    best = pick_best(scores)
    rule = candidates[best].rule
    report = risk_sure.sure(rule, bhat, sigma2)
    chosen = active_set(bhat, rule.lam)
    return SelectionResult(
        rule=rule,
        sure=float(scores.sure[best]),
        k_hat=len(chosen),
        active_set=chosen,
        searched=len(candidates),
        dof=report.dof,
    )


def universal_select(bhat: ArrayLike, sigma2: float) -> SelectionResult:
    """Hard thresholding at the universal level; no SURE is available for it."""
    bhat = as_coefficients(bhat, "bhat")
    rule = ThresholdRule.hard(universal_threshold(sigma2, bhat.size))
    chosen = active_set(bhat, rule.lam)
    return SelectionResult(rule=rule, sure=None, k_hat=len(chosen), active_set=chosen, searched=1)


def selection_error(k_star: Iterable[int], k_hat: Iterable[int]) -> int:
    return len(set(k_star) ^ set(k_hat))


def actual_risk(beta_hat: ArrayLike, b_true: ArrayLike) -> Any:
    """||beta_hat - b||^2 over the last axis; a float for single vectors."""
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    b_true = np.asarray(b_true, dtype=np.float64)
    if beta_hat.shape[-1] != b_true.shape[-1]:
        raise exceptions.DimensionMismatchError(
            "estimate vs truth", b_true.shape[-1], beta_hat.shape[-1]
        )
    risk = np.sum((beta_hat - b_true) ** 2, axis=-1)
    return float(risk) if np.ndim(risk) == 0 else risk
