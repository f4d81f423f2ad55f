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

"""Componentwise thresholding operators for orthogonal designs.

All kernels broadcast: ``u`` and the level ``lam`` may be arrays of any
compatible shape. The active region is the closed set ``|u| >= lam``.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import exceptions

FloatArray = NDArray[np.float64]


class Variant(str, Enum):
    HT = "ht"
    ST = "st"
    NG = "ng"
    FT = "ft"
    SST = "sst"
    AL = "al"


STEIN_VARIANTS = frozenset({Variant.ST, Variant.NG, Variant.FT, Variant.SST, Variant.AL})


def as_coefficients(values: ArrayLike, name: str = "coefficients") -> FloatArray:
    """Return ``values`` as a 1-D float64 array with finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def hard(u: ArrayLike, lam: ArrayLike) -> FloatArray:
    u = np.asarray(u, dtype=np.float64)
    return np.where(np.abs(u) >= lam, u, 0.0)


def soft(u: ArrayLike, lam: ArrayLike) -> FloatArray:
    u = np.asarray(u, dtype=np.float64)
    return np.sign(u) * np.maximum(np.abs(u) - lam, 0.0)


def _power_shrink(u: ArrayLike, lam: ArrayLike, power: float) -> FloatArray:
    # (1 - (lam / |u|)^power)_+ * u
    u = np.asarray(u, dtype=np.float64)
    a = np.abs(u)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        factor = 1.0 - (np.asarray(lam, dtype=np.float64) / a) ** power
    factor = np.where(a > 0.0, np.maximum(factor, 0.0), 0.0)
    return factor * u


def garrote(u: ArrayLike, lam: ArrayLike) -> FloatArray:
    return _power_shrink(u, lam, 2.0)


def scaled_soft(u: ArrayLike, lam: ArrayLike, m: int) -> FloatArray:
    return _power_shrink(u, lam, float(m + 1))


def adaptive_lasso(u: ArrayLike, lambda_r: ArrayLike, gamma_al: float) -> FloatArray:
    power = gamma_al + 1.0
    return _power_shrink(u, np.asarray(lambda_r, dtype=np.float64) ** (1.0 / power), power)


def firm(u: ArrayLike, lam: ArrayLike, gamma: float) -> FloatArray:
    u = np.asarray(u, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    inner = gamma / (gamma - 1.0) * soft(u, lam)
    return np.where(np.abs(u) >= gamma * lam, u, inner)


def hard_jump(lam: ArrayLike, u: ArrayLike) -> Any:
    """Step part M of hard thresholding, so that H = S + M everywhere.

    Returns a float for scalar ``u`` and an array otherwise.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    lam_arr = np.asarray(lam, dtype=np.float64)
    out = np.where(u_arr >= lam_arr, lam_arr, np.where(u_arr <= -lam_arr, -lam_arr, 0.0))
    if np.ndim(out) == 0:
        return float(out)
    return out


def ideal_scaling(lam: float, u: float) -> float:
    """Scaling that turns soft thresholding back into the raw value: w * S(u) = u."""
    if lam <= 0.0 or abs(u) <= lam:
        raise exceptions.ScalingDomainError(lam, u)
    a = abs(u)
    return a / (a - lam)


def taylor_scaling(lam: float, m: int, u: float) -> float:
    """Order-m truncation of the ideal scaling; m + 1 below the threshold."""
    if not lam > 0.0:
        raise exceptions.InvalidRuleError("sst", f"lambda must be positive, got {lam}")
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise exceptions.InvalidRuleError("sst", f"m must be a positive integer, got {m}")
    m = int(m)
    if abs(u) < lam:
        return float(m + 1)
    ratio = lam / abs(u)
    return 1.0 + math.fsum(ratio**j for j in range(1, m + 1))


@dataclass(frozen=True)
class ThresholdRule:
    """One estimator family with its hyper-parameters.

    ``lam`` is the threshold level in coefficient units. For adaptive LASSO it is
    derived from ``lambda_r`` and ``gamma_al`` as ``lambda_r ** (1 / (gamma_al + 1))``.
    """

    variant: Variant
    lam: float | None = None
    gamma: float | None = None
    m: int | None = None
    lambda_r: float | None = None
    gamma_al: float | None = None

    def __post_init__(self):
        try:
            variant = Variant(self.variant)
        except ValueError:
            known = ", ".join(v.value for v in Variant)
            raise exceptions.InvalidRuleError(
                str(self.variant), f"unknown method (expected one of {known})"
            ) from None
        object.__setattr__(self, "variant", variant)

        if variant is Variant.AL:
            self._validate_adaptive_lasso()
            return

        if self.lam is None or not _positive_finite(self.lam):
            raise exceptions.InvalidRuleError(
                variant.value, f"lambda must be positive, got {self.lam}"
            )
        object.__setattr__(self, "lam", float(self.lam))

        if variant is Variant.FT:
            if self.gamma is None or not _finite(self.gamma) or self.gamma <= 1.0:
                raise exceptions.InvalidRuleError("ft", f"gamma must be > 1, got {self.gamma}")
            object.__setattr__(self, "gamma", float(self.gamma))
        elif variant is Variant.SST:
            m = self.m
            if m is None or isinstance(m, bool) or not float(m).is_integer() or m < 1:
                raise exceptions.InvalidRuleError("sst", f"m must be a positive integer, got {m}")
            if int(m) % 2 == 0:
                raise exceptions.InvalidRuleError("sst", f"m must be odd, got {int(m)}")
            object.__setattr__(self, "m", int(m))

    def _validate_adaptive_lasso(self) -> None:
        if self.gamma_al is None or not _positive_finite(self.gamma_al):
            raise exceptions.InvalidRuleError("al", f"gamma must be > 0, got {self.gamma_al}")
        gamma_al = float(self.gamma_al)
        lambda_r = self.lambda_r
        if lambda_r is None and self.lam is not None and _positive_finite(self.lam):
            lambda_r = float(self.lam) ** (gamma_al + 1.0)
        if lambda_r is None or not _positive_finite(lambda_r):
            raise exceptions.InvalidRuleError(
                "al", f"lambda_R must be positive, got {self.lambda_r}"
            )
        lambda_r = float(lambda_r)
        object.__setattr__(self, "gamma_al", gamma_al)
        object.__setattr__(self, "lambda_r", lambda_r)
        object.__setattr__(self, "lam", lambda_r ** (1.0 / (gamma_al + 1.0)))

    @classmethod
    def hard(cls, lam: float) -> "ThresholdRule":
        return cls(Variant.HT, lam)

    @classmethod
    def soft(cls, lam: float) -> "ThresholdRule":
        return cls(Variant.ST, lam)

    @classmethod
    def garrote(cls, lam: float) -> "ThresholdRule":
        return cls(Variant.NG, lam)

    @classmethod
    def firm(cls, lam: float, gamma: float) -> "ThresholdRule":
        return cls(Variant.FT, lam, gamma=gamma)

    @classmethod
    def scaled_soft(cls, lam: float, m: int) -> "ThresholdRule":
        return cls(Variant.SST, lam, m=m)

    @classmethod
    def adaptive_lasso(cls, lambda_r: float, gamma_al: float) -> "ThresholdRule":
        return cls(Variant.AL, lambda_r=lambda_r, gamma_al=gamma_al)

    @classmethod
    def build(
        cls,
        method: str,
        lam: float | None = None,
        *,
        gamma: float | None = None,
        m: int | None = None,
        lambda_r: float | None = None,
    ) -> "ThresholdRule":
        """Build a rule from flat CLI/config style arguments.

        For adaptive LASSO ``gamma`` is the AL exponent and ``lam`` may stand in
        for ``lambda_r`` (then ``lambda_r = lam ** (gamma + 1)``).

        Args:
            method: One of ``ht``, ``st``, ``ng``, ``ft``, ``sst`` or ``al``.
            lam: Threshold level.
            gamma: ``ft`` band ratio or ``al`` exponent.
            m: ``sst`` order.
            lambda_r: ``al`` penalty level.

        Raises:
            InvalidRuleError: The method is unknown or a parameter is out of range.
        """
        variant = Variant(method) if method in Variant._value2member_map_ else method
        if variant == Variant.AL:
            return cls(Variant.AL, lam=lam, lambda_r=lambda_r, gamma_al=gamma)
        return cls(variant, lam, gamma=gamma, m=m)

    @property
    def hyper(self) -> float | int | None:
        if self.variant is Variant.FT:
            return self.gamma
        if self.variant is Variant.SST:
            return self.m
        if self.variant is Variant.AL:
            return self.gamma_al
        return None

    @property
    def label(self) -> str:
        if self.variant is Variant.FT:
            return f"ft(gamma={self.gamma:g})"
        if self.variant is Variant.SST:
            return f"sst(m={self.m})"
        if self.variant is Variant.AL:
            return f"al(gamma={self.gamma_al:g})"
        return self.variant.value

    def with_lambda(self, lam: float) -> "ThresholdRule":
        if self.variant is Variant.AL:
            return ThresholdRule(
                Variant.AL, lambda_r=float(lam) ** (self.gamma_al + 1.0), gamma_al=self.gamma_al
            )
        return replace(self, lam=lam)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"method": self.variant.value, "lambda": self.lam}
        if self.variant is Variant.FT:
            data["gamma"] = self.gamma
        elif self.variant is Variant.SST:
            data["m"] = self.m
        elif self.variant is Variant.AL:
            data["lambda_r"] = self.lambda_r
            data["gamma"] = self.gamma_al
        return data


def _finite(value: Any) -> bool:
    try:
        return math.isfinite(float(value))
    except (TypeError, ValueError):
        return False


def _positive_finite(value: Any) -> bool:
    return _finite(value) and float(value) > 0.0


def effective_lambda(rule: ThresholdRule) -> float:
    return rule.lam


def apply_array(rule: ThresholdRule, u: ArrayLike) -> FloatArray:
    """Apply ``rule`` elementwise to an array of any shape."""
    v = rule.variant
    if v is Variant.HT:
        return hard(u, rule.lam)
    if v is Variant.ST:
        return soft(u, rule.lam)
    if v is Variant.NG:
        return garrote(u, rule.lam)
    if v is Variant.FT:
        return firm(u, rule.lam, rule.gamma)
    if v is Variant.SST:
        return scaled_soft(u, rule.lam, rule.m)
    return adaptive_lasso(u, rule.lambda_r, rule.gamma_al)


def apply(rule: ThresholdRule, u: float) -> float:
    return float(apply_array(rule, u))


def apply_vector(rule: ThresholdRule, bhat: ArrayLike) -> FloatArray:
    """Apply ``rule`` to a coefficient vector.

    Args:
        rule: Any thresholding rule.
        bhat: One-dimensional, non-empty and finite coefficients.

    Returns:
        The thresholded coefficients, same length as ``bhat``.

    Raises:
        ValueError: ``bhat`` is not a non-empty finite vector.
    """
    return apply_array(rule, as_coefficients(bhat, "bhat"))


def active_mask(rule: ThresholdRule, u: ArrayLike) -> NDArray[np.bool_]:
    return np.abs(np.asarray(u, dtype=np.float64)) >= rule.lam


def excess_vector(rule: ThresholdRule, u: ArrayLike) -> FloatArray:
    """Derivative minus the active-set indicator, i.e. the per-coefficient D2 term.

    Zero off the active set and zero everywhere for soft thresholding.
    """
    v = rule.variant
    if v is Variant.HT:
        raise exceptions.NoSteinDerivativeError(v.value)

    u = np.asarray(u, dtype=np.float64)
    a = np.abs(u)
    lam = rule.lam
    active = a >= lam

    if v is Variant.ST:
        return np.zeros_like(a)
    if v is Variant.FT:
        band = 1.0 / (rule.gamma - 1.0)
        return np.where(active & (a < rule.gamma * lam), band, 0.0)

    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if v is Variant.NG:
            excess = (lam / a) ** 2.0
        elif v is Variant.SST:
            excess = rule.m * (lam / a) ** float(rule.m + 1)
        else:
            excess = rule.gamma_al * (lam / a) ** (rule.gamma_al + 1.0)
    return np.where(active, excess, 0.0)


def derivative_vector(rule: ThresholdRule, u: ArrayLike) -> FloatArray:
    """Almost-everywhere derivative of ``rule`` as used by Stein's lemma.

    At ``|u| == lam`` the active-side value is returned.

    Args:
        rule: Any rule except hard thresholding.
        u: Coefficients of any shape.

    Returns:
        Active indicator plus the excess term, elementwise.

    Raises:
        NoSteinDerivativeError: ``rule`` is hard thresholding.
    """
    excess = excess_vector(rule, u)
    return active_mask(rule, u).astype(np.float64) + excess


def derivative(rule: ThresholdRule, u: float) -> float:
    return float(derivative_vector(rule, u))
