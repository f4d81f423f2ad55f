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


class SstBridgeError(Exception):
    pass


class InvalidRuleError(SstBridgeError, ValueError):
    def __init__(self, variant: str, reason: str):
        self.variant = variant
        self.reason = reason
        super().__init__(f"Invalid {variant} rule: {reason}")


class NoSteinDerivativeError(SstBridgeError):
    def __init__(self, variant: str = "ht"):
        self.variant = variant
        super().__init__(
            f"Rule '{variant}' is discontinuous at the threshold and has no Stein derivative"
        )


class NoDataDrivenDofError(SstBridgeError):
    def __init__(self, variant: str = "ht"):
        self.variant = variant
        super().__init__(
            f"Rule '{variant}' has no data-driven DOF/SURE; "
            "its DOF needs the true coefficients (see ht_dof_theoretical)"
        )


class ScalingDomainError(SstBridgeError, ValueError):
    def __init__(self, lam: float, u: float):
        self.lam = lam
        self.u = u
        super().__init__(f"Ideal scaling is undefined for |u| <= lambda (u={u}, lambda={lam})")


class DimensionMismatchError(SstBridgeError, ValueError):
    def __init__(self, what: str, expected: int, actual: int):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"Length mismatch for {what}: expected {expected}, got {actual}")


class DesignNotOrthogonalError(SstBridgeError):
    def __init__(self, n: int, max_deviation: float, tolerance: float):
        self.n = n
        self.max_deviation = max_deviation
        self.tolerance = tolerance
        super().__init__(
            f"Design is not orthogonal: max |X^T X - {n} I| = {max_deviation:.3e} "
            f"exceeds {tolerance:.0e}"
        )


class EmptySelectionSetError(SstBridgeError, ValueError):
    def __init__(self, what: str):
        self.what = what
        super().__init__(f"Cannot estimate noise variance from an empty {what}")


class EmptyGridError(SstBridgeError, ValueError):
    def __init__(self, grid_name: str):
        self.grid_name = grid_name
        super().__init__(f"Grid '{grid_name}' must contain at least one value")


class ConfigFileNotFoundError(SstBridgeError):
    def __init__(self, config_path: str):
        self.config_path = config_path
        super().__init__(f"Config file not found: {config_path}")


class ConfigValidationError(SstBridgeError):
    def __init__(self, message: str):
        super().__init__(f"Configuration error: {message}")


class InvalidPresetError(SstBridgeError):
    def __init__(self, preset: str, known: list[str]):
        self.preset = preset
        self.known = known
        super().__init__(f"Unknown preset '{preset}'. Known presets: {', '.join(known)}")


class InputFileError(SstBridgeError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Cannot read '{path}': {reason}")


class SchemaMismatchError(SstBridgeError):
    def __init__(self, path: str, missing: list[str] | None = None, reason: str | None = None):
        self.path = path
        self.missing = missing or []
        if self.missing:
            detail = f"missing columns: {', '.join(self.missing)}"
        else:
            detail = reason or "unexpected layout"
        self.reason = detail
        super().__init__(f"'{path}' is not a sweep CSV ({detail})")


class InvalidDesignSizeError(SstBridgeError, ValueError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"Design size must be an even integer >= 4, got {n}")


class InvalidNoiseLevelError(SstBridgeError, ValueError):
    def __init__(self, sigma2: float, allow_zero: bool = True):
        self.sigma2 = sigma2
        bound = ">= 0" if allow_zero else "> 0"
        super().__init__(f"Noise variance sigma2 must be {bound}, got {sigma2}")
