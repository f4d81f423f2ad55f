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

"""Seeded Monte Carlo driver for threshold sweeps and model-selection runs.

Trial ``t`` draws its noise from ``SeedSequence(master_seed, spawn_key=(t,))``
only. Trials are processed in fixed-size chunks whose results land in per-trial
arrays, so summaries do not depend on the worker count or completion order.
"""

import math
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from . import logger, model_select, risk_sure
from .config import ExperimentConfig
from .ortho_design import OrthogonalDesign, analyze, build_trig_design
from .threshold_ops import FloatArray, ThresholdRule, Variant, apply_array, hard


@dataclass(frozen=True)
class CurvePoint:
    lam: float
    method: str
    risk_mean: float
    risk_sd: float
    sure_mean: float | None
    sure_sd: float | None
    dof1_mean: float
    dof2_mean: float | None
    dof_empirical: float
    ht_d1_theory: float | None
    ht_d2_theory: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "method": self.method,
            "risk_mean": self.risk_mean,
            "risk_sd": self.risk_sd,
            "sure_mean": self.sure_mean,
            "sure_sd": self.sure_sd,
            "dof1_mean": self.dof1_mean,
            "dof2_mean": self.dof2_mean,
            "dof_empirical": self.dof_empirical,
            "ht_d1_theory": self.ht_d1_theory,
            "ht_d2_theory": self.ht_d2_theory,
        }


@dataclass(frozen=True)
class MethodStats:
    method: str
    risk_mean: float
    risk_sd: float
    khat_mean: float
    khat_sd: float
    serr_mean: float
    serr_sd: float
    lambda_mean: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "risk_mean": self.risk_mean,
            "risk_sd": self.risk_sd,
            "khat_mean": self.khat_mean,
            "khat_sd": self.khat_sd,
            "serr_mean": self.serr_mean,
            "serr_sd": self.serr_sd,
            "lambda_mean": self.lambda_mean,
        }


@dataclass(frozen=True)
class McSummary:
    kind: str
    config: ExperimentConfig
    curves: list[CurvePoint] = field(default_factory=list)
    methods: list[MethodStats] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return self.config.trials

    @property
    def seed(self) -> int:
        return self.config.master_seed

    def curve(self, method: str) -> list[CurvePoint]:
        return [point for point in self.curves if point.method == method]

    def method(self, name: str) -> MethodStats:
        for stats in self.methods:
            if stats.method == name:
                return stats
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "trials": self.trials,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "curves": [point.to_dict() for point in self.curves],
            "methods": [stats.to_dict() for stats in self.methods],
        }


@dataclass(frozen=True)
class EmpiricalDof:
    """Covariance-form DOF estimate n * mean_t sum_k beta_k (b_hat_k - b_k).

    ``formula_mean`` is the mean Stein-formula DOF on the same draws and
    ``paired_stderr`` the standard error of their per-trial difference; both are
    None for hard thresholding, which has a closed-form ``theory`` instead.
    """

    value: float
    stderr: float
    trials: int
    formula_mean: float | None = None
    paired_stderr: float | None = None
    theory: float | None = None

    def __float__(self) -> float:
        return self.value


@lru_cache(maxsize=8)
def _trig_design(n: int) -> OrthogonalDesign:
    return build_trig_design(n)


def _resolve_design(config: ExperimentConfig, design: OrthogonalDesign | None) -> OrthogonalDesign:
    return design if design is not None else _trig_design(config.n)


def _chunk_ranges(trials: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(start, min(start + chunk_size, trials)) for start in range(0, trials, chunk_size)]


def _run_chunks(config: ExperimentConfig, work: Callable[[int, int], None]) -> None:
    ranges = _chunk_ranges(config.trials, config.chunk_size)
    if config.workers == 1 or len(ranges) == 1:
        for done, (start, stop) in enumerate(ranges, 1):
            work(start, stop)
            logger.debug(f"Trials {start}..{stop - 1} done ({done}/{len(ranges)} chunks)")
        return

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = {executor.submit(work, start, stop): (start, stop) for start, stop in ranges}
        for done, future in enumerate(as_completed(futures), 1):
            future.result()
            start, stop = futures[future]
            logger.debug(f"Trials {start}..{stop - 1} done ({done}/{len(ranges)} chunks)")


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def simulate_coefficients(
    config: ExperimentConfig,
    trials: Iterable[int] | None = None,
    design: OrthogonalDesign | None = None,
) -> FloatArray:
    """Draw b_hat = X^T (X b + eps) / n for each trial index; one row per trial."""
    design = _resolve_design(config, design)
    indices = list(range(config.trials) if trials is None else trials)
    b = config.b
    if config.sigma2 == 0.0:
        return np.tile(b, (len(indices), 1))
    scale = math.sqrt(config.sigma2)
    noise = np.empty((len(indices), config.n), dtype=np.float64)
    for row, t in enumerate(indices):
        noise[row] = trial_rng(config.master_seed, t).standard_normal(config.n)
    y = design.matrix @ b + scale * noise
    return analyze(design, y)


def _sigma2_rows(config: ExperimentConfig, bhat: FloatArray) -> FloatArray:
    if config.sigma2_mode == "estimated":
        return risk_sure.estimate_sigma2(bhat, config.zero_index_set)
    if config.sigma2_mode == "mad":
        return risk_sure.estimate_sigma_mad_on(bhat, config.zero_index_set)
    return np.full(bhat.shape[0], config.sigma2)


def _mean_sd(values: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Mean and S-1 standard deviation over the trial axis (0 for a single trial)."""
    mean = values.mean(axis=0)
    if values.shape[0] < 2:
        return mean, np.zeros_like(mean)
    return mean, values.std(axis=0, ddof=1)


def sweep_rules(config: ExperimentConfig) -> list[tuple[str, ThresholdRule]]:
    """One labelled base rule per curve; SST/AL expand over m_grid and FT over gamma_grid."""
    lam0 = config.lambda_grid[0]
    rules: list[tuple[str, ThresholdRule]] = []
    for method in config.methods:
        variant = Variant(method)
        if variant is Variant.SST:
            bases = [ThresholdRule.scaled_soft(lam0, m) for m in config.m_grid]
        elif variant is Variant.FT:
            bases = [ThresholdRule.firm(lam0, g) for g in config.gamma_grid]
        elif variant is Variant.AL:
            bases = [ThresholdRule.adaptive_lasso(lam0 ** (m + 1), m) for m in config.m_grid]
        else:
            bases = [ThresholdRule(variant, lam0)]
        rules.extend((rule.label, rule) for rule in bases)
    return rules


def _opt(value: Any) -> float | None:
    value = float(value)
    return None if math.isnan(value) else value


def run_sweep(config: ExperimentConfig, design: OrthogonalDesign | None = None) -> McSummary:
    """Risk, SURE and DOF curves over the lambda grid for every configured method.

    Args:
        config: Experiment settings; ``methods``, ``m_grid`` and ``gamma_grid``
            decide the curves (see ``sweep_rules``).
        design: Orthogonal design, the built-in trig basis of size ``n`` by default.

    Returns:
        A ``sweep`` summary with one ``CurvePoint`` per (curve, lambda). Hard
        thresholding has no SURE, and its ``dof2_mean`` is the covariance DOF
        minus ``dof1_mean``.
    """
    design = _resolve_design(config, design)
    rules = sweep_rules(config)
    lambdas = np.asarray(config.lambda_grid, dtype=np.float64)
    b = config.b
    n = config.n
    shape = (config.trials, len(rules), lambdas.size)
    risk = np.empty(shape)
    sure = np.full(shape, np.nan)
    d1 = np.empty(shape)
    d2 = np.full(shape, np.nan)
    cov = np.empty(shape)

    logger.progress(
        f"Sweep: {config.trials} trials x {len(rules)} curves x {lambdas.size} lambda values"
    )

    def work(start: int, stop: int) -> None:
        bhat = simulate_coefficients(config, range(start, stop), design)
        sigma2 = _sigma2_rows(config, bhat)
        for r, (_, base) in enumerate(rules):
            for g, lam in enumerate(lambdas):
                rule = base.with_lambda(float(lam))
                beta = apply_array(rule, bhat)
                risk[start:stop, r, g] = np.sum((beta - b) ** 2, axis=-1)
                cov[start:stop, r, g] = n * np.sum(beta * (bhat - b), axis=-1)
                if rule.variant is Variant.HT:
                    d1[start:stop, r, g] = sigma2 * np.count_nonzero(
                        np.abs(bhat) >= rule.lam, axis=-1
                    )
                    continue
                s, _, t1, t2 = risk_sure.sure_terms(rule, bhat, sigma2)
                sure[start:stop, r, g] = s
                d1[start:stop, r, g] = t1
                d2[start:stop, r, g] = t2

    _run_chunks(config, work)

    if config.sigma2 > 0.0:
        ht_d1, ht_d2 = risk_sure.ht_dof_curve(b, config.sigma2, lambdas)
    else:
        ht_d1 = ht_d2 = np.full(lambdas.size, np.nan)

    risk_mean, risk_sd = _mean_sd(risk)
    sure_mean, sure_sd = _mean_sd(sure)
    d1_mean = d1.mean(axis=0)
    d2_mean = d2.mean(axis=0)
    cov_mean = cov.mean(axis=0)

    curves = []
    for r, (label, base) in enumerate(rules):
        is_ht = base.variant is Variant.HT
        for g, lam in enumerate(lambdas):
            dof2 = cov_mean[r, g] - d1_mean[r, g] if is_ht else d2_mean[r, g]
            curves.append(
                CurvePoint(
                    lam=float(lam),
                    method=label,
                    risk_mean=float(risk_mean[r, g]),
                    risk_sd=float(risk_sd[r, g]),
                    sure_mean=_opt(sure_mean[r, g]),
                    sure_sd=_opt(sure_sd[r, g]),
                    dof1_mean=float(d1_mean[r, g]),
                    dof2_mean=_opt(dof2),
                    dof_empirical=float(cov_mean[r, g]),
                    ht_d1_theory=_opt(ht_d1[g]),
                    ht_d2_theory=_opt(ht_d2[g]),
                )
            )

    logger.success(f"Sweep finished ({len(curves)} curve points)")
    return McSummary(kind="sweep", config=config, curves=curves)


def _hyper_grid(config: ExperimentConfig, variant: Variant) -> list | None:
    if variant is Variant.FT:
        return list(config.gamma_grid)
    if variant in (Variant.SST, Variant.AL):
        return list(config.m_grid)
    return None


def run_model_selection(
    config: ExperimentConfig, design: OrthogonalDesign | None = None
) -> McSummary:
    """Per trial: estimate sigma2, pick a rule per method, record risk, k_hat and SErr.

    Hard thresholding uses the universal threshold; every other method takes the
    SURE minimizer over its grids.

    Returns:
        A ``selection`` summary with one ``MethodStats`` per method, in
        ``config.methods`` order.
    """
    design = _resolve_design(config, design)
    methods = [Variant(m) for m in config.methods]
    n = config.n
    b = config.b
    k_star_mask = np.zeros(n, dtype=bool)
    k_star_mask[[k - 1 for k in config.k_star]] = True
    candidates = {
        v: model_select.candidate_rules(v, config.lambda_grid, _hyper_grid(config, v))
        for v in methods
        if v is not Variant.HT
    }

    shape = (config.trials, len(methods))
    risk = np.empty(shape)
    k_hat = np.empty(shape)
    serr = np.empty(shape)
    chosen_lam = np.empty(shape)

    logger.progress(f"Model selection: {config.trials} trials, methods {', '.join(config.methods)}")

    def work(start: int, stop: int) -> None:
        bhat = simulate_coefficients(config, range(start, stop), design)
        sigma2 = _sigma2_rows(config, bhat)
        for j, variant in enumerate(methods):
            if variant is Variant.HT:
                lam = model_select.universal_threshold_rows(sigma2, n)
                beta = hard(bhat, lam[:, None])
                active = np.abs(bhat) >= lam[:, None]
            else:
                grid = candidates[variant]
                best = model_select.pick_best(model_select.score_grid(grid, bhat, sigma2))
                beta = np.empty_like(bhat)
                active = np.empty(bhat.shape, dtype=bool)
                lam = np.empty(bhat.shape[0])
                for g in np.unique(best):
                    rows = best == g
                    rule = grid[g].rule
                    beta[rows] = apply_array(rule, bhat[rows])
                    active[rows] = np.abs(bhat[rows]) >= rule.lam
                    lam[rows] = grid[g].lam
            risk[start:stop, j] = np.sum((beta - b) ** 2, axis=-1)
            k_hat[start:stop, j] = np.count_nonzero(active, axis=-1)
            serr[start:stop, j] = np.count_nonzero(active ^ k_star_mask, axis=-1)
            chosen_lam[start:stop, j] = lam

    _run_chunks(config, work)

    risk_mean, risk_sd = _mean_sd(risk)
    k_mean, k_sd = _mean_sd(k_hat)
    serr_mean, serr_sd = _mean_sd(serr)
    lam_mean = chosen_lam.mean(axis=0)

    stats = [
        MethodStats(
            method=variant.value,
            risk_mean=float(risk_mean[j]),
            risk_sd=float(risk_sd[j]),
            khat_mean=float(k_mean[j]),
            khat_sd=float(k_sd[j]),
            serr_mean=float(serr_mean[j]),
            serr_sd=float(serr_sd[j]),
            lambda_mean=float(lam_mean[j]),
        )
        for j, variant in enumerate(methods)
    ]
    logger.success(f"Model selection finished over {config.trials} trials")
    return McSummary(kind="selection", config=config, methods=stats)


def empirical_dof(
    config: ExperimentConfig,
    rule: ThresholdRule,
    lam: float | None = None,
    design: OrthogonalDesign | None = None,
) -> EmpiricalDof:
    """Monte Carlo DOF from its covariance definition; valid for every rule including HT.

    Args:
        config: Experiment settings; only the truth, noise, trials and seed are used.
        rule: Rule to measure.
        lam: Replaces the rule's level when given.
        design: Orthogonal design, the built-in trig basis by default.

    Returns:
        The covariance estimate with its standard error. For data-driven rules
        the mean Stein-formula DOF on the same draws, computed with the
        configured (true) sigma2, is attached with a paired standard error.
        Hard thresholding gets the closed-form ``theory`` value instead.
    """
    design = _resolve_design(config, design)
    if lam is not None:
        rule = rule.with_lambda(lam)
    b = config.b
    n = config.n
    cov = np.empty(config.trials)
    formula = np.empty(config.trials)
    is_ht = rule.variant is Variant.HT

    def work(start: int, stop: int) -> None:
        bhat = simulate_coefficients(config, range(start, stop), design)
        beta = apply_array(rule, bhat)
        cov[start:stop] = n * np.sum(beta * (bhat - b), axis=-1)
        if not is_ht:
            t1, t2, _ = risk_sure.dof_terms(rule, bhat, config.sigma2)
            formula[start:stop] = t1 + t2

    _run_chunks(config, work)

    root_s = math.sqrt(config.trials)
    cov_mean, cov_sd = _mean_sd(cov)
    if is_ht:
        theory = None
        if config.sigma2 > 0.0:
            theory = risk_sure.ht_dof_theoretical(b, config.sigma2, rule.lam).total
        return EmpiricalDof(
            value=float(cov_mean),
            stderr=float(cov_sd) / root_s,
            trials=config.trials,
            theory=theory,
        )

    _, diff_sd = _mean_sd(cov - formula)
    return EmpiricalDof(
        value=float(cov_mean),
        stderr=float(cov_sd) / root_s,
        trials=config.trials,
        formula_mean=float(formula.mean()),
        paired_stderr=float(diff_sd) / root_s,
    )
