"""Path simulation of the linear market and best-response verification.

Simulates the two-round trading game under given linear strategies and
price rules, reporting Monte Carlo means and standard errors for every
expected outcome.  The estimators are deliberately simple: independent
Gaussian shocks per path, counter-based random streams keyed by
(seed, batch index) so results are bit-reproducible regardless of how
batches would be scheduled, and standard errors from batch means.

``best_response_check`` perturbs one control at a time (the slow
trader's intensity, the fast trader's first-period intensity, or her
second-period response) under common random numbers and verifies that
no perturbation improves the owner's objective — the optimality half of
the equilibrium definition, checked by simulation rather than algebra.

All quadratic-payoff estimands here are even functions of the shock
vector, so antithetic pairing duplicates each payoff value instead of
reducing its variance; the option exists for interface parity and its
duplication property is what tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Equilibrium
from .errors import NotBestResponse
from .params import ModelParams

ESTIMANDS = ("pi_IT", "pi_HFT", "pi_HFT_holding", "pi_HFT_impact",
             "penalty", "err_p1", "err_p2", "loss_NT1", "loss_NT2",
             "inventory_second_moment")


@dataclass(frozen=True)
class SimConfig:
    """Path count, seed and batching for one simulation run."""

    n_paths: int = 1_000_000
    seed: int = 0
    antithetic: bool = True
    n_batches: int = 100

    def __post_init__(self):
        if self.n_paths < 10_000:
            raise ValueError("need n_paths >= 10000")
        if self.n_batches < 2:
            raise ValueError("need at least 2 batches")

    @property
    def paths_per_batch(self) -> int:
        m = -(-self.n_paths // self.n_batches)
        if self.antithetic and m % 2:
            m += 1
        return m


@dataclass(frozen=True)
class SimEstimates:
    """(mean, standard error) for every expected outcome."""

    pi_IT: tuple
    pi_HFT: tuple
    pi_HFT_holding: tuple
    pi_HFT_impact: tuple
    penalty: tuple
    err_p1: tuple
    err_p2: tuple
    loss_NT1: tuple
    loss_NT2: tuple
    inventory_second_moment: tuple

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ESTIMANDS}


def _dimensional(eq: Equilibrium, params: ModelParams):
    """Strategy and pricing coefficients in price/share units."""
    sv, s2 = params.sigma_v, params.sigma_2
    return {
        "lam1": eq.Lambda1 * sv / s2,
        "lam21": eq.Lambda21 * sv / s2,
        "lam22": eq.Lambda22 * sv / s2,
        "alpha": eq.A * s2 / sv,
        "b1": eq.beta1, "b21": eq.beta21,
        "b22": eq.beta22, "b23": eq.beta23,
    }


def _draw(seed: int, batch: int, m: int, antithetic: bool) -> np.ndarray:
    """Standard-normal shocks (m, 4) from the (seed, batch) Philox stream."""
    rng = np.random.Generator(np.random.Philox(key=[seed, batch]))
    if antithetic:
        z = rng.standard_normal((m // 2, 4))
        return np.vstack([z, -z])
    return rng.standard_normal((m, 4))


def _payoffs(z: np.ndarray, c: dict, params: ModelParams,
             alpha_scale=1.0, b1_scale=1.0, b2_scale=1.0) -> dict:
    """All path-level payoff arrays for (possibly deviated) strategies."""
    sv = params.sigma_v
    w = sv * z[:, 0]                       # v - p0
    eps = params.sigma_eps * z[:, 1]
    u1 = params.sigma_1 * z[:, 2]
    u2 = params.sigma_2 * z[:, 3]

    i = (alpha_scale * c["alpha"]) * w
    ihat = i + eps
    x1 = (b1_scale * c["b1"]) * ihat
    y1 = x1 + u1
    p1 = c["lam1"] * y1                    # p1 - p0
    x2 = b2_scale * (c["b21"] * ihat + c["b22"] * u1 + c["b23"] * x1)
    y2 = i + x2 + u2
    p2 = c["lam21"] * y1 + c["lam22"] * y2
    inv = x1 + x2

    return {
        "pi_IT": i * (w - p2),
        "pi_HFT": x1 * (w - p1) + x2 * (w - p2),
        "pi_HFT_holding": inv * (w - p1),
        "pi_HFT_impact": x2 * (p1 - p2),
        "penalty": -params.gamma * inv * inv,
        "err_p1": (w - p1) ** 2,
        "err_p2": (w - p2) ** 2,
        "loss_NT1": u1 * (p1 - w),
        "loss_NT2": u2 * (p2 - w),
        "inventory_second_moment": inv * inv,
    }


def simulate(eq: Equilibrium, params: ModelParams,
             config: SimConfig | None = None) -> SimEstimates:
    """Monte Carlo estimates of every expected outcome at the given point."""
    config = config or SimConfig()
    c = _dimensional(eq, params)
    m = config.paths_per_batch
    means = np.empty((config.n_batches, len(ESTIMANDS)))
    for b in range(config.n_batches):
        z = _draw(config.seed, b, m, config.antithetic)
        pays = _payoffs(z, c, params)
        means[b] = [pays[k].mean() for k in ESTIMANDS]
    mean = means.mean(axis=0)
    se = means.std(axis=0, ddof=1) / np.sqrt(config.n_batches)
    return SimEstimates(**{k: (float(mean[j]), float(se[j]))
                           for j, k in enumerate(ESTIMANDS)})


@dataclass(frozen=True)
class DeviationResult:
    """Effect of scaling one control by (1 + delta) under common shocks."""

    control: str
    delta: float
    improvement: float     # deviated minus equilibrium objective
    se: float              # batch-mean SE of that difference

    @property
    def significant_gain(self) -> bool:
        return self.improvement > 3.0 * self.se


def best_response_check(eq: Equilibrium, params: ModelParams,
                        config: SimConfig | None = None,
                        deltas=(-0.05, -0.01, 0.01, 0.05)) -> list[DeviationResult]:
    """Verify by simulation that unilateral deviations do not pay.

    Perturbs, one at a time: the slow trader's intensity (her profit is
    the objective), the fast trader's first-period intensity with her
    second-period response left on its closed form (total objective with
    penalty), and her second-period response jointly (second-period
    profit with penalty).  Every deviation shares the equilibrium run's
    shocks, so the difference estimator is tight.  Raises
    NotBestResponse if any deviation improves its objective by more
    than 3 standard errors; returns all deviation records otherwise.
    """
    config = config or SimConfig()
    c = _dimensional(eq, params)
    m = config.paths_per_batch

    def objective(pays, control):
        if control == "alpha":
            return pays["pi_IT"]
        # the fast trader's full objective; for the beta2 deviation the
        # first-period term is unchanged path-wise, so differencing it
        # against the baseline isolates the second-period objective
        return pays["pi_HFT"] + pays["penalty"]

    scale_kw = {"alpha": "alpha_scale", "beta1": "b1_scale",
                "beta2": "b2_scale"}
    diffs = {(ctrl, d): np.empty(config.n_batches)
             for ctrl in scale_kw for d in deltas}
    for b in range(config.n_batches):
        z = _draw(config.seed, b, m, config.antithetic)
        base = _payoffs(z, c, params)
        for ctrl, kw in scale_kw.items():
            base_obj = objective(base, ctrl)
            for d in deltas:
                dev = _payoffs(z, c, params, **{kw: 1.0 + d})
                diffs[(ctrl, d)][b] = (objective(dev, ctrl)
                                       - base_obj).mean()

    results = []
    for (ctrl, d), batch_means in diffs.items():
        improvement = float(batch_means.mean())
        se = float(batch_means.std(ddof=1) / np.sqrt(config.n_batches))
        results.append(DeviationResult(ctrl, d, improvement, se))
    offenders = [r for r in results if r.significant_gain]
    if offenders:
        worst = max(offenders, key=lambda r: r.improvement / max(r.se, 1e-300))
        raise NotBestResponse(
            f"scaling {worst.control} by {1 + worst.delta:g} improves its "
            f"objective by {worst.improvement:.3e} ({worst.improvement / max(worst.se, 1e-300):.1f} SE)")
    return results
