"""Equilibrium objects, derived coefficients, outcomes and role taxonomy.

A linear equilibrium is summarized by the reduced coordinates
(Lambda22, A, beta1); every other coefficient follows in closed form:

    Lambda1  = A b1 / (b1^2 (A^2 + te) + t1)
    Lambda21 = [A^3 L (2 (b1 - 1) G - L) + A^2 G
                + 2 A te L ((b1 - 1) G - L) + te (G + L)]
               / (A b1 (A^2 + te) (2 G + L))
    beta21   = A (1 - A L) / (2 (A^2 + te) (G + L))
    beta22   = -Lambda21 / (2 (G + L))
    beta23   = -(2 G + Lambda21) / (2 (G + L))

with L = Lambda22, G = Gamma, te = theta_eps, t1 = theta1.  Here
Lambda21 is the unique time-2 impact slope that makes the slow trader's
first-order condition hold at intensity A.

Expected outcomes (profits, pricing errors, noise-trader losses) are
linear-Gaussian moments; the profit split into an impact leg and a
holding leg is evaluated from the exact second moments of the linear
strategy profile rather than from simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, NegativeRadicand
from .params import ModelParams

_DENOM_FLOOR = 1e-300

SMALL_IT = "SmallIT"
ROUND_TRIPPER = "RoundTripper"
INACTIVE = "Inactive"


@dataclass(frozen=True)
class Equilibrium:
    """Normalized equilibrium coefficients.

    Price impacts (Lambda*) are in units of sigma_v / sigma_2, the slow
    trader's intensity A in units of sigma_2 / sigma_v; the fast trader's
    beta coefficients are dimensionless.  ``soc_ok`` stores the three
    second-order conditions (time-2 concavity, time-1 concavity, positive
    total clearing intensity) and ``residual_norm`` the max-norm of the
    reduced three-equation system at these coordinates.
    """

    Lambda1: float
    Lambda21: float
    Lambda22: float
    A: float
    beta1: float
    beta21: float
    beta22: float
    beta23: float
    soc_ok: tuple = (True, True, True)
    residual_norm: float = float("nan")


@dataclass(frozen=True)
class Outcomes:
    """Expected profits, pricing errors and noise-trader losses (per unit round)."""

    pi_IT: float
    pi_HFT: float
    pi_HFT_holding: float
    pi_HFT_impact: float
    penalty: float
    err_p1: float
    err_p2: float
    loss_NT1: float
    loss_NT2: float


@dataclass(frozen=True)
class Role:
    """Trading-direction taxonomy of the fast trader.

    dir1 is the sign of her time-1 response to the anticipated order,
    dir2 the sign of her net time-2 signal loading beta21 + beta23*beta1.
    Trading with the order both rounds makes her a small insider
    ("SmallIT"); entering and then unwinding makes her a round-tripper.
    """

    variant: str
    dir1: int
    dir2: int


def derived_coefficients(Lambda22, A, beta1, params: ModelParams):
    """Map reduced coordinates to (Lambda1, Lambda21, beta21, beta22, beta23).

    Raises DegenerateDenominator when any closed-form denominator is
    numerically zero (|den| < 1e-300).
    """
    t1, te, G = params.theta1, params.theta_eps, params.Gamma
    L = Lambda22

    d = beta1 * beta1 * (A * A + te) + t1
    if abs(d) < _DENOM_FLOOR:
        raise DegenerateDenominator("time-1 impact denominator vanished")
    Lambda1 = A * beta1 / d

    d = A * beta1 * (A * A + te) * (2.0 * G + L)
    if abs(d) < _DENOM_FLOOR:
        raise DegenerateDenominator("time-2 cross-impact denominator vanished")
    Lambda21 = (
        A ** 3 * L * (2.0 * (beta1 - 1.0) * G - L)
        + A * A * G
        + 2.0 * A * te * L * ((beta1 - 1.0) * G - L)
        + te * (G + L)
    ) / d

    d = 2.0 * (A * A + te) * (G + L)
    if abs(d) < _DENOM_FLOOR:
        raise DegenerateDenominator("time-2 response denominator vanished")
    beta21 = A * (1.0 - A * L) / d

    d = 2.0 * (G + L)
    if abs(d) < _DENOM_FLOOR:
        raise DegenerateDenominator("time-2 concavity denominator vanished")
    beta22 = -Lambda21 / d
    beta23 = -(2.0 * G + Lambda21) / d

    return Lambda1, Lambda21, beta21, beta22, beta23


def soc_values(Lambda1, Lambda21, Lambda22, A, params: ModelParams):
    """The three second-order-condition expressions (all must be > 0).

    soc2 is Lambda1 + Gamma - (Lambda22 + Gamma) * beta23^2 rewritten as
    Lambda1 + (4 G (L - M) - M^2) / (4 (G + L)); the rewriting avoids the
    Gamma^2 cancellation that loses precision for large Gamma.
    """
    G, L, M = params.Gamma, Lambda22, Lambda21
    soc1 = L + G
    soc2 = Lambda1 + (4.0 * G * (L - M) - M * M) / (4.0 * (G + L))
    soc3 = A
    return soc1, soc2, soc3


def make_equilibrium(Lambda22, A, beta1, params: ModelParams,
                     residual_norm=float("nan")) -> Equilibrium:
    """Assemble a full Equilibrium record from reduced coordinates."""
    Lambda1, Lambda21, beta21, beta22, beta23 = derived_coefficients(
        Lambda22, A, beta1, params)
    s1, s2, s3 = soc_values(Lambda1, Lambda21, Lambda22, A, params)
    return Equilibrium(
        Lambda1=Lambda1, Lambda21=Lambda21, Lambda22=Lambda22, A=A,
        beta1=beta1, beta21=beta21, beta22=beta22, beta23=beta23,
        soc_ok=(s1 > 0.0, s2 > 0.0, s3 > 0.0),
        residual_norm=residual_norm,
    )


# -- exact second moments of the linear profile ---------------------------
#
# Every time-t quantity is a linear combination of the four independent
# shocks (w, eps, u1, u2) with w = v - p0.  Representing each as a
# coefficient 4-vector makes any expected product a weighted dot product.

def shock_loadings(eq: Equilibrium, params: ModelParams) -> dict:
    """Coefficient 4-vectors over (w, eps, u1, u2) for each model quantity."""
    sv, s2 = params.sigma_v, params.sigma_2
    lam1 = eq.Lambda1 * sv / s2
    lam21 = eq.Lambda21 * sv / s2
    lam22 = eq.Lambda22 * sv / s2
    alpha = eq.A * s2 / sv
    b1, b21, b22, b23 = eq.beta1, eq.beta21, eq.beta22, eq.beta23
    b = b21 + b23 * b1  # net time-2 loading on the anticipation signal

    w = np.array([1.0, 0.0, 0.0, 0.0])
    eps = np.array([0.0, 1.0, 0.0, 0.0])
    u1 = np.array([0.0, 0.0, 1.0, 0.0])
    u2 = np.array([0.0, 0.0, 0.0, 1.0])

    i = alpha * w
    ihat = i + eps
    x1 = b1 * ihat
    y1 = x1 + u1
    x2 = b * ihat + b22 * u1
    y2 = i + x2 + u2
    p1 = lam1 * y1                    # p1 - p0
    p2 = lam21 * y1 + lam22 * y2      # p2 - p0

    return {
        "w": w, "eps": eps, "u1": u1, "u2": u2,
        "i": i, "ihat": ihat, "x1": x1, "x2": x2, "y1": y1, "y2": y2,
        "p1": p1, "p2": p2, "v_m_p1": w - p1, "v_m_p2": w - p2,
        "cov": np.array([sv * sv, params.sigma_eps ** 2,
                         params.sigma_1 ** 2, s2 * s2]),
    }


def _e(cov, x, y):
    """E[X Y] for two shock-loading vectors."""
    return float(np.dot(cov * x, y))


def moment_outcomes(eq: Equilibrium, params: ModelParams) -> dict:
    """All expected outcomes evaluated from exact bilinear shock moments.

    Independent of the closed-form outcome expressions; used for the
    profit decomposition and as a cross-check oracle.
    """
    q = shock_loadings(eq, params)
    cov = q["cov"]
    gamma = params.gamma
    inv = q["x1"] + q["x2"]
    return {
        "pi_IT": _e(cov, q["i"], q["v_m_p2"]),
        "pi_HFT": _e(cov, q["x1"], q["v_m_p1"]) + _e(cov, q["x2"], q["v_m_p2"]),
        "pi_HFT_holding": _e(cov, inv, q["v_m_p1"]),
        "pi_HFT_impact": -_e(cov, q["x2"], q["p2"]) + _e(cov, q["x2"], q["p1"]),
        "penalty": -gamma * _e(cov, inv, inv),
        "err_p1": _e(cov, q["v_m_p1"], q["v_m_p1"]),
        "err_p2": _e(cov, q["v_m_p2"], q["v_m_p2"]),
        "loss_NT1": _e(cov, q["u1"], q["p1"]) - _e(cov, q["u1"], q["w"]),
        "loss_NT2": _e(cov, q["u2"], q["p2"]) - _e(cov, q["u2"], q["w"]),
        "inventory_second_moment": _e(cov, inv, inv),
    }


def pricing_regression(eq: Equilibrium, params: ModelParams):
    """Dealer regression slopes implied by the exact second moments.

    Returns (lam1, lam21, lam22) in dimensional units: the projection of
    v - p0 on y1, then on (y1, y2).  At an equilibrium these must equal
    the quoted impact coefficients; they are computed here purely from
    covariances, so they serve as an independent check.
    """
    q = shock_loadings(eq, params)
    cov = q["cov"]
    lam1 = _e(cov, q["w"], q["y1"]) / _e(cov, q["y1"], q["y1"])
    V = np.array([
        [_e(cov, q["y1"], q["y1"]), _e(cov, q["y1"], q["y2"])],
        [_e(cov, q["y1"], q["y2"]), _e(cov, q["y2"], q["y2"])],
    ])
    c = np.array([_e(cov, q["w"], q["y1"]), _e(cov, q["w"], q["y2"])])
    lam21, lam22 = np.linalg.solve(V, c)
    return lam1, float(lam21), float(lam22)


def compute_outcomes(eq: Equilibrium, params: ModelParams) -> Outcomes:
    """Expected profits, pricing errors and noise-trader losses.

    Scalar outcomes use the closed forms in normalized units; the
    holding/impact split of the fast trader's profit comes from the
    bilinear moment machinery.
    """
    sv, s2 = params.sigma_v, params.sigma_2
    t1, te, G = params.theta1, params.theta_eps, params.Gamma
    L1, M, L, A = eq.Lambda1, eq.Lambda21, eq.Lambda22, eq.A
    b1, b21, b22, b23 = eq.beta1, eq.beta21, eq.beta22, eq.beta23

    scale = s2 * sv
    pi_IT = 0.5 * scale * A
    pi_HFT = scale * (
        A * (b1 * b23 + b21)
        * (1.0 - A * (b1 * b23 * L + b1 * M + b21 * L + L))
        + A * b1 * (1.0 - A * b1 * L1)
        - b1 * b1 * te * L1
        - te * (b1 * b23 + b21) * (b1 * (b23 * L + M) + b21 * L)
        - b22 * t1 * (b22 * L + M)
    )
    penalty = -scale * G * (
        b22 * b22 * t1 + (A * A + te) * (b1 * b23 + b1 + b21) ** 2
    )
    err_p1 = sv * sv * ((A * b1 * L1 - 1.0) ** 2
                        + b1 * b1 * L1 * L1 * te + L1 * L1 * t1)
    err_p2 = 0.5 * sv * sv
    m = moment_outcomes(eq, params)
    return Outcomes(
        pi_IT=pi_IT,
        pi_HFT=pi_HFT,
        pi_HFT_holding=m["pi_HFT_holding"],
        pi_HFT_impact=m["pi_HFT_impact"],
        penalty=penalty,
        err_p1=err_p1,
        err_p2=err_p2,
        loss_NT1=scale * L1 * t1,
        loss_NT2=scale * L,
    )


def classify_role(eq: Equilibrium, tol=1e-10) -> Role:
    """Classify the fast trader's direction pattern with a dead band of tol."""
    d2_value = eq.beta21 + eq.beta23 * eq.beta1

    def _sgn(x):
        if abs(x) <= tol:
            return 0
        return 1 if x > 0.0 else -1

    dir1, dir2 = _sgn(eq.beta1), _sgn(d2_value)
    if dir1 > 0 and dir2 > 0:
        variant = SMALL_IT
    elif dir1 > 0 and dir2 < 0:
        variant = ROUND_TRIPPER
    else:
        variant = INACTIVE
    return Role(variant=variant, dir1=dir1, dir2=dir2)


def check_A_consistency(eq: Equilibrium, params: ModelParams) -> float:
    """Residual of the slow trader's intensity consistency condition.

    The equilibrium intensity must satisfy

        A = sqrt((t1 te D^2 + b1^2 te + t1) / (t1 (1 + D)^2 + (1 + te) b1^2))

    with D = beta21 + beta1 (beta23 - beta22).  Returns A - sqrt(.);
    raises NegativeRadicand when the ratio under the root is negative.
    """
    t1, te = params.theta1, params.theta_eps
    b1 = eq.beta1
    D = eq.beta21 + b1 * (eq.beta23 - eq.beta22)
    num = t1 * te * D * D + b1 * b1 * te + t1
    den = t1 * (1.0 + D) ** 2 + (1.0 + te) * b1 * b1
    frac = num / den
    if frac < 0.0:
        raise NegativeRadicand(
            f"intensity radicand is negative: {num} / {den}")
    return eq.A - math.sqrt(frac)
