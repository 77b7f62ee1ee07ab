"""Closed-form limit regimes and the perfect-anticipation equilibrium.

Three boundary regimes of the anticipatory-trading game admit scalar or
low-dimensional reductions:

* theta1 -> 0 (first-period noise vanishes): the fast trader's time-1
  intensity dies out like zeta * theta1 and her time-2 response beta21
  solves a single scalar equation, found here by bracketed bisection.

* Gamma -> infinity (overwhelming inventory aversion): the fast trader
  round-trips her whole time-1 position (beta23 = -1, beta21 = beta22 = 0)
  and her time-1 intensity solves a sextic with exactly one root in (0, 1).

* theta_eps = 0 with small Gamma (perfect anticipation): the general
  system loses its root below an aversion threshold Gamma-tilde and the
  market becomes a two-insider duopoly in which both traders condition
  directly on v - p0; the three price impacts solve a polynomial system.

``find_gamma_tilde`` locates the existence threshold by bisecting the
solver's success predicate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import INACTIVE, ROUND_TRIPPER, SMALL_IT, Outcomes, Role
from .errors import (BracketFailure, NoRoot, OnlySOCViolating,
                     PredicateMonotoneViolation)
from .params import ModelParams
from .roots import bisect_root, expand_bracket, newton_system

SQRT2 = math.sqrt(2.0)


# -- theta1 -> 0 -----------------------------------------------------------

@dataclass(frozen=True)
class Theta1ZeroLimit:
    """Limit equilibrium for vanishing first-period noise.

    ``beta21`` is the fast trader's time-2 loading on the observed order
    (on v - p0 itself in the doubly degenerate corner theta_eps = Gamma = 0),
    ``alpha_norm`` the slow trader's normalized intensity.  Profits and the
    inventory penalty are in price*share units for the given scales.
    ``zeta`` (the slope of beta1 in theta1) is filled in only on request.
    """

    beta21: float
    alpha_norm: float
    Lambda22: float
    pi_IT: float
    pi_HFT: float
    penalty: float
    zeta: float | None = None


def theta1_zero_equation(beta21, theta_eps, Gamma):
    """Scalar fixed-point equation for the time-2 response as theta1 -> 0."""
    q = math.sqrt(1.0 / (beta21 * beta21 * theta_eps + 1.0))
    den = 2.0 * q * (2.0 * beta21 * beta21 * theta_eps
                     + 2.0 * beta21 * theta_eps + theta_eps + 1.0) \
        * (q + 2.0 * Gamma)
    return beta21 - (2.0 * beta21 + 1.0) / den


def solve_theta1_zero(theta_eps, Gamma, sigma_v=1.0, sigma_2=1.0) -> Theta1ZeroLimit:
    """Equilibrium of the theta1 -> 0 limit at (theta_eps, Gamma).

    For theta_eps = Gamma = 0 the limit degenerates to a symmetric
    two-insider market with closed form alpha = beta21 = sqrt(2)/2 and
    Lambda22 = sqrt(2)/3; otherwise beta21 is the unique positive root of
    the scalar limit equation, found by bracketed bisection.
    """
    if theta_eps < 0.0 or Gamma < 0.0:
        raise ValueError("theta_eps and Gamma must be nonnegative")
    scale = sigma_v * sigma_2
    if theta_eps == 0.0 and Gamma == 0.0:
        return Theta1ZeroLimit(
            beta21=SQRT2 / 2.0, alpha_norm=SQRT2 / 2.0, Lambda22=SQRT2 / 3.0,
            pi_IT=0.5 * scale * (SQRT2 / 3.0),
            pi_HFT=0.5 * scale * (SQRT2 / 3.0),
            penalty=0.0,
        )

    def f(b):
        return theta1_zero_equation(b, theta_eps, Gamma)

    lo, hi = expand_bracket(f, 0.0, 1.0)
    b21 = bisect_root(f, lo, hi, xtol=1e-16)
    root = math.sqrt(1.0 + b21 * b21 * theta_eps)
    A = root / (1.0 + b21)
    Lambda22 = 1.0 / (2.0 * root)
    pi_IT = 0.5 * scale * A
    pi_HFT = 0.5 * scale * b21 * (1.0 - b21 * theta_eps) / (root * (1.0 + b21))
    penalty = -scale * Gamma * b21 * b21 * (
        theta_eps + (1.0 + b21 * b21 * theta_eps) / (1.0 + b21) ** 2)
    return Theta1ZeroLimit(beta21=b21, alpha_norm=A, Lambda22=Lambda22,
                           pi_IT=pi_IT, pi_HFT=pi_HFT, penalty=penalty)


def zeta(theta_eps, Gamma):
    """Slope of the fast trader's time-1 intensity in theta1 near zero.

    beta1(theta1) ~ zeta * theta1; estimated by solving the full system
    at theta1 in {1e-4, 1e-5, 1e-6} and Richardson-extrapolating
    beta1 / theta1 (two stages, grid ratio 10).
    """
    from .solver import SolverConfig, solve

    lim = solve_theta1_zero(theta_eps, Gamma)
    g = []
    for t1 in (1e-4, 1e-5, 1e-6):
        params = ModelParams(t1, theta_eps, Gamma)
        cfg = SolverConfig(multistart_grid=[(lim.Lambda22, lim.alpha_norm, t1)])
        report = solve(params, cfg)
        if report.status != "Found":
            report = solve(params, SolverConfig())
        if report.status != "Found":
            raise NoRoot(f"no equilibrium at theta1={t1} while estimating zeta")
        eq = min(report.roots,
                 key=lambda e: abs(e.A - lim.alpha_norm) + abs(e.Lambda22 - lim.Lambda22))
        g.append(eq.beta1 / t1)
    r45 = (10.0 * g[1] - g[0]) / 9.0
    r56 = (10.0 * g[2] - g[1]) / 9.0
    return (100.0 * r56 - r45) / 99.0


# -- Gamma -> infinity ------------------------------------------------------

@dataclass(frozen=True)
class GammaInfLimit:
    """Limit equilibrium under overwhelming inventory aversion.

    beta is the fast trader's time-1 intensity (her time-2 trade is the
    pure unwind x2 = -x1, i.e. beta21 = beta22 = 0, beta23 = -1).
    ``sign_changes`` records how many sign changes the sextic exhibited
    on a scan of (0, 1); exactly one is expected.
    """

    beta: float
    Lambda1: float
    Lambda21: float
    Lambda22: float
    A: float
    pi_IT: float
    pi_HFT: float
    penalty: float
    soc_ok: bool
    sign_changes: int


def gamma_inf_sextic(beta, theta1, theta_eps):
    """The degree-6 polynomial whose (0, 1) root is the limit intensity."""
    t1, te, b = theta1, theta_eps, beta
    return (b ** 6 * (4 * t1 * te ** 2 + t1 * te ** 3 + 2 * t1 ** 2 * te ** 2
                      + 2 * te ** 2 + te ** 3)
            + b ** 5 * (4 * t1 * te + 4 * t1 * te ** 2 + 2 * t1 * te ** 3
                        + 8 * t1 ** 2 * te + 4 * t1 ** 2 * te ** 2
                        + 4 * t1 ** 3 * te)
            + b ** 4 * (2 * t1 * te + t1 * te ** 2 - 11 * t1 ** 2 * te
                        - 8 * t1 ** 2 * te ** 2 - 13 * t1 ** 3 * te)
            + b ** 3 * (2 * t1 ** 2 + 2 * t1 ** 3 + 8 * t1 ** 2 * te
                        + 4 * t1 ** 2 * te ** 2 + 16 * t1 ** 3 * te)
            - b ** 2 * (t1 ** 2 * te + 5 * t1 ** 3 + 9 * t1 ** 3 * te)
            + b * (4 * t1 ** 3 + 2 * t1 ** 3 * te)
            - t1 ** 3)


def solve_gamma_inf(theta1, theta_eps, sigma_v=1.0, sigma_2=1.0,
                    scan_points=512) -> GammaInfLimit:
    """Equilibrium of the Gamma -> infinity limit at (theta1, theta_eps).

    The sextic is scanned on (0, 1) for sign changes and the root is
    isolated by bisection.  Raises BracketFailure when the endpoint signs
    are not (-, +).
    """
    if theta1 <= 0.0 or theta_eps < 0.0:
        raise ValueError("need theta1 > 0 and theta_eps >= 0")
    t1, te = theta1, theta_eps

    def f(b):
        return gamma_inf_sextic(b, t1, te)

    f0, f1 = f(0.0), f(1.0)
    if f0 >= 0.0 or f1 <= 0.0:
        raise BracketFailure(
            f"sextic endpoint signs are ({f0}, {f1}), expected (-, +)")

    grid = np.linspace(0.0, 1.0, scan_points + 1)
    vals = gamma_inf_sextic(grid, t1, te)  # ufunc arithmetic, vectorizes
    sgn = np.sign(vals)
    sgn[sgn == 0.0] = 1.0
    flips = np.nonzero(np.diff(sgn) != 0.0)[0]
    lo, hi = grid[flips[0]], grid[flips[0] + 1]
    beta = bisect_root(f, float(lo), float(hi), xtol=1e-14)

    low = t1 * (1.0 - beta) ** 2 + beta * beta * (te + 1.0)
    high = t1 + beta * beta * te * (t1 + 1.0)
    root = math.sqrt(low * high)
    Lambda1 = beta * root / (beta * beta * high + (beta * beta * te + t1) * low)
    Lambda21 = (beta * beta * te + beta) / (2.0 * root)
    Lambda22 = (beta * beta * te + (1.0 - beta) * t1) / (2.0 * root)
    A = math.sqrt(high / low)

    scale = sigma_v * sigma_2
    num2 = (beta * beta * te * ((1.0 - 2.0 * beta) - beta * te)
            + (1.0 - beta) * t1 * (1.0 - beta * (1.0 - 2.0 * beta) * te))
    den2 = ((1.0 - beta) ** 2 * t1 * t1 + beta ** 4 * te * (te + 2.0)
            + 2.0 * beta * beta * t1 * (1.0 + (beta * beta - beta + 1.0) * te))
    pi_HFT = 0.5 * scale * (beta * t1 * ((1.0 - beta) * t1 + beta * beta * te)
                            / root) * (num2 / den2)
    return GammaInfLimit(
        beta=beta, Lambda1=Lambda1, Lambda21=Lambda21, Lambda22=Lambda22,
        A=A, pi_IT=0.5 * scale * A, pi_HFT=pi_HFT, penalty=0.0,
        soc_ok=(Lambda22 + Lambda1 - Lambda21) > 0.0,
        sign_changes=int(len(flips)),
    )


def gamma_inf_thresholds(theta1):
    """Profit thresholds of the strong-aversion limit.

    Returns (theta_tilde, theta_hat): the anticipation-noise levels above
    which the slow trader out-earns the fast-trader-free benchmark, and
    above which her profit decreases in theta_eps.  Both clamp at zero.
    """
    if theta1 <= 0.0:
        raise ValueError("theta1 must be > 0")
    t1 = theta1
    tilde = (-(t1 + 5.0) + 2.0 * math.sqrt(4.0 * t1 * t1 + 10.0 * t1 + 5.0)) \
        / (-5.0 * t1)
    hat = (1.0 - t1 - 2.0 * t1 * t1) / (3.0 * t1)
    return max(tilde, 0.0), max(hat, 0.0)


# -- theta_eps = 0: perfect-anticipation duopoly ----------------------------

@dataclass(frozen=True)
class DuopolyEquilibrium:
    """Perfect-anticipation equilibrium (both traders condition on v - p0).

    beta1 and beta21 are the fast trader's direct intensities on v - p0
    in units of sigma_2 / sigma_v; beta22, beta23 keep their usual
    meaning.  soc_ok holds the two concavity conditions.
    """

    Lambda1: float
    Lambda21: float
    Lambda22: float
    A: float
    beta1: float
    beta21: float
    beta22: float
    beta23: float
    soc_ok: tuple = (True, True)
    residual_norm: float = float("nan")


def duopoly_system(Lambda1, Lambda21, Lambda22, theta1, Gamma):
    """The three pricing-consistency polynomials of the duopoly regime."""
    L1, M, L = Lambda1, Lambda21, Lambda22
    t1, G = theta1, Gamma

    d1 = (4 * G * G * (16 * L1 ** 3 * t1 - 24 * L1 ** 2 * t1 * (M - L)
                       + 3 * L1 * (3 * M * M * t1 - 6 * M * L * t1
                                   + 3 * L * L * t1 - 1)
                       + 3 * (M - L))
          + 2 * G * (48 * L1 ** 3 * L * t1
                     - 4 * L1 ** 2 * t1 * (2 * M * M + 9 * M * L - 9 * L * L)
                     + 2 * L1 * (3 * M ** 3 * t1 - 3 * M * M * L * t1 + M - 6 * L)
                     - 2 * M * M + 12 * M * L - 9 * L * L)
          + 36 * L1 ** 3 * L * L * t1 - 12 * L1 ** 2 * M * M * L * t1
          + L1 * (M ** 4 * t1 + M * M - 9 * L * L)
          - M * M * (M - 3 * L))

    d2 = (6 * G ** 4 * (4 * L1 * L1 * M * (4 * L * L + 1) * t1
                        + 4 * L1 * (-L * L * (6 * M * M * t1 + 1) - 2 * M * M * t1
                                    + 6 * M * L ** 3 * t1 + M * L * t1)
                        + M ** 3 * (9 * L * L + 4) * t1
                        - 2 * M * M * L * (9 * L * L + 2) * t1
                        + M * L * L * (9 * L * L * t1 + t1 + 4)
                        - 3 * L ** 3)
          + 8 * G ** 3 * L * (8 * L1 * L1 * M * (14 * L * L + 3) * t1
                              - 2 * L1 * (4 * M ** 3 * L * t1
                                          + M * M * (66 * L * L + 19) * t1
                                          - M * L * (66 * L * L * t1 + 7 * t1 + 2)
                                          + 17 * L * L)
                              + 6 * M ** 4 * L * t1
                              + 2 * M ** 3 * (15 * L * L + 7) * t1
                              - M * M * L * (72 * L * L * t1 + 9 * t1 + 4)
                              + M * L * L * (36 * L * L * t1 + t1 + 34)
                              - 21 * L ** 3)
          + 4 * G * G * L * (4 * L1 * L1 * M * L * (73 * L * L + 13) * t1
                             - 2 * L1 * (M ** 3 * (22 * L * L * t1 + t1)
                                         + 30 * M * M * (4 * L ** 3 + L) * t1
                                         - M * L * L * (120 * L * L * t1 + 5 * t1 + 11)
                                         + 53 * L ** 3)
                             + M ** 5 * L * t1
                             + 2 * M ** 4 * (12 * L * L * t1 + t1)
                             + M ** 3 * L * (12 * L * L + 13) * t1
                             - M * M * L * L * (72 * L * L * t1 + t1 + 19)
                             + M * L ** 3 * (36 * L * L * t1 - 2 * t1 + 97)
                             - 48 * L ** 4)
          + 2 * G * L * L * (48 * L1 * L1 * M * L * (7 * L * L + 1) * t1
                             - 2 * L1 * (2 * M ** 3 * (20 * L * L * t1 + t1)
                                         + M * M * L * (72 * L * L + 19) * t1
                                         + 2 * M * L * L * (-36 * L * L * t1 + t1 - 10)
                                         + 72 * L ** 3)
                             + 4 * M ** 5 * L * t1
                             + 2 * M ** 4 * (12 * L * L * t1 + t1)
                             + 8 * M ** 3 * L * (1 - 3 * L * L) * t1
                             - M * M * L * L * (t1 + 28)
                             + 108 * M * L ** 3 - 36 * L ** 4)
          + L ** 3 * (16 * L1 * L1 * M * L * (9 * L * L + 1) * t1
                      - 2 * L1 * (M ** 3 * (24 * L * L * t1 + t1)
                                  + 5 * M * M * L * t1
                                  - 12 * M * L * L + 36 * L ** 3)
                      + M * (4 * M ** 4 * L * t1 + M ** 3 * t1 + M * M * L * t1
                             - 12 * M * L * L + 36 * L ** 3)))

    d3 = (16 * G ** 4 * (L * L * (t1 * (16 * L1 * L1 - 24 * L1 * M
                                        + 9 * M * M - 2) + 1)
                         - 2 * t1 * (2 * L1 * L1 - 3 * L1 * M + M * M)
                         + 6 * L ** 3 * t1 * (4 * L1 - 3 * M)
                         + L * (5 * M * t1 - 6 * L1 * t1)
                         + 9 * L ** 4 * t1)
          + 8 * G ** 3 * (2 * L * (L * L * (56 * L1 * L1 * t1 - 4 * t1 + 5)
                                   - 14 * L1 * L1 * t1 + 66 * L1 * L ** 3 * t1
                                   - 17 * L1 * L * t1 + 18 * L ** 4 * t1)
                          + 2 * M * M * t1 * (-4 * L1 * L * L + L1
                                              + 15 * L ** 3 - 3 * L)
                          + M * L * (-132 * L1 * L * L * t1 + 32 * L1 * t1
                                     - 72 * L ** 3 * t1 + L * (21 * t1 - 2))
                          + 2 * M ** 3 * (3 * L * L - 1) * t1)
          + 4 * G * G * L * (L * (L * L * (292 * L1 * L1 * t1 - 8 * t1 + 37)
                                  - 72 * L1 * L1 * t1 + 240 * L1 * L ** 3 * t1
                                  - 64 * L1 * L * t1 + 36 * L ** 4 * t1)
                             + M * M * (-44 * L1 * L * L * t1 + 12 * L1 * t1
                                        + 12 * L ** 3 * t1 + L * t1 + L)
                             + M * L * (-240 * L1 * L * L * t1 + 54 * L1 * t1
                                        - 72 * L ** 3 * t1 + L * (23 * t1 - 14))
                             + M ** 4 * L * t1
                             + 8 * M ** 3 * (3 * L * L - 1) * t1)
          + 2 * G * L * (4 * L * L * (3 * L * L * (28 * L1 * L1 * t1 + 5)
                                      - 20 * L1 * L1 * t1 + 36 * L1 * L ** 3 * t1
                                      - 10 * L1 * L * t1)
                         + 2 * M * M * L * (-40 * L1 * L * L * t1 + 11 * L1 * t1
                                            - 12 * L ** 3 * t1 + L * (5 * t1 + 2))
                         + 2 * M * L * L * (-72 * L1 * L * L * t1 + 13 * L1 * t1
                                            + L * (t1 - 16))
                         + M ** 4 * (4 * L * L - 1) * t1
                         + M ** 3 * L * (24 * L * L - 7) * t1)
          + L * L * (4 * (9 * L ** 4 * (4 * L1 * L1 * t1 + 1)
                          - 8 * L1 * L1 * L * L * t1)
                     + M * M * L * (-48 * L1 * L * L * t1 + 12 * L1 * t1
                                    + L * (t1 + 4))
                     - 4 * M * L * L * (L1 * t1 + 6 * L)
                     + M ** 4 * (4 * L * L - 1) * t1))

    return d1, d2, d3


_DUOPOLY_STARTS = [
    (L1, M, L)
    for L1 in (0.1, 0.3, 0.6, 1.0, 1.6, 2.4)
    for M in (0.05, 0.2, 0.5, 0.9, 1.4)
    for L in (0.05, 0.2, 0.5, 0.9)
] + [
    # neighbourhood of the vanishing-noise corner, where the genuine root
    # sits close to the system's degenerate solution curve
    (2.12, 1.4142, 0.4714),
]


def _duopoly_coefficients(L1, M, L, G):
    """Trading intensities implied by a candidate impact triple."""
    A = (4.0 * G * (L1 - M + L) + L * (2.0 * L1 - M)) \
        / (L * (G * (8.0 * L1 - 6.0 * M + 6.0 * L) + 6.0 * L1 * L - M * M))
    beta1 = (-2.0 * G + M - 3.0 * L) \
        / (G * (-8.0 * L1 + 6.0 * M - 6.0 * L) - 6.0 * L1 * L + M * M)
    beta21 = (1.0 - L * A) / (2.0 * (L + G))
    beta22 = -M / (2.0 * (L + G))
    beta23 = -(2.0 * G + M) / (2.0 * (L + G))
    return A, beta1, beta21, beta22, beta23


def _duopoly_projection_gap(L1, M, L, t1, G):
    """How far a candidate root is from being a dealer fixed point.

    Recomputes the price-impact coefficients by linear projection given
    the trading intensities the candidate implies, and returns the max
    deviation from the candidate's own impacts.  The polynomial system
    picks up extraneous elimination roots that pass both concavity
    inequalities; those sit far from any projection fixed point, so this
    gap separates them from the equilibrium root.
    """
    A, b1, b21, b22, b23 = _duopoly_coefficients(L1, M, L, G)
    # order-flow loadings on the shocks (v - p0, u1, u2), var diag(1, t1, 1)
    c1 = A + b21 + b23 * b1
    ey1y1 = b1 * b1 + t1
    ey1y2 = b1 * c1 + t1 * b22
    ey2y2 = c1 * c1 + b22 * b22 * t1 + 1.0
    lam1 = b1 / ey1y1
    det = ey1y1 * ey2y2 - ey1y2 * ey1y2
    lam21 = (ey2y2 * b1 - ey1y2 * c1) / det
    lam22 = (ey1y1 * c1 - ey1y2 * b1) / det
    return max(abs(lam1 - L1), abs(lam21 - M), abs(lam22 - L))


def solve_duopoly(theta1, Gamma, config=None) -> DuopolyEquilibrium:
    """Solve the perfect-anticipation equilibrium at (theta1, Gamma).

    Multistart Newton on the three pricing polynomials in the impact
    coefficients, filtered by the two concavity inequalities, then the
    trading intensities from their closed forms.  Raises NoRoot /
    OnlySOCViolating when the regime has no valid equilibrium.
    """
    from .solver import SolverConfig

    if theta1 <= 0.0 or Gamma < 0.0:
        raise ValueError("need theta1 > 0 and Gamma >= 0")
    config = config or SolverConfig()
    t1, G = theta1, Gamma

    def fun(x):
        return duopoly_system(x[0], x[1], x[2], t1, G)

    starts = config.multistart_grid or _DUOPOLY_STARTS
    converged = []
    with np.errstate(all="ignore"):
        for x0 in starts:
            res = newton_system(fun, np.asarray(x0, dtype=float),
                                tol=config.residual_tol,
                                max_iter=config.max_iters,
                                damping=config.damping)
            if res is not None:
                converged.append(res)
    distinct = []
    for x, fn in converged:
        for k, (xk, fk) in enumerate(distinct):
            if np.max(np.abs(x - xk)) < config.dedup_tol:
                if fn < fk:
                    distinct[k] = (x, fn)
                break
        else:
            distinct.append((x, fn))
    if not distinct:
        raise NoRoot(f"duopoly system has no root at theta1={t1}, Gamma={G}")

    valid = []
    with np.errstate(all="ignore"):
        for x, fn in distinct:
            L1, M, L = x
            soc1 = L > 0.0
            soc2 = (4.0 * G * (L1 - M + L) + 4.0 * L1 * L - M * M) > 0.0
            if not (soc1 and soc2):
                continue
            # the system has an exact degenerate solution curve along which
            # the intensity denominators vanish; Newton stalls just off it
            # produce finite but meaningless coefficients, so require the
            # shared denominator to be well away from zero
            den = G * (-8.0 * L1 + 6.0 * M - 6.0 * L) - 6.0 * L1 * L + M * M
            scale = (G * (8.0 * abs(L1) + 6.0 * abs(M) + 6.0 * abs(L))
                     + 6.0 * abs(L1) * L + M * M)
            if abs(den) <= 1e-8 * scale:
                continue
            gap = _duopoly_projection_gap(L1, M, L, t1, G)
            if not np.isfinite(gap):
                gap = np.inf
            valid.append((x, fn, (soc1, soc2), gap))
    if not valid:
        raise OnlySOCViolating(
            f"duopoly roots all violate concavity at theta1={t1}, Gamma={G}")

    x, fn, soc, _ = min(valid, key=lambda v: v[3])
    L1, M, L = x
    A, beta1, beta21, beta22, beta23 = _duopoly_coefficients(L1, M, L, G)
    return DuopolyEquilibrium(
        Lambda1=L1, Lambda21=M, Lambda22=L, A=A,
        beta1=beta1, beta21=beta21, beta22=beta22, beta23=beta23,
        soc_ok=soc, residual_norm=fn,
    )


def _duopoly_loadings(eq: DuopolyEquilibrium, params: ModelParams) -> dict:
    """Coefficient 3-vectors over (w, u1, u2) for the duopolistic regime.

    Both insiders condition directly on w = v - p0, so the signal-noise
    shock drops out and beta1, beta21 rescale like the slow trader's
    intensity.
    """
    sv, s2 = params.sigma_v, params.sigma_2
    lam1 = eq.Lambda1 * sv / s2
    lam21 = eq.Lambda21 * sv / s2
    lam22 = eq.Lambda22 * sv / s2
    alpha = eq.A * s2 / sv
    b1 = eq.beta1 * s2 / sv
    b21 = eq.beta21 * s2 / sv
    b22, b23 = eq.beta22, eq.beta23

    w = np.array([1.0, 0.0, 0.0])
    u1 = np.array([0.0, 1.0, 0.0])
    u2 = np.array([0.0, 0.0, 1.0])

    i = alpha * w
    x1 = b1 * w
    y1 = x1 + u1
    x2 = b21 * w + b22 * u1 + b23 * x1
    y2 = i + x2 + u2
    p1 = lam1 * y1
    p2 = lam21 * y1 + lam22 * y2

    return {
        "w": w, "u1": u1, "u2": u2,
        "i": i, "x1": x1, "x2": x2, "y1": y1, "y2": y2,
        "p1": p1, "p2": p2, "v_m_p1": w - p1, "v_m_p2": w - p2,
        "cov": np.array([sv * sv, params.sigma_1 ** 2, s2 * s2]),
    }


def duopoly_outcomes(eq: DuopolyEquilibrium, params: ModelParams) -> Outcomes:
    """Expected profits, pricing errors and noise-trader losses, by moments."""

    def _e(cov, x, y):
        return float(np.dot(cov * x, y))

    q = _duopoly_loadings(eq, params)
    cov = q["cov"]
    inv = q["x1"] + q["x2"]
    return Outcomes(
        pi_IT=_e(cov, q["i"], q["v_m_p2"]),
        pi_HFT=(_e(cov, q["x1"], q["v_m_p1"])
                + _e(cov, q["x2"], q["v_m_p2"])),
        pi_HFT_holding=_e(cov, inv, q["v_m_p1"]),
        pi_HFT_impact=(-_e(cov, q["x2"], q["p2"])
                       + _e(cov, q["x2"], q["p1"])),
        penalty=-params.gamma * _e(cov, inv, inv),
        err_p1=_e(cov, q["v_m_p1"], q["v_m_p1"]),
        err_p2=_e(cov, q["v_m_p2"], q["v_m_p2"]),
        loss_NT1=_e(cov, q["u1"], q["p1"]) - _e(cov, q["u1"], q["w"]),
        loss_NT2=_e(cov, q["u2"], q["p2"]) - _e(cov, q["u2"], q["w"]),
    )


def duopoly_role(eq: DuopolyEquilibrium, tol=1e-10) -> Role:
    """Direction taxonomy of the fast trader in the duopolistic regime."""

    def _sgn(x):
        if abs(x) <= tol:
            return 0
        return 1 if x > 0.0 else -1

    dir1 = _sgn(eq.beta1)
    dir2 = _sgn(eq.beta21 + eq.beta23 * eq.beta1)
    if dir1 > 0 and dir2 > 0:
        variant = SMALL_IT
    elif dir1 > 0 and dir2 < 0:
        variant = ROUND_TRIPPER
    else:
        variant = INACTIVE
    return Role(variant=variant, dir1=dir1, dir2=dir2)


def find_gamma_tilde(theta1, config=None, width=1e-4):
    """Existence threshold of the general equilibrium at theta_eps = 0.

    Bisects the predicate "the general solver finds an SOC-passing root
    at (theta1, 0, Gamma)" to an interval of the given width.  Raises
    PredicateMonotoneViolation if the predicate is not a single switch
    from False to True along the probe grid.
    """
    from .solver import SolverConfig, default_multistart, solve

    if config is None:
        config = SolverConfig()
    seed_root = None

    def predicate(G):
        nonlocal seed_root
        params = ModelParams(theta1, 0.0, G)
        starts = list(config.multistart_grid or default_multistart(params))
        if seed_root is not None:
            starts = [seed_root] + starts
        cfg = SolverConfig(residual_tol=config.residual_tol,
                           max_iters=config.max_iters,
                           multistart_grid=starts,
                           damping=config.damping,
                           dedup_tol=config.dedup_tol)
        report = solve(params, cfg)
        if report.status == "Found":
            eq = report.roots[0]
            seed_root = (eq.Lambda22, eq.A, eq.beta1)
            return True
        return False

    if predicate(0.0):
        return 0.0

    hi = 0.25
    while not predicate(hi):
        hi *= 2.0
        if hi > 1e3:
            raise PredicateMonotoneViolation(
                f"no existence found up to Gamma={hi} at theta1={theta1}")

    probes = np.linspace(0.0, hi, 9)
    flags = [predicate(g) for g in probes]
    first_true = flags.index(True)
    if not all(flags[first_true:]) or any(flags[:first_true]):
        raise PredicateMonotoneViolation(
            f"existence predicate switches more than once on [0, {hi}]: {flags}")

    lo, hi = probes[first_true - 1], probes[first_true]
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
