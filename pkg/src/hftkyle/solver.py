"""Multistart Newton solver for the reduced equilibrium system.

The equilibrium reduces to three equations in (Lambda22, A, beta1):

    r1: quoted time-2 cross impact equals the dealer-regression slope,
    r2: quoted time-2 own impact equals the dealer-regression slope,
    r3: beta1 satisfies the fast trader's time-1 first-order condition.

With D = beta21 + beta1 (beta23 - beta22), E = 1 + D and

    S = A^2 [t1 E^2 + (1 + te) b1^2] + t1 te D^2 + (b1^2 te + t1)

the residuals are

    r1 = Lambda21 - A [-t1 b22 E + b1 - te b1 (b21 + b23 b1)] / S
    r2 = Lambda22 - A [t1 E + te b1^2] / S
    r3 = beta1 - [A / (A^2 + te) + 2 (L + G) b21 b23]
                 / (2 [Lambda1 + G - (L + G) b23^2])

where (Lambda1, Lambda21, beta21, beta22, beta23) come from the
closed-form map in ``core``.  Roots are found by damped Newton with a
central finite-difference Jacobian from a multistart grid, deduplicated,
refined in extended precision, and filtered by the three second-order
conditions.

``system_polynomials`` evaluates the equivalent denominator-cleared
polynomial system (one rational equation for beta1 plus two genuine
polynomials, degree 7 and 4 in A); it is kept as an independently
transcribed oracle and is not used by the solver itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Equilibrium, check_A_consistency, make_equilibrium
from .errors import DegenerateDenominator, NegativeRadicand
from .params import ModelParams
from .roots import newton_system

STATUS_FOUND = "Found"
STATUS_NO_ROOT = "NoRoot"
STATUS_ONLY_SOC_VIOLATING = "OnlySOCViolating"


@dataclass
class SolverConfig:
    residual_tol: float = 1e-12
    max_iters: int = 200
    multistart_grid: list | None = None
    damping: float = 1.0
    dedup_tol: float = 1e-6

    def __post_init__(self):
        if not self.residual_tol > 0.0:
            raise ValueError("residual_tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must be in (0, 1]")
        if not self.dedup_tol > self.residual_tol:
            raise ValueError("dedup_tol must exceed residual_tol")


@dataclass
class SolveReport:
    roots: list = field(default_factory=list)
    rejected: int = 0
    converged_starts: int = 0
    status: str = STATUS_NO_ROOT


def _residuals(L, A, b1, t1, te, G):
    """Dtype-generic residual triple; raises on vanishing denominators."""
    one, two, four = type(L)(1), type(L)(2), type(L)(4)

    d = b1 * b1 * (A * A + te) + t1
    Lambda1 = A * b1 / d
    M = (A ** 3 * L * (two * (b1 - one) * G - L) + A * A * G
         + two * A * te * L * ((b1 - one) * G - L) + te * (G + L)) \
        / (A * b1 * (A * A + te) * (two * G + L))
    b21 = A * (one - A * L) / (two * (A * A + te) * (G + L))
    b22 = -M / (two * (G + L))
    b23 = -(two * G + M) / (two * (G + L))

    D = b21 + b1 * (b23 - b22)
    E = one + D
    S = A * A * (t1 * E * E + (one + te) * b1 * b1) + t1 * te * D * D \
        + (b1 * b1 * te + t1)

    r1 = M - A * (-t1 * b22 * E + b1 - te * b1 * (b21 + b23 * b1)) / S
    r2 = L - A * (t1 * E + te * b1 * b1) / S
    # time-1 concavity denominator, written without the Gamma^2 cancellation
    soc2 = Lambda1 + (four * G * (L - M) - M * M) / (four * (G + L))
    r3 = b1 - (A / (A * A + te) + two * (L + G) * b21 * b23) / (two * soc2)
    return r1, r2, r3


def residual_map(Lambda22, A, beta1, params: ModelParams):
    """Residual triple of the reduced system at (Lambda22, A, beta1)."""
    return _residuals(float(Lambda22), float(A), float(beta1),
                      params.theta1, params.theta_eps, params.Gamma)


def default_multistart(params: ModelParams):
    """Coarse positive-orthant grid, augmented with limit-regime seeds.

    64 grid points always; when Gamma > 5 the strong-aversion limit
    coefficients are appended, and when theta1 < 0.01 the vanishing-
    theta1 limit point (with beta1 seeded at theta1).
    """
    starts = [
        (L, A, b1)
        for L in (0.05, 0.2, 0.5, 0.8)
        for A in (0.3, 0.7, 1.0, 1.5)
        for b1 in (1e-3, 0.05, 0.2, 0.5)
    ]
    if params.Gamma < 0.2 and 0.0 < params.theta_eps < 0.05:
        # weak aversion with an accurate signal: the fast trader's time-1
        # intensity grows like theta_eps**(-1/2), far outside the base grid
        b_big = 2.0 * (0.03 / params.theta_eps) ** 0.5
        starts += [
            (L, A, b1)
            for L in (0.35, 0.5)
            for A in (0.03, 0.15, 0.5)
            for b1 in (0.5 * b_big, b_big, 2.0 * b_big)
        ]
    if params.Gamma > 5.0:
        from .limits import solve_gamma_inf
        try:
            lim = solve_gamma_inf(params.theta1, params.theta_eps)
            starts.append((lim.Lambda22, lim.A, lim.beta))
        except Exception:
            pass
    if params.theta1 < 0.01:
        from .limits import solve_theta1_zero
        try:
            lim = solve_theta1_zero(params.theta_eps, params.Gamma)
            starts.append((lim.Lambda22, lim.alpha_norm, params.theta1))
        except Exception:
            pass
    return starts


def _refine_longdouble(x, t1, te, G, iters=2):
    """A couple of Newton steps in 80-bit arithmetic to hit the x round-off floor."""
    ld = np.longdouble
    x = np.array([ld(v) for v in x])
    t1, te, G = ld(t1), ld(te), ld(G)
    h0 = ld(1e-7)
    for _ in range(iters):
        try:
            f = np.array(_residuals(x[0], x[1], x[2], t1, te, G))
        except (ArithmeticError, ValueError):
            return None
        if not np.all(np.isfinite(f.astype(float))):
            return None
        J = np.empty((3, 3), dtype=ld)
        for j in range(3):
            h = h0 * max(ld(1), abs(x[j]))
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            try:
                fp = np.array(_residuals(xp[0], xp[1], xp[2], t1, te, G))
                fm = np.array(_residuals(xm[0], xm[1], xm[2], t1, te, G))
            except (ArithmeticError, ValueError):
                return None
            J[:, j] = (fp - fm) / (2 * h)
        try:
            dx = np.linalg.solve(J.astype(float), -f.astype(float))
        except np.linalg.LinAlgError:
            return None
        x = x + dx.astype(ld)
    return x


def solve(params: ModelParams, config: SolverConfig | None = None) -> SolveReport:
    """Find all distinct equilibria reachable from the multistart grid.

    Returns a SolveReport whose roots pass all three second-order
    conditions, sorted by residual norm.  ``rejected`` counts distinct
    converged roots dropped by the SOC filter.  If theta_eps = 0 and no
    root survives, the caller should switch to the perfect-anticipation
    (duopolistic) solver; nonexistence here is genuine below that
    regime's aversion threshold.
    """
    config = config or SolverConfig()
    t1, te, G = params.theta1, params.theta_eps, params.Gamma

    def fun(x):
        return _residuals(x[0], x[1], x[2], t1, te, G)

    starts = config.multistart_grid
    if starts is None:
        starts = default_multistart(params)

    converged = []
    with np.errstate(all="ignore"):
        for x0 in starts:
            res = newton_system(fun, np.asarray(x0, dtype=float),
                                tol=config.residual_tol,
                                max_iter=config.max_iters,
                                damping=config.damping)
            if res is not None:
                converged.append(res)

    # deduplicate in max-norm on the reduced coordinates
    distinct = []
    for x, fn in converged:
        for k, (xk, fk) in enumerate(distinct):
            if np.max(np.abs(x - xk)) < config.dedup_tol:
                if fn < fk:
                    distinct[k] = (x, fn)
                break
        else:
            distinct.append((x, fn))

    ld = np.longdouble
    tl = (ld(t1), ld(te), ld(G))

    def certified_norm(xl):
        try:
            r = _residuals(xl[0], xl[1], xl[2], *tl)
        except (DegenerateDenominator, ArithmeticError, ValueError):
            return None
        r = np.asarray(r, dtype=float)
        if not np.all(np.isfinite(r)):
            return None
        return float(np.max(np.abs(r)))

    # refine each candidate in 80-bit arithmetic and certify it there:
    # when beta1 is tiny the double-precision residual moves by ~1e-12
    # under a half-ulp shift of Lambda22 alone, so the float64 value is
    # not a fair acceptance measure
    certified = []
    with np.errstate(all="ignore"):
        for x, _ in distinct:
            xl = np.array([ld(v) for v in x])
            f0 = certified_norm(xl)
            if f0 is None:
                continue
            xr = _refine_longdouble(x, t1, te, G)
            if xr is not None and np.max(np.abs(xr.astype(float) - x)) < 1e-2:
                f1 = certified_norm(xr)
                if f1 is not None and f1 < f0:
                    xl, f0 = xr, f1
            if f0 <= config.residual_tol:
                certified.append((xl.astype(float), f0))

    # stalled starts straddling one ill-conditioned root collapse onto the
    # same point after refinement, so deduplicate once more
    final = []
    for x, fn in certified:
        for k, (xk, fk) in enumerate(final):
            if np.max(np.abs(x - xk)) < config.dedup_tol:
                if fn < fk:
                    final[k] = (x, fn)
                break
        else:
            final.append((x, fn))

    roots, rejected = [], 0
    with np.errstate(all="ignore"):
        for x, fn in final:
            try:
                eq = make_equilibrium(x[0], x[1], x[2], params,
                                      residual_norm=fn)
            except (DegenerateDenominator, ArithmeticError, ValueError):
                continue
            # the residual system is scale-degenerate when theta_eps = 0:
            # it admits artifact roots with A -> inf, beta1 -> 0 and A*beta1
            # finite, which the intensity consistency condition rules out
            try:
                drift = abs(check_A_consistency(eq, params))
            except (NegativeRadicand, ArithmeticError, ValueError):
                continue
            if not np.isfinite(drift) or drift > 1e-8 * max(1.0, abs(eq.A)):
                continue
            if all(eq.soc_ok):
                roots.append(eq)
            else:
                rejected += 1

    roots.sort(key=lambda e: e.residual_norm)
    if roots:
        status = STATUS_FOUND
    elif rejected > 0:
        status = STATUS_ONLY_SOC_VIOLATING
    else:
        status = STATUS_NO_ROOT
    return SolveReport(roots=roots, rejected=rejected,
                       converged_starts=len(converged), status=status)


# -- independently transcribed polynomial form of the same system ----------

def system_polynomials(Lambda22, A, beta1, params: ModelParams):
    """Denominator-cleared system at (Lambda22, A, beta1), long-double precision.

    Returns the triple (p1, p2, p3): p1 is the time-1 FOC with its outer
    denominator cleared, p2 and p3 are polynomials of degree 7 and 4 in A.
    All three vanish at an equilibrium.
    """
    ld = np.longdouble
    L, A, b = ld(Lambda22), ld(A), ld(beta1)
    t1, te, G = ld(params.theta1), ld(params.theta_eps), ld(params.Gamma)

    # p1: b = N / (b (A^2+te)^2 (G+L) (2G+L) S), cleared to b * D - N
    P = (A ** 3 * (4 * b * G * (G + L) - L * (2 * G + L)) + A * A * G
         + 2 * A * te * (G + L) * (2 * b * G - L) + te * (G + L))
    S = (4 * A * b / (A * A * b * b + b * b * te + t1)
         - P * P / (A * A * b * b * (A * A + te) ** 2 * (G + L) * (2 * G + L) ** 2)
         + 4 * G)
    N = (A ** 4 * (-L) * (L * (2 * G + L) - 4 * b * G * (G + L))
         + A ** 3 * L * ((2 * b + 3) * G + 2 * b * L + L)
         + A * A * (4 * b * te * G * G * L + G * (2 * (2 * b - 1) * te * L * L - 1)
                    - 2 * te * L ** 3)
         + A * (2 * b + 3) * te * L * (G + L)
         - te * (G + L))
    D = b * (A * A + te) ** 2 * (G + L) * (2 * G + L) * S
    p1 = b * D - N

    # p2: degree 7 in A
    c7 = (2 * (b - 1) * G - L) * L * (
        4 * ((te + t1 + 1) * G * G + 2 * (te + 1) * L * G + (te + 1) * L * L) * b * b
        - 4 * G * (2 * G + L) * t1 * b + (2 * G + L) ** 2 * t1)
    c6 = -(8 * te * G * (G + L) ** 2 * b ** 3
           - 4 * ((te + t1 - 1) * G ** 3 + L * (2 * te - t1 - 3) * G * G
                  + (te - 3) * L * L * G - L ** 3) * b * b
           + 4 * G * (2 * G * G - L * G - L * L) * t1 * b
           - (G - L) * (2 * G + L) ** 2 * t1)
    c5 = (8 * te * G * L * ((2 * te + 3 * t1 + 3) * G * G
                            + 2 * (2 * te + 3) * L * G + (2 * te + 3) * L * L) * b ** 3
          - 2 * te * (4 * L * (2 * te + 7 * t1 + 3) * G ** 3
                      + (2 * L * L * (11 * te + 8 * t1 + 16) - 1) * G * G
                      + (4 * (5 * te + 7) * L ** 3 - 2 * L) * G
                      + L * L * ((6 * te + 8) * L * L - 1)) * b * b
          + 2 * G * ((11 * te + 4) * L ** 3 + 4 * G * G * (6 * te * L + L)
                     + G * (8 * (4 * te + 1) * L * L - 1)) * t1 * b
          - (2 * G + L) * (2 * (3 * te + 2) * L ** 3 + 4 * G * G * (2 * te * L + L)
                           + G * (2 * (7 * te + 4) * L * L - 1)) * t1)
    c4 = (-16 * te * te * G * (G + L) ** 2 * b ** 3
          + 4 * te * ((2 * te + 3 * t1 - 1) * G ** 3 + L * (6 * te - t1 - 3) * G * G
                      + 3 * (2 * te - 1) * L * L * G + (2 * te - 1) * L ** 3) * b * b
          - 8 * te * G * G * (2 * G + L) * t1 * b
          + (G + L) * ((8 * te + 4) * G * G + 4 * (2 * te * L + L) * G
                       + te * L * L) * t1)
    c3 = te * (8 * te * G * L * ((te + 3 * t1 + 3) * G * G + 2 * (te + 3) * L * G
                                 + (te + 3) * L * L) * b ** 3
               - 4 * te * L * (2 * (te + 5 * t1 + 3) * G ** 3
                               + L * (6 * te + 7 * t1 + 17) * G * G
                               + 2 * (3 * te + 8) * L * L * G
                               + (2 * te + 5) * L ** 3) * b * b
               + 2 * G * (8 * (te + 1) * L ** 3 + 4 * (5 * te + 4) * G * L * L
                          + 4 * (3 * te + 2) * G * G * L - L - 2 * G) * t1 * b
               - L * (G + L) * (8 * (te + 2) * G * G + 4 * (4 * te + 7) * L * G
                                + 4 * (2 * te + 3) * L * L - 1) * t1)
    c2 = 4 * te * (-2 * te * te * G * (G + L) ** 2 * b ** 3
                   + te * ((te + 3 * t1 + 1) * G ** 3
                           + L * (4 * te + t1 + 3) * G * G
                           + (5 * te + 3) * L * L * G
                           + (2 * te + 1) * L ** 3) * b * b
                   - te * G * (2 * G * G + 3 * L * G + L * L) * t1 * b
                   + (G + L) ** 2 * ((te + 2) * G + 2 * te * L + L) * t1)
    c1 = 2 * te * te * (4 * te * G * L * ((t1 + 1) * G * G + 2 * L * G + L * L) * b ** 3
                        - te * (G + L) * (4 * L ** 3 + 8 * G * L * L
                                          + 4 * G * G * (t1 + 1) * L + L + G) * b * b
                        + G * (4 * L ** 3 + 8 * G * L * L + 4 * G * G * L
                               - L - G) * t1 * b
                        - (G + L) ** 2 * (4 * L * L + 4 * G * L + 1) * t1)
    c0 = 4 * te * te * (G + L) * (
        te * ((t1 + 1) * G * G + 2 * L * G + L * L) * b * b + (G + L) ** 2 * t1)
    p2 = (((((((c7 * A + c6) * A + c5) * A + c4) * A + c3) * A + c2) * A + c1) * A + c0)

    # p3: degree 4 in A
    p3 = (A ** 4 * L * (4 * b * b * (G * G * (te + t1 + 1)
                                     + 2 * (te + 1) * G * L + (te + 1) * L * L)
                        - 4 * b * G * t1 * (2 * G + L) + t1 * (2 * G + L) ** 2)
          - 2 * A ** 3 * (2 * b * b * te * (G + L) ** 2 - 2 * b * G * G * t1
                          + G * t1 * (2 * G + L))
          + A * A * (4 * b * b * te * L * (G * G * (te + 2 * t1 + 2)
                                           + 2 * (te + 2) * G * L + (te + 2) * L * L)
                     - 4 * b * te * G * L * t1 * (2 * G + L)
                     + t1 * (4 * (te + 1) * G * G * L + 8 * (te + 1) * G * L * L
                             + 4 * (te + 1) * L ** 3 - 2 * G - L))
          - 4 * A * te * (b * b * te * (G + L) ** 2 - b * G * G * t1
                          + t1 * (G + L) ** 2)
          + 4 * te * L * (b * b * te * (G * G * (t1 + 1) + 2 * G * L + L * L)
                          + t1 * (G + L) ** 2))

    return float(p1), float(p2), float(p3)
