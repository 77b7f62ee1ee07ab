"""Grid sweeps over the signal-accuracy / inventory-aversion plane.

Sweeps run at a fixed first-period noise ratio theta1 over a grid of
(theta_eps, Gamma) points, in normalized units (sigma_v = sigma_2 = 1).
Within a Gamma row the solver is warm-started from the previous point's
root (continuation), which both speeds the sweep up and keeps the
selected root on one branch.  Points where the general system has no
valid root fall back to the perfect-anticipation regime when
theta_eps = 0, and otherwise record their failure status so that
nonexistence regions show up in the output instead of aborting it.

Boundary extraction works on the solved grid plus local bisection:

* ``find_role_boundaries`` locates the aversion band inside which the
  fast trader's second-period direction switches with signal accuracy,
  and traces the switching curve.
* ``find_benefit_thresholds`` locates where the slow trader's profit
  crosses its no-fast-trader baseline, and where its slope in
  theta_eps turns.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (Equilibrium, Outcomes, Role, classify_role,
                   compute_outcomes)
from .errors import BoundaryNotBracketed, NoRoot, OnlySOCViolating
from .limits import (DuopolyEquilibrium, duopoly_outcomes, duopoly_role,
                     solve_duopoly)
from .params import ModelParams
from .solver import STATUS_FOUND, SolverConfig, solve

logger = logging.getLogger(__name__)

STATUS_FOUND_DUOPOLY = "FoundDuopoly"


def default_theta_eps_grid() -> np.ndarray:
    """Log-spaced accuracy grid covering the whole studied range."""
    return np.geomspace(1e-4, 9.0, 60)


def default_gamma_grid() -> np.ndarray:
    """Aversion grid: dense on [0,1], coarser on [2,20] and [30,100]."""
    return np.concatenate([
        np.linspace(0.0, 1.0, 11),
        np.arange(2.0, 21.0, 2.0),
        np.arange(30.0, 101.0, 10.0),
    ])


@dataclass
class SweepSpec:
    """Grid description for one sweep at fixed theta1."""

    theta1: float
    theta_eps_grid: np.ndarray = field(default_factory=default_theta_eps_grid)
    Gamma_grid: np.ndarray = field(default_factory=default_gamma_grid)
    continuation: bool = True

    def __post_init__(self):
        if not self.theta1 > 0.0:
            raise ValueError("theta1 must be positive")
        self.theta_eps_grid = np.asarray(self.theta_eps_grid, dtype=float)
        self.Gamma_grid = np.asarray(self.Gamma_grid, dtype=float)
        for name, g in (("theta_eps_grid", self.theta_eps_grid),
                        ("Gamma_grid", self.Gamma_grid)):
            if g.size == 0:
                raise ValueError(f"{name} is empty")
            if np.any(np.diff(g) <= 0.0):
                raise ValueError(f"{name} must be strictly increasing")
        if self.theta_eps_grid[0] < 0.0 or self.Gamma_grid[0] < 0.0:
            raise ValueError("grid values must be nonnegative")


@dataclass(frozen=True)
class SweepRow:
    """One grid point: either a solved equilibrium or a failure record."""

    theta1: float
    theta_eps: float
    Gamma: float
    status: str
    eq: Equilibrium | None = None
    duopoly: DuopolyEquilibrium | None = None
    outcomes: Outcomes | None = None
    role: Role | None = None
    selected_root_index: int = -1

    @property
    def solved(self) -> bool:
        return self.outcomes is not None


def _solve_point(theta1, theta_eps, Gamma, seed, config, continuation):
    """Solve one grid point, preferring the branch nearest the seed.

    Returns (row, next_seed); the seed passes through unchanged when the
    point fails, so later points continue from the last solved branch.
    """
    params = ModelParams(theta1, theta_eps, Gamma)
    report = None
    if continuation and seed is not None:
        warm = replace(config, multistart_grid=[tuple(seed)])
        report = solve(params, warm)
        if report.status != STATUS_FOUND:
            report = None
    if report is None:
        report = solve(params, config)

    if report.status == STATUS_FOUND:
        idx = 0
        if seed is not None and len(report.roots) > 1:
            def dist(e):
                return max(abs(e.Lambda22 - seed[0]), abs(e.A - seed[1]),
                           abs(e.beta1 - seed[2]))
            idx = min(range(len(report.roots)),
                      key=lambda k: dist(report.roots[k]))
        eq = report.roots[idx]
        row = SweepRow(theta1, theta_eps, Gamma, STATUS_FOUND, eq=eq,
                       outcomes=compute_outcomes(eq, params),
                       role=classify_role(eq), selected_root_index=idx)
        return row, (eq.Lambda22, eq.A, eq.beta1)

    if theta_eps == 0.0:
        # below the existence threshold the perfect-anticipation regime
        # takes over
        try:
            deq = solve_duopoly(theta1, Gamma, config)
        except (NoRoot, OnlySOCViolating):
            pass
        else:
            row = SweepRow(theta1, theta_eps, Gamma, STATUS_FOUND_DUOPOLY,
                           duopoly=deq,
                           outcomes=duopoly_outcomes(deq, params),
                           role=duopoly_role(deq))
            return row, seed
    return SweepRow(theta1, theta_eps, Gamma, report.status), seed


def _run_gamma_row(task):
    theta1, Gamma, te_grid, config, continuation = task
    rows, seed = [], None
    for te in te_grid:
        row, seed = _solve_point(theta1, te, Gamma, seed, config,
                                 continuation)
        rows.append(row)
    return rows


def run_sweep(spec: SweepSpec, config: SolverConfig | None = None,
              jobs: int = 1) -> list[SweepRow]:
    """Solve every grid point; rows in grid order (Gamma outer, theta_eps inner).

    Gamma rows are independent, so ``jobs > 1`` distributes them over
    processes; within a row the points run left to right so that each
    solve can continue from its already-solved neighbor.  Output is
    deterministic and independent of ``jobs``.
    """
    config = config or SolverConfig()
    tasks = [(spec.theta1, float(G), spec.theta_eps_grid, config,
              spec.continuation) for G in spec.Gamma_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_row = list(pool.map(_run_gamma_row, tasks))
    else:
        per_row = [_run_gamma_row(t) for t in tasks]
    return [row for rows in per_row for row in rows]


# -- boundary curves --------------------------------------------------------

def _direction2(eq) -> float:
    """Net second-period loading on the anticipated order."""
    return eq.beta21 + eq.beta23 * eq.beta1


def _solved_general(rows):
    return [r for r in rows if r.status == STATUS_FOUND]


def _d2_at(theta1, theta_eps, Gamma, seed, config):
    """Sign function for the role boundary, warm-started from seed."""
    row, seed = _solve_point(theta1, theta_eps, Gamma, seed, config, True)
    if row.eq is None:
        raise NoRoot(f"no general root at theta1={theta1}, "
                     f"theta_eps={theta_eps}, Gamma={Gamma}")
    return _direction2(row.eq), seed


def _bisect_theta(fun, lo, hi, f_lo, seed, config, xtol=1e-4):
    """Bisect a sign change of fun over theta_eps, threading the seed."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid, seed = fun(mid, seed)
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_role_boundaries(theta1, theta_eps_grid=None, Gamma_grid=None,
                         config: SolverConfig | None = None, jobs: int = 1):
    """Aversion band and switching curve of the fast trader's role.

    Returns (Gamma_under, Gamma_over, curve): the largest grid aversion
    at which she trades with the anticipated order at every accuracy,
    the smallest at which she reverses at every accuracy, and for the
    grid points strictly between, the accuracy at which her
    second-period direction flips, refined by bisection to 1e-4.

    Raises BoundaryNotBracketed when a mixed row shows no adjacent sign
    change to bisect (the observed pattern is included in the message).
    """
    config = config or SolverConfig()
    spec = SweepSpec(
        theta1=theta1,
        theta_eps_grid=(default_theta_eps_grid() if theta_eps_grid is None
                        else theta_eps_grid),
        Gamma_grid=(default_gamma_grid() if Gamma_grid is None
                    else Gamma_grid),
    )
    rows = run_sweep(spec, config, jobs=jobs)

    by_gamma: dict[float, list[SweepRow]] = {}
    for r in rows:
        by_gamma.setdefault(r.Gamma, []).append(r)

    gamma_under = None
    gamma_over = None
    mixed: list[float] = []
    for G in spec.Gamma_grid:
        solved = [r for r in by_gamma[float(G)] if r.role is not None]
        if not solved:
            continue
        variants = {r.role.variant for r in solved}
        if variants == {"SmallIT"}:
            gamma_under = float(G)
        elif variants == {"RoundTripper"}:
            if gamma_over is None:
                gamma_over = float(G)
        else:
            mixed.append(float(G))

    curve = []
    for G in mixed:
        solved = _solved_general(by_gamma[G])
        solved.sort(key=lambda r: r.theta_eps)
        d2 = [_direction2(r.eq) for r in solved]
        bracket = None
        for k in range(len(d2) - 1):
            if (d2[k] > 0.0) != (d2[k + 1] > 0.0):
                bracket = k
                break
        if bracket is None:
            pattern = "".join("+" if v > 0.0 else "-" for v in d2)
            raise BoundaryNotBracketed(
                f"no sign change of the period-2 direction at theta1={theta1},"
                f" Gamma={G}; observed pattern {pattern}")
        lo_row = solved[bracket]
        seed = (lo_row.eq.Lambda22, lo_row.eq.A, lo_row.eq.beta1)

        def fun(te, s, G=G):
            return _d2_at(theta1, te, G, s, config)

        theta_bar = _bisect_theta(fun, lo_row.theta_eps,
                                  solved[bracket + 1].theta_eps,
                                  d2[bracket], seed, config)
        curve.append((G, theta_bar))
    return gamma_under, gamma_over, curve


def find_benefit_thresholds(theta1, Gamma, theta_eps_grid=None,
                            config: SolverConfig | None = None):
    """Accuracy thresholds where the slow trader's profit crosses and turns.

    Returns (theta_tilde, theta_hat): the accuracy above which her
    profit exceeds the no-fast-trader baseline (sign change of A - 1),
    and the accuracy at which the profit's slope in theta_eps changes
    sign (central finite differences with step equal to half the local
    grid spacing, re-solved, not interpolated).  Either value is None
    when the crossing lies outside the grid.  The expected ordering
    theta_hat >= theta_tilde >= theta_bar is checked and logged when
    violated, not raised.
    """
    config = config or SolverConfig()
    te_grid = (default_theta_eps_grid() if theta_eps_grid is None
               else np.asarray(theta_eps_grid, dtype=float))

    rows, seed = [], None
    for te in te_grid:
        row, seed = _solve_point(theta1, float(te), Gamma, seed, config, True)
        rows.append(row)
    solved = _solved_general(rows)
    if len(solved) < 3:
        raise NoRoot(f"too few solved points at theta1={theta1}, "
                     f"Gamma={Gamma} to locate thresholds")

    def a_at(te, s):
        row, s = _solve_point(theta1, te, Gamma, s, config, True)
        if row.eq is None:
            raise NoRoot(f"no general root at theta_eps={te}")
        return row.eq.A, s

    # profit crossing: sign change of A - 1
    theta_tilde = None
    avals = [r.eq.A for r in solved]
    for k in range(len(solved) - 1):
        if (avals[k] - 1.0 > 0.0) != (avals[k + 1] - 1.0 > 0.0):
            lo_row = solved[k]
            s0 = (lo_row.eq.Lambda22, lo_row.eq.A, lo_row.eq.beta1)

            def fcross(te, s):
                a, s = a_at(te, s)
                return a - 1.0, s

            theta_tilde = _bisect_theta(fcross, solved[k].theta_eps,
                                        solved[k + 1].theta_eps,
                                        avals[k] - 1.0, s0, config)
            break

    # slope turning point: sign change of the re-solved central difference
    def slope(te, h, s):
        up, s = a_at(te + h, s)
        dn, s = a_at(max(te - h, 0.5 * te), s)
        return (up - dn) / (te + h - max(te - h, 0.5 * te)), s

    theta_hat = None
    seeds = [(r.eq.Lambda22, r.eq.A, r.eq.beta1) for r in solved]
    derivs = []
    s = seeds[0]
    for k, r in enumerate(solved):
        left = r.theta_eps - solved[k - 1].theta_eps if k > 0 else np.inf
        right = (solved[k + 1].theta_eps - r.theta_eps
                 if k + 1 < len(solved) else np.inf)
        h = 0.5 * min(left, right)
        if not np.isfinite(h):
            derivs.append(None)
            continue
        d, s = slope(r.theta_eps, h, seeds[k])
        derivs.append(d)
    for k in range(len(solved) - 1):
        if derivs[k] is None or derivs[k + 1] is None:
            continue
        if (derivs[k] > 0.0) != (derivs[k + 1] > 0.0):
            h = 0.5 * (solved[k + 1].theta_eps - solved[k].theta_eps)

            def fslope(te, s, h=h):
                return slope(te, h, s)

            theta_hat = _bisect_theta(fslope, solved[k].theta_eps,
                                      solved[k + 1].theta_eps,
                                      derivs[k], seeds[k], config)
            break

    # ordering check against the role-switch accuracy on the same row
    d2 = [_direction2(r.eq) for r in solved]
    theta_bar = None
    for k in range(len(d2) - 1):
        if (d2[k] > 0.0) != (d2[k + 1] > 0.0):
            s0 = seeds[k]
            theta_bar = _bisect_theta(
                lambda te, s: _d2_at(theta1, te, Gamma, s, config),
                solved[k].theta_eps, solved[k + 1].theta_eps, d2[k],
                s0, config)
            break
    order = [v for v in (theta_bar, theta_tilde, theta_hat) if v is not None]
    if any(b < a - 1e-3 for a, b in zip(order, order[1:])):
        logger.warning(
            "threshold ordering violated at theta1=%s, Gamma=%s: "
            "theta_bar=%s, theta_tilde=%s, theta_hat=%s",
            theta1, Gamma, theta_bar, theta_tilde, theta_hat)
    return theta_tilde, theta_hat


# -- sweep diagnostics ------------------------------------------------------

def continuation_jumps(rows, factor=10.0, floor=1e-9):
    """Grid points where the selected root jumps off its branch.

    Compares each step of the coefficient curve along theta_eps with the
    previous step at the same Gamma; a step more than ``factor`` times
    larger flags a suspected branch switch.  Returns [(Gamma, theta_eps)].
    """
    by_gamma: dict[float, list[SweepRow]] = {}
    for r in rows:
        if r.status == STATUS_FOUND:
            by_gamma.setdefault(r.Gamma, []).append(r)
    flags = []
    for G, grp in by_gamma.items():
        grp.sort(key=lambda r: r.theta_eps)
        coef = np.array([[r.eq.Lambda22, r.eq.A, r.eq.beta1] for r in grp])
        if len(coef) < 3:
            continue
        steps = np.max(np.abs(np.diff(coef, axis=0)), axis=1)
        for k in range(1, len(steps)):
            if steps[k] > factor * max(steps[k - 1], floor):
                flags.append((G, grp[k + 1].theta_eps))
    return flags


def harmed_region_findings(rows, baseline=0.5, Gamma_max=1.0):
    """Violations of profit monotonicity in the harmed region.

    Where the slow trader earns less than ``baseline`` and aversion is
    at most ``Gamma_max``, her profit should not fall as the signal gets
    noisier along a Gamma row; counterexamples are returned rather than
    asserted away.
    """
    by_gamma: dict[float, list[SweepRow]] = {}
    for r in rows:
        if r.solved and r.Gamma <= Gamma_max:
            by_gamma.setdefault(r.Gamma, []).append(r)
    findings = []
    for G, grp in by_gamma.items():
        grp.sort(key=lambda r: r.theta_eps)
        harmed = [r for r in grp if r.outcomes.pi_IT < baseline]
        for a, b in zip(harmed, harmed[1:]):
            if b.outcomes.pi_IT < a.outcomes.pi_IT - 1e-12:
                findings.append((G, a.theta_eps, b.theta_eps,
                                 a.outcomes.pi_IT, b.outcomes.pi_IT))
    return findings
