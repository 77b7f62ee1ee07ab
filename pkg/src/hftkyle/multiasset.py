"""Two-asset extension: joint anticipatory trading on correlated assets.

Two variants of the two-asset market are solved by damped fixed-point
iteration on the strategy blocks, with dealer price impacts recomputed
from Gaussian projections each pass:

* full: the slow trader observes both values and trades both assets;
  every strategy block is a 2x2 matrix and dealers condition on the
  2-vector order flows jointly.
* spillover: the slow trader trades asset 1 only; the fast trader
  applies her one-dimensional signal to both assets, and each asset's
  dealers see only that asset's own flows, so the price-impact matrices
  are diagonal.

The iteration starts from decoupled single-asset solves (correlation
ignored), follows the best-response update order (impacts, slow
intensity, period-2 response, period-1 response), and halves its step
size whenever the update norm grows.  Positive-definiteness of the
three second-order-condition matrices is verified at the fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import INACTIVE, ROUND_TRIPPER, SMALL_IT, Role
from .errors import NoConvergence, PDViolation
from .params import ModelParams


@dataclass(frozen=True)
class MultiParams:
    """Two-asset market parameters in dimensional units."""

    p0: np.ndarray
    Sigma_v: np.ndarray
    Sigma_eps: np.ndarray
    Sigma_1: np.ndarray
    Sigma_2: np.ndarray
    gamma_mat: np.ndarray

    def __post_init__(self):
        for name in ("p0", "Sigma_v", "Sigma_eps", "Sigma_1", "Sigma_2",
                     "gamma_mat"):
            object.__setattr__(self, name,
                               np.asarray(getattr(self, name), dtype=float))
        if self.p0.shape != (2,):
            raise ValueError("p0 must be a 2-vector")
        for name in ("Sigma_v", "Sigma_eps", "Sigma_1", "Sigma_2",
                     "gamma_mat"):
            m = getattr(self, name)
            if m.shape != (2, 2) or not np.allclose(m, m.T):
                raise ValueError(f"{name} must be symmetric 2x2")
        if np.linalg.eigvalsh(self.Sigma_v)[0] <= 0.0:
            raise ValueError("Sigma_v must be positive-definite")
        if abs(self.rho) >= 1.0:
            raise ValueError("need |rho| < 1")
        for name in ("Sigma_eps", "Sigma_1", "Sigma_2"):
            m = getattr(self, name)
            if np.any(np.diag(m) < 0.0) or m[0, 1] != 0.0:
                raise ValueError(f"{name} must be diagonal and nonnegative")
        if np.linalg.eigvalsh(self.gamma_mat)[0] < -1e-15:
            raise ValueError("gamma_mat must be positive-semidefinite")

    @property
    def rho(self) -> float:
        return float(self.Sigma_v[0, 1]
                     / np.sqrt(self.Sigma_v[0, 0] * self.Sigma_v[1, 1]))


def baseline_spillover_params(gamma1: float) -> MultiParams:
    """Calibrated two-asset market with the aversion tie gamma1=gamma2=4*gamma3.

    Normalized prices at 1; daily value volatility sqrt(0.00036) on both
    assets with correlation 0.8; noise trading 0.6/0.5 (fast) and 1/1
    (slow) million shares; signal noise 0.2 million shares.
    """
    sv2 = 0.00036
    return MultiParams(
        p0=np.array([1.0, 1.0]),
        Sigma_v=sv2 * np.array([[1.0, 0.8], [0.8, 1.0]]),
        Sigma_eps=np.diag([0.2 ** 2, 0.2 ** 2]),
        Sigma_1=np.diag([0.6 ** 2, 0.5 ** 2]),
        Sigma_2=np.diag([1.0, 1.0]),
        gamma_mat=np.array([[gamma1, gamma1 / 4.0],
                            [gamma1 / 4.0, gamma1]]),
    )


def baseline_full_params(gamma1: float) -> MultiParams:
    """Same calibration as the spillover baseline, both assets informed."""
    mp = baseline_spillover_params(gamma1)
    return MultiParams(p0=mp.p0, Sigma_v=mp.Sigma_v, Sigma_eps=mp.Sigma_eps,
                       Sigma_1=mp.Sigma_1, Sigma_2=mp.Sigma_2,
                       gamma_mat=mp.gamma_mat)


@dataclass(frozen=True)
class MultiEquilibrium:
    """Fixed point of the two-asset best-response map."""

    variant: str
    lambda1: np.ndarray
    lambda21: np.ndarray
    lambda22: np.ndarray
    alpha: np.ndarray | float
    beta1: np.ndarray
    beta21: np.ndarray
    beta22: np.ndarray
    beta23: np.ndarray
    pd_ok: tuple
    soc_eigs: tuple
    fixed_point_residual: float


@dataclass
class FixedPointConfig:
    """Iteration budget and damping schedule."""

    max_iters: int = 20000
    tol: float = 1e-12
    damping: float = 1.0
    min_damping: float = 2.0 ** -16
    stall_iters: int = 800

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must be in (0, 1]")
        if not 0.0 < self.min_damping <= self.damping:
            raise ValueError("min_damping must be in (0, damping]")
        if self.stall_iters < 1:
            raise ValueError("stall_iters must be >= 1")


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _eigmin(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_sym(a))[0])


# -- full variant -----------------------------------------------------------

def _full_lambdas(state, mp: MultiParams):
    """Price impacts from the joint Gaussian projections (2x2 and 4x4)."""
    al, b1, b21, b22, b23 = state
    I = np.eye(2)
    beta = b21 + b23 @ b1
    ava = al @ mp.Sigma_v @ al.T
    sva = mp.Sigma_v @ al.T
    M11 = b1 @ (ava + mp.Sigma_eps) @ b1.T + mp.Sigma_1
    M12 = b1 @ ava @ (I + beta).T + b1 @ mp.Sigma_eps @ beta.T \
        + mp.Sigma_1 @ b22.T
    M22 = (I + beta) @ ava @ (I + beta).T + beta @ mp.Sigma_eps @ beta.T \
        + b22 @ mp.Sigma_1 @ b22.T + mp.Sigma_2
    lam1 = sva @ b1.T @ np.linalg.inv(M11)
    M = np.block([[M11, M12], [M12.T, M22]])
    R = np.hstack([sva @ b1.T, sva @ (I + beta).T])
    lam_block = R @ np.linalg.inv(M)
    return lam1, lam_block[:, :2], lam_block[:, 2:]


def _full_update(state, mp: MultiParams):
    """One best-response sweep; returns (new_state, lambdas, pd_checks)."""
    al, b1, b21, b22, b23 = state
    I = np.eye(2)
    g = mp.gamma_mat
    lam1, lam21, lam22 = _full_lambdas(state, mp)

    beta = b21 + b23 @ b1
    lam2 = lam21 @ b1 + lam22 @ (I + beta)
    lam2s = _sym(lam2)
    al_new = 0.5 * np.linalg.inv(lam2s)

    sig = al_new @ mp.Sigma_v @ al_new.T + mp.Sigma_eps
    mu = mp.Sigma_v @ al_new.T @ np.linalg.inv(sig)
    eta = (I - lam22 @ al_new) @ mu
    S = _sym(lam22 + g)
    Sinv = np.linalg.inv(S)
    b21_new = 0.5 * Sinv @ eta
    b22_new = -0.5 * Sinv @ lam21
    b23_new = -0.5 * Sinv @ (lam21 + 2.0 * g)

    B = 0.5 * Sinv - 0.25 * Sinv @ (lam22 + g) @ Sinv
    C = lam21 + 2.0 * g
    T = _sym(lam1 + g - C.T @ B @ C)
    b1_new = 0.5 * np.linalg.inv(T) @ (mu - 2.0 * C.T @ B @ eta)

    new = (al_new, b1_new, b21_new, b22_new, b23_new)
    eigs = (_eigmin(lam2s), _eigmin(S), _eigmin(T))
    return new, (lam1, lam21, lam22), eigs


# -- spillover variant ------------------------------------------------------

def _spill_loadings(state, mp: MultiParams):
    """Loading rows over shocks (v-p0 (2), eps, u1 (2), u2 (2))."""
    al, b1, b21, b22, b23 = state
    d = 7
    ihat = np.zeros(d)
    ihat[0] = al            # i1 = alpha (v1 - p01)
    ihat[2] = 1.0
    i = np.zeros((2, d))
    i[0] = ihat.copy()
    i[0, 2] = 0.0
    u1 = np.zeros((2, d))
    u1[0, 3] = u1[1, 4] = 1.0
    u2 = np.zeros((2, d))
    u2[0, 5] = u2[1, 6] = 1.0
    x1 = np.outer(b1, ihat)
    y1 = x1 + u1
    x2 = np.outer(b21, ihat) + b22 @ u1 + b23 @ x1
    y2 = i + x2 + u2

    cov = np.zeros((d, d))
    cov[:2, :2] = mp.Sigma_v
    cov[2, 2] = mp.Sigma_eps[0, 0]
    cov[3:5, 3:5] = mp.Sigma_1
    cov[5:, 5:] = mp.Sigma_2
    return {"i": i, "x1": x1, "x2": x2, "y1": y1, "y2": y2,
            "u1": u1, "u2": u2, "cov": cov}


def _spill_lambdas(state, mp: MultiParams):
    """Per-asset scalar price-impact regressions (diagonal matrices)."""
    q = _spill_loadings(state, mp)
    cov = q["cov"]
    lam1 = np.zeros((2, 2))
    lam21 = np.zeros((2, 2))
    lam22 = np.zeros((2, 2))
    for j in range(2):
        v = np.zeros(7)
        v[j] = 1.0
        y1, y2 = q["y1"][j], q["y2"][j]
        e11 = y1 @ cov @ y1
        e12 = y1 @ cov @ y2
        e22 = y2 @ cov @ y2
        c1 = v @ cov @ y1
        c2 = v @ cov @ y2
        lam1[j, j] = c1 / e11
        sol = np.linalg.solve(np.array([[e11, e12], [e12, e22]]),
                              np.array([c1, c2]))
        lam21[j, j], lam22[j, j] = sol
    return lam1, lam21, lam22


def _spill_update(state, mp: MultiParams):
    """One best-response sweep of the spillover variant."""
    al, b1, b21, b22, b23 = state
    g = mp.gamma_mat
    sv1sq = mp.Sigma_v[0, 0]
    lam1, lam21, lam22 = _spill_lambdas(state, mp)

    # slow trader: scalar quadratic FOC on asset 1
    beta = b21 + b23 @ b1
    lam2eff = lam21[0, 0] * b1[0] + lam22[0, 0] * (1.0 + beta[0])
    al_new = 1.0 / (2.0 * lam2eff)

    # fast trader, period 2: value inference from the scalar signal
    sig = al_new * al_new * sv1sq + mp.Sigma_eps[0, 0]
    m = np.array([al_new * sv1sq, al_new * mp.Sigma_v[0, 1]]) / sig
    kappa = al_new * al_new * sv1sq / sig
    eta = m - kappa * lam22[:, 0]
    S = _sym(lam22 + g)
    # pseudo-inverse: with zero impact and zero penalty on an asset the
    # time-2 objective is flat along it and the zero response is kept
    Sinv = np.linalg.pinv(S, rcond=1e-12, hermitian=True)
    b21_new = 0.5 * Sinv @ eta
    b22_new = -0.5 * Sinv @ lam21
    b23_new = -0.5 * Sinv @ (lam21 + 2.0 * g)

    # fast trader, period 1.  An asset whose flows carry no information
    # has exactly zero impacts and an exactly flat time-1 objective (the
    # matrix and the right-hand side are both singular along it); the
    # minimum-norm solution picks the zero response on that direction.
    B = 0.5 * Sinv - 0.25 * Sinv @ (lam22 + g) @ Sinv
    C = lam21 + 2.0 * g
    T = _sym(lam1 + g - C.T @ B @ C)
    rhs = m - 2.0 * C.T @ B @ eta
    b1_new = 0.5 * np.linalg.lstsq(T, rhs, rcond=None)[0]

    new = (al_new, b1_new, b21_new, b22_new, b23_new)
    eigs = (lam2eff, _eigmin(S), _eigmin(T))
    return new, (lam1, lam21, lam22), eigs


# -- shared iteration -------------------------------------------------------

def _state_norm(a, b) -> float:
    return max(np.max(np.abs(np.asarray(x) - np.asarray(y)))
               for x, y in zip(a, b))


_PD_SLACK = 1e-10  # flat (semidefinite) directions at degenerate corners


def _flatten(state) -> np.ndarray:
    return np.concatenate([np.atleast_1d(np.asarray(s, dtype=float)).ravel()
                           for s in state])


def _unflatten(x, template):
    out, k = [], 0
    for s in template:
        a = np.asarray(s, dtype=float)
        n = a.size
        if a.ndim == 0:
            out.append(float(x[k]))
        else:
            out.append(x[k:k + n].reshape(a.shape).copy())
        k += n
    return tuple(out)


def _newton_polish(update, state, mp, variant, iters=40):
    """Finish a stalled iteration by Newton on G(x) - x.

    The best-response map can be locally repelling at a valid fixed
    point (its Jacobian eigenvalues need not lie in the unit disk), in
    which case no damped iteration converges; Newton on the displacement
    does.  Returns None when Newton itself fails.
    """
    template = state

    def F(x):
        st = _unflatten(x, template)
        new, lams, eigs = update(st, mp)
        return _flatten(new) - x, (lams, eigs)

    x = _flatten(state)
    try:
        fx, info = F(x)
    except np.linalg.LinAlgError:
        return None
    for _ in range(iters):
        err = np.max(np.abs(fx))
        if err < 1e-13:
            break
        n = x.size
        jac = np.empty((n, n))
        try:
            for i in range(n):
                h = 1e-7 * max(1.0, abs(x[i]))
                xp = x.copy()
                xp[i] += h
                jac[:, i] = (F(xp)[0] - fx) / h
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-6:
            try:
                fx_try, info_try = F(x + t * dx)
            except np.linalg.LinAlgError:
                t *= 0.5
                continue
            if np.max(np.abs(fx_try)) < err:
                break
            t *= 0.5
        else:
            return None
        x = x + t * dx
        fx, info = fx_try, info_try
    if np.max(np.abs(fx)) > 1e-11:
        return None
    return _unflatten(x, template)


def _gamma_leg(mp: MultiParams, t: float) -> MultiParams:
    from dataclasses import replace
    return replace(mp, gamma_mat=t * mp.gamma_mat)


def _rho_leg(mp: MultiParams, t: float) -> MultiParams:
    from dataclasses import replace
    diag = np.diag(np.diag(mp.Sigma_v))
    return replace(mp, Sigma_v=diag + t * (mp.Sigma_v - diag))


def _ramp(update, make_start, mp, config, variant, leg_at):
    t, dt = 0.0, 0.25
    anchor = leg_at(mp, 0.0)
    eq = _iterate(update, make_start(anchor), anchor, config, variant)
    while t < 1.0:
        t_try = min(1.0, t + dt)
        leg = leg_at(mp, t_try)
        start = (eq.alpha, eq.beta1, eq.beta21, eq.beta22, eq.beta23)
        try:
            eq = _iterate(update, start, leg, config, variant)
        except (NoConvergence, PDViolation):
            dt *= 0.5
            if dt < 2.0 ** -8:
                raise
            continue
        t = t_try
    return eq


def _continuation(update, make_start, mp, config, variant):
    """Solve directly, then by penalty ramp, then by correlation ramp.

    Large penalties push the decoupled start through a nearly singular
    period-1 condition, and strong value correlation can put it in the
    basin of a concavity-violating fixed point; carrying the solution
    along a ramp from the decoupled end keeps every leg near the valid
    branch.
    """
    try:
        return _iterate(update, make_start(mp), mp, config, variant)
    except (NoConvergence, PDViolation) as direct_exc:
        last = direct_exc
    if np.any(mp.gamma_mat):
        try:
            return _ramp(update, make_start, mp, config, variant, _gamma_leg)
        except (NoConvergence, PDViolation) as exc:
            last = exc
    if mp.Sigma_v[0, 1] != 0.0:
        return _ramp(update, make_start, mp, config, variant, _rho_leg)
    raise last


def _iterate(update, state, mp, config, variant):
    d = config.damping
    prev_step = np.inf
    step = np.inf
    best = np.inf
    best_state = state
    stall = 0
    converged = False
    for _ in range(config.max_iters):
        try:
            new, lambdas, eigs = update(state, mp)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(
                f"singular best-response update ({variant}): {exc}") from exc
        step = _state_norm(new, state)
        if step < config.tol:
            state = new
            converged = True
            break
        if step < 0.999 * best:
            best = step
            best_state = state
            stall = 0
        else:
            stall += 1
            if stall > config.stall_iters:
                break
        if step > prev_step and d > config.min_damping:
            d *= 0.5
        prev_step = step
        state = tuple(
            (1.0 - d) * np.asarray(s) + d * np.asarray(n)
            for s, n in zip(state, new))
        if variant == "spillover":
            state = (float(state[0]),) + state[1:]
    if not converged:
        # the damped map cannot converge if it is repelling at the fixed
        # point; Newton on the displacement usually still lands it
        polished = _newton_polish(update, best_state, mp, variant)
        if polished is None:
            raise NoConvergence(
                f"no fixed point within {config.max_iters} iterations "
                f"({variant}); best step {best:.3e}")
        state = polished

    new, lambdas, eigs = update(state, mp)
    if any(e < -_PD_SLACK for e in eigs):
        raise PDViolation(
            f"second-order condition matrices not positive-definite at "
            f"the fixed point ({variant}); minimum eigenvalues {eigs}")
    residual = _state_norm(new, state)
    al, b1, b21, b22, b23 = state
    return MultiEquilibrium(
        variant=variant, lambda1=lambdas[0], lambda21=lambdas[1],
        lambda22=lambdas[2], alpha=al, beta1=b1, beta21=b21, beta22=b22,
        beta23=b23, pd_ok=tuple(bool(e > -_PD_SLACK) for e in eigs),
        soc_eigs=tuple(float(e) for e in eigs),
        fixed_point_residual=residual,
    )


def _single_asset_start(mp: MultiParams, j: int):
    """Decoupled one-asset solve for asset j, in dimensional units."""
    from .solver import solve
    svj = float(np.sqrt(mp.Sigma_v[j, j]))
    s2j = float(np.sqrt(mp.Sigma_2[j, j]))
    params = ModelParams(
        theta1=mp.Sigma_1[j, j] / mp.Sigma_2[j, j],
        theta_eps=mp.Sigma_eps[j, j] / mp.Sigma_2[j, j],
        Gamma=mp.gamma_mat[j, j] * s2j / svj,
        sigma_v=svj, sigma_2=s2j,
    )
    report = solve(params)
    if not report.roots:
        raise NoConvergence(
            f"decoupled start failed for asset {j + 1}: {report.status}")
    return report.roots[0], params


def _full_start(mp: MultiParams):
    al = np.zeros((2, 2))
    b1 = np.zeros((2, 2))
    b21 = np.zeros((2, 2))
    b22 = np.zeros((2, 2))
    b23 = np.zeros((2, 2))
    for j in range(2):
        eq, sp = _single_asset_start(mp, j)
        al[j, j] = eq.A * sp.sigma_2 / sp.sigma_v
        b1[j, j] = eq.beta1
        b21[j, j] = eq.beta21
        b22[j, j] = eq.beta22
        b23[j, j] = eq.beta23
    return al, b1, b21, b22, b23


def _as_state(start):
    if isinstance(start, MultiEquilibrium):
        return (start.alpha, start.beta1, start.beta21, start.beta22,
                start.beta23)
    return tuple(start)


def solve_multi_full(params: MultiParams,
                     config: FixedPointConfig | None = None,
                     start=None) -> MultiEquilibrium:
    """Fixed point of the full two-asset model (both assets traded by IT).

    ``start`` optionally warm-starts the iteration from a nearby solved
    state (alpha, beta1, beta21, beta22, beta23) or a MultiEquilibrium,
    e.g. the previous grid point of a penalty sweep; on failure the
    standard decoupled initialization and penalty ramp take over.
    """
    config = config or FixedPointConfig()
    if start is not None:
        try:
            return _iterate(_full_update, _as_state(start), params, config,
                            "full")
        except (NoConvergence, PDViolation):
            pass
    return _continuation(_full_update, _full_start, params, config, "full")


def solve_multi_spillover(params: MultiParams,
                          config: FixedPointConfig | None = None,
                          start=None) -> MultiEquilibrium:
    """Fixed point when the slow trader trades asset 1 only.

    Dealers of each asset condition on that asset's own flows, so the
    impact matrices stay diagonal; the fast trader still trades both
    assets, spilling the signal onto asset 2 through the value
    correlation and the cross-inventory penalty.  ``start`` warm-starts
    the iteration as in :func:`solve_multi_full`.
    """
    config = config or FixedPointConfig()
    if start is not None:
        try:
            return _iterate(_spill_update, _as_state(start), params, config,
                            "spillover")
        except (NoConvergence, PDViolation):
            pass
    return _continuation(_spill_update, _spill_start, params, config,
                         "spillover")


def _spill_start(mp: MultiParams):
    eq, sp = _single_asset_start(mp, 0)
    al = eq.A * sp.sigma_2 / sp.sigma_v
    # seed asset 2 in proportion to the value correlation so its order
    # flow is informative from the first pass (otherwise its impacts
    # start at zero and, without penalty, the objective starts flat)
    rho = mp.rho
    b1 = np.array([eq.beta1, 0.3 * rho * eq.beta1])
    b21 = np.array([eq.beta21, 0.3 * rho * eq.beta21])
    b22 = np.diag([eq.beta22, 0.0])
    b23 = np.diag([eq.beta23, 0.0])
    return al, b1, b21, b22, b23


def classify_multi_roles(eq: MultiEquilibrium, rho: float,
                         tol=1e-10) -> tuple[Role, Role]:
    """Per-asset direction taxonomy from the printed direction expressions."""
    if eq.variant != "spillover":
        raise ValueError("role classification applies to the spillover "
                         "variant")
    sgn_rho = 1.0 if rho >= 0.0 else -1.0
    b1, b21, b23 = eq.beta1, eq.beta21, eq.beta23
    t2 = b21 + b23 @ b1
    dirs = {
        1: (b1[0], t2[0]),
        2: (sgn_rho * b1[1], sgn_rho * t2[1]),
    }

    def _sgn(x):
        if abs(x) <= tol:
            return 0
        return 1 if x > 0.0 else -1

    roles = []
    for j in (1, 2):
        d1, d2 = (_sgn(v) for v in dirs[j])
        if d1 > 0 and d2 > 0:
            variant = SMALL_IT
        elif d1 > 0 and d2 < 0:
            variant = ROUND_TRIPPER
        else:
            variant = INACTIVE
        roles.append(Role(variant=variant, dir1=d1, dir2=d2))
    return roles[0], roles[1]


# -- verification helpers ---------------------------------------------------

def _full_loadings(eq: MultiEquilibrium, mp: MultiParams):
    """Loading rows over shocks (v-p0 (2), eps (2), u1 (2), u2 (2))."""
    d = 8
    I2 = np.eye(2)
    zero = np.zeros((2, 2))
    vmp = np.hstack([I2, zero, zero, zero])
    epsl = np.hstack([zero, I2, zero, zero])
    u1 = np.hstack([zero, zero, I2, zero])
    u2 = np.hstack([zero, zero, zero, I2])
    i = eq.alpha @ vmp
    ihat = i + epsl
    x1 = eq.beta1 @ ihat
    y1 = x1 + u1
    x2 = eq.beta21 @ ihat + eq.beta22 @ u1 + eq.beta23 @ x1
    y2 = i + x2 + u2
    cov = np.zeros((d, d))
    cov[:2, :2] = mp.Sigma_v
    cov[2:4, 2:4] = mp.Sigma_eps
    cov[4:6, 4:6] = mp.Sigma_1
    cov[6:, 6:] = mp.Sigma_2
    p1 = eq.lambda1 @ y1
    p2 = eq.lambda21 @ y1 + eq.lambda22 @ y2
    return {"i": i, "x1": x1, "x2": x2, "y1": y1, "y2": y2,
            "p1": p1, "p2": p2, "vmp": vmp, "cov": cov}


def _spill_eq_loadings(eq: MultiEquilibrium, mp: MultiParams):
    q = _spill_loadings((eq.alpha, eq.beta1, eq.beta21, eq.beta22,
                         eq.beta23), mp)
    vmp = np.zeros((2, 7))
    vmp[0, 0] = vmp[1, 1] = 1.0
    q["vmp"] = vmp
    q["p1"] = eq.lambda1 @ q["y1"]
    q["p2"] = eq.lambda21 @ q["y1"] + eq.lambda22 @ q["y2"]
    return q


def multi_moment_objectives(eq: MultiEquilibrium, mp: MultiParams) -> dict:
    """Exact expected objectives at the fixed point, by covariance algebra."""
    q = _full_loadings(eq, mp) if eq.variant == "full" \
        else _spill_eq_loadings(eq, mp)
    cov = q["cov"]

    def pair(a, b):
        return float(np.trace(a @ cov @ b.T))

    inv = q["x1"] + q["x2"]
    # E[(x1+x2)' g (x1+x2)] with inv the loading matrix of x1+x2
    pen = float(np.einsum("id,de,je,ij->", inv, cov, inv, mp.gamma_mat))
    return {
        "pi_IT": pair(q["i"], q["vmp"] - q["p2"]),
        "pi_HFT": (pair(q["x1"], q["vmp"] - q["p1"])
                   + pair(q["x2"], q["vmp"] - q["p2"])),
        "penalty": -pen,
    }


def simulate_multi(eq: MultiEquilibrium, mp: MultiParams, n_paths=200_000,
                   seed=0, n_batches=50) -> dict:
    """Monte Carlo check of the expected objectives; (mean, SE) per key."""
    q = _full_loadings(eq, mp) if eq.variant == "full" \
        else _spill_eq_loadings(eq, mp)
    cov = q["cov"]
    chol = np.linalg.cholesky(cov + 1e-30 * np.eye(cov.shape[0]))
    m = -(-n_paths // n_batches)
    keys = ("pi_IT", "pi_HFT", "penalty")
    means = np.empty((n_batches, len(keys)))
    inv_load = q["x1"] + q["x2"]
    for b in range(n_batches):
        rng = np.random.Generator(np.random.Philox(key=[seed, b]))
        z = rng.standard_normal((m, cov.shape[0])) @ chol.T
        i = z @ q["i"].T
        x1 = z @ q["x1"].T
        x2 = z @ q["x2"].T
        vmp = z @ q["vmp"].T
        p1 = z @ q["p1"].T
        p2 = z @ q["p2"].T
        invp = z @ inv_load.T
        pi_it = np.sum(i * (vmp - p2), axis=1)
        pi_hft = np.sum(x1 * (vmp - p1) + x2 * (vmp - p2), axis=1)
        pen = -np.einsum("pi,ij,pj->p", invp, mp.gamma_mat, invp)
        means[b] = [pi_it.mean(), pi_hft.mean(), pen.mean()]
    mean = means.mean(axis=0)
    se = means.std(axis=0, ddof=1) / np.sqrt(n_batches)
    return {k: (float(mean[j]), float(se[j])) for j, k in enumerate(keys)}
