"""Shared root-finding numerics: bracketed bisection and damped Newton.

Scalar roots throughout the package are found by plain bisection on a
verified sign-changing bracket (certifiable, no derivative surprises);
small systems use Newton with a central finite-difference Jacobian and
backtracking on the residual max-norm.
"""

from __future__ import annotations

import numpy as np

from .errors import BracketFailure


def bisect_root(f, lo, hi, xtol=1e-15, max_iter=200):
    """Bisection for f(x) = 0 on a bracket with f(lo) < 0 < f(hi) allowed
    in either orientation.  Returns the midpoint of the final bracket.

    Raises BracketFailure if the endpoint signs do not differ.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketFailure(
            f"no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fhi > 0.0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def expand_bracket(f, lo, hi, grow=2.0, max_expand=200):
    """Double hi until f changes sign relative to f(lo).  Returns (lo, hi)."""
    flo = f(lo)
    for _ in range(max_expand):
        if (f(hi) > 0.0) != (flo > 0.0):
            return lo, hi
        hi *= grow
    raise BracketFailure(f"could not bracket a root beyond {hi}")


def newton_system(fun, x0, tol=1e-12, max_iter=200, damping=1.0,
                  fd_step=1e-7, min_step=2.0 ** -30, polish_iters=2,
                  stall_tol=1e-6):
    """Damped Newton for a small square system.

    fun maps an ndarray x to an ndarray of residuals (may raise or return
    non-finite values away from the domain; such trial points are treated
    as line-search failures).  The Jacobian is central finite differences
    with per-coordinate step fd_step * max(1, |x_i|).  Steps are halved
    until the residual max-norm decreases.  After reaching tol, a couple
    of extra polish iterations push the root to the round-off floor.

    Near ill-conditioned roots the double-precision residual can bottom
    out above tol; a point where the line search stalls is still returned
    (with its residual norm) as long as it reached stall_tol, so callers
    can re-certify it in higher precision.

    Returns (x, fnorm) on success or stall, None on failure.
    """

    from .errors import HftKyleError

    def safe_eval(x):
        try:
            r = np.asarray(fun(x), dtype=float)
        except (ArithmeticError, ValueError, HftKyleError):
            return None
        if not np.all(np.isfinite(r)):
            return None
        return r

    x = np.asarray(x0, dtype=float).copy()
    f = safe_eval(x)
    if f is None:
        return None
    fnorm = float(np.max(np.abs(f)))
    n = x.size
    polish_left = polish_iters

    for _ in range(max_iter + polish_iters):
        if fnorm <= tol:
            if polish_left <= 0 or fnorm == 0.0:
                break
            polish_left -= 1
        J = np.empty((n, n))
        ok = True
        for j in range(n):
            h = fd_step * max(1.0, abs(x[j]))
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            fp, fm = safe_eval(xp), safe_eval(xm)
            if fp is None or fm is None:
                ok = False
                break
            J[:, j] = (fp - fm) / (2.0 * h)
        if not ok:
            return None if fnorm > stall_tol else (x, fnorm)
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            return None if fnorm > stall_tol else (x, fnorm)
        t = damping
        accepted = False
        while t >= min_step:
            x_new = x + t * dx
            f_new = safe_eval(x_new)
            if f_new is not None:
                fn_new = float(np.max(np.abs(f_new)))
                if fn_new < fnorm:
                    x, f, fnorm = x_new, f_new, fn_new
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break
    return (x, fnorm) if fnorm <= stall_tol else None
