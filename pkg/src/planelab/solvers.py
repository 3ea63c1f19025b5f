"""Small vectorized root-finding kernels used by the join and meet routines."""

import numpy as np

from .errors import SolverError

BISECTION_STEPS = 200
FIXED_POINT_ITERATIONS = 100
DAMPING = 0.5


def expand_bracket(f, lo, hi, target=0.0, increasing=True, max_doublings=200):
    """Grow ``[lo, hi]`` around each batch entry until f - target changes sign."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    sign = 1.0 if increasing else -1.0
    for _ in range(max_doublings):
        g_lo = sign * (f(lo) - target)
        g_hi = sign * (f(hi) - target)
        bad_lo = g_lo > 0
        bad_hi = g_hi < 0
        if not (bad_lo.any() or bad_hi.any()):
            return lo, hi
        width = hi - lo
        lo = np.where(bad_lo, lo - 2.0 * np.maximum(width, 1.0), lo)
        hi = np.where(bad_hi, hi + 2.0 * np.maximum(width, 1.0), hi)
    raise SolverError("could not bracket a root", np.nan)


def bisect(f, lo, hi, target=0.0, increasing=True, steps=BISECTION_STEPS, xtol=0.0):
    """Vectorized bisection for a monotone f on a valid bracket.

    Returns the midpoints after ``steps`` halvings or once every interval is
    narrower than ``xtol`` relative to its magnitude.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    sign = 1.0 if increasing else -1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        g = sign * (f(mid) - target)
        above = g > 0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if xtol and np.all(hi - lo <= xtol * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


def solve_increasing(f, target, lo=0.0, hi=1.0, steps=BISECTION_STEPS):
    """Solve f(x) = target for an increasing f, bracket grown as needed."""
    lo, hi = expand_bracket(f, lo, hi, target, increasing=True)
    return bisect(f, lo, hi, target, increasing=True, steps=steps)


def damped_fixed_point(g, x0, damping=DAMPING, iterations=FIXED_POINT_ITERATIONS, tol=1e-15):
    """Iterate x <- (1 - d) x + d g(x) on a batch, rows along the first axis."""
    x = np.array(x0, dtype=float)
    for _ in range(iterations):
        nxt = (1.0 - damping) * x + damping * g(x)
        step = np.max(np.abs(nxt - x))
        x = nxt
        if step <= tol * max(1.0, float(np.max(np.abs(x)))):
            break
    return x


def newton_1d(f, x0, lo, hi, iterations=100, tol=1e-13, h=1e-7):
    """Newton steps on a bracketed monotone scalar equation, bisection fallback.

    ``lo`` and ``hi`` must bracket a sign change of f; any Newton step that
    leaves the current bracket is replaced by a bisection step.
    """
    x = np.array(x0, dtype=float)
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = f(lo)
    for _ in range(iterations):
        fx = f(x)
        same = np.sign(fx) == np.sign(f_lo)
        lo = np.where(same, x, lo)
        f_lo = np.where(same, fx, f_lo)
        hi = np.where(same, hi, x)
        d = (f(x + h) - f(x - h)) / (2 * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x - fx / d
        inside = np.isfinite(step) & (step > np.minimum(lo, hi)) & (step < np.maximum(lo, hi))
        x_new = np.where(inside, step, 0.5 * (lo + hi))
        if np.all(np.abs(x_new - x) <= tol * np.maximum(1.0, np.abs(x))):
            x = x_new
            break
        x = x_new
    return x


def newton_nd(F, x0, iterations=60, tol=1e-13, h=1e-7, damping=1.0):
    """Damped Newton for F: R^n -> R^n with a finite-difference Jacobian.

    Single system (x0 of shape (n,)). Steps are halved until the residual
    norm decreases. Returns (x, residual norm).
    """
    x = np.array(x0, dtype=float)
    n = x.size
    r = F(x)
    rn = float(np.linalg.norm(r))
    for _ in range(iterations):
        if rn <= tol:
            break
        J = np.empty((r.size, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = h
            J[:, k] = (F(x + e) - F(x - e)) / (2 * h)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        t = damping
        improved = False
        for _ in range(40):
            cand = x + t * step
            rc = F(cand)
            rcn = float(np.linalg.norm(rc))
            if np.isfinite(rcn) and rcn < rn:
                x, r, rn = cand, rc, rcn
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return x, rn


def gauss_newton(G, x0, iterations=200, tol=1e-12, h=1e-6):
    """Least-squares Gauss-Newton for G: R^n -> R^m from one start.

    Returns (x, |G(x)|). Used to locate points of an implicitly defined set.
    """
    return newton_nd(G, x0, iterations=iterations, tol=tol, h=h)


def count_sign_changes(values):
    """Number of strict sign changes (zeros count once) along the last axis."""
    s = np.sign(values)
    nz = s != 0
    changes = np.zeros(values.shape[:-1], dtype=int)
    prev = np.zeros(values.shape[:-1])
    for k in range(values.shape[-1]):
        cur = s[..., k]
        flip = nz[..., k] & (prev != 0) & (cur != prev)
        changes += flip
        changes += (~nz[..., k]).astype(int)
        prev = np.where(nz[..., k], cur, 0.0)
    return changes


def bracket_sign_change(f, center, width=1.0, max_doublings=80):
    """Symmetric intervals around ``center`` grown until f changes sign.

    Returns (lo, hi, found) with ``found`` false where no sign change
    appeared within the doubling budget.
    """
    center = np.array(center, dtype=float)
    half = np.full_like(center, float(width))
    lo, hi = center - half, center + half
    found = np.sign(f(lo)) != np.sign(f(hi))
    for _ in range(max_doublings):
        if found.all():
            break
        half = np.where(found, half, 2.0 * half)
        lo = np.where(found, lo, center - half)
        hi = np.where(found, hi, center + half)
        found = np.sign(f(lo)) != np.sign(f(hi))
    return lo, hi, found


def newton_batch(F, x0, iterations=80, tol=1e-14, h=1e-7):
    """Damped Newton for a batch of small systems F: (n, d) -> (n, d).

    F must act row-wise. Each entry halves its own step until its residual
    drops; entries whose line search fails are frozen. Returns
    (x, residual norms).
    """
    x = np.array(x0, dtype=float)
    n, d = x.shape
    idx = np.arange(n)
    r = F(x, idx)
    rn = np.linalg.norm(r, axis=-1)
    alive = np.isfinite(rn)
    eye = np.eye(d) * h
    for _ in range(iterations):
        act = np.flatnonzero(alive & (rn > tol))
        if act.size == 0:
            break
        xa, ra, rna = x[act], r[act], rn[act]
        J = np.stack([(F(xa + eye[k], act) - F(xa - eye[k], act)) / (2 * h) for k in range(d)], axis=-1)
        try:
            step = np.linalg.solve(J, -ra[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.stack([np.linalg.lstsq(Jk, -rk, rcond=None)[0] for Jk, rk in zip(J, ra)])
        step = np.where(np.isfinite(step), step, 0.0)
        t = np.ones(act.size)
        pending = np.ones(act.size, dtype=bool)
        for _ in range(40):
            sub = np.flatnonzero(pending)
            if sub.size == 0:
                break
            cand = xa[sub] + t[sub, None] * step[sub]
            rc = F(cand, act[sub])
            rcn = np.linalg.norm(rc, axis=-1)
            good = np.isfinite(rcn) & (rcn < rna[sub])
            g = sub[good]
            xa[g], ra[g], rna[g] = cand[good], rc[good], rcn[good]
            pending[g] = False
            t[sub[~good]] *= 0.5
        x[act], r[act], rn[act] = xa, ra, rna
        alive[act[pending]] = False
    return x, rn


def gauss_newton_batch(G, x0, iterations=100, tol=1e-13, h=1e-7):
    """Minimum-norm Gauss-Newton steps for row-wise G: (n, d) -> (n, m).

    Works for rank-deficient Jacobians (solution manifolds). Returns
    (x, residual norms).
    """
    x = np.array(x0, dtype=float)
    n, d = x.shape
    r = G(x)
    rn = np.linalg.norm(r, axis=-1)
    eye = np.eye(d) * h
    for _ in range(iterations):
        act = rn > tol
        if not act.any():
            break
        J = np.stack([(G(x + eye[k]) - G(x - eye[k])) / (2 * h) for k in range(d)], axis=-1)
        step = -(np.linalg.pinv(J, rcond=1e-10) @ r[..., None])[..., 0]
        t = np.ones(n)
        pending = act.copy()
        for _ in range(30):
            if not pending.any():
                break
            cand = x + t[:, None] * step
            rc = G(cand)
            rcn = np.linalg.norm(rc, axis=-1)
            good = pending & np.isfinite(rcn) & (rcn < rn)
            x = np.where(good[:, None], cand, x)
            r = np.where(good[:, None], rc, r)
            rn = np.where(good, rcn, rn)
            pending &= ~good
            t = np.where(pending, 0.5 * t, t)
        if pending[act].all():
            break
    return x, rn


def numerical_rank(J, rel=1e-6):
    """Rank of each matrix in a stack, singular values above rel * max(1, s_max)."""
    sv = np.linalg.svd(J, compute_uv=False)
    cut = rel * np.maximum(1.0, sv[..., :1])
    return np.sum(sv > cut, axis=-1)
