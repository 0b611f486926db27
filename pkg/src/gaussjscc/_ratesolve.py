"""Small constrained solver for two-rate designs.

Objectives here are smooth and decreasing in both rates, with a handful of
smooth constraints, so a coarse grid to seed SLSQP plus best-of selection is
both fast and reliable.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

FEAS_TOL = 1e-10
_H = 1e-6


def _central_jac(fun):
    def jac(r):
        r = np.asarray(r, dtype=float)
        cols = []
        for i in range(r.size):
            e = np.zeros_like(r)
            e[i] = _H
            cols.append((np.asarray(fun(r + e)) - np.asarray(fun(r - e))) / (2 * _H))
        return np.stack(cols, axis=-1)
    return jac


def _batched(batch, rmax):
    """Value, constraints and central-difference Jacobians from one batch call."""
    memo = {}
    steps = np.array([[0, 0], [_H, 0], [-_H, 0], [0, _H], [0, -_H]])

    def ev(r):
        r = np.asarray(r, dtype=float)
        key = r.tobytes()
        if key not in memo:
            f, c = batch(np.clip(r + steps, 0.0, rmax))
            c = np.asarray(c, dtype=float)
            jf = np.array([f[1] - f[2], f[3] - f[4]]) / (2 * _H)
            jc = np.stack([c[1] - c[2], c[3] - c[4]], axis=-1) / (2 * _H)
            memo.clear()
            memo[key] = (float(f[0]), c[0], jf, jc)
        return memo[key]
    return ev


def solve_two_rates(objective, constraints, rmax, grid=25, n_starts=3, extra_starts=(),
                    batch=None):
    """Minimize ``objective(r)`` over ``0 <= r <= rmax`` with ``constraints(r) >= 0``.

    ``constraints`` returns a 1-D array. Returns ``(r_best, f_best)``; the
    zero-rate point is always feasible for the callers here and seeds the
    incumbent. ``batch``, if given, maps a ``(K, 2)`` array of rate pairs
    to ``(objective (K,), constraints (K, m))`` and is used for the seeding
    grid.
    """
    rmax = np.asarray(rmax, dtype=float)

    def feasible(r):
        return bool(np.min(constraints(r)) >= -FEAS_TOL)

    best_r = np.zeros(2)
    best_f = objective(best_r)

    g1 = np.linspace(0.0, rmax[0], grid)
    g2 = np.linspace(0.0, rmax[1], grid)
    seeds = []
    if batch is not None:
        pts = np.array([(x, y) for x in g1 for y in g2])
        fv, cv = batch(pts)
        ok = np.min(cv, axis=1) >= -FEAS_TOL
        seeds = [(float(f), x, y) for f, (x, y) in zip(fv[ok], pts[ok])]
    else:
        for x in g1:
            for y in g2:
                r = np.array([x, y])
                if feasible(r):
                    seeds.append((objective(r), x, y))
    seeds.sort()
    starts = [np.array(s) for s in extra_starts]
    starts += [np.array([x, y]) for _, x, y in seeds[:n_starts]]

    if batch is not None:
        ev = _batched(batch, rmax)
        obj_fun, obj_jac = (lambda r: ev(r)[0]), (lambda r: ev(r)[2])
        cons = [{"type": "ineq", "fun": lambda r: ev(r)[1], "jac": lambda r: ev(r)[3]}]
    else:
        cons_fun = lambda r: np.asarray(constraints(np.clip(r, 0.0, rmax)), dtype=float)  # noqa: E731
        obj_fun = lambda r: objective(np.clip(r, 0.0, rmax))  # noqa: E731
        obj_jac = _central_jac(obj_fun)
        cons = [{"type": "ineq", "fun": cons_fun, "jac": _central_jac(cons_fun)}]
    bounds = [(0.0, rmax[0]), (0.0, rmax[1])]
    for x0 in starts:
        if feasible(x0):
            f0 = objective(x0)
            if f0 < best_f:
                best_r, best_f = x0.copy(), f0
        res = minimize(obj_fun, x0, jac=obj_jac, method="SLSQP",
                       bounds=bounds, constraints=cons,
                       options={"ftol": 1e-15, "maxiter": 500})
        r = np.clip(res.x, 0.0, rmax)
        if feasible(r):
            f = objective(r)
            if f < best_f:
                best_r, best_f = r, f
    return best_r, float(best_f)
