"""Small deterministic optimizers: 1-D grid + golden section, simplex search."""

import itertools
import math

import numpy as np

GOLDEN = (math.sqrt(5) - 1) / 2


def golden_section(f, a, b, tol=1e-10, maximize=True):
    sign = 1.0 if maximize else -1.0
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = sign * f(d)
    x = (a + b) / 2
    return x, f(x)


def optimize_unit_interval(f, grid=512, maximize=True, lo=0.0, hi=1.0, tol=1e-10, values=None):
    """Optimize ``f`` on [lo, hi]: uniform grid, then golden section around the best node.

    ``values`` may hold precomputed ``f`` on the grid. Returns ``(fbest, xbest)``.
    """
    xs = np.linspace(lo, hi, grid)
    fs = np.array([f(x) for x in xs]) if values is None else np.asarray(values)
    i = int(np.argmax(fs) if maximize else np.argmin(fs))
    best_x, best_f = float(xs[i]), float(fs[i])
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]
    if b > a:
        x, fx = golden_section(f, a, b, tol=tol, maximize=maximize)
        if (fx > best_f) if maximize else (fx < best_f):
            best_x, best_f = float(x), float(fx)
    return best_f, best_x


def simplex_grid(n, resolution):
    """All points of the probability simplex with coordinates on a 1/N lattice."""
    N = max(1, round(1 / resolution))
    for cut in itertools.combinations(range(N + n - 1), n - 1):
        parts = np.diff((-1,) + cut + (N + n - 1,)) - 1
        yield parts / N


def _grid_resolution(n, resolution, max_points=200_000):
    r = resolution
    while math.comb(round(1 / r) + n - 1, n - 1) > max_points:
        r *= 2
    return r


def pattern_polish(f, p, feasible=None, step=0.02, tol=1e-6, maximize=True):
    """Pairwise mass-transfer search on the simplex until the step drops below ``tol``."""
    sign = 1.0 if maximize else -1.0
    p = np.array(p, dtype=float)
    best = sign * f(p)
    n = p.size
    while step >= tol:
        improved = False
        for i, j in itertools.permutations(range(n), 2):
            t = min(step, p[i])
            if t <= 0:
                continue
            q = p.copy()
            q[i] -= t
            q[j] += t
            if feasible is not None and not feasible(q):
                continue
            val = sign * f(q)
            if val > best + 1e-15:
                p, best, improved = q, val, True
        if not improved:
            step /= 2
    return sign * best, p


def optimize_simplex(f, n, resolution=0.02, maximize=True, feasible=None, tol=1e-6):
    """Grid search over the simplex followed by local pattern polishing.

    Returns ``(fbest, pbest)`` or ``(None, None)`` when no grid point is feasible.
    """
    if n == 1:
        p = np.ones(1)
        if feasible is not None and not feasible(p):
            return None, None
        return f(p), p
    res = _grid_resolution(n, resolution)
    best, best_p = None, None
    for p in simplex_grid(n, res):
        if feasible is not None and not feasible(p):
            continue
        val = f(p)
        if best is None or (val > best if maximize else val < best):
            best, best_p = val, p
    if best_p is None:
        return None, None
    return pattern_polish(f, best_p, feasible=feasible, step=res, tol=tol, maximize=maximize)
