"""Plain two-phase tableau simplex, kept deliberately naive.

Independent oracle for the production solver: dense tableau, Bland's rule
throughout (guaranteed finite), no factorization, no pricing tricks.  Only
suitable for the small models the tests build.
"""

import numpy as np

_TOL = 1e-9


def _pivot(tab, row, col):
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and abs(tab[i, col]) > 0:
            tab[i] -= tab[i, col] * tab[row]


def _iterate(tab, basis, cost, max_iter):
    """Bland's rule pivoting until no reduced cost is negative."""
    m = tab.shape[0]
    ncols = tab.shape[1] - 1
    for _ in range(max_iter):
        reduced = cost[:ncols] - cost[basis] @ tab[:, :ncols]
        enter = next((j for j in range(ncols) if reduced[j] < -_TOL), None)
        if enter is None:
            return
        col = tab[:, enter]
        candidates = [
            (tab[i, -1] / col[i], basis[i], i) for i in range(m) if col[i] > _TOL
        ]
        if not candidates:
            raise ValueError("unbounded")
        _, _, row = min(candidates)
        _pivot(tab, row, enter)
        basis[row] = enter
    raise ValueError("iteration cap exceeded")


def reference_solve(c, a, b, max_iter=50_000):
    """min c.x s.t. a x = b, x >= 0.

    Returns (status, x, objective) with status in
    {"optimal", "infeasible", "unbounded"}.
    """
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    tab = np.zeros((m, n + m + 1))
    tab[:, :n] = a
    tab[:, n:n + m] = np.eye(m)
    tab[:, -1] = b
    basis = list(range(n, n + m))

    cost1 = np.zeros(n + m)
    cost1[n:] = 1.0
    try:
        _iterate(tab, basis, cost1, max_iter)
    except ValueError as exc:
        if "unbounded" in str(exc):
            raise AssertionError("phase 1 cannot be unbounded") from exc
        raise
    if cost1[basis] @ tab[:, -1] > 1e-7:
        return "infeasible", None, None

    # pivot artificials out of the basis; an all-zero row is redundant
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        enter = next((j for j in range(n) if abs(tab[i, j]) > _TOL), None)
        if enter is None:
            continue
        _pivot(tab, i, enter)
        basis[i] = enter
        keep.append(i)
    tab = np.hstack([tab[keep][:, :n], tab[keep][:, -1:]])
    basis = [basis[i] for i in keep]

    cost2 = c.astype(float)
    try:
        _iterate(tab, basis, cost2, max_iter)
    except ValueError as exc:
        if "unbounded" in str(exc):
            return "unbounded", None, None
        raise
    x = np.zeros(n)
    for i, var in enumerate(basis):
        x[var] = tab[i, -1]
    return "optimal", x, float(c @ x)
