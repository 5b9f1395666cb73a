"""Thin wrappers around scipy's HiGHS linear programming for the certificates.

Everything here is deterministic: HiGHS is seedless and the problems are
built from fixed data, so repeated calls give identical answers.
"""

import numpy as np
from scipy.optimize import linprog

LP_TOL = 1e-9


class LPStatus:
    OPTIMAL = 0
    INFEASIBLE = 2
    UNBOUNDED = 3


def chebyshev_lp(normals, offsets):
    """Deepest-ball LP for the halfplane system <a_m, x> <= c_m.

    Maximizes r subject to <a_m, x> + r <= c_m with unit normals, so r is
    the signed inradius: r > 0 means a ball of that radius fits, r < 0
    means the system is infeasible by at least |r| in support distance.

    Returns (status, center, radius); center is None unless status is
    OPTIMAL.
    """
    A = np.asarray(normals, float)
    c = np.asarray(offsets, float)
    m, n = A.shape
    A_ub = np.hstack([A, np.ones((m, 1))])
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=A_ub, b_ub=c, bounds=[(None, None)] * (n + 1),
                  method="highs")
    if res.status == LPStatus.OPTIMAL:
        return LPStatus.OPTIMAL, res.x[:n].copy(), float(res.x[n])
    return res.status, None, None


def farkas_certificate(normals, offsets, tol=LP_TOL):
    """Infeasibility multipliers for <a_m, x> <= c_m, or None.

    Searches for y >= 0 with sum(y) = 1, A^T y = 0 and <c, y> < -tol.
    Such a y proves the halfplane system empty: any feasible x would give
    0 = <A^T y, x> <= <c, y> < 0.
    """
    A = np.asarray(normals, float)
    c = np.asarray(offsets, float)
    m, n = A.shape
    A_eq = np.vstack([A.T, np.ones((1, m))])
    b_eq = np.zeros(n + 1)
    b_eq[-1] = 1.0
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m,
                  method="highs")
    if res.status != LPStatus.OPTIMAL:
        return None
    y = res.x
    if c @ y >= -tol:
        return None
    if np.linalg.norm(A.T @ y) > 1e-8:
        return None
    return y.copy()


def linear_extent(normals, offsets, direction):
    """(status, value) of max <direction, x> over the halfplane system."""
    d = np.asarray(direction, float)
    res = linprog(-d, A_ub=np.asarray(normals, float),
                  b_ub=np.asarray(offsets, float),
                  bounds=[(None, None)] * d.size, method="highs")
    if res.status == LPStatus.OPTIMAL:
        return LPStatus.OPTIMAL, float(d @ res.x)
    return res.status, None


def support_lp(normals, offsets, direction):
    """(status, value, point) of max <direction, x> over Ax <= b."""
    d = np.asarray(direction, float)
    res = linprog(-d, A_ub=np.asarray(normals, float),
                  b_ub=np.asarray(offsets, float),
                  bounds=[(None, None)] * d.size, method="highs")
    if res.status == LPStatus.OPTIMAL:
        return LPStatus.OPTIMAL, float(d @ res.x), res.x.copy()
    return res.status, None, None


def in_generated_hull(point, points, rays=None, tol=LP_TOL):
    """Feasibility of point = sum l_i p_i + sum m_j u_j, l >= 0, sum l = 1, m >= 0.

    Decides membership in conv(points) + cone(rays) exactly up to the LP
    tolerance.
    """
    P = np.atleast_2d(np.asarray(points, float))
    n = P.shape[1]
    cols = [P.T]
    if rays is not None and len(rays):
        cols.append(np.atleast_2d(np.asarray(rays, float)).T)
    A_top = np.hstack(cols)
    sel = np.zeros(A_top.shape[1])
    sel[:P.shape[0]] = 1.0
    A_eq = np.vstack([A_top, sel])
    b_eq = np.concatenate([np.asarray(point, float), [1.0]])
    res = linprog(np.zeros(A_top.shape[1]), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * A_top.shape[1], method="highs")
    return res.status == LPStatus.OPTIMAL


def in_cone(direction, generators, tol=LP_TOL):
    """Feasibility of direction = sum m_j u_j with m >= 0."""
    U = np.atleast_2d(np.asarray(generators, float))
    res = linprog(np.zeros(U.shape[0]), A_eq=U.T,
                  b_eq=np.asarray(direction, float),
                  bounds=[(0, None)] * U.shape[0], method="highs")
    return res.status == LPStatus.OPTIMAL
