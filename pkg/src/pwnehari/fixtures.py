"""Reference domains used across tests, demos and the CLI."""

import numpy as np

from .bodies import (Ball, FunctionBody, HullRays, MinkowskiSum, SupportPoint,
                     VPolytope)
from .classify import HullRaysRep


def unit_disc(open_=True):
    return Ball(np.zeros(2), 1.0, closed=not open_)


def square(half=1.0, open_=True):
    v = half * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    return VPolytope(v, closed=not open_)


def interval(lo=0.0, hi=1.0, open_=True):
    return VPolytope(np.array([[lo], [hi]]), closed=not open_)


def stadium():
    """Rounded stadium: the segment [-2,0] x {0} thickened by the unit disc.

    Its right cap is the right unit half-disc, so the top corner (0, 1) is
    extreme but not exposed: the only supporting line there is y = 1,
    whose face is the whole top edge.
    """
    seg = VPolytope(np.array([[-2.0, 0.0], [0.0, 0.0]]))
    return MinkowskiSum(seg, Ball(np.zeros(2), 1.0))


def first_quadrant_rep():
    return HullRaysRep(np.array([[0.0, 0.0]]),
                       ((0, np.array([1.0, 0.0])), (0, np.array([0.0, 1.0]))))


def strip_rep(beta=-1.0, alpha=2.0):
    """The full horizontal strip R x [beta, alpha]."""
    pts = np.array([[0.0, beta], [0.0, alpha]])
    return HullRaysRep(pts, ((0, np.array([1.0, 0.0])), (0, np.array([-1.0, 0.0]))))


def parabola_epigraph():
    """{(x, y): y >= x^2}: smooth, unbounded, not a polyhedron.

    Support is finite only for downward directions, where the maximizer
    is the unique tangency point of the parabola.
    """
    def h(a):
        a1, a2 = float(a[0]), float(a[1])
        if a2 >= 0.0:
            if a2 == 0.0 and a1 == 0.0:
                raise ValueError("zero direction")
            return np.inf
        return -a1 * a1 / (4.0 * a2)

    def point(a):
        a1, a2 = float(a[0]), float(a[1])
        if a2 >= 0.0:
            return None
        x = -a1 / (2.0 * a2)
        return SupportPoint(np.array([x, x * x]), True)

    return FunctionBody(2, h, point, name="parabola-epigraph")


def solid_cone_3d(n_rays=12):
    """Solid circular cone in R^3 as a finitely generated fixture.

    Stored with annotations rather than decided: the true cone has one
    extreme point (the apex) and a full circle of extreme half-lines, so
    it is not a polyhedron, yet planar classification does not apply.
    The solid body (x^2 + y^2 <= z^2, z >= 0) is the convex set; the
    boundary surface alone is not convex.
    """
    th = 2.0 * np.pi * np.arange(n_rays) / n_rays
    rays = np.column_stack([np.cos(th), np.sin(th), np.ones(n_rays)])
    body = HullRays(np.zeros((1, 3)), rays)
    annotations = {
        "extreme_points": 1,
        "extreme_halflines": "infinite (one per boundary direction)",
        "polyhedron": False,
        "note": "finitely many rays stored; the fixture approximates the solid cone",
    }
    return body, annotations
