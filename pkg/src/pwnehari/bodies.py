"""Convex bodies with support-function calculus.

A body is an immutable constructor tree over balls, H-polyhedra,
V-polytopes, point-plus-ray hulls, Minkowski sums, negations and positive
scalings.  Every node knows its support function h(a) = sup <x, a> and,
where the structure permits, the maximizing point together with a
uniqueness certificate.  Open sets are represented by their closure plus
an ``closed=False`` flag that only changes membership semantics; all
geometry (supports, exposed points, hyperplanes) is that of the closure.

Conventions: direction vectors need not be normalized for ``support``;
tolerances are absolute in the body's own length units unless noted.
"""

import numpy as np
from dataclasses import dataclass, field
from enum import Enum

from . import _lp

TAU_HP = 1e-9          # hyperplane validation slack
TAU_PT_FACTOR = 1e-7   # point dedup tolerance, times diameter
PROBE_DIRECTIONS = 512


class Containment(Enum):
    INSIDE = "INSIDE"
    BOUNDARY = "BOUNDARY"
    OUTSIDE = "OUTSIDE"


class ProbeFailure(RuntimeError):
    """Raised when a direction-refinement search exhausts its budget."""


def unit(v):
    v = np.asarray(v, float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("zero direction")
    return v / n


def equiangular_directions(m, dim=2, offset=0.0):
    """m unit directions: equiangular in 2D, +-1 in 1D, seeded sphere points else."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        th = offset + 2.0 * np.pi * np.arange(m) / m
        return np.column_stack([np.cos(th), np.sin(th)])
    rng = np.random.default_rng(1234)
    u = rng.standard_normal((m, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


@dataclass(frozen=True)
class Hyperplane:
    """Oriented hyperplane <y, normal> = offset with unit normal.

    The induced halfspace is <y, normal> <= offset.
    """
    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", unit(self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    def side(self, x):
        return float(np.dot(self.normal, np.asarray(x, float)) - self.offset)


@dataclass(frozen=True)
class SupportPoint:
    point: np.ndarray
    unique: bool


class ConvexBody:
    """Base class; subclasses are immutable value objects."""

    dim: int
    closed: bool

    # -- support calculus ------------------------------------------------

    def support(self, a):
        """sup over the body of <x, a>; may be +inf for unbounded bodies."""
        raise NotImplementedError

    def support_many(self, A):
        A = np.atleast_2d(np.asarray(A, float))
        return np.array([self.support(a) for a in A])

    def support_point(self, a):
        """Maximizer of <x, a> with a uniqueness certificate.

        Returns a SupportPoint, or None when the supremum is infinite.  A
        non-unique result carries the midpoint of the optimal face, which
        is what the witness-selection fallback wants.
        """
        raise NotImplementedError

    # -- membership ------------------------------------------------------

    def margin_many(self, X):
        """Signed support margin min_a(h(a) - <x, a>) for each row of X.

        Positive inside (distance to the boundary for the exact node
        types), negative outside.  The generic path probes a fixed fan of
        directions, so magnitudes carry an O(angular step^2) error; signs
        are reliable away from that band.
        """
        return self._probe_margin(np.atleast_2d(np.asarray(X, float)))

    def boundary_margin(self, x):
        """Signed margin of a single point, refined where the node is generic."""
        return float(self.margin_many(np.asarray(x, float)[None, :])[0])

    def _probe_margin(self, X, n_dirs=PROBE_DIRECTIONS):
        U, h = self._probe_table(n_dirs)
        fin = np.isfinite(h)
        if not fin.any():
            raise ValueError("support is infinite in every probed direction")
        vals = h[fin][None, :] - X @ U[fin].T
        return vals.min(axis=1)

    def _probe_table(self, n_dirs):
        cache = getattr(self, "_ptab", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_ptab", cache)
        if n_dirs not in cache:
            U = equiangular_directions(n_dirs, self.dim)
            cache[n_dirs] = (U, self.support_many(U))
        return cache[n_dirs]

    # -- structure hooks ---------------------------------------------------

    def facet_normals(self):
        """Outward unit facet normals when the node is polyhedral, else None."""
        return None

    def diameter_estimate(self):
        U, h = self._probe_table(64 if self.dim == 2 else 16)
        m = self.dim if self.dim > 2 else (64 if self.dim == 2 else 2)
        widths = []
        n = len(U)
        for i in range(n // 2):
            a, b = h[i], h[(i + n // 2) % n]
            if np.isfinite(a) and np.isfinite(b):
                widths.append(a + b)
        return max(widths) if widths else 1.0

    def to_dict(self):
        raise NotImplementedError


def _scale_tol(a_norm, scale):
    return 1e-12 * max(1.0, a_norm) * max(1.0, scale)


@dataclass(frozen=True)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float
    closed: bool = True

    def __post_init__(self):
        c = np.asarray(self.center, float)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "dim", c.size)
        if self.radius < 0:
            raise ValueError("radius must be >= 0")

    def support(self, a):
        a = np.asarray(a, float)
        return float(self.center @ a + self.radius * np.linalg.norm(a))

    def support_many(self, A):
        A = np.atleast_2d(np.asarray(A, float))
        return A @ self.center + self.radius * np.linalg.norm(A, axis=1)

    def support_point(self, a):
        a = np.asarray(a, float)
        return SupportPoint(self.center + self.radius * unit(a), True)

    def margin_many(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        return self.radius - np.linalg.norm(X - self.center, axis=1)

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(),
                "radius": self.radius, "open": not self.closed}


@dataclass(frozen=True)
class HPolyhedron(ConvexBody):
    """Intersection of halfspaces <y, a_i> <= t_i; normals stored unit length."""
    normals: np.ndarray
    offsets: np.ndarray
    closed: bool = True

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.normals, float))
        t = np.asarray(self.offsets, float).ravel()
        lens = np.linalg.norm(A, axis=1)
        if np.any(lens == 0):
            raise ValueError("zero normal")
        object.__setattr__(self, "normals", A / lens[:, None])
        object.__setattr__(self, "offsets", t / lens)
        object.__setattr__(self, "dim", A.shape[1])

    def support(self, a):
        status, val, _ = _lp.support_lp(self.normals, self.offsets, a)
        if status == _lp.LPStatus.UNBOUNDED:
            return np.inf
        if status != _lp.LPStatus.OPTIMAL:
            raise ValueError("infeasible halfspace system")
        return val

    def support_point(self, a):
        a = np.asarray(a, float)
        status, val, x = _lp.support_lp(self.normals, self.offsets, a)
        if status == _lp.LPStatus.UNBOUNDED:
            return None
        if status != _lp.LPStatus.OPTIMAL:
            raise ValueError("infeasible halfspace system")
        if self.dim != 2:
            return SupportPoint(x, True)
        # face-width test: extent of the near-optimal slab along the
        # perpendicular decides uniqueness
        p = np.array([-a[1], a[0]])
        scale = max(1.0, np.linalg.norm(x))
        slack = 1e-9 * max(1.0, abs(val))
        A2 = np.vstack([self.normals, -a / np.linalg.norm(a)])
        t2 = np.concatenate([self.offsets, [-(val - slack) / np.linalg.norm(a)]])
        s1, hi, xh = _lp.support_lp(A2, t2, p)
        s2, lo, xl = _lp.support_lp(A2, t2, -p)
        if s1 != _lp.LPStatus.OPTIMAL or s2 != _lp.LPStatus.OPTIMAL:
            return SupportPoint(x, False)
        width = hi + lo
        if width <= 1e-7 * scale:
            return SupportPoint(0.5 * (xh + xl), True)
        return SupportPoint(0.5 * (xh + xl), False)

    def margin_many(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        return (self.offsets[None, :] - X @ self.normals.T).min(axis=1)

    def facet_normals(self):
        return self.normals.copy()

    def to_dict(self):
        return {"type": "hpoly", "normals": self.normals.tolist(),
                "offsets": self.offsets.tolist(), "open": not self.closed}


def _polygon_edges(vertices):
    """Outward unit edge normals and offsets of a 2D point set's hull.

    Degenerate (collinear) inputs return None; callers fall back to
    segment distance.
    """
    from scipy.spatial import ConvexHull, QhullError
    try:
        hull = ConvexHull(vertices)
    except QhullError:
        return None
    eq = hull.equations  # a.x + b <= 0
    return eq[:, :2].copy(), -eq[:, 2].copy()


def _segment_frame(points):
    """Endpoints of the segment spanned by collinear points (or a single point)."""
    P = np.atleast_2d(points)
    if len(P) == 1:
        return P[0], P[0]
    d = P - P.mean(axis=0)
    _, _, vt = np.linalg.svd(d, full_matrices=False)
    t = d @ vt[0]
    return P[np.argmin(t)], P[np.argmax(t)]


def _dist_to_segment(X, p, q):
    X = np.atleast_2d(X)
    v = q - p
    vv = float(v @ v)
    if vv == 0.0:
        return np.linalg.norm(X - p, axis=1)
    t = np.clip((X - p) @ v / vv, 0.0, 1.0)
    proj = p + t[:, None] * v
    return np.linalg.norm(X - proj, axis=1)


@dataclass(frozen=True)
class VPolytope(ConvexBody):
    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, float))
        if V.size == 0:
            raise ValueError("empty vertex list")
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "dim", V.shape[1])

    def support(self, a):
        return float(np.max(self.vertices @ np.asarray(a, float)))

    def support_many(self, A):
        A = np.atleast_2d(np.asarray(A, float))
        return (A @ self.vertices.T).max(axis=1)

    def support_point(self, a):
        a = np.asarray(a, float)
        vals = self.vertices @ a
        best = vals.max()
        scale = max(1.0, float(np.abs(self.vertices).max()))
        tie = vals >= best - _scale_tol(np.linalg.norm(a), scale)
        pts = self.vertices[tie]
        return SupportPoint(pts.mean(axis=0), bool(len(pts) == 1))

    def _edge_cache(self):
        cache = getattr(self, "_edges", None)
        if cache is None:
            cache = {"val": _polygon_edges(self.vertices) if self.dim == 2 else None}
            object.__setattr__(self, "_edges", cache)
        return cache["val"]

    def margin_many(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        if self.dim == 1:
            lo, hi = self.vertices.min(), self.vertices.max()
            return np.minimum(X[:, 0] - lo, hi - X[:, 0])
        if self.dim == 2:
            edges = self._edge_cache()
            if edges is not None:
                A, t = edges
                return (t[None, :] - X @ A.T).min(axis=1)
            p, q = _segment_frame(self.vertices)
            return -_dist_to_segment(X, p, q)
        return self._probe_margin(X)

    def facet_normals(self):
        if self.dim == 2:
            edges = self._edge_cache()
            if edges is not None:
                return edges[0]
            p, q = _segment_frame(self.vertices)
            if np.allclose(p, q):
                return None
            d = unit(q - p)
            return np.array([[-d[1], d[0]], [d[1], -d[0]]])
        return None

    def to_dict(self):
        return {"type": "vpoly", "vertices": self.vertices.tolist(),
                "open": not self.closed}


@dataclass(frozen=True)
class HullRays(ConvexBody):
    """conv(points) + cone(rays); ray directions are stored unit length."""
    points: np.ndarray
    rays: np.ndarray
    closed: bool = True

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, float))
        if P.size == 0:
            raise ValueError("empty generator list")
        R = np.asarray(self.rays, float)
        R = R.reshape(-1, P.shape[1]) if R.size else np.zeros((0, P.shape[1]))
        if R.size:
            R = R / np.linalg.norm(R, axis=1, keepdims=True)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "rays", R)
        object.__setattr__(self, "dim", P.shape[1])

    def support(self, a):
        a = np.asarray(a, float)
        if len(self.rays) and np.max(self.rays @ a) > _scale_tol(np.linalg.norm(a), 1.0):
            return np.inf
        return float(np.max(self.points @ a))

    def support_many(self, A):
        A = np.atleast_2d(np.asarray(A, float))
        out = (A @ self.points.T).max(axis=1)
        if len(self.rays):
            tol = _scale_tol(1.0, 1.0)
            bad = (A @ self.rays.T).max(axis=1) > tol * np.linalg.norm(A, axis=1)
            out[bad] = np.inf
        return out

    def support_point(self, a):
        a = np.asarray(a, float)
        an = np.linalg.norm(a)
        scale = max(1.0, float(np.abs(self.points).max()))
        if len(self.rays):
            rdot = self.rays @ a
            if np.max(rdot) > _scale_tol(an, 1.0):
                return None
            ray_on_face = np.any(rdot > -_scale_tol(an, 1.0))
        else:
            ray_on_face = False
        vals = self.points @ a
        best = vals.max()
        tie = vals >= best - _scale_tol(an, scale)
        pts = self.points[tie]
        return SupportPoint(pts.mean(axis=0), bool(len(pts) == 1 and not ray_on_face))

    def facet_normals(self):
        if self.dim != 2:
            return None
        gen = self.points
        if len(self.rays):
            far = self.points.mean(axis=0) + 4.0 * self.diameter_estimate() * self.rays
            gen = np.vstack([gen, far])
        edges = _polygon_edges(gen) if len(gen) >= 3 else None
        return edges[0] if edges is not None else None

    def to_dict(self):
        return {"type": "hullrays", "points": self.points.tolist(),
                "rays": self.rays.tolist(), "open": not self.closed}


@dataclass(frozen=True)
class MinkowskiSum(ConvexBody):
    left: ConvexBody
    right: ConvexBody

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise ValueError("dimension mismatch in Minkowski sum")
        object.__setattr__(self, "dim", self.left.dim)
        object.__setattr__(self, "closed", self.left.closed and self.right.closed)

    def support(self, a):
        return self.left.support(a) + self.right.support(a)

    def support_many(self, A):
        return self.left.support_many(A) + self.right.support_many(A)

    def support_point(self, a):
        sl = self.left.support_point(a)
        sr = self.right.support_point(a)
        if sl is None or sr is None:
            return None
        return SupportPoint(sl.point + sr.point, sl.unique and sr.unique)

    def margin_many(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        # offsetting by a ball commutes with the signed margin
        if isinstance(self.left, Ball):
            return self.left.radius + self.right.margin_many(X - self.left.center)
        if isinstance(self.right, Ball):
            return self.right.radius + self.left.margin_many(X - self.right.center)
        if (self.dim == 2 and isinstance(self.left, VPolytope)
                and isinstance(self.right, VPolytope)):
            V = (self.left.vertices[:, None, :] + self.right.vertices[None, :, :])
            return VPolytope(V.reshape(-1, 2)).margin_many(X)
        return self._probe_margin(X)

    def facet_normals(self):
        parts = [p.facet_normals() for p in (self.left, self.right)]
        parts = [p for p in parts if p is not None]
        return np.vstack(parts) if parts else None

    def to_dict(self):
        return {"type": "sum", "parts": [self.left.to_dict(), self.right.to_dict()]}


@dataclass(frozen=True)
class Negate(ConvexBody):
    body: ConvexBody

    def __post_init__(self):
        object.__setattr__(self, "dim", self.body.dim)
        object.__setattr__(self, "closed", self.body.closed)

    def support(self, a):
        return self.body.support(-np.asarray(a, float))

    def support_many(self, A):
        return self.body.support_many(-np.atleast_2d(np.asarray(A, float)))

    def support_point(self, a):
        sp = self.body.support_point(-np.asarray(a, float))
        return None if sp is None else SupportPoint(-sp.point, sp.unique)

    def margin_many(self, X):
        return self.body.margin_many(-np.atleast_2d(np.asarray(X, float)))

    def facet_normals(self):
        f = self.body.facet_normals()
        return None if f is None else -f

    def to_dict(self):
        return {"type": "negate", "body": self.body.to_dict()}


@dataclass(frozen=True)
class Scale(ConvexBody):
    body: ConvexBody
    factor: float

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("scale factor must be > 0")
        object.__setattr__(self, "factor", float(self.factor))
        object.__setattr__(self, "dim", self.body.dim)
        object.__setattr__(self, "closed", self.body.closed)

    def support(self, a):
        return self.factor * self.body.support(a)

    def support_many(self, A):
        return self.factor * self.body.support_many(A)

    def support_point(self, a):
        sp = self.body.support_point(a)
        return None if sp is None else SupportPoint(self.factor * sp.point, sp.unique)

    def margin_many(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        return self.factor * self.body.margin_many(X / self.factor)

    def facet_normals(self):
        return self.body.facet_normals()

    def to_dict(self):
        return {"type": "scale", "body": self.body.to_dict(), "factor": self.factor}


@dataclass(frozen=True)
class FunctionBody(ConvexBody):
    """Support-function-defined body for smooth fixtures outside the tree.

    Not part of the serialization schema; used for shapes like the
    parabola epigraph whose support has a closed form but no generator
    representation.
    """
    dim_: int
    support_fn: object
    support_point_fn: object
    closed: bool = True
    name: str = "function-body"

    def __post_init__(self):
        object.__setattr__(self, "dim", self.dim_)

    def support(self, a):
        return float(self.support_fn(np.asarray(a, float)))

    def support_point(self, a):
        return self.support_point_fn(np.asarray(a, float))

    def to_dict(self):
        raise TypeError("function-defined bodies are not serializable")


def translate(body, v):
    """body + {v}, expressed inside the constructor tree."""
    return MinkowskiSum(body, VPolytope(np.asarray(v, float)[None, :]))


# ---------------------------------------------------------------------------
# operations


def support(body, a):
    """Support value sup_{x in body} <x, a>; raises on the zero direction."""
    a = np.asarray(a, float)
    if np.linalg.norm(a) == 0.0:
        raise ValueError("zero direction")
    return body.support(a)


def contains(body, x, tol=1e-9):
    """INSIDE / BOUNDARY / OUTSIDE classification of a point.

    The margin is the signed support margin; |margin| <= tol reads as
    BOUNDARY.  The open/closed flag does not change this classification,
    only membership (see ``is_member``).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    m = body.boundary_margin(np.asarray(x, float))
    if m > tol:
        return Containment.INSIDE
    if m < -tol:
        return Containment.OUTSIDE
    return Containment.BOUNDARY


def is_member(body, x, tol=1e-9):
    """Membership honoring the open/closed flag (open bodies exclude the boundary)."""
    c = contains(body, x, tol)
    if c is Containment.INSIDE:
        return True
    return c is Containment.BOUNDARY and body.closed


def _normal_cone_interval(body, x, tol_active=None):
    """Angular interval of outward normals at a 2D boundary point.

    Scans the activity gap g(theta) = h(u) - <x, u> on a fine fan and
    bisects the two endpoints where g crosses the activity threshold.
    """
    x = np.asarray(x, float)
    n_scan = 2048
    th = 2.0 * np.pi * np.arange(n_scan) / n_scan
    U = np.column_stack([np.cos(th), np.sin(th)])
    h = body.support_many(U)
    g = np.where(np.isfinite(h), h - U @ x, np.inf)
    scale = max(1.0, float(np.abs(x).max()), body.diameter_estimate())
    if tol_active is None:
        tol_active = 1e-9 * scale
    i0 = int(np.argmin(g))
    if g[i0] > 10 * tol_active + 1e-7 * scale:
        raise ValueError("point is not on the boundary")

    def gap(theta):
        u = np.array([np.cos(theta), np.sin(theta)])
        hv = body.support(u)
        return (hv - u @ x) if np.isfinite(hv) else np.inf

    def bisect_edge(inside_th, outside_th):
        for _ in range(80):
            mid = 0.5 * (inside_th + outside_th)
            if gap(mid) <= tol_active:
                inside_th = mid
            else:
                outside_th = mid
        return inside_th

    step = 2.0 * np.pi / n_scan
    lo = th[i0]
    while gap(lo - step) <= tol_active:
        lo -= step
        if th[i0] - lo > 2.0 * np.pi:
            break
    hi = th[i0]
    while gap(hi + step) <= tol_active:
        hi += step
        if hi - th[i0] > 2.0 * np.pi:
            break
    lo = bisect_edge(lo, lo - step)
    hi = bisect_edge(hi, hi + step)
    return lo, hi


def supporting_hyperplane(body, x, tol=1e-7):
    """A supporting hyperplane through boundary point x.

    At corners the returned normal is the normalized average of the
    active facet normals (equivalently, the angular midpoint of the
    normal cone), which makes the choice deterministic.
    """
    x = np.asarray(x, float)
    if contains(body, x, tol) is not Containment.BOUNDARY:
        raise ValueError("supporting_hyperplane requires a boundary point")
    if isinstance(body, Ball):
        a = unit(x - body.center)
        return Hyperplane(a, body.support(a))
    if isinstance(body, HPolyhedron):
        act = np.abs(body.normals @ x - body.offsets) <= 10 * tol
        if act.any():
            a = unit(body.normals[act].mean(axis=0))
            return Hyperplane(a, body.support(a))
    if isinstance(body, VPolytope) and body.dim == 2:
        edges = body._edge_cache()
        if edges is not None:
            A, t = edges
            act = np.abs(A @ x - t) <= 10 * tol
            if act.any():
                a = unit(A[act].mean(axis=0))
                return Hyperplane(a, body.support(a))
    if body.dim == 1:
        for a in (np.array([1.0]), np.array([-1.0])):
            h = body.support(a)
            if np.isfinite(h) and abs(h - a @ x) <= 10 * tol:
                return Hyperplane(a, h)
        raise ValueError("no supporting direction found")
    if body.dim != 2:
        raise NotImplementedError("supporting hyperplanes are implemented for n <= 2")
    lo, hi = _normal_cone_interval(body, x)
    mid = 0.5 * (lo + hi)
    a = np.array([np.cos(mid), np.sin(mid)])
    return Hyperplane(a, body.support(a))


class PointTag(Enum):
    EXPOSED = "EXPOSED"
    EXTREME = "EXTREME"


@dataclass
class PointSet:
    """Finite point collection with its provenance tag.

    ``skipped`` lists (direction, reason) pairs for probes that produced
    no certified point.
    """
    points: np.ndarray
    tag: PointTag
    skipped: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    @property
    def separation(self):
        P = self.points
        if len(P) < 2:
            return np.inf
        d = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
        d[np.diag_indices(len(P))] = np.inf
        return float(d.min())


def _dedup_points(points, tol):
    out = []
    for p in points:
        if not any(np.linalg.norm(p - q) <= tol for q in out):
            out.append(p)
    return np.array(out) if out else np.zeros((0, points.shape[1] if len(points) else 2))


def exposed_points(body, directions, dedup_tol=None):
    """Certified-unique support maximizers over the given directions.

    Directions whose support is infinite or whose optimal face is not a
    single point are skipped and reported in the result's ``skipped``
    list.  Output points are deduplicated to TAU_PT_FACTOR times the
    body diameter.
    """
    dirs = np.atleast_2d(np.asarray(directions, float))
    if np.any(np.linalg.norm(dirs, axis=1) == 0.0):
        raise ValueError("zero direction")
    found, skipped = [], []
    for a in dirs:
        sp = body.support_point(a)
        if sp is None:
            skipped.append((a.copy(), "UNBOUNDED"))
        elif not sp.unique:
            skipped.append((a.copy(), "FACE"))
        else:
            found.append(sp.point)
    if dedup_tol is None:
        dedup_tol = TAU_PT_FACTOR * max(1.0, body.diameter_estimate())
    pts = _dedup_points(np.array(found) if found else np.zeros((0, body.dim)), dedup_tol)
    return PointSet(pts, PointTag.EXPOSED, skipped)


def extreme_points(body):
    """Extreme points of a finitely generated body, decided by LP.

    A generator survives iff it is not in the hull of the remaining
    generators plus the ray cone.
    """
    if isinstance(body, VPolytope):
        pts, rays = body.vertices, None
    elif isinstance(body, HullRays):
        pts, rays = body.points, body.rays if len(body.rays) else None
    else:
        raise TypeError("extreme_points needs a VPolytope or HullRays body")
    if len(pts) == 0:
        raise ValueError("empty generator list")
    keep = []
    for i, p in enumerate(pts):
        others = np.delete(pts, i, axis=0)
        if len(others) == 0:
            if rays is None or not _lp.in_generated_hull(p, pts, rays):
                keep.append(p)
            elif not _point_on_own_ray(p, pts, rays):
                keep.append(p)
            continue
        if not _lp.in_generated_hull(p, others, rays):
            keep.append(p)
    out = np.array(keep) if keep else np.zeros((0, pts.shape[1]))
    return PointSet(out, PointTag.EXTREME)


def _point_on_own_ray(p, pts, rays):
    # single generator point: it is extreme unless a ray loops back (it cannot)
    return False


def straszewicz_probe(body, x_ext, eps, budget=60):
    """An exposed point within eps of the given extreme point.

    Rotates exposure directions away from the normal-cone midpoint at
    x_ext on a halving schedule until a certified-unique maximizer lands
    inside the eps ball.  Raises ProbeFailure when the budget runs out.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    x_ext = np.asarray(x_ext, float)
    if body.dim != 2:
        raise NotImplementedError("probe implemented for n = 2")
    hp = supporting_hyperplane(body, x_ext)
    th0 = float(np.arctan2(hp.normal[1], hp.normal[0]))

    def attempt(theta):
        sp = body.support_point(np.array([np.cos(theta), np.sin(theta)]))
        if sp is not None and sp.unique and np.linalg.norm(sp.point - x_ext) <= eps:
            return sp.point
        return None

    p = attempt(th0)
    if p is not None:
        return p
    delta = np.pi / 3.0
    for _ in range(budget):
        for sgn in (1.0, -1.0):
            p = attempt(th0 + sgn * delta)
            if p is not None:
                return p
        delta *= 0.5
    raise ProbeFailure(
        f"no exposed point within {eps} of {x_ext.tolist()} after {budget} halvings")


# ---------------------------------------------------------------------------
# serialization


def body_from_dict(d):
    """Build a body from its JSON-compatible description (see docs/body_schema.md)."""
    if not isinstance(d, dict) or "type" not in d:
        raise ValueError("body description must be a dict with a 'type' field")
    t = d["type"]
    closed = not d.get("open", False)
    if t == "ball":
        return Ball(np.asarray(d["center"], float), float(d["radius"]), closed)
    if t == "hpoly":
        return HPolyhedron(np.asarray(d["normals"], float),
                           np.asarray(d["offsets"], float), closed)
    if t == "vpoly":
        return VPolytope(np.asarray(d["vertices"], float), closed)
    if t == "hullrays":
        rays = d.get("rays", [])
        if rays and isinstance(rays[0], dict):
            rays = [r["dir"] for r in rays]
        return HullRays(np.asarray(d["points"], float),
                        np.asarray(rays, float), closed)
    if t == "sum":
        parts = d["parts"]
        if len(parts) != 2:
            raise ValueError("'sum' takes exactly two parts")
        return MinkowskiSum(body_from_dict(parts[0]), body_from_dict(parts[1]))
    if t == "negate":
        return Negate(body_from_dict(d["body"]))
    if t == "scale":
        return Scale(body_from_dict(d["body"]), float(d["factor"]))
    raise ValueError(f"unknown body type {t!r}")


def body_to_dict(body):
    return body.to_dict()
