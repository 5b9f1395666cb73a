"""Planar convex-set structure: extreme half-lines and classification.

A closed planar convex set with finitely many extreme points is a
polyhedron: either it contains a line (and is a strip in rotated
coordinates) or it splits as polytope + finitely generated recession
cone.  Sets that keep producing new exposed points under direction
refinement are classified non-polyhedral on that evidence.
"""

import numpy as np
from dataclasses import dataclass, field

from . import _lp
from .bodies import (Ball, ConvexBody, FunctionBody, HPolyhedron, HullRays,
                     MinkowskiSum, Negate, Scale, VPolytope, exposed_points,
                     extreme_points, equiangular_directions, unit)

POLYTOPE = "POLYTOPE"
POLYHEDRON = "POLYHEDRON"
NON_POLYHEDRAL = "NON_POLYHEDRAL"
LINE_STRIP = "LINE_STRIP"


@dataclass(frozen=True)
class HullRaysRep:
    """Generator form conv(points) + rooted half-lines.

    Each ray is (origin index, unit direction) with the origin among the
    points; line_flag is derived from the directions and records whether
    the set contains a full line.
    """
    points: np.ndarray
    rays: tuple  # of (origin_index, unit direction)

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, float))
        if P.shape[1] != 2:
            raise ValueError("HullRaysRep is planar")
        rays = []
        for origin, d in self.rays:
            origin = int(origin)
            if not 0 <= origin < len(P):
                raise ValueError("ray origin must index a point")
            rays.append((origin, unit(d)))
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "rays", tuple(rays))

    @property
    def directions(self):
        return np.array([d for _, d in self.rays]) if self.rays else np.zeros((0, 2))

    @property
    def line_flag(self):
        return cone_contains_line(self.directions)

    def body(self):
        return HullRays(self.points, self.directions)

    def support_many(self, A):
        return self.body().support_many(A)


def _angles(dirs):
    return np.arctan2(dirs[:, 1], dirs[:, 0])


def cone_contains_line(dirs, tol=1e-12):
    """Whether cone(dirs) contains a full line (2D, by the angular gap test)."""
    dirs = np.atleast_2d(np.asarray(dirs, float))
    if len(dirs) == 0 or not dirs.size:
        return False
    th = np.sort(np.mod(_angles(dirs), 2.0 * np.pi))
    gaps = np.diff(np.concatenate([th, [th[0] + 2.0 * np.pi]]))
    return float(np.max(gaps)) <= np.pi + tol


def cone_extreme_rays(dirs, tol=1e-12):
    """Extreme rays of a pointed planar cone: its two angular boundary directions."""
    dirs = np.atleast_2d(np.asarray(dirs, float))
    if len(dirs) == 0 or not dirs.size:
        return np.zeros((0, 2))
    if cone_contains_line(dirs, tol):
        raise ValueError("cone is not pointed")
    th = np.mod(_angles(dirs), 2.0 * np.pi)
    order = np.argsort(th)
    ts = th[order]
    gaps = np.diff(np.concatenate([ts, [ts[0] + 2.0 * np.pi]]))
    i = int(np.argmax(gaps))
    hi = ts[i]                      # end of the span
    lo = ts[(i + 1) % len(ts)]      # start of the span
    out = [np.array([np.cos(lo), np.sin(lo)])]
    if abs((hi - lo) % (2.0 * np.pi)) > tol:
        out.append(np.array([np.cos(hi), np.sin(hi)]))
    seen = []
    for u in out:
        if not any(np.linalg.norm(u - v) <= 1e-12 for v in seen):
            seen.append(u)
    return np.array(seen)


@dataclass(frozen=True)
class HalfLine:
    origin: np.ndarray
    direction: np.ndarray


def extreme_halflines(rep):
    """Maximal extreme boundary half-lines of a line-free planar hull.

    A direction survives only if it is an extreme ray of the recession
    cone; the half-line itself is the face of the supporting line with
    the perpendicular outward normal, rooted at the face's farthest-back
    generator so collinear generators are absorbed.  A line-free planar
    set has at most two of these.
    """
    if rep.line_flag:
        raise ValueError("set contains a line; see classify")
    dirs = rep.directions
    if len(dirs) == 0:
        return []
    extremes = cone_extreme_rays(dirs)
    pts = rep.points
    out = []
    for u in extremes:
        for rot in (np.array([-u[1], u[0]]), np.array([u[1], -u[0]])):
            if len(dirs) and np.max(dirs @ rot) > 1e-12:
                continue  # support infinite: not a supporting normal
            vals = pts @ rot
            best = vals.max()
            face = pts[vals >= best - 1e-9 * max(1.0, np.abs(pts).max())]
            origin = face[np.argmin(face @ u)]
            if not any(np.linalg.norm(origin - hl.origin) <= 1e-9 and
                       np.linalg.norm(u - hl.direction) <= 1e-12 for hl in out):
                out.append(HalfLine(origin, u))
    if len(out) > 2:
        raise AssertionError("a line-free planar set has at most two extreme half-lines")
    return out


@dataclass
class Decomposition:
    """Polytope-plus-cone form with its support identity.

    h(a) = max over vertices of <x, a> whenever every generator has
    <u, a> <= 0, and +inf otherwise; validate() checks this against the
    source representation on sampled directions.
    """
    polytope_vertices: np.ndarray
    cone_generators: np.ndarray

    def support_many(self, A):
        A = np.atleast_2d(np.asarray(A, float))
        out = (A @ self.polytope_vertices.T).max(axis=1)
        if len(self.cone_generators):
            bad = (A @ self.cone_generators.T).max(axis=1) > 1e-12
            out[bad] = np.inf
        return out

    def validate(self, rep, n_directions=256, tol=1e-9):
        U = equiangular_directions(n_directions, 2)
        ours = self.support_many(U)
        theirs = rep.support_many(U)
        fin_o, fin_t = np.isfinite(ours), np.isfinite(theirs)
        if not np.array_equal(fin_o, fin_t):
            bad = U[fin_o != fin_t][0]
            raise AssertionError(f"finiteness mismatch in direction {bad.tolist()}")
        both = fin_o
        gap = np.abs(ours[both] - theirs[both]) / (1.0 + np.abs(theirs[both]))
        if gap.size and gap.max() > tol:
            bad = U[both][int(np.argmax(gap))]
            raise AssertionError(f"support mismatch in direction {bad.tolist()}")
        return True


def decompose(rep, n_directions=256):
    """Split a line-free hull into extreme vertices plus extreme cone rays.

    The identity h = max-over-vertices (on the cone's polar side) is
    validated on sampled directions before returning; a failure would be
    a bug, not an input problem.
    """
    if rep.line_flag:
        raise ValueError("set contains a line; decompose needs a pointed set")
    dirs = rep.directions
    body = HullRays(rep.points, dirs)
    verts = extreme_points(body).points
    gens = cone_extreme_rays(dirs) if len(dirs) else np.zeros((0, 2))
    if len(verts) == 0:
        verts = rep.points[:1].copy()
    dec = Decomposition(verts, gens)
    dec.validate(rep, n_directions)
    return dec


@dataclass
class Classification:
    kind: str
    strip: tuple = None            # (beta, alpha, direction) for LINE_STRIP
    decomposition: Decomposition = None
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        return self.kind


def _strip_data(rep):
    dirs = rep.directions
    # the contained line's direction: any direction whose opposite is also
    # in the cone; with the angular test this is the max-gap chord
    th = np.sort(np.mod(_angles(dirs), 2.0 * np.pi))
    gaps = np.diff(np.concatenate([th, [th[0] + 2.0 * np.pi]]))
    i = int(np.argmax(gaps))
    lo = th[(i + 1) % len(th)]
    v = np.array([np.cos(lo), np.sin(lo)])
    perp = np.array([-v[1], v[0]])
    vals = rep.points @ perp
    beta, alpha = float(vals.min()), float(vals.max())
    up = dirs @ perp
    if np.any(up > 1e-12):
        alpha = np.inf
    if np.any(up < -1e-12):
        beta = -np.inf
    return beta, alpha, v


def _tree_is_polyhedral(body):
    if isinstance(body, (VPolytope, HPolyhedron, HullRays)):
        return True
    if isinstance(body, MinkowskiSum):
        return _tree_is_polyhedral(body.left) and _tree_is_polyhedral(body.right)
    if isinstance(body, (Negate, Scale)):
        return _tree_is_polyhedral(body.body)
    return False


def _tree_generators(body):
    """(points, ray directions) of a polyhedral constructor tree."""
    if isinstance(body, VPolytope):
        return body.vertices.copy(), np.zeros((0, body.dim))
    if isinstance(body, HullRays):
        return body.points.copy(), body.rays.copy()
    if isinstance(body, Negate):
        P, R = _tree_generators(body.body)
        return -P, -R
    if isinstance(body, Scale):
        P, R = _tree_generators(body.body)
        return body.factor * P, R
    if isinstance(body, MinkowskiSum):
        P1, R1 = _tree_generators(body.left)
        P2, R2 = _tree_generators(body.right)
        P = (P1[:, None, :] + P2[None, :, :]).reshape(-1, body.dim)
        return P, np.vstack([R1, R2])
    if isinstance(body, HPolyhedron):
        return _hpoly_generators(body)
    raise TypeError(f"not a polyhedral tree node: {type(body).__name__}")


def _hpoly_generators(body):
    """V-form of a 2D H-polyhedron; raises on systems containing a line."""
    A, t = body.normals, body.offsets
    ns = np.linalg.svd(A, compute_uv=True)
    # line directions live in the nullspace of A
    _, s, vt = np.linalg.svd(A)
    null = vt[len(s[s > 1e-12]):]
    if len(null):
        raise _ContainsLine(null[0])
    verts = []
    m = len(A)
    for i in range(m):
        for j in range(i + 1, m):
            Mat = np.array([A[i], A[j]])
            if abs(np.linalg.det(Mat)) < 1e-12:
                continue
            x = np.linalg.solve(Mat, np.array([t[i], t[j]]))
            if np.all(A @ x <= t + 1e-9):
                verts.append(x)
    rays = []
    for th in _angles(A):
        for cand_th in (th + np.pi / 2.0, th - np.pi / 2.0):
            d = np.array([np.cos(cand_th), np.sin(cand_th)])
            if np.all(A @ d <= 1e-12):
                rays.append(d)
    rays = _dedup_rows(np.array(rays)) if rays else np.zeros((0, 2))
    if not verts:
        # feasible point via LP, if any
        st, center, r = _lp.chebyshev_lp(A, t)
        if st != _lp.LPStatus.OPTIMAL or (r is not None and r < -1e-9):
            raise ValueError("empty polyhedron")
        verts = [center]
    return np.array(verts), rays


def _dedup_rows(rows, tol=1e-9):
    out = []
    for r in rows:
        if not any(np.linalg.norm(r - q) <= tol for q in out):
            out.append(r)
    return np.array(out) if out else np.zeros((0, rows.shape[1]))


class _ContainsLine(Exception):
    def __init__(self, direction):
        self.direction = direction


def exposed_growth_evidence(body, coarse=64, fine=256, min_count=16):
    """Exposed-point counts under direction refinement.

    Strictly growing counts above the polytope floor are the working
    evidence for infinitely many exposed points; this is a falsifiable
    heuristic, not a decision procedure, and is recorded as such.
    """
    c1 = len(exposed_points(body, equiangular_directions(coarse, 2)))
    c2 = len(exposed_points(body, equiangular_directions(fine, 2)))
    return {"directions": (coarse, fine), "counts": (c1, c2),
            "min_count": min_count,
            "growing": bool(c2 > c1 >= min_count), "heuristic": True}


def classify(obj, n_directions=256):
    """POLYTOPE / POLYHEDRON / LINE_STRIP / NON_POLYHEDRAL for planar sets.

    Generator and halfspace trees are decided exactly; smooth bodies go
    through the exposed-point growth probe and come back NON_POLYHEDRAL
    with the evidence attached.
    """
    if isinstance(obj, HullRaysRep):
        if obj.line_flag:
            beta, alpha, v = _strip_data(obj)
            return Classification(LINE_STRIP, strip=(beta, alpha, v))
        dec = decompose(obj, n_directions)
        if len(dec.cone_generators) == 0:
            return Classification(POLYTOPE, decomposition=dec)
        return Classification(POLYHEDRON, decomposition=dec)
    if not isinstance(obj, ConvexBody):
        raise TypeError("classify takes a ConvexBody or HullRaysRep")
    if obj.dim != 2:
        raise ValueError("classify is planar; higher dimensions are undecided here")
    if _tree_is_polyhedral(obj):
        try:
            P, R = _tree_generators(obj)
        except _ContainsLine as line:
            rep = _strip_rep_from_body(obj, line.direction)
            beta, alpha, v = rep
            return Classification(LINE_STRIP, strip=(beta, alpha, v))
        if len(R) and cone_contains_line(R):
            rep = _strip_rep_from_body(obj, _line_direction(R))
            beta, alpha, v = rep
            return Classification(LINE_STRIP, strip=(beta, alpha, v))
        rep = HullRaysRep(P, tuple((0, d) for d in R))
        # rooted origins are irrelevant for the set; reuse the exact path
        dec = decompose(rep, n_directions)
        kind = POLYTOPE if len(dec.cone_generators) == 0 else POLYHEDRON
        return Classification(kind, decomposition=dec)
    ev = exposed_growth_evidence(obj)
    if ev["growing"]:
        return Classification(NON_POLYHEDRAL, evidence=ev)
    return Classification("UNDECIDED", evidence=ev)


def _line_direction(dirs):
    th = np.mod(_angles(dirs), 2.0 * np.pi)
    order = np.argsort(th)
    ts = th[order]
    gaps = np.diff(np.concatenate([ts, [ts[0] + 2.0 * np.pi]]))
    i = int(np.argmax(gaps))
    lo = ts[(i + 1) % len(ts)]
    return np.array([np.cos(lo), np.sin(lo)])


def _strip_rep_from_body(body, v):
    v = unit(v)
    perp = np.array([-v[1], v[0]])
    alpha = body.support(perp)
    beta = -body.support(-perp)
    return float(beta), float(alpha), v
