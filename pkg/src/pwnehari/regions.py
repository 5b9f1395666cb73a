"""Certified computations on intersections of convex bodies.

The central object is the interaction region of a symbol support S with a
domain O, the set (S - O) intersect O.  Emptiness of such regions is what
makes bump sums block-orthogonal, so everything here is built around
one-sided certificates: an EMPTY answer is backed by Farkas multipliers
and is sound; a non-empty outer polygon says nothing about the region
being non-empty.
"""

import numpy as np
from dataclasses import dataclass, field

from . import _lp
from .bodies import (Ball, ConvexBody, MinkowskiSum, Negate, Scale, VPolytope,
                     equiangular_directions, exposed_points, unit)

EMPTY = "EMPTY"
POLYGON = "POLYGON"
UNBOUNDED = "UNBOUNDED"

CERTIFIED = "CERTIFIED"
INCONCLUSIVE = "INCONCLUSIVE"
FOUND = "FOUND"
NOT_FOUND = "NOT_FOUND"


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class RegionSpec:
    """Intersection of finitely many convex bodies."""
    members: tuple
    label: str = ""

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("a region needs at least one member")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise ValueError("member dimension mismatch")
        object.__setattr__(self, "members", members)

    @property
    def dim(self):
        return self.members[0].dim

    def margin_many(self, X):
        """Minimum member margin; positive means inside every member."""
        X = np.atleast_2d(np.asarray(X, float))
        out = self.members[0].margin_many(X)
        for m in self.members[1:]:
            out = np.minimum(out, m.margin_many(X))
        return out

    def contains_strict(self, X, tol=1e-9):
        return self.margin_many(X) > tol


def interaction_region(omega, supp_hat, label=""):
    """The region (supp_hat - omega) intersect omega.

    This is where a symbol with Fourier support supp_hat exchanges energy
    with the domain; two symbols with disjoint such regions generate
    block-orthogonal Hankel operators.
    """
    if omega.dim != supp_hat.dim:
        raise ValueError("dimension mismatch")
    return RegionSpec((MinkowskiSum(supp_hat, Negate(omega)), omega),
                      label or "interaction")


@dataclass
class OuterPolygon:
    """Sound outer approximation of a region by support halfplanes.

    status EMPTY carries Farkas multipliers proving infeasibility of the
    halfplane system (hence emptiness of the region).  status POLYGON
    carries the vertex list of the constraint polygon.  status UNBOUNDED
    retains the finite constraints without a vertex list.
    """
    directions: np.ndarray
    offsets: np.ndarray
    status: str
    vertices: np.ndarray = None
    farkas: np.ndarray = None
    chebyshev_center: np.ndarray = None
    chebyshev_radius: float = None

    def support_value(self, a):
        if self.status != POLYGON or len(self.vertices) == 0:
            raise ValueError("support values need a non-empty polygon")
        return float(np.max(self.vertices @ np.asarray(a, float)))

    def max_distance(self, y):
        if self.status != POLYGON or len(self.vertices) == 0:
            raise ValueError("max_distance needs a non-empty polygon")
        return float(np.max(np.linalg.norm(self.vertices - np.asarray(y, float), axis=1)))

    def to_dict(self):
        d = {"status": self.status,
             "directions": np.round(self.directions, 15).tolist(),
             "offsets": self.offsets.tolist()}
        if self.farkas is not None:
            d["farkas_weights"] = self.farkas.tolist()
        if self.vertices is not None:
            d["vertices"] = self.vertices.tolist()
        return d


def _clip_halfplanes(normals, offsets, bbox):
    """Sutherland-Hodgman clip of a bounding box by <a, x> <= c halfplanes."""
    (x0, x1), (y0, y1) = bbox
    poly = [np.array([x0, y0]), np.array([x1, y0]),
            np.array([x1, y1]), np.array([x0, y1])]
    for a, c in zip(normals, offsets):
        if not poly:
            return []
        out = []
        prev = poly[-1]
        prev_in = a @ prev <= c
        for cur in poly:
            cur_in = a @ cur <= c
            if cur_in != prev_in:
                d = cur - prev
                denom = a @ d
                t = (c - a @ prev) / denom if denom != 0.0 else 0.0
                out.append(prev + np.clip(t, 0.0, 1.0) * d)
            if cur_in:
                out.append(cur)
            prev, prev_in = cur, cur_in
        poly = out
    return poly


def _dedup_ring(points, tol):
    out = []
    for p in points:
        if not out or np.linalg.norm(p - out[-1]) > tol:
            out.append(p)
    if len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= tol:
        out.pop()
    return out


def member_facet_normals(region):
    rows = []
    for m in region.members:
        f = m.facet_normals()
        if f is not None:
            rows.append(f)
    return np.vstack(rows) if rows else np.zeros((0, region.dim))


def outer_polygon(region, n_directions=256):
    """Outer halfplane approximation of a 2D region, with certificates.

    Constraint offsets are the minima of the member supports, so the
    constraint polygon always contains the region.  Infeasibility of the
    constraints is certified by Farkas multipliers before EMPTY is
    reported.
    """
    if region.dim != 2:
        raise ValueError("outer_polygon is 2D only")
    if n_directions < 3:
        raise ValueError("need at least 3 directions")
    U = equiangular_directions(n_directions, 2)
    extra = member_facet_normals(region)
    if len(extra):
        U = np.vstack([U, extra])
    offs = np.full(len(U), np.inf)
    for m in region.members:
        offs = np.minimum(offs, m.support_many(U))
    fin = np.isfinite(offs)
    U, offs = U[fin], offs[fin]
    if len(U) < 3:
        return OuterPolygon(U, offs, UNBOUNDED)
    scale = max(1.0, float(np.abs(offs).max()))

    status, center, radius = _lp.chebyshev_lp(U, offs)
    if status == _lp.LPStatus.UNBOUNDED:
        return OuterPolygon(U, offs, UNBOUNDED)
    if status != _lp.LPStatus.OPTIMAL:
        y = _lp.farkas_certificate(U, offs, tol=1e-9 * scale)
        if y is not None:
            return OuterPolygon(U, offs, EMPTY, farkas=y)
        radius = -1e-9 * scale
        center = None

    if radius < -1e-12 * scale:
        y = _lp.farkas_certificate(U, offs, tol=1e-9 * scale)
        if y is not None:
            return OuterPolygon(U, offs, EMPTY, farkas=y)

    # feasible or numerically marginal: emit the polygon, relaxed just
    # enough that outer-ness survives clipping round-off
    relax = max(1e-11 * scale, 4e-9 * scale if radius < 0 else 0.0)
    ext = {}
    for d in (np.array([1.0, 0.0]), np.array([-1.0, 0.0]),
              np.array([0.0, 1.0]), np.array([0.0, -1.0])):
        st, val = _lp.linear_extent(U, offs + relax, d)
        if st == _lp.LPStatus.UNBOUNDED:
            return OuterPolygon(U, offs, UNBOUNDED)
        if st != _lp.LPStatus.OPTIMAL:
            y = _lp.farkas_certificate(U, offs, tol=1e-9 * scale)
            if y is not None:
                return OuterPolygon(U, offs, EMPTY, farkas=y)
            val = 0.0
        ext[tuple(d.astype(int))] = val
    pad = 1e-6 * scale
    bbox = ((-ext[(-1, 0)] - pad, ext[(1, 0)] + pad),
            (-ext[(0, -1)] - pad, ext[(0, 1)] + pad))
    ring = _clip_halfplanes(U, offs + relax, bbox)
    ring = _dedup_ring(ring, 1e-12 * scale)
    if not ring:
        y = _lp.farkas_certificate(U, offs, tol=1e-9 * scale)
        if y is not None:
            return OuterPolygon(U, offs, EMPTY, farkas=y)
        ring = [center] if center is not None else []
    verts = np.array(ring) if ring else np.zeros((0, 2))
    return OuterPolygon(U, offs, POLYGON, vertices=verts,
                        chebyshev_center=center, chebyshev_radius=radius)


@dataclass
class PairCertificate:
    pair: tuple
    polygon: OuterPolygon


@dataclass
class DisjointnessReport:
    status: str
    r: float
    centers: np.ndarray
    blocking_pair: tuple = None
    pair_certificates: list = field(default_factory=list)

    @property
    def certified(self):
        return self.status == CERTIFIED

    def to_dict(self):
        return {
            "status": self.status,
            "r": self.r,
            "centers": np.asarray(self.centers).tolist(),
            "blocking_pair": list(self.blocking_pair) if self.blocking_pair else None,
            "pairs": [{"pair": list(pc.pair), "polygon": pc.polygon.to_dict()}
                      for pc in self.pair_certificates],
        }


def ball_center_margin(omega, center, r):
    """Headroom of the closed ball B(center, r) inside 2*omega."""
    two = Scale(omega, 2.0)
    return float(two.margin_many(np.asarray(center, float)[None, :])[0]) - r


def check_pairwise_disjoint(omega, centers, r, n_directions=256):
    """Certify that the interaction regions of the balls B(y_i, r) are disjoint.

    Precondition: every ball lies in 2*omega (checked through the support
    margin).  For each pair the triple intersection
    (B(y_i,r) - O) cap (B(y_j,r) - O) cap O is outer-approximated; the
    report is CERTIFIED only if every pair comes back EMPTY.
    """
    centers = np.atleast_2d(np.asarray(centers, float))
    if r <= 0:
        raise PreconditionError("r must be > 0")
    for i, c in enumerate(centers):
        if ball_center_margin(omega, c, r) < -1e-9:
            raise PreconditionError(
                f"ball {i} at {c.tolist()} with radius {r} is not inside 2*omega")
    certs = []
    neg = Negate(omega)
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            region = RegionSpec((MinkowskiSum(Ball(centers[i], r), neg),
                                 MinkowskiSum(Ball(centers[j], r), neg),
                                 omega), label=f"pair({i},{j})")
            poly = outer_polygon(region, n_directions)
            certs.append(PairCertificate((i, j), poly))
            if poly.status != EMPTY:
                return DisjointnessReport(INCONCLUSIVE, r, centers,
                                          blocking_pair=(i, j),
                                          pair_certificates=certs)
    return DisjointnessReport(CERTIFIED, r, centers, pair_certificates=certs)


@dataclass
class WitnessCertificate:
    """Containment certificate (B(2z, s) - O) cap O inside B(y, max_dist)."""
    y: np.ndarray
    rho: float
    z: np.ndarray
    s: float
    max_dist: float
    polygon: OuterPolygon

    def to_dict(self):
        return {"y": self.y.tolist(), "rho": self.rho, "z": self.z.tolist(),
                "s": self.s, "max_dist": self.max_dist,
                "polygon": self.polygon.to_dict()}


@dataclass
class WitnessResult:
    status: str
    certificate: WitnessCertificate = None
    best_max_dist: float = np.inf
    rounds: int = 0

    @property
    def found(self):
        return self.status == FOUND


def chebyshev_anchor(omega, n_directions=256):
    """A deterministic interior anchor: the deepest-ball center of omega's
    outer polygon."""
    poly = outer_polygon(RegionSpec((omega,), "omega"), n_directions)
    if poly.status != POLYGON or poly.chebyshev_center is None:
        raise ValueError("omega must admit a bounded outer polygon")
    return poly.chebyshev_center


def find_witness(omega, y, rho, max_rounds=40, s_steps=4, sharpen=0.35,
                 n_directions=256):
    """Search for (z, s) with (B(2z, s) - omega) cap omega inside B(y, rho).

    Walks z from y toward the interior anchor on a halving schedule and
    shrinks s geometrically.  The search keeps sharpening past the first
    admissible certificate until max_dist <= sharpen * rho, so accepted
    certificates carry tolerance headroom; pass sharpen=1.0 to stop at
    the first candidate below rho.
    """
    y = np.asarray(y, float)
    if rho <= 0:
        raise ValueError("rho must be > 0")
    anchor = chebyshev_anchor(omega, n_directions)
    neg = Negate(omega)
    best = None
    best_dist = np.inf
    rounds = 0
    t = 0.5
    while rounds < max_rounds:
        z = (1.0 - t) * y + t * anchor
        s = 0.5 * t
        for _ in range(s_steps):
            if rounds >= max_rounds:
                break
            rounds += 1
            region = RegionSpec((MinkowskiSum(Ball(2.0 * z, s), neg), omega),
                                label="witness")
            poly = outer_polygon(region, n_directions)
            if poly.status == EMPTY:
                dist = 0.0
            elif poly.status == POLYGON and len(poly.vertices):
                dist = poly.max_distance(y)
            else:
                s *= 0.5
                continue
            if dist < best_dist:
                best_dist = dist
                best = WitnessCertificate(y, rho, z, s, dist, poly)
            if best_dist <= sharpen * rho:
                return WitnessResult(FOUND, best, best_dist, rounds)
            s *= 0.5
        t *= 0.5
    if best is not None and best_dist <= rho:
        return WitnessResult(FOUND, best, best_dist, rounds)
    return WitnessResult(NOT_FOUND, best, best_dist, rounds)


@dataclass
class SelectedPoint:
    point: np.ndarray
    exposed: bool


@dataclass
class SelectionResult:
    status: str
    points: list = None            # SelectedPoint, the chosen boundary points y_i
    centers: np.ndarray = None     # 2 z_i actually certified
    r: float = None
    rho: float = None
    report: DisjointnessReport = None
    blocking_pair: tuple = None
    blocking_involves_non_exposed: bool = None
    attempts: int = 0
    reason: str = ""

    @property
    def found(self):
        return self.status == FOUND


def _greedy_max_min(points, k):
    """Deterministic farthest-point subset maximizing the min separation greedily."""
    P = np.asarray(points, float)
    order = np.lexsort((P[:, 1], P[:, 0]))
    chosen = [order[-1]]
    while len(chosen) < k:
        d = np.full(len(P), np.inf)
        for c in chosen:
            d = np.minimum(d, np.linalg.norm(P - P[c], axis=1))
        d[chosen] = -np.inf
        chosen.append(int(np.argmax(d)))
    return chosen


def candidate_boundary_points(omega, n_directions=256):
    """Exposed points of omega, padded with support-face midpoints.

    Face midpoints are what the probe falls back to when the body has too
    few exposed points (polytope edges); they are flagged not-exposed so a
    failed certification can name them.
    """
    dirs = equiangular_directions(n_directions, omega.dim)
    ps = exposed_points(omega, dirs)
    out = [SelectedPoint(p, True) for p in ps.points]
    seen = [p for p in ps.points]
    tol = 1e-7 * max(1.0, omega.diameter_estimate())
    for a, reason in ps.skipped:
        if reason != "FACE":
            continue
        sp = omega.support_point(a)
        if sp is None:
            continue
        if not any(np.linalg.norm(sp.point - q) <= tol for q in seen):
            out.append(SelectedPoint(sp.point, False))
            seen.append(sp.point)
    return out


def select_separated_points(omega, k, n_candidate_directions=256,
                            t_levels=(0.125, 0.0625, 0.03125, 0.015625),
                            r_halvings=12, r_floor=1e-4, n_directions=256):
    """Pick k well-separated boundary points and certify their regions disjoint.

    Boundary points maximize the greedy min pairwise separation among the
    exposure candidates; the certified centers are 2 z_i with z_i pulled
    toward the interior anchor by the factor t.  Candidate (t, r) pairs
    are tried largest-r-first so the certified radius stays as large as
    the geometry allows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    cands = candidate_boundary_points(omega, n_candidate_directions)
    if len(cands) < k:
        return SelectionResult(NOT_FOUND,
                               reason=f"only {len(cands)} candidate points for k={k}")
    idx = _greedy_max_min(np.array([c.point for c in cands]), k)
    picked = [cands[i] for i in idx]
    ys = np.array([c.point for c in picked])
    if k >= 2:
        d = np.linalg.norm(ys[:, None, :] - ys[None, :, :], axis=2)
        d[np.diag_indices(k)] = np.inf
        rho = 0.5 * float(d.min())
    else:
        rho = np.inf
    anchor = chebyshev_anchor(omega, n_directions)

    schedule = []
    for t in t_levels:
        centers = 2.0 * ((1.0 - t) * ys + t * anchor)
        head = min(ball_center_margin(omega, c, 0.0) for c in centers)
        r0 = 0.95 * min(head, rho if np.isfinite(rho) else head)
        r = r0
        for _ in range(r_halvings):
            if r < r_floor:
                break
            schedule.append((r, t, centers))
            r *= 0.5
    schedule.sort(key=lambda item: -item[0])

    attempts = 0
    last_block = None
    for r, t, centers in schedule:
        attempts += 1
        report = check_pairwise_disjoint(omega, centers, r, n_directions)
        if report.certified:
            return SelectionResult(FOUND, points=picked, centers=centers, r=r,
                                   rho=rho, report=report, attempts=attempts)
        last_block = (report.blocking_pair, report)
    if last_block is None:
        return SelectionResult(NOT_FOUND, points=picked, rho=rho,
                               attempts=attempts, reason="empty schedule")
    pair, report = last_block
    involves = not (picked[pair[0]].exposed and picked[pair[1]].exposed)
    return SelectionResult(NOT_FOUND, points=picked, rho=rho, report=report,
                           blocking_pair=pair,
                           blocking_involves_non_exposed=involves,
                           attempts=attempts,
                           reason=f"pair {pair} never certified down to r={r_floor}")
