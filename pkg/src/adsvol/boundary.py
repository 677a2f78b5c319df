"""Angle calculus on the Lorentzian conformal plane and boundary volumes.

The conformal plane at infinity carries coordinates (u, w) with quadratic
form u^2 - w^2 (u space-like, w time-like).  Angles between non-light-like
directions are complex numbers; a disk-like polygon bounded by line segments
and conic arcs gets a real volume from its vertex angles alone, and the same
number can be computed independently by lifting the polygon to a solid
3-dimensional polytope and scaling its complex volume.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BoundaryPointError,
    ConventionViolationError,
    DecompositionRequiredError,
    LiftConstructionError,
    NullTangentError,
    NullVectorError,
)
from .minkowski import sphere_volume
from .model import (
    Box,
    GoodPolytope,
    QuadricHalfSpace,
    facet_arrays,
    good_polytope,
    halfspace,
    normalize_halfspace,
    validate_good_polytope,
)
from .slicing import volume

__all__ = [
    "PlaneVector",
    "plane_vector",
    "plane_form",
    "plane_norm_sq",
    "plane_length",
    "minkowski_angle",
    "c2m",
    "SegmentSide",
    "ConicSide",
    "BoundaryPolygon",
    "boundary_polygon",
    "BoundaryVolumeResult",
    "polygon_volume",
    "lift_polygon",
    "boundary_volume_via_3d",
    "correspondence_check",
    "conformal_apply",
    "polygon_to_json",
    "polygon_from_json",
]


# ---------------------------------------------------------------------------
# plane vectors and angles


@dataclass(frozen=True)
class PlaneVector:
    """A point or direction of the conformal plane; u space-like, w time-like."""

    u: float
    w: float

    def __iter__(self):
        yield self.u
        yield self.w


def plane_vector(u: float, w: float) -> PlaneVector:
    return PlaneVector(float(u), float(w))


def plane_form(x: PlaneVector, y: PlaneVector) -> float:
    """Lorentzian pairing u_x*u_y - w_x*w_y."""
    return x.u * y.u - x.w * y.w


def plane_norm_sq(x: PlaneVector) -> float:
    return plane_form(x, x)


def plane_length(x: PlaneVector) -> complex:
    """Complex length of a plane vector: positive real when space-like,
    positive imaginary when time-like; light-like input has no causal
    character to hang a branch on and is an error."""
    q = plane_norm_sq(x)
    scale = x.u * x.u + x.w * x.w
    if abs(q) <= 1e-12 * max(scale, 1e-300):
        raise NullVectorError(f"plane vector ({x.u:g}, {x.w:g}) is light-like")
    if q > 0.0:
        return complex(math.sqrt(q), 0.0)
    return complex(0.0, math.sqrt(-q))


def minkowski_angle(u: PlaneVector, v: PlaneVector) -> complex:
    """Angle between two non-light-like plane vectors.

    With lengths lu, lv: cosh(theta) is the normalized pairing and
    sinh(theta) the normalized absolute cross term; theta is the logarithm
    of cosh + sinh on the branch with Im theta in (-pi, 0], taking -pi*i
    for a pair of opposite vectors.  Right angles between a space-like and
    a time-like direction come out as -pi*i/2; same-character pairs give
    real angles (positive for space-like pairs, negative for time-like).
    """
    lu = plane_length(u)
    lv = plane_length(v)
    denom = lu * lv
    ch = plane_form(u, v) / denom
    sh = abs(u.u * v.w - u.w * v.u) / denom
    theta = cmath.log(ch + sh)
    # the principal log puts the opposite-vector case at +pi*i; every other
    # genuine value already has Im in (-pi, 0]
    if theta.imag > 1e-8:
        theta = complex(theta.real, theta.imag - 2.0 * math.pi)
    return theta


def c2m(m: int) -> complex:
    """Constant tying the boundary 2m-volume of a region to the complex
    (2m+1)-volume of any solid polytope filling it."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    i_pow = (1 + 0j, 1j, -1 + 0j, -1j)[(2 * m + 1) % 4]
    return sphere_volume(2 * m) / (i_pow * sphere_volume(2 * m + 1))


# ---------------------------------------------------------------------------
# boundary polygons


@dataclass(frozen=True)
class SegmentSide:
    """A straight side; its direction comes from the adjacent vertices."""


@dataclass(frozen=True)
class ConicSide:
    """A side lying on the conic a*(u^2 - w^2) + b1*u - b2*w + c = 0.

    The same coefficients with a = 0 describe a straight side given in
    line form, which transported polygons use.
    """

    a: float
    b1: float
    b2: float
    c: float

    def value(self, p: PlaneVector) -> float:
        return (
            self.a * (p.u * p.u - p.w * p.w)
            + self.b1 * p.u
            - self.b2 * p.w
            + self.c
        )

    def scale_at(self, p: PlaneVector) -> float:
        return (
            abs(self.a) * (p.u * p.u + p.w * p.w)
            + abs(self.b1 * p.u)
            + abs(self.b2 * p.w)
            + abs(self.c)
            + 1.0
        )


Side = SegmentSide | ConicSide


@dataclass(frozen=True)
class BoundaryPolygon:
    """A closed chain in the conformal plane.

    sides[i] joins vertices[i] to vertices[(i+1) % k]; each side is either a
    straight segment or an arc of a conic passing through both endpoints.
    """

    vertices: tuple[PlaneVector, ...]
    sides: tuple[Side, ...]


def boundary_polygon(
    vertices: Sequence[PlaneVector | Sequence[float]],
    sides: Sequence[Side | None] | None = None,
) -> BoundaryPolygon:
    """Build and validate a polygon; ``sides=None`` makes every side straight."""
    verts = tuple(
        v if isinstance(v, PlaneVector) else plane_vector(*v) for v in vertices
    )
    k = len(verts)
    if k < 2:
        raise ValueError("a polygon needs at least two vertices")
    if sides is not None and len(sides) != k:
        raise ValueError("need exactly one side per vertex")
    side_list: list[Side] = []
    for i in range(k):
        s = SegmentSide() if sides is None or sides[i] is None else sides[i]
        side_list.append(s)
    for i, s in enumerate(side_list):
        va, vb = verts[i], verts[(i + 1) % k]
        if math.hypot(vb.u - va.u, vb.w - va.w) <= 1e-12:
            raise ValueError(f"vertices {i} and {(i + 1) % k} coincide")
        if isinstance(s, ConicSide):
            if abs(s.a) <= 1e-14 and abs(s.b1) <= 1e-14 and abs(s.b2) <= 1e-14:
                raise ValueError(f"side {i} has no conic or line part")
            for v in (va, vb):
                if abs(s.value(v)) > 1e-8 * s.scale_at(v):
                    raise ValueError(
                        f"vertex ({v.u:g}, {v.w:g}) does not lie on side {i} "
                        f"(residual {s.value(v):.3e})"
                    )
    return BoundaryPolygon(verts, tuple(side_list))


def _segment_triple(va: PlaneVector, vb: PlaneVector) -> ConicSide:
    """Line through two points, written as a conic side with a = 0."""
    du, dw = vb.u - va.u, vb.w - va.w
    b1, b2 = dw, du
    c = -(b1 * va.u - b2 * va.w)
    return ConicSide(0.0, b1, b2, c)


def _tangent_away(side: Side, at: PlaneVector, other: PlaneVector) -> PlaneVector:
    """Direction leaving ``at`` along the side toward its other endpoint."""
    chord = plane_vector(other.u - at.u, other.w - at.w)
    if isinstance(side, SegmentSide):
        return chord
    # conic tangent: Euclidean rotation of the gradient; the chord picks
    # which of the two opposite tangent rays travels along the arc
    gu = 2.0 * side.a * at.u + side.b1
    gw = -2.0 * side.a * at.w - side.b2
    d = plane_vector(-gw, gu)
    nd = math.hypot(d.u, d.w)
    nc = math.hypot(chord.u, chord.w)
    dot = d.u * chord.u + d.w * chord.w
    if nd * nc <= 0.0 or abs(dot) <= 1e-9 * nd * nc:
        raise ConventionViolationError(
            "conic arc leaves its endpoint perpendicular to the chord, so the "
            "travel direction along the arc is ambiguous"
        )
    sgn = 1.0 if dot > 0.0 else -1.0
    return plane_vector(sgn * d.u, sgn * d.w)


@dataclass(frozen=True)
class BoundaryVolumeResult:
    value: float
    method: str
    abs_err: float


IM_RESIDUAL_TOL = 1e-9


def polygon_volume(G: BoundaryPolygon) -> BoundaryVolumeResult:
    """Boundary volume of a disk-like polygon from its vertex angles.

    Sums the angle between the two away-pointing side tangents at every
    vertex; the sum plus (k - 2)*pi*i must be real, and that real part is
    the volume.  A non-vanishing imaginary residue means the chain violates
    the disk-like-polygon conventions and is reported as such.
    """
    k = len(G.vertices)
    total = 0.0 + 0.0j
    for i, vert in enumerate(G.vertices):
        prev_v = G.vertices[i - 1]
        next_v = G.vertices[(i + 1) % k]
        try:
            t_in = _tangent_away(G.sides[i - 1], vert, prev_v)
            t_out = _tangent_away(G.sides[i], vert, next_v)
            total += minkowski_angle(t_in, t_out)
        except NullVectorError as exc:
            raise NullTangentError(f"vertex {i}: {exc}") from exc
    residual = abs((total + (k - 2) * math.pi * 1j).imag)
    if residual > IM_RESIDUAL_TOL * max(1.0, float(k)):
        raise ConventionViolationError(
            f"polygon angle sum has imaginary residue {residual:.3e}; the "
            "chain does not close into a disk-like polygon under the angle "
            "conventions"
        )
    return BoundaryVolumeResult(total.real, "polygon_formula", max(residual, 1e-12 * k))


# ---------------------------------------------------------------------------
# the 3-dimensional lift


def _polygon_triples(G: BoundaryPolygon) -> list[ConicSide]:
    triples = []
    k = len(G.vertices)
    for i, s in enumerate(G.sides):
        va, vb = G.vertices[i], G.vertices[(i + 1) % k]
        triples.append(s if isinstance(s, ConicSide) else _segment_triple(va, vb))
    return triples


def _oriented_triples(G: BoundaryPolygon) -> list[ConicSide]:
    """Side triples signed so the polygon is on the <= 0 side of each."""
    k = len(G.vertices)
    cu = sum(v.u for v in G.vertices) / k
    cw = sum(v.w for v in G.vertices) / k
    centroid = plane_vector(cu, cw)
    out: list[ConicSide] = []
    for i, t in enumerate(_polygon_triples(G)):
        gv = t.value(centroid)
        if abs(gv) <= 1e-12 * t.scale_at(centroid):
            raise LiftConstructionError(
                f"the vertex centroid lies on side {i}; cannot orient the side"
            )
        if gv > 0.0:
            t = ConicSide(-t.a, -t.b1, -t.b2, -t.c)
        for v in G.vertices:
            if t.value(v) > 1e-8 * t.scale_at(v):
                raise LiftConstructionError(
                    f"vertex ({v.u:g}, {v.w:g}) violates side {i}; the polygon "
                    "is not the intersection of its sides' regions"
                )
        out.append(t)
    return out


def _region_extents(
    triples: list[ConicSide], vertices: tuple[PlaneVector, ...]
) -> tuple[float, float, float, float]:
    """Measured extents of the side-intersection region, margins included.

    Conic arcs bulge past the vertex hull, so the region is probed on a grid
    over a window well beyond the vertices; a region reaching the window rim
    (unbounded, or bulging beyond all reason) is a construction error.
    """
    us = [v.u for v in vertices]
    ws = [v.w for v in vertices]
    umax = max(abs(x) for x in us)
    w_lo, w_hi = min(ws), max(ws)
    span_w = max(w_hi - w_lo, 1.0)
    pm = 2.5 * (umax + 1.0)
    p0 = w_lo - (0.5 * span_w + 2.0)
    p1 = w_hi + (0.5 * span_w + 2.0)
    uu = np.linspace(-pm, pm, 301)
    ww = np.linspace(p0, p1, 301)
    U, W = np.meshgrid(uu, ww)
    feas = np.ones_like(U, dtype=bool)
    for t in triples:
        feas &= t.a * (U * U - W * W) + t.b1 * U - t.b2 * W + t.c <= 0.0
    if feas.any():
        rim_u = 2.0 * (pm / 300.0)
        rim_w = 2.0 * ((p1 - p0) / 300.0)
        rim = (
            (np.abs(U) > pm - rim_u) | (W < p0 + rim_w) | (W > p1 - rim_w)
        )
        if (feas & rim).any():
            raise LiftConstructionError(
                "the polygon region reaches the probe window rim; it is "
                "unbounded or bulges far beyond its vertices"
            )
        uext = float(np.abs(U[feas]).max())
        w_ext_lo = float(W[feas].min())
        w_ext_hi = float(W[feas].max())
        form_max = float((U[feas] ** 2 - W[feas] ** 2).max())
    else:
        uext, w_ext_lo, w_ext_hi = umax, w_lo, w_hi
        form_max = max(v.u * v.u - v.w * v.w for v in vertices)
    uext = max(uext, umax)
    w_ext_lo = min(w_ext_lo, w_lo)
    w_ext_hi = max(w_ext_hi, w_hi)
    span = w_ext_hi - w_ext_lo
    M = 1.25 * uext + 1.0
    t0 = w_ext_lo - (0.25 * span + 1.0)
    t1 = w_ext_hi + (0.25 * span + 1.0)
    r2 = 1.25 * max(0.0, form_max) + 1.0
    return M, t0, t1, r2


def lift_polygon(G: BoundaryPolygon) -> GoodPolytope:
    """Solid 3-dimensional polytope whose x0 = 0 trace is the polygon.

    Each side triple (a, b, c) lifts to the half-space with the same
    coefficients and no x0-linear part; a canonical box of good half-spaces
    (two vertical planes, two time-planes, one shell) bounds the solid.
    """
    triples = _oriented_triples(G)
    M, t0, t1, r2 = _region_extents(triples, G.vertices)

    facets: list[QuadricHalfSpace] = []
    seen: set[tuple[float, ...]] = set()

    def _push(H: QuadricHalfSpace) -> None:
        # two polygon sides may lie on the same conic (e.g. both branches of
        # one hyperbola); they lift to one facet, not two coincident ones
        N = normalize_halfspace(H)
        key = (N.a, *N.b.coords, N.c)
        if key not in seen:
            seen.add(key)
            facets.append(H)

    for t in triples:
        _push(halfspace(t.a, (0.0, t.b1, t.b2), t.c))
    _push(halfspace(0.0, (0.0, 1.0, 0.0), -M))
    _push(halfspace(0.0, (0.0, -1.0, 0.0), -M))
    _push(halfspace(0.0, (0.0, 0.0, 1.0), t0))
    _push(halfspace(0.0, (0.0, 0.0, -1.0), -t1))
    _push(halfspace(1.0, (0.0, 0.0, 0.0), -r2))
    x0 = math.sqrt(r2 + max(t0 * t0, t1 * t1)) * 1.05 + 0.5
    box = Box(lo=(-x0, -M - 0.5, t0 - 0.5), hi=(x0, M + 0.5, t1 + 0.5))
    return good_polytope(3, facets, box)


def boundary_volume_via_3d(G: BoundaryPolygon) -> BoundaryVolumeResult:
    """Boundary volume through the 3-dimensional lift: c_2 times the complex
    volume of the lifted solid, which is independent of the solid chosen."""
    P = lift_polygon(G)
    try:
        v = volume(P)
    except DecompositionRequiredError as exc:
        raise LiftConstructionError(
            f"the canonical lift escaped its certificate box: {exc}"
        ) from exc
    val = c2m(1) * v.value
    err = abs(c2m(1)) * v.abs_err + abs(val.imag)
    return BoundaryVolumeResult(val.real, "lift_3d", err)


# ---------------------------------------------------------------------------
# trace polygon of a 2-dimensional polytope and the correspondence


def _facet_conics(P2: GoodPolytope) -> list[ConicSide]:
    """Facets of an ambient-2 polytope as plane conics under (u, w) = (x0, x1)."""
    a, b, c = facet_arrays(P2)
    return [ConicSide(float(a[i]), 0.0, float(b[i][1]), float(c[i])) for i in range(len(a))]


def _line_conic_points(line: ConicSide, conic: ConicSide) -> list[PlaneVector]:
    """Intersection points of an affine line (a = 0) with a conic (or line)."""
    b1, b2, c0 = line.b1, line.b2, line.c
    n = math.hypot(b1, b2)
    if n <= 1e-14:
        return []
    # parameterize: base point p0 on the line, direction d with g_line == 0
    if abs(b1) >= abs(b2):
        p0 = plane_vector(-c0 / b1, 0.0)
    else:
        p0 = plane_vector(0.0, c0 / b2)
    d = plane_vector(b2, b1)  # b1*(b2) - b2*(b1) = 0 along this direction
    # conic restricted to p0 + s*d: quadratic in s
    qa = conic.a * (d.u * d.u - d.w * d.w)
    qb = 2.0 * conic.a * (p0.u * d.u - p0.w * d.w) + conic.b1 * d.u - conic.b2 * d.w
    qc = conic.value(p0)
    out = []
    if abs(qa) <= 1e-14 * max(abs(qb), 1.0):
        if abs(qb) > 1e-14:
            out.append(-qc / qb)
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            sq = math.sqrt(disc)
            out.extend([(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)])
    return [plane_vector(p0.u + s * d.u, p0.w + s * d.w) for s in out]


def _pair_intersections(ti: ConicSide, tj: ConicSide) -> list[PlaneVector]:
    """Common points of two side conics.

    All our conics share the quadratic part u^2 - w^2 up to the scalar a, so
    a_j*g_i - a_i*g_j is an affine line containing every common point; that
    line meets either conic in at most two points, found in closed form.
    """
    if abs(ti.a) <= 1e-14 and abs(tj.a) <= 1e-14:
        det = -ti.b1 * tj.b2 + tj.b1 * ti.b2
        if abs(det) <= 1e-14:
            return []
        # Cramer solve of b1*u - b2*w + c = 0 for both lines
        u = (ti.c * tj.b2 - tj.c * ti.b2) / det
        w = (ti.c * tj.b1 - tj.c * ti.b1) / det
        return [plane_vector(u, w)]
    line = ConicSide(
        0.0,
        tj.a * ti.b1 - ti.a * tj.b1,
        tj.a * ti.b2 - ti.a * tj.b2,
        tj.a * ti.c - ti.a * tj.c,
    )
    if math.hypot(line.b1, line.b2) <= 1e-12:
        return []
    target = ti if abs(ti.a) > 1e-14 else tj
    return _line_conic_points(line, target)


def _arc_midpoint(t: ConicSide, va: PlaneVector, vb: PlaneVector) -> PlaneVector | None:
    """Midpoint of the conic arc between two points on the conic t.

    Returns None when the points sit on different branches of a hyperbola
    (no arc joins them).  Straight sides (a = 0) use the chord midpoint.
    """
    if abs(t.a) <= 1e-14:
        return plane_vector(0.5 * (va.u + vb.u), 0.5 * (va.w + vb.w))
    cu = -t.b1 / (2.0 * t.a)
    cw = -t.b2 / (2.0 * t.a)
    disc = (t.b1 * t.b1 - t.b2 * t.b2 - 4.0 * t.a * t.c) / (4.0 * t.a * t.a)
    pa, qa_ = va.u - cu, va.w - cw
    pb, qb_ = vb.u - cu, vb.w - cw
    if disc > 0.0:
        # branches split by the sign of the space-like offset p
        if pa * pb <= 0.0:
            return None
        qm = 0.5 * (qa_ + qb_)
        pm = math.copysign(math.sqrt(disc + qm * qm), pa)
        return plane_vector(cu + pm, cw + qm)
    if disc < 0.0:
        # branches split by the sign of the time-like offset q
        if qa_ * qb_ <= 0.0:
            return None
        pm = 0.5 * (pa + pb)
        qm = math.copysign(math.sqrt(-disc + pm * pm), qa_)
        return plane_vector(cu + pm, cw + qm)
    return None


def _branch_params(t: ConicSide, v: PlaneVector) -> tuple[int, float]:
    """(branch id, monotone arc parameter) of a point on the conic t.

    Our conics are hyperbolas (or lines); each branch is a graph over one
    coordinate, giving a monotone parameter along the branch.
    """
    if abs(t.a) <= 1e-14:
        d = plane_vector(t.b2, t.b1)  # direction along the line
        return 0, v.u * d.u + v.w * d.w
    cu = -t.b1 / (2.0 * t.a)
    cw = -t.b2 / (2.0 * t.a)
    disc = (t.b1 * t.b1 - t.b2 * t.b2 - 4.0 * t.a * t.c) / (4.0 * t.a * t.a)
    if disc == 0.0:
        raise ConventionViolationError("degenerate facet conic in trace")
    if disc > 0.0:
        return (1 if v.u - cu > 0.0 else -1), v.w - cw
    return (1 if v.w - cw > 0.0 else -1), v.u - cu


def _arc_samples(
    t: ConicSide, va: PlaneVector, vb: PlaneVector, n: int = 5
) -> list[PlaneVector]:
    """Interior sample points of the conic arc joining va and vb (same branch)."""
    fractions = [(i + 1) / (n + 1) for i in range(n)]
    if abs(t.a) <= 1e-14:
        return [
            plane_vector(va.u + f * (vb.u - va.u), va.w + f * (vb.w - va.w))
            for f in fractions
        ]
    cu = -t.b1 / (2.0 * t.a)
    cw = -t.b2 / (2.0 * t.a)
    disc = (t.b1 * t.b1 - t.b2 * t.b2 - 4.0 * t.a * t.c) / (4.0 * t.a * t.a)
    out = []
    if disc > 0.0:
        qa_, qb_ = va.w - cw, vb.w - cw
        sgn = 1.0 if va.u - cu > 0.0 else -1.0
        for f in fractions:
            q = qa_ + f * (qb_ - qa_)
            out.append(plane_vector(cu + sgn * math.sqrt(disc + q * q), cw + q))
    else:
        pa, pb = va.u - cu, vb.u - cu
        sgn = 1.0 if va.w - cw > 0.0 else -1.0
        for f in fractions:
            p = pa + f * (pb - pa)
            out.append(plane_vector(cu + p, cw + sgn * math.sqrt(-disc + p * p)))
    return out


def trace_polygon(P2: GoodPolytope) -> BoundaryPolygon | None:
    """The region of an ambient-2 polytope as a polygon of the conformal plane.

    Vertices are the feasible pairwise intersections of the facet conics.
    For each facet conic, consecutive on-conic vertices along a branch are
    joined by an edge when the arc between them stays feasible; the polygon
    is the single closed walk of that edge graph.  Returns None for an empty
    region; raises ConventionViolationError when the trace boundary is not a
    single simple closed curve (e.g. a disconnected region).
    """
    conics = _facet_conics(P2)
    m = len(conics)
    cand: list[PlaneVector] = []
    for i in range(m):
        for j in range(i + 1, m):
            for p in _pair_intersections(conics[i], conics[j]):
                if all(t.value(p) <= 1e-9 * t.scale_at(p) for t in conics):
                    cand.append(p)
    # dedupe
    verts: list[PlaneVector] = []
    for p in cand:
        if all(math.hypot(p.u - q.u, p.w - q.w) > 1e-7 for q in verts):
            verts.append(p)
    if not verts:
        return None
    if len(verts) < 2:
        raise ConventionViolationError(
            "trace region has a single corner; not a polygon"
        )
    # boundary edges: consecutive on-conic vertices with a feasible arc between
    edges: list[tuple[int, int, ConicSide]] = []
    adj: dict[int, list[int]] = {i: [] for i in range(len(verts))}
    for t in conics:
        groups: dict[int, list[tuple[float, int]]] = {}
        for iv, v in enumerate(verts):
            if abs(t.value(v)) > 1e-7 * t.scale_at(v):
                continue
            branch, param = _branch_params(t, v)
            groups.setdefault(branch, []).append((param, iv))
        for members in groups.values():
            members.sort()
            for (pa, ia), (pb, ib) in zip(members, members[1:]):
                va, vb = verts[ia], verts[ib]
                if all(
                    all(s.value(z) <= 1e-7 * s.scale_at(z) for s in conics)
                    for z in _arc_samples(t, va, vb)
                ):
                    e = len(edges)
                    edges.append((ia, ib, t))
                    adj[ia].append(e)
                    adj[ib].append(e)
    bad = [i for i in range(len(verts)) if len(adj[i]) != 2]
    if bad:
        raise ConventionViolationError(
            f"trace boundary is not a simple closed curve (vertex degrees "
            f"{[len(adj[i]) for i in bad]} at {len(bad)} corner(s))"
        )
    # walk the cycle
    order = [0]
    side_idx = []
    prev_e = -1
    cur = 0
    while True:
        e = next(e for e in adj[cur] if e != prev_e)
        ia, ib, _ = edges[e]
        nxt = ib if ia == cur else ia
        side_idx.append(e)
        prev_e = e
        if nxt == 0:
            break
        order.append(nxt)
        cur = nxt
    if len(order) != len(verts):
        raise ConventionViolationError(
            f"trace region is disconnected ({len(verts)} corners, walk closed "
            f"after {len(order)}); not a single polygon"
        )
    return boundary_polygon(
        [verts[i] for i in order], [edges[e][2] for e in side_idx]
    )


def correspondence_check(P2: GoodPolytope) -> tuple[float, float]:
    """Boundary volume of an ambient-2 polytope against its solid volume.

    Returns (lhs, rhs): lhs is the polygon-formula volume of the region seen
    in the conformal plane under (u, w) = (x0, x1); rhs is minus the real
    complex volume of the polytope itself.  The two agree for good polytopes.
    """
    validate_good_polytope(P2, check_certificate=True)
    if P2.ambient_dim != 2:
        raise ValueError("correspondence_check needs an ambient-2 polytope")
    v2 = volume(P2)
    rhs = -v2.value.real
    G = trace_polygon(P2)
    if G is None:
        return (0.0, rhs)
    res = polygon_volume(G)
    return (res.value, rhs)


# ---------------------------------------------------------------------------
# conformal transports of polygons


def _apply_move_triple(move: tuple, t: ConicSide) -> ConicSide:
    kind = move[0]
    if kind == "translate":
        _, tu, tw = move
        qt = tu * tu - tw * tw
        pair = t.b1 * tu - t.b2 * tw
        return ConicSide(
            t.a,
            t.b1 - 2.0 * t.a * tu,
            t.b2 - 2.0 * t.a * tw,
            t.c - pair + t.a * qt,
        )
    if kind == "boost":
        _, chi = move
        ch, sh = math.cosh(chi), math.sinh(chi)
        return ConicSide(t.a, ch * t.b1 + sh * t.b2, sh * t.b1 + ch * t.b2, t.c)
    if kind == "scale":
        _, lam = move
        if lam <= 0.0:
            raise ValueError("conformal scale factor must be positive")
        return ConicSide(t.a, lam * t.b1, lam * t.b2, lam * lam * t.c)
    if kind == "invert":
        return ConicSide(t.c, t.b1, t.b2, t.a)
    raise ValueError(f"unknown conformal move {kind!r}")


def _apply_move_point(move: tuple, p: PlaneVector) -> PlaneVector:
    kind = move[0]
    if kind == "translate":
        _, tu, tw = move
        return plane_vector(p.u + tu, p.w + tw)
    if kind == "boost":
        _, chi = move
        ch, sh = math.cosh(chi), math.sinh(chi)
        return plane_vector(ch * p.u + sh * p.w, sh * p.u + ch * p.w)
    if kind == "scale":
        _, lam = move
        return plane_vector(lam * p.u, lam * p.w)
    if kind == "invert":
        q = plane_norm_sq(p)
        scale = p.u * p.u + p.w * p.w
        if abs(q) <= 1e-12 * max(scale, 1e-300):
            raise BoundaryPointError(
                f"inversion undefined at the light-like point ({p.u:g}, {p.w:g})"
            )
        return plane_vector(p.u / q, p.w / q)
    raise ValueError(f"unknown conformal move {kind!r}")


def _inversion_tear_check(verts: list[PlaneVector], triples: list[ConicSide]) -> None:
    """Reject an inversion that would tear the polygon through infinity.

    The inversion p -> p / (u^2 - w^2) sends the light cone {u = +-w} to
    infinity, so it maps the polygon to another polygon only when the region
    avoids the cone.  A bounded region meets a cone line iff its boundary
    does, and each side's restriction to a cone line is linear (the quadratic
    parts cancel on u = +-w), so the crossings are found in closed form.
    """
    k = len(verts)
    for i, t in enumerate(triples):
        va, vb = verts[i], verts[(i + 1) % k]
        span = max(abs(va.u), abs(va.w), abs(vb.u), abs(vb.w), 1.0)
        coeff_scale = abs(t.a) * span * span + (abs(t.b1) + abs(t.b2)) * span + 1.0
        for s in (1.0, -1.0):
            denom = t.b1 - s * t.b2
            if abs(denom) <= 1e-14 * (abs(t.b1) + abs(t.b2) + 1.0):
                if abs(t.c) <= 1e-12 * coeff_scale:
                    raise BoundaryPointError(
                        f"inversion undefined: side {i} lies along the light cone"
                    )
                continue  # restriction is a nonzero constant: no crossing
            x = -t.c / denom
            z = plane_vector(x, s * x)
            m = 1e-9
            if abs(t.a) <= 1e-14:
                du, dw = vb.u - va.u, vb.w - va.w
                nn = du * du + dw * dw
                lam = ((z.u - va.u) * du + (z.w - va.w) * dw) / nn
                on_arc = -m < lam < 1.0 + m
            else:
                cu = -t.b1 / (2.0 * t.a)
                cw = -t.b2 / (2.0 * t.a)
                disc = (t.b1 * t.b1 - t.b2 * t.b2 - 4.0 * t.a * t.c) / (
                    4.0 * t.a * t.a
                )
                if disc == 0.0:
                    raise BoundaryPointError(
                        f"inversion undefined: side {i} conic is degenerate"
                    )
                if disc > 0.0:
                    branch = (z.u - cu) * (va.u - cu) > 0.0
                    lo = min(va.w - cw, vb.w - cw)
                    hi = max(va.w - cw, vb.w - cw)
                    on_arc = branch and lo - m * span <= z.w - cw <= hi + m * span
                else:
                    branch = (z.w - cw) * (va.w - cw) > 0.0
                    lo = min(va.u - cu, vb.u - cu)
                    hi = max(va.u - cu, vb.u - cu)
                    on_arc = branch and lo - m * span <= z.u - cu <= hi + m * span
            if on_arc:
                raise BoundaryPointError(
                    f"inversion would tear the polygon: side {i} crosses the "
                    f"light cone near ({z.u:g}, {z.w:g})"
                )


def conformal_apply(G: BoundaryPolygon, moves: Iterable[tuple]) -> BoundaryPolygon:
    """Transport a polygon by a word of conformal moves, applied left to right.

    Moves: ("translate", du, dw), ("boost", chi), ("scale", lam), ("invert",).
    Straight sides are promoted to their line conics first, since inversions
    bend lines into genuine conics.  An inversion requires the polygon to
    avoid the light cone {u = +-w}; crossing it would tear the region
    through infinity, and is rejected with BoundaryPointError.
    """
    verts = list(G.vertices)
    triples = _polygon_triples(G)
    for move in moves:
        if move[0] == "invert":
            _inversion_tear_check(verts, triples)
        verts = [_apply_move_point(move, v) for v in verts]
        triples = [_apply_move_triple(move, t) for t in triples]
    return boundary_polygon(verts, triples)


# ---------------------------------------------------------------------------
# JSON io


def polygon_to_json(G: BoundaryPolygon) -> dict:
    sides = []
    for s in G.sides:
        if isinstance(s, SegmentSide):
            sides.append({"type": "segment"})
        else:
            sides.append({"type": "conic", "a": s.a, "b": [s.b1, s.b2], "c": s.c})
    return {"vertices": [[v.u, v.w] for v in G.vertices], "sides": sides}


def polygon_from_json(obj: dict) -> BoundaryPolygon:
    verts = [plane_vector(*v) for v in obj["vertices"]]
    sides: list[Side | None] = []
    for s in obj.get("sides", [None] * len(verts)):
        if s is None or s.get("type") == "segment":
            sides.append(SegmentSide())
        elif s.get("type") == "conic":
            b = s["b"]
            sides.append(ConicSide(float(s["a"]), float(b[0]), float(b[1]), float(s["c"])))
        else:
            raise ValueError(f"unknown side type {s.get('type')!r}")
    return boundary_polygon(verts, sides)
