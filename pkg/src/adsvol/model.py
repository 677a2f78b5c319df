"""The doubled anti-de Sitter model space and its good half-spaces.

The space is two copies of the x0 > 0 half of Minkowski space R^(n,1) (sheets
tagged h = +1 and h = -1) glued along the x0 = 0 boundary plane, carrying the
metric (Minkowski)/x0 on the first sheet and its negative on the second.  A
*good half-space* is cut out by one quadric inequality

    h(x) * (a*x.x + b.x + c) <= 0,     b with zero x0-component,

whose face is a sphere/pseudo-sphere centered on the boundary plane.  A good
polytope is a finite intersection of such half-spaces together with a box
certifying that its upper-sheet portion is bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundaryPointError, DecompositionRequiredError, DegenerateFacetError
from .minkowski import (
    NULL_TOL_FACTOR,
    MVector,
    Signature,
    lorentz,
    ads_quadric,
    mvector,
    raw_bilinear,
)

#: Relative margin used when testing feasibility of sampled points.
FEAS_TOL = 1e-9


class MetricClass(Enum):
    LORENTZIAN = "lorentzian"
    RIEMANNIAN = "riemannian"
    DEGENERATE = "degenerate"


class Orientation(Enum):
    TOP = "top"
    BOTTOM = "bottom"
    SIDE = "side"


@dataclass(frozen=True)
class SignedPoint:
    """A model-space point: Minkowski coordinates plus a sheet sign.

    h = +1 is the sheet carrying the positively-scaled metric, h = -1 the
    sheet carrying its negative; h = 0 tags points of the common boundary
    x0 = 0 where pointwise membership is not defined.
    """

    x: MVector
    h: int

    def __post_init__(self) -> None:
        if self.h not in (-1, 0, 1):
            raise ValueError(f"sheet sign must be -1, 0 or +1, got {self.h}")


@dataclass(frozen=True)
class QuadricHalfSpace:
    """One inequality h(x)*(a*x.x + b.x + c) <= 0 with b orthogonal to x0."""

    a: float
    b: MVector
    c: float

    def __post_init__(self) -> None:
        if abs(self.b[0]) > NULL_TOL_FACTOR * max(1.0, _eucl_sq(self.b.coords)):
            raise ValueError(f"facet b must have zero x0-component, got {self.b[0]}")

    @property
    def sig(self) -> Signature:
        return self.b.sig


def halfspace(a: float, b: Sequence[float], c: float, n: int | None = None) -> QuadricHalfSpace:
    """Convenience constructor; b given as a bare sequence in R^(n,1)."""
    bs = tuple(float(v) for v in b)
    if n is None:
        n = len(bs) - 1
    return QuadricHalfSpace(float(a), mvector(bs, lorentz(n)), float(c))


def _eucl_sq(coords: Sequence[float]) -> float:
    return sum(v * v for v in coords)


def q_value(H: QuadricHalfSpace, coords: Sequence[float]) -> float:
    """The defining quadric a*x.x + b.x + c at bare coordinates."""
    sig = H.b.sig
    return H.a * raw_bilinear(coords, coords, sig) + raw_bilinear(H.b.coords, coords, sig) + H.c


def discriminant(H: QuadricHalfSpace) -> float:
    """b.b - 4ac: positive for a Lorentzian face, negative for Riemannian."""
    return raw_bilinear(H.b.coords, H.b.coords, H.b.sig) - 4.0 * H.a * H.c


def _disc_tol(H: QuadricHalfSpace) -> float:
    scale = _eucl_sq(H.b.coords) + 4.0 * abs(H.a) * abs(H.c)
    return NULL_TOL_FACTOR * max(1.0, scale)


def metric_class(H: QuadricHalfSpace) -> MetricClass:
    d = discriminant(H)
    if abs(d) <= _disc_tol(H):
        return MetricClass.DEGENERATE
    return MetricClass.LORENTZIAN if d > 0.0 else MetricClass.RIEMANNIAN


def contains(H: QuadricHalfSpace, p: SignedPoint) -> bool:
    """Signed membership h * q(x) <= 0; undefined on the x0 = 0 boundary."""
    if p.h == 0:
        raise BoundaryPointError("membership is not defined pointwise on the boundary sheet")
    if p.x.sig != H.b.sig:
        raise ValueError(f"signature mismatch: point {p.x.sig} vs facet {H.b.sig}")
    return p.h * q_value(H, p.x.coords) <= 0.0


@dataclass(frozen=True)
class CenterRadius:
    v: MVector
    r: float
    cls: MetricClass


def center_radius(H: QuadricHalfSpace) -> CenterRadius:
    """Center (on x0 = 0) and radius of the face quadric (x-v).(x-v) = D/(4a^2).

    Side planes (a = 0) have no center.
    """
    if H.a == 0.0:
        raise ValueError("side plane (a = 0) has no center/radius")
    v = tuple(-bi / (2.0 * H.a) for bi in H.b.coords)
    d = discriminant(H)
    r = math.sqrt(abs(d)) / (2.0 * abs(H.a))
    return CenterRadius(mvector(v, H.b.sig), r, metric_class(H))


def face_orientation(H: QuadricHalfSpace) -> Orientation:
    """Whether the half-space sits above its face (top), below it (bottom),
    or is a vertical side plane.

    On the upper sheet, moving a face point straight toward x0 = 0 lowers
    a*x0^2, so for a > 0 the region q <= 0 continues *below* the face — the
    face is the top of the half-space — and symmetrically for a < 0.
    """
    if H.a > 0.0:
        return Orientation.TOP
    if H.a < 0.0:
        return Orientation.BOTTOM
    return Orientation.SIDE


def embed_to_hyperboloid(p: SignedPoint) -> tuple[MVector, int]:
    """Isometric embedding into the unit pseudo-sphere y.y = -1 of R^(n,2).

    Maps (x, h) with x0 != 0 to
        y0 = (1 - x.x)/(2 x0),  y_i = -x_i/x0 (1 <= i <= n),
        y_(n+1) = (1 + x.x)/(2 x0),
    with component sign ell = sgn(x0) * h.
    """
    x = p.x
    n = x.sig.dim - 1
    x0 = x[0]
    if abs(x0) <= NULL_TOL_FACTOR * max(1.0, _eucl_sq(x.coords)):
        raise BoundaryPointError("x0 = 0 lies on the boundary at infinity; no embedding")
    if p.h == 0:
        raise BoundaryPointError("boundary sheet sign h = 0 cannot be embedded")
    xsq = raw_bilinear(x.coords, x.coords, x.sig)
    y = [(1.0 - xsq) / (2.0 * x0)]
    y.extend(-x[i] / x0 for i in range(1, n + 1))
    y.append((1.0 + xsq) / (2.0 * x0))
    ell = (1 if x0 > 0 else -1) * p.h
    return mvector(y, ads_quadric(n)), ell


def normalize_halfspace(H: QuadricHalfSpace) -> QuadricHalfSpace:
    """Scale-canonical representative: divide by |largest coefficient|.

    Only positive scalings preserve the inequality, so signs are kept.
    """
    mags = [abs(H.a), *(abs(v) for v in H.b.coords), abs(H.c)]
    m = max(mags)
    if m == 0.0:
        raise DegenerateFacetError("zero facet (a=0, b=0, c=0) is not a half-space")
    return QuadricHalfSpace(H.a / m, mvector([v / m for v in H.b.coords], H.b.sig), H.c / m)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in Minkowski coordinates (x0 first)."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("box min/max dimension mismatch")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box must have positive extent in every coordinate")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def center(self) -> tuple[float, ...]:
        return tuple(0.5 * (l + h) for l, h in zip(self.lo, self.hi))

    def widths(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    def mirrored(self) -> "Box":
        """The image of the box under x -> -x."""
        return Box(tuple(-h for h in self.hi), tuple(-l for l in self.lo))


@dataclass(frozen=True)
class GoodPolytope:
    """Finite intersection of good half-spaces, with a boundedness box."""

    ambient_dim: int
    facets: tuple[QuadricHalfSpace, ...]
    bound_box: Box | None = None


def good_polytope(
    ambient_dim: int,
    facets: Iterable[QuadricHalfSpace],
    bound_box: Box | None = None,
) -> GoodPolytope:
    return GoodPolytope(int(ambient_dim), tuple(facets), bound_box)


def facet_arrays(P: GoodPolytope) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(a, b, c) of all facets as numpy arrays, b with shape (m, dim)."""
    a = np.array([H.a for H in P.facets], dtype=float)
    b = np.array([H.b.coords for H in P.facets], dtype=float)
    c = np.array([H.c for H in P.facets], dtype=float)
    if b.size == 0:
        b = b.reshape(0, P.ambient_dim)
    return a, b, c


def feasible_mask(P: GoodPolytope, pts: np.ndarray, slack: float = 0.0) -> np.ndarray:
    """Vectorized upper-sheet membership q_i(x) <= slack for rows of pts."""
    a, b, c = facet_arrays(P)
    n = P.ambient_dim - 1
    signs = np.ones(P.ambient_dim)
    signs[n] = -1.0
    xsq = (pts * pts * signs).sum(axis=1)
    ok = np.ones(len(pts), dtype=bool)
    for i in range(len(a)):
        q = a[i] * xsq + pts @ (b[i] * signs) + c[i]
        ok &= q <= slack
    return ok


def _box_shell_points(box: Box, scale: float, per_face: int) -> np.ndarray:
    """Deterministic grid on the boundary of the box scaled about its center."""
    ctr = np.array(box.center())
    half = 0.5 * np.array(box.widths()) * scale
    dim = box.dim
    lin = [np.linspace(-1.0, 1.0, per_face) for _ in range(dim)]
    pts = []
    for axis in range(dim):
        rest = [lin[i] for i in range(dim) if i != axis]
        grid = np.meshgrid(*rest, indexing="ij") if rest else []
        flat = [g.ravel() for g in grid]
        count = flat[0].size if flat else 1
        for side in (-1.0, 1.0):
            face = np.empty((count, dim))
            face[:, axis] = side
            k = 0
            for i in range(dim):
                if i != axis:
                    face[:, i] = flat[k]
                    k += 1
            pts.append(face)
    cube = np.vstack(pts)
    return ctr + cube * half


def check_bound_certificate(P: GoodPolytope, per_face: int = 17) -> None:
    """Verify the declared box by rejection sampling outside it.

    Sweeps deterministic grids over box boundaries inflated by factors just
    above 1 up to 3x; a feasible upper-sheet point strictly outside the box
    disproves the certificate.  Sampling can miss thin protrusions, so a pass
    is evidence, not proof.
    """
    if P.bound_box is None:
        raise DecompositionRequiredError("polytope has no bound_box certificate")
    box = P.bound_box
    for scale in (1.000001, 1.05, 1.25, 1.8, 3.0):
        pts = _box_shell_points(box, scale, per_face)
        bad = feasible_mask(P, pts, slack=-FEAS_TOL * scale)
        if bad.any():
            idx = int(np.argmax(bad))
            raise _cert_error(pts[idx])
    # long probes along each axis, far beyond the box
    ctr = np.array(box.center())
    half = 0.5 * np.array(box.widths())
    probes = []
    for axis in range(box.dim):
        for side in (-1.0, 1.0):
            for factor in (6.0, 20.0, 100.0):
                p = ctr.copy()
                p[axis] += side * factor * half[axis]
                probes.append(p)
    probes = np.array(probes)
    bad = feasible_mask(P, probes, slack=-FEAS_TOL)
    if bad.any():
        idx = int(np.argmax(bad))
        raise _cert_error(probes[idx])


def _cert_error(point: np.ndarray) -> DecompositionRequiredError:
    return DecompositionRequiredError(
        "bound_box certificate failed: feasible upper-sheet point outside the box at "
        + np.array2string(point, precision=6)
    )


def validate_good_polytope(P: GoodPolytope, check_certificate: bool = False) -> None:
    """Structural validation; raises DegenerateFacetError / ValueError.

    With check_certificate=True (and a bound_box present) also runs the
    sampling-based boundedness check.
    """
    if P.ambient_dim < 2:
        raise ValueError("ambient dimension must be at least 2")
    if not P.facets:
        raise ValueError("empty facet list is not a polytope")
    for i, H in enumerate(P.facets):
        if H.b.sig.dim != P.ambient_dim:
            raise ValueError(f"facet {i} lives in dimension {H.b.sig.dim}, expected {P.ambient_dim}")
        if metric_class(H) is MetricClass.DEGENERATE:
            raise DegenerateFacetError(
                f"facet {i} (a={H.a:g}, b={list(H.b.coords)}, c={H.c:g}) has a light-cone-"
                f"tangent face (discriminant {discriminant(H):.3g}); its volume density is "
                "non-integrable and the regularized volume does not exist"
            )
    seen: dict[tuple[float, ...], int] = {}
    for i, H in enumerate(P.facets):
        N = normalize_halfspace(H)
        key = (N.a, *N.b.coords, N.c)
        neg = tuple(-v for v in key)
        for k in (key, neg):
            if k in seen:
                raise DegenerateFacetError(
                    f"facets {seen[k]} and {i} lie on the same quadric locus; the "
                    "per-facet face decomposition double-counts coincident faces"
                )
        seen[key] = i
    if P.bound_box is not None and P.bound_box.dim != P.ambient_dim:
        raise ValueError("bound_box dimension does not match ambient_dim")
    if check_certificate:
        check_bound_certificate(P)


# ---------------------------------------------------------------------------
# JSON wire format


def halfspace_to_json(H: QuadricHalfSpace) -> dict:
    return {"a": H.a, "b": list(H.b.coords), "c": H.c}


def halfspace_from_json(obj: dict, ambient_dim: int) -> QuadricHalfSpace:
    b = obj["b"]
    if len(b) != ambient_dim:
        raise ValueError(f"facet b has {len(b)} components, expected {ambient_dim}")
    return halfspace(obj["a"], b, obj["c"])


def polytope_to_json(P: GoodPolytope) -> dict:
    out: dict = {
        "ambient_dim": P.ambient_dim,
        "facets": [halfspace_to_json(H) for H in P.facets],
    }
    if P.bound_box is not None:
        out["bound_box"] = {"min": list(P.bound_box.lo), "max": list(P.bound_box.hi)}
    return out


def polytope_from_json(obj: dict) -> GoodPolytope:
    try:
        dim = int(obj["ambient_dim"])
        facets = [halfspace_from_json(f, dim) for f in obj["facets"]]
        box = None
        if obj.get("bound_box") is not None:
            bb = obj["bound_box"]
            box = Box(tuple(float(v) for v in bb["min"]), tuple(float(v) for v in bb["max"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed polytope JSON: {exc}") from exc
    return GoodPolytope(dim, tuple(facets), box)
