"""Slice-and-integrate volume engine for good polytopes.

The regularized volume of a region U on the upper sheet is

    mu(U) = lim_{eps->0+}  integral dx0..dxn / (x0 - i*eps)^(n+1),

and the volume of a good polytope P adds the upper-sheet portion and the
lower-sheet portion carried back to the upper sheet by the antipodal map.
Slicing by the last (time-like) coordinate t reduces mu to a 1-dimensional
integral of

    b(t) = -(1/n) * sum over top/bottom faces of the slice of
           (+-1/r_F) * V_(n-1)(face),

where every slice face lies on a circle (ambient 3) or point pair (ambient 2)
centered on the x0 = 0 axis, and V_(n-1) has a closed form: hyperbolic arc
lengths plus i*pi per transversal light-cone crossing, i.e. the doubled
1-dimensional space's complex volume.  b is integrated between breakpoints of
the slice arrangement with inverse-square-root endpoint care.

Everything here is deterministic: no randomness enters the slicing route.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BreakpointError,
    DecompositionRequiredError,
    IllConditionedArcError,
)
from .minkowski import lorentz, mvector
from .model import (
    Box,
    GoodPolytope,
    Orientation,
    QuadricHalfSpace,
    check_bound_certificate,
    face_orientation,
    feasible_mask,
    validate_good_polytope,
)

#: Default relative tolerance of the adaptive t-quadrature.
REL_TOL_DEFAULT = 1e-8
#: Number of t-samples scanned for combinatorial-type changes.
SIGNATURE_SAMPLES = 2048
#: Width to which a detected type change is bisected.
BISECT_TOL = 1e-10
#: Membership slack for arc/point feasibility tests in a slice.
ARC_MEMBERSHIP_TOL = 1e-10
#: |cos(phi)| below which an arc endpoint counts as sitting on a crossing.
ENDPOINT_CROSSING_TOL = 1e-12
#: Gauss-Legendre panel order of the adaptive quadrature.
GAUSS_ORDER = 15
#: Hard cap on adaptive panels per interval (error is reported, not hidden).
MAX_PANELS = 16384

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(GAUSS_ORDER)

KIND_NONE = "none"
KIND_INV_SQRT = "inverse_sqrt"


@dataclass(frozen=True)
class FaceSlice:
    """One top/bottom facet's trace in the slice x_n = t.

    In ambient 3 the trace is a circle of radius r_f centered on the x0 = 0
    axis and `arcs` lists its feasible angular intervals, parameterized by
    (x0, x1) = (r_f cos(phi), center_x1 + r_f sin(phi)) with lo < hi.
    In ambient 2 the trace is the point pair x0 = +-r_f and `point_signs`
    lists which of the two points (+1, -1) belong to the polytope.
    """

    facet_id: int
    r_f: float
    center: tuple[float, ...]
    orientation: Orientation
    arcs: tuple[tuple[float, float], ...] = ()
    point_signs: tuple[int, ...] = ()


@dataclass(frozen=True)
class Breakpoint:
    t: float
    kind: str = KIND_NONE  # KIND_NONE or KIND_INV_SQRT


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_kind: str
    hi_kind: str


@dataclass(frozen=True)
class SlicePlan:
    breakpoints: tuple[Breakpoint, ...]
    intervals: tuple[Interval, ...]


@dataclass(frozen=True)
class ComplexVolume:
    value: complex
    abs_err: float


@dataclass
class VolumeDetail:
    """Extras surfaced to the CLI: plans per sheet and evaluation count."""

    plans: list[SlicePlan] = field(default_factory=list)
    evals: int = 0


def map_lower_sheet(P: GoodPolytope) -> GoodPolytope:
    """Carry the lower-sheet portion to the upper sheet via x -> -x.

    A point (x, -1) lies in the half-space iff q(x) >= 0; its antipode
    (-x, +1) then satisfies -a*x.x + b.x - c <= 0, i.e. the transported
    facet triple is (-a, b, -c).  The bounding box mirrors accordingly.
    """
    facets = tuple(
        QuadricHalfSpace(-H.a, H.b, -H.c) for H in P.facets
    )
    box = P.bound_box.mirrored() if P.bound_box is not None else None
    return GoodPolytope(P.ambient_dim, facets, box)


# ---------------------------------------------------------------------------
# Slice geometry


class _SliceGeometry:
    """Precomputed per-facet coefficients for slicing along the last axis.

    For a facet a*x.x + b.x + c <= 0 the slice x_n = t sees
        a*(x0^2 + |x_sp|^2) + b_sp . x_sp + k(t) <= 0,
        k(t) = -a t^2 - b_n t + c,
    and for a != 0 the face circle has squared radius
        r_f(t)^2 = D/(4a^2) + (t - v_n)^2,
    which is where Riemannian faces (D < 0) are born/die at |t - v_n| = r.
    """

    def __init__(self, P: GoodPolytope):
        self.P = P
        self.dim = P.ambient_dim
        self.n = P.ambient_dim - 1
        self.a = [H.a for H in P.facets]
        self.c = [H.c for H in P.facets]
        self.b_time = [H.b[self.n] for H in P.facets]
        # spatial part of b excluding x0 (only meaningful for ambient 3)
        self.b1 = [H.b[1] if self.dim >= 3 else 0.0 for H in P.facets]
        self.orient = [face_orientation(H) for H in P.facets]
        from .model import discriminant

        self.disc = [discriminant(H) for H in P.facets]

    def k(self, i: int, t: float) -> float:
        return -self.a[i] * t * t - self.b_time[i] * t + self.c[i]

    def r_sq(self, i: int, t: float) -> float:
        a = self.a[i]
        vt = -self.b_time[i] / (2.0 * a)
        return self.disc[i] / (4.0 * a * a) + (t - vt) * (t - vt)


def _feas_tol(scale: float) -> float:
    return ARC_MEMBERSHIP_TOL * max(1.0, scale)


def _slice_q(geo: _SliceGeometry, j: int, x0: float, x1: float, t: float) -> tuple[float, float]:
    """(value, scale) of facet j's slice quadric at (x0, x1)."""
    rho_sq = x0 * x0 + x1 * x1
    kj = geo.k(j, t)
    val = geo.a[j] * rho_sq + geo.b1[j] * x1 + kj
    scale = abs(geo.a[j]) * rho_sq + abs(geo.b1[j]) * abs(x1) + abs(kj)
    return val, scale


def _arc_feasible(geo: _SliceGeometry, i: int, w: float, r: float, lo: float, hi: float, t: float) -> bool:
    """Midpoint membership test of an arc of facet i's circle, re-sampled at
    the third-points when the midpoint value ties with the tolerance."""
    fractions = (0.5,)
    for attempt in range(2):
        ok = True
        ambiguous = False
        for f in fractions:
            phi = lo + f * (hi - lo)
            x0 = r * math.cos(phi)
            x1 = w + r * math.sin(phi)
            for j in range(len(geo.a)):
                if j == i:
                    continue
                val, scale = _slice_q(geo, j, x0, x1, t)
                tol = _feas_tol(scale)
                if val > tol:
                    return False
                if abs(val) <= tol:
                    ambiguous = True
        if not ambiguous or attempt == 1:
            return ok
        fractions = (1.0 / 3.0, 0.5, 2.0 / 3.0)
    return True


def _point_feasible(geo: _SliceGeometry, i: int, x0: float, t: float) -> bool:
    for j in range(len(geo.a)):
        if j == i:
            continue
        kj = geo.k(j, t)
        val = geo.a[j] * x0 * x0 + kj
        tol = _feas_tol(abs(geo.a[j]) * x0 * x0 + abs(kj))
        if val > tol:
            return False
    return True


def _slice_faces_geo(geo: _SliceGeometry, t: float) -> list[FaceSlice]:
    dim = geo.dim
    m = len(geo.a)
    # global (pure-time) side constraints make the whole slice empty
    for j in range(m):
        if geo.a[j] == 0.0 and geo.b1[j] == 0.0:
            if geo.k(j, t) > 0.0:
                return []
    if dim == 2:
        return _slice_faces_2d(geo, t)
    return _slice_faces_3d(geo, t)


def _slice_faces_2d(geo: _SliceGeometry, t: float) -> list[FaceSlice]:
    out: list[FaceSlice] = []
    for i in range(len(geo.a)):
        a = geo.a[i]
        if a == 0.0:
            continue
        r_sq = -geo.k(i, t) / a
        if r_sq <= 0.0:
            if a > 0.0 and r_sq < 0.0:
                return []  # this facet's disk constraint is empty at t
            continue
        r = math.sqrt(r_sq)
        signs = tuple(s for s in (1, -1) if _point_feasible(geo, i, s * r, t))
        if signs:
            out.append(
                FaceSlice(
                    facet_id=i,
                    r_f=r,
                    center=(0.0, t),
                    orientation=geo.orient[i],
                    point_signs=signs,
                )
            )
    return out


def _slice_faces_3d(geo: _SliceGeometry, t: float) -> list[FaceSlice]:
    m = len(geo.a)
    # circles: (index, w, r); lines: (index, direction, threshold)
    circles: dict[int, tuple[float, float]] = {}
    lines: dict[int, tuple[float, float]] = {}
    for j in range(m):
        a = geo.a[j]
        if a != 0.0:
            w = -geo.b1[j] / (2.0 * a)
            r_sq = w * w - geo.k(j, t) / a
            if r_sq <= 0.0:
                if a > 0.0:
                    if r_sq < 0.0:
                        return []  # empty disk constraint kills the slice
                    continue  # point circle: breakpoint territory, no face
                continue  # a < 0 with empty excluded disk: constraint inert
            circles[j] = (w, math.sqrt(r_sq))
        elif geo.b1[j] != 0.0:
            lines[j] = (geo.b1[j], -geo.k(j, t) / geo.b1[j])

    out: list[FaceSlice] = []
    for i, (w, r) in circles.items():
        cuts: list[float] = []
        for j, (wj, rj) in circles.items():
            if j == i:
                continue
            dw = wj - w
            if dw == 0.0:
                continue  # concentric circles never cross transversally
            x1 = (r * r - rj * rj - w * w + wj * wj) / (2.0 * dw)
            x0_sq = r * r - (x1 - w) * (x1 - w)
            if x0_sq > 0.0:
                x0 = math.sqrt(x0_sq)
                cuts.append(math.atan2(x1 - w, x0))
                cuts.append(math.atan2(x1 - w, -x0))
        for j, (_, ell) in lines.items():
            x0_sq = r * r - (ell - w) * (ell - w)
            if x0_sq > 0.0:
                x0 = math.sqrt(x0_sq)
                cuts.append(math.atan2(ell - w, x0))
                cuts.append(math.atan2(ell - w, -x0))

        arcs: list[tuple[float, float]] = []
        if not cuts:
            probe = 0.25
            if _arc_feasible(geo, i, w, r, probe, probe + 2.0 * math.pi, t):
                arcs.append((probe, probe + 2.0 * math.pi))
        else:
            angles = sorted(a % (2.0 * math.pi) for a in cuts)
            dedup: list[float] = []
            for a in angles:
                if not dedup or a - dedup[-1] > 1e-11:
                    dedup.append(a)
            if len(dedup) > 1 and (dedup[0] + 2.0 * math.pi) - dedup[-1] <= 1e-11:
                dedup.pop()
            for kk in range(len(dedup)):
                lo = dedup[kk]
                hi = dedup[kk + 1] if kk + 1 < len(dedup) else dedup[0] + 2.0 * math.pi
                if hi - lo <= 1e-11:
                    continue
                if _arc_feasible(geo, i, w, r, lo, hi, t):
                    arcs.append((lo, hi))
        if arcs:
            out.append(
                FaceSlice(
                    facet_id=i,
                    r_f=r,
                    center=(0.0, w, t),
                    orientation=geo.orient[i],
                    arcs=tuple(arcs),
                )
            )
    return out


def slice_faces(P: GoodPolytope, t: float) -> list[FaceSlice]:
    """Top/bottom face traces of the slice x_n = t (ambient 2 or 3 only).

    The input t must avoid breakpoints; slicing exactly at a structural
    event raises BreakpointError.
    """
    if P.ambient_dim not in (2, 3):
        raise ValueError("exact slice decomposition only covers ambient dimensions 2 and 3")
    geo = _SliceGeometry(P)
    _check_not_breakpoint(geo, t)
    return _slice_faces_geo(geo, t)


def _analytic_events(geo: _SliceGeometry) -> list[float]:
    """t values where a face circle degenerates to a point (r_f = 0)."""
    events = []
    for i in range(len(geo.a)):
        a = geo.a[i]
        if a == 0.0 or geo.disc[i] >= 0.0:
            continue
        vt = -geo.b_time[i] / (2.0 * a)
        r = math.sqrt(-geo.disc[i]) / (2.0 * abs(a))
        events.extend((vt - r, vt + r))
    return events


def _check_not_breakpoint(geo: _SliceGeometry, t: float) -> None:
    for e in _analytic_events(geo):
        if abs(t - e) < 1e-12 * max(1.0, abs(e)):
            raise BreakpointError(
                f"t = {t:.15g} is a structural breakpoint (face birth/death at {e:.15g}); "
                "re-plan the slice"
            )


# ---------------------------------------------------------------------------
# Closed-form 1-dimensional face volumes


def _antideriv(phi: float) -> float:
    """Antiderivative of 1/cos on each smooth piece: ln|tan(phi/2 + pi/4)|."""
    return math.log(abs(math.tan(0.5 * phi + 0.25 * math.pi)))


def _count_crossings(lo: float, hi: float) -> int:
    """Odd multiples of pi/2 strictly inside (lo, hi)."""
    k_lo = math.floor((lo / math.pi) - 0.5)
    k_hi = math.floor((hi / math.pi) - 0.5)
    return k_hi - k_lo


def face_volume_dh1(fs: FaceSlice) -> complex:
    """Complex 1-volume of a doubled-hyperbolic-line face (ambient 3 slices).

    Per arc: the signed hyperbolic length (antiderivative of d(phi)/cos(phi),
    positive where x0 > 0, negative where x0 < 0) plus i*pi for every
    transversal crossing of x0 = 0 in the arc's interior.  The closed form is
    pinned against direct epsilon-quadrature in the test suite.
    """
    if not fs.arcs:
        raise ValueError("face slice carries no arcs (ambient-2 slices have point faces)")
    total = 0.0 + 0.0j
    for lo, hi in fs.arcs:
        for endpoint in (lo, hi):
            if abs(math.cos(endpoint)) < ENDPOINT_CROSSING_TOL:
                raise IllConditionedArcError(
                    f"arc endpoint phi = {endpoint:.15g} sits on a light-cone crossing"
                )
        total += complex(
            _antideriv(hi) - _antideriv(lo),
            math.pi * _count_crossings(lo, hi),
        )
    return total


def _integrand_b_geo(geo: _SliceGeometry, t: float, faces: list[FaceSlice] | None = None) -> complex:
    if faces is None:
        faces = _slice_faces_geo(geo, t)
    n = geo.n
    total = 0.0 + 0.0j
    for fs in faces:
        sgn = 1.0 if fs.orientation is Orientation.TOP else -1.0
        if geo.dim == 3:
            v = face_volume_dh1(fs)
        else:
            v = complex(len(fs.point_signs), 0.0)
        total += sgn * v / fs.r_f
    return -total / n


def integrand_b(P: GoodPolytope, t: float) -> complex:
    """The slicing integrand b(t); mu of the upper-sheet portion is its
    integral over the t-range."""
    if P.ambient_dim not in (2, 3):
        raise ValueError("exact slice decomposition only covers ambient dimensions 2 and 3")
    geo = _SliceGeometry(P)
    _check_not_breakpoint(geo, t)
    return _integrand_b_geo(geo, t)


# ---------------------------------------------------------------------------
# Breakpoints


def _t_range(geo: _SliceGeometry) -> tuple[float, float]:
    P = geo.P
    if P.bound_box is None:
        raise DecompositionRequiredError("volume integration requires a bound_box certificate")
    t0 = P.bound_box.lo[-1]
    t1 = P.bound_box.hi[-1]
    for j in range(len(geo.a)):
        if geo.a[j] == 0.0 and geo.b1[j] == 0.0:
            bt = geo.b_time[j]
            if bt == 0.0:
                continue
            bound = geo.c[j] / bt
            if bt > 0.0:
                t0 = max(t0, bound)
            else:
                t1 = min(t1, bound)
    return t0, t1


def _signature(geo: _SliceGeometry, t: float):
    try:
        faces = _slice_faces_geo(geo, t)
    except (IllConditionedArcError, BreakpointError):
        return ("ill-conditioned",)
    sig = []
    for fs in faces:
        crossings = sum(_count_crossings(lo, hi) for lo, hi in fs.arcs)
        sig.append((fs.facet_id, len(fs.arcs), crossings, len(fs.point_signs)))
    return tuple(sig)


def breakpoints(P: GoodPolytope) -> SlicePlan:
    """Detect structural t-events: analytic face births/deaths plus scanned
    combinatorial-type changes, bisected to BISECT_TOL."""
    if P.ambient_dim not in (2, 3):
        raise ValueError("exact slice decomposition only covers ambient dimensions 2 and 3")
    geo = _SliceGeometry(P)
    t0, t1 = _t_range(geo)
    if not (t1 > t0):
        return SlicePlan((), ())

    events: dict[float, str] = {}

    def note(t: float, kind: str) -> None:
        for known in list(events):
            if abs(known - t) <= 1e-9 * max(1.0, abs(t)):
                if kind == KIND_INV_SQRT:
                    events[known] = KIND_INV_SQRT
                return
        events[t] = kind

    note(t0, KIND_NONE)
    note(t1, KIND_NONE)
    for e in _analytic_events(geo):
        if t0 - 1e-9 <= e <= t1 + 1e-9:
            note(min(max(e, t0), t1), KIND_INV_SQRT)

    # scan for remaining combinatorial changes
    ts = np.linspace(t0, t1, SIGNATURE_SAMPLES + 2)[1:-1]
    sigs = [_signature(geo, float(t)) for t in ts]
    for k in range(len(ts) - 1):
        if sigs[k] == sigs[k + 1]:
            continue
        lo, hi = float(ts[k]), float(ts[k + 1])
        s_lo = sigs[k]
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if _signature(geo, mid) == s_lo:
                lo = mid
            else:
                hi = mid
        note(0.5 * (lo + hi), KIND_NONE)

    bps = tuple(Breakpoint(t, events[t]) for t in sorted(events))
    intervals = tuple(
        Interval(bps[i].t, bps[i + 1].t, bps[i].kind, bps[i + 1].kind)
        for i in range(len(bps) - 1)
        if bps[i + 1].t - bps[i].t > 1e-12
    )
    return SlicePlan(bps, intervals)


# ---------------------------------------------------------------------------
# Adaptive quadrature


def _gauss_panel(f: Callable[[float], complex], lo: float, hi: float) -> complex:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    acc = 0.0 + 0.0j
    for x, wgt in zip(_GAUSS_X, _GAUSS_W):
        acc += wgt * f(mid + half * x)
    return acc * half


def _adaptive(f: Callable[[float], complex], lo: float, hi: float, abs_tol: float) -> tuple[complex, float]:
    """Bisection-adaptive Gauss-Legendre with whole-vs-halves error control.

    The reported error is floored at the roundoff level of the panel sum:
    a float64 quadrature cannot be more accurate than machine epsilon times
    the accumulated panel magnitude, even when whole-vs-halves agree better.
    """
    total = 0.0 + 0.0j
    err = 0.0
    l1_mass = 0.0
    panels = 0
    stack = [(lo, hi, _gauss_panel(f, lo, hi), abs_tol)]
    while stack:
        a, b, coarse, tol = stack.pop()
        mid = 0.5 * (a + b)
        left = _gauss_panel(f, a, mid)
        right = _gauss_panel(f, mid, b)
        fine = left + right
        delta = abs(fine - coarse)
        panels += 1
        if delta <= tol or (b - a) < 1e-13 * max(1.0, abs(lo) + abs(hi)) or panels > MAX_PANELS:
            total += fine
            err += delta
            l1_mass += abs(fine)
        else:
            stack.append((a, mid, left, 0.5 * tol))
            stack.append((mid, b, right, 0.5 * tol))
    return total, max(err, 4.0 * sys.float_info.epsilon * l1_mass)


def _integrate_interval(
    eval_b: Callable[[float], complex],
    iv: Interval,
    abs_tol: float,
) -> tuple[complex, float]:
    """Integrate over one open interval, substituting t = end -+ u^2 at
    inverse-square-root endpoints so the Gauss nodes see a smooth integrand."""
    lo, hi, lk, hk = iv.lo, iv.hi, iv.lo_kind, iv.hi_kind
    if lk == KIND_INV_SQRT and hk == KIND_INV_SQRT:
        mid = 0.5 * (lo + hi)
        v1, e1 = _integrate_interval(eval_b, Interval(lo, mid, lk, KIND_NONE), 0.5 * abs_tol)
        v2, e2 = _integrate_interval(eval_b, Interval(mid, hi, KIND_NONE, hk), 0.5 * abs_tol)
        return v1 + v2, e1 + e2
    if lk == KIND_INV_SQRT:
        span = hi - lo

        def g(u: float) -> complex:
            return eval_b(lo + u * u) * 2.0 * u

        return _adaptive(g, 0.0, math.sqrt(span), abs_tol)
    if hk == KIND_INV_SQRT:
        span = hi - lo

        def g(u: float) -> complex:
            return eval_b(hi - u * u) * 2.0 * u

        return _adaptive(g, 0.0, math.sqrt(span), abs_tol)
    return _adaptive(eval_b, lo, hi, abs_tol)


DiagCallback = Callable[[str, float, complex, dict[int, float]], None]


def _mu_upper(
    P: GoodPolytope,
    rel_tol: float,
    diag: DiagCallback | None = None,
    sheet_label: str = "upper",
    detail: VolumeDetail | None = None,
) -> tuple[complex, float]:
    """mu of the upper-sheet portion of P by slicing; P must carry its box."""
    geo = _SliceGeometry(P)
    plan = breakpoints(P)
    if detail is not None:
        detail.plans.append(plan)
    if not plan.intervals:
        return 0.0 + 0.0j, 0.0

    evals = [0]

    def eval_b(t: float) -> complex:
        faces = _slice_faces_geo(geo, t)
        value = _integrand_b_geo(geo, t, faces)
        evals[0] += 1
        if diag is not None:
            diag(sheet_label, t, value, {fs.facet_id: fs.r_f for fs in faces})
        return value

    # coarse pass sets the absolute budget for the refinement pass
    coarse = [abs(_gauss_panel(eval_b, iv.lo, iv.hi)) for iv in plan.intervals]
    scale = sum(coarse)
    abs_tol_total = rel_tol * max(scale, 1e-9)
    total_len = sum(iv.hi - iv.lo for iv in plan.intervals)

    total = 0.0 + 0.0j
    err = 0.0
    for iv, _ in zip(plan.intervals, coarse):
        tol_iv = abs_tol_total * (iv.hi - iv.lo) / total_len
        v, e = _integrate_interval(eval_b, iv, max(tol_iv, 1e-16))
        total += v
        err += e
    if detail is not None:
        detail.evals += evals[0]
    return total, err


def _lower_portion_empty(Pm: GoodPolytope) -> bool:
    """Deterministic scan for any feasible point of the transported
    lower-sheet portion inside its mirrored box."""
    box = Pm.bound_box
    assert box is not None
    from scipy.stats import qmc

    sampler = qmc.Sobol(d=box.dim, scramble=True, seed=20240501)
    unit = sampler.random(1024)
    lo = np.array(box.lo)
    hi = np.array(box.hi)
    pts = lo + unit * (hi - lo)
    extra = np.array([box.center()])
    pts = np.vstack([pts, extra])
    return not feasible_mask(Pm, pts, slack=0.0).any()


def volume(
    P: GoodPolytope,
    rel_tol: float = REL_TOL_DEFAULT,
    diag: DiagCallback | None = None,
    detail: VolumeDetail | None = None,
) -> ComplexVolume:
    """Complex volume of a good polytope: upper-sheet mu plus the antipodally
    transported lower-sheet mu.

    Requires a bound_box certificate; raises DecompositionRequiredError when
    either sheet portion cannot be certified bounded.
    """
    validate_good_polytope(P, check_certificate=True)
    upper, err_u = _mu_upper(P, rel_tol, diag, "upper", detail)

    Pm = map_lower_sheet(P)
    if _lower_portion_empty(Pm):
        # nothing feasible inside the mirrored box; make sure nothing lives
        # outside it either, otherwise a decomposition hint is required
        check_bound_certificate(Pm)
        lower, err_l = 0.0 + 0.0j, 0.0
    else:
        check_bound_certificate(Pm)
        lower, err_l = _mu_upper(Pm, rel_tol, diag, "lower", detail)
    return ComplexVolume(upper + lower, err_u + err_l)
