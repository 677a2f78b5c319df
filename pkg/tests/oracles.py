"""Independent numerical oracles used by the test suite.

Nothing here imports the engine's slicing or face-volume code paths: values
are produced by direct epsilon-regularized quadrature (scipy) plus Richardson
extrapolation, or by classical closed forms (gamma function), so they can
adjudicate the package's own closed forms and recursions.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


def sphere_volume_gamma(n: int) -> float:
    """Unit n-sphere volume via the gamma closed form (no recursion)."""
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def _crossing_points(phi1: float, phi2: float) -> list[float]:
    """Odd multiples of pi/2 inside (phi1, phi2) — light-cone crossings."""
    pts = []
    k = math.ceil((phi1 - math.pi / 2.0) / math.pi)
    while True:
        phi = math.pi / 2.0 + k * math.pi
        if phi >= phi2:
            break
        if phi > phi1:
            pts.append(phi)
        k += 1
    return pts


def _nearest_crossing(phi: float) -> float:
    """The odd multiple of pi/2 closest to phi."""
    return math.pi / 2.0 + math.pi * round((phi - math.pi / 2.0) / math.pi)


def arc_volume_eps(r: float, phi1: float, phi2: float, eps: float) -> complex:
    """Direct quadrature of the regularized length of a circle arc.

    The arc lies on x0^2 + x1^2 = r^2 (x0 = r cos(phi)); the regularized
    1-volume density is arclength/(x0 - i*eps).

    The integrand has width-eps/r peaks at the light-cone crossings
    (cos(phi) = 0), so each smooth piece is integrated in the variable v
    with phi = c + (eps/r) sinh(v) measured from the nearest crossing c;
    that substitution makes the integrand uniformly smooth in v and lets
    eps be taken as small as needed.
    """
    cuts = [phi1]
    for c in _crossing_points(phi1, phi2):
        cuts.extend((0.5 * (c + cuts[-1]), c))
    cuts.append(0.5 * (cuts[-1] + phi2))
    cuts.append(phi2)
    scale = eps / r

    total = 0.0 + 0.0j
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        c = _nearest_crossing(0.5 * (lo + hi))

        def g(v: float) -> complex:
            phi = c + scale * math.sinh(v)
            return eps * math.cosh(v) / complex(r * math.cos(phi), -eps)

        v_lo = math.asinh((lo - c) / scale)
        v_hi = math.asinh((hi - c) / scale)
        kw = dict(limit=400, epsabs=1e-11, epsrel=1e-11)
        re, _ = quad(lambda v: g(v).real, v_lo, v_hi, **kw)
        im, _ = quad(lambda v: g(v).imag, v_lo, v_hi, **kw)
        total += complex(re, im)
    return total


def arc_volume_limit(r: float, phi1: float, phi2: float, eps0: float | None = None) -> complex:
    """eps -> 0 limit of arc_volume_eps by two-stage Richardson (error O(eps^3)).

    The regularized value approaches the limit with an O(eps) leading term at
    each transversal crossing, so successive halving cancels it.  The
    expansion is only uniform for eps well below the smallest |x0| at the arc
    endpoints, so the default eps0 scales with that distance.
    """
    if eps0 is None:
        x0_min = min(abs(r * math.cos(phi1)), abs(r * math.cos(phi2)), r)
        eps0 = 1e-3 * x0_min
    v1 = arc_volume_eps(r, phi1, phi2, eps0)
    v2 = arc_volume_eps(r, phi1, phi2, eps0 / 2.0)
    v3 = arc_volume_eps(r, phi1, phi2, eps0 / 4.0)
    r1 = 2.0 * v2 - v1
    r2 = 2.0 * v3 - v2
    return (4.0 * r2 - r1) / 3.0


def segment_volume_eps(x0_lo: float, x0_hi: float, eps: float, power: int = 1) -> complex:
    """Regularized integral of 1/(x0 - i eps)^power over a straight segment."""

    def f_re(x: float) -> float:
        return (1.0 / complex(x, -eps) ** power).real

    def f_im(x: float) -> float:
        return (1.0 / complex(x, -eps) ** power).imag

    pts = [0.0] if x0_lo < 0.0 < x0_hi else []
    kw = dict(points=pts, limit=400, epsabs=1e-12, epsrel=1e-12)
    re, _ = quad(f_re, x0_lo, x0_hi, **kw)
    im, _ = quad(f_im, x0_lo, x0_hi, **kw)
    return complex(re, im)
