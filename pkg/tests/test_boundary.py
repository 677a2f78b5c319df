"""Conformal boundary plane: angles, polygon volumes, lifts, correspondence."""

import cmath
import math

import numpy as np
import pytest

from adsvol import (
    BoundaryPointError,
    BoundaryPolygon,
    Box,
    ConicSide,
    ConventionViolationError,
    NullVectorError,
    SegmentSide,
    boundary_polygon,
    boundary_volume_via_3d,
    c2m,
    conformal_apply,
    correspondence_check,
    good_polytope,
    halfspace,
    lift_polygon,
    minkowski_angle,
    plane_form,
    plane_length,
    plane_vector,
    polygon_from_json,
    polygon_to_json,
    polygon_volume,
    trace_polygon,
    volume,
)
from gens import random_polytope_2d


def _bulged_box():
    """Unit-ish box whose top side bulges along u^2 - w^2 + 8w - 13 = 0.

    Frozen closed form: the conformal volume is ln 3.
    """
    A, B, C, D = (
        plane_vector(-1.0, 0.0),
        plane_vector(1.0, 0.0),
        plane_vector(1.0, 2.0),
        plane_vector(-1.0, 2.0),
    )
    return BoundaryPolygon(
        vertices=(A, B, C, D),
        sides=(SegmentSide(), SegmentSide(), ConicSide(1.0, 0.0, -8.0, -13.0), SegmentSide()),
    )


def _strip():
    """Shell u^2 - w^2 <= 1 cut to |w| <= sqrt(3); V_inf = 4 asinh(sqrt 3)."""
    return good_polytope(
        2,
        (
            halfspace(1.0, (0.0, 0.0), -1.0),
            halfspace(0.0, (0.0, 1.0), -math.sqrt(3.0)),
            halfspace(0.0, (0.0, -1.0), -math.sqrt(3.0)),
        ),
        Box((-2.3, -2.0), (2.3, 2.0)),
    )


STRIP_ANALYTIC = 4.0 * math.asinh(math.sqrt(3.0))


def _random_triangle(rng):
    while True:
        pts = rng.uniform(-3.0, 3.0, size=(3, 2))
        V = [plane_vector(*p) for p in pts]
        try:
            angles = []
            for i in range(3):
                A, B, C = V[i], V[(i + 1) % 3], V[(i + 2) % 3]
                u = plane_vector(B.u - A.u, B.w - A.w)
                v = plane_vector(C.u - A.u, C.w - A.w)
                angles.append(minkowski_angle(u, v))
            opp = [
                plane_length(
                    plane_vector(
                        V[(i + 2) % 3].u - V[(i + 1) % 3].u,
                        V[(i + 2) % 3].w - V[(i + 1) % 3].w,
                    )
                )
                for i in range(3)
            ]
            return angles, opp
        except NullVectorError:
            continue


# --- angles -------------------------------------------------------------------


def test_angle_frozen_examples():
    assert minkowski_angle(plane_vector(1, 0), plane_vector(0, 1)) == pytest.approx(
        -1j * math.pi / 2, abs=1e-12
    )
    assert minkowski_angle(plane_vector(1, 0), plane_vector(-1, 0)) == pytest.approx(
        -1j * math.pi, abs=1e-12
    )
    boosted = plane_vector(math.cosh(1.0), math.sinh(1.0))
    assert minkowski_angle(plane_vector(1, 0), boosted) == pytest.approx(1.0 + 0j, abs=1e-12)
    tboosted = plane_vector(math.sinh(1.0), math.cosh(1.0))
    assert minkowski_angle(plane_vector(0, 1), tboosted) == pytest.approx(-1.0 + 0j, abs=1e-12)


def test_angle_branch_is_lower_half():
    rng = np.random.default_rng(5)
    for _ in range(200):
        x = plane_vector(*rng.uniform(-2, 2, 2))
        y = plane_vector(*rng.uniform(-2, 2, 2))
        try:
            th = minkowski_angle(x, y)
        except NullVectorError:
            continue
        assert -math.pi <= th.imag <= 0.0


def test_angle_rejects_null_vectors():
    with pytest.raises(NullVectorError):
        minkowski_angle(plane_vector(1, 1), plane_vector(1, 0))
    with pytest.raises(NullVectorError):
        plane_length(plane_vector(-2, 2))


def test_plane_length_conventions():
    assert plane_length(plane_vector(3, 0)) == 3.0 + 0j
    assert plane_length(plane_vector(0, 2)) == 2j
    assert plane_form(plane_vector(1, 2), plane_vector(3, 4)) == pytest.approx(3 - 8)


def test_triangle_angle_sum_is_minus_pi_i():
    rng = np.random.default_rng(1)
    for _ in range(100):
        angles, _ = _random_triangle(rng)
        assert sum(angles) == pytest.approx(-1j * math.pi, abs=1e-10)


def test_triangle_law_of_sines():
    rng = np.random.default_rng(2)
    for _ in range(100):
        angles, opp = _random_triangle(rng)
        ratios = [cmath.sinh(t) / l for t, l in zip(angles, opp)]
        scale = max(abs(r) for r in ratios)
        assert abs(ratios[0] - ratios[1]) <= 1e-10 * scale
        assert abs(ratios[1] - ratios[2]) <= 1e-10 * scale


def test_c2m_values():
    assert c2m(1) == pytest.approx(2j / math.pi, abs=1e-15)
    with pytest.raises(ValueError):
        c2m(0)


# --- polygon volumes -----------------------------------------------------------


def test_straight_square_volume_is_zero():
    sq = boundary_polygon(
        [plane_vector(-1, -1), plane_vector(1, -1), plane_vector(1, 1), plane_vector(-1, 1)]
    )
    r = polygon_volume(sq)
    assert r.value == pytest.approx(0.0, abs=1e-12)


def test_bulged_box_closed_form():
    r = polygon_volume(_bulged_box())
    assert r.value == pytest.approx(math.log(3.0), abs=1e-10)


def test_bulged_box_lift_agreement():
    G = _bulged_box()
    rp = polygon_volume(G)
    rl = boundary_volume_via_3d(G)
    assert abs(rl.value - rp.value) <= max(1e-4, 10.0 * (rl.abs_err + rp.abs_err))


def test_lift_polygon_produces_certified_polytope():
    P = lift_polygon(_bulged_box())
    assert P.ambient_dim == 3
    assert P.bound_box is not None
    v = volume(P)
    # c2m(1) * V_3 = V_inf,2
    assert c2m(1) * v.value == pytest.approx(math.log(3.0) + 0j, abs=1e-6)


def test_polygon_json_round_trip():
    G = _bulged_box()
    G2 = polygon_from_json(polygon_to_json(G))
    assert polygon_volume(G2).value == polygon_volume(G).value
    assert len(G2.vertices) == len(G.vertices)
    assert G2.sides == G.sides


# --- conformal transport ---------------------------------------------------------


def test_conformal_invariance_with_inversion():
    G = _bulged_box()
    base = polygon_volume(G).value
    moves = [
        ("boost", 0.4),
        ("translate", 20.0, 0.0),
        ("invert",),
        ("scale", 5.0),
        ("translate", -1.0, 0.5),
        ("boost", -0.7),
    ]
    moved = conformal_apply(G, moves)
    assert polygon_volume(moved).value == pytest.approx(base, abs=1e-6)


def test_tearing_inversion_rejected():
    G = _bulged_box()
    with pytest.raises(BoundaryPointError):
        conformal_apply(G, [("translate", 2.5, 0.4), ("invert",)])


def test_conformal_moves_without_inversion():
    G = _bulged_box()
    base = polygon_volume(G).value
    for moves in ([("translate", 0.7, -0.3)], [("scale", 3.0)], [("boost", 1.1)]):
        assert polygon_volume(conformal_apply(G, moves)).value == pytest.approx(
            base, abs=1e-9
        )


# --- region tracing and the correspondence -----------------------------------------


def test_strip_trace_structure():
    G = trace_polygon(_strip())
    assert G is not None
    assert len(G.vertices) == 4
    conic_sides = sum(1 for s in G.sides if isinstance(s, ConicSide) and abs(s.a) > 1e-14)
    assert conic_sides == 2  # two shell arcs, two straight cuts


def test_strip_correspondence_against_analytic():
    lhs, rhs = correspondence_check(_strip())
    assert lhs == pytest.approx(STRIP_ANALYTIC, abs=1e-9)
    assert lhs == pytest.approx(rhs, abs=1e-5)
    # the boundary volume is minus the regularized bulk volume
    v = volume(_strip())
    assert rhs == pytest.approx(-v.value.real, abs=1e-9)
    assert abs(v.value.imag) == 0.0


def test_strip_trace_volume():
    G = trace_polygon(_strip())
    assert polygon_volume(G).value == pytest.approx(STRIP_ANALYTIC, abs=1e-9)


@pytest.mark.parametrize("seed", [1, 4, 5, 7, 8])
def test_correspondence_random_regions(seed):
    P2 = random_polytope_2d(seed)
    try:
        lhs, rhs = correspondence_check(P2)
    except ConventionViolationError:
        pytest.skip("trace region is disconnected; no single-polygon correspondence")
    assert lhs == pytest.approx(rhs, abs=1e-5)


def test_disconnected_trace_rejected():
    # seeds 0/2/3/6 draw two separate blobs; the trace walk must refuse them
    for seed in (0, 2):
        P2 = random_polytope_2d(seed)
        with pytest.raises(ConventionViolationError):
            trace_polygon(P2)


# --- polygon construction guards ----------------------------------------------------


def test_boundary_polygon_validation():
    a, b, c = plane_vector(0, 0), plane_vector(1, 0), plane_vector(0, 1)
    with pytest.raises(ValueError):
        boundary_polygon([a])  # a single corner is not a chain
    bigon = boundary_polygon([a, b])  # two corners are fine (think lens regions)
    assert len(bigon.sides) == 2
    G = boundary_polygon([a, b, c])
    assert len(G.sides) == 3
    assert all(isinstance(s, SegmentSide) for s in G.sides)
    with pytest.raises(ValueError):
        boundary_polygon([a, b, c], [SegmentSide()])
    with pytest.raises(ValueError):
        boundary_polygon([a, a, c])  # coincident corners
    with pytest.raises(ValueError):
        # vertex off the declared conic
        boundary_polygon([a, b, c], [ConicSide(1.0, 0.0, -8.0, -13.0), None, None])
