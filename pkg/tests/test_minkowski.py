"""Bilinear form, causal classification, complex length, sphere volumes."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adsvol import (
    CausalClass,
    MVector,
    NullVectorError,
    Signature,
    ads_quadric,
    bilinear,
    causal_class,
    complex_length,
    lorentz,
    mvector,
    norm_sq,
    raw_bilinear,
    sphere_volume,
)
from oracles import sphere_volume_gamma

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_signature_constructors():
    sig = lorentz(3)
    assert sig.plus == 3 and sig.minus == 1 and sig.dim == 4
    sig2 = ads_quadric(3)
    assert sig2.plus == 3 and sig2.minus == 2 and sig2.dim == 5
    with pytest.raises(ValueError):
        Signature(-1, 1)


def test_raw_bilinear_convention():
    # Plus coordinates come first; the trailing `minus` block is negated.
    sig = lorentz(2)
    assert raw_bilinear((1.0, 2.0, 3.0), (1.0, 1.0, 1.0), sig) == 1.0 + 2.0 - 3.0
    sig22 = Signature(2, 2)
    assert raw_bilinear((1, 1, 1, 1), (1, 2, 3, 4), sig22) == 1 + 2 - 3 - 4


def test_bilinear_requires_matching_signature():
    u = mvector((1.0, 0.0, 0.0), lorentz(2))
    v = mvector((1.0, 0.0, 0.0), Signature(1, 2))
    with pytest.raises(ValueError):
        bilinear(u, v)


@given(
    st.lists(finite, min_size=3, max_size=3),
    st.lists(finite, min_size=3, max_size=3),
    st.lists(finite, min_size=3, max_size=3),
    finite,
    finite,
)
@settings(max_examples=200, deadline=None)
def test_bilinear_is_symmetric_and_linear(uc, vc, wc, s, t):
    sig = lorentz(2)
    u, v, w = (mvector(c, sig) for c in (uc, vc, wc))
    assert bilinear(u, v) == bilinear(v, u)
    combo = mvector([s * a + t * b for a, b in zip(vc, wc)], sig)
    lhs = bilinear(u, combo)
    rhs = s * bilinear(u, v) + t * bilinear(u, w)
    scale = max(1.0, abs(lhs), abs(rhs))
    assert abs(lhs - rhs) <= 1e-7 * scale


def test_causal_classes():
    sig = lorentz(2)
    assert causal_class(mvector((1.0, 0.0, 0.0), sig)) is CausalClass.SPACELIKE
    assert causal_class(mvector((0.0, 0.0, 1.0), sig)) is CausalClass.TIMELIKE
    assert causal_class(mvector((1.0, 0.0, 1.0), sig)) is CausalClass.NULL
    # The null band scales with the Euclidean size of the vector.
    big = mvector((1e8, 0.0, 1e8 + 1e-9), sig)
    assert causal_class(big) is CausalClass.NULL


def test_complex_length_conventions():
    sig = lorentz(2)
    sp = complex_length(mvector((3.0, 0.0, 0.0), sig))
    assert sp == pytest.approx(3.0)
    assert sp.imag == 0.0
    tl = complex_length(mvector((0.0, 0.0, 2.0), sig))
    assert tl.real == 0.0
    assert tl.imag == pytest.approx(2.0)
    with pytest.raises(NullVectorError):
        complex_length(mvector((1.0, 0.0, 1.0), sig))


@given(st.lists(finite, min_size=4, max_size=4))
@settings(max_examples=200, deadline=None)
def test_complex_length_squares_back(coords):
    v = mvector(coords, lorentz(3))
    try:
        ell = complex_length(v)
    except NullVectorError:
        return
    q = norm_sq(v)
    assert (ell * ell).real == pytest.approx(q, rel=1e-9, abs=1e-9)
    assert abs((ell * ell).imag) <= 1e-9 * max(1.0, abs(q))


def test_mvector_indexing_and_iteration():
    v = mvector((1.0, 2.0, 3.0), lorentz(2))
    assert isinstance(v, MVector)
    assert v[0] == 1.0 and v[2] == 3.0
    assert list(v.coords) == [1.0, 2.0, 3.0]


def test_sphere_volume_small_cases():
    assert sphere_volume(0) == pytest.approx(2.0)
    assert sphere_volume(1) == pytest.approx(2.0 * math.pi)
    assert sphere_volume(2) == pytest.approx(4.0 * math.pi)
    assert sphere_volume(3) == pytest.approx(2.0 * math.pi**2)
    with pytest.raises(ValueError):
        sphere_volume(-1)


@pytest.mark.parametrize("n", range(0, 12))
def test_sphere_volume_matches_gamma_oracle(n):
    assert sphere_volume(n) == pytest.approx(sphere_volume_gamma(n), rel=1e-12)
