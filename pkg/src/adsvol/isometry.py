"""Signed isometries of the doubled model space, as words in primitive moves.

Five primitive families generate everything this package needs: linear maps
fixing the x0-axis and preserving the Minkowski form, translations parallel to
the boundary plane, similarities x -> lambda*x (sheet-swapping for negative
lambda), and the two signed Minkowski inversions

    j  : (x, h) -> ( x/x.x,  sgn(x.x) h)
    j- : (x, h) -> (-x/x.x, -sgn(x.x) h)

Words act on signed points and on half-space triples (a, b, c); the two
actions are compatible with membership, which is what the tests lean on.
Moves in a word apply left to right.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BoundaryPointError, DecompositionRequiredError
from .minkowski import NULL_TOL_FACTOR, MVector, lorentz, mvector, raw_bilinear
from .model import (
    Box,
    GoodPolytope,
    QuadricHalfSpace,
    SignedPoint,
    check_bound_certificate,
    feasible_mask,
)

#: How exactly a LinearFix0 matrix must preserve the spatial Minkowski form.
FORM_PRESERVATION_TOL = 1e-10


@dataclass(frozen=True)
class LinearFix0:
    """Form-orthogonal linear map on (x1..xn), extended by identity on x0.

    The matrix is the spatial block only, acting on coordinates whose form is
    x1^2 + ... + x_(n-1)^2 - x_n^2.
    """

    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("LinearFix0 matrix must be square and non-empty")
        g = np.eye(m.shape[0])
        g[-1, -1] = -1.0
        resid = m.T @ g @ m - g
        if np.abs(resid).max() > FORM_PRESERVATION_TOL * max(1.0, np.abs(m).max() ** 2):
            raise ValueError("LinearFix0 matrix does not preserve the spatial form")

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)


@dataclass(frozen=True)
class Translation:
    """Shift by a vector with zero x0-component."""

    w: tuple[float, ...]

    def __post_init__(self) -> None:
        if abs(self.w[0]) > NULL_TOL_FACTOR * max(1.0, sum(v * v for v in self.w)):
            raise ValueError("translation vector must have zero x0-component")


@dataclass(frozen=True)
class Similarity:
    """x -> lambda*x; swaps sheets when lambda < 0."""

    lam: float

    def __post_init__(self) -> None:
        if self.lam == 0.0:
            raise ValueError("similarity factor must be nonzero")


@dataclass(frozen=True)
class InversionJ:
    pass


@dataclass(frozen=True)
class InversionJminus:
    pass


PrimitiveIsometry = Union[LinearFix0, Translation, Similarity, InversionJ, InversionJminus]


@dataclass(frozen=True)
class IsometryWord:
    moves: tuple[PrimitiveIsometry, ...]

    def __iter__(self):
        return iter(self.moves)

    def __len__(self) -> int:
        return len(self.moves)


def word(moves: Iterable[PrimitiveIsometry]) -> IsometryWord:
    return IsometryWord(tuple(moves))


def compose(g1: IsometryWord, g2: IsometryWord) -> IsometryWord:
    """The word acting as 'g1 first, then g2'."""
    return IsometryWord(g1.moves + g2.moves)


def _invert_move(m: PrimitiveIsometry) -> PrimitiveIsometry:
    if isinstance(m, (InversionJ, InversionJminus)):
        return m
    if isinstance(m, Translation):
        return Translation(tuple(-v for v in m.w))
    if isinstance(m, Similarity):
        return Similarity(1.0 / m.lam)
    if isinstance(m, LinearFix0):
        a = m.as_array()
        g = np.eye(a.shape[0])
        g[-1, -1] = -1.0
        inv = g @ a.T @ g  # form-orthogonal inverse
        return LinearFix0(tuple(tuple(row) for row in inv))
    raise TypeError(f"unknown primitive {m!r}")


def invert_word(g: IsometryWord) -> IsometryWord:
    return IsometryWord(tuple(_invert_move(m) for m in reversed(g.moves)))


# ---------------------------------------------------------------------------
# Action on signed points


def _apply_move_point(m: PrimitiveIsometry, coords: tuple[float, ...], h: int, sig) -> tuple[tuple[float, ...], int]:
    if isinstance(m, Translation):
        if len(m.w) != len(coords):
            raise ValueError("translation dimension mismatch")
        return tuple(x + w for x, w in zip(coords, m.w)), h
    if isinstance(m, Similarity):
        lam = m.lam
        return tuple(lam * x for x in coords), (h if lam > 0 else -h)
    if isinstance(m, LinearFix0):
        a = m.as_array()
        if a.shape[0] != len(coords) - 1:
            raise ValueError("linear move dimension mismatch")
        spatial = a @ np.array(coords[1:])
        return (coords[0], *map(float, spatial)), h
    if isinstance(m, (InversionJ, InversionJminus)):
        s = raw_bilinear(coords, coords, sig)
        if abs(s) <= NULL_TOL_FACTOR * max(1.0, sum(x * x for x in coords)):
            raise BoundaryPointError(
                "inversion applied on the null cone (x.x = 0) maps to the boundary sheet"
            )
        sgn = 1 if s > 0 else -1
        if isinstance(m, InversionJ):
            return tuple(x / s for x in coords), sgn * h
        return tuple(-x / s for x in coords), -sgn * h
    raise TypeError(f"unknown primitive {m!r}")


def apply_point(g: IsometryWord | PrimitiveIsometry, p: SignedPoint) -> SignedPoint:
    """Push a signed point through a word; moves act left to right.

    Raises BoundaryPointError if an inversion step lands on the null cone.
    """
    moves = g.moves if isinstance(g, IsometryWord) else (g,)
    coords, h = p.x.coords, p.h
    for m in moves:
        coords, h = _apply_move_point(m, coords, h, p.x.sig)
    return SignedPoint(MVector(tuple(float(v) for v in coords), p.x.sig), h)


def apply_point_batch(g: IsometryWord, pts: Sequence[SignedPoint]) -> list[SignedPoint | None]:
    """Batch action; points hitting a null inversion come back as None."""
    out: list[SignedPoint | None] = []
    for p in pts:
        try:
            out.append(apply_point(g, p))
        except BoundaryPointError:
            out.append(None)
    return out


# ---------------------------------------------------------------------------
# Action on half-spaces


def _apply_move_halfspace(m: PrimitiveIsometry, H: QuadricHalfSpace) -> QuadricHalfSpace:
    a, b, c = H.a, H.b, H.c
    sig = b.sig
    if isinstance(m, InversionJ):
        return QuadricHalfSpace(c, b, a)
    if isinstance(m, InversionJminus):
        return QuadricHalfSpace(-c, b, -a)
    if isinstance(m, Translation):
        if len(m.w) != sig.dim:
            raise ValueError("translation dimension mismatch")
        w = m.w
        b2 = tuple(bi - 2.0 * a * wi for bi, wi in zip(b.coords, w))
        c2 = c - raw_bilinear(b.coords, w, sig) + a * raw_bilinear(w, w, sig)
        return QuadricHalfSpace(a, MVector(b2, sig), c2)
    if isinstance(m, LinearFix0):
        arr = m.as_array()
        if arr.shape[0] != sig.dim - 1:
            raise ValueError("linear move dimension mismatch")
        spatial = arr @ np.array(b.coords[1:])
        b2 = (b.coords[0], *map(float, spatial))
        return QuadricHalfSpace(a, MVector(b2, sig), c)
    if isinstance(m, Similarity):
        lam = m.lam
        if lam > 0:
            return QuadricHalfSpace(a, MVector(tuple(lam * v for v in b.coords), sig), lam * lam * c)
        # negative factor swaps sheets: the whole triple picks up a minus sign
        return QuadricHalfSpace(-a, MVector(tuple(-lam * v for v in b.coords), sig), -lam * lam * c)
    raise TypeError(f"unknown primitive {m!r}")


def apply_halfspace(g: IsometryWord | PrimitiveIsometry, H: QuadricHalfSpace) -> QuadricHalfSpace:
    """Transport a half-space through a word (left to right); returns a
    representative of the image up to positive scale."""
    moves = g.moves if isinstance(g, IsometryWord) else (g,)
    out = H
    for m in moves:
        out = _apply_move_halfspace(m, out)
    return out


def transport_with_box(
    P: GoodPolytope,
    g: IsometryWord,
    seed: int = 0,
    samples: int = 8192,
    norm_cap: float = 200.0,
    tail_ratio: float = 5.0,
) -> GoodPolytope:
    """The image polytope g(P) with a certified bounding box.

    The box is fitted to the images of sampled interior points and then
    re-certified honestly, growing the padding on failure.  An inversion in g
    sends the light cone to infinity, so a region touching the cone has an
    unbounded image; that shows up as escaping sample images (an extreme
    tail in |image|), and is rejected with DecompositionRequiredError so
    invariance harnesses can skip the pair.
    """
    rng = np.random.default_rng(seed)
    box = P.bound_box
    pts = rng.uniform(box.lo, box.hi, size=(samples, P.ambient_dim))
    pts = pts[feasible_mask(P, pts)]
    if len(pts) < 32:
        raise DecompositionRequiredError(
            "too few interior samples to fit a bounding box for the image"
        )
    sig = lorentz(P.ambient_dim - 1)
    signed = [SignedPoint(mvector(row, sig), 1) for row in pts]
    mapped = apply_point_batch(g, signed)
    images = np.array([list(q.x.coords) for q in mapped if q is not None])
    if len(images) < 32:
        raise DecompositionRequiredError(
            "the isometry word maps almost all samples to the glued boundary"
        )
    norms = np.linalg.norm(images, axis=1)
    q99 = float(np.quantile(norms, 0.99))
    mx = float(norms.max())
    if mx > norm_cap or mx > tail_ratio * max(q99, 1.0):
        raise DecompositionRequiredError(
            f"image appears unbounded: sample images reach |x| = {mx:.3g} "
            f"(99th percentile {q99:.3g}); the region comes too close to the "
            "light cone sent to infinity"
        )
    facets = tuple(apply_halfspace(g, H) for H in P.facets)
    lo = images.min(axis=0)
    hi = images.max(axis=0)
    span = np.maximum(hi - lo, 0.1)
    for attempt in range(4):
        pad = span * (0.25 * 2**attempt) + 0.3 * 2**attempt
        Q = GoodPolytope(
            P.ambient_dim, facets, Box(tuple(lo - pad), tuple(hi + pad))
        )
        try:
            check_bound_certificate(Q)
            return Q
        except DecompositionRequiredError:
            continue
    raise DecompositionRequiredError(
        "no certifiable bounding box found for the image polytope"
    )


# ---------------------------------------------------------------------------
# Randomized words for the invariance harnesses

_CLASS_NAMES = ("linear", "translation", "similarity", "inversion_j", "inversion_jminus")

#: Harness policy: words never carry more than this many inversions.
MAX_INVERSIONS_PER_WORD = 2


def _random_linear(rng: random.Random, n: int) -> LinearFix0:
    """Random spatial-form-orthogonal matrix: rotation block x boost x flips."""
    m = np.eye(n)
    if n >= 2:
        # rotation acting on the space-like block (coordinates 0..n-2)
        k = n - 1
        if k >= 2:
            theta = rng.uniform(0.0, 2.0 * math.pi)
            i, j = rng.sample(range(k), 2)
            rot = np.eye(n)
            rot[i, i] = rot[j, j] = math.cos(theta)
            rot[i, j] = -math.sin(theta)
            rot[j, i] = math.sin(theta)
            m = rot @ m
        chi = rng.uniform(-0.8, 0.8)
        boost = np.eye(n)
        boost[-2, -2] = boost[-1, -1] = math.cosh(chi)
        boost[-2, -1] = boost[-1, -2] = math.sinh(chi)
        m = boost @ m
    if rng.random() < 0.5:
        flip = np.eye(n)
        flip[rng.randrange(n), :] *= -1.0
        m = flip @ m
    return LinearFix0(tuple(tuple(row) for row in m))


def random_isometry(
    seed: int,
    class_mask: Iterable[str] = _CLASS_NAMES,
    ambient_dim: int = 3,
    max_moves: int = 3,
    translation_scale: float = 1.5,
) -> IsometryWord:
    """Deterministic pseudo-random word from the allowed primitive classes.

    class_mask entries: "linear", "translation", "similarity", "inversion_j",
    "inversion_jminus".  Words are capped at MAX_INVERSIONS_PER_WORD
    inversions regardless of the mask.
    """
    allowed = [c for c in _CLASS_NAMES if c in set(class_mask)]
    if not allowed:
        raise ValueError("class mask selects no primitive classes")
    rng = random.Random(seed)
    n = ambient_dim - 1
    count = rng.randint(1, max_moves)
    moves: list[PrimitiveIsometry] = []
    inversions = 0
    for _ in range(count):
        pool = allowed
        if inversions >= MAX_INVERSIONS_PER_WORD:
            pool = [c for c in allowed if not c.startswith("inversion")] or allowed[:1]
            if pool[0].startswith("inversion"):
                break
        kind = rng.choice(pool)
        if kind == "translation":
            w = (0.0, *(rng.uniform(-translation_scale, translation_scale) for _ in range(n)))
            moves.append(Translation(w))
        elif kind == "similarity":
            lam = rng.uniform(0.5, 2.0)
            if rng.random() < 0.3:
                lam = -lam
            moves.append(Similarity(lam))
        elif kind == "linear":
            moves.append(_random_linear(rng, n))
        elif kind == "inversion_j":
            moves.append(InversionJ())
            inversions += 1
        else:
            moves.append(InversionJminus())
            inversions += 1
    return IsometryWord(tuple(moves))


# ---------------------------------------------------------------------------
# JSON wire format


def move_to_json(m: PrimitiveIsometry) -> dict:
    if isinstance(m, InversionJ):
        return {"type": "inversion_j"}
    if isinstance(m, InversionJminus):
        return {"type": "inversion_jminus"}
    if isinstance(m, Translation):
        return {"type": "translation", "w": list(m.w)}
    if isinstance(m, Similarity):
        return {"type": "similarity", "lambda": m.lam}
    if isinstance(m, LinearFix0):
        return {"type": "linear", "matrix": [list(row) for row in m.matrix]}
    raise TypeError(f"unknown primitive {m!r}")


def move_from_json(obj: dict) -> PrimitiveIsometry:
    kind = obj.get("type")
    if kind == "inversion_j":
        return InversionJ()
    if kind == "inversion_jminus":
        return InversionJminus()
    if kind == "translation":
        return Translation(tuple(float(v) for v in obj["w"]))
    if kind == "similarity":
        return Similarity(float(obj["lambda"]))
    if kind == "linear":
        return LinearFix0(tuple(tuple(float(v) for v in row) for row in obj["matrix"]))
    raise ValueError(f"unknown isometry move type {kind!r}")


def word_to_json(g: IsometryWord) -> list[dict]:
    return [move_to_json(m) for m in g.moves]


def word_from_json(obj: Sequence[dict]) -> IsometryWord:
    return IsometryWord(tuple(move_from_json(m) for m in obj))
