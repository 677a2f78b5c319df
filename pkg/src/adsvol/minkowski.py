"""Flat indefinite bilinear algebra shared by every other module.

Vectors live in R^(p,q): the first p coordinates carry a plus sign, the last q
a minus sign.  The two signatures that actually occur are (n, 1) — the model
space's ambient, with the *last* coordinate time-like and x0 the distinguished
space-like height — and (n, 2) for the quadric the model embeds into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import NullVectorError

#: Scale-free part of the null-classification tolerance: a vector counts as
#: light-like when |v.v| <= NULL_TOL_FACTOR * max(1, Euclidean norm squared).
NULL_TOL_FACTOR = 1e-12


@dataclass(frozen=True)
class Signature:
    """Diagonal signature (+1 x plus, -1 x minus), plus coordinates first."""

    plus: int
    minus: int

    def __post_init__(self) -> None:
        if self.plus < 0 or self.minus < 0 or self.plus + self.minus == 0:
            raise ValueError(f"invalid signature ({self.plus}, {self.minus})")

    @property
    def dim(self) -> int:
        return self.plus + self.minus

    def signs(self) -> tuple[int, ...]:
        return (1,) * self.plus + (-1,) * self.minus


def lorentz(n: int) -> Signature:
    """Signature (n, 1): ambient of the n+1 dimensional model space."""
    return Signature(n, 1)


def ads_quadric(n: int) -> Signature:
    """Signature (n, 2): where the unit pseudo-sphere x.x = -1 lives."""
    return Signature(n, 2)


@dataclass(frozen=True)
class MVector:
    """A vector tagged with the signature of the space it belongs to."""

    coords: tuple[float, ...]
    sig: Signature

    def __post_init__(self) -> None:
        if len(self.coords) != self.sig.dim:
            raise ValueError(
                f"vector has {len(self.coords)} coordinates but signature "
                f"({self.sig.plus},{self.sig.minus}) needs {self.sig.dim}"
            )

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]


def mvector(coords: Sequence[float], sig: Signature) -> MVector:
    return MVector(tuple(float(x) for x in coords), sig)


class CausalClass(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


def raw_bilinear(u: Sequence[float], v: Sequence[float], sig: Signature) -> float:
    """Pairing on bare coordinate sequences; the hot-path entry point."""
    p = sig.plus
    acc = 0.0
    for i in range(p):
        acc += u[i] * v[i]
    for i in range(p, sig.dim):
        acc -= u[i] * v[i]
    return acc


def bilinear(u: MVector, v: MVector) -> float:
    """Indefinite inner product u.v; both arguments must share a signature."""
    if u.sig != v.sig:
        raise ValueError(f"signature mismatch: {u.sig} vs {v.sig}")
    return raw_bilinear(u.coords, v.coords, u.sig)


def norm_sq(v: MVector) -> float:
    return raw_bilinear(v.coords, v.coords, v.sig)


def _null_tol(coords: Sequence[float]) -> float:
    eucl = sum(x * x for x in coords)
    return NULL_TOL_FACTOR * max(1.0, eucl)


def causal_class(v: MVector) -> CausalClass:
    """Space-like / time-like / null, with a scale-aware null band."""
    q = norm_sq(v)
    if abs(q) <= _null_tol(v.coords):
        return CausalClass.NULL
    return CausalClass.SPACELIKE if q > 0.0 else CausalClass.TIMELIKE


def complex_length(v: MVector) -> complex:
    """Length sqrt(v.v) on the branch that keeps space-like lengths positive
    real and time-like ones positive imaginary.  Null input is an error:
    a light-like vector has no causal character to hang a branch on.
    """
    q = norm_sq(v)
    if abs(q) <= _null_tol(v.coords):
        raise NullVectorError(f"vector {v.coords} is light-like (v.v = {q:g})")
    if q > 0.0:
        return complex(math.sqrt(q), 0.0)
    return complex(0.0, math.sqrt(-q))


def sphere_volume(n: int) -> float:
    """Volume (n-dimensional measure) of the round unit n-sphere.

    Runs the two-step recursion V_n = 2*pi/(n-1) * V_(n-2) down from
    V_0 = 2, V_1 = 2*pi.
    """
    if n < 0:
        raise ValueError("sphere dimension must be >= 0")
    if n == 0:
        return 2.0
    if n == 1:
        return 2.0 * math.pi
    return 2.0 * math.pi / (n - 1) * sphere_volume(n - 2)
