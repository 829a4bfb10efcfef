"""Quaternion arithmetic, imaginary units and slice coordinates.

Scalar values are :class:`Quaternion` records; the ``q*`` functions operate on
float arrays whose last axis holds the four coordinates ``(w, x, y, z)`` and
broadcast over leading axes. The numerical code in the rest of the package
uses the array form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "ImaginaryUnit",
    "SliceCoordinates",
    "qmul",
    "qconj",
    "qabs",
    "qinv",
    "as_array",
    "multiply",
    "inverse",
    "im_component_along",
    "slice_coordinates",
    "random_unit_imaginary",
    "DomainError",
]

ATOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def qmul(p, q):
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    a2, b2, c2, d2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ),
        axis=-1,
    )


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qabs(q):
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def qinv(q):
    q = np.asarray(q, dtype=float)
    n2 = np.sum(q * q, axis=-1)
    if np.any(n2 == 0.0):
        raise DomainError("zero quaternion has no inverse")
    return qconj(q) / n2[..., None]


@dataclass(frozen=True, slots=True)
class Quaternion:
    """The quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> Quaternion:
        a = np.asarray(a, dtype=float).reshape(4)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def to_list(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> Quaternion:
        return inverse(self)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return multiply(other, self)

    def __truediv__(self, s):
        if isinstance(s, (int, float)):
            return Quaternion(self.w / s, self.x / s, self.y / s, self.z / s)
        return NotImplemented

    def isclose(self, other, tol: float = ATOL) -> bool:
        """Absolute closeness scaled by the larger operand magnitude."""
        other = _coerce(other)
        scale = max(1.0, abs(self), abs(other))
        return abs(self - other) <= tol * scale

    def __str__(self) -> str:
        return f"{self.w!r}{_signed(self.x)}i{_signed(self.y)}j{_signed(self.z)}k"


def _signed(v: float) -> str:
    s = repr(float(v))
    return s if s.startswith("-") else "+" + s


def _coerce(v):
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, ImaginaryUnit):
        return v.as_quaternion()
    if isinstance(v, (int, float, np.floating, np.integer)):
        return Quaternion(float(v))
    return NotImplemented


def as_array(q) -> np.ndarray:
    """Array view of a Quaternion, ImaginaryUnit, real number or array."""
    if isinstance(q, Quaternion):
        return q.to_array()
    if isinstance(q, ImaginaryUnit):
        return q.as_quaternion().to_array()
    if isinstance(q, (int, float, np.floating, np.integer)):
        return np.array([float(q), 0.0, 0.0, 0.0])
    arr = np.asarray(q, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected trailing axis of length 4, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, slots=True)
class ImaginaryUnit:
    """A point ``x i + y j + z k`` of the unit 2-sphere of imaginary units."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(n - 1.0) > 1e-12:
            raise DomainError(f"imaginary unit must have modulus 1, got {n!r}")

    @classmethod
    def from_vector(cls, v) -> ImaginaryUnit:
        """Normalize a nonzero 3-vector (or imaginary quaternion) to a unit."""
        v = np.asarray(v, dtype=float)
        if v.shape == (4,):
            v = v[1:]
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        v = v / n
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def to_array(self) -> np.ndarray:
        return np.array([0.0, self.x, self.y, self.z])

    def orthogonal(self) -> ImaginaryUnit:
        """Some unit J with <I, J> = 0, chosen deterministically."""
        v = np.array([self.x, self.y, self.z])
        e = np.eye(3)[int(np.argmin(np.abs(v)))]
        return ImaginaryUnit.from_vector(np.cross(v, e))


I_UNIT = ImaginaryUnit(1.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class SliceCoordinates:
    """``q = x + y * unit`` with ``y >= 0``."""

    x: float
    y: float
    unit: ImaginaryUnit
    is_real_axis: bool

    def recompose(self) -> Quaternion:
        return Quaternion(self.x) + Quaternion(0.0, self.y * self.unit.x, self.y * self.unit.y, self.y * self.unit.z)


def multiply(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion.from_array(qmul(as_array(p), as_array(q)))


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.norm2()
    if n2 == 0.0:
        raise DomainError("zero quaternion has no inverse")
    return Quaternion(q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2)


def im_component_along(w: Quaternion, unit: ImaginaryUnit) -> float:
    """Imaginary component of ``w`` along ``unit``: ``-Re(w * unit)``."""
    return -multiply(w, unit.as_quaternion()).w


def slice_coordinates(q: Quaternion, default_unit: ImaginaryUnit = I_UNIT) -> SliceCoordinates:
    """Split ``q`` as ``x + y I`` with ``y >= 0``.

    For real ``q`` the unit is not determined; ``default_unit`` is returned and
    ``is_real_axis`` is set.
    """
    y = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if y == 0.0:
        return SliceCoordinates(q.w, 0.0, default_unit, True)
    return SliceCoordinates(q.w, y, ImaginaryUnit.from_vector([q.x, q.y, q.z]), False)


def random_unit_imaginary(rng: np.random.Generator) -> ImaginaryUnit:
    """Uniform sample on the sphere of imaginary units."""
    while True:
        v = rng.standard_normal(3)
        n = float(np.linalg.norm(v))
        if n > 1e-12:
            return ImaginaryUnit.from_vector(v / n)
