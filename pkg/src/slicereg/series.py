"""Slice regular functions on a ball as truncated power series ``sum q^n a_n``.

Coefficients sit to the right of the powers of the variable. A
:class:`RegularSeries` stores them as a read-only ``(N + 1, 4)`` float array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quaternion import (
    DomainError,
    ImaginaryUnit,
    Quaternion,
    as_array,
    qabs,
    qinv,
    qmul,
)

__all__ = [
    "RegularSeries",
    "SplitPair",
    "TruncationError",
    "DegenerateInputError",
    "MAX_DEGREE",
    "evaluate",
    "evaluate_naive",
    "slice_derivative",
    "star_product",
    "star_product_many",
    "transform_point",
    "regular_compose_unit",
    "compose_powers",
    "aux_g",
    "odd_part",
    "split",
    "representation_eval",
    "normalize_hat",
]

MAX_DEGREE = 64
ZERO_COEFF = 1e-14


class TruncationError(ValueError):
    """A product would exceed the configured truncation degree."""


class DegenerateInputError(ValueError):
    """The operation is undefined for an identically zero (or constant) input."""


class RegularSeries:
    """Truncated power series ``f(q) = sum_n q^n a_n`` on the ball ``|q| < radius``."""

    __slots__ = ("_coeffs", "radius")

    def __init__(self, coeffs, radius: float = 1.0):
        if isinstance(coeffs, np.ndarray):
            arr = np.array(coeffs, dtype=float)
        else:
            arr = np.array([as_array(c) for c in coeffs], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] == 0:
            raise ValueError(f"coefficients must have shape (N+1, 4), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        if not radius > 0:
            raise ValueError("radius must be positive")
        arr.setflags(write=False)
        self._coeffs = arr
        self.radius = float(radius)

    @classmethod
    def monomial(cls, n: int, a, radius: float = 1.0) -> RegularSeries:
        c = np.zeros((n + 1, 4))
        c[n] = as_array(a)
        return cls(c, radius)

    @classmethod
    def affine(cls, a, b, radius: float = 1.0) -> RegularSeries:
        return cls(np.stack([as_array(a), as_array(b)]), radius)

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def truncation_degree(self) -> int:
        return self._coeffs.shape[0] - 1

    @property
    def degree(self) -> int:
        """Largest index with a nonzero coefficient; -1 for the zero series."""
        nz = np.flatnonzero(np.any(self._coeffs != 0.0, axis=1))
        return int(nz[-1]) if nz.size else -1

    def coefficient(self, n: int) -> Quaternion:
        if n > self.truncation_degree:
            return Quaternion()
        return Quaternion.from_array(self._coeffs[n])

    def is_zero(self, atol: float = 0.0) -> bool:
        return bool(np.all(qabs(self._coeffs) <= atol))

    def is_constant(self, atol: float = 0.0) -> bool:
        return bool(np.all(qabs(self._coeffs[1:]) <= atol))

    def __call__(self, q):
        return evaluate(self, q)

    def __add__(self, other: RegularSeries) -> RegularSeries:
        m = max(self.truncation_degree, other.truncation_degree) + 1
        return RegularSeries(_pad(self._coeffs, m) + _pad(other._coeffs, m), min(self.radius, other.radius))

    def __sub__(self, other: RegularSeries) -> RegularSeries:
        m = max(self.truncation_degree, other.truncation_degree) + 1
        return RegularSeries(_pad(self._coeffs, m) - _pad(other._coeffs, m), min(self.radius, other.radius))

    def __neg__(self) -> RegularSeries:
        return RegularSeries(-self._coeffs, self.radius)

    def scale(self, lam: float) -> RegularSeries:
        """Multiply by a real scalar."""
        return RegularSeries(self._coeffs * float(lam), self.radius)

    def right_multiply(self, c) -> RegularSeries:
        """The series ``sum q^n (a_n c)``."""
        return RegularSeries(qmul(self._coeffs, as_array(c)), self.radius)

    def translate_to_origin(self) -> RegularSeries:
        """``f - f(0)``."""
        c = self._coeffs.copy()
        c[0] = 0.0
        return RegularSeries(c, self.radius)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegularSeries):
            return NotImplemented
        m = max(self.truncation_degree, other.truncation_degree) + 1
        return self.radius == other.radius and np.array_equal(_pad(self._coeffs, m), _pad(other._coeffs, m))

    def __hash__(self):
        return hash((self.radius, self._coeffs.tobytes()))

    def __repr__(self) -> str:
        return f"RegularSeries(degree={self.degree}, radius={self.radius})"

    def to_dict(self) -> dict:
        return {"radius": self.radius, "coeffs": self._coeffs.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, payload: dict) -> RegularSeries:
        if "coeffs" not in payload:
            raise ValueError("series JSON requires a 'coeffs' field")
        return cls(np.asarray(payload["coeffs"], dtype=float), float(payload.get("radius", 1.0)))

    @classmethod
    def from_json(cls, text: str) -> RegularSeries:
        return cls.from_dict(json.loads(text))


def _pad(c: np.ndarray, m: int) -> np.ndarray:
    if c.shape[-2] >= m:
        return c
    pad = [(0, 0)] * c.ndim
    pad[-2] = (0, m - c.shape[-2])
    return np.pad(c, pad)


def _check_domain(q: np.ndarray, radius: float) -> None:
    if np.any(qabs(q) >= radius):
        raise DomainError(f"point outside the open ball of radius {radius}")


def _horner(coeffs: np.ndarray, q: np.ndarray) -> np.ndarray:
    # a_0 + q (a_1 + q (a_2 + ...)); valid since q^n a_n = q (q^{n-1} a_n).
    # coeffs may carry leading batch axes matching q: (..., N + 1, 4).
    acc = coeffs[..., -1, :]
    for n in range(coeffs.shape[-2] - 2, -1, -1):
        acc = coeffs[..., n, :] + qmul(q, acc)
    return np.broadcast_to(acc, np.broadcast_shapes(acc.shape, q.shape)).copy()


def evaluate(f: RegularSeries, q):
    """Value of ``f`` at a Quaternion (returns Quaternion) or array of points."""
    scalar = isinstance(q, (Quaternion, ImaginaryUnit, int, float))
    qa = as_array(q)
    _check_domain(qa, f.radius)
    out = _horner(f.coeffs, qa)
    return Quaternion.from_array(out) if scalar else out


def evaluate_naive(f: RegularSeries, q) -> np.ndarray:
    """Term-by-term ``sum q^n a_n`` with explicit powers; reference only."""
    qa = as_array(q)
    total = np.zeros(np.broadcast_shapes(qa.shape, (4,)))
    power = np.zeros_like(total)
    power[..., 0] = 1.0
    for a in f.coeffs:
        total = total + qmul(power, a)
        power = qmul(power, qa)
    return total


def slice_derivative(f: RegularSeries) -> RegularSeries:
    c = f.coeffs
    if c.shape[0] == 1:
        return RegularSeries(np.zeros((1, 4)), f.radius)
    n = np.arange(1, c.shape[0], dtype=float)[:, None]
    return RegularSeries(c[1:] * n, f.radius)


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cauchy product of coefficient stacks ``(..., K, 4)`` and ``(..., M, 4)``."""
    k, m = a.shape[-2], b.shape[-2]
    prod = qmul(a[..., :, None, :], b[..., None, :, :])  # (..., K, M, 4)
    out = np.zeros(prod.shape[:-3] + (k + m - 1, 4))
    for i in range(k):
        out[..., i:i + m, :] += prod[..., i, :, :]
    return out


def star_product(f: RegularSeries, g: RegularSeries, max_degree: int = MAX_DEGREE) -> RegularSeries:
    """Regular product ``f * g``: coefficients ``c_n = sum_k a_k b_{n-k}``."""
    deg = f.truncation_degree + g.truncation_degree
    if deg > max_degree:
        raise TruncationError(f"star product degree {deg} exceeds cap {max_degree}")
    return RegularSeries(_convolve(f.coeffs, g.coeffs), min(f.radius, g.radius))


def star_product_many(factors: Sequence[RegularSeries], max_degree: int = MAX_DEGREE) -> RegularSeries:
    """Left-to-right product ``f_1 * f_2 * ... * f_m``."""
    if not factors:
        raise ValueError("empty product")
    out = factors[0]
    for g in factors[1:]:
        out = star_product(out, g, max_degree)
    return out


def transform_point(f: RegularSeries, q):
    """``f(q)^{-1} q f(q)``, a point on the same 2-sphere as ``q``."""
    scalar = isinstance(q, (Quaternion, ImaginaryUnit, int, float))
    qa = as_array(q)
    fq = evaluate(f, qa)
    if np.any(qabs(fq) == 0.0):
        raise DomainError("f vanishes at q; the transform is undefined")
    out = qmul(qmul(qinv(fq), qa), fq)
    return Quaternion.from_array(out) if scalar else out


def compose_powers(u: np.ndarray, n: int) -> np.ndarray:
    """Stack ``(u^0, ..., u^n)`` with shape ``(..., n + 1, 4)``."""
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape[:-1] + (n + 1, 4))
    out[..., 0, :] = 0.0
    out[..., 0, 0] = 1.0
    for k in range(1, n + 1):
        out[..., k, :] = qmul(out[..., k - 1, :], u)
    return out


def regular_compose_unit(f: RegularSeries, u) -> RegularSeries:
    """Regular composition with ``q -> q u``: coefficients ``u^n a_n``.

    For ``|u| > 1`` the radius shrinks to ``radius / |u|``.
    """
    ua = as_array(u)
    c = qmul(compose_powers(ua, f.truncation_degree), f.coeffs)
    nu = float(qabs(ua))
    radius = f.radius / nu if nu > 1.0 else f.radius
    return RegularSeries(c, radius)


def aux_g(f: RegularSeries, u, v) -> RegularSeries:
    """``(1/2) q^{-1} (f_u - f_v)``: coefficients ``(u^{n+1} - v^{n+1}) a_{n+1} / 2``."""
    c = f.coeffs
    if c.shape[0] == 1:
        return RegularSeries(np.zeros((1, 4)), f.radius)
    n = f.truncation_degree
    up = compose_powers(as_array(u), n)
    vp = compose_powers(as_array(v), n)
    out = 0.5 * qmul(up[1:] - vp[1:], c[1:])
    return RegularSeries(out, f.radius)


def odd_part(f: RegularSeries) -> RegularSeries:
    c = f.coeffs.copy()
    c[0::2] = 0.0
    return RegularSeries(c, f.radius)


@dataclass(frozen=True)
class SplitPair:
    """Holomorphic components ``F, G`` on the slice of ``I`` with ``f = F + G J``.

    Coefficients are complex numbers ``a + b i`` standing for ``a + b I``.
    """

    F_coeffs: np.ndarray
    G_coeffs: np.ndarray
    I: ImaginaryUnit
    J: ImaginaryUnit

    def evaluate(self, z: complex) -> Quaternion:
        """``F(z) + G(z) J`` for ``z`` given as a complex number in the slice."""
        F = np.polynomial.polynomial.polyval(z, self.F_coeffs)
        G = np.polynomial.polynomial.polyval(z, self.G_coeffs)
        Fq = _slice_to_quaternion(F, self.I)
        Gq = _slice_to_quaternion(G, self.I)
        return Quaternion.from_array(Fq + qmul(Gq, self.J.to_array()))


def _slice_to_quaternion(z, unit: ImaginaryUnit) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return z.real[..., None] * np.array([1.0, 0, 0, 0]) + z.imag[..., None] * unit.to_array()


def split(f: RegularSeries, I: ImaginaryUnit, J: ImaginaryUnit) -> SplitPair:
    """Write each ``a_n = b_n + c_n J`` with ``b_n, c_n`` in the slice of ``I``."""
    Ia, Ja = I.to_array(), J.to_array()
    if abs(float(Ia @ Ja)) > 1e-10:
        raise DomainError("split requires orthogonal imaginary units")
    a = f.coeffs
    re = a[:, 0]
    im = a @ Ia
    b = re[:, None] * np.array([1.0, 0, 0, 0]) + im[:, None] * Ia
    c = -qmul(a - b, Ja)
    return SplitPair(re + 1j * im, c[:, 0] + 1j * (c @ Ia), I, J)


def representation_eval(f: RegularSeries, x: float, y: float, I: ImaginaryUnit, J: ImaginaryUnit) -> Quaternion:
    """Value at ``x + y I`` reconstructed from values on the slice of ``J``."""
    if x * x + y * y >= f.radius ** 2:
        raise DomainError(f"point outside the open ball of radius {f.radius}")
    Ja = J.to_array()
    one = np.array([1.0, 0, 0, 0])
    fp = evaluate(f, x * one + y * Ja)
    fm = evaluate(f, x * one - y * Ja)
    out = 0.5 * (fp + fm) + qmul(I.to_array(), 0.5 * qmul(Ja, fm - fp))
    return Quaternion.from_array(out)


def normalize_hat(f: RegularSeries) -> RegularSeries:
    """Right-multiply by ``a_N^{-1} |a_N|``, ``a_N`` the first nonvanishing coefficient."""
    mods = qabs(f.coeffs)
    nz = np.flatnonzero(mods > ZERO_COEFF)
    if nz.size == 0:
        raise DegenerateInputError("identically zero series has no normalization")
    aN = f.coeffs[nz[0]]
    out = qmul(f.coeffs, qinv(aN) * mods[nz[0]])
    out[nz[0]] = [mods[nz[0]], 0.0, 0.0, 0.0]
    return RegularSeries(out, f.radius)
