"""Regular diameters of images of balls and the radial ratio profiles.

All values are maxima found by :func:`slicereg.optimize.maximize`, hence lower
bounds of the true suprema. The point ``q`` (or ``z``) is searched on the
sphere ``|q| = r`` only: the objectives are moduli of regular (resp.
holomorphic) functions of ``q``, which attain their maximum over the closed
ball on its boundary.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import UnsupportedValueError, ball_n_diameter
from .optimize import Block, OptimizerConfig, maximize, pattern_search, project, sample
from .quaternion import DomainError, ImaginaryUnit, qabs, qconj, qmul
from .series import (
    MAX_DEGREE,
    RegularSeries,
    TruncationError,
    _convolve,
    _horner,
    compose_powers,
    normalize_hat,
)

__all__ = [
    "FunctionalReport",
    "RadialProfile",
    "lex_pairs",
    "regular_diameter",
    "regular_n_diameter",
    "slice_3_diameter",
    "image_diameter",
    "phi_profile",
    "value_profile",
    "phi_hat_3_profile",
    "regular_n_objective",
    "slice_3_objective",
    "g_hat_series",
]


@dataclass
class FunctionalReport:
    value: float
    witnesses: dict
    evaluations: int
    method: str
    x: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witnesses": {k: np.asarray(v).tolist() for k, v in self.witnesses.items()},
            "evaluations": self.evaluations,
            "method": self.method,
        }


@dataclass
class RadialProfile:
    r_values: np.ndarray
    values: np.ndarray
    functional: str
    n: int
    reports: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.r_values = np.asarray(self.r_values, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.r_values.shape != self.values.shape:
            raise ValueError("r_values and values must have equal length")

    @property
    def spread(self) -> float:
        return float(self.values.max() - self.values.min())

    def monotonicity_violations(self, slack: float) -> list[int]:
        """Indices ``i`` with ``values[i+1] < values[i] - slack``."""
        return [i for i in range(len(self.values) - 1) if self.values[i + 1] < self.values[i] - slack]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "value", "functional", "n"])
        for r, v in zip(self.r_values, self.values):
            w.writerow([repr(float(r)), repr(float(v)), self.functional, self.n])
        return buf.getvalue()


def lex_pairs(n: int) -> list[tuple[int, int]]:
    """Pairs ``(j, k)``, ``j < k``, in lexicographic order (0-based)."""
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def _check_radius(f: RegularSeries, r: float) -> None:
    if not 0.0 < r < f.radius:
        raise DomainError(f"r must lie in (0, {f.radius}), got {r}")


def _factor_coeffs(f: RegularSeries, n: int, ws: np.ndarray) -> list[np.ndarray]:
    """Coefficient stacks of ``f_{w_k} - f_{w_j}`` in lexicographic pair order."""
    W = compose_powers(ws, f.truncation_degree)  # (m, n, N+1, 4)
    return [qmul(W[:, k] - W[:, j], f.coeffs) for j, k in lex_pairs(n)]


def regular_n_objective(f: RegularSeries, n: int, q: np.ndarray, ws: np.ndarray,
                        route: str = "pointwise", max_degree: int = MAX_DEGREE) -> np.ndarray:
    """``|*-prod_{j<k} (f_{w_k} - f_{w_j})(q)|^{2/(n(n-1))}``.

    ``ws`` has shape ``(m, n, 4)`` and ``q`` shape ``(m, 4)``; the factors are
    taken in lexicographic pair order. ``route="coefficients"`` assembles the
    product series by convolution and evaluates it at ``q``. The default
    ``"pointwise"`` route uses ``(P * h)(q) = P(q) h(P(q)^{-1} q P(q))``
    (zero where ``P(q) = 0``) one factor at a time, which gives the same value
    without building the degree ``N n(n-1)/2`` series.
    """
    npairs = n * (n - 1) // 2
    if npairs * f.truncation_degree > max_degree:
        raise TruncationError(f"product degree {npairs * f.truncation_degree} exceeds cap {max_degree}")
    factors = _factor_coeffs(f, n, ws)
    if route == "coefficients":
        prod = factors[0]
        for c in factors[1:]:
            prod = _convolve(prod, c)
        vals = qabs(_horner(prod, q))
    elif route == "pointwise":
        val = _horner(factors[0], q)
        for c in factors[1:]:
            n2 = np.sum(val * val, axis=-1)
            safe = np.where(n2 > 0, n2, 1.0)[:, None]
            t = qmul(qmul(qconj(val), q), val) / safe
            t = np.where((n2 > 0)[:, None], t, q)
            val = qmul(val, _horner(c, t))
        vals = qabs(val)
    else:
        raise ValueError(f"unknown route {route!r}")
    if n == 2:
        return vals
    return vals ** (2.0 / (n * (n - 1)))


def _diff_objective(f: RegularSeries, r: float, route: str):
    N = f.truncation_degree
    a = f.coeffs

    def direct(X):
        U = compose_powers(X[:, 0:4], N)
        V = compose_powers(X[:, 4:8], N)
        return qabs(_horner(qmul(U - V, a), X[:, 8:12]))

    def aux(X):
        # 2 r |g_{u,v}(q)| with g_{u,v} = (1/2) q^{-1} (f_u - f_v)
        if N == 0:
            return np.zeros(len(X))
        U = compose_powers(X[:, 0:4], N)
        V = compose_powers(X[:, 4:8], N)
        g = 0.5 * qmul(U[:, 1:] - V[:, 1:], a[1:])
        return 2.0 * r * qabs(_horner(g, X[:, 8:12]))

    return {"direct": direct, "aux": aux}[route]


def _warm(reports) -> np.ndarray | None:
    """Stack warm-start vectors from reports or raw arrays."""
    if reports is None:
        return None
    if isinstance(reports, np.ndarray):
        return np.atleast_2d(reports)
    if not isinstance(reports, (list, tuple)):
        reports = [reports]
    xs = [np.asarray(getattr(rep, "x", rep), dtype=float) for rep in reports if rep is not None]
    xs = [x for x in xs if x.size]
    return np.array(xs) if xs else None


def regular_diameter(f: RegularSeries, r: float, cfg: OptimizerConfig | None = None,
                     warm_starts=None, route: str = "direct") -> FunctionalReport:
    """Regular diameter of ``f(rB)``: max of ``|f_u(q) - f_v(q)|`` over ``u, v`` in the
    closed ball and ``|q| = r``.

    ``route="aux"`` maximizes ``2 r |g_{u,v}(q)|`` instead, which has the same
    maximum.
    """
    cfg = cfg or OptimizerConfig()
    _check_radius(f, r)
    blocks = [Block("ball", 4), Block("ball", 4), Block("sphere", 4, r)]
    obj = _diff_objective(f, r, route)
    res = maximize(obj, blocks, cfg, warm_starts=_warm(warm_starts), sweep_block=2)
    x = res.x
    return FunctionalReport(
        res.value,
        {"u": x[0:4], "v": x[4:8], "q": x[8:12]},
        res.evaluations,
        f"pattern-search/{route}",
        x,
    )


def regular_n_diameter(f: RegularSeries, n: int, r: float, cfg: OptimizerConfig | None = None,
                       warm_starts=None) -> FunctionalReport:
    """Regular n-diameter of ``f(rB)`` built from the lexicographic *-product."""
    cfg = cfg or OptimizerConfig()
    if not 2 <= n <= 5:
        raise ValueError(f"n must lie in [2, 5], got {n}")
    _check_radius(f, r)
    blocks = [Block("ball", 4)] * n + [Block("sphere", 4, r)]
    if len(lex_pairs(n)) * f.truncation_degree > MAX_DEGREE:
        raise TruncationError(f"product degree exceeds cap {MAX_DEGREE}")

    def obj(X):
        ws = X[:, : 4 * n].reshape(-1, n, 4)
        return regular_n_objective(f, n, X[:, 4 * n:], ws)

    res = maximize(obj, blocks, cfg, warm_starts=_warm(warm_starts), sweep_block=n)
    x = res.x
    return FunctionalReport(
        res.value,
        {"w": x[: 4 * n].reshape(n, 4), "q": x[4 * n:]},
        res.evaluations,
        "pattern-search/star-product",
        x,
    )


def _slice_points(X: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit ``I`` (as quaternion) and the three points ``r w_i`` in its slice."""
    m = len(X)
    I = np.zeros((m, 4))
    I[:, 1:] = X[:, 0:3]
    w = X[:, 3:9].reshape(m, 3, 2)
    pts = r * (w[..., 0:1] * np.array([1.0, 0, 0, 0]) + w[..., 1:2] * I[:, None, :])
    return I, pts


def slice_3_objective(fhat: RegularSeries, p: np.ndarray) -> np.ndarray:
    """``|(f(p2)-f(p1)) (f(p3)-f(p1)) (f(p3)-f(p2))|^{1/3}`` for ``p`` of shape ``(m, 3, 4)``.

    The three points must share a slice.
    """
    F = _horner(fhat.coeffs, p)
    prod = qmul(qmul(F[:, 1] - F[:, 0], F[:, 2] - F[:, 0]), F[:, 2] - F[:, 1])
    return np.cbrt(qabs(prod))


def g_hat_series(fhat: RegularSeries, unit: ImaginaryUnit, w: np.ndarray) -> RegularSeries:
    """Triple-convolution series in ``z`` with coefficients
    ``sum (w2^j - w1^j)(w3^m - w1^m)(w3^l - w2^l) b_j b_m b_l`` over ``j + m + l = n``.

    ``w`` is ``(3, 2)``: complex coordinates of ``w_1, w_2, w_3`` in the slice.
    """
    b = fhat.coeffs
    N = fhat.truncation_degree
    wc = w[:, 0] + 1j * w[:, 1]
    pw = wc[:, None] ** np.arange(N + 1)[None, :]
    A, B, C = pw[1] - pw[0], pw[2] - pw[0], pw[2] - pw[1]
    Ia = unit.to_array()
    out = np.zeros((3 * N + 1, 4))
    for j in range(N + 1):
        for m in range(N + 1):
            bb = qmul(b[j], b[m])
            for l in range(N + 1):
                s = A[j] * B[m] * C[l]
                lhs = s.real * np.array([1.0, 0, 0, 0]) + s.imag * Ia
                out[j + m + l] += qmul(lhs, qmul(bb, b[l]))
    return RegularSeries(out, fhat.radius)


def slice_3_diameter(f: RegularSeries, r: float, cfg: OptimizerConfig | None = None,
                     warm_starts=None) -> FunctionalReport:
    """Slice 3-diameter of ``f(rB)``.

    The supremum runs over imaginary units ``I``, points ``w_i`` of the closed
    disc in the slice of ``I`` and ``|z| = r`` in that slice. Since ``z w_i``
    ranges over ``r`` times the closed disc as ``w_i`` does, ``z = r`` is fixed
    without loss. Each spiral point on the sphere of units seeds one
    refinement; ``extra["slice_values"]`` holds the per-slice maxima.
    """
    cfg = cfg or OptimizerConfig()
    _check_radius(f, r)
    fhat = normalize_hat(f)
    if f.is_constant(atol=0.0):
        return FunctionalReport(0.0, {"I": np.array([1.0, 0, 0]), "w": np.zeros((3, 2)), "z": r}, 0,
                                "constant", np.concatenate([[1.0, 0, 0], np.zeros(6)]),
                                {"slice_values": np.zeros(cfg.sphere_grid)})
    from .optimize import fibonacci_sphere

    blocks = [Block("sphere", 3)] + [Block("ball", 2)] * 3

    def obj(X):
        _, p = _slice_points(X, r)
        return slice_3_objective(fhat, p)

    rng = np.random.default_rng(cfg.seed)
    units = fibonacci_sphere(cfg.sphere_grid)
    k = cfg.multistarts * cfg.radial_grid
    ws = sample(blocks[1:], k, rng, cfg)
    cand = np.concatenate([np.repeat(units, k, axis=0), np.tile(ws, (len(units), 1))], axis=1)
    vals = obj(cand).reshape(len(units), k)
    starts = cand.reshape(len(units), k, -1)[np.arange(len(units)), np.argmax(vals, axis=1)]
    evals = cand.shape[0]
    warm = _warm(warm_starts)
    n_warm = 0
    if warm is not None:
        n_warm = len(warm)
        starts = np.concatenate([project(warm, blocks), starts])
    X, F, n, _ = pattern_search(obj, starts, blocks, cfg)
    evals += n
    i = int(np.argmax(F))
    x = X[i]
    return FunctionalReport(
        float(F[i]),
        {"I": x[0:3], "w": x[3:9].reshape(3, 2), "z": r},
        evals,
        "pattern-search/slices",
        x.copy(),
        {"slice_values": F[n_warm:], "slice_units": units, "warm_values": F[:n_warm]},
    )


def image_diameter(f: RegularSeries, r: float, cfg: OptimizerConfig | None = None) -> FunctionalReport:
    """Diameter of ``f`` over the closed ball of radius ``r``, searched on its boundary."""
    cfg = cfg or OptimizerConfig()
    _check_radius(f, r)
    blocks = [Block("sphere", 4, r), Block("sphere", 4, r)]

    def obj(X):
        return qabs(_horner(f.coeffs, X[:, 0:4]) - _horner(f.coeffs, X[:, 4:8]))

    res = maximize(obj, blocks, cfg, sweep_block=1)
    return FunctionalReport(res.value, {"q": res.x[0:4], "w": res.x[4:8]}, res.evaluations,
                            "pattern-search/image", res.x)


def _profile(run, r_values, cfg):
    r_values = np.asarray(r_values, dtype=float)
    if r_values.ndim != 1 or len(r_values) == 0 or np.any(np.diff(r_values) <= 0):
        raise ValueError("r_values must be a nonempty increasing sequence")
    reports = []
    for r in r_values:
        # continuation: the last few witnesses seed the next radius
        reports.append(run(r, reports[-3:] if reports else None))
    return reports


def value_profile(f: RegularSeries, functional: str, r_values: Sequence[float],
                  cfg: OptimizerConfig | None = None, n: int = 2) -> RadialProfile:
    """Raw functional values along increasing radii, with witness continuation.

    ``functional`` is ``"d"`` (regular n-diameter) or ``"d_hat"`` (slice
    3-diameter, ``n`` ignored).
    """
    cfg = cfg or OptimizerConfig()
    if functional == "d":
        run = lambda r, w: regular_n_diameter(f, n, r, cfg, warm_starts=w)  # noqa: E731
    elif functional == "d_hat":
        n = 3
        run = lambda r, w: slice_3_diameter(f, r, cfg, warm_starts=w)  # noqa: E731
    else:
        raise ValueError(f"unknown functional {functional!r}")
    reports = _profile(run, r_values, cfg)
    return RadialProfile(np.asarray(r_values, dtype=float), [rep.value for rep in reports], functional, n, reports)


def phi_profile(f: RegularSeries, n: int, r_values: Sequence[float], cfg: OptimizerConfig | None = None) -> RadialProfile:
    """``phi_n(r) = (regular n-diameter of f(rB)) / (d_n(B) r)``."""
    cfg = cfg or OptimizerConfig()
    if n not in (2, 3, 4):
        raise UnsupportedValueError(f"no reference n-diameter of the ball for n={n}")
    prof = value_profile(f, "d", r_values, cfg, n)
    vals = prof.values / (ball_n_diameter(n) * prof.r_values)
    return RadialProfile(prof.r_values, vals, "phi", n, prof.reports)


def phi_hat_3_profile(f: RegularSeries, r_values: Sequence[float], cfg: OptimizerConfig | None = None) -> RadialProfile:
    """``(slice 3-diameter of f(rB)) / (sqrt(3) r)``."""
    cfg = cfg or OptimizerConfig()
    prof = value_profile(f, "d_hat", r_values, cfg)
    vals = prof.values / (math.sqrt(3.0) * prof.r_values)
    return RadialProfile(prof.r_values, vals, "phi_hat", 3, prof.reports)
