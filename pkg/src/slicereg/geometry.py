"""n-diameters of finite point clouds and reference values for discs and balls."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .quaternion import ImaginaryUnit, Quaternion, as_array, qmul

__all__ = [
    "PointCloud",
    "NDiameterResult",
    "BudgetError",
    "UnsupportedValueError",
    "log_vandermonde",
    "n_diameter_value",
    "diameter",
    "n_diameter_exact",
    "n_diameter_exchange",
    "disc_n_diameter",
    "ball_n_diameter",
    "cube_roots_config",
]

EXACT_BUDGET = 10**7


class BudgetError(RuntimeError):
    """An exhaustive search would exceed its combinatorial budget."""


class UnsupportedValueError(ValueError):
    """No analytic reference value is available for this argument."""


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array([as_array(p) for p in self.points], dtype=float) if not isinstance(
            self.points, np.ndarray) else np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ValueError(f"points must have shape (m, 4), got {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def scaled(self, r: float) -> PointCloud:
        return PointCloud(self.points * r)

    def to_dict(self) -> dict:
        return {"points": self.points.tolist()}

    @classmethod
    def from_dict(cls, payload: dict) -> PointCloud:
        return cls(np.asarray(payload["points"], dtype=float))

    @classmethod
    def from_json(cls, text: str) -> PointCloud:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class NDiameterResult:
    value: float
    witnesses: np.ndarray
    method: str
    n: int = 2
    extra: dict = field(default_factory=dict)


def log_vandermonde(points: np.ndarray) -> np.ndarray:
    """Sum over pairs ``j < k`` of ``log |w_k - w_j|`` for configurations ``(..., n, 4)``.

    Coincident points give ``-inf``.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[-2]
    j, k = np.triu_indices(n, 1)
    d = np.linalg.norm(pts[..., k, :] - pts[..., j, :], axis=-1)
    with np.errstate(divide="ignore"):
        return np.sum(np.log(d), axis=-1)


def n_diameter_value(points: np.ndarray) -> np.ndarray:
    """``(prod_{j<k} |w_k - w_j|)^{2/(n(n-1))}`` for configurations ``(..., n, 4)``."""
    n = np.asarray(points).shape[-2]
    return np.exp(log_vandermonde(points) * 2.0 / (n * (n - 1)))


def _lex_key(points: np.ndarray) -> tuple:
    return tuple(tuple(p) for p in sorted(map(tuple, points)))


def diameter(cloud: PointCloud) -> NDiameterResult:
    pts = cloud.points
    if len(pts) == 0:
        raise ValueError("diameter of an empty cloud")
    if len(pts) == 1:
        return NDiameterResult(0.0, pts[[0, 0]].copy(), "exact", 2)
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    i, k = np.unravel_index(int(np.argmax(d)), d.shape)
    return NDiameterResult(float(d[i, k]), pts[[i, k]].copy(), "exact", 2)


def n_diameter_exact(cloud: PointCloud, n: int) -> NDiameterResult:
    """Exhaustive maximum over all ``n``-subsets of the cloud."""
    m = len(cloud)
    if n < 2 or m < n:
        raise ValueError(f"need 2 <= n <= cloud size, got n={n}, size={m}")
    if math.comb(m, n) > EXACT_BUDGET:
        raise BudgetError(f"C({m},{n}) exceeds {EXACT_BUDGET} subsets")
    pts = cloud.points
    best, best_idx = -np.inf, None
    chunk = 200_000
    combos = itertools.combinations(range(m), n)
    while True:
        idx = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if idx.size == 0:
            break
        lv = log_vandermonde(pts[idx])
        i = int(np.argmax(lv))
        if lv[i] > best:
            best, best_idx = lv[i], idx[i]
    value = 0.0 if best == -np.inf else math.exp(best * 2.0 / (n * (n - 1)))
    if best_idx is None:
        best_idx = np.arange(n)
    return NDiameterResult(value, pts[best_idx].copy(), "exact", n)


def n_diameter_exchange(cloud: PointCloud, n: int, cfg=None) -> NDiameterResult:
    """Multistart steepest single-point exchange; a lower bound of the exact value."""
    from .optimize import OptimizerConfig

    cfg = cfg or OptimizerConfig()
    m = len(cloud)
    if n < 2 or m < n:
        raise ValueError(f"need 2 <= n <= cloud size, got n={n}, size={m}")
    pts = cloud.points
    if n == 2:
        res = diameter(cloud)
        return NDiameterResult(res.value, res.witnesses, "exchange", 2)
    rng = np.random.default_rng(cfg.seed)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    with np.errstate(divide="ignore"):
        logd = np.log(dist)
    best_lv, best_sel = -np.inf, None
    for _ in range(cfg.multistarts):
        sel = rng.choice(m, size=n, replace=False)
        lv = _subset_logv(logd, sel)
        for _ in range(cfg.refinement_iterations):
            # gain of replacing member s by candidate c
            others = [np.delete(sel, s) for s in range(n)]
            contrib = np.array([logd[np.ix_(o, np.arange(m))].sum(axis=0) for o in others])
            current = np.array([logd[sel[s], others[s]].sum() for s in range(n)])
            gain = contrib - current[:, None]
            gain[np.isnan(gain)] = -np.inf
            gain[:, sel] = -np.inf
            s, c = np.unravel_index(int(np.argmax(gain)), gain.shape)
            if not gain[s, c] > 0:
                break
            sel = sel.copy()
            sel[s] = c
            lv = _subset_logv(logd, sel)
        if lv > best_lv or (lv == best_lv and best_sel is not None
                            and _lex_key(pts[sel]) < _lex_key(pts[best_sel])):
            best_lv, best_sel = lv, sel
    value = 0.0 if best_lv == -np.inf else math.exp(best_lv * 2.0 / (n * (n - 1)))
    return NDiameterResult(value, pts[np.sort(best_sel)].copy(), "exchange", n)


def _subset_logv(logd: np.ndarray, sel: np.ndarray) -> float:
    j, k = np.triu_indices(len(sel), 1)
    return float(logd[sel[j], sel[k]].sum())


def disc_n_diameter(n: int) -> float:
    """n-diameter of the closed unit disc, ``n^{1/(n-1)}``, attained at roots of unity."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return float(n ** (1.0 / (n - 1)))


def ball_n_diameter(n: int) -> float:
    """n-diameter of the closed unit ball of quaternions, known for ``n <= 4``."""
    if n == 2:
        return 2.0
    if n == 3:
        return math.sqrt(3.0)
    if n == 4:
        # edge of a regular tetrahedron inscribed in a unit 2-sphere
        return math.sqrt(8.0 / 3.0)
    raise UnsupportedValueError(f"no reference n-diameter of the ball for n={n}")


def cube_roots_config(unit: ImaginaryUnit, u: Quaternion) -> PointCloud:
    """The points ``u e^{2 pi j I / 3}``, ``j = 1, 2, 3``."""
    ua = as_array(u)
    if abs(float(np.linalg.norm(ua)) - 1.0) > 1e-12:
        raise ValueError("u must lie on the unit sphere")
    Ia = unit.to_array()
    pts = []
    for j in (1, 2, 3):
        t = 2.0 * math.pi * j / 3.0
        e = np.array([math.cos(t), 0.0, 0.0, 0.0]) + math.sin(t) * Ia
        pts.append(qmul(ua, e))
    return PointCloud(np.array(pts))
