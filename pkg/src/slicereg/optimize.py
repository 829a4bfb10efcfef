"""Batched derivative-free maximization over products of balls and spheres.

Search variables are flat vectors made of blocks; each block is a point of a
closed ball or of a sphere in R^d. Every candidate is projected back onto its
blocks before evaluation, so objectives only ever see feasible points.
Objectives are vectorized: they map an ``(m, D)`` array to ``m`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "OptimizerConfig",
    "Block",
    "SearchResult",
    "fibonacci_sphere",
    "sphere3_grid",
    "project",
    "sample",
    "pattern_search",
    "maximize",
]

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget and tolerances shared by every maximization.

    ``sphere_grid`` is the number of points in a sphere sweep, ``radial_grid``
    the number of shells used when sampling a closed ball.
    """

    sphere_grid: int = 64
    radial_grid: int = 4
    multistarts: int = 8
    refinement_iterations: int = 500
    refine_step_decay: float = 0.5
    tolerance: float = 1e-6
    seed: int = 0
    initial_step: float = 0.25
    min_step: float = 1e-6

    def __post_init__(self):
        for name in ("sphere_grid", "radial_grid", "multistarts", "refinement_iterations"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 < self.refine_step_decay < 1.0:
            raise ValueError("refine_step_decay must lie in (0, 1)")
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.min_step <= self.initial_step:
            raise ValueError("need 0 < min_step <= initial_step")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Block:
    kind: str  # "ball" or "sphere"
    dim: int
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in ("ball", "sphere"):
            raise ValueError(f"unknown block kind {self.kind!r}")


@dataclass
class SearchResult:
    value: float
    x: np.ndarray
    values: np.ndarray
    xs: np.ndarray
    evaluations: int
    iterations: int
    trace: list = field(default_factory=list)


def _offsets(blocks: Sequence[Block]) -> list[tuple[int, int]]:
    out, start = [], 0
    for b in blocks:
        out.append((start, start + b.dim))
        start += b.dim
    return out


def project(X: np.ndarray, blocks: Sequence[Block]) -> np.ndarray:
    X = np.array(X, dtype=float, copy=True)
    for b, (s, e) in zip(blocks, _offsets(blocks)):
        seg = X[..., s:e]
        n = np.linalg.norm(seg, axis=-1, keepdims=True)
        if b.kind == "ball":
            scale = np.where(n > b.radius, b.radius / np.where(n > 0, n, 1.0), 1.0)
            X[..., s:e] = seg * scale
        else:
            bad = (n[..., 0] == 0.0)
            seg = np.where(bad[..., None], np.eye(b.dim)[0], seg)
            n = np.linalg.norm(seg, axis=-1, keepdims=True)
            X[..., s:e] = seg * (b.radius / n)
    return X


def fibonacci_sphere(m: int) -> np.ndarray:
    """Spiral points on the unit 2-sphere, ``(m, 3)``."""
    i = np.arange(m) + 0.5
    z = 1.0 - 2.0 * i / m
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def sphere3_grid(m: int) -> np.ndarray:
    """Low-discrepancy points on the unit 3-sphere, ``(m, 4)``.

    A Kronecker sequence in the unit cube pushed through the area-preserving
    map used for uniform random rotations.
    """
    alpha = np.array([0.8191725133961645, 0.6710436067037893, 0.5497004779019703])
    u = np.mod(0.5 + np.outer(np.arange(1, m + 1), alpha), 1.0)
    a, b = np.sqrt(1.0 - u[:, 0]), np.sqrt(u[:, 0])
    t1, t2 = 2 * math.pi * u[:, 1], 2 * math.pi * u[:, 2]
    # first point real and positive so real-axis witnesses are on the grid
    out = np.stack([a * np.cos(t1), a * np.sin(t1), b * np.cos(t2), b * np.sin(t2)], axis=-1)
    out[0] = [1.0, 0.0, 0.0, 0.0]
    return out


def _sphere_grid(dim: int, m: int) -> np.ndarray:
    if dim == 4:
        return sphere3_grid(m)
    if dim == 3:
        return fibonacci_sphere(m)
    if dim == 2:
        t = 2 * math.pi * np.arange(m) / m
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    raise ValueError(f"no sphere grid for dimension {dim}")


def sample(blocks: Sequence[Block], count: int, rng: np.random.Generator, cfg: OptimizerConfig) -> np.ndarray:
    """Random feasible points; ball radii are drawn from the radial shells."""
    cols = []
    shells = np.arange(1, cfg.radial_grid + 1) / cfg.radial_grid
    for b in blocks:
        d = rng.standard_normal((count, b.dim))
        d /= np.linalg.norm(d, axis=-1, keepdims=True)
        if b.kind == "ball":
            d *= (shells[rng.integers(0, len(shells), count)] * b.radius)[:, None]
        else:
            d *= b.radius
        cols.append(d)
    return np.concatenate(cols, axis=-1)


def sweep(objective: Objective, X: np.ndarray, blocks: Sequence[Block], index: int, m: int) -> tuple[np.ndarray, int]:
    """Replace block ``index`` of each row by the best of an ``m``-point sphere grid."""
    b = blocks[index]
    s, e = _offsets(blocks)[index]
    grid = _sphere_grid(b.dim, m) * b.radius
    if b.kind == "ball":
        grid = np.concatenate([grid, np.zeros((1, b.dim))])
    cand = np.repeat(X[:, None, :], len(grid) + 1, axis=1)
    cand[:, 1:, s:e] = grid[None]
    vals = objective(cand.reshape(-1, X.shape[1])).reshape(len(X), -1)
    best = np.argmax(vals, axis=1)
    return cand[np.arange(len(X)), best], vals.size


def _encode(X: np.ndarray, blocks: Sequence[Block]) -> np.ndarray:
    """Search parameters: sphere blocks as-is, ball blocks as (direction, radius)."""
    cols = []
    for b, (s, e) in zip(blocks, _offsets(blocks)):
        seg = X[:, s:e]
        if b.kind == "sphere":
            cols.append(seg)
            continue
        n = np.linalg.norm(seg, axis=-1, keepdims=True)
        d = np.where(n > 0, seg / np.where(n > 0, n, 1.0), np.eye(b.dim)[0])
        cols += [d, n]
    return np.concatenate(cols, axis=-1)


def _decode(P: np.ndarray, blocks: Sequence[Block]) -> tuple[np.ndarray, np.ndarray]:
    """Normalize parameters in place of a projection and return (params, points)."""
    P = np.array(P, dtype=float, copy=True)
    cols, i = [], 0
    for b in blocks:
        d = P[..., i:i + b.dim]
        n = np.linalg.norm(d, axis=-1, keepdims=True)
        d = np.where(n > 0, d / np.where(n > 0, n, 1.0), np.eye(b.dim)[0])
        P[..., i:i + b.dim] = d
        if b.kind == "sphere":
            cols.append(d * b.radius)
            i += b.dim
        else:
            t = np.clip(P[..., i + b.dim], 0.0, b.radius)
            P[..., i + b.dim] = t
            cols.append(d * t[..., None])
            i += b.dim + 1
    return P, np.concatenate(cols, axis=-1)


RACE_EVERY = 20
RACE_MARGIN = 0.02


def pattern_search(objective: Objective, X0: np.ndarray, blocks: Sequence[Block], cfg: OptimizerConfig):
    """Compass search with a search step, from every row of ``X0`` simultaneously.

    Ball blocks are searched as a direction on the sphere plus a radius clipped
    to ``[0, R]``, so optima on the boundary sphere remain reachable by
    coordinate polls. Each iteration polls ``p +- step * e_i``. The poll values
    also give a central-difference gradient; a short line search along that
    gradient, preconditioned by a BFGS estimate, is tried as well. The best
    improving point is accepted; if nothing improves the step is multiplied by
    ``cfg.refine_step_decay``. Rows stop once their step drops below
    ``cfg.min_step``. Every ``RACE_EVERY`` iterations, rows trailing the
    current leader by more than ``RACE_MARGIN`` (relative) are retired.
    """
    P, X = _decode(_encode(project(X0, blocks), blocks), blocks)
    F = objective(X)
    F = np.where(np.isnan(F), -np.inf, F)
    S, D = P.shape
    rad_idx, rad_max, i = [], [], 0
    for b in blocks:
        i += b.dim
        if b.kind == "ball":
            rad_idx.append(i)
            rad_max.append(b.radius)
            i += 1
    rad_idx = np.array(rad_idx, dtype=int)
    rad_max = np.array(rad_max)
    step = np.full(S, cfg.initial_step)
    E = np.concatenate([np.eye(D), -np.eye(D)])
    lams = np.array([2.0, 1.0, 0.5, 0.25, 0.125])
    H = np.repeat(np.eye(D)[None], S, axis=0)
    fresh = np.ones(S, dtype=bool)
    g_prev = np.zeros((S, D))
    p_prev = P.copy()
    evals, it = S, 0
    for it in range(1, cfg.refinement_iterations + 1):
        if it % RACE_EVERY == 0 and np.isfinite(F).any():
            # racing: retire rows that trail the leader by a wide margin
            top = np.max(F)
            step[F < top - RACE_MARGIN * max(1.0, abs(top))] = 0.0
        active = np.flatnonzero(step >= cfg.min_step)
        if active.size == 0:
            break
        A = active.size
        h = step[active]
        polls = P[active, None, :] + h[:, None, None] * E[None]
        pp, px = _decode(polls.reshape(-1, D), blocks)
        vals = objective(px).reshape(A, 2 * D)
        evals += vals.size
        vals = np.where(np.isfinite(vals), vals, -np.inf)
        g = (vals[:, :D] - vals[:, D:]) / (2.0 * h[:, None])
        g = np.where(np.isfinite(g), g, 0.0)
        # projected gradient: drop radius components pushing against a bound
        Pa = P[active]
        at_top = (Pa[:, rad_idx] >= rad_max) & (g[:, rad_idx] > 0)
        at_bot = (Pa[:, rad_idx] <= 0.0) & (g[:, rad_idx] < 0)
        gr = g[:, rad_idx]
        gr[at_top | at_bot] = 0.0
        g[:, rad_idx] = gr

        # BFGS update of the inverse Hessian of -F
        Ha = H[active]
        sv = P[active] - p_prev[active]
        yv = g_prev[active] - g
        sy = np.einsum("ij,ij->i", sv, yv)
        ok = (~fresh[active]) & (sy > 1e-12 * np.linalg.norm(sv, axis=1) * np.linalg.norm(yv, axis=1))
        if np.any(ok):
            rho = 1.0 / sy[ok]
            Hs = Ha[ok]
            V = np.eye(D)[None] - rho[:, None, None] * sv[ok][:, :, None] * yv[ok][:, None, :]
            Ha[ok] = V @ Hs @ V.transpose(0, 2, 1) + rho[:, None, None] * sv[ok][:, :, None] * sv[ok][:, None, :]
        gn = np.linalg.norm(g, axis=1)
        reset = fresh[active] | ~ok
        scale = h / np.where(gn > 0, gn, 1.0)
        Ha[reset] = np.eye(D)[None] * scale[reset][:, None, None]
        H[active] = Ha
        d = np.einsum("ijk,ik->ij", Ha, g)
        # keep the search step within a few stencil widths
        dn = np.linalg.norm(d, axis=1)
        cap = 8.0 * h * np.sqrt(D)
        d *= np.minimum(1.0, cap / np.where(dn > 0, dn, 1.0))[:, None]
        lines = P[active, None, :] + lams[None, :, None] * d[:, None, :]
        lp, lx = _decode(lines.reshape(-1, D), blocks)
        lvals = objective(lx).reshape(A, len(lams))
        evals += lvals.size
        lvals = np.where(np.isfinite(lvals), lvals, -np.inf)

        allv = np.concatenate([lvals, vals], axis=1)
        allp = np.concatenate([lp.reshape(A, -1, D), pp.reshape(A, 2 * D, D)], axis=1)
        allx = np.concatenate([lx.reshape(A, len(lams), -1), px.reshape(A, 2 * D, -1)], axis=1)
        j = np.argmax(allv, axis=1)
        best = allv[np.arange(A), j]
        up = best > F[active]
        moved = active[up]
        p_prev[active] = P[active]
        g_prev[active] = g
        fresh[active] = False
        P[moved] = allp[up, j[up]]
        X[moved] = allx[up, j[up]]
        F[moved] = best[up]
        failed = active[~up]
        step[failed] *= cfg.refine_step_decay
        fresh[failed] = True
    return X, F, evals, it


def maximize(
    objective: Objective,
    blocks: Sequence[Block],
    cfg: OptimizerConfig,
    warm_starts: np.ndarray | None = None,
    sweep_block: int | None = None,
    pool_size: int | None = None,
) -> SearchResult:
    """Multistart maximization: random pool, sphere sweep, then compass refinement."""
    rng = np.random.default_rng(cfg.seed)
    D = sum(b.dim for b in blocks)
    pool = sample(blocks, pool_size or cfg.multistarts * cfg.sphere_grid, rng, cfg)
    pv = objective(pool)
    pv = np.where(np.isnan(pv), -np.inf, pv)
    evals = len(pool)
    order = np.argsort(-pv, kind="stable")[: 2 * cfg.multistarts]
    starts = pool[order]
    if warm_starts is not None and len(warm_starts):
        starts = np.concatenate([project(np.asarray(warm_starts, dtype=float).reshape(-1, D), blocks), starts])
    if sweep_block is not None:
        starts, n = sweep(objective, starts, blocks, sweep_block, cfg.sphere_grid)
        evals += n
        sv = objective(starts)
        evals += len(starts)
        n_warm = 0 if warm_starts is None else len(np.asarray(warm_starts).reshape(-1, D))
        keep = np.argsort(-sv[n_warm:], kind="stable")[: cfg.multistarts] + n_warm
        starts = np.concatenate([starts[:n_warm], starts[keep]])
    else:
        n_warm = 0 if warm_starts is None else len(np.asarray(warm_starts).reshape(-1, D))
        starts = starts[: n_warm + cfg.multistarts]
    X, F, n, iters = pattern_search(objective, starts, blocks, cfg)
    evals += n
    i = int(np.argmax(F))
    return SearchResult(float(F[i]), X[i].copy(), F, X, evals, iters)
