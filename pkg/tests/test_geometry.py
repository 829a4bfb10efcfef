import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slicereg.geometry import (
    BudgetError,
    PointCloud,
    UnsupportedValueError,
    ball_n_diameter,
    cube_roots_config,
    diameter,
    disc_n_diameter,
    n_diameter_exact,
    n_diameter_exchange,
    n_diameter_value,
)
from slicereg.optimize import Block, OptimizerConfig, maximize
from slicereg.quaternion import ImaginaryUnit, Quaternion, qmul


def roots_of_unity(n, unit=(1.0, 0.0, 0.0)):
    Ia = np.concatenate([[0.0], unit])
    t = 2 * np.pi * np.arange(n) / n
    return PointCloud(np.cos(t)[:, None] * np.eye(4)[0] + np.sin(t)[:, None] * Ia)


def ball_points(rng, m, dim=4):
    d = rng.standard_normal((m, dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(0, 1, (m, 1)) ** (1 / dim)


def regular_tetrahedron():
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)
    return np.concatenate([np.zeros((4, 1)), v], axis=1)


def test_diameter_examples():
    assert diameter(PointCloud(np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0]]))).value == 2.0
    assert diameter(PointCloud(np.zeros((1, 4)))).value == 0.0
    assert math.isclose(diameter(roots_of_unity(4)).value, 2.0, rel_tol=1e-15)
    with pytest.raises(ValueError):
        diameter(PointCloud(np.zeros((0, 4))))


def test_exact_examples(rng):
    cloud = PointCloud(ball_points(rng, 12))
    assert n_diameter_exact(cloud, 2).value == pytest.approx(diameter(cloud).value, rel=1e-12)
    assert n_diameter_exact(roots_of_unity(3), 3).value == pytest.approx(math.sqrt(3), abs=1e-12)
    assert n_diameter_exact(roots_of_unity(4), 4).value == pytest.approx(4 ** (1 / 3), abs=1e-12)


def test_exact_guards():
    with pytest.raises(ValueError):
        n_diameter_exact(roots_of_unity(3), 4)
    big = PointCloud(np.zeros((200, 4)))
    with pytest.raises(BudgetError):
        n_diameter_exact(big, 5)


def test_coincident_points_give_zero():
    cloud = PointCloud(np.zeros((3, 4)))
    assert n_diameter_exact(cloud, 3).value == 0.0


def test_result_value_matches_witnesses(rng):
    cloud = PointCloud(ball_points(rng, 15))
    for n in (2, 3, 4):
        res = n_diameter_exact(cloud, n)
        assert abs(float(n_diameter_value(res.witnesses)) - res.value) <= 1e-12


def test_exchange(rng):
    cloud = PointCloud(ball_points(rng, 30))
    assert n_diameter_exchange(cloud, 2).value == diameter(cloud).value
    cfg = OptimizerConfig(multistarts=8, seed=3)
    for n in (3, 4):
        ex = n_diameter_exchange(cloud, n, cfg)
        assert ex.value <= n_diameter_exact(cloud, n).value + 1e-12
    a = n_diameter_exchange(cloud, 3, cfg)
    b = n_diameter_exchange(cloud, 3, cfg)
    assert a.value == b.value and np.array_equal(a.witnesses, b.witnesses)


def test_exchange_large_cloud_bounded(rng):
    cloud = PointCloud(ball_points(rng, 200))
    assert n_diameter_exchange(cloud, 3).value <= math.sqrt(3) + 1e-9


def test_exchange_matches_exact_on_small_clouds():
    for seed in range(5):
        cloud = PointCloud(ball_points(np.random.default_rng(seed), 14))
        cfg = OptimizerConfig(multistarts=16, seed=seed)
        assert n_diameter_exchange(cloud, 3, cfg).value == pytest.approx(n_diameter_exact(cloud, 3).value, rel=1e-12)


def test_disc_values():
    assert disc_n_diameter(2) == 2.0
    assert disc_n_diameter(3) == pytest.approx(math.sqrt(3), abs=1e-15)
    assert disc_n_diameter(4) == pytest.approx(1.5874011, abs=1e-7)
    with pytest.raises(ValueError):
        disc_n_diameter(1)


def test_ball_values():
    assert ball_n_diameter(2) == 2.0
    assert ball_n_diameter(3) == pytest.approx(1.7320508, abs=1e-7)
    assert ball_n_diameter(4) == pytest.approx(1.6329932, abs=1e-7)
    with pytest.raises(UnsupportedValueError):
        ball_n_diameter(5)


def test_tetrahedron_brute_force():
    """Confirms the 4-point value of the ball before trusting the constant."""
    tet = regular_tetrahedron()
    assert float(n_diameter_value(tet)) == pytest.approx(math.sqrt(8 / 3), abs=1e-14)
    rng = np.random.default_rng(2024)
    configs = ball_points(rng, 4 * 100_000).reshape(100_000, 4, 4)
    vals = n_diameter_value(configs)
    assert vals.max() < math.sqrt(8 / 3)
    # refine the best random configurations continuously
    top = configs[np.argsort(-vals)[:8]].reshape(8, 16)
    res = maximize(lambda X: n_diameter_value(X.reshape(len(X), 4, 4)), [Block("ball", 4)] * 4,
                   OptimizerConfig(multistarts=8), warm_starts=top)
    assert res.value == pytest.approx(math.sqrt(8 / 3), abs=1e-3)
    assert res.value <= math.sqrt(8 / 3) + 1e-9
    # a cloud containing the tetrahedron: exhaustive search returns it
    cloud = PointCloud(np.concatenate([tet, ball_points(rng, 40)]))
    assert n_diameter_exact(cloud, 4).value == pytest.approx(math.sqrt(8 / 3), abs=1e-12)


def test_slice_confined_four_points():
    res = maximize(lambda X: n_diameter_value(X.reshape(len(X), 4, 2)), [Block("ball", 2)] * 4,
                   OptimizerConfig(multistarts=8))
    assert res.value == pytest.approx(disc_n_diameter(4), abs=1e-6)
    assert ball_n_diameter(4) - res.value > 0.04


def test_cube_roots():
    cloud = cube_roots_config(ImaginaryUnit(1, 0, 0), Quaternion(1.0))
    want = [[-0.5, math.sqrt(3) / 2, 0, 0], [-0.5, -math.sqrt(3) / 2, 0, 0], [1, 0, 0, 0]]
    assert np.allclose(cloud.points, want, atol=1e-15)
    with pytest.raises(ValueError):
        cube_roots_config(ImaginaryUnit(1, 0, 0), Quaternion(2.0))


@given(st.integers(0, 2**32 - 1))
def test_cube_roots_equilateral(seed):
    rng = np.random.default_rng(seed)
    unit = ImaginaryUnit.from_vector(rng.standard_normal(3))
    u = rng.standard_normal(4)
    cloud = cube_roots_config(unit, Quaternion.from_array(u / np.linalg.norm(u)))
    p = cloud.points
    for j, k in ((0, 1), (0, 2), (1, 2)):
        assert abs(np.linalg.norm(p[j] - p[k]) - math.sqrt(3)) <= 1e-12
    assert n_diameter_exact(cloud, 3).value == pytest.approx(math.sqrt(3), abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(3, 6))
def test_vandermonde_bound_in_disc(seed, n):
    rng = np.random.default_rng(seed)
    pts = ball_points(rng, n, dim=2)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    j, k = np.triu_indices(n, 1)
    assert np.prod(d[j, k]) <= n ** (n / 2) + 1e-9


@given(st.integers(0, 2**32 - 1))
def test_cloud_invariances(seed):
    rng = np.random.default_rng(seed)
    pts = ball_points(rng, 9)
    cloud = PointCloud(pts)
    u = rng.standard_normal(4)
    u /= np.linalg.norm(u)
    shift = rng.standard_normal(4)
    r = rng.uniform(0.1, 2.0)
    for n in (2, 3, 4):
        base = n_diameter_exact(cloud, n).value
        assert base <= diameter(cloud).value + 1e-12
        assert abs(n_diameter_exact(cloud.scaled(r), n).value - r * base) <= 1e-12 * max(1, r * base)
        assert abs(n_diameter_exact(PointCloud(pts + shift), n).value - base) <= 1e-11
        assert abs(n_diameter_exact(PointCloud(qmul(u, pts)), n).value - base) <= 1e-11


def test_cloud_json():
    cloud = roots_of_unity(3)
    again = PointCloud.from_json('{"points": %s}' % cloud.points.tolist())
    assert np.array_equal(again.points, cloud.points)
    assert cloud.to_dict()["points"][0] == [1.0, 0.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        PointCloud(np.zeros((3, 3)))
