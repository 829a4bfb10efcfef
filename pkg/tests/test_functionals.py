import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicereg.functionals import (
    RadialProfile,
    _slice_points,
    g_hat_series,
    image_diameter,
    lex_pairs,
    phi_hat_3_profile,
    phi_profile,
    regular_diameter,
    regular_n_diameter,
    regular_n_objective,
    slice_3_diameter,
    slice_3_objective,
)
from slicereg.geometry import UnsupportedValueError, ball_n_diameter
from slicereg.optimize import sphere3_grid
from slicereg.quaternion import DomainError, ImaginaryUnit, qabs, qmul
from slicereg.series import (
    DegenerateInputError,
    RegularSeries,
    TruncationError,


    evaluate,
    normalize_hat,
    regular_compose_unit,
)

ONE, I, J, K = (np.eye(4)[i] for i in range(4))
TOL = 1e-6


def random_series(seed, deg=5):
    return RegularSeries(np.random.default_rng(seed).uniform(-1, 1, (deg + 1, 4)))


def unit_quat(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def affine(seed, modulus=1.0):
    rng = np.random.default_rng(seed)
    return RegularSeries([rng.uniform(-1, 1, 4), modulus * unit_quat(rng.standard_normal(4))])


# ------------------------------------------------------------ regular diameter

@pytest.mark.parametrize("r", [0.25, 0.5, 0.75])
def test_affine_regular_diameter(r):
    f = RegularSeries([np.array([0.3, -1, 0.2, 0.5]), np.array([0.6, 0.8, 0.0, 0.0]) * 1.5])
    rep = regular_diameter(f, r)
    assert rep.value == pytest.approx(2 * r * 1.5, rel=1e-6)


def test_constant_regular_diameter(fast_cfg):
    f = RegularSeries([np.array([1.0, 2.0, 3.0, 4.0])])
    assert regular_diameter(f, 0.5, fast_cfg).value == 0.0
    assert regular_n_diameter(RegularSeries([ONE, np.zeros(4)]), 3, 0.5, fast_cfg).value == 0.0


def test_square_against_dense_grid():
    r = 0.5
    f = RegularSeries.monomial(2, ONE)
    # independent brute force: u, v on shells times a sphere grid, q on a sphere grid
    dirs = np.concatenate([sphere3_grid(300), np.eye(4), -np.eye(4)])
    shells = np.array([0.5, 1.0])
    U = (shells[:, None, None] * dirs[None]).reshape(-1, 4)
    qs = r * sphere3_grid(20)
    sq = qmul(U, U)
    best = 0.0
    for q in qs:
        q2 = qmul(q, q)
        vals = qabs(qmul(q2, sq[:, None, :] - sq[None, :, :]))
        best = max(best, float(vals.max()))
    est = regular_diameter(f, r).value
    assert est == pytest.approx(best, rel=1e-4)
    assert est == pytest.approx(2 * r * r, rel=1e-6)


def test_regular_diameter_domain():
    f = random_series(0)
    for r in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            regular_diameter(f, r)


def test_witness_reproduces_value(fast_cfg):
    f = random_series(3)
    rep = regular_diameter(f, 0.6, fast_cfg)
    u, v, q = (rep.witnesses[k] for k in ("u", "v", "q"))
    fu, fv = regular_compose_unit(f, u), regular_compose_unit(f, v)
    assert float(qabs(evaluate(fu, q) - evaluate(fv, q))) == pytest.approx(rep.value, abs=1e-12)
    assert qabs(u) <= 1 + 1e-12 and qabs(v) <= 1 + 1e-12
    assert float(qabs(q)) == pytest.approx(0.6, abs=1e-12)
    assert rep.evaluations > 0


def test_aux_route_equivalence(fast_cfg):
    f = random_series(8)
    direct = regular_diameter(f, 0.5, fast_cfg).value
    aux = regular_diameter(f, 0.5, fast_cfg, route="aux").value
    assert aux == pytest.approx(direct, abs=10 * TOL)


def test_sandwich(fast_cfg):
    for seed in range(3):
        f = random_series(seed)
        d2 = regular_diameter(f, 0.5, fast_cfg).value
        diam = image_diameter(f, 0.5, fast_cfg).value
        assert diam <= d2 + TOL
        assert d2 <= 2 * diam + TOL


def test_translation_and_scaling(fast_cfg):
    f = random_series(11)
    base = regular_diameter(f, 0.5, fast_cfg).value
    assert regular_diameter(f.translate_to_origin(), 0.5, fast_cfg).value == pytest.approx(base, abs=TOL)
    assert regular_diameter(f.scale(2.5), 0.5, fast_cfg).value == pytest.approx(2.5 * base, rel=TOL)
    s3 = slice_3_diameter(f, 0.5, fast_cfg).value
    assert slice_3_diameter(f.translate_to_origin(), 0.5, fast_cfg).value == pytest.approx(s3, abs=TOL)
    assert slice_3_diameter(f.scale(0.4), 0.5, fast_cfg).value == pytest.approx(0.4 * s3, rel=TOL)
    d3 = regular_n_diameter(f, 3, 0.5, fast_cfg).value
    assert regular_n_diameter(f.translate_to_origin(), 3, 0.5, fast_cfg).value == pytest.approx(d3, abs=TOL)


def test_monotone_in_r(fast_cfg):
    f = random_series(5)
    vals = [regular_diameter(f, r, fast_cfg).value for r in (0.2, 0.4, 0.6, 0.8)]
    assert all(b >= a - 2 * TOL for a, b in zip(vals, vals[1:]))


# ------------------------------------------------------------ n-diameter

def test_lex_pairs():
    assert lex_pairs(4) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_n2_matches_regular_diameter(fast_cfg):
    f = random_series(2)
    a = regular_n_diameter(f, 2, 0.5, fast_cfg).value
    b = regular_diameter(f, 0.5, fast_cfg).value
    assert a == pytest.approx(b, abs=fast_cfg.tolerance)


@pytest.mark.parametrize("n", [3, 4])
def test_linear_n_diameter(n, fast_cfg):
    b = np.array([0.5, -0.5, 0.5, 0.5]) * 1.3
    f = RegularSeries([np.zeros(4), b])
    rep = regular_n_diameter(f, n, 0.5, fast_cfg)
    assert rep.value == pytest.approx(1.3 * 0.5 * ball_n_diameter(n), abs=1e-4)


def test_chain_below_regular_diameter(fast_cfg):
    for seed in (1, 2):
        f = random_series(seed)
        d2 = regular_diameter(f, 0.6, fast_cfg).value
        for n in (3, 4):
            assert regular_n_diameter(f, n, 0.6, fast_cfg).value <= d2 + fast_cfg.tolerance


def test_n_diameter_guards():
    f = random_series(0)
    with pytest.raises(ValueError):
        regular_n_diameter(f, 6, 0.5)
    with pytest.raises(TruncationError):
        regular_n_diameter(random_series(0, deg=10), 5, 0.5)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_pointwise_route_matches_coefficients(seed, n):
    rng = np.random.default_rng(seed)
    f = RegularSeries(rng.uniform(-1, 1, (int(rng.integers(1, 6)), 4)))
    ws = rng.uniform(-0.5, 0.5, (16, n, 4))
    q = rng.uniform(-0.45, 0.45, (16, 4))
    a = regular_n_objective(f, n, q, ws, route="coefficients")
    b = regular_n_objective(f, n, q, ws, route="pointwise")
    assert np.all(np.abs(a - b) <= 1e-10 * np.maximum(1.0, a))


def test_objective_at_witness(fast_cfg):
    f = random_series(4)
    rep = regular_n_diameter(f, 3, 0.5, fast_cfg)
    w, q = rep.witnesses["w"], rep.witnesses["q"]
    val = regular_n_objective(f, 3, q[None], w[None], route="coefficients")[0]
    assert val == pytest.approx(rep.value, abs=1e-12)


# ------------------------------------------------------------ slice 3-diameter

@pytest.mark.parametrize("r", [0.25, 0.5, 0.75])
def test_affine_slice_3(r, fast_cfg):
    f = affine(7)
    assert slice_3_diameter(f, r, fast_cfg).value == pytest.approx(math.sqrt(3) * r, rel=1e-4)


def test_slice_3_constant_and_zero(fast_cfg):
    assert slice_3_diameter(RegularSeries([I + J]), 0.5, fast_cfg).value == 0.0
    with pytest.raises(DegenerateInputError):
        slice_3_diameter(RegularSeries(np.zeros((3, 4))), 0.5, fast_cfg)


def test_factored_form_matches_convolution_series():
    rng = np.random.default_rng(99)
    for _ in range(20):
        unit = ImaginaryUnit.from_vector(rng.standard_normal(3))
        Ia = unit.to_array()
        # coefficients in the slice of the unit commute with z and w_i
        xy = rng.uniform(-1, 1, (5, 2))
        f = RegularSeries(xy[:, :1] * ONE + xy[:, 1:] * Ia)
        fhat = normalize_hat(f)
        w = rng.uniform(-0.7, 0.7, (3, 2))
        z = complex(*rng.uniform(-0.5, 0.5, 2))
        zw = z * (w[:, 0] + 1j * w[:, 1])
        pts = (zw.real[:, None] * ONE + zw.imag[:, None] * Ia)[None]
        lhs = slice_3_objective(fhat, pts)[0] ** 3
        series = g_hat_series(fhat, unit, w)
        rhs = float(qabs(evaluate(series, z.real * ONE + z.imag * Ia)))
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_factored_form_real_coefficients():
    rng = np.random.default_rng(5)
    c = np.zeros((4, 4))
    c[:, 0] = rng.uniform(-1, 1, 4)
    fhat = normalize_hat(RegularSeries(c))
    unit = ImaginaryUnit(0.0, 0.6, 0.8)
    Ia = unit.to_array()
    w = rng.uniform(-0.7, 0.7, (3, 2))
    z = 0.3 - 0.4j
    zw = z * (w[:, 0] + 1j * w[:, 1])
    pts = (zw.real[:, None] * ONE + zw.imag[:, None] * Ia)[None]
    lhs = slice_3_objective(fhat, pts)[0] ** 3
    rhs = float(qabs(evaluate(g_hat_series(fhat, unit, w), z.real * ONE + z.imag * Ia)))
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_slice_3_witness_consistency(fast_cfg):
    f = random_series(6)
    rep = slice_3_diameter(f, 0.5, fast_cfg)
    per_slice = np.asarray(rep.extra["slice_values"])
    assert len(per_slice) == fast_cfg.sphere_grid
    assert np.all(per_slice <= rep.value + 1e-15)
    attained = np.concatenate([per_slice, rep.extra["warm_values"]])
    assert np.max(attained) == rep.value
    _, pts = _slice_points(rep.x[None], 0.5)
    assert slice_3_objective(normalize_hat(f), pts)[0] == pytest.approx(rep.value, abs=1e-12)


# ------------------------------------------------------------ profiles

def test_radial_profile_type():
    with pytest.raises(ValueError):
        RadialProfile([0.1, 0.2], [1.0], "phi", 2)
    prof = RadialProfile([0.1, 0.2, 0.3], [1.0, 0.5, 2.0], "phi", 2)
    assert prof.spread == 1.5
    assert prof.monotonicity_violations(0.1) == [0]
    lines = prof.to_csv().splitlines()
    assert lines[0] == "r,value,functional,n"
    assert lines[1] == "0.1,1.0,phi,2"


def test_affine_profiles_constant(fast_cfg):
    f = affine(1)
    radii = [0.2, 0.5, 0.8]
    for n in (2, 3, 4):
        prof = phi_profile(f, n, radii, fast_cfg)
        assert np.all(np.abs(prof.values - 1.0) <= 1e-4)
    prof = phi_hat_3_profile(f, radii, fast_cfg)
    assert np.all(np.abs(prof.values - 1.0) <= 1e-4)


def test_phi_small_r_limit(fast_cfg):
    f = RegularSeries([np.zeros(4), ONE, np.zeros(4), 0.2 * ONE])
    assert phi_profile(f, 2, [1e-3], fast_cfg).values[0] == pytest.approx(1.0, abs=1e-2)
    g = random_series(21)
    a1 = float(qabs(g.coeffs[1]))
    assert phi_hat_3_profile(g, [1e-3], fast_cfg).values[0] == pytest.approx(a1, abs=1e-2)


def test_profiles_nondecreasing(fast_cfg):
    f = random_series(31)
    radii = np.linspace(0.1, 0.9, 5)
    for prof in (phi_profile(f, 2, radii, fast_cfg), phi_profile(f, 3, radii, fast_cfg),
                 phi_hat_3_profile(f, radii, fast_cfg)):
        assert prof.monotonicity_violations(2 * fast_cfg.tolerance) == []


def test_phi_hat_strictly_increasing_for_nonaffine(fast_cfg):
    f = RegularSeries([np.zeros(4), ONE, 0.5 * ONE])
    prof = phi_hat_3_profile(f, np.linspace(0.1, 0.9, 5), fast_cfg)
    assert prof.spread > 10 * fast_cfg.tolerance


def test_profile_errors(fast_cfg):
    f = random_series(0)
    with pytest.raises(UnsupportedValueError):
        phi_profile(f, 5, [0.5], fast_cfg)
    with pytest.raises(ValueError):
        phi_profile(f, 2, [0.5, 0.3], fast_cfg)
