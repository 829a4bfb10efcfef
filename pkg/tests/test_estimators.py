import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from slicereg.estimators import NDiameter, PhiProfileTransformer, RegularDiameter

AFFINE = np.array([[0.1, 0.2, -0.3, 0.0], [0.5, 0.5, 0.5, -0.5]])


def test_ndiameter_on_roots_of_unity():
    t = 2 * np.pi * np.arange(4) / 4
    X = np.stack([np.cos(t), np.sin(t), 0 * t, 0 * t], axis=1)
    est = NDiameter(n=4).fit(X)
    assert est.value_ == pytest.approx(4 ** (1 / 3), abs=1e-12)
    assert est.method_ == "exact"
    assert est.witnesses_.shape == (4, 4)
    assert NDiameter(n=3, method="exchange").fit(X).method_ == "exchange"


def test_params_protocol():
    est = NDiameter(n=3, seed=5)
    assert est.get_params()["n"] == 3
    c = clone(est).set_params(n=2)
    assert c.n == 2 and est.n == 3
    with pytest.raises(ValueError):
        NDiameter(method="magic").fit(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        NDiameter().fit(np.zeros((3, 3)))


def test_regular_diameter_estimator():
    cfg = {"sphere_grid": 16, "multistarts": 2, "refinement_iterations": 200}
    d = RegularDiameter(kind="d", n=2, r=0.5, **cfg).fit(AFFINE)
    assert d.value_ == pytest.approx(1.0, rel=1e-6)
    s = RegularDiameter(kind="d_hat", r=0.5, **cfg).fit(AFFINE)
    assert s.value_ == pytest.approx(math.sqrt(3) * 0.5, rel=1e-4)
    with pytest.raises(ValueError):
        RegularDiameter(kind="other").fit(AFFINE)


def test_phi_transformer():
    tr = PhiProfileTransformer(r_values=(0.3, 0.6), sphere_grid=16, multistarts=2, refinement_iterations=200)
    with pytest.raises(NotFittedError):
        tr.transform(AFFINE.reshape(1, -1))
    X = np.stack([AFFINE.ravel(), 2 * AFFINE.ravel()])
    out = tr.fit_transform(X)
    assert out.shape == (2, 2)
    assert np.allclose(out[0], 1.0, atol=1e-4) and np.allclose(out[1], 2.0, atol=1e-4)
    assert list(tr.get_feature_names_out()) == ["phi_0.3", "phi_0.6"]
    with pytest.raises(ValueError):
        tr.transform(np.zeros((1, 4)))
    with pytest.raises(ValueError):
        PhiProfileTransformer().fit(np.zeros((1, 5)))
