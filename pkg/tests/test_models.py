"""Model registry and pointwise sanity of the concrete structures."""

import numpy as np
import pytest

from nearcosym.models import REGISTRY, build_model, model_names, sasakian_closed_form_sample
from nearcosym.structures import StructurePoint


def test_registry_names_and_classifications():
    assert model_names() == ["flat-r5", "s2xr", "s5-octonion", "sasakian-control"]
    assert REGISTRY["s5-octonion"].classification == "nearly-cosymplectic-strict"
    assert REGISTRY["sasakian-control"].classification == "negative-control"
    assert not REGISTRY["sasakian-control"].is_positive
    assert REGISTRY["flat-r5"].is_positive


def test_build_model_unknown_name():
    with pytest.raises(KeyError, match="unknown model"):
        build_model("moebius")


def test_flat_model_is_euclidean():
    acs = build_model("flat-r5")
    st = StructurePoint.at(acs, [0.2, -0.1, 0.4, 0.0, 0.3])
    assert np.allclose(st.geo.g, np.eye(5))
    assert np.abs(st.geo.riem).max() == 0.0
    assert np.abs(st.nab_theta).max() == 0.0
    assert np.abs(st.nab_xi).max() == 0.0


def test_product_model_metric_at_equator():
    acs = build_model("s2xr")
    st = StructurePoint.at(acs, [np.pi / 2, 0.0, 0.0])
    assert np.allclose(st.geo.g, np.eye(3), atol=1e-15)
    # theta squares to minus the identity on the sphere factor
    sq = st.theta @ st.theta
    assert np.allclose(sq[:2, :2], -np.eye(2), atol=1e-15)
    assert np.abs(st.nab_theta).max() <= 1e-13


def test_five_sphere_metric_matches_orthographic_chart():
    acs = build_model("s5-octonion")
    x = np.array([0.1, -0.2, 0.15, 0.05, -0.1])
    st = StructurePoint.at(acs, x)
    w2 = 1.0 - x @ x
    expected = np.eye(5) + np.outer(x, x) / w2
    assert np.allclose(st.geo.g, expected, atol=1e-14)


def test_five_sphere_structure_is_strict():
    # the tensor is not parallel: |nab xi| stays far from zero
    acs = build_model("s5-octonion")
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10):
        x = rng.uniform(-0.35, 0.35, size=5)
        st = StructurePoint.at(acs, x)
        v = rng.normal(size=5)
        v /= st.norm(v)
        worst = max(worst, st.norm(st.nab_xi_v(v)))
    assert worst >= 0.1


def test_sasakian_closed_form_sample_point():
    x, X = sasakian_closed_form_sample()
    acs = build_model("sasakian-control")
    st = StructurePoint.at(acs, x)
    X = np.asarray(X, dtype=float)
    # (nab_X theta)X = g(X,X) xi - eta(X) X for this structure
    lhs = st.nab_theta_v(X, X)
    rhs = st.inner(X, X) * st.xi - st.inner(X, st.xi) * X
    assert np.allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("name", model_names())
def test_unit_field_matches_dual_form(name):
    acs = build_model(name)
    rng = np.random.default_rng(7)
    box = acs.manifold.domain.shrink(0.2)
    for _ in range(4):
        x = rng.uniform(box.lo, box.hi)
        st = StructurePoint.at(acs, x)
        assert np.abs(st.eta - st.geo.g @ st.xi).max() <= 1e-12
        assert abs(st.norm(st.xi) - 1.0) <= 1e-12
