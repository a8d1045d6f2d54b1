"""Identity catalog semantics on positive models and the negative control."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from nearcosym.catalog import CATALOG, CONTROL_PASS_IDS, catalog_by_id, evaluate_identity
from nearcosym.models import build_model
from nearcosym.structures import StructurePoint, orthonormal_frame

IDS = [c.ident for c in CATALOG]


def draws(st, fp, check, rng, count):
    out = []
    for _ in range(count):
        args = []
        for k in check.kinds:
            v = rng.normal(size=st.dim)
            if k == "horizontal":
                v = st.P @ v
            args.append(v / st.norm(v))
        out.append(args)
    return out


def worst_residual(name, check, n_points=3, n_draws=2, seed=0):
    acs = build_model(name)
    box = acs.manifold.domain.shrink(0.15)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        x = rng.uniform(box.lo, box.hi)
        st = StructurePoint.at(acs, x)
        fp = orthonormal_frame(acs, x)
        for args in draws(st, fp, check, rng, n_draws if check.arity else 1):
            worst = max(worst, evaluate_identity(check, st, fp, args))
    return worst


def test_catalog_shape():
    assert len(CATALOG) == 27
    assert IDS == [f"I{k}" for k in range(1, 28)]
    assert CONTROL_PASS_IDS == {"I1", "I3", "I8", "I27"}
    assert [c.ident for c in CATALOG if c.cosymplectic_only] == ["I26"]
    for c in CATALOG:
        assert set(c.kinds) <= {"any", "horizontal"}
        assert c.anchor


@pytest.mark.parametrize("ident", IDS)
def test_identities_hold_on_strict_model(ident):
    check = catalog_by_id(ident)
    if check.cosymplectic_only:
        pytest.skip("holds only for parallel structure tensor")
    assert worst_residual("s5-octonion", check, seed=3) <= 1e-7


@pytest.mark.parametrize("name", ["flat-r5", "s2xr"])
@pytest.mark.parametrize("ident", IDS)
def test_identities_hold_on_cosymplectic_models(name, ident):
    check = catalog_by_id(ident)
    assert worst_residual(name, check, n_points=2, seed=5) <= 1e-7


def test_theta_reflection_fails_off_cosymplectic():
    check = catalog_by_id("I26")
    assert worst_residual("s5-octonion", check, seed=7) > 1e-2


@pytest.mark.parametrize("ident", sorted(CONTROL_PASS_IDS))
def test_control_keeps_killing_consequences(ident):
    check = catalog_by_id(ident)
    assert worst_residual("sasakian-control", check, seed=11) <= 1e-7


def test_control_breaks_antisymmetry_hard():
    check = catalog_by_id("I2")
    assert worst_residual("sasakian-control", check, n_points=5, n_draws=3, seed=13) >= 1.0


def test_control_breaks_a_curvature_reflection():
    worst = max(
        worst_residual("sasakian-control", catalog_by_id("I15"), n_points=5, seed=17),
        worst_residual("sasakian-control", catalog_by_id("I16"), n_points=5, seed=17),
    )
    assert worst > 1e-2


def test_control_breaks_second_derivative_cross_relation():
    check = catalog_by_id("I7")
    assert worst_residual("sasakian-control", check, n_points=5, n_draws=3, seed=23) > 1e-2


def test_evaluate_identity_rejects_non_horizontal_argument():
    acs = build_model("s5-octonion")
    box = acs.manifold.domain.shrink(0.2)
    x = 0.5 * (np.asarray(box.lo) + np.asarray(box.hi))
    st = StructurePoint.at(acs, x)
    fp = orthonormal_frame(acs, x)
    check = catalog_by_id("I9")
    with pytest.raises(ValueError, match="horizontal"):
        evaluate_identity(check, st, fp, [st.xi])


def test_evaluate_identity_arity_mismatch():
    acs = build_model("flat-r5")
    x = np.zeros(5)
    st = StructurePoint.at(acs, x)
    fp = orthonormal_frame(acs, x)
    with pytest.raises(ValueError, match="expects"):
        evaluate_identity(catalog_by_id("I7"), st, fp, [])


def test_catalog_by_id_unknown():
    with pytest.raises(KeyError, match="unknown identity"):
        catalog_by_id("I99")


@settings(max_examples=15, deadline=None)
@given(hst.integers(min_value=0, max_value=10_000))
def test_antisymmetry_property_on_strict_model(seed):
    acs = build_model("s5-octonion")
    box = acs.manifold.domain.shrink(0.15)
    rng = np.random.default_rng(seed)
    x = rng.uniform(box.lo, box.hi)
    st = StructurePoint.at(acs, x)
    fp = orthonormal_frame(acs, x)
    check = catalog_by_id("I2")
    args = draws(st, fp, check, rng, 1)[0]
    assert evaluate_identity(check, st, fp, args) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(hst.integers(min_value=0, max_value=10_000))
def test_unit_field_rotation_property(seed):
    # theta(nab_X xi) = -nab_{theta X} xi for every direction
    acs = build_model("s5-octonion")
    box = acs.manifold.domain.shrink(0.15)
    rng = np.random.default_rng(seed)
    x = rng.uniform(box.lo, box.hi)
    st = StructurePoint.at(acs, x)
    fp = orthonormal_frame(acs, x)
    check = catalog_by_id("I7")
    args = draws(st, fp, check, rng, 1)[0]
    assert evaluate_identity(check, st, fp, args) <= 1e-12
