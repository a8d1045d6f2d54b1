"""Jet arithmetic against closed-form derivatives and the finite-difference oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearcosym import ad
from nearcosym.ad import Jet, partials, seed_coords

from fd_oracle import fd_partial


def poly2(c):
    # f(x, y) = 1 + 2x - y + 3x^2 y + x y^2 - 0.5 y^3
    x, y = c
    return 1 + 2 * x - y + 3 * x * x * y + x * y * y - 0.5 * y * y * y


def test_polynomial_derivatives_exact():
    x0, y0 = 0.7, -1.3
    jets = partials(lambda c: poly2(c), np.array([x0, y0]), order=3)
    assert jets.value == pytest.approx(poly2([x0, y0]), abs=0.0)
    # hand-computed partials
    fx = 2 + 6 * x0 * y0 + y0 * y0
    fy = -1 + 3 * x0 * x0 + 2 * x0 * y0 - 1.5 * y0 * y0
    assert jets.d1[0] == pytest.approx(fx, rel=1e-15)
    assert jets.d1[1] == pytest.approx(fy, rel=1e-15)
    fxx = 6 * y0
    fxy = 6 * x0 + 2 * y0
    fyy = 2 * x0 - 3 * y0
    assert jets.d2[0, 0] == pytest.approx(fxx, rel=1e-15)
    assert jets.d2[0, 1] == pytest.approx(fxy, rel=1e-15)
    assert jets.d2[1, 0] == pytest.approx(fxy, rel=1e-15)
    assert jets.d2[1, 1] == pytest.approx(fyy, rel=1e-15)
    # third order: f_xxy = 6, f_xyy = 2, f_yyy = -3, f_xxx = 0
    assert jets.d3[0, 0, 0] == pytest.approx(0.0, abs=1e-15)
    assert jets.d3[0, 0, 1] == pytest.approx(6.0, rel=1e-15)
    assert jets.d3[0, 1, 1] == pytest.approx(2.0, rel=1e-15)
    assert jets.d3[1, 1, 1] == pytest.approx(-3.0, rel=1e-15)


def transcendental(c):
    x, y, z = c
    return ad.sin(x * y) * ad.exp(z) + ad.sqrt(2 + x) / (1 + y * y) - ad.log(2 + z) * ad.cos(x)


def test_transcendental_chain_rule_vs_closed_form():
    x, y, z = 0.4, -0.2, 0.9
    jets = partials(transcendental, np.array([x, y, z]), order=3)
    fx = y * math.cos(x * y) * math.exp(z) + 0.5 / math.sqrt(2 + x) / (1 + y * y) + math.log(
        2 + z
    ) * math.sin(x)
    fz = math.sin(x * y) * math.exp(z) - math.cos(x) / (2 + z)
    assert jets.d1[0] == pytest.approx(fx, rel=1e-13)
    assert jets.d1[2] == pytest.approx(fz, rel=1e-13)
    fxz = y * math.cos(x * y) * math.exp(z) + math.sin(x) / (2 + z)
    assert jets.d2[0, 2] == pytest.approx(fxz, rel=1e-13)
    fzzz = math.sin(x * y) * math.exp(z) - 2 * math.cos(x) / (2 + z) ** 3
    assert jets.d3[2, 2, 2] == pytest.approx(fzzz, rel=1e-13)
    # full second/third derivative tensors are symmetric
    assert np.allclose(jets.d2, jets.d2.T)
    for perm in [(0, 2, 1), (1, 0, 2), (2, 1, 0)]:
        assert np.allclose(jets.d3, jets.d3.transpose(perm))


def test_against_finite_difference_oracle():
    f = lambda c: [transcendental(c), poly2(c[:2]) * ad.cos(c[2])]
    x = np.array([0.3, 0.5, -0.4])
    jets = partials(f, x, order=1)
    for c in range(3):
        fd = fd_partial(lambda y: np.array(f(y.astype(object)), dtype=float), x, c)
        assert np.allclose(jets.d1[c], fd, atol=1e-10)


def test_zero_payload_matches_plain_float_bit_for_bit():
    # ring ops on constant jets must reproduce float arithmetic exactly
    vals = [0.1, -2.75, 3.14159, 1e-7, 123.456]
    for a in vals:
        for b in vals:
            ja = Jet.constant(a, 3, 2)
            jb = Jet.constant(b, 3, 2)
            assert (ja + jb).v == a + b
            assert (ja - jb).v == a - b
            assert (ja * jb).v == a * b


def test_division_and_power():
    x = Jet.seed(2.0, 0, 1, 3)
    y = (x * x + 1) / x  # f = x + 1/x
    assert y.v == pytest.approx(2.5)
    assert y.g[0] == pytest.approx(1 - 1 / 4)
    assert y.h[0, 0] == pytest.approx(2 / 8)
    assert y.t[0, 0, 0] == pytest.approx(-6 / 16)
    p = x**4
    assert p.v == 16 and p.g[0] == 32 and p.h[0, 0] == 48 and p.t[0, 0, 0] == 48


@settings(max_examples=60, deadline=None)
@given(
    st.floats(min_value=-1.4, max_value=1.4),
    st.floats(min_value=-1.4, max_value=1.4),
)
def test_product_rule_property(a, b):
    c = seed_coords(np.array([a, b]), order=2)
    f = ad.sin(c[0]) + c[1] * c[1]
    g = ad.exp(c[0] * c[1]) + 2
    prod = f * g
    assert prod.g == pytest.approx(f.v * g.g + g.v * f.g, abs=1e-12)
    expect_h = f.v * g.h + g.v * f.h + np.outer(f.g, g.g) + np.outer(g.g, f.g)
    assert np.allclose(prod.h, expect_h, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.2, max_value=2.5))
def test_sqrt_inverts_square(x):
    j = Jet.seed(x, 0, 1, 3)
    r = ad.sqrt(j * j)
    assert r.v == pytest.approx(x, rel=1e-12)
    assert r.g[0] == pytest.approx(1.0, rel=1e-10)
    assert abs(r.h[0, 0]) < 1e-9
    assert abs(r.t[0, 0, 0]) < 1e-8
