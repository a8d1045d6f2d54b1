"""Concrete model manifolds used by the verification harness.

Four charts are provided: a flat product structure on R^5, the Kaehler
product of a round 2-sphere with a line, the round 5-sphere carrying the
structure induced by the octonion cross product on its equatorial
embedding in the 6-sphere, and a 3-dimensional negative control whose
structure tensor has a symmetric (not antisymmetric) covariant derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ad
from .chart import Box, ChartManifold
from .structures import AlmostContactStructure

__all__ = [
    "OctonionTable",
    "ModelSpec",
    "REGISTRY",
    "build_model",
    "model_names",
    "make_flat_cosymplectic_r5",
    "make_kahler_product_s2xr",
    "make_s5_nearly_cosymplectic",
    "make_sasakian_control",
    "sasakian_closed_form_sample",
]


class OctonionTable:
    """Multiplication table of the imaginary octonions.

    Built from the seven oriented lines of the Fano plane; ``triples`` uses
    1-based labels (i, j, k) meaning e_i e_j = e_k cyclically.  The derived
    cross product u x v = (uv - vu)/2 works on floats and jets alike.
    """

    triples = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))

    def __init__(self):
        c = np.zeros((7, 7, 7))
        for i, j, k in self.triples:
            for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
                c[a - 1, b - 1, d - 1] = 1.0
                c[b - 1, a - 1, d - 1] = -1.0
        self.structure_constants = c

    def cross(self, u, v):
        """Seven-dimensional cross product of imaginary octonions."""
        out = [0.0] * 7
        for i, j, k in self.triples:
            for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
                out[d - 1] = out[d - 1] + u[a - 1] * v[b - 1] - u[b - 1] * v[a - 1]
        return np.array(out, dtype=object)


OCTONIONS = OctonionTable()


@dataclass(frozen=True)
class ModelSpec:
    """Registry entry: how to build a model and what behaviour to expect of it."""

    name: str
    classification: str  # "cosymplectic" | "nearly-cosymplectic-strict" | "negative-control"
    build: Callable[[], AlmostContactStructure]

    @property
    def is_positive(self):
        return self.classification != "negative-control"


def make_flat_cosymplectic_r5() -> AlmostContactStructure:
    """R^5 with the identity metric and a constant rotation pair structure."""
    theta0 = np.zeros((5, 5))
    theta0[1, 0], theta0[0, 1] = 1.0, -1.0
    theta0[3, 2], theta0[2, 3] = 1.0, -1.0
    xi0 = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
    eta0 = xi0.copy()
    return AlmostContactStructure(
        manifold=ChartManifold(5, Box((-1.0,) * 5, (1.0,) * 5), lambda c: np.eye(5), name="flat-r5"),
        theta=lambda c: theta0,
        xi=lambda c: xi0,
        eta=lambda c: eta0,
        name="flat-r5",
    )


def make_kahler_product_s2xr() -> AlmostContactStructure:
    """Product of the round 2-sphere with a line; rotation by 90 degrees on
    the sphere factor, unit field along the line factor."""

    def metric(c):
        s = ad.sin(c[0])
        return [[1.0, 0.0, 0.0], [0.0, s * s, 0.0], [0.0, 0.0, 1.0]]

    def theta(c):
        s = ad.sin(c[0])
        z = 0.0 * s  # keeps the array homogeneous under jets
        return [[z, -s, z], [1.0 / s, z, z], [z, z, z]]

    xi0 = np.array([0.0, 0.0, 1.0])
    return AlmostContactStructure(
        manifold=ChartManifold(
            3, Box((0.3, -math.pi, -1.0), (math.pi - 0.3, math.pi, 1.0)), metric, name="s2xr"
        ),
        theta=theta,
        xi=lambda c: xi0,
        eta=lambda c: xi0,
        name="s2xr",
    )


# -- round 5-sphere from the octonion cross product -------------------------

_S5_HALF_WIDTH = 0.9 / math.sqrt(5.0)  # box inscribed in the chart ball of radius 0.9


def _s5_embed(c):
    """Orthographic chart into the unit sphere of the span of e_1..e_6."""
    r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3] + c[4] * c[4]
    w = ad.sqrt(1.0 - r2)
    return np.array([c[0], c[1], c[2], c[3], c[4], w, 0.0], dtype=object), w


def make_s5_nearly_cosymplectic() -> AlmostContactStructure:
    """Round unit 5-sphere sitting inside the imaginary octonions.

    The point p multiplies tangent vectors through the octonion cross
    product; the unused seventh axis supplies the unit normal e_7 whose
    cross with p gives the Reeb field.  Chart components of a tangent
    vector are just its first five ambient components, since the sixth is
    determined by tangency.
    """
    e7 = np.array([0.0] * 6 + [1.0], dtype=object)
    cross = OCTONIONS.cross

    def metric(c):
        r2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3] + c[4] * c[4]
        denom = 1.0 - r2
        g = np.empty((5, 5), dtype=object)
        for i in range(5):
            for j in range(5):
                g[i, j] = c[i] * c[j] / denom + (1.0 if i == j else 0.0)
        return g

    def xi(c):
        p, _ = _s5_embed(c)
        amb = -cross(p, e7)
        return amb[:5]

    def theta(c):
        p, w = _s5_embed(c)
        mat = np.empty((5, 5), dtype=object)
        for j in range(5):
            dphi = np.array([0.0] * 7, dtype=object)
            dphi[j] = 1.0 + 0.0 * w
            dphi[5] = -c[j] / w
            col = cross(p, dphi)
            for i in range(5):
                mat[i, j] = col[i]
        return mat

    def eta(c):
        p, w = _s5_embed(c)
        amb = -cross(p, e7)
        cov = np.empty(5, dtype=object)
        for j in range(5):
            # <dphi_j, xi>: dphi_j = e_j - (c_j / w) e_6 in ambient slots
            cov[j] = amb[j] - (c[j] / w) * amb[5]
        return cov

    hw = _S5_HALF_WIDTH
    return AlmostContactStructure(
        manifold=ChartManifold(5, Box((-hw,) * 5, (hw,) * 5), metric, name="s5-octonion"),
        theta=theta,
        xi=xi,
        eta=eta,
        name="s5-octonion",
    )


def make_sasakian_control() -> AlmostContactStructure:
    """Negative control: the covariant derivative of its structure tensor is
    symmetric in its two arguments, so every antisymmetry-based identity
    must be violated while the axioms and the Killing property still hold.
    """

    def metric(c):
        y = c[1]
        return [
            [(y * y + 1.0) / 4.0, 0.0, -y / 4.0],
            [0.0, 0.25, 0.0],
            [-y / 4.0, 0.0, 0.25],
        ]

    def theta(c):
        y = c[1]
        z = 0.0 * y
        return [[z, 1.0 + z, z], [-1.0 + z, z, z], [z, y, z]]

    def eta(c):
        y = c[1]
        return [-y / 2.0, 0.0 * y, 0.5 + 0.0 * y]

    xi0 = np.array([0.0, 0.0, 2.0])
    return AlmostContactStructure(
        manifold=ChartManifold(3, Box((-1.0,) * 3, (1.0,) * 3), metric, name="sasakian-control"),
        theta=theta,
        xi=lambda c: xi0,
        eta=eta,
        name="sasakian-control",
    )


def sasakian_closed_form_sample():
    """Deterministic unit horizontal probe on the control; the defining
    antisymmetry residual equals 2 exactly at this sample."""
    point = np.array([0.3, -0.4, 0.2])
    X = np.array([0.0, 2.0, 0.0])  # unit for this metric, annihilated by eta
    return point, X


REGISTRY = {
    "flat-r5": ModelSpec("flat-r5", "cosymplectic", make_flat_cosymplectic_r5),
    "s2xr": ModelSpec("s2xr", "cosymplectic", make_kahler_product_s2xr),
    "s5-octonion": ModelSpec("s5-octonion", "nearly-cosymplectic-strict", make_s5_nearly_cosymplectic),
    "sasakian-control": ModelSpec("sasakian-control", "negative-control", make_sasakian_control),
}


def model_names():
    return list(REGISTRY)


def build_model(name: str) -> AlmostContactStructure:
    try:
        spec = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; known: {', '.join(REGISTRY)}") from None
    return spec.build()
