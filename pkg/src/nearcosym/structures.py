"""Almost contact metric structures evaluated on chart points.

An AlmostContactStructure bundles a chart with three component functions:
a (1,1) structure tensor, its unit field and the dual one-form.  The
StructurePoint cache holds jet evaluations of all of these at one point,
plus the derived projector onto the kernel distribution and the covariant
derivatives every identity needs.

Index conventions follow chart.py; additionally
  theta[a, b]        acts as (theta v)^a = theta[a, b] v^b
  P[a, b]            projector onto ker(eta) along xi
  nab_theta[c, a, b] = (nab_c theta)^a_b
  nab_xi[c, a]       = (nab_c xi)^a
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .ad import FieldJets, partials
from .chart import (
    ChartManifold,
    FrameError,
    PointGeometry,
    _cov_components,
    _second_cov_components,
)

__all__ = [
    "AlmostContactStructure",
    "FramePoint",
    "StructurePoint",
    "StructureError",
    "axiom_residuals",
    "eta_consistency_residual",
    "nabla_theta",
    "nearly_cosymplectic_residual",
    "killing_geodesic_residuals",
    "orthonormal_frame",
    "theta_frame",
]


class StructureError(ValueError):
    """Structure data violated an axiom or frame invariant beyond tolerance."""


@dataclass(frozen=True, eq=False)
class AlmostContactStructure:
    """Chart manifold with structure tensor, unit field and dual one-form."""

    manifold: ChartManifold
    theta: Callable
    xi: Callable
    eta: Callable
    name: str = "structure"

    @property
    def dim(self):
        return self.manifold.dim


@dataclass(frozen=True)
class FramePoint:
    """Orthonormal horizontal frame rows plus the unit field at one point."""

    point: np.ndarray
    horizontal: np.ndarray  # shape (2n, dim)
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "horizontal", np.asarray(self.horizontal, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))

    def full(self):
        """Horizontal rows followed by the unit field: a full orthonormal frame."""
        return np.vstack([self.horizontal, self.xi[None, :]])


_STATE_CACHE: dict = {}
_STATE_CACHE_CAP = 2048


class StructurePoint:
    """All jets of one structure at one point, computed lazily and cached."""

    def __init__(self, acs: AlmostContactStructure, x):
        self.acs = acs
        self.x = acs.manifold.check_point(x)
        self.dim = acs.manifold.dim

    @classmethod
    def at(cls, acs, x):
        key = (id(acs), np.asarray(x, dtype=float).tobytes())
        state = _STATE_CACHE.get(key)
        if state is None:
            state = cls(acs, x)
            if len(_STATE_CACHE) >= _STATE_CACHE_CAP:
                _STATE_CACHE.pop(next(iter(_STATE_CACHE)))
            _STATE_CACHE[key] = state
        return state

    # -- raw jets ----------------------------------------------------------

    @cached_property
    def geo(self) -> PointGeometry:
        return PointGeometry(self.acs.manifold, self.x)

    @cached_property
    def _theta_jets(self) -> FieldJets:
        return partials(self.acs.theta, self.x, order=2)

    @cached_property
    def _xi_jets(self) -> FieldJets:
        return partials(self.acs.xi, self.x, order=2)

    @cached_property
    def _eta_jets(self) -> FieldJets:
        return partials(self.acs.eta, self.x, order=2)

    @property
    def theta(self):
        return self._theta_jets.value

    @property
    def xi(self):
        return self._xi_jets.value

    @property
    def eta(self):
        return self._eta_jets.value

    # -- projector and restricted structure tensor --------------------------

    @cached_property
    def P(self):
        return np.eye(self.dim) - np.outer(self.xi, self.eta)

    @cached_property
    def dP(self):
        xi, eta = self.xi, self.eta
        dxi, deta = self._xi_jets.d1, self._eta_jets.d1
        return -(np.einsum("ca,b->cab", dxi, eta) + np.einsum("a,cb->cab", xi, deta))

    @cached_property
    def d2P(self):
        xi, eta = self.xi, self.eta
        dxi, deta = self._xi_jets.d1, self._eta_jets.d1
        d2xi, d2eta = self._xi_jets.d2, self._eta_jets.d2
        return -(
            np.einsum("cea,b->ceab", d2xi, eta)
            + np.einsum("ca,eb->ceab", dxi, deta)
            + np.einsum("ea,cb->ceab", dxi, deta)
            + np.einsum("a,ceb->ceab", xi, d2eta)
        )

    @cached_property
    def J(self):
        return self.theta @ self.P

    @cached_property
    def dJ(self):
        dth = self._theta_jets.d1
        return np.einsum("cae,eb->cab", dth, self.P) + np.einsum("ae,ceb->cab", self.theta, self.dP)

    @cached_property
    def d2J(self):
        th, P = self.theta, self.P
        dth, dP = self._theta_jets.d1, self.dP
        d2th, d2P = self._theta_jets.d2, self.d2P
        return (
            np.einsum("ceaf,fb->ceab", d2th, P)
            + np.einsum("caf,efb->ceab", dth, dP)
            + np.einsum("eaf,cfb->ceab", dth, dP)
            + np.einsum("af,cefb->ceab", th, d2P)
        )

    # -- covariant derivatives ----------------------------------------------

    @cached_property
    def nab_theta(self):
        j = self._theta_jets
        return _cov_components(self.geo.gamma, j.value, j.d1, 1, 1)

    @cached_property
    def nab2_theta(self):
        return _second_cov_components(self.geo, self._theta_jets, 1, 1)

    @cached_property
    def nab_xi(self):
        j = self._xi_jets
        return _cov_components(self.geo.gamma, j.value, j.d1, 1, 0)

    @cached_property
    def nab2_xi(self):
        return _second_cov_components(self.geo, self._xi_jets, 1, 0)

    @cached_property
    def frame(self) -> FramePoint:
        return orthonormal_frame(self.acs, self.x, state=self)

    # -- pointwise helpers ---------------------------------------------------

    def inner(self, u, v):
        return self.geo.inner(u, v)

    def norm(self, u):
        return self.geo.norm(u)

    def theta_v(self, v):
        return self.theta @ v

    def proj(self, v):
        return self.P @ v

    def nab_theta_v(self, X, Y):
        """(nab_X theta)(Y)."""
        return np.einsum("cab,c,b->a", self.nab_theta, X, Y)

    def nab_xi_v(self, X):
        return np.einsum("ca,c->a", self.nab_xi, X)

    def nab2_theta_v(self, X, Y, Z):
        """(nab^2_{X,Y} theta)(Z)."""
        return np.einsum("cdab,c,d,b->a", self.nab2_theta, X, Y, Z)

    def nab2_xi_v(self, X, Y):
        return np.einsum("cda,c,d->a", self.nab2_xi, X, Y)

    def riem_v(self, X, Y, Z):
        return self.geo.riem_vec(X, Y, Z)

    def riem_s(self, X, Y, Z, W):
        return self.geo.riem_scalar(X, Y, Z, W)


# -- public structure operations --------------------------------------------


def _matrix_residual(total, terms):
    scale = max([1.0] + [float(np.max(np.abs(t))) for t in terms])
    return float(np.max(np.abs(total))) / scale


def axiom_residuals(acs: AlmostContactStructure, x) -> dict:
    """Residuals of the four defining axioms at a point."""
    st = StructurePoint.at(acs, x)
    th, xi, eta, g = st.theta, st.xi, st.eta, st.geo.g
    sq = th @ th
    corr = np.outer(xi, eta)
    r_square = _matrix_residual(sq + np.eye(st.dim) - corr, [sq, np.eye(st.dim), corr])
    r_unit_pairing = abs(float(eta @ xi) - 1.0)
    r_unit_norm = abs(st.norm(xi) - 1.0)
    pulled = np.einsum("ac,ab,bd->cd", th, g, th)
    target = g - np.outer(eta, eta)
    r_compat = _matrix_residual(pulled - target, [pulled, g, np.outer(eta, eta)])
    return {
        "square_to_projector": r_square,
        "unit_pairing": r_unit_pairing,
        "unit_norm": r_unit_norm,
        "metric_compatibility": r_compat,
    }


def eta_consistency_residual(acs: AlmostContactStructure, x) -> float:
    """How far the stored one-form is from the metric dual of the unit field."""
    st = StructurePoint.at(acs, x)
    return float(np.max(np.abs(st.eta - st.geo.g @ st.xi)))


def nabla_theta(acs: AlmostContactStructure, X, Y) -> np.ndarray:
    """(nab_X theta)(Y) for components X, Y at a common point."""
    st = StructurePoint.at(acs, X.point)
    return st.nab_theta_v(X.comps, Y.comps)


def nearly_cosymplectic_residual(acs: AlmostContactStructure, x, pairs) -> float:
    """Max normalized residual of the defining antisymmetry over vector pairs."""
    st = StructurePoint.at(acs, x)
    worst = 0.0
    for X, Y in pairs:
        u = st.nab_theta_v(X, Y)
        v = st.nab_theta_v(Y, X)
        scale = max(1.0, st.norm(u), st.norm(v))
        worst = max(worst, st.norm(u + v) / scale)
    return worst


def killing_geodesic_residuals(acs: AlmostContactStructure, x, pairs):
    """(killing, geodesic): symmetrized derivative of the unit field over the
    sampled pairs, and the acceleration of its integral curve."""
    st = StructurePoint.at(acs, x)
    killing = 0.0
    for X, Y in pairs:
        a = st.inner(st.nab_xi_v(X), Y)
        b = st.inner(st.nab_xi_v(Y), X)
        killing = max(killing, abs(a + b) / max(1.0, abs(a), abs(b)))
    geodesic = st.norm(st.nab_xi_v(st.xi))
    return killing, geodesic


def orthonormal_frame(acs: AlmostContactStructure, x, state: StructurePoint | None = None) -> FramePoint:
    """Orthonormal basis of ker(eta) by Gram-Schmidt on projected coordinate
    vectors, taken in ascending coordinate order; the one redundant projected
    vector (the projector has corank one) is dropped where it degenerates."""
    st = state if state is not None else StructurePoint.at(acs, x)
    dim = st.dim
    xi = st.xi
    if abs(st.norm(xi) - 1.0) > 1e-8:
        raise StructureError(f"unit field has norm {st.norm(xi)} at {st.x}")
    accepted = [xi]
    for i in range(dim):
        v = st.P[:, i]
        vnorm = st.norm(v)
        if vnorm <= 1e-12:
            continue
        w = v.copy()
        for _ in range(2):  # re-orthogonalize once; classical GS alone drifts
            for u in accepted:
                w = w - st.inner(w, u) * u
        wnorm = st.norm(w)
        if wnorm <= 1e-7 * vnorm:
            continue
        accepted.append(w / wnorm)
    if len(accepted) != dim:
        raise FrameError(f"projected coordinate frame has rank {len(accepted) - 1}, expected {dim - 1}")
    fp = FramePoint(st.x, np.array(accepted[1:]), xi)
    _check_frame(st, fp, tol=1e-12)
    return fp


def theta_frame(acs: AlmostContactStructure, fp: FramePoint) -> FramePoint:
    """Image frame under the structure tensor; orthonormal again by compatibility."""
    st = StructurePoint.at(acs, fp.point)
    rotated = FramePoint(fp.point, fp.horizontal @ st.theta.T, fp.xi)
    _check_frame(st, rotated, tol=1e-9)
    return rotated


def _check_frame(st: StructurePoint, fp: FramePoint, tol: float):
    rows = fp.horizontal
    gram = rows @ st.geo.g @ rows.T
    if not np.allclose(gram, np.eye(rows.shape[0]), atol=tol):
        raise StructureError(f"horizontal frame not orthonormal to {tol}")
    pairing = rows @ st.eta
    if np.max(np.abs(pairing)) > max(tol, 1e-12):
        raise StructureError("horizontal frame not annihilated by the one-form")
