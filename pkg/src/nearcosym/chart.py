"""Tensor calculus on a single coordinate chart.

A manifold is described by one chart: a box of admissible coordinates and
a metric component function evaluable on jets.  All derived objects
(Christoffel symbols, curvature, covariant derivatives) are computed at
individual points from exact jet derivatives of the metric.

Index conventions used throughout:
  Gamma[a, b, c]   = Gamma^a_{bc}           (symmetric in b, c)
  dGamma[e, ...]   = d_e Gamma^a_{bc}
  riem[a, b, c, d] = R^a_{bcd}, i.e. R(X, Y)Z = R^a_{bcd} X^b Y^c Z^d e_a
with the curvature sign R(X,Y) = [nab_X, nab_Y] - nab_[X,Y]; the round
unit sphere has sectional curvature +1 in this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .ad import partials

__all__ = [
    "Box",
    "ChartManifold",
    "TangentVector",
    "TensorValue",
    "TensorField",
    "PointGeometry",
    "DomainError",
    "DegenerateMetricError",
    "FrameError",
    "christoffel_at",
    "riemann_at",
    "riemann4_at",
    "cov_deriv_tensor",
    "second_cov_deriv",
    "rough_laplacian",
]


class DomainError(ValueError):
    """Point lies outside the chart's coordinate box."""


class DegenerateMetricError(ValueError):
    """Metric failed symmetry or positive-definiteness at a point."""


class FrameError(ValueError):
    """A supplied or constructed frame is not orthonormal."""


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box bounds must have equal length")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box must have positive extent on every axis")

    @property
    def dim(self):
        return len(self.lo)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def shrink(self, fraction):
        """Sub-box with the given fraction trimmed off both ends of each axis."""
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        margin = fraction * (hi - lo)
        return Box(tuple(lo + margin), tuple(hi - margin))


@dataclass(frozen=True, eq=False)
class ChartManifold:
    """Coordinate chart with a metric component function.

    ``metric`` maps an object array of ``dim`` scalars to a ``dim x dim``
    array of scalars of the same kind (floats or jets).
    """

    dim: int
    domain: Box
    metric: Callable
    name: str = "chart"

    def __post_init__(self):
        if self.domain.dim != self.dim:
            raise ValueError("domain dimension does not match chart dimension")

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"expected {self.dim} coordinates, got shape {x.shape}")
        if not self.domain.contains(x):
            raise DomainError(f"point {x} outside chart domain")
        return x


@dataclass(frozen=True)
class TangentVector:
    point: np.ndarray
    comps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "comps", np.asarray(self.comps, dtype=float))


@dataclass(frozen=True)
class TensorValue:
    """Pointwise tensor components, contravariant axes first."""

    r: int
    s: int
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))
        if self.components.ndim != self.r + self.s:
            raise ValueError("component array rank does not match (r, s)")


@dataclass(frozen=True)
class TensorField:
    """Chart tensor field: component function with contravariant axes first."""

    r: int
    s: int
    fn: Callable


class PointGeometry:
    """Metric jets and derived quantities cached at a single point."""

    def __init__(self, manifold: ChartManifold, x):
        self.manifold = manifold
        self.x = manifold.check_point(x)
        jets = partials(manifold.metric, self.x, order=2)
        g = jets.value
        if g.shape != (manifold.dim, manifold.dim):
            raise DegenerateMetricError("metric function returned wrong shape")
        if not np.allclose(g, g.T, atol=1e-12):
            raise DegenerateMetricError(f"metric not symmetric at {self.x}")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMetricError(f"metric not positive definite at {self.x}") from exc
        self.g = g
        self.dg = jets.d1   # dg[c, a, b] = d_c g_ab
        self.d2g = jets.d2  # d2g[c, e, a, b]
        self.ginv = np.linalg.inv(g)

    @cached_property
    def gamma(self):
        dg = self.dg
        # Gamma^a_{bc} = .5 g^{ad} (d_b g_dc + d_c g_bd - d_d g_bc)
        sym = np.einsum("bdc->bdc", dg) + np.einsum("cbd->bdc", dg) - np.einsum("dbc->bdc", dg)
        return 0.5 * np.einsum("ad,bdc->abc", self.ginv, sym)

    @cached_property
    def dgamma(self):
        dg, d2g = self.dg, self.d2g
        dginv = -np.einsum("ab,ebc,cd->ead", self.ginv, dg, self.ginv)
        sym = np.einsum("bdc->bdc", dg) + np.einsum("cbd->bdc", dg) - np.einsum("dbc->bdc", dg)
        dsym = (
            np.einsum("ebdc->ebdc", d2g)
            + np.einsum("ecbd->ebdc", d2g)
            - np.einsum("edbc->ebdc", d2g)
        )
        return 0.5 * (
            np.einsum("ead,bdc->eabc", dginv, sym) + np.einsum("ad,ebdc->eabc", self.ginv, dsym)
        )

    @cached_property
    def riem(self):
        gam, dgam = self.gamma, self.dgamma
        quad = np.einsum("abe,ecd->abcd", gam, gam)
        return (
            np.einsum("bacd->abcd", dgam)
            - np.einsum("cabd->abcd", dgam)
            + quad
            - np.einsum("acbd->abcd", quad)
        )

    @cached_property
    def riem4(self):
        # riem4[b, c, d, w] = g(R(e_b, e_c)e_d, e_w)
        return np.einsum("aw,abcd->bcdw", self.g, self.riem)

    # -- small helpers used by everything downstream ----------------------

    def inner(self, u, v):
        return float(np.einsum("ab,a,b->", self.g, u, v))

    def norm(self, u):
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def riem_vec(self, X, Y, Z):
        return np.einsum("abcd,b,c,d->a", self.riem, X, Y, Z)

    def riem_scalar(self, X, Y, Z, W):
        return float(np.einsum("bcdw,b,c,d,w->", self.riem4, X, Y, Z, W))


def christoffel_at(manifold: ChartManifold, x) -> TensorValue:
    """Levi-Civita connection coefficients Gamma^a_{bc} at a point."""
    return TensorValue(1, 2, PointGeometry(manifold, x).gamma)


def riemann_at(manifold: ChartManifold, X: TangentVector, Y: TangentVector, Z: TangentVector) -> TangentVector:
    geo = PointGeometry(manifold, X.point)
    return TangentVector(X.point, geo.riem_vec(X.comps, Y.comps, Z.comps))


def riemann4_at(manifold, X, Y, Z, W) -> float:
    geo = PointGeometry(manifold, X.point)
    return geo.riem_scalar(X.comps, Y.comps, Z.comps, W.comps)


# -- covariant differentiation of arbitrary tensor fields -------------------


def _letters(n, avoid):
    pool = [ch for ch in "abcdefghijklmnopqrstuvwxyz" if ch not in avoid]
    return pool[:n]


def _cov_components(gamma, value, d1, r, s):
    """One covariant derivative: returns nab[c, <tensor axes>].

    ``value`` has rank r+s with contravariant axes first; ``d1[c, ...]`` are
    its coordinate derivatives.
    """
    rank = r + s
    axes = _letters(rank, avoid="xce")
    base = "".join(axes)
    nab = d1.copy()
    for k in range(r):
        # +Gamma^{a_k}_{ce} T^{..e..}
        src = list(axes)
        src[k] = "e"
        spec = f"{axes[k]}ce,{''.join(src)}->c{base}"
        nab += np.einsum(spec, gamma, value)
    for k in range(r, rank):
        # -Gamma^{e}_{c b_k} T_{..e..}
        src = list(axes)
        src[k] = "e"
        spec = f"ec{axes[k]},{''.join(src)}->c{base}"
        nab -= np.einsum(spec, gamma, value)
    return nab


def _cov_components_deriv(gamma, dgamma, value, d1, d2, r, s):
    """Coordinate derivative of _cov_components, for second covariant derivatives.

    Returns dnab[e, c, <tensor axes>] = d_e (nab T)[c, ...].
    """
    rank = r + s
    axes = _letters(rank, avoid="xcef")
    base = "".join(axes)
    dnab = d2.copy()  # d2[e, c, ...]
    for k in range(r):
        src = list(axes)
        src[k] = "f"
        dnab += np.einsum(f"e{axes[k]}cf,{''.join(src)}->ec{base}", dgamma, value)
        dnab += np.einsum(f"{axes[k]}cf,e{''.join(src)}->ec{base}", gamma, d1)
    for k in range(r, rank):
        src = list(axes)
        src[k] = "f"
        dnab -= np.einsum(f"efc{axes[k]},{''.join(src)}->ec{base}", dgamma, value)
        dnab -= np.einsum(f"fc{axes[k]},e{''.join(src)}->ec{base}", gamma, d1)
    return dnab


def cov_deriv_tensor(manifold: ChartManifold, fld: TensorField, X: TangentVector) -> TensorValue:
    """Covariant derivative nab_X of a tensor field, evaluated at X.point."""
    geo = PointGeometry(manifold, X.point)
    jets = partials(fld.fn, geo.x, order=1)
    nab = _cov_components(geo.gamma, jets.value, jets.d1, fld.r, fld.s)
    return TensorValue(fld.r, fld.s, np.tensordot(X.comps, nab, axes=(0, 0)))


def second_cov_deriv(manifold: ChartManifold, fld: TensorField, X: TangentVector, Y: TangentVector) -> TensorValue:
    """Second covariant derivative nab^2_{X,Y} (direction corrections included)."""
    geo = PointGeometry(manifold, X.point)
    jets = partials(fld.fn, geo.x, order=2)
    nab2 = _second_cov_components(geo, jets, fld.r, fld.s)
    out = np.einsum("cd...,c,d->...", nab2, X.comps, Y.comps)
    return TensorValue(fld.r, fld.s, out)


def _second_cov_components(geo, jets, r, s):
    """nab2[c, d, <axes>] = (nab^2 T)(e_c, e_d; ...)."""
    nab1 = _cov_components(geo.gamma, jets.value, jets.d1, r, s)
    dnab1 = _cov_components_deriv(geo.gamma, geo.dgamma, jets.value, jets.d1, jets.d2, r, s)
    # Treat nab T as an (r, s+1) tensor: its direction slot moves in with the
    # covariant axes, gets its own Gamma correction, then moves back out front.
    v = np.moveaxis(nab1, 0, r)
    dv = np.moveaxis(dnab1, 1, r + 1)
    nab2 = _cov_components(geo.gamma, v, dv, r, s + 1)
    return np.moveaxis(nab2, r + 1, 1)


def rough_laplacian(manifold: ChartManifold, fld: TensorField, frame) -> TensorValue:
    """Connection Laplacian nab*nab T = -sum_i nab^2_{E_i, E_i} T over a frame.

    ``frame`` is a sequence of TangentVector at a common point; it must be
    orthonormal there.
    """
    if not frame:
        raise FrameError("empty frame")
    x = frame[0].point
    geo = PointGeometry(manifold, x)
    gram = np.array([[geo.inner(u.comps, v.comps) for v in frame] for u in frame])
    if not np.allclose(gram, np.eye(len(frame)), atol=1e-12):
        raise FrameError("frame is not orthonormal to 1e-12")
    jets = partials(fld.fn, geo.x, order=2)
    nab2 = _second_cov_components(geo, jets, fld.r, fld.s)
    acc = None
    for E in frame:
        term = np.einsum("cd...,c,d->...", nab2, E.comps, E.comps)
        acc = term if acc is None else acc + term
    return TensorValue(fld.r, fld.s, -acc)
