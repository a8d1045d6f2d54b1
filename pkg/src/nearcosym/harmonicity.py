"""Connection, curvature and harmonicity operators on the kernel distribution.

The projected connection differentiates sections of the kernel bundle by
projecting the Levi-Civita derivative back into the bundle.  Endomorphism
fields of the bundle are differentiated through horizontal extensions of
the form y -> P(y)v with constant v; every operator built this way is
tensorial, so the result does not depend on that choice.

All matrix-valued quantities act on coordinate components; operators of
the kernel bundle are stored pre-composed with the projector, so applying
them to a horizontal vector needs no further projection.
"""

from __future__ import annotations

import numpy as np

from .chart import TensorField
from .structures import AlmostContactStructure, FramePoint, StructurePoint

__all__ = [
    "bar_cov_deriv",
    "bar_curvature",
    "bar_curvature_matrix",
    "bar_curvature_direct",
    "bar_nabla_J",
    "bar_nabla2_J",
    "bar_laplacian_J",
    "endo_frame_matrix",
    "ricci_star",
    "ricci_star_matrix_pair",
    "hse1_residual",
    "hse1_commutator_frame_matrix",
    "hse2_residual",
    "hse2_parts",
    "harmonic_map_residual",
]


def _memo(st: StructurePoint, key: str, builder):
    cache = st.__dict__.setdefault("_harmonicity_memo", {})
    if key not in cache:
        cache[key] = builder(st)
    return cache[key]


def _gc(st):
    # Gc[c] is the matrix (Gamma_c)^a_e = Gamma^a_{ce}
    return _memo(st, "gc", lambda s: np.einsum("ace->cae", s.geo.gamma))


def _dgc(st):
    # dGc[c, d] has entries d_c Gamma^a_{de}
    return _memo(st, "dgc", lambda s: np.einsum("cade->cdae", s.geo.dgamma))


def _bar_dJ(st):
    """bar nabla J along each coordinate direction, pre-composed with P."""

    def build(s):
        P, J = s.P, s.J
        dP, dJ = s.dP, s.dJ
        Gc = _gc(s)
        JP = J @ P
        dJP = np.einsum("cae,eb->cab", dJ, P) + np.einsum("ae,ceb->cab", J, dP)
        out = np.empty((s.dim, s.dim, s.dim))
        for c in range(s.dim):
            out[c] = P @ dJP[c] + P @ Gc[c] @ JP - JP @ dP[c] - JP @ Gc[c] @ P
        return out

    return _memo(st, "bar_dJ", build)


def _bar_dJ_coordinate_derivative(st):
    """dB[c, d] = d_c of the matrix field (bar nabla_d J)."""

    def build(s):
        P, J = s.P, s.J
        dP, dJ, d2P, d2J = s.dP, s.dJ, s.d2P, s.d2J
        Gc, dGc = _gc(s), _dgc(s)
        JP = J @ P
        dJP = np.einsum("cae,eb->cab", dJ, P) + np.einsum("ae,ceb->cab", J, dP)
        d2JP = (
            np.einsum("cdae,eb->cdab", d2J, P)
            + np.einsum("cae,deb->cdab", dJ, dP)
            + np.einsum("dae,ceb->cdab", dJ, dP)
            + np.einsum("ae,cdeb->cdab", J, d2P)
        )
        n = s.dim
        out = np.empty((n, n, n, n))
        for c in range(n):
            for d in range(n):
                out[c, d] = (
                    dP[c] @ dJP[d]
                    + P @ d2JP[c, d]
                    + dP[c] @ Gc[d] @ JP
                    + P @ dGc[c, d] @ JP
                    + P @ Gc[d] @ dJP[c]
                    - dJP[c] @ dP[d]
                    - JP @ d2P[c, d]
                    - dJP[c] @ Gc[d] @ P
                    - JP @ dGc[c, d] @ P
                    - JP @ Gc[d] @ dP[c]
                )
        return out

    return _memo(st, "bar_dJ_deriv", build)


def _bar_d2J(st):
    """Second projected derivative of the restricted structure tensor:
    out[c, d] = bar nabla^2_{c, d} J as a matrix on horizontal vectors."""

    def build(s):
        P = s.P
        dP = s.dP
        Gc = _gc(s)
        gamma = s.geo.gamma
        B = _bar_dJ(s)
        dB = _bar_dJ_coordinate_derivative(s)
        n = s.dim
        out = np.empty((n, n, n, n))
        for c in range(n):
            for d in range(n):
                BP = B[d] @ P
                m = (
                    P @ (dB[c, d] @ P + B[d] @ dP[c])
                    + P @ Gc[c] @ BP
                    - BP @ dP[c]
                    - BP @ Gc[c] @ P
                )
                m -= np.einsum("e,eab->ab", gamma[:, c, d], B)
                out[c, d] = m
        return out

    return _memo(st, "bar_d2J", build)


def _bar_curv_direct(st):
    """Curvature of the projected connection from second derivatives of
    horizontal extensions; out[c, d] maps v to Rbar(e_c, e_d)(P v)."""

    def build(s):
        P, dP, d2P = s.P, s.dP, s.d2P
        Gc, dGc = _gc(s), _dgc(s)
        n = s.dim
        t = np.empty((n, n, n))
        dt = np.empty((n, n, n, n))
        for d in range(n):
            t[d] = P @ (dP[d] + Gc[d] @ P)
        for c in range(n):
            for d in range(n):
                dt[c, d] = dP[c] @ (dP[d] + Gc[d] @ P) + P @ (
                    d2P[c, d] + dGc[c, d] @ P + Gc[d] @ dP[c]
                )
        out = np.empty((n, n, n, n))
        for c in range(n):
            for d in range(n):
                out[c, d] = P @ (dt[c, d] + Gc[c] @ t[d]) - P @ (dt[d, c] + Gc[d] @ t[c])
        return out

    return _memo(st, "bar_curv_direct", build)


# -- public operators --------------------------------------------------------


def bar_nabla_J(acs: AlmostContactStructure, X, at=None, state=None):
    """(bar nabla_X J) as a matrix acting on horizontal vectors."""
    st = state if state is not None else StructurePoint.at(acs, at)
    return np.einsum("c,cab->ab", np.asarray(X, dtype=float), _bar_dJ(st))


def bar_nabla2_J(acs: AlmostContactStructure, X, Y, at=None, state=None):
    """bar nabla^2_{X, Y} J (direction correction included) as a matrix."""
    st = state if state is not None else StructurePoint.at(acs, at)
    return np.einsum("c,d,cdab->ab", np.asarray(X, float), np.asarray(Y, float), _bar_d2J(st))


def bar_laplacian_J(st: StructurePoint, fp: FramePoint):
    """Rough Laplacian of the restricted structure tensor over a full frame."""
    bar2 = _bar_d2J(st)
    acc = np.zeros((st.dim, st.dim))
    for E in fp.full():
        acc += np.einsum("c,d,cdab->ab", E, E, bar2)
    return -acc


def bar_cov_deriv(acs: AlmostContactStructure, fld: TensorField, X):
    """Projected covariant derivative along X of a section (r=1, s=0) of the
    kernel bundle or of an endomorphism field (r=1, s=1) of it.

    For sections the value must be horizontal at the point; endomorphism
    fields are differentiated through horizontal extensions, and the result
    is returned pre-composed with the projector.
    """
    st = StructurePoint.at(acs, X.point)
    from .ad import partials
    from .chart import _cov_components

    jets = partials(fld.fn, st.x, order=1)
    if (fld.r, fld.s) == (1, 0):
        sec = jets.value
        if abs(st.inner(sec, st.xi)) > 1e-8:
            raise ValueError("section is not horizontal at the base point")
        nab = _cov_components(st.geo.gamma, jets.value, jets.d1, 1, 0)
        return st.P @ np.einsum("c,ca->a", X.comps, nab)
    if (fld.r, fld.s) == (1, 1):
        P, dP = st.P, st.dP
        Gc = _gc(st)
        A = jets.value
        dA = jets.d1
        AP = A @ P
        dAP = np.einsum("cae,eb->cab", dA, P) + np.einsum("ae,ceb->cab", A, dP)
        out = np.zeros((st.dim, st.dim))
        for c, w in enumerate(X.comps):
            if w == 0.0:
                continue
            out += w * (P @ dAP[c] + P @ Gc[c] @ AP - AP @ dP[c] - AP @ Gc[c] @ P)
        return out
    raise ValueError("bar_cov_deriv expects a (1,0) section or a (1,1) endomorphism field")


def bar_curvature(acs: AlmostContactStructure, X, Y, sec, at=None, state=None):
    """Curvature of the projected connection by its splitting: project the
    ambient curvature, then add the rank-two correction built from the
    derivatives of the unit field."""
    st = state if state is not None else StructurePoint.at(acs, at)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    sec = np.asarray(sec, float)
    u = st.nab_xi_v(X)
    v = st.nab_xi_v(Y)
    ambient = st.riem_v(X, Y, sec)
    return st.P @ ambient + st.inner(v, sec) * u - st.inner(u, sec) * v


def bar_curvature_matrix(st: StructurePoint, X, Y):
    """Matrix of the projected-connection curvature Rbar(X, Y) on horizontal
    vectors, assembled by the splitting route."""
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    RXY = np.einsum("abcd,b,c->ad", st.geo.riem, X, Y)
    u = st.nab_xi_v(X)
    v = st.nab_xi_v(Y)
    g = st.geo.g
    return st.P @ RXY + np.outer(u, g @ v) - np.outer(v, g @ u)


def bar_curvature_direct(acs: AlmostContactStructure, X, Y, sec, at=None, state=None):
    """Same operator assembled from second projected derivatives of a
    horizontal extension; kept as an independent cross-check."""
    st = state if state is not None else StructurePoint.at(acs, at)
    mat = np.einsum("c,d,cdab->ab", np.asarray(X, float), np.asarray(Y, float), _bar_curv_direct(st))
    return mat @ np.asarray(sec, float)


def ricci_star(acs: AlmostContactStructure, fp: FramePoint, X, Y, state=None):
    """Contraction of the curvature against the rotated horizontal frame."""
    st = state if state is not None else StructurePoint.at(acs, fp.point)
    th = st.theta
    total = 0.0
    for F in fp.horizontal:
        total += st.riem_s(np.asarray(X, float), F, th @ F, th @ np.asarray(Y, float))
    return float(total)


def endo_frame_matrix(st: StructurePoint, fp: FramePoint, M):
    """Coordinates of an endomorphism in the horizontal frame: g(M F_j, F_i)."""
    rows = fp.horizontal
    return rows @ st.geo.g @ (M @ rows.T)


def hse1_commutator_frame_matrix(st: StructurePoint, fp: FramePoint):
    L = bar_laplacian_J(st, fp)
    comm = L @ st.J - st.J @ L
    return endo_frame_matrix(st, fp, comm), L


def hse1_residual(acs: AlmostContactStructure, fp: FramePoint, state=None) -> float:
    """First harmonicity obstruction: the Laplacian of the restricted
    structure tensor must commute with it."""
    st = state if state is not None else StructurePoint.at(acs, fp.point)
    cm, L = hse1_commutator_frame_matrix(st, fp)
    t1 = endo_frame_matrix(st, fp, L @ st.J)
    t2 = endo_frame_matrix(st, fp, st.J @ L)
    scale = max(1.0, float(np.linalg.norm(t1)), float(np.linalg.norm(t2)))
    return float(np.linalg.norm(cm)) / scale


def ricci_star_matrix_pair(st: StructurePoint, fp: FramePoint):
    """Frame matrices of the commutator route and of the Ricci-type route;
    the two agree identically for structures with antisymmetric nab theta."""
    cm, _ = hse1_commutator_frame_matrix(st, fp)
    rows = fp.horizontal
    th = st.theta
    n = rows.shape[0]
    dev = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            dev[i, j] = 2.0 * ricci_star(st.acs, fp, th @ rows[j], th @ rows[i], state=st) - 2.0 * ricci_star(
                st.acs, fp, rows[j], rows[i], state=st
            )
    return -cm, dev


def _curv_sum_matrix(st, fp):
    """Sum over the horizontal frame of R(F_i, theta F_i) as a matrix."""
    th = st.theta
    acc = np.zeros((st.dim, st.dim))
    for F in fp.horizontal:
        acc += np.einsum("abcd,b,c->ad", st.geo.riem, F, th @ F)
    return acc


def hse2_parts(st: StructurePoint, fp: FramePoint) -> dict:
    full = fp.full()
    lap_xi = -sum(st.nab2_xi_v(E, E) for E in full)
    grad_sq = sum(st.inner(st.nab_xi_v(E), st.nab_xi_v(E)) for E in full)
    bar_dJ = _bar_dJ(st)
    trace = np.zeros(st.dim)
    for F in fp.horizontal:
        mat = np.einsum("c,cab->ab", F, bar_dJ)
        trace = trace + mat @ st.nab_xi_v(F)
    curv_sum = _curv_sum_matrix(st, fp)
    return {
        "lap_xi": lap_xi,
        "grad_sq": float(grad_sq),
        "trace_term": trace,
        "curv_sum": curv_sum,
    }


def hse2_residual(acs: AlmostContactStructure, fp: FramePoint, state=None):
    """Second harmonicity obstruction in both published shapes.

    Returns (a, b): residual of the trace form and of the curvature form.
    Both must vanish for structures with antisymmetric nab theta.
    """
    st = state if state is not None else StructurePoint.at(acs, fp.point)
    p = hse2_parts(st, fp)
    xi, th = st.xi, st.theta
    base = p["lap_xi"] - p["grad_sq"] * xi
    va = base + 0.5 * (st.J @ p["trace_term"])
    comm = p["curv_sum"] @ (th @ xi) - th @ (p["curv_sum"] @ xi)
    vb = base + 0.5 * comm
    scale_a = max(1.0, st.norm(p["lap_xi"]), abs(p["grad_sq"]), 0.5 * st.norm(st.J @ p["trace_term"]))
    scale_b = max(1.0, st.norm(p["lap_xi"]), abs(p["grad_sq"]), 0.5 * st.norm(comm))
    return st.norm(va) / scale_a, st.norm(vb) / scale_b


def harmonic_map_residual(acs: AlmostContactStructure, fp: FramePoint, X, state=None):
    """Both summands of the harmonic map obstruction at direction X.

    Returns (term1, term2), each normalized by its largest contribution;
    for structures with antisymmetric nab theta each vanishes separately.
    """
    st = state if state is not None else StructurePoint.at(acs, fp.point)
    X = np.asarray(X, dtype=float)
    th = st.theta
    bar_dJ = _bar_dJ(st)
    t1 = 0.0
    t1_scale = 1.0
    for E in fp.full():
        dJE = np.einsum("c,cab->ab", E, bar_dJ)
        for F in fp.horizontal:
            bracket = st.riem_v(E, X, th @ F) - th @ st.riem_v(E, X, F)
            contrib = st.inner(dJE @ F, bracket)
            t1 += contrib
            t1_scale = max(t1_scale, abs(contrib))
    t2 = 0.0
    t2_scale = 1.0
    for E in fp.full():
        contrib = st.inner(st.nab_xi_v(E), st.riem_v(E, X, st.xi))
        t2 += contrib
        t2_scale = max(t2_scale, abs(contrib))
    return abs(t1) / t1_scale, abs(t2) / t2_scale
