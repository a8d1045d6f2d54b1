"""Catalog of pointwise identities satisfied by the supported structures.

Each entry evaluates one tensor identity at a point as a normalized
residual: the defect is divided by max(1, largest additive term), so a
value near machine epsilon certifies the identity while a value of order
one refutes it regardless of the local scale of the fields.

Identities are evaluated on sampled unit vectors; arguments marked
"horizontal" are drawn from the kernel of the dual form.  Entries flagged
cosymplectic_only hold exactly when the structure tensor is parallel and
must be skipped on the other models.  Entries flagged holds_on_control are
consequences of the unit field alone being Killing and geodesic, so they
remain valid on the negative control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from . import harmonicity as hm
from .structures import FramePoint, StructurePoint, axiom_residuals

__all__ = ["IdentityCheck", "CATALOG", "CONTROL_PASS_IDS", "evaluate_identity", "catalog_by_id"]


# -- residual helpers --------------------------------------------------------


def _scal(parts) -> float:
    parts = [float(p) for p in parts]
    total = sum(parts)
    scale = max([1.0] + [abs(p) for p in parts])
    return abs(total) / scale


def _vec(st, parts) -> float:
    total = np.zeros(st.dim)
    scale = 1.0
    for p in parts:
        total = total + p
        scale = max(scale, st.norm(p))
    return st.norm(total) / scale


def _mat(parts, right=None) -> float:
    mats = [p if right is None else p @ right for p in parts]
    total = np.zeros_like(mats[0])
    scale = 1.0
    for m in mats:
        total = total + m
        scale = max(scale, float(np.abs(m).max()))
    return float(np.abs(total).max()) / scale


def _diff(st, a, b) -> float:
    return _vec(st, [a, -b])


def _unit_h(st, v, fallback):
    """Normalize the horizontal part of v, falling back to a frame leg when
    the projection is too small to define a direction."""
    w = st.P @ v
    n = st.norm(w)
    if n <= 1e-8:
        return fallback
    return w / n


# -- individual evaluators ---------------------------------------------------


def _i1(st, fp, args):
    return max(axiom_residuals(st.acs, st.x).values())


def _i2(st, fp, args):
    X, Y = args
    worst = 0.0
    for U, V in ((X, Y), (X, X), (Y, Y)):
        a = st.nab_theta_v(U, V)
        b = st.nab_theta_v(V, U)
        worst = max(worst, _vec(st, [a, b]))
    return worst


def _i3(st, fp, args):
    X, Y = args
    kil = _scal([st.inner(st.nab_xi_v(X), Y), st.inner(st.nab_xi_v(Y), X)])
    geo = st.norm(st.nab_xi_v(st.xi))
    return max(kil, geo)


def _i4(st, fp, args):
    X, Y = args
    xi = st.xi
    BX = hm.bar_nabla_J(st.acs, X, state=st)
    BY = hm.bar_nabla_J(st.acs, Y, state=st)
    Bxi = hm.bar_nabla_J(st.acs, xi, state=st)
    parts = []
    parts.append(_vec(st, [BX @ Y, BY @ X]))
    u1 = Bxi @ X
    u2 = st.J @ st.nab_xi_v(X)
    u3 = st.theta @ st.nab_xi_v(X)
    u4 = st.nab_theta_v(xi, X)
    parts.append(max(_diff(st, u1, u2), _diff(st, u2, u3), _diff(st, u3, u4)))
    parts.append(_vec(st, [st.J @ (Bxi @ X), st.nab_xi_v(X)]))
    parts.append(_vec(st, [st.theta @ st.nab_theta_v(xi, X), st.nab_xi_v(X)]))
    JX = st.J @ X
    JY = st.J @ Y
    BJX = hm.bar_nabla_J(st.acs, JX, state=st)
    parts.append(_vec(st, [BX @ Y, BJX @ JY]))
    return max(parts)


def _i5(st, fp, args):
    terms = []
    for F in fp.horizontal:
        B = hm.bar_nabla_J(st.acs, F, state=st)
        terms.append(B @ F)
    return _vec(st, terms)


def _i6(st, fp, args):
    X, Y = args
    thX = st.theta @ X
    a = st.nab_theta_v(thX, st.theta @ Y)
    b = st.nab_theta_v(X, Y)
    c = -st.inner(Y, st.xi) * st.nab_xi_v(thX)
    d = -st.inner(X, st.xi) * (st.theta @ st.nab_xi_v(Y))
    return _vec(st, [a, b, c, d])


def _i7(st, fp, args):
    (X,) = args
    return _vec(st, [st.theta @ st.nab_xi_v(X), st.nab_xi_v(st.theta @ X)])


def _i8(st, fp, args):
    X, Y = args
    a = st.nab_theta_v(X, st.theta @ Y)
    b = st.theta @ st.nab_theta_v(X, Y)
    c = -st.inner(Y, st.nab_xi_v(X)) * st.xi
    d = -st.inner(Y, st.xi) * st.nab_xi_v(X)
    return _vec(st, [a, b, c, d])


def _comm(A, B):
    return A @ B - B @ A


def _i9(st, fp, args):
    (E,) = args
    JE = st.J @ E
    J = st.J
    m1 = _comm(hm.bar_nabla2_J(st.acs, E, E, state=st), J)
    m2 = _comm(hm.bar_nabla2_J(st.acs, JE, JE, state=st), J)
    m3 = _comm(hm.bar_curvature_matrix(st, E, JE), J)
    return _mat([m1, m2, -2.0 * m3], right=st.P)


def _i10(st, fp, args):
    (X,) = args
    xi = st.xi
    m1 = _comm(hm.bar_nabla2_J(st.acs, xi, xi, state=st), st.J)
    nab2th = np.einsum("cdab,c,d->ab", st.nab2_theta, xi, xi)
    m2 = _comm(nab2th, st.theta)
    v3a = st.nab2_theta_v(xi, xi, X)
    v3b = st.theta @ st.riem_v(xi, X, xi)
    return max(_mat([m1], right=st.P), _mat([m2]), _diff(st, v3a, v3b))


def _i11(st, fp, args):
    X, Y, s = args
    direct = hm.bar_curvature_direct(st.acs, X, Y, s, state=st)
    split = hm.bar_curvature(st.acs, X, Y, s, state=st)
    return _diff(st, direct, split)


def _i12(st, fp, args):
    J = st.J
    M = np.zeros((st.dim, st.dim))
    for F in fp.horizontal:
        M += hm.bar_curvature_matrix(st, F, J @ F)
    L = hm.bar_laplacian_J(st, fp)
    r1 = _mat([_comm(M, J), _comm(L, J)], right=st.P)
    A, B = hm.ricci_star_matrix_pair(st, fp)
    scale = max(1.0, float(np.linalg.norm(A)), float(np.linalg.norm(B)))
    r2 = float(np.linalg.norm(A - B)) / scale
    return max(r1, r2)


def _i13(st, fp, args):
    p = hm.hse2_parts(st, fp)
    th, xi = st.theta, st.xi
    a = th @ p["trace_term"]
    b = 0.5 * (th @ (p["curv_sum"] @ xi))
    c = st.P @ p["lap_xi"]
    r1 = _vec(st, [a, b, c])
    comm = p["curv_sum"] @ (th @ xi) - th @ (p["curv_sum"] @ xi)
    r2 = _vec(st, [0.5 * (st.J @ p["trace_term"]), -0.5 * comm])
    return max(r1, r2)


def _i14(st, fp, args):
    W, X, Y, Z = args
    S = lambda a, b, c, d: st.inner(c, st.nab2_theta_v(a, b, d))
    base = S(W, X, Y, Z)
    parts = [
        _scal([base, -S(W, Y, Z, X)]),
        _scal([base, S(W, Y, X, Z)]),
        abs(S(W, X, X, Z)) / max(1.0, abs(base)),
    ]
    thY = st.theta @ Y
    lhs = S(X, Y, X, thY)
    r1 = st.riem_s(X, Y, X, Y)
    r2 = -st.riem_s(X, Y, st.theta @ X, thY)
    r3 = -st.inner(Y, st.xi) * st.riem_s(X, Y, X, st.xi)
    parts.append(_scal([lhs, -r1, -r2, -r3]))
    return max(parts)


def _i15(st, fp, args):
    X, Y = args
    dth = st.nab_theta_v(X, Y)
    a = st.inner(dth, dth)
    b = st.inner(Y, st.nab_xi_v(X)) ** 2
    c = st.riem_s(X, Y, X, Y)
    d = -st.riem_s(X, Y, st.theta @ X, st.theta @ Y)
    return _scal([a, b, c, d])


def _t_quad(st, X, Y):
    """Quadratic correction form entering the curvature reflection identity."""
    xi, th = st.xi, st.theta
    eX = st.inner(X, xi)
    eY = st.inner(Y, xi)
    dX = st.nab_xi_v(X)
    dY = st.nab_xi_v(Y)
    mid = th @ st.nab_theta_v(X, Y)
    return (
        -2.0 * eY * st.inner(mid, dX)
        + 2.0 * eX * st.inner(mid, dY)
        - 2.0 * eX * eY * st.inner(dX, dY)
        + eY**2 * st.inner(dX, dX)
        + eX**2 * st.inner(dY, dY)
        + eY * st.riem_s(th @ X, th @ Y, X, xi)
        - eX * st.riem_s(th @ X, th @ Y, Y, xi)
    )


def _polar_a(T, W, X, Y, Z):
    return 0.5 * (
        T(W + Y, Z + X)
        - T(W + Y, X)
        + T(W, X)
        + T(Y, X)
        - T(W, Z + X)
        - T(W + Y, Z)
        + T(W, Z)
        + T(Y, Z)
        - T(Y, Z + X)
    )


def _polar_b(T, W, X, Y, Z):
    return 0.5 * (
        T(W + Z, X + Y)
        - T(W, X + Y)
        - T(Z, X + Y)
        - T(W + Z, X)
        + T(W, X)
        + T(Z, X)
        - T(W + Z, Y)
        + T(W, Y)
        + T(Z, Y)
    )


def _theta_reflect_gap(st, W, X, Y, Z):
    th = st.theta
    return st.riem_s(W, X, Y, Z) - st.riem_s(th @ W, th @ X, th @ Y, th @ Z)


def _i16(st, fp, args):
    W, X, Y, Z = args
    T = lambda a, b: _t_quad(st, a, b)
    q = _theta_reflect_gap(st, W, X, Y, Z)
    a = _polar_a(T, W, X, Y, Z)
    b = _polar_b(T, W, X, Y, Z)
    r1 = _scal([q, -(a - b) / 3.0])
    Wh, Xh = st.P @ W, st.P @ X
    Yh, Zh = st.P @ Y, st.P @ Z
    qh = _theta_reflect_gap(st, Wh, Xh, Yh, Zh)
    ah = _polar_a(T, Wh, Xh, Yh, Zh)
    bh = _polar_b(T, Wh, Xh, Yh, Zh)
    r2 = _scal([qh, -(ah - bh) / 3.0])
    r3 = min(abs(qh), 1.0)
    return max(r1, r2, r3)


def _i17(st, fp, args):
    U, V = args
    T = lambda a, b: _t_quad(st, a, b)
    parts = [_scal([T(U, V), -T(V, U)])]
    X = _unit_h(st, U, fp.horizontal[0])
    Y = _unit_h(st, V, fp.horizontal[-1])
    parts.append(min(abs(T(X, Y)), 1.0))
    dY = st.nab_xi_v(Y)
    parts.append(_scal([T(st.xi, Y), st.inner(dY, dY)]))
    lhs = T(st.xi + X, Y)
    t1 = -st.inner(dY, dY)
    t2 = 2.0 * st.inner(st.theta @ st.nab_theta_v(X, Y), dY)
    t3 = -st.riem_s(st.theta @ X, st.theta @ Y, Y, st.xi)
    parts.append(_scal([lhs, -t1, -t2, -t3]))
    return max(parts)


def _i18(st, fp, args):
    p = hm.hse2_parts(st, fp)
    xi, th, P = st.xi, st.theta, st.P
    r1 = _vec(st, [p["lap_xi"], -p["grad_sq"] * xi])
    r2 = _vec(st, [3.0 * (th @ (p["curv_sum"] @ xi)), P @ p["lap_xi"]])
    aux = np.zeros(st.dim)
    for F in fp.horizontal:
        aux = aux + st.riem_v(xi, F, th @ F)
    r3 = _vec(st, [P @ (p["curv_sum"] @ xi), P @ aux])
    r4 = _vec(st, [P @ (p["curv_sum"] @ xi)])
    return max(r1, r2, r3, r4)


def _i19(st, fp, args):
    Z, W = args
    r1 = hm.hse1_residual(st.acs, fp, state=st)
    a = hm.ricci_star(st.acs, fp, st.theta @ Z, st.theta @ W, state=st)
    b = hm.ricci_star(st.acs, fp, Z, W, state=st)
    r2 = _scal([a, -b])
    return max(r1, r2)


def _i20(st, fp, args):
    Y, X, W, Z = args
    th = st.theta
    a = st.riem_s(Y, X, W, Z)
    b = -st.riem_s(Y, X, th @ W, th @ Z)
    c = st.inner(st.nab_theta_v(W, Z), st.nab_theta_v(Y, X))
    d = -st.inner(Y, st.nab_xi_v(X)) * st.inner(Z, st.nab_xi_v(W))
    return _scal([a, b, c, d])


def _i21(st, fp, args):
    Y, X, W, Z = args
    th = st.theta
    lhs = st.inner(st.riem_v(Y, X, th @ W) - th @ st.riem_v(Y, X, W), Z)
    t1 = st.inner(st.nab_theta_v(Y, X), th @ st.nab_theta_v(W, Z))
    t2 = -st.inner(W, st.nab_xi_v(Z)) * st.inner(X, st.nab_xi_v(th @ Y))
    t3 = st.inner(Y, st.nab_xi_v(X)) * st.inner(Z, st.nab_xi_v(th @ W))
    return _scal([lhs, -t1, -t2, -t3])


def _i22(st, fp, args):
    W, Y, Z = args
    th, xi = st.theta, st.xi
    lhs = 3.0 * st.riem_s(W, xi, Y, Z)
    t1 = 2.0 * st.inner(th @ st.nab_theta_v(Z, Y), st.nab_xi_v(W))
    t2 = st.inner(th @ st.nab_theta_v(Z, W), st.nab_xi_v(Y))
    t3 = -0.5 * st.riem_s(th @ Z, th @ W, Y, xi)
    t4 = st.riem_s(th @ Y, th @ Z, W, xi)
    t5 = -st.inner(th @ st.nab_theta_v(Y, W), st.nab_xi_v(Z))
    t6 = 0.5 * st.riem_s(th @ Y, th @ W, Z, xi)
    return _scal([lhs, -t1, -t2, -t3, -t4, -t5, -t6])


def _i23(st, fp, args):
    (X,) = args
    t1, t2 = hm.harmonic_map_residual(st.acs, fp, X, state=st)
    return max(t1, t2)


def _i24(st, fp, args):
    t1, t2 = hm.harmonic_map_residual(st.acs, fp, st.xi, state=st)
    return max(t1, t2)


def _i25(st, fp, args):
    W, Z, Y = args
    th = st.theta
    lhs = 1.5 * st.riem_s(W, Z, Y, st.xi)
    t1 = (18.0 / 7.0) * st.inner(st.nab_xi_v(Y), th @ st.nab_theta_v(Z, W))
    t2 = (9.0 / 7.0) * st.inner(st.nab_xi_v(W), th @ st.nab_theta_v(Z, Y))
    t3 = -(9.0 / 7.0) * st.inner(st.nab_xi_v(Z), th @ st.nab_theta_v(W, Y))
    r1 = _scal([lhs, -t1, -t2, -t3])
    _, b1 = hm.harmonic_map_residual(st.acs, fp, W, state=st)
    _, b2 = hm.harmonic_map_residual(st.acs, fp, st.xi, state=st)
    return max(r1, b1, b2)


def _i26(st, fp, args):
    W, X, Y, Z = args
    th = st.theta
    a = st.riem_s(W, X, Y, Z)
    b = -st.riem_s(th @ W, th @ X, th @ Y, th @ Z)
    return _scal([a, b])


def _i27(st, fp, args):
    W, Y = args
    a = st.riem_s(st.xi, W, st.xi, Y)
    b = st.inner(st.nab_xi_v(W), st.nab_xi_v(Y))
    return _scal([a, b])


# -- catalog -----------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    ident: str
    anchor: str
    kinds: Tuple[str, ...]
    evaluate: Callable
    cosymplectic_only: bool = False
    holds_on_control: bool = False

    @property
    def arity(self) -> int:
        return len(self.kinds)


CATALOG: Tuple[IdentityCheck, ...] = (
    IdentityCheck(
        "I1",
        "theta^2 = -Id + xi (x) eta; eta(xi) = 1; |xi| = 1; g(theta X, theta Y) = g(X,Y) - eta(X)eta(Y)",
        (),
        _i1,
        holds_on_control=True,
    ),
    IdentityCheck("I2", "(nab_X theta)Y + (nab_Y theta)X = 0", ("any", "any"), _i2),
    IdentityCheck(
        "I3",
        "g(nab_X xi, Y) + g(nab_Y xi, X) = 0; nab_xi xi = 0",
        ("any", "any"),
        _i3,
        holds_on_control=True,
    ),
    IdentityCheck(
        "I4",
        "(barnab_X J)Y + (barnab_Y J)X = 0; (barnab_xi J)X = J nab_X xi = theta nab_X xi = (nab_xi theta)X; "
        "J(barnab_xi J)X = -nab_X xi; (barnab_X J)Y = -(barnab_JX J)(JY)",
        ("horizontal", "horizontal"),
        _i4,
    ),
    IdentityCheck("I5", "sum_i (barnab_{F_i} J)(F_i) = 0", (), _i5),
    IdentityCheck(
        "I6",
        "(nab_{theta X} theta)(theta Y) = -(nab_X theta)Y + g(Y,xi) nab_{theta X} xi + g(X,xi) theta(nab_Y xi)",
        ("any", "any"),
        _i6,
    ),
    IdentityCheck("I7", "theta(nab_X xi) = -nab_{theta X} xi", ("any",), _i7),
    IdentityCheck(
        "I8",
        "(nab_X theta)(theta Y) = -theta(nab_X theta)Y + g(Y, nab_X xi) xi + g(Y,xi) nab_X xi",
        ("any", "any"),
        _i8,
        holds_on_control=True,
    ),
    IdentityCheck(
        "I9",
        "[barnab^2_{E,E} J, J] = -[barnab^2_{JE,JE} J, J] + 2[Rbar(E,JE), J]",
        ("horizontal",),
        _i9,
    ),
    IdentityCheck(
        "I10",
        "[barnab^2_{xi,xi} J, J] = 0; [nab^2_{xi,xi} theta, theta] = 0; (nab^2_{xi,xi} theta)X = theta R(xi,X)xi",
        ("horizontal",),
        _i10,
    ),
    IdentityCheck(
        "I11",
        "Rbar(X,Y)s = P R(X,Y)s + g(nab_Y xi, s) nab_X xi - g(nab_X xi, s) nab_Y xi",
        ("any", "any", "horizontal"),
        _i11,
    ),
    IdentityCheck(
        "I12",
        "[barnab*barnab J, J] = -sum_i [Rbar(F_i, J F_i), J]; g(-[barnab*barnab J, J]Z, W) = "
        "2 ricci*(theta Z, theta W) - 2 ricci*(Z, W)",
        (),
        _i12,
    ),
    IdentityCheck(
        "I13",
        "theta(tau) + (1/2) theta(Rsum xi) + P(nab*nab xi) = 0 with tau = sum_i (barnab_{F_i} J)(nab_{F_i} xi)",
        (),
        _i13,
    ),
    IdentityCheck(
        "I14",
        "nab^2 two-form is skew in its last three slots; nab2Theta(X,Y,X,theta Y) = "
        "R(X,Y,X,Y) - R(X,Y,theta X,theta Y) - eta(Y) R(X,Y,X,xi)",
        ("any", "any", "any", "any"),
        _i14,
    ),
    IdentityCheck(
        "I15",
        "|(nab_X theta)Y|^2 + g(Y, nab_X xi)^2 + R(X,Y,X,Y) - R(X,Y,theta X,theta Y) = 0",
        ("any", "any"),
        _i15,
    ),
    IdentityCheck(
        "I16",
        "R(W,X,Y,Z) - R(theta W,theta X,theta Y,theta Z) = (A - B)/3 by polarization of the quadratic form T",
        ("any", "any", "any", "any"),
        _i16,
    ),
    IdentityCheck(
        "I17",
        "T is symmetric; T vanishes on horizontal pairs; T(xi, Y) = -|nab_Y xi|^2; "
        "T(xi + X, Y) = -|nab_Y xi|^2 + 2 g(theta(nab_X theta)Y, nab_Y xi) - g(R(theta X,theta Y)Y, xi)",
        ("any", "any"),
        _i17,
    ),
    IdentityCheck(
        "I18",
        "nab*nab xi = |nab xi|^2 xi; 3 theta(Rsum xi) + P(nab*nab xi) = 0; "
        "P(Rsum xi) = -P(sum_i R(xi, F_i) theta F_i) = 0",
        (),
        _i18,
    ),
    IdentityCheck(
        "I19",
        "[barnab*barnab J, J] = 0; ricci*(theta Z, theta W) = ricci*(Z, W)",
        ("horizontal", "horizontal"),
        _i19,
    ),
    IdentityCheck(
        "I20",
        "R(Y,X,W,Z) - R(Y,X,theta W,theta Z) = -g((nab_W theta)Z, (nab_Y theta)X) + g(Y,nab_X xi) g(Z,nab_W xi)",
        ("horizontal", "horizontal", "horizontal", "horizontal"),
        _i20,
    ),
    IdentityCheck(
        "I21",
        "g([R(Y,X), theta]W, Z) = g((nab_Y theta)X, theta(nab_W theta)Z) "
        "- g(W,nab_Z xi) g(X,nab_{theta Y} xi) + g(Y,nab_X xi) g(Z,nab_{theta W} xi)",
        ("horizontal", "horizontal", "horizontal", "horizontal"),
        _i21,
    ),
    IdentityCheck(
        "I22",
        "3 g(R(W,xi)Y, Z) = 2 g(theta(nab_Z theta)Y, nab_W xi) + g(theta(nab_Z theta)W, nab_Y xi) "
        "- (1/2) g(R(theta Z,theta W)Y, xi) + g(R(theta Y,theta Z)W, xi) "
        "- g(theta(nab_Y theta)W, nab_Z xi) + (1/2) g(R(theta Y,theta W)Z, xi)",
        ("horizontal", "horizontal", "horizontal"),
        _i22,
    ),
    IdentityCheck("I23", "harmonic-section obstruction vanishes along horizontal directions", ("horizontal",), _i23),
    IdentityCheck("I24", "harmonic-section obstruction vanishes along the unit field", (), _i24),
    IdentityCheck(
        "I25",
        "(3/2) g(R(W,Z)Y, xi) = (18/7) g(nab_Y xi, theta(nab_Z theta)W) + (9/7) g(nab_W xi, theta(nab_Z theta)Y) "
        "- (9/7) g(nab_Z xi, theta(nab_W theta)Y)",
        ("horizontal", "horizontal", "horizontal"),
        _i25,
    ),
    IdentityCheck(
        "I26",
        "R(W,X,Y,Z) = R(theta W,theta X,theta Y,theta Z)",
        ("any", "any", "any", "any"),
        _i26,
        cosymplectic_only=True,
    ),
    IdentityCheck(
        "I27",
        "g(R(xi,W)xi, Y) + g(nab_W xi, nab_Y xi) = 0",
        ("horizontal", "horizontal"),
        _i27,
        holds_on_control=True,
    ),
)

CONTROL_PASS_IDS = frozenset(c.ident for c in CATALOG if c.holds_on_control)

_BY_ID = {c.ident: c for c in CATALOG}


def catalog_by_id(ident: str) -> IdentityCheck:
    try:
        return _BY_ID[ident]
    except KeyError:
        raise KeyError(f"unknown identity {ident!r}; known: {', '.join(_BY_ID)}") from None


def evaluate_identity(check: IdentityCheck, st: StructurePoint, fp: FramePoint, args) -> float:
    if len(args) != check.arity:
        raise ValueError(f"{check.ident} expects {check.arity} vector arguments, got {len(args)}")
    clean = []
    for kind, a in zip(check.kinds, args):
        v = np.asarray(a, dtype=float)
        if kind == "horizontal" and np.max(np.abs(v - st.P @ v)) > 1e-8 * max(1.0, np.max(np.abs(v))):
            raise ValueError(f"{check.ident} requires a horizontal vector argument")
        clean.append(v)
    return float(check.evaluate(st, fp, tuple(clean)))
