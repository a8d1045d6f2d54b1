"""Forward-mode automatic differentiation on truncated Taylor jets.

A ``Jet`` carries the value of a scalar expression together with its
partial derivatives up to third order in a fixed set of seed directions.
Arithmetic applies the exact product and chain rules, so derivatives of
chart functions come out exact to floating-point roundoff; no finite
difference step appears anywhere in this module.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Jet",
    "FieldJets",
    "seed_coords",
    "partials",
    "value_of",
    "sin",
    "cos",
    "tan",
    "sqrt",
    "exp",
    "log",
]


class Jet:
    """Scalar with raw partial derivatives up to order 3.

    The payload stores derivatives, not Taylor coefficients:
    ``g[i] = d_i f``, ``h[i, j] = d_i d_j f``, ``t[i, j, k] = d_i d_j d_k f``.
    ``h``/``t`` are ``None`` when the jet was seeded below that order.
    Every jet mixed into one expression must share the seed dimension and
    the order; plain ints and floats are treated as constants.
    """

    __slots__ = ("v", "g", "h", "t")

    def __init__(self, v, g, h=None, t=None):
        self.v = float(v)
        self.g = g
        self.h = h
        self.t = t

    @classmethod
    def constant(cls, x, m, order):
        h = np.zeros((m, m)) if order >= 2 else None
        t = np.zeros((m, m, m)) if order >= 3 else None
        return cls(float(x), np.zeros(m), h, t)

    @classmethod
    def seed(cls, x, i, m, order):
        g = np.zeros(m)
        g[i] = 1.0
        h = np.zeros((m, m)) if order >= 2 else None
        t = np.zeros((m, m, m)) if order >= 3 else None
        return cls(float(x), g, h, t)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            h = self.h + other.h if self.h is not None else None
            t = self.t + other.t if self.t is not None else None
            return Jet(self.v + other.v, self.g + other.g, h, t)
        if isinstance(other, (int, float)):
            return Jet(self.v + other, self.g, self.h, self.t)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        h = -self.h if self.h is not None else None
        t = -self.t if self.t is not None else None
        return Jet(-self.v, -self.g, h, t)

    def __sub__(self, other):
        if isinstance(other, Jet):
            h = self.h - other.h if self.h is not None else None
            t = self.t - other.t if self.t is not None else None
            return Jet(self.v - other.v, self.g - other.g, h, t)
        if isinstance(other, (int, float)):
            return Jet(self.v - other, self.g, self.h, self.t)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            v = a.v * b.v
            g = a.v * b.g + b.v * a.g
            h = t = None
            if a.h is not None:
                h = a.v * b.h + b.v * a.h + np.outer(a.g, b.g) + np.outer(b.g, a.g)
            if a.t is not None:
                # d_i d_j d_k (ab): split the three derivatives over the factors
                e1 = np.einsum("ij,k->ijk", a.h, b.g)
                e2 = np.einsum("ij,k->ijk", b.h, a.g)
                t = (
                    a.v * b.t
                    + b.v * a.t
                    + e1 + e1.transpose(0, 2, 1) + e1.transpose(2, 0, 1)
                    + e2 + e2.transpose(0, 2, 1) + e2.transpose(2, 0, 1)
                )
            return Jet(v, g, h, t)
        if isinstance(other, (int, float)):
            c = float(other)
            h = c * self.h if self.h is not None else None
            t = c * self.t if self.t is not None else None
            return Jet(c * self.v, c * self.g, h, t)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return self._reciprocal() * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self ** (-n))._reciprocal()
        out = Jet.constant(1.0, len(self.g), self.order)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- ordering on values (used by domain checks only) -------------------

    def __lt__(self, other):
        return self.v < _val(other)

    def __le__(self, other):
        return self.v <= _val(other)

    def __gt__(self, other):
        return self.v > _val(other)

    def __ge__(self, other):
        return self.v >= _val(other)

    def __float__(self):
        return self.v

    def __repr__(self):
        return f"Jet({self.v!r}, order={self.order})"

    @property
    def order(self):
        if self.t is not None:
            return 3
        if self.h is not None:
            return 2
        return 1

    def _nilpotent(self):
        return Jet(0.0, self.g, self.h, self.t)

    def _compose(self, c0, c1, c2=0.0, c3=0.0):
        """Chain rule: c_k is the k-th derivative of the outer map at self.v."""
        d = self._nilpotent()
        out = c1 * d + c0
        if self.h is not None:
            d2 = d * d
            out = out + (c2 / 2.0) * d2
            if self.t is not None:
                out = out + (c3 / 6.0) * (d2 * d)
        return out

    def _reciprocal(self):
        x = self.v
        return self._compose(1.0 / x, -1.0 / x**2, 2.0 / x**3, -6.0 / x**4)


def _val(x):
    return x.v if isinstance(x, Jet) else float(x)


# -- elementary functions, usable on floats and jets alike -----------------


def sin(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.v), math.cos(x.v)
        return x._compose(s, c, -s, -c)
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.v), math.cos(x.v)
        return x._compose(c, -s, -c, s)
    return math.cos(x)


def tan(x):
    if isinstance(x, Jet):
        return sin(x) / cos(x)
    return math.tan(x)


def sqrt(x):
    if isinstance(x, Jet):
        r = math.sqrt(x.v)
        return x._compose(r, 0.5 / r, -0.25 / r**3, 0.375 / r**5)
    return math.sqrt(x)


def exp(x):
    if isinstance(x, Jet):
        e = math.exp(x.v)
        return x._compose(e, e, e, e)
    return math.exp(x)


def log(x):
    if isinstance(x, Jet):
        u = x.v
        return x._compose(math.log(u), 1.0 / u, -1.0 / u**2, 2.0 / u**3)
    return math.log(x)


# -- evaluation of whole component arrays ----------------------------------


class FieldJets:
    """Partial derivatives of an array-valued chart function at one point.

    ``value`` has the component shape of the function output; ``d1[c, ...]``
    is the coordinate derivative along ``x^c`` and so on.  Missing orders
    are ``None``.
    """

    __slots__ = ("value", "d1", "d2", "d3")

    def __init__(self, value, d1, d2=None, d3=None):
        self.value = value
        self.d1 = d1
        self.d2 = d2
        self.d3 = d3


def seed_coords(x, order):
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    return np.array([Jet.seed(x[i], i, m, order) for i in range(m)], dtype=object)


def partials(fn, x, order):
    """Evaluate ``fn`` at ``x`` returning values and derivatives up to ``order``.

    ``fn`` takes an object array of scalars (jets here, plain floats in
    direct evaluation) and may return a scalar, list or array of any shape;
    entries that come back as plain numbers are treated as constants.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    out = np.asarray(fn(seed_coords(x, order)), dtype=object)
    shape = out.shape
    value = np.zeros(shape)
    d1 = np.zeros((m,) + shape)
    d2 = np.zeros((m, m) + shape) if order >= 2 else None
    d3 = np.zeros((m, m, m) + shape) if order >= 3 else None
    for idx in np.ndindex(shape) if shape else [()]:
        entry = out[idx] if shape else out[()]
        if isinstance(entry, Jet):
            value[idx] = entry.v
            d1[(slice(None),) + idx] = entry.g
            if d2 is not None:
                d2[(slice(None), slice(None)) + idx] = entry.h
            if d3 is not None:
                d3[(slice(None),) * 3 + idx] = entry.t
        else:
            value[idx] = float(entry)
    return FieldJets(value, d1, d2, d3)


def value_of(fn, x):
    """Evaluate ``fn`` on plain floats, bypassing derivative bookkeeping."""
    x = np.asarray(x, dtype=float)
    out = np.asarray(fn(x.astype(object)), dtype=object)
    return out.astype(float)
