"""Truncated bivariate Taylor jets.

A :class:`Jet2` stores the Taylor coefficients ``d^(i+j) f / du^i dv^j / (i! j!)``
of a scalar field about an expansion point, for every multi-index with
``i + j <= order``.  The coefficient array has shape ``(ncoef, *batch)`` so a
single jet can carry a whole grid of expansion points; every operation is
vectorized over the batch axes.

Coefficients are kept in graded order: ``(0,0), (1,0), (0,1), (2,0), (1,1),
(0,2), ...``.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DivisionBySmallValue, DomainError, JetOrderError

DEFAULT_ORDER = 4
MIN_SEED_ORDER = 4

_DIV_FLOOR = 1e-300


def ncoef(order):
    return (order + 1) * (order + 2) // 2


@lru_cache(maxsize=None)
def _tables(order):
    index = [(total - j, j) for total in range(order + 1) for j in range(total + 1)]
    pos = {ij: k for k, ij in enumerate(index)}

    left, right, starts = [], [], []
    div_terms = []  # per k: (m, n) with m + n = k, n != 0
    sqrt_terms = []  # per k: (m, n) with m + n = k, m, n != 0
    for k, (i, j) in enumerate(index):
        starts.append(len(left))
        dm, dn, sm, sn = [], [], [], []
        for a in range(i + 1):
            for b in range(j + 1):
                m = pos[(a, b)]
                n = pos[(i - a, j - b)]
                left.append(m)
                right.append(n)
                if n != 0:
                    dm.append(m)
                    dn.append(n)
                    if m != 0:
                        sm.append(m)
                        sn.append(n)
        div_terms.append((np.array(dm, dtype=int), np.array(dn, dtype=int)))
        sqrt_terms.append((np.array(sm, dtype=int), np.array(sn, dtype=int)))

    diff = {}
    if order >= 1:
        lower = [(total - j, j) for total in range(order) for j in range(total + 1)]
        diff["u"] = (
            np.array([pos[(i + 1, j)] for i, j in lower]),
            np.array([i + 1.0 for i, j in lower]),
        )
        diff["v"] = (
            np.array([pos[(i, j + 1)] for i, j in lower]),
            np.array([j + 1.0 for i, j in lower]),
        )
    return {
        "index": index,
        "pos": pos,
        "left": np.array(left, dtype=int),
        "right": np.array(right, dtype=int),
        "starts": np.array(starts, dtype=int),
        "div": div_terms,
        "sqrt": sqrt_terms,
        "diff": diff,
    }


def _expand(arr, nd):
    """Insert singleton batch axes after axis 0 so arr has 1 + nd dims."""
    extra = nd - (arr.ndim - 1)
    if extra <= 0:
        return arr
    return arr.reshape(arr.shape[:1] + (1,) * extra + arr.shape[1:])


class Jet2:
    """Immutable truncated Taylor expansion of a scalar field of (u, v)."""

    __slots__ = ("coeffs", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, order):
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.shape[0] != ncoef(order):
            raise JetOrderError(
                f"order {order} needs {ncoef(order)} coefficients, got {coeffs.shape[0]}"
            )
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.order = order

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order=DEFAULT_ORDER):
        value = np.asarray(value, dtype=float)
        c = np.zeros((ncoef(order),) + value.shape)
        c[0] = value
        return cls(c, order)

    @property
    def batch_shape(self):
        return self.coeffs.shape[1:]

    @property
    def value(self):
        """Function value at the expansion point(s)."""
        v = self.coeffs[0]
        return float(v) if v.ndim == 0 else v.copy()

    def coeff(self, i, j):
        if i < 0 or j < 0 or i + j > self.order:
            raise JetOrderError(f"multi-index ({i},{j}) beyond order {self.order}")
        c = self.coeffs[_tables(self.order)["pos"][(i, j)]]
        return float(c) if c.ndim == 0 else c.copy()

    def partial(self, i, j):
        """Mixed partial derivative d^(i+j) f / du^i dv^j at the expansion point."""
        return math.factorial(i) * math.factorial(j) * self.coeff(i, j)

    def diff(self, axis):
        """Derivative jet along ``"u"`` or ``"v"``; the order drops by one."""
        if self.order < 1:
            raise JetOrderError("cannot differentiate an order-0 jet")
        src, scale = _tables(self.order)["diff"][axis]
        c = self.coeffs[src] * _expand(scale, self.coeffs.ndim - 1)
        return Jet2(c, self.order - 1)

    def truncate(self, order):
        if order > self.order:
            raise JetOrderError(f"cannot raise order {self.order} to {order}")
        return Jet2(self.coeffs[: ncoef(order)], order)

    def swapped(self):
        """Jet of f(v, u): exchanges the roles of the two variables."""
        t = _tables(self.order)
        perm = [t["pos"][(j, i)] for i, j in t["index"]]
        return Jet2(self.coeffs[perm], self.order)

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet2(self.coeffs[(slice(None),) + key], self.order)

    def __repr__(self):
        return f"Jet2(order={self.order}, batch={self.batch_shape}, value={self.coeffs[0]!r})"

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        """Return (a, b) coefficient arrays broadcast to a common batch and order."""
        if isinstance(other, Jet2):
            order = min(self.order, other.order)
            a = self.coeffs[: ncoef(order)]
            b = other.coeffs[: ncoef(order)]
        else:
            order = self.order
            a = self.coeffs
            other = np.asarray(other, dtype=float)
            b = np.zeros((ncoef(order),) + other.shape)
            b[0] = other
        nd = max(a.ndim, b.ndim) - 1
        return _expand(a, nd), _expand(b, nd), order

    def __neg__(self):
        return Jet2(-self.coeffs, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet2):
            other = np.asarray(other, dtype=float)
            a = _expand(self.coeffs, other.ndim)
            c = np.broadcast_to(a, a.shape[:1] + np.broadcast_shapes(a.shape[1:], other.shape)).copy()
            c[0] = c[0] + other
            return Jet2(c, self.order)
        a, b, order = self._coerce(other)
        return Jet2(a + b, order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            other = np.asarray(other, dtype=float)
            a = _expand(self.coeffs, other.ndim)
            return Jet2(a * other[None, ...], self.order)
        a, b, order = self._coerce(other)
        t = _tables(order)
        prod = a[t["left"]] * b[t["right"]]
        return Jet2(np.add.reduceat(prod, t["starts"], axis=0), order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            other = np.asarray(other, dtype=float)
            if np.any(np.abs(other) <= _DIV_FLOOR):
                raise DivisionBySmallValue("division by a (near) zero constant")
            return self * (1.0 / other)
        a, b, order = self._coerce(other)
        return Jet2(_divide(a, b, order), order)

    def __rtruediv__(self, other):
        return Jet2.constant(other, self.order) / self

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            return exp(log(self) * exponent)
        if float(exponent).is_integer() and 0 <= exponent <= 16:
            n = int(exponent)
            result = Jet2.constant(np.ones(self.batch_shape), self.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return power(self, exponent)


def _divide(a, b, order):
    b0 = b[0]
    if np.any(np.abs(b0) <= _DIV_FLOOR) or not np.all(np.isfinite(b0)):
        raise DivisionBySmallValue("jet division by a value at or near zero")
    shape = np.broadcast_shapes(a.shape, b.shape)
    c = np.empty(shape)
    for k, (m, n) in enumerate(_tables(order)["div"]):
        if len(m):
            c[k] = (a[k] - np.sum(c[m] * b[n], axis=0)) / b0
        else:
            c[k] = a[k] / b0
    return c


def seed(value, which="constant", order=DEFAULT_ORDER):
    """Jet of a constant or of one of the coordinate functions u, v at ``value``."""
    if order < MIN_SEED_ORDER:
        raise JetOrderError(f"seed order must be >= {MIN_SEED_ORDER}, got {order}")
    which = {"u-variable": "u", "v-variable": "v"}.get(which, which)
    jet = Jet2.constant(value, order)
    if which == "constant":
        return jet
    if which not in ("u", "v"):
        raise ValueError(f"unknown seed kind {which!r}")
    c = np.array(jet.coeffs)
    c[1 if which == "u" else 2] = 1.0
    return Jet2(c, order)


def seeds(u, v, order=DEFAULT_ORDER):
    """Broadcast u, v arrays and return the pair of coordinate jets."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return seed(u, "u", order), seed(v, "v", order)


def as_jet(x, order=DEFAULT_ORDER):
    return x if isinstance(x, Jet2) else Jet2.constant(x, order)


def compose(taylor, x):
    """Apply a univariate function to jet ``x``.

    ``taylor[n]`` must hold f^(n)(x0) / n! at the value part x0 of ``x`` (shape
    ``(>= order+1, *batch)``).  Evaluated by Horner's scheme in the nilpotent
    increment ``x - x0``.
    """
    taylor = np.asarray(taylor, dtype=float)
    p = x.order
    if taylor.shape[0] < p + 1:
        raise JetOrderError("not enough Taylor coefficients for the jet order")
    dc = np.array(x.coeffs)
    dc[0] = 0.0
    d = Jet2(dc, p)
    result = Jet2.constant(taylor[p], p)
    for n in range(p - 1, -1, -1):
        result = result * d + taylor[n]
    return result


def _factorials(p):
    return np.array([math.factorial(n) for n in range(p + 1)], dtype=float)


def _periodic(x, funcs):
    x0 = x.coeffs[0]
    p = x.order
    vals = [f(x0) for f in funcs]
    fact = _factorials(p)
    return compose(np.stack([vals[n % len(vals)] / fact[n] for n in range(p + 1)]), x)


def sin(x):
    if not isinstance(x, Jet2):
        return np.sin(x)
    return _periodic(x, [np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t)])


def cos(x):
    if not isinstance(x, Jet2):
        return np.cos(x)
    return _periodic(x, [np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t), np.sin])


def sinh(x):
    if not isinstance(x, Jet2):
        return np.sinh(x)
    return _periodic(x, [np.sinh, np.cosh])


def cosh(x):
    if not isinstance(x, Jet2):
        return np.cosh(x)
    return _periodic(x, [np.cosh, np.sinh])


def exp(x):
    if not isinstance(x, Jet2):
        return np.exp(x)
    return _periodic(x, [np.exp])


def log(x):
    if not isinstance(x, Jet2):
        return np.log(x)
    x0 = x.coeffs[0]
    if np.any(x0 <= 0):
        raise DomainError("log of a jet with nonpositive value")
    terms = [np.log(x0)]
    for n in range(1, x.order + 1):
        terms.append((-1.0) ** (n + 1) / (n * x0**n))
    return compose(np.stack(terms), x)


def power(x, s):
    """x ** s for a real exponent s (value part must be positive)."""
    x0 = x.coeffs[0]
    if np.any(x0 <= 0):
        raise DomainError("non-integer power of a jet with nonpositive value")
    terms = []
    binom = 1.0
    for n in range(x.order + 1):
        terms.append(binom * x0 ** (s - n))
        binom *= (s - n) / (n + 1)
    return compose(np.stack(terms), x)


def sqrt(x):
    """Square root by recursive coefficient solving."""
    if not isinstance(x, Jet2):
        return np.sqrt(x)
    a = x.coeffs
    if np.any(a[0] <= 0):
        raise DomainError("sqrt of a jet with nonpositive value")
    c = np.empty_like(a)
    c[0] = np.sqrt(a[0])
    two_c0 = 2.0 * c[0]
    for k, (m, n) in enumerate(_tables(x.order)["sqrt"]):
        if k == 0:
            continue
        if len(m):
            c[k] = (a[k] - np.sum(c[m] * c[n], axis=0)) / two_c0
        else:
            c[k] = a[k] / two_c0
    return Jet2(c, x.order)


def where(cond, a, b):
    """Pointwise selection between two jets over the batch axes."""
    cond = np.asarray(cond, dtype=bool)
    if not isinstance(a, Jet2):
        a = Jet2.constant(np.broadcast_to(a, cond.shape), b.order)
    if not isinstance(b, Jet2):
        b = Jet2.constant(np.broadcast_to(b, cond.shape), a.order)
    ca, cb, order = a._coerce(b)
    return Jet2(np.where(_expand(cond[None], ca.ndim - 1), ca, cb), order)


_UNARY = {
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "exp": exp,
    "log": log,
}


def jet_arith(a, b, op):
    """Dispatch one arithmetic primitive by name (``b`` ignored for unary ops)."""
    if op in _UNARY:
        return _UNARY[op](a)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a**b
    raise ValueError(f"unknown jet operation {op!r}")
