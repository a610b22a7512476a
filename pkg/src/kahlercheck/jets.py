"""Dense truncated-Taylor (jet) arithmetic in 2 or 4 variables, order <= 4.

A :class:`Jet` stores the Taylor coefficients c_alpha = (d^alpha f)(p) / alpha!
of a function at a point, for every multi-index |alpha| <= order.  Arithmetic
on jets reproduces the exact partial derivatives of the composite expression,
so spatial differentiation downstream carries no discretization error.

Coefficients are ndarrays of shape ``(ncoeff, *batch)`` where the batch axes
typically hold evaluation points and tensor component indices.  All
operations broadcast over the batch, which is what makes whole-grid
evaluation cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadAxisError,
    BadInputError,
    DomainError,
    SingularJetError,
    UnsupportedOrderError,
)

MAX_ORDER = 4


def _multi_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    # sorted by total degree then lexicographically, so a lower-order table
    # is a prefix of every higher-order one
    out = []
    for total in range(order + 1):
        level = []

        def rec(prefix, remaining, slots):
            if slots == 1:
                level.append(prefix + (remaining,))
                return
            for k in range(remaining + 1):
                rec(prefix + (k,), remaining - k, slots - 1)

        rec((), total, dim)
        level.sort()
        out.extend(level)
    return out


@dataclass(frozen=True)
class JetTable:
    dim: int
    order: int
    alphas: np.ndarray            # (ncoeff, dim) int
    index: dict
    mul_i: np.ndarray             # triples with alpha_i + alpha_j = alpha_k
    mul_j: np.ndarray
    mul_k: np.ndarray
    deriv_src: np.ndarray         # (dim, ncoeff_lower) gather indices
    deriv_fac: np.ndarray         # (dim, ncoeff_lower) factors beta_a + 1
    factorials: np.ndarray        # alpha! per coefficient

    @property
    def ncoeff(self) -> int:
        return len(self.alphas)


@lru_cache(maxsize=None)
def table(dim: int, order: int) -> JetTable:
    if order > MAX_ORDER or order < 0:
        raise UnsupportedOrderError(f"jet order {order} outside 0..{MAX_ORDER}")
    if dim not in (1, 2, 3, 4):
        raise BadAxisError(f"unsupported chart dimension {dim}")
    alphas = _multi_indices(dim, order)
    index = {a: i for i, a in enumerate(alphas)}
    tri = []
    for i, a in enumerate(alphas):
        for j, b in enumerate(alphas):
            c = tuple(x + y for x, y in zip(a, b))
            k = index.get(c)
            if k is not None:
                tri.append((i, j, k))
    tri_arr = np.array(tri, dtype=np.intp)
    low = _multi_indices(dim, order - 1) if order > 0 else []
    dsrc = np.zeros((dim, len(low)), dtype=np.intp)
    dfac = np.zeros((dim, len(low)))
    for a in range(dim):
        for p, beta in enumerate(low):
            up = list(beta)
            up[a] += 1
            dsrc[a, p] = index[tuple(up)]
            dfac[a, p] = beta[a] + 1
    facts = np.array(
        [math.prod(math.factorial(x) for x in al) for al in alphas], dtype=float
    )
    return JetTable(
        dim=dim,
        order=order,
        alphas=np.array(alphas, dtype=np.intp),
        index=index,
        mul_i=tri_arr[:, 0].copy() if len(tri) else np.zeros(0, dtype=np.intp),
        mul_j=tri_arr[:, 1].copy() if len(tri) else np.zeros(0, dtype=np.intp),
        mul_k=tri_arr[:, 2].copy() if len(tri) else np.zeros(0, dtype=np.intp),
        deriv_src=dsrc,
        deriv_fac=dfac,
        factorials=facts,
    )


class Jet:
    """Taylor coefficients of a field at a batch of points."""

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int, coeffs: np.ndarray):
        self.dim = dim
        self.order = order
        self.coeffs = coeffs

    # -- constructors -----------------------------------------------------

    @staticmethod
    def const(value, dim: int, order: int, batch_shape: tuple = ()) -> "Jet":
        tb = table(dim, order)
        arr = np.asarray(value)
        dtype = np.result_type(arr.dtype, np.float64)
        c = np.zeros((tb.ncoeff,) + batch_shape, dtype=dtype)
        c[0] = arr
        return Jet(dim, order, c)

    @staticmethod
    def coordinate(axis: int, points: np.ndarray, dim: int, order: int) -> "Jet":
        """Jet of the coordinate function x_axis at ``points`` (npts, dim)."""
        if not (0 <= axis < dim):
            raise BadAxisError(f"axis {axis} out of range for dim {dim}")
        tb = table(dim, order)
        pts = np.asarray(points, dtype=float)
        c = np.zeros((tb.ncoeff, pts.shape[0]))
        c[0] = pts[:, axis]
        if order >= 1:
            unit = tuple(1 if a == axis else 0 for a in range(dim))
            c[tb.index[unit]] = 1.0
        return Jet(dim, order, c)

    @staticmethod
    def coordinates(points: np.ndarray, dim: int, order: int) -> list["Jet"]:
        return [Jet.coordinate(a, points, dim, order) for a in range(dim)]

    # -- basic accessors ---------------------------------------------------

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def partial(self, alpha: tuple) -> np.ndarray:
        """True partial derivative d^alpha at the base point."""
        tb = table(self.dim, self.order)
        i = tb.index.get(tuple(alpha))
        if i is None:
            raise UnsupportedOrderError(f"multi-index {alpha} beyond order {self.order}")
        return self.coeffs[i] * tb.factorials[i]

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        tb = table(self.dim, order)
        return Jet(self.dim, order, self.coeffs[: tb.ncoeff])

    def copy(self) -> "Jet":
        return Jet(self.dim, self.order, self.coeffs.copy())

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            k = min(self.order, other.order)
            a, b = self.truncate(k), other.truncate(k)
            return Jet(self.dim, k, a.coeffs + b.coeffs)
        arr = np.asarray(other)
        out = self.coeffs.astype(np.result_type(self.coeffs.dtype, arr.dtype), copy=True)
        out[0] = out[0] + arr
        return Jet(self.dim, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.dim, self.order, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return Jet(self.dim, self.order, self.coeffs * np.asarray(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, reciprocal(other))
        return Jet(self.dim, self.order, self.coeffs / np.asarray(other))

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        return power(self, p)

    # -- differentiation ----------------------------------------------------

    def derivative(self, axis: int) -> "Jet":
        """Jet of d/dx_axis, one order lower."""
        if self.order == 0:
            raise UnsupportedOrderError("cannot differentiate an order-0 jet")
        tb = table(self.dim, self.order)
        src = tb.deriv_src[axis]
        fac = tb.deriv_fac[axis].reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(self.dim, self.order - 1, self.coeffs[src] * fac)

    def gradient(self) -> "Jet":
        """Stack of coordinate derivatives; adds a trailing axis of size dim.

        Output batch shape is ``batch + (dim,)`` so the derivative slot sits
        after the point axis, matching the tensor-component layout used by
        the geometry layer (the slot is moved up front by callers as needed).
        """
        if self.order == 0:
            raise UnsupportedOrderError("cannot differentiate an order-0 jet")
        tb = table(self.dim, self.order)
        parts = []
        for a in range(self.dim):
            src = tb.deriv_src[a]
            fac = tb.deriv_fac[a].reshape((-1,) + (1,) * len(self.batch_shape))
            parts.append(self.coeffs[src] * fac)
        return Jet(self.dim, self.order - 1, np.stack(parts, axis=-1))


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Product of two jets with identical batch shapes (Leibniz-exact)."""
    k = min(a.order, b.order)
    a, b = a.truncate(k), b.truncate(k)
    tb = table(a.dim, k)
    prods = a.coeffs[tb.mul_i] * b.coeffs[tb.mul_j]
    dtype = np.result_type(a.coeffs.dtype, b.coeffs.dtype)
    out = np.zeros_like(a.coeffs, dtype=dtype)
    np.add.at(out, tb.mul_k, prods)
    return Jet(a.dim, k, out)


def jet_einsum(spec: str, a: Jet, b: Jet) -> Jet:
    """einsum over tensor axes combined with jet-convolution.

    ``spec`` addresses only the batch/tensor axes, e.g. ``'pij,pjk->pik'``;
    the coefficient axis is handled internally.
    """
    k = min(a.order, b.order)
    a, b = a.truncate(k), b.truncate(k)
    tb = table(a.dim, k)
    lhs, rhs = spec.split("->")
    s1, s2 = lhs.split(",")
    stacked = f"Y{s1},Y{s2}->Y{rhs}"
    prods = np.einsum(stacked, a.coeffs[tb.mul_i], b.coeffs[tb.mul_j])
    out_shape = (tb.ncoeff,) + prods.shape[1:]
    dtype = np.result_type(a.coeffs.dtype, b.coeffs.dtype)
    out = np.zeros(out_shape, dtype=dtype)
    np.add.at(out, tb.mul_k, prods)
    return Jet(a.dim, k, out)


def jet_linear(spec: str, mat: np.ndarray, a: Jet) -> Jet:
    """Contract a constant array against a jet, coefficient-wise."""
    lhs, rhs = spec.split("->")
    s1, s2 = lhs.split(",")
    out = np.einsum(f"{s1},Z{s2}->Z{rhs}", mat, a.coeffs)
    return Jet(a.dim, a.order, out)


def jet_map(spec: str, a: Jet) -> Jet:
    """Pure index reshuffle/trace of the tensor axes (linear, exact)."""
    lhs, rhs = spec.split("->")
    out = np.einsum(f"Z{lhs}->Z{rhs}", a.coeffs)
    return Jet(a.dim, a.order, out)


def jet_stack(jets: list[Jet], axis: int = 1) -> Jet:
    """Stack jets along a new batch axis (axis counted with the coeff axis)."""
    k = min(j.order for j in jets)
    arrs = [j.truncate(k).coeffs for j in jets]
    return Jet(jets[0].dim, k, np.stack(arrs, axis=axis))


# -- univariate composition ----------------------------------------------


def _compose(a: Jet, outer: np.ndarray) -> Jet:
    """Evaluate sum_k outer[k] * (a - a.value)^k in jet arithmetic.

    ``outer`` has shape (order+1, *batch) holding g^(k)(a0)/k!.  Exact to the
    truncation order because the inner increment has no constant term.
    """
    k = a.order
    w = a.copy()
    w.coeffs = w.coeffs.astype(np.result_type(w.coeffs.dtype, outer.dtype), copy=True)
    w.coeffs[0] = 0.0
    acc = Jet.const(0.0, a.dim, k, a.batch_shape) + outer[k]
    for j in range(k - 1, -1, -1):
        acc = jet_mul(acc, w)
        acc.coeffs[0] = acc.coeffs[0] + outer[j]
    return acc


def _outer_table(a: Jet, derivs) -> np.ndarray:
    """Stack g^(k)(a0)/k! for k = 0..order."""
    rows = [np.asarray(derivs[k]) / math.factorial(k) for k in range(a.order + 1)]
    return np.stack([np.broadcast_to(r, a.batch_shape).copy() for r in rows])


def exp(a: Jet) -> Jet:
    e = np.exp(a.value)
    return _compose(a, _outer_table(a, [e] * (a.order + 1)))


def log(a: Jet) -> Jet:
    v = a.value
    if np.any(np.real(v) <= 0):
        raise DomainError("log of non-positive jet value")
    derivs = [np.log(v)]
    for k in range(1, a.order + 1):
        derivs.append(((-1.0) ** (k + 1)) * math.factorial(k - 1) / v**k)
    return _compose(a, _outer_table(a, derivs))


def sqrt(a: Jet) -> Jet:
    v = a.value
    if np.any(np.real(v) <= 0):
        raise DomainError("sqrt of non-positive jet value")
    derivs, c = [np.sqrt(v)], 0.5
    for k in range(1, a.order + 1):
        derivs.append(c * v ** (0.5 - k))
        c *= 0.5 - k
    return _compose(a, _outer_table(a, derivs))


def sin(a: Jet) -> Jet:
    s, c = np.sin(a.value), np.cos(a.value)
    cycle = [s, c, -s, -c, s]
    return _compose(a, _outer_table(a, cycle[: a.order + 1]))


def cos(a: Jet) -> Jet:
    s, c = np.sin(a.value), np.cos(a.value)
    cycle = [c, -s, -c, s, c]
    return _compose(a, _outer_table(a, cycle[: a.order + 1]))


def reciprocal(a: Jet) -> Jet:
    v = a.value
    if np.any(np.abs(v) < 1e-300):
        raise SingularJetError("division by a jet with vanishing value")
    derivs = [1.0 / v]
    for k in range(1, a.order + 1):
        derivs.append(((-1.0) ** k) * math.factorial(k) / v ** (k + 1))
    return _compose(a, _outer_table(a, derivs))


def power(a: Jet, p) -> Jet:
    if isinstance(p, int) or (isinstance(p, float) and p.is_integer()):
        p = int(p)
        if p == 0:
            return Jet.const(1.0, a.dim, a.order, a.batch_shape)
        base = a if p > 0 else reciprocal(a)
        out = base
        for _ in range(abs(p) - 1):
            out = jet_mul(out, base)
        return out
    v = a.value
    if np.any(np.real(v) <= 0):
        raise DomainError("fractional power of non-positive jet value")
    derivs, c = [v**p], float(p)
    for k in range(1, a.order + 1):
        derivs.append(c * v ** (p - k))
        c *= p - k
    return _compose(a, _outer_table(a, derivs))


ARITH = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": jet_mul,
    "div": lambda x, y: x / y,
    "pow": power,
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "sqrt": sqrt,
}


def arith(op: str, *args):
    """Dispatch table over the supported jet operations."""
    if op not in ARITH:
        raise BadInputError(f"unknown jet operation {op!r}")
    return ARITH[op](*args)
