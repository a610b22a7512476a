import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kahlercheck import jets
from kahlercheck.errors import (
    BadAxisError,
    DomainError,
    SingularJetError,
    UnsupportedOrderError,
)
from kahlercheck.jets import Jet


def test_const_jet():
    j = Jet.const(1.0, 2, 2)
    assert j.value == 1.0
    assert j.partial((1, 0)) == 0.0
    assert j.partial((0, 2)) == 0.0
    z = Jet.const(0.0, 4, 4)
    assert np.all(z.coeffs == 0.0)
    p = Jet.const(math.pi, 2, 0)
    assert p.coeffs.shape == (1,)
    assert p.value == math.pi


def test_const_order_guard():
    with pytest.raises(UnsupportedOrderError):
        Jet.const(1.0, 2, 5)


def test_coordinate_jet():
    pts = np.array([[0.3, 0.7]])
    j = Jet.coordinate(0, pts, 2, 2)
    assert j.value[0] == 0.3
    assert j.partial((1, 0))[0] == 1.0
    assert j.partial((0, 1))[0] == 0.0
    k = Jet.coordinate(1, pts, 2, 1)
    assert k.value[0] == 0.7
    assert k.partial((0, 1))[0] == 1.0
    j0 = Jet.coordinate(0, pts, 2, 0)
    assert j0.coeffs.shape == (1, 1)
    with pytest.raises(BadAxisError):
        Jet.coordinate(2, pts, 2, 2)


def test_polynomial_derivative():
    pts = np.array([[3.0, 0.0]])
    x, _ = Jet.coordinates(pts, 2, 2)
    f = x * x
    assert abs(f.partial((1, 0))[0] - 6.0) < 1e-14
    assert abs(f.partial((2, 0))[0] - 2.0) < 1e-14


def test_sin_cos_product_matches_closed_form():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, size=(7, 2))
    x, y = Jet.coordinates(pts, 2, 4)
    f = jets.sin(2 * math.pi * x) * jets.cos(2 * math.pi * y)
    w = 2 * math.pi
    sx, cx = np.sin(w * pts[:, 0]), np.cos(w * pts[:, 0])
    sy, cy = np.sin(w * pts[:, 1]), np.cos(w * pts[:, 1])
    assert np.allclose(f.value, sx * cy, atol=1e-14)
    assert np.allclose(f.partial((1, 0)), w * cx * cy, atol=1e-12)
    assert np.allclose(f.partial((0, 1)), -w * sx * sy, atol=1e-12)
    assert np.allclose(f.partial((1, 1)), -w * w * cx * sy, atol=1e-11)
    assert np.allclose(f.partial((2, 2)), w**4 * sx * cy, atol=1e-9)
    assert np.allclose(f.partial((3, 1)), w**4 * cx * sy, atol=1e-9)


def test_exp_of_zero_jet():
    j = jets.exp(Jet.const(0.0, 2, 3))
    expected = Jet.const(1.0, 2, 3)
    assert np.allclose(j.coeffs, expected.coeffs, atol=1e-16)


def test_division_and_log_guards():
    pts = np.array([[0.25, 0.5]])
    x, _ = Jet.coordinates(pts, 2, 3)
    with pytest.raises(DomainError):
        jets.log(x - 1.0)
    with pytest.raises(DomainError):
        jets.sqrt(-1.0 * x)
    with pytest.raises(SingularJetError):
        _ = x / (x - 0.25)


def test_central_difference_convergence_order():
    # jet partials must match central differences of each primitive at O(h^2)
    rng = np.random.default_rng(1)
    p = rng.uniform(0.3, 0.8, size=(1, 2))

    def field(px, py):
        x = Jet.coordinate(0, np.array([[px, py]]), 2, 1)
        y = Jet.coordinate(1, np.array([[px, py]]), 2, 1)
        return jets.exp(jets.sin(2 * x) * jets.cos(y)) + jets.sqrt(x + 2.0) / (y + 1.5)

    base = field(p[0, 0], p[0, 1])
    exact = base.partial((1, 0))[0]
    errs = []
    hs = [1e-2, 5e-3, 2.5e-3]
    for h in hs:
        fd = (field(p[0, 0] + h, p[0, 1]).value[0] - field(p[0, 0] - h, p[0, 1]).value[0]) / (2 * h)
        errs.append(abs(fd - exact))
    order = np.log(errs[0] / errs[2]) / np.log(hs[0] / hs[2])
    assert order > 1.9


def _poly_mul(pa: dict, pb: dict) -> dict:
    out = {}
    for ka, va in pa.items():
        for kb, vb in pb.items():
            key = (ka[0] + kb[0], ka[1] + kb[1])
            out[key] = out.get(key, 0.0) + va * vb
    return out


def _poly_partial(p: dict, alpha: tuple) -> dict:
    out = p
    for axis, n in enumerate(alpha):
        for _ in range(n):
            nxt = {}
            for (i, j), c in out.items():
                e = (i, j)[axis]
                if e > 0:
                    key = (i - 1, j) if axis == 0 else (i, j - 1)
                    nxt[key] = nxt.get(key, 0.0) + c * e
            out = nxt
    return out


def _poly_eval(p: dict, x: float, y: float) -> float:
    return sum(c * x**i * y**j for (i, j), c in p.items())


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=6, max_size=6),
    st.lists(st.floats(-2, 2), min_size=6, max_size=6),
)
def test_product_exact_on_polynomials(ca, cb):
    # degree-2 polys in 2 vars; order-4 jet of their product must be exact
    px, py = 0.37, -0.22
    pts = np.array([[px, py]])
    x, y = Jet.coordinates(pts, 2, 4)

    def poly(c):
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y

    prod = poly(ca) * poly(cb)
    key = {(0, 0): 0, (1, 0): 1, (0, 1): 2, (2, 0): 3, (1, 1): 4, (0, 2): 5}
    pa = {k: ca[i] for k, i in key.items()}
    pb = {k: cb[i] for k, i in key.items()}
    truth = _poly_mul(pa, pb)
    scale = max(1.0, max(abs(v) for v in truth.values()))
    for alpha in [(0, 0), (1, 0), (0, 1), (2, 1), (2, 2), (4, 0), (1, 3)]:
        exact = _poly_eval(_poly_partial(truth, alpha), px, py)
        assert abs(prod.partial(alpha)[0] - exact) < 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 1.2), st.floats(0.1, 1.2))
def test_chain_rule_associativity(a, b):
    pts = np.array([[a, b]])
    x, y = Jet.coordinates(pts, 2, 4)
    inner = x * y + 0.5
    # f(g(h)) grouped two ways
    left = jets.log(jets.exp(jets.sqrt(inner)))
    right = jets.sqrt(inner)
    assert np.allclose(left.coeffs, right.coeffs, atol=1e-13)


def test_gradient_stacking():
    pts = np.array([[0.2, 0.4], [0.6, 0.1]])
    x, y = Jet.coordinates(pts, 2, 3)
    f = x * x * y
    g = f.gradient()
    assert g.batch_shape == (2, 2)
    assert np.allclose(g.value[:, 0], 2 * pts[:, 0] * pts[:, 1])
    assert np.allclose(g.value[:, 1], pts[:, 0] ** 2)


def test_jet_einsum_matmul():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, size=(5, 2))
    x, y = Jet.coordinates(pts, 2, 2)
    a11 = jets.sin(x)
    a12 = jets.cos(y)
    A = jets.jet_stack([jets.jet_stack([a11, a12], axis=2),
                        jets.jet_stack([a12, a11], axis=2)], axis=2)
    B = jets.jet_einsum("pij,pjk->pik", A, A)
    manual = a11 * a11 + a12 * a12
    assert np.allclose(B.coeffs[:, :, 0, 0], manual.coeffs, atol=1e-14)


def test_complex_coefficients():
    pts = np.array([[0.3, 0.9]])
    x, y = Jet.coordinates(pts, 2, 2)
    u = x * 1.0 + y * 1j
    sq = u * u
    assert np.allclose(sq.value, (0.3 + 0.9j) ** 2)
    assert np.allclose(sq.partial((1, 0)), 2 * (0.3 + 0.9j))


def test_integer_power_negative_base():
    pts = np.array([[-1.5, 0.0]])
    x, _ = Jet.coordinates(pts, 2, 3)
    f = x**3
    assert np.allclose(f.value, -3.375)
    assert np.allclose(f.partial((1, 0)), 3 * 2.25)
    g = x ** (-2)
    assert np.allclose(g.value, 1 / 2.25)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-1.0, 1.0))
def test_exp_log_inverse_property(a, b):
    pts = np.array([[a, b]])
    x, y = Jet.coordinates(pts, 2, 4)
    f = x * x + jets.cos(y) + 1.5
    back = jets.exp(jets.log(f))
    assert np.allclose(back.coeffs, f.coeffs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_leibniz_property(a, b):
    pts = np.array([[a, b]])
    x, y = Jet.coordinates(pts, 2, 3)
    f = jets.sin(x) + y * y
    g = jets.cos(y) * x
    prod = f * g
    lhs = prod.derivative(0)
    rhs = f.derivative(0) * g.truncate(2) + f.truncate(2) * g.derivative(0)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-13)


def test_arith_dispatch():
    pts = np.array([[0.4, 0.2]])
    x, y = Jet.coordinates(pts, 2, 2)
    out = jets.arith("mul", jets.arith("sin", x), jets.arith("exp", y))
    ref = jets.sin(x) * jets.exp(y)
    assert np.allclose(out.coeffs, ref.coeffs)
    from kahlercheck.errors import BadInputError
    with pytest.raises(BadInputError):
        jets.arith("frobnicate", x)
