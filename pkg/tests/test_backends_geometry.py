import math

import numpy as np
import pytest

from kahlercheck import backends as bk
from kahlercheck.geometry import GeometryState, inverse_and_logdet
from kahlercheck.jets import Jet


def test_torus_quadrature_exact_for_trig():
    t = bk.Torus(2, 24)
    (batch,) = t.quad_nodes()
    f = np.sin(2 * math.pi * batch.pts[:, 0]) ** 2
    val = t.integrate_chart([f], t.quad_nodes())
    assert abs(val - 0.5) < 1e-13
    assert abs(t.integrate_chart([np.ones(batch.size)], t.quad_nodes()) - 1.0) < 1e-13


def test_fixture_unit_mass_and_determinism():
    for kind in ("FLAT2", "PERT2", "RIEM4", "KAH4", "FS"):
        fx = bk.make_fixture(kind)
        total = fx.integrate([np.ones(b.size) for b in fx.quad_nodes()])
        assert abs(total - 1.0) < 1e-10, kind
    a = bk.make_fixture({"kind": "RIEM4", "seed": 7})
    b = bk.make_fixture({"kind": "RIEM4", "seed": 7})
    (n,) = a.quad_nodes()
    ga = a.g(n, 1).coeffs
    gb = b.g(n, 1).coeffs
    assert np.array_equal(ga, gb)


def test_cp1_quadrature_total_area():
    cp = bk.CP1(24, 48)
    nodes = cp.quad_nodes()
    # integral of the round density 4/(1+r^2)^2 over both charts = 4*pi
    vals = []
    for b in nodes:
        r2 = np.sum(b.pts**2, axis=1)
        vals.append(4.0 / (1.0 + r2) ** 2)
    assert abs(cp.integrate_chart(vals, nodes) - 4 * math.pi) < 1e-12


def test_cp1_chart_transition_roundtrip_and_vector():
    rng = np.random.default_rng(2)
    pts = rng.uniform(0.4, 0.9, size=(6, 2))
    comp = rng.normal(size=(6, 2, 2))
    comp = comp + np.swapaxes(comp, 1, 2)
    new_pts, out = bk.chart_transition(comp, "sym2", pts)
    back_pts, back = bk.chart_transition(out, "sym2", new_pts)
    assert np.allclose(back_pts, pts, atol=1e-12)
    assert np.allclose(back, comp, atol=1e-11)
    # the first holomorphic generator at z=1 is -d/dw at w=1
    pts1 = np.array([[1.0, 0.0]])
    v = np.array([[1.0, 0.0]])
    _, v2 = bk.chart_transition(v, "vector", pts1)
    assert np.allclose(v2, [[-1.0, 0.0]], atol=1e-14)


def test_fs_metric_agrees_across_charts():
    fx = bk.make_fixture("FS")
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.5, 0.95, size=(8, 2))
    batch = bk.NodeBatch(0, pts)
    g0 = fx.g(batch, 0).value
    new_pts, g_push = bk.chart_transition(g0, "sym2", pts)
    g1 = fx.g(bk.NodeBatch(1, new_pts), 0).value
    assert np.max(np.abs(g_push - g1)) < 1e-11


def test_inverse_and_logdet_jets():
    rng = np.random.default_rng(4)
    pts = rng.uniform(0, 1, size=(5, 2))
    x, y = Jet.coordinates(pts, 2, 3)
    import kahlercheck.jets as jets

    a = 2.0 + jets.sin(x) * 0.3
    b = jets.cos(y) * 0.2
    c = 1.5 + jets.cos(x) * 0.1
    from kahlercheck.jets import jet_stack

    G = jet_stack([jet_stack([a, b], 2), jet_stack([b, c], 2)], 2)
    Ginv, logdet = inverse_and_logdet(G)
    prod = jets.jet_einsum("pij,pjk->pik", G, Ginv)
    eye = np.zeros_like(prod.coeffs)
    eye[0] = np.eye(2)
    assert np.max(np.abs(prod.coeffs - eye)) < 1e-13
    det_direct = a * c - b * b
    assert np.max(np.abs(jets.log(det_direct).coeffs - logdet.coeffs)) < 1e-12


def test_flat2_geometry_is_trivial():
    fx = bk.make_fixture("FLAT2")
    geom = GeometryState(fx)
    batch = fx.check_nodes(0, 20)[0]
    gamma = geom.gamma(batch, 1)
    assert np.max(np.abs(gamma.coeffs)) == 0.0
    R = geom.riemann(batch, 0)
    assert np.max(np.abs(R.coeffs)) == 0.0
    f = geom.f(batch, 2)
    assert np.max(np.abs(f.coeffs)) < 1e-15


def test_fs_is_unit_einstein_with_constant_weight():
    fx = bk.make_fixture("FS")
    geom = GeometryState(fx)
    for batch in fx.check_nodes(1, 60):
        ric = geom.ric(batch, 0)
        g = geom.g(batch, 0)
        assert np.max(np.abs(ric.value - g.value)) < 1e-10
        f = geom.f(batch, 1)
        assert np.max(np.abs(f.value - math.log(4 * math.pi))) < 1e-11
        assert np.max(np.abs(f.gradient().value)) < 1e-10


def test_gamma_symmetry_and_ricci_symmetry_riem4():
    fx = bk.make_fixture("RIEM4")
    geom = GeometryState(fx)
    batch = fx.check_nodes(2, 40)[0]
    gam = geom.gamma(batch, 0).value
    assert np.max(np.abs(gam - np.swapaxes(gam, 2, 3))) < 1e-13
    ric = geom.ric(batch, 0).value
    assert np.max(np.abs(ric - np.swapaxes(ric, 1, 2))) < 1e-11


def test_kah4_kahler_data():
    fx = bk.make_fixture("KAH4")
    geom = GeometryState(fx)
    batch = fx.check_nodes(3, 40)[0]
    J = geom.J(batch, 1).value
    g = geom.g(batch, 0).value
    # J^2 = -I and g(J.,J.) = g
    assert np.max(np.abs(np.einsum("pij,pjk->pik", J, J) + np.eye(4))) < 1e-14
    gJJ = np.einsum("pai,pab,pbj->pij", J, g, J)
    assert np.max(np.abs(gJJ - g)) < 1e-13
    # omega closed: d omega = 0 from jets
    om = geom.omega(batch, 1)
    dom = om.gradient().value  # (m, i, j, d)
    curl = dom + np.transpose(dom, (0, 3, 1, 2)) + np.transpose(dom, (0, 2, 3, 1))
    assert np.max(np.abs(curl)) < 1e-12


def test_holomorphic_basis_transition_consistency():
    fx = bk.make_fixture("FS")
    fields = bk.holomorphic_basis(fx.backend)
    rng = np.random.default_rng(5)
    pts = rng.uniform(0.5, 0.95, size=(5, 2))
    for f in fields:
        v0 = f(bk.NodeBatch(0, pts), 0).value
        new_pts, pushed = bk.chart_transition(v0, "vector", pts)
        v1 = f(bk.NodeBatch(1, new_pts), 0).value
        assert np.max(np.abs(pushed - v1)) < 1e-12


def test_transition_guards():
    import kahlercheck.errors as err

    with pytest.raises(err.NoOverlapError):
        bk.CP1.transition_jacobian(np.array([[0.01, 0.01]]))
    with pytest.raises(err.BadInputError):
        bk.chart_transition(np.zeros((1, 2)), "spinor", np.array([[1.0, 0.0]]))


def test_make_fixture_guards():
    import kahlercheck.errors as err

    with pytest.raises(err.BadInputError):
        bk.make_fixture({"kind": "KLEIN"})
    with pytest.raises(err.DegenerateMetricError):
        bk.make_fixture({"kind": "PERT2", "epsilon": 3.0})


def test_integrate_rejects_nan():
    import kahlercheck.errors as err

    t = bk.Torus(2, 8)
    (batch,) = t.quad_nodes()
    bad = np.full(batch.size, np.nan)
    with pytest.raises(err.NanInFieldError):
        t.integrate_chart([bad], t.quad_nodes())
