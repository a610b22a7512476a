"""Registry of residual-gated checks with stable public identifiers.

Three suites: the pointwise/integral identity suite (ID-*), the variation
catalog (V-*), and the shrinker/obstruction suite (S-*).  Each check returns
a CheckResult whose pass flag is exactly residual_sup <= tolerance; skipped
results always carry a reason.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import backends as bk
from . import catalog as vcat
from . import fields as fl
from . import kahler as kh
from . import soliton as so
from . import tensorcalc as tc
from .backends import Field, NodeBatch
from .catalog import RunOptions
from .conventions import manifest_hash
from .errors import KahlercheckError
from .geometry import GeometryState
from .jets import Jet, jet_einsum, jet_map
from .variation import HamiltonianFlowCurve, LinearCurve, fd_derivative

ALL_FIXTURES = ("FLAT2", "PERT2", "RIEM4", "KAH4", "FS")
KAHLER_FIXTURES = ("FLAT2", "PERT2", "KAH4", "FS")


@dataclass
class CheckResult:
    check_id: str
    fixture: str
    seed: int
    residual_sup: float
    residual_l2: float
    tolerance: float
    convergence_order: float | None
    status: str
    reason: str
    runtime_ms: float
    manifest_hash: str
    details: dict = dc_field(default_factory=dict)

    def to_record(self) -> dict:
        rec = {
            "check_id": self.check_id,
            "fixture": self.fixture,
            "seed": self.seed,
            "residual_sup": _num(self.residual_sup),
            "residual_l2": _num(self.residual_l2),
            "tolerance": self.tolerance,
            "convergence_order": _num(self.convergence_order),
            "status": self.status,
            "reason": self.reason,
            "manifest_hash": self.manifest_hash,
            "details": {k: _num(v) for k, v in sorted(self.details.items())},
            "runtime_ms": round(self.runtime_ms, 3),
        }
        return rec


def _num(x):
    if x is None:
        return None
    if isinstance(x, (int, float, np.floating)):
        return float(x)
    return x


@dataclass(frozen=True)
class CheckDef:
    id: str
    suite: str
    formula: str
    tag: str
    fixtures: tuple
    tolerance: float
    runner: object
    flat_tolerance: float | None = None
    notes: str = ""

    def tol_for(self, fixture_name: str, scale: float = 1.0) -> float:
        base = self.tolerance
        if self.flat_tolerance is not None and fixture_name == "FLAT2":
            base = self.flat_tolerance
        return base * scale


class Outcome:
    """Raw runner output before tolerance gating."""

    def __init__(self, sup, l2=None, order=None, status="computed", reason="",
                 details=None):
        self.sup = float(sup)
        self.l2 = float(l2 if l2 is not None else sup)
        self.order = order
        self.status = status
        self.reason = reason
        self.details = details or {}


def _sup(x):
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def _l2(geom, per_batch_values, nodes):
    sq = [np.abs(np.asarray(v)) ** 2 for v in per_batch_values]
    return float(np.sqrt(max(geom.integrate(sq, nodes), 0.0)))


def _pointwise(geom, seed, opts, residual_fn, norm="raw"):
    """Aggregate a pointwise jet residual over the check node batches."""
    sups, flat = [], []
    for batch in geom.fixture.check_nodes(seed, opts.node_count):
        r = residual_fn(batch)
        vals = r.value if isinstance(r, Jet) else np.asarray(r)
        sups.append(_sup(vals))
        flat.append(np.abs(vals).ravel())
    allv = np.concatenate(flat)
    return Outcome(max(sups), float(np.sqrt(np.mean(allv**2))))


# ---------------------------------------------------------------------------
# identity suite runners


def run_fixture_invariants(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    details = {}
    sups = []
    nodes = fixture.quad_nodes()
    total = fixture.integrate([np.ones(b.size) for b in nodes], nodes)
    details["unit_mass"] = abs(total - 1.0)
    sups.append(details["unit_mass"])
    for batch in fixture.check_nodes(seed, opts.node_count):
        g = geom.g(batch, 0).value
        ev = np.linalg.eigvalsh(g)
        details["min_metric_eig"] = float(np.min(ev))
        if geom.is_kahler:
            J = geom.J(batch, 1)
            jj = np.einsum("pij,pjk->pik", J.value, J.value) + np.eye(fixture.dim)
            details["J_square"] = _sup(jj)
            comp = np.einsum("pai,pab,pbj->pij", J.value, g, J.value) - g
            details["J_compatibility"] = _sup(comp)
            N = kh.nijenhuis(geom, batch, J)
            details["integrability"] = _sup(N.value)
            om = geom.omega(batch, 1)
            dom = jet_map("pijd->pdij", om.gradient()).value
            curl = dom + np.transpose(dom, (0, 3, 1, 2)) + np.transpose(dom, (0, 2, 3, 1))
            details["symplectic_closed"] = _sup(curl)
            cdJ = tc.cd_endo(geom, batch, J)
            details["parallel_J"] = _sup(cdJ.value)
            sups += [details["J_square"], details["J_compatibility"],
                     details["integrability"], details["symplectic_closed"],
                     details["parallel_J"]]
    return Outcome(max(sups), details=details)


def run_quadrature(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    details = {}
    details["unit_mass"] = abs(fixture.integrate([np.ones(b.size) for b in nodes], nodes) - 1.0)
    u = fl.seeded_scalar(geom, seed, mean_zero=True)
    mean = fixture.integrate([u(b, 0).value for b in nodes], nodes)
    details["projected_mean"] = abs(mean)
    sups = [details["unit_mass"], details["projected_mean"]]
    if fixture.name == "FLAT2":
        import math

        (batch,) = nodes
        s = np.sin(2 * math.pi * batch.pts[:, 0])
        details["odd_mode"] = abs(fixture.integrate([s], nodes))
        dirichlet = fixture.integrate([4 * math.pi**2 * np.cos(2 * math.pi * batch.pts[:, 0]) ** 2], nodes)
        details["dirichlet_closed_form"] = abs(dirichlet - 2 * math.pi**2)
        sups += [details["odd_mode"], details["dirichlet_closed_form"]]
    return Outcome(max(sups), details=details)


def run_metric_compat(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    return _pointwise(geom, seed, opts,
                      lambda b: tc.cd_sym2(geom, b, geom.g(b, 1)))


def run_div_lap(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    u = fl.seeded_scalar(geom, seed)

    def res(b):
        uj = u(b, 3)
        X = tc.grad_scalar(geom, b, uj)
        return tc.div_omega_vector(geom, b, X) + tc.laplacian_scalar(geom, b, uj.truncate(3))

    return _pointwise(geom, seed, opts, res)


def run_div_integral(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    xi = fl.seeded_vector(geom, seed)
    vals = [tc.div_omega_vector(geom, b, xi(b, 1)).value for b in nodes]
    total = geom.integrate(vals, nodes)
    return Outcome(abs(total))


def _identity_inputs(geom, seed, opts, batch):
    u = fl.seeded_scalar(geom, seed + 1)(batch, 2)
    xi = fl.seeded_vector(geom, seed + 2)(batch, 2)
    A = fl.seeded_sym_endo(geom, seed + 3)(batch, 2)
    return u, xi, A


def run_div_ua(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)

    def res(b):
        u, xi, A = _identity_inputs(geom, seed, opts, b)
        uA = jet_einsum("p,pij->pij", u, A)
        lhs = tc.adjoint_endo(geom, b, uA)
        gradu = tc.grad_scalar(geom, b, u)
        rhs = jet_einsum("pij,pj->pi", A.truncate(gradu.order), gradu) * (-1.0) + \
            jet_einsum("p,pi->pi", u.truncate(1), tc.adjoint_endo(geom, b, A))
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_div_uxi(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)

    def res(b):
        u, xi, A = _identity_inputs(geom, seed, opts, b)
        uxi = jet_einsum("p,pi->pi", u, xi)
        lhs = tc.div_omega_vector(geom, b, uxi)
        rhs = jet_einsum("pi,pi->p", u.gradient().truncate(1), xi.truncate(1)) + \
            jet_einsum("p,p->p", u.truncate(1), tc.div_omega_vector(geom, b, xi))
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_div_a2(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)

    def res(b):
        _, _, A = _identity_inputs(geom, seed, opts, b)
        lhs = tc.adjoint_endo(geom, b, tc.endo_mul(A, A))
        cdA = tc.cd_endo(geom, b, A)
        W = jet_einsum("paij,pjm->paim", cdA, A.truncate(cdA.order))
        tr = jet_einsum("pam,paim->pi", geom.ginv(b, cdA.order), W)
        rhs = tr * (-1.0) + jet_einsum("pij,pj->pi", A.truncate(1),
                                       tc.adjoint_endo(geom, b, A))
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_div_ev(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)

    def res(b):
        _, xi, A = _identity_inputs(geom, seed, opts, b)
        Axi = jet_einsum("pij,pj->pi", A, xi)
        lhs = tc.div_omega_vector(geom, b, Axi)
        adjA = tc.adjoint_endo(geom, b, A)
        cdxi = tc.cd_vector(geom, b, xi)
        g = geom.g(b, 1)
        gA = tc.flat_endo(geom, b, A.truncate(1))
        pairing = jet_einsum("pai,pai->p",
                             jet_einsum("pja,pji->pai", geom.ginv(b, 1), gA),
                             cdxi.truncate(1))
        rhs = tc.pair_vectors(geom, b, adjA, xi.truncate(1)) * (-1.0) + pairing
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_div_tr(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)

    def res(b):
        _, _, A = _identity_inputs(geom, seed, opts, b)
        cdA = tc.cd_endo(geom, b, A)
        W = jet_einsum("paij,pjm->paim", cdA, A.truncate(cdA.order))
        TrW = jet_einsum("pam,paim->pi", geom.ginv(b, cdA.order), W)
        lhs = tc.div_omega_vector(geom, b, TrW)
        hat = jet_map("pjia->piaj", cdA)
        adjB = tc.adjoint_slots2(geom, b, hat)
        rhs = tc.pair_endos(geom, b, adjB, A.truncate(adjB.order)) * (-1.0) + \
            tc.pair_slots2(geom, b, hat.truncate(1), jet_map("paij->piaj", cdA.truncate(1)))
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_m_identity(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    v = fl.seeded_sym2(geom, seed + 11)

    def res(b):
        vj = v(b, 2)
        M = tc.m_form(geom, b, vj, vj)
        vstar = tc.sharp_sym2(geom, b, vj)
        adj_vs = tc.adjoint_endo(geom, b, vstar)
        adj_vs2 = tc.adjoint_endo(geom, b, tc.endo_mul(vstar, vstar))
        normsq = tc.pair_2tensors(geom, b, vj, vj)
        rhs = jet_einsum("pi,pij->pj", adj_vs, vj.truncate(adj_vs.order)) * 2.0 \
            - tc.flat_vector(geom, b, adj_vs2) * 2.0 \
            + normsq.gradient().truncate(1) * 0.5
        return M - rhs

    return _pointwise(geom, seed, opts, res)


def run_frame_independence(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    u = fl.seeded_sym2(geom, seed + 13)
    v = fl.seeded_sym2(geom, seed + 17)
    rng = np.random.default_rng(seed + 19)

    def res(b):
        uj, vj = u(b, 1), v(b, 1)
        M = tc.m_form(geom, b, uj, vj)
        frame = tc.cholesky_frame(geom.g(b, 0).value, rng)
        Mf = tc.m_form_frame_values(geom, b, uj, vj, frame)
        return M.value - Mf

    return _pointwise(geom, seed, opts, res)


def run_adj_sym2_duality(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    u = fl.seeded_sym2(geom, seed + 23)
    al = fl.seeded_oneform(geom, seed + 29)
    lhs, rhs = [], []
    for b in nodes:
        uj, aj = u(b, 1), al(b, 1)
        lhs.append(tc.pair_oneforms(geom, b, tc.adjoint_sym2(geom, b, uj),
                                    aj.truncate(0)).value)
        cda = tc.cd_oneform(geom, b, aj)
        rhs.append(jet_einsum("pij,pij->p", tc.raise2(geom, b, uj.truncate(0)), cda).value)
    return Outcome(abs(geom.integrate(lhs, nodes) - geom.integrate(rhs, nodes)))


def run_adj_endo_duality(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    A = fl.seeded_sym_endo(geom, seed + 31)
    X = fl.seeded_vector(geom, seed + 37)
    lhs, rhs = [], []
    for b in nodes:
        Aj, Xj = A(b, 1), X(b, 1)
        lhs.append(tc.pair_vectors(geom, b, tc.adjoint_endo(geom, b, Aj),
                                   Xj.truncate(0)).value)
        cdX = tc.cd_vector(geom, b, Xj)
        rhs.append(np.einsum("pij,pia,pab,pbj->p", geom.g(b, 0).value, Aj.value,
                             geom.ginv(b, 0).value, cdX.value))
    return Outcome(abs(geom.integrate(lhs, nodes) - geom.integrate(rhs, nodes)))


def run_lap_symmetry(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    u = fl.seeded_scalar(geom, seed + 41)
    v = fl.seeded_scalar(geom, seed + 43)
    uv, vu = [], []
    for b in nodes:
        uj, vj = u(b, 2), v(b, 2)
        uv.append((tc.laplacian_scalar(geom, b, uj) * vj.truncate(0)).value)
        vu.append((tc.laplacian_scalar(geom, b, vj) * uj.truncate(0)).value)
    return Outcome(abs(geom.integrate(uv, nodes) - geom.integrate(vu, nodes)))


def run_lap_positivity(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    u = fl.seeded_scalar(geom, seed + 47)
    uu, du2 = [], []
    for b in nodes:
        uj = u(b, 2)
        uu.append((tc.laplacian_scalar(geom, b, uj) * uj.truncate(0)).value)
        duj = uj.gradient().truncate(0)
        du2.append(tc.pair_oneforms(geom, b, duj, duj).value)
    gap = geom.integrate(uu, nodes) - geom.integrate(du2, nodes)
    dirichlet = geom.integrate(du2, nodes)
    return Outcome(abs(gap), details={"dirichlet_energy": dirichlet,
                                      "nonnegative": bool(dirichlet > 0)})


def run_sharp(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    v = fl.seeded_sym2(geom, seed + 53)
    xi = fl.seeded_vector(geom, seed + 59)
    eta = fl.seeded_vector(geom, seed + 61)

    def res(b):
        vj = v(b, 0)
        vs = tc.sharp_sym2(geom, b, vj)
        lhs = jet_einsum("pi,pi->p", tc.flat_vector(geom, b, jet_einsum("pij,pj->pi", vs, xi(b, 0))), eta(b, 0))
        rhs = jet_einsum("pi,pi->p", jet_einsum("pij,pj->pi", vj, xi(b, 0)), eta(b, 0))
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_contraction_algebra(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    rng = np.random.default_rng(seed + 67)

    def res(b):
        m, n = b.size, fixture.dim

        def cj(arr):
            j = Jet.const(0.0, fixture.dim, 1, arr.shape)
            j.coeffs[0] = arr
            return j

        sym = rng.normal(size=(m, n, n))
        sym = sym + np.swapaxes(sym, 1, 2)
        anti = rng.normal(size=(m, n, n))
        anti = anti - np.swapaxes(anti, 1, 2)
        eye = np.broadcast_to(np.eye(n), (m, n, n)).copy()
        r1 = tc.contraction(cj(eye), cj(sym)).value
        r2 = tc.contraction(cj(eye), cj(anti)).value - anti
        alpha = cj(rng.normal(size=(m, n, n)))
        b1 = cj(rng.normal(size=(m, n)))
        r3 = tc.generalized_contraction(alpha, b1, 1, 1).value - \
            tc.contraction(alpha, b1).value
        beta2 = cj(rng.normal(size=(m, n, n, n)))
        g2 = tc.generalized_contraction(alpha, beta2, 1, 2).value
        r4 = g2 + np.swapaxes(g2, 2, 3)
        return np.concatenate([r.ravel() for r in (r1, r2, r3, r4)])

    return _pointwise(geom, seed, opts, res)


def run_chart_transition(fixture, seed, opts) -> Outcome:
    rng = np.random.default_rng(seed + 71)
    pts = rng.uniform(0.5, 0.95, size=(40, 2))
    comp = rng.normal(size=(40, 2, 2))
    comp = comp + np.swapaxes(comp, 1, 2)
    new_pts, out = bk.chart_transition(comp, "sym2", pts)
    back_pts, back = bk.chart_transition(out, "sym2", new_pts)
    r1 = _sup(back - comp) + _sup(back_pts - pts)
    g0 = fixture.g(NodeBatch(0, pts), 0).value
    _, g_push = bk.chart_transition(g0, "sym2", pts)
    g1 = fixture.g(NodeBatch(1, new_pts), 0).value
    r2 = _sup(g_push - g1)
    return Outcome(max(r1, r2), details={"roundtrip": r1, "metric_overlap": r2})


# -- Kahler-only identity runners


def run_bidegree(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    A = fl.seeded_antilinear(geom, seed + 73)
    details = {}

    def res(b):
        Aj = A(b, 2)
        n10, n01 = kh.bidegree_split_endo(geom, b, Aj)
        cdA = tc.cd_endo(geom, b, Aj)
        rec = (n10 + n01) - cdA
        J = geom.J(b, n01.order)
        rot = jet_einsum("pba,pbij->paij", J, n01)
        post = jet_einsum("pik,pakj->paij", J, n01) * (-1.0)
        lin = rot - post
        return np.concatenate([rec.value.ravel(), lin.value.ravel()])

    out = _pointwise(geom, seed, opts, res)
    if fixture.backend.kind == "CP1":
        basis = bk.holomorphic_basis(fixture.backend)
        hol = 0.0
        for b in fixture.check_nodes(seed, opts.node_count):
            for xi in basis:
                hol = max(hol, _sup(kh.dbar_vector(geom, b, xi(b, 2)).value))
        out.details["holomorphic_kernel"] = hol
        out.sup = max(out.sup, hol)
    return out


def run_dbar_squared(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    xi = fl.seeded_vector(geom, seed + 79)

    def res(b):
        e = kh.dbar_vector(geom, b, xi(b, 3))
        return kh.dbar_endo(geom, b, e)

    return _pointwise(geom, seed, opts, res)


def run_adj_dbar_duality(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    A = fl.seeded_antilinear(geom, seed + 83)
    X = fl.seeded_vector(geom, seed + 89)
    lhs, rhs = [], []
    for b in nodes:
        Aj, Xj = A(b, 1), X(b, 1)
        db = kh.dbar_vector(geom, b, Xj)
        lhs.append(tc.pair_endos(geom, b, db, Aj.truncate(db.order)).value)
        rhs.append(tc.pair_vectors(geom, b, Xj.truncate(0),
                                   tc.adjoint_endo(geom, b, Aj)).value)
    return Outcome(abs(geom.integrate(lhs, nodes) - geom.integrate(rhs, nodes)))


def run_dbar_three_route(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    A = fl.seeded_antilinear(geom, seed + 97)

    def res(b):
        Aj = A(b, 2)
        r1 = tc.adjoint_endo(geom, b, Aj)
        free = geom.unweighted()
        r2 = tc.adjoint_endo(free, b, Aj) + \
            jet_einsum("pij,pj->pi", Aj.truncate(1), geom.gradf(b, 1))
        from . import jets as jmath

        f = geom.f(b, 2)
        ef = jmath.exp(f)
        emf = jmath.exp(f * (-1.0))
        scaled = jet_einsum("p,pij->pij", emf, Aj)
        r3 = jet_einsum("p,pi->pi", ef.truncate(1), tc.adjoint_endo(free, b, scaled))
        return np.concatenate([(r1 - r2).value.ravel(), (r1 - r3).value.ravel()])

    return _pointwise(geom, seed, opts, res)


def run_hw_relation(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    A = fl.seeded_antilinear(geom, seed + 101)
    return _pointwise(geom, seed, opts,
                      lambda b: kh.hodge_witten_relation_residual(geom, b, A(b, 2)))


def run_hw_self_adjoint(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    A = fl.seeded_antilinear(geom, seed + 103)
    B = fl.seeded_antilinear(geom, seed + 107)
    ab, ba, aa = [], [], []
    for b in nodes:
        Aj, Bj = A(b, 2), B(b, 2)
        LA = kh.hodge_witten(geom, b, Aj, 1)
        LB = kh.hodge_witten(geom, b, Bj, 1)
        ab.append(tc.pair_endos(geom, b, LA, Bj.truncate(0)).value)
        ba.append(tc.pair_endos(geom, b, LB, Aj.truncate(0)).value)
        aa.append(tc.pair_endos(geom, b, LA, Aj.truncate(0)).value)
    gap = abs(geom.integrate(ab, nodes) - geom.integrate(ba, nodes))
    quad = geom.integrate(aa, nodes)
    return Outcome(max(gap, max(0.0, -quad)),
                   details={"energy": quad, "symmetry_gap": gap})


def run_b_two_route(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    u = fl.seeded_scalar(geom, seed + 109)

    def res(b):
        uj = u(b, 2)
        return kh.b_operator(geom, b, uj) - kh.b_operator_divergence_route(geom, b, uj)

    return _pointwise(geom, seed, opts, res)


def run_b_skew(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    nodes = fixture.quad_nodes()
    u = fl.seeded_scalar(geom, seed + 113)
    v = fl.seeded_scalar(geom, seed + 127)
    t1, t2 = [], []
    for b in nodes:
        uj, vj = u(b, 1), v(b, 1)
        t1.append((kh.b_operator(geom, b, uj) * vj.truncate(0)).value)
        t2.append((kh.b_operator(geom, b, vj) * uj.truncate(0)).value)
    return Outcome(abs(geom.integrate(t1, nodes) + geom.integrate(t2, nodes)))


def run_b_chain(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    A = fl.seeded_antilinear(geom, seed + 131)

    def res(b):
        Aj = A(b, 2)
        norm2 = tc.pair_endos(geom, b, Aj, Aj)
        lhs = kh.b_operator(geom, b, norm2)
        cdA = tc.cd_endo(geom, b, Aj)
        J = geom.J(b, cdA.order)
        Jgf = jet_einsum("pij,pj->pi", J, geom.gradf(b, cdA.order))
        hook = jet_einsum("pa,paij->pij", Jgf, cdA)
        rhs = tc.pair_endos(geom, b, hook, Aj.truncate(hook.order)) * 2.0
        return lhs - rhs

    return _pointwise(geom, seed, opts, res)


def run_mc_equivalence(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    mu = fl.seeded_antilinear(geom, seed + 137)

    def res(b):
        _, _, equiv = kh.maurer_cartan_residuals(geom, b, mu(b, 2))
        return equiv

    return _pointwise(geom, seed, opts, res)


def run_mc_explicit(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    mu = fl.seeded_antilinear(geom, seed + 139)
    return _pointwise(geom, seed, opts,
                      lambda b: kh.mc_explicit_residual(geom, b, mu(b, 2)))


def run_lie_bracket(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    details = {}
    sups = []
    X = fl.seeded_vector(geom, seed + 149)
    Y = fl.seeded_vector(geom, seed + 151)
    for b in fixture.check_nodes(seed, opts.node_count):
        J = geom.J(b, 2)
        a = (X(b, 2) + jet_einsum("pij,pj->pi", J, X(b, 2)) * (-1j)) * 0.5
        c = (Y(b, 2) + jet_einsum("pij,pj->pi", J, Y(b, 2)) * (-1j)) * 0.5
        br = kh.lie_bracket_forms(geom, b, a, c, 0, 0)
        cda = tc.cd_vector(geom, b, a)
        cdc = tc.cd_vector(geom, b, c)
        k = cda.order
        rhs = jet_einsum("pc,pci->pi", a.truncate(k), cdc) - \
            jet_einsum("pc,pci->pi", c.truncate(k), cda)
        sups.append(_sup((br - rhs).value))
        sups.append(_sup((br + kh.lie_bracket_forms(geom, b, c, a, 0, 0)).value))
    details["degree0"] = max(sups)
    if fixture.dim == 4:
        mu1 = fl.seeded_antilinear(geom, seed + 157)
        mu2 = fl.seeded_antilinear(geom, seed + 163)
        for b in fixture.check_nodes(seed, opts.node_count):
            alpha = kh.cayley_half(geom, b, mu1(b, 3))
            beta = kh.cayley_half(geom, b, mu2(b, 3))
            br = kh.lie_bracket_forms(geom, b, alpha, beta, 1, 1)
            pa = kh.partial_omega_01form(geom, b, alpha)
            pb = kh.partial_omega_01form(geom, b, beta)
            rhs = tc.generalized_contraction(alpha.truncate(pb.order), pb, 1, 2) + \
                tc.generalized_contraction(beta.truncate(pa.order), pa, 1, 2)
            sups.append(_sup((br - rhs).value))
            br2 = kh.lie_bracket_forms(geom, b, beta, alpha, 1, 1)
            sups.append(_sup((br - br2).value))
        details["degree1"] = max(sups[-2:])
    return Outcome(max(sups), details=details)

# ---------------------------------------------------------------------------
# shrinker / obstruction suite runners


def _pdata(fixture) -> tuple[GeometryState, so.PerelmanData]:
    geom = GeometryState(fixture)
    return geom, so.PerelmanData(geom)


def run_perelman(fixture, seed, opts) -> Outcome:
    geom, pdata = _pdata(fixture)
    nodes = fixture.quad_nodes()
    details = {
        "mean_F": abs(geom.integrate([pdata.F(b, 0).value for b in nodes], nodes)),
        "mean_H_bar": abs(geom.integrate([pdata.H_bar(b, 0).value for b in nodes], nodes)),
    }
    sups = [details["mean_F"], details["mean_H_bar"]]
    if fixture.name == "FLAT2":
        for b in fixture.check_nodes(seed, opts.node_count):
            details["flat_h_plus_g"] = _sup((pdata.h(b, 0) + geom.g(b, 0)).value)
            details["flat_H_plus_one"] = _sup(so.H_scalar(geom, b, 0).value + 1.0)
            sups += [details["flat_h_plus_g"], details["flat_H_plus_one"]]
    return Outcome(max(sups), details=details)


def run_soliton_residuals(fixture, seed, opts) -> Outcome:
    geom, pdata = _pdata(fixture)
    details = {"h": 0.0, "H_bar": 0.0, "F": 0.0, "chern_ricci": 0.0, "J_from_form": 0.0}
    for b in fixture.check_nodes(seed, opts.node_count):
        details["h"] = max(details["h"], _sup(pdata.h(b, 0).value))
        details["H_bar"] = max(details["H_bar"], _sup(pdata.H_bar(b, 0).value))
        details["F"] = max(details["F"], _sup(pdata.F(b, 0).value))
        cr = so.chern_ricci(geom, b, 0)
        om = geom.omega(b, 0)
        details["chern_ricci"] = max(details["chern_ricci"], _sup(cr.value - om.value))
        Jrec = np.einsum("pij,pjk->pik", np.linalg.inv(om.value), geom.g(b, 0).value)
        details["J_from_form"] = max(details["J_from_form"],
                                     _sup(Jrec - geom.J(b, 0).value))
    return Outcome(max(details.values()), details=details)


def run_characterization(fixture, seed, opts) -> Outcome:
    geom, pdata = _pdata(fixture)
    sups = []
    for b in fixture.check_nodes(seed, opts.node_count):
        sups.append(_sup(so.soliton_characterization_residual(geom, pdata, b)))
    details = {"at_base": max(sups)}
    # along the gauge orbit the identity persists
    ham = fl.seeded_scalar(geom, seed + 3, mean_zero=True, amp=0.5)
    curve = HamiltonianFlowCurve(fixture, ham)
    gt = GeometryState(curve.fixture_at(0.05))
    pt = so.PerelmanData(gt)
    orbit = max(_sup(so.soliton_characterization_residual(gt, pt, b))
                for b in fixture.check_nodes(seed, 60))
    details["on_orbit"] = orbit
    # negative control: scaling the density leaves the compatible family
    def rho_bad(batch, order):
        base = fixture.omega_density(batch, order)
        x = Jet.coordinates(batch.pts, 2, order)[0]
        from . import jets as jmath

        bump = jmath.sin(x * 3.0) * 0.2 + 1.0
        raw = jet_einsum("p,p->p", base, bump)
        return raw

    bad = bk.Fixture("FS-offfamily", fixture.backend, fixture.g,
                     Field(rho_bad), fixture.J, fixture.tags, fixture.descriptor)
    gb = GeometryState(bad)
    pb = so.PerelmanData(gb)
    neg = max(_sup(so.soliton_characterization_residual(gb, pb, b))
              for b in fixture.check_nodes(seed, 40))
    details["negative_control"] = neg
    out = Outcome(max(details["at_base"], orbit), details=details)
    if neg < 1e-3:
        out.status = "computed"
        out.sup = max(out.sup, 1.0)
        out.reason = "negative control failed to move the residual"
    return out


def run_lambda_basis(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    basis = so.lambda_basis(geom)
    ev = np.linalg.eigvalsh(basis.gram)
    nodes = fixture.quad_nodes()
    means = max(abs(geom.integrate([f(b, 0).value for b in nodes], nodes))
                for f in basis.functions)
    details = {
        "kernel_residual": basis.kernel_residual,
        "gram_rank": int(np.sum(ev > 1e-10 * ev[-1])),
        "gram_cond": basis.cond,
        "means": means,
    }
    sup = basis.kernel_residual if details["gram_rank"] == 3 else 1.0
    return Outcome(max(sup, means), details=details)


def run_p_kernel(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    basis = so.lambda_basis(geom)
    sup, imag = 0.0, 0.0
    for b in fixture.check_nodes(seed, opts.node_count):
        for f in basis.functions:
            w = f(b, 4)
            wr = Jet(w.dim, w.order, np.real(w.coeffs))
            out = kh.p_operator(geom, b, wr)
            sup = max(sup, _sup(out.value))
            imag = max(imag, _sup(np.imag(out.value)))
    # positivity off the kernel: <w, P w> equals the squared shifted-
    # Laplacian norm, strictly positive away from the kernel
    w_field = fl.seeded_scalar(geom, seed + 5, mean_zero=True)
    nodes = fixture.quad_nodes()
    quad = []
    for b in nodes:
        lam = kh.complex_laplacian(geom, b, w_field(b, 2)) - w_field(b, 0) * 2.0
        quad.append(np.abs(lam.value) ** 2)
    energy = geom.integrate(quad, nodes)
    return Outcome(sup, details={"imag_residue": imag, "offkernel_energy": energy,
                                 "positive": bool(energy > 0)})


def run_projector(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    basis = so.lambda_basis(geom)
    proj = so.KernelProjector(geom, basis)
    nodes = fixture.quad_nodes()
    details = {"rank": proj.rank}
    sups = [0.0 if proj.rank == 3 else 1.0]
    for k in range(20):
        w_field = fl.seeded_scalar(geom, seed + 7 * k, mean_zero=True)
        w = [w_field(b, 0).value for b in nodes]
        pi1, pi2 = proj.split(w)
        rec = max(_sup(a + c - d) for a, c, d in zip(pi1, pi2, w))
        _, pi2b = proj.split(pi2)
        idem = max(_sup(a - c) for a, c in zip(pi2, pi2b))
        cross = abs(geom.integrate([a * c for a, c in zip(pi1, pi2)], nodes))
        sups += [rec, idem, cross]
    u0 = [np.real(basis.functions[0](b, 0).value) for b in nodes]
    _, pi2u = proj.split(u0)
    fixed = max(_sup(a - c) for a, c in zip(pi2u, u0))
    sups.append(fixed)
    details["kernel_fixed"] = fixed
    return Outcome(max(sups), details=details)


def run_g_metric(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    basis = so.lambda_basis(geom)
    details = {}
    kernel = max(abs(so.g_metric(geom, basis, f, f)) for f in basis.functions)
    details["kernel_degeneracy"] = kernel
    phi = fl.seeded_complex_scalar(geom, seed + 11)
    psi = fl.seeded_complex_scalar(geom, seed + 13)
    a = so.g_metric(geom, basis, phi, psi)
    bsym = so.g_metric(geom, basis, psi, phi)
    details["symmetry"] = abs(a - bsym) / max(1.0, abs(a))
    pos = so.g_metric(geom, basis, phi, phi)
    details["sample_positivity"] = pos
    comb = Field(lambda bt, k: phi(bt, k) + psi(bt, k) * 2.0)
    lin = so.g_metric(geom, basis, comb, psi) - a - 2.0 * so.g_metric(geom, basis, psi, psi)
    details["linearity"] = abs(lin) / max(1.0, abs(a))
    sup = max(kernel, details["symmetry"], details["linearity"],
              0.0 if pos > 0 else 1.0)
    return Outcome(sup, details=details)


def run_tangent_cone(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    psi = fl.seeded_complex_scalar(geom, seed + 17)
    v_f, Vs_f = so.eta_direction_fields(geom, psi)
    r_D, r_T = so.tangent_cone_residuals(geom, v_f, Vs_f, seed=seed + 19)
    gf = Field(lambda b, k: geom.g(b, k), shape=(2, 2))
    neg, _ = so.tangent_cone_residuals(geom, gf, Vs_f, seed=seed + 23)
    out = Outcome(max(r_D, r_T), details={"anti_invariance_and_dbar": r_D,
                                          "density_closedness": r_T,
                                          "negative_control": neg})
    if neg < 1e-2:
        out.sup = max(out.sup, 1.0)
        out.reason = "negative control failed: an invariant tensor was accepted"
    return out


def run_bochner_chain(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    A = fl.seeded_antilinear(geom, seed + 29)
    route, lich = [], []
    for b in fixture.check_nodes(seed, opts.node_count):
        req, llich = so.bochner_chain_residuals(geom, b, A(b, 2))
        route.append(_sup(req.value))
        lich.append(_sup(llich.value))
    return Outcome(max(max(route), max(lich)),
                   details={"route_equivalence": max(route),
                            "lichnerowicz_agreement": max(lich)})


def run_stability(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    A = fl.seeded_antilinear(geom, seed + 31)
    hw_norm = 0.0
    sups = []
    for b in fixture.check_nodes(seed, opts.node_count):
        Aj = A(b, 2)
        sups.append(_sup(so.stability_identity_residual(geom, b, Aj).value))
        hw = kh.hodge_witten(geom, b, Aj, 1)
        hw_norm = max(hw_norm, _sup(hw.value))
    return Outcome(max(sups), details={"harmonicity_defect": hw_norm,
                                       "defect_coefficient": 2.0})


def run_phi(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    details = {}
    if fixture.backend.kind == "CP1":
        basis = so.lambda_basis(geom)
        vals, bridges = [], []
        for k in range(10):
            A = fl.seeded_antilinear(geom, seed + 3 * k)
            for u in basis.functions:
                val = so.phi_functional(geom, A, u)
                vals.append(abs(val))
                bridges.append(abs(val - so.phi_functional_bridge(geom, A, u)))
        details["max_value"] = max(vals)
        details["two_route_gap"] = max(bridges)
        mech = 0.0
        for b in fixture.check_nodes(seed, 60):
            mech = max(mech, _sup(geom.gradf(b, 0).value))
        details["pointwise_mechanism"] = mech
        return Outcome(max(details["max_value"], details["two_route_gap"], mech),
                       details=details)
    # plumbing mode: real-linearity on a curved weighted fixture
    A = fl.seeded_antilinear(geom, seed + 37)
    u = fl.seeded_complex_scalar(geom, seed + 41)
    w = fl.seeded_complex_scalar(geom, seed + 43)
    comb = Field(lambda bt, k: u(bt, k) * 2.0 + w(bt, k) * (-3.0))
    lin = so.phi_functional(geom, A, comb) - 2.0 * so.phi_functional(geom, A, u) \
        + 3.0 * so.phi_functional(geom, A, w)
    scale = max(1.0, abs(so.phi_functional(geom, A, u)))
    details["linearity"] = abs(lin) / scale
    return Outcome(details["linearity"], details=details)


def run_integral_identity(fixture, seed, opts) -> Outcome:
    geom, pdata = _pdata(fixture)
    A = fl.seeded_antilinear(geom, seed + 47)
    lhs, rhs, defect = so.integral_identity_sides(geom, pdata, A)
    details = {"cone_integral": abs(lhs), "drift_side": abs(rhs),
               "harmonicity_defect": defect}
    if fixture.backend.kind == "CP1":
        return Outcome(max(abs(lhs), abs(lhs - rhs)), details=details)
    # plumbing: defect-dominated, report the conditional bound
    bound = 10.0 * defect * max(1.0, abs(lhs) + abs(rhs))
    details["conditional_bound"] = bound
    status = "computed"
    out = Outcome(0.0 if abs(lhs - rhs) <= bound else abs(lhs - rhs),
                  details=details, status=status)
    out.reason = "conditional: the argument is not harmonic on this fixture"
    return out


def run_weighted_bochner(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    basis = so.lambda_basis(geom)
    sups_kernel, sups = [], []
    for b in fixture.check_nodes(seed, 40):
        for f in basis.functions:
            r = so.weighted_complex_bochner_residual(geom, b, f(b, 4))
            sups_kernel.append(_sup(r.value))
    for k in range(10):
        psi = fl.seeded_complex_scalar(geom, seed + 5 * k)
        for b in fixture.check_nodes(seed + k, 40):
            r = so.weighted_complex_bochner_residual(geom, b, psi(b, 4))
            sups.append(_sup(r.value))
    return Outcome(max(max(sups), max(sups_kernel)),
                   details={"kernel_arguments": max(sups_kernel),
                            "seeded_arguments": max(sups)})


def run_dh_map(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    basis = so.lambda_basis(geom)
    details = {}
    sups, orders = [], []

    def one(psi_field, label):
        v_f, Vs_f = so.eta_direction_fields(geom, psi_field)
        curve = LinearCurve(fixture, v_f, Vs_f)
        at = vcat._geom_cache(curve)
        pdatas = {}

        def hbar_map(t, batch):
            key = round(t, 14)
            if key not in pdatas:
                pdatas[key] = so.PerelmanData(at(t))
            return pdatas[key].H_bar(batch, 0)

        local = []
        for batch in fixture.check_nodes(seed, 50):
            der, info = fd_derivative(lambda t: hbar_map(t, batch), 0.0, order=1,
                                      scheme="central-4", base_step=opts.base_step,
                                      richardson_levels=1, t_max=curve.t_max)
            psi = psi_field(batch, 4)
            wr = Jet(psi.dim, psi.order, np.real(psi.coeffs))
            P = kh.p_operator(geom, batch, wr)
            rhs = np.real(P.value) * 0.25
            local.append(_sup(der.value - rhs))
            orders.append(info.observed_order)
        details[label] = max(local)
        return max(local)

    s1 = one(basis.functions[1], "kernel_argument")
    psi = fl.seeded_complex_scalar(geom, seed + 53)
    s2 = one(psi, "seeded_argument")
    return Outcome(max(s1, s2), order=vcat._first_order(orders), details=details)


def run_gauge(fixture, seed, opts) -> Outcome:
    geom = GeometryState(fixture)
    ham = fl.seeded_scalar(geom, seed + 59, mean_zero=True,
                           amp=0.5 if fixture.backend.kind == "CP1" else 0.15)
    curve = HamiltonianFlowCurve(fixture, ham)
    details = {}
    sups = []
    if "fano_soliton" in fixture.tags:
        for t in (0.05, -0.05, 0.1):
            gt = GeometryState(curve.fixture_at(t))
            pt = so.PerelmanData(gt)
            r = max(_sup(pt.H_bar(b, 0).value) for b in fixture.check_nodes(seed, 60))
            sups.append(r)
        details["H_bar_along_orbit"] = max(sups)
        sym = 0.0
        for t in (0.05, 0.1):
            gt = GeometryState(curve.fixture_at(t))
            for b in fixture.check_nodes(seed, 40):
                om_t = gt.omega(b, 0).value
                om_0 = geom.omega(b, 0).value
                sym = max(sym, _sup(om_t - om_0))
        details["symplectic_residual"] = sym
        sups.append(sym)
        return Outcome(max(sups), details=details)
    # equivariance on a curved weighted torus: transported quantities commute
    pdata = so.PerelmanData(geom)
    H_mean = pdata.H_mean

    def hbar_field(batch, order):
        return so.H_scalar(geom, batch, order) - H_mean

    t = 0.08
    gt = GeometryState(curve.fixture_at(t))
    pt = so.PerelmanData(gt)
    for b in fixture.check_nodes(seed, 60):
        lhs = pt.H_bar(b, 0).value
        rhs = curve.pullback_scalar_values(Field(hbar_field), b, t)
        sups.append(_sup(lhs - rhs))
    details["H_bar_equivariance"] = max(sups)
    # the defect tensor transports as a 2-tensor
    for b in fixture.check_nodes(seed, 40):
        pos = curve.flow_jets(b, t, 1)
        import kahlercheck.variation as va

        h0Y = va.compose_field(Field(lambda bb, kk: so.h_tensor(geom, bb, kk)),
                               b.chart, [p.truncate(0) for p in pos], 0)
        dpsi = curve._jacobian(pos).value
        transported = np.einsum("pia,pij,pjb->pab", dpsi, h0Y.value, dpsi)
        ht = so.h_tensor(gt, b, 0).value
        sups.append(_sup(transported - ht))
    details["h_equivariance"] = max(sups)
    return Outcome(max(sups), details=details)

# ---------------------------------------------------------------------------
# registry


def _variation_runner(entry_id):
    entry = vcat.CATALOG[entry_id]

    def runner(fixture, seed, opts) -> Outcome:
        out = entry.runner(fixture, seed, opts)
        status = "computed" if out.status == "computed" else "skipped"
        return Outcome(out.residual_sup, out.residual_l2, out.conv_order,
                       status=status, reason=out.reason, details=out.details)

    return runner


def _mk(id_, suite, formula, tag, fixtures, tol, runner, flat=None, notes=""):
    return CheckDef(id_, suite, formula, tag, fixtures, tol, runner,
                    flat_tolerance=flat, notes=notes)


REGISTRY: dict = {}


def _register(defs):
    for d in defs:
        REGISTRY[d.id] = d


_register([
    _mk("ID-FIXTURE", "identity", "fixture invariants: unit mass, SPD, J algebra, "
        "integrability, closedness, parallel J", "fixture-plumbing",
        ALL_FIXTURES, 1e-8, run_fixture_invariants, flat=1e-12),
    _mk("ID-QUAD", "identity", "quadrature exactness and normalization",
        "Glb-Rm-m", ALL_FIXTURES, 1e-8, run_quadrature, flat=1e-12),
    _mk("ID-COMPAT", "identity", "cd(g) = 0", "levi-civita",
        ALL_FIXTURES, 1e-8, run_metric_compat, flat=1e-13),
    _mk("ID-DIVLAP", "identity", "div_w(grad u) = -lap_w(u)", "divlap",
        ALL_FIXTURES, 1e-8, run_div_lap, flat=1e-12),
    _mk("ID-DIVINT", "identity", "integral of div_w(xi) vanishes", "no-boundary",
        ALL_FIXTURES, 1e-8, run_div_integral, flat=1e-12),
    _mk("ID-DIV-UA", "identity", "adj(u A) = -A grad u + u adj(A)", "div-scalar-endo",
        ALL_FIXTURES, 1e-8, run_div_ua, flat=1e-12),
    _mk("ID-DIV-UXI", "identity", "div_w(u xi) = <grad u, xi> + u div_w(xi)",
        "div-scalar-vf", ALL_FIXTURES, 1e-8, run_div_uxi, flat=1e-12),
    _mk("ID-DIV-A2", "identity", "adj(A^2) = -Tr_g(cd A . A) + A adj(A)",
        "div-square", ALL_FIXTURES, 1e-8, run_div_a2, flat=1e-12),
    _mk("ID-DIV-EV", "identity", "div_w(A xi) = -<adj A, xi> + <A, cd xi>",
        "div-Ev", ALL_FIXTURES, 1e-8, run_div_ev, flat=1e-12),
    _mk("ID-DIV-TR", "identity", "div_w Tr_g(cd A . A) = -<adj(hat cd A), A> + "
        "<hat cd A, cd A>", "div-Tr", ALL_FIXTURES, 1e-8, run_div_tr, flat=1e-12),
    _mk("ID-MG", "identity", "M(v,v) = 2 v adj(v*) - 2 g adj(v*^2) + d|v|^2 / 2",
        "m-form", ALL_FIXTURES, 1e-8, run_m_identity, flat=1e-12),
    _mk("ID-FRAME", "identity", "frame independence of the frame-summed 1-form",
        "frame-sums", ALL_FIXTURES, 1e-8, run_frame_independence, flat=1e-12),
    _mk("ID-ADJ-SYM2", "identity", "duality of adj on symmetric 2-tensors",
        "weighted-adjoint", ALL_FIXTURES, 1e-9, run_adj_sym2_duality, flat=1e-12),
    _mk("ID-ADJ-ENDO", "identity", "duality of adj on endomorphisms",
        "weighted-adjoint", ALL_FIXTURES, 1e-9, run_adj_endo_duality, flat=1e-12),
    _mk("ID-LAP-SYM", "identity", "symmetry of lap_w", "weighted-laplacian",
        ALL_FIXTURES, 1e-9, run_lap_symmetry, flat=1e-12),
    _mk("ID-LAP-POS", "identity", "Dirichlet identity and positivity of lap_w",
        "weighted-laplacian", ALL_FIXTURES, 1e-9, run_lap_positivity, flat=1e-12),
    _mk("ID-SHARP", "identity", "g(v* x, y) = v(x, y)", "sharp",
        ALL_FIXTURES, 1e-11, run_sharp, flat=1e-12),
    _mk("ID-CONTR", "identity", "contraction algebra: fixed points and linearity",
        "alt-contraction", ALL_FIXTURES, 1e-12, run_contraction_algebra),
    _mk("ID-CHART", "identity", "chart transition round trip and overlap agreement",
        "stereographic", ("FS",), 1e-10, run_chart_transition),
    # complex-structure layer
    _mk("ID-BIDEG", "identity", "bidegree split reconstructs cd and is typed",
        "bidegree", KAHLER_FIXTURES, 1e-9, run_bidegree, flat=1e-12),
    _mk("ID-DBARSQ", "identity", "del-bar squared vanishes on vector fields",
        "dbar-complex", KAHLER_FIXTURES, 1e-9, run_dbar_squared, flat=1e-12),
    _mk("ID-ADJ-DBAR", "identity", "duality of del-bar against the weighted adjoint",
        "dbar-adjoint", KAHLER_FIXTURES, 1e-9, run_adj_dbar_duality, flat=1e-12),
    _mk("ID-DBAR3", "identity", "three routes to the del-bar adjoint agree",
        "dbar-three-route", KAHLER_FIXTURES, 1e-10, run_dbar_three_route, flat=1e-12),
    _mk("ID-HW-REL", "identity", "weighted vs unweighted Hodge-Witten relation",
        "Om-AntHol-Hdg-Lap", KAHLER_FIXTURES, 1e-9, run_hw_relation, flat=1e-12),
    _mk("ID-HW-SELFADJ", "identity", "self-adjointness and energy positivity",
        "L2omOm-prod", KAHLER_FIXTURES, 1e-9, run_hw_self_adjoint, flat=1e-12),
    _mk("ID-B2ROUTE", "identity", "drift operator two routes", "B-drift",
        KAHLER_FIXTURES, 1e-10, run_b_two_route, flat=1e-12),
    _mk("ID-BSKEW", "identity", "drift operator is skew", "B-drift",
        KAHLER_FIXTURES, 1e-9, run_b_skew, flat=1e-12),
    _mk("ID-BCHAIN", "identity", "drift of |A|^2 is twice the hooked pairing",
        "B-drift", KAHLER_FIXTURES, 1e-9, run_b_chain, flat=1e-12),
    _mk("ID-MC-EQUIV", "identity", "real and complex deformation residues agree",
        "super-realMCARTAN", KAHLER_FIXTURES, 1e-9, run_mc_equivalence, flat=1e-12),
    _mk("ID-MC-EXPL", "identity", "explicit form of the real deformation residue",
        "super-realMCARTAN", KAHLER_FIXTURES, 1e-9, run_mc_explicit, flat=1e-12),
    _mk("ID-LIE-EXT", "identity", "exterior bracket through the frame calculus",
        "exterior-lie", KAHLER_FIXTURES, 1e-9, run_lie_bracket, flat=1e-11),
])

_register([
    _mk(e.id, "variation", e.formula, e.tag, e.fixtures, e.tol,
        _variation_runner(e.id), notes=e.notes)
    for e in vcat.CATALOG.values()
])

_register([
    _mk("S-PERELMAN", "soliton", "normalizations of the weight and potential",
        "fundamental-objects", ALL_FIXTURES, 1e-10, run_perelman, flat=1e-12),
    _mk("S-SOLITON", "soliton", "shrinker residuals and the form identities",
        "soliton-point", ("FS",), 1e-9, run_soliton_residuals),
    _mk("S-CHAR", "soliton", "2 Hbar = -(lap_c - 2) F on the compatible family",
        "soliton-characterization", ("FS",), 1e-9, run_characterization),
    _mk("S-LAMBDA", "soliton", "holomorphic fields span the eigenvalue-2 kernel",
        "kernel-basis", ("FS",), 1e-8, run_lambda_basis),
    _mk("S-PKER", "soliton", "the fourth-order square annihilates the real kernel",
        "P-kernel", ("FS",), 1e-7, run_p_kernel),
    _mk("S-PI2", "soliton", "kernel projection: completeness, idempotency, "
        "orthogonality", "dec-P-op", ("FS",), 1e-9, run_projector),
    _mk("S-GMET", "soliton", "induced bilinear form: kernel degeneracy, symmetry, "
        "positivity", "G-metric", ("FS",), 1e-8, run_g_metric),
    _mk("S-TCONE", "soliton", "membership residuals of potential-built directions",
        "TConeS", ("FS",), 1e-8, run_tangent_cone),
    _mk("S-BOCHNER", "soliton", "curvature chain routes and the Lichnerowicz form",
        "dec-Lich2", KAHLER_FIXTURES, 1e-8, run_bochner_chain, flat=1e-10),
    _mk("S-STAB", "soliton", "defect-corrected stability identity",
        "stab-harm", KAHLER_FIXTURES, 1e-8, run_stability, flat=1e-10),
    _mk("S-GAUGE", "soliton", "gauge invariance along symplectomorphism orbits",
        "gauge-orbit", ("FS", "PERT2"), 1e-7, run_gauge),
    _mk("S-PHI", "obstruction", "the obstruction functional vanishes with the "
        "two-route bridge", "obstruction-functional", ("FS", "KAH4"), 1e-8,
        run_phi),
    _mk("S-INT", "obstruction", "the cone integral against the drift terms",
        "integral-identity", ("FS", "KAH4"), 1e-9, run_integral_identity),
    _mk("S-WBOCH", "obstruction", "weighted complex Bochner step at the shrinker",
        "div-sec-var-met", ("FS",), 1e-7, run_weighted_bochner),
    _mk("S-DH", "obstruction", "derivative of normalized H along potential "
        "directions equals a quarter of the fourth-order square", "DH-quarter-P",
        ("FS",), 1e-5, run_dh_map),
])


SUITES = ("identity", "variation", "soliton", "obstruction")


def checks_for(suites=None, fixtures=None):
    suites = set(suites or SUITES)
    out = []
    for cid in sorted(REGISTRY):
        d = REGISTRY[cid]
        if d.suite not in suites:
            continue
        for fx in d.fixtures:
            if fixtures and fx not in fixtures:
                continue
            out.append((cid, fx))
    return out


def run_check(check_id: str, fixture_name: str, seed: int,
              opts: RunOptions | None = None) -> CheckResult:
    opts = opts or RunOptions()
    d = REGISTRY[check_id]
    fixture = bk.make_fixture(fixture_name)
    tol = d.tol_for(fixture_name, opts.tolerance_scale)
    t0 = time.perf_counter()
    try:
        out = d.runner(fixture, seed, opts)
    except KahlercheckError as exc:
        ms = (time.perf_counter() - t0) * 1e3
        return CheckResult(check_id, fixture_name, seed, float("nan"), float("nan"),
                           tol, None, "fail", f"{exc.slug}: {exc}", ms,
                           manifest_hash())
    ms = (time.perf_counter() - t0) * 1e3
    if out.status == "skipped":
        status = "skipped-with-reason"
        reason = out.reason or "skipped"
    else:
        ok = out.sup <= tol and bool(out.details.get("order_ok", True))
        status = "pass" if ok else "fail"
        reason = out.reason if not ok else ""
        if not ok and not reason and not out.details.get("order_ok", True):
            reason = "stencil convergence order off nominal"
    return CheckResult(check_id, fixture_name, seed, out.sup, out.l2, tol,
                       out.order, status, reason, ms, manifest_hash(),
                       dict(out.details))


def divergence_identities_check(fixture_name: str, seed: int = 0,
                                opts: RunOptions | None = None) -> list[CheckResult]:
    """The five weighted divergence identities as gated results."""
    ids = ("ID-DIV-UA", "ID-DIV-UXI", "ID-DIV-A2", "ID-DIV-EV", "ID-DIV-TR")
    return [run_check(cid, fixture_name, seed, opts) for cid in ids]


def run_variation_check(catalog_id: str, fixture_name: str, seed: int = 0,
                        opts: RunOptions | None = None) -> CheckResult:
    """Run a single catalog entry by its public identifier."""
    if catalog_id not in vcat.CATALOG:
        from .errors import NotFoundError

        raise NotFoundError(f"unknown catalog id {catalog_id!r}")
    return run_check(catalog_id, fixture_name, seed, opts)
