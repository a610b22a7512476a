"""Shrinker-side quantities and checks: the weighted defect tensor h, the
scalar potential H and its normalization, the eigenvalue-2 kernel spanned by
holomorphic fields, the induced metric and projections on it, Bochner-type
chains, the stability identity and the obstruction functional.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends as bk
from . import kahler as kh
from . import tensorcalc as tc
from .backends import Field, NodeBatch
from .conventions import MANIFEST
from .errors import BadInputError, DegenerateBasisError, UnsupportedGeometryError
from .geometry import GeometryState
from .jets import Jet, jet_einsum, jet_map

LICH_CR = float(MANIFEST["lichnerowicz_cR"])


# ---------------------------------------------------------------------------
# Perelman-type quantities


def h_tensor(geom: GeometryState, batch: NodeBatch, order: int) -> Jet:
    """Weighted Ricci defect h = Ric(g) + Hess f - g."""
    return geom.ric(batch, order) + geom.hessf(batch, order) - geom.g(batch, order)


def H_scalar(geom, batch, order: int) -> Jet:
    """2H = -lap_w f + tr_g h + 2 f."""
    f = geom.f(batch, order + 2)
    lap = tc.laplacian_scalar(geom, batch, f)
    tr = jet_einsum("pij,pij->p", geom.ginv(batch, order), h_tensor(geom, batch, order))
    return (lap * (-1.0) + tr + geom.f(batch, order) * 2.0) * 0.5


class PerelmanData:
    """H mean and pointwise evaluators for f, F, h, H, normalized H."""

    def __init__(self, geom: GeometryState):
        self.geom = geom
        nodes = geom.fixture.quad_nodes()
        self.f_mean = geom.integrate([geom.f(b, 0).value for b in nodes], nodes)
        self.H_mean = geom.integrate([H_scalar(geom, b, 0).value for b in nodes], nodes)

    def F(self, batch, order: int) -> Jet:
        return self.geom.f(batch, order) - self.f_mean

    def H_bar(self, batch, order: int) -> Jet:
        return H_scalar(self.geom, batch, order) - self.H_mean

    def h(self, batch, order: int) -> Jet:
        return h_tensor(self.geom, batch, order)


def chern_ricci(geom, batch, order: int) -> Jet:
    """-(d d^c) log rho in the chart; equals the curvature form of the density."""
    logrho = None
    from . import jets as J

    logrho = J.log(geom.rho(batch, order + 2))
    return ddc_scalar(geom, batch, logrho) * (-1.0)


def ddc_scalar(geom, batch, u: Jet) -> Jet:
    """d d^c u with d^c u = -(1/2) du o J; an exact 2-form (m, i, j)."""
    du = u.gradient()
    J = geom.J(batch, du.order)
    beta = jet_einsum("pk,pkj->pj", du, J) * (-0.5)
    dbeta = jet_map("pjd->pdj", beta.gradient())
    return dbeta - jet_map("pij->pji", dbeta)


def d_oneform(alpha: Jet) -> Jet:
    da = jet_map("pjd->pdj", alpha.gradient())
    return da - jet_map("pij->pji", da)


# ---------------------------------------------------------------------------
# the eigenvalue-2 kernel from holomorphic fields


@dataclass
class LambdaBasis:
    functions: list          # complex scalar Fields u_i
    gram: np.ndarray         # hermitian L2 Gram matrix
    cond: float
    kernel_residual: float


def divergence_kernel_function(geom, xi_field: Field) -> Field:
    """u = conj(-div_w(xi^{1,0})) with xi^{1,0} = (xi - i J xi)/2."""

    def fn(batch, order):
        xi = xi_field(batch, min(order + 1, 4))
        J = geom.J(batch, xi.order)
        Jxi = jet_einsum("pij,pj->pi", J, xi)
        div = tc.div_omega_vector(geom, batch, xi)
        divJ = tc.div_omega_vector(geom, batch, Jxi)
        return div * (-0.5) + divJ * (-0.5j)

    return Field(fn, name="kernel-function-div-route")


def _closed_form_kernel_functions(backend) -> list[Field]:
    """Degree-1 ambient harmonics X + iY, Z, -X + iY; these are what the
    divergence construction produces on the round fixture (cross-checked)."""

    def make(combine):
        def fn(batch, order):
            xs = Jet.coordinates(batch.pts, 2, order)
            X, Y, Z = bk.ambient_coordinates(batch.chart, xs)
            return combine(X, Y, Z)

        return Field(fn, name="kernel-function")

    return [
        make(lambda X, Y, Z: X + Y * 1j),
        make(lambda X, Y, Z: Z + Y * 0.0),
        make(lambda X, Y, Z: X * (-1.0) + Y * 1j),
    ]


def lambda_basis(geom: GeometryState) -> LambdaBasis:
    if geom.fixture.backend.kind != "CP1":
        raise UnsupportedGeometryError("the holomorphic-field kernel needs the Fano fixture")
    gens = bk.holomorphic_basis(geom.fixture.backend)
    funcs = _closed_form_kernel_functions(geom.fixture.backend)
    # the closed forms must reproduce the divergence route pointwise
    for xi_field, f in zip(gens, funcs):
        div_route = divergence_kernel_function(geom, xi_field)
        for b in geom.fixture.check_nodes(0, 40):
            gap = div_route(b, 0).value - f(b, 0).value
            if np.max(np.abs(gap)) > 1e-10:
                raise DegenerateBasisError(
                    "closed-form kernel functions disagree with the divergence route"
                )
    nodes = geom.fixture.quad_nodes()
    vals = [[f(b, 0).value for b in nodes] for f in funcs]
    gram = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            gram[i, j] = geom.integrate(
                [vi * np.conj(vj) for vi, vj in zip(vals[i], vals[j])], nodes
            )
    ev = np.linalg.eigvalsh(gram)
    cond = float(ev[-1] / max(ev[0], 1e-300))
    res = 0.0
    for f in funcs:
        for b in geom.fixture.check_nodes(0, 80):
            lam = kh.complex_laplacian(geom, b, f(b, 2)) - f(b, 0) * 2.0
            res = max(res, float(np.max(np.abs(lam.value))))
    return LambdaBasis(functions=funcs, gram=gram, cond=cond, kernel_residual=res)


# ---------------------------------------------------------------------------
# the induced bilinear form and the kernel projection


def g_metric(geom, basis_or_none, phi: Field, psi: Field, enforce_mean_zero: bool = True) -> float:
    """Re integral (P phi) conj(psi) + (1/2) integral Im(P phi) Im(P psi),
    P the shifted complex Laplacian."""
    nodes = geom.fixture.quad_nodes()

    def P(f, b):
        return (kh.complex_laplacian(geom, b, f(b, 2)) - f(b, 0) * 2.0).value

    if enforce_mean_zero:
        for f in (phi, psi):
            m = geom.integrate([f(b, 0).value for b in nodes], nodes)
            if abs(m) > 1e-8:
                raise BadInputError("arguments must have vanishing mean")
    term1 = geom.integrate(
        [np.real(P(phi, b) * np.conj(psi(b, 0).value)) for b in nodes], nodes
    )
    term2 = 0.5 * geom.integrate(
        [np.imag(P(phi, b)) * np.imag(P(psi, b)) for b in nodes], nodes
    )
    return term1 + term2


class KernelProjector:
    """L2 projection onto the real span of the kernel functions."""

    def __init__(self, geom: GeometryState, basis: LambdaBasis):
        self.geom = geom
        nodes = geom.fixture.quad_nodes()
        self.nodes = nodes
        fam = []
        for f in basis.functions:
            vals = [f(b, 0).value for b in nodes]
            fam.append([np.real(v) for v in vals])
            fam.append([np.imag(v) for v in vals])
        n = len(fam)
        G = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                G[i, j] = geom.integrate(
                    [a * c for a, c in zip(fam[i], fam[j])], nodes
                )
        w, Q = np.linalg.eigh(G)
        if w[-1] <= 0:
            raise DegenerateBasisError("kernel family has no mass")
        keep = w > 1e-12 * w[-1]
        if w[-1] / max(np.min(w[keep]), 1e-300) > 1e8:
            raise DegenerateBasisError("kernel Gram matrix is ill-conditioned")
        self.rank = int(np.sum(keep))
        coef = Q[:, keep] / np.sqrt(w[keep])
        self.ortho = []
        for r in range(self.rank):
            self.ortho.append(
                [sum(coef[i, r] * fam[i][bi] for i in range(n)) for bi in range(len(nodes))]
            )

    def split(self, w_vals: list) -> tuple[list, list]:
        """Return (pi1 w, pi2 w) as value arrays over the quadrature batches."""
        mean = self.geom.integrate(w_vals, self.nodes)
        if abs(mean) > 1e-8 * max(1.0, max(np.max(np.abs(v)) for v in w_vals)):
            raise BadInputError("projection input must have vanishing mean")
        pi2 = [np.zeros_like(v) for v in w_vals]
        for q in self.ortho:
            c = self.geom.integrate([a * b for a, b in zip(w_vals, q)], self.nodes)
            pi2 = [p + c * b for p, b in zip(pi2, q)]
        pi1 = [a - b for a, b in zip(w_vals, pi2)]
        return pi1, pi2


# ---------------------------------------------------------------------------
# Lichnerowicz operator and Bochner-type chains


def lichnerowicz_sym2(geom, batch, v: Jet) -> Jet:
    return tc.rough_laplacian_sym2(geom, batch, v) + \
        tc.curvature_action_sym2(geom, batch, v) * LICH_CR


def lichnerowicz_endo(geom, batch, A: Jet) -> Jet:
    v = tc.flat_endo(geom, batch, A)
    Lv = lichnerowicz_sym2(geom, batch, v)
    return tc.sharp_sym2(geom, batch, Lv)


def bochner_routes(geom, batch, A: Jet):
    """The two curvature-chain right-hand sides for anti-linear A.

    route1: 2 lap_{-J} A + [Ric*, A] + grad f hook cd A
    route2: 2 lap_{w,-J} A + [Ric*, A] - 2 A del grad f - (J grad f) hook J cd A
    """
    free = geom.unweighted()
    lap_free = kh.hodge_witten(free, batch, A, 1)
    lap_w = kh.hodge_witten(geom, batch, A, 1)
    ric = geom.ric_endo(batch, lap_w.order)
    brk = tc.commutator(ric, A.truncate(ric.order))
    cdA = tc.cd_endo(geom, batch, A)
    gradf = geom.gradf(batch, cdA.order)
    hook1 = jet_einsum("pa,paij->pij", gradf, cdA)
    route1 = lap_free * 2.0 + brk + hook1
    J = geom.J(batch, cdA.order)
    Jgf = jet_einsum("pij,pj->pi", J, gradf)
    hook2 = jet_einsum("pik,pkj->pij", J, jet_einsum("pa,paij->pij", Jgf, cdA))
    S = kh.partial10_gradf(geom, batch, lap_w.order)
    route2 = lap_w * 2.0 + brk - tc.endo_mul(A.truncate(S.order), S) * 2.0 - hook2
    return route1, route2


def bochner_chain_residuals(geom, batch, A: Jet):
    """(route equivalence, Lichnerowicz agreement) as endo-valued jets."""
    r1, r2 = bochner_routes(geom, batch, A)
    LA = lichnerowicz_endo(geom, batch, A)
    return r1 - r2, LA - r1


def stability_identity_residual(geom, batch, A: Jet) -> Jet:
    """Pointwise defect-corrected stability identity.

    <L_w A, A> + 2 <Hess f, A^2> - <(J grad f) hook cd A, J A>
    - 2 <lap_{w,-J} A, A> vanishes identically for anti-linear symmetric A.
    """
    LA = lichnerowicz_endo(geom, batch, A)
    lhs = tc.pair_endos(geom, batch, LA, A.truncate(LA.order))
    A2 = tc.endo_mul(A, A)
    hessA2 = tc.pair_2tensors(
        geom, batch, geom.hessf(batch, A2.order), tc.flat_endo(geom, batch, A2)
    )
    cdA = tc.cd_endo(geom, batch, A)
    J = geom.J(batch, cdA.order)
    Jgf = jet_einsum("pij,pj->pi", J, geom.gradf(batch, cdA.order))
    hook = jet_einsum("pa,paij->pij", Jgf, cdA)
    JA = tc.endo_mul(J, A.truncate(J.order))
    cross = tc.pair_endos(geom, batch, hook, JA.truncate(hook.order))
    HW = kh.hodge_witten(geom, batch, A, 1)
    defect = tc.pair_endos(geom, batch, HW, A.truncate(HW.order))
    k = min(lhs.order, hessA2.order, cross.order, defect.order)
    return lhs.truncate(k) + hessA2.truncate(k) * 2.0 - cross.truncate(k) \
        - defect.truncate(k) * 2.0


# ---------------------------------------------------------------------------
# the obstruction functional


def phi_functional(geom, A_field: Field, u_field: Field) -> float:
    """Integral of 2 Re(u) <Hess f, A^2> - <(J grad f) hook cd A, i conj(u) x_J A>."""
    nodes = geom.fixture.quad_nodes()
    vals = []
    for b in nodes:
        A = A_field(b, 1)
        _assert_antilinear(geom, b, A)
        u = u_field(b, 0).value
        u1, u2 = np.real(u), np.imag(u)
        A2 = tc.endo_mul(A, A)
        t1 = tc.pair_2tensors(
            geom, b, geom.hessf(b, A2.order), tc.flat_endo(geom, b, A2)
        ).value * (2.0 * u1)
        cdA = tc.cd_endo(geom, b, A)
        J = geom.J(b, cdA.order)
        Jgf = jet_einsum("pij,pj->pi", J, geom.gradf(b, cdA.order))
        hook = jet_einsum("pa,paij->pij", Jgf, cdA)
        JA = tc.endo_mul(J, A.truncate(J.order))
        # i conj(u) x_J A = u2 A + u1 J A under the frozen complex action
        xa = tc.pair_endos(geom, b, hook, A.truncate(hook.order)).value * u2
        xb = tc.pair_endos(geom, b, hook, JA.truncate(hook.order)).value * u1
        vals.append(t1 - xa - xb)
    return geom.integrate(vals, nodes)


def phi_functional_bridge(geom, A_field: Field, u_field: Field) -> float:
    """Second route: (1/2) integral u1 [4 <Hess f, A^2> - 2 <hook, JA>
    - (lap_w - 2)|A|^2]; equals the direct route for kernel arguments."""
    nodes = geom.fixture.quad_nodes()
    vals = []
    for b in nodes:
        A = A_field(b, 2)
        u1 = np.real(u_field(b, 0).value)
        A2 = tc.endo_mul(A, A)
        t1 = tc.pair_2tensors(
            geom, b, geom.hessf(b, min(A2.order, 2)), tc.flat_endo(geom, b, A2.truncate(2))
        ).value * 4.0
        cdA = tc.cd_endo(geom, b, A)
        J = geom.J(b, cdA.order)
        Jgf = jet_einsum("pij,pj->pi", J, geom.gradf(b, cdA.order))
        hook = jet_einsum("pa,paij->pij", Jgf, cdA)
        JA = tc.endo_mul(J, A.truncate(J.order))
        t2 = tc.pair_endos(geom, b, hook, JA.truncate(hook.order)).value * 2.0
        norm2 = tc.pair_endos(geom, b, A, A)
        lapN = tc.laplacian_scalar(geom, b, norm2) - norm2.truncate(norm2.order - 2) * 2.0
        vals.append(0.5 * u1 * (t1 - t2 - lapN.value))
    return geom.integrate(vals, nodes)


def integral_identity_sides(geom, pdata: PerelmanData, A_field: Field):
    """(lhs, rhs, harmonicity defect): integral |A|^2 F against the Hessian and
    drift terms, with the Hodge-Witten residual reported alongside."""
    nodes = geom.fixture.quad_nodes()
    lhs_vals, rhs_vals, defect = [], [], 0.0
    for b in nodes:
        A = A_field(b, 1)
        norm2 = tc.pair_endos(geom, b, A, A).value
        lhs_vals.append(norm2 * pdata.F(b, 0).value)
        A2 = tc.endo_mul(A, A)
        t1 = tc.pair_2tensors(
            geom, b, geom.hessf(b, A2.order), tc.flat_endo(geom, b, A2)
        ).value * 2.0
        cdA = tc.cd_endo(geom, b, A)
        J = geom.J(b, cdA.order)
        Jgf = jet_einsum("pij,pj->pi", J, geom.gradf(b, cdA.order))
        hook = jet_einsum("pa,paij->pij", Jgf, cdA)
        JA = tc.endo_mul(J, A.truncate(J.order))
        t2 = tc.pair_endos(geom, b, hook, JA.truncate(hook.order)).value
        rhs_vals.append(-(t1 - t2))
    # a sup estimate of the harmonicity defect on the sample nodes suffices
    for b in geom.fixture.check_nodes(1, 120):
        hw = kh.hodge_witten(geom, b, A_field(b, 2), 1)
        hwn = tc.pair_endos(geom, b, hw, hw).value
        defect = max(defect, float(np.sqrt(np.max(hwn))))
    return (
        geom.integrate(lhs_vals, nodes),
        geom.integrate(rhs_vals, nodes),
        defect,
    )


def _assert_antilinear(geom, batch, A: Jet, tol: float = 1e-8):
    J = geom.J(batch, 0).value
    a = A.value
    anti = np.einsum("pik,pkj->pij", a, J) + np.einsum("pik,pkj->pij", J, a)
    if np.max(np.abs(anti)) > tol * max(1.0, np.max(np.abs(a))):
        raise BadInputError("endomorphism argument must be J-anti-linear")


# ---------------------------------------------------------------------------
# the weighted complex Bochner step and the derivative of normalized H


def grad_J(geom, batch, psi: Jet) -> Jet:
    """The real vector grad(Re psi) + J grad(Im psi)."""
    u1 = Jet(psi.dim, psi.order, np.real(psi.coeffs))
    u2 = Jet(psi.dim, psi.order, np.imag(psi.coeffs))
    g1 = tc.grad_scalar(geom, batch, u1)
    g2 = tc.grad_scalar(geom, batch, u2)
    J = geom.J(batch, g1.order)
    return g1 + jet_einsum("pij,pj->pi", J, g2)


def weighted_complex_bochner_residual(geom, batch, psi: Jet) -> Jet:
    """adjoint(del-bar(grad_J conj(psi))) - (1/2) grad_J conj((lap_c - 2) psi)."""
    vec = grad_J(geom, batch, kh.conj_jet(psi))
    B = kh.dbar_vector(geom, batch, vec)
    lhs = tc.adjoint_endo(geom, batch, B)
    lam = kh.complex_laplacian(geom, batch, psi) - psi.truncate(psi.order - 2) * 2.0
    rhs = grad_J(geom, batch, kh.conj_jet(lam)) * 0.5
    return lhs - rhs.truncate(lhs.order)


def eta_direction_fields(geom, psi_field: Field):
    """The tangent pair (v, V*) built from a complex potential: the metric
    part -g(del-bar grad_J conj(psi)) and the density rate
    (1/2) Re[(lap_c - 2) psi].

    The overall orientation is fixed so that the derivative of normalized H
    along (v, V* Omega) equals a quarter of the fourth-order square on the
    real part of the potential; under the manifest's symplectic sign this
    is the pair below (both membership constraints are sign-homogeneous).
    """

    def v_fn(batch, order):
        psi = psi_field(batch, order + 2)
        B = kh.dbar_vector(geom, batch, grad_J(geom, batch, kh.conj_jet(psi)))
        v = tc.flat_endo(geom, batch, B) * (-1.0)
        return (v + jet_map("pij->pji", v)) * 0.5

    def Vstar_fn(batch, order):
        psi = psi_field(batch, order + 2)
        lam = kh.complex_laplacian(geom, batch, psi) - psi.truncate(order) * 2.0
        return Jet(lam.dim, lam.order, np.real(lam.coeffs)) * 0.5

    return Field(v_fn, shape=(geom.dim,) * 2), Field(Vstar_fn)


def tangent_cone_residuals(geom, v_field: Field, Vstar_field: Field, seed: int = 0):
    """(r_D, r_T): anti-invariance plus del-bar closure of the sharp, and the
    closedness constraint linking the density rate to the metric part."""
    r_D = 0.0
    r_T = 0.0
    for batch in geom.fixture.check_nodes(seed, 120):
        v = v_field(batch, 2)
        J = geom.J(batch, v.order)
        JvJ = jet_einsum("pai,paj->pij", J, jet_einsum("pab,pbj->paj", v, J))
        r_D = max(r_D, float(np.max(np.abs((v + JvJ).value))))
        vs = tc.sharp_sym2(geom, batch, v)
        db = kh.dbar_endo(geom, batch, vs)
        r_D = max(r_D, float(np.max(np.abs(db.value))))
        Vs = Vstar_field(batch, 2)
        t1 = ddc_scalar(geom, batch, Vs) * 2.0
        W = tc.adjoint_endo(geom, batch, vs)
        om = geom.omega(batch, W.order)
        alpha = jet_einsum("pi,pij->pj", W, om)
        t2 = d_oneform(alpha)
        r_T = max(r_T, float(np.max(np.abs((t1 + t2.truncate(t1.order)).value))))
    return r_D, r_T


def soliton_characterization_residual(geom, pdata: PerelmanData, batch) -> np.ndarray:
    """Pointwise 2 H_bar + (lap_c - 2) F on a batch (complex values)."""
    Hb = pdata.H_bar(batch, 0)
    F = pdata.F(batch, 2)
    lam = kh.complex_laplacian(geom, batch, F) - F.truncate(0) * 2.0
    return (Hb * 2.0 + lam).value
