"""Weighted Riemannian operator calculus on jet-valued tensors.

Index layout: the batch axis comes first, the value (upper) index of a
tangent-valued object precedes its covariant slots, and the covariant
derivative prepends its direction slot.  All frame sums are written as
metric contractions, so no explicit orthonormal frame enters the operators;
a Cholesky-frame route exists separately for frame-independence checks.

Weighted objects use the fixture density through f = log(dV_g / Omega):
div_w(xi) = tr(grad xi) - df.xi, the adjoints gain a "+ (grad f) hook" term,
and the scalar Laplacian is positive-spectrum: lap_w(u) = -tr_g Hess u
+ <grad f, grad u>.
"""

from __future__ import annotations

import numpy as np

from .backends import NodeBatch
from .errors import BadDegreeError, BadValenceError
from .geometry import GeometryState
from .jets import Jet, jet_einsum, jet_map

# ---------------------------------------------------------------------------
# covariant derivatives (direction slot first in the output)


def cd_scalar(geom: GeometryState, batch: NodeBatch, u: Jet) -> Jet:
    return u.gradient()  # (m, a): the differential du


def cd_vector(geom, batch, X: Jet) -> Jet:
    dX = jet_map("pid->pdi", X.gradient())
    G = geom.gamma(batch, X.order - 1)
    return dX + jet_einsum("piaj,pj->pai", G, X)


def cd_oneform(geom, batch, al: Jet) -> Jet:
    da = jet_map("pid->pdi", al.gradient())
    G = geom.gamma(batch, al.order - 1)
    return da - jet_einsum("pkai,pk->pai", G, al)


def cd_sym2(geom, batch, v: Jet) -> Jet:
    dv = jet_map("pijd->pdij", v.gradient())
    G = geom.gamma(batch, v.order - 1)
    return (
        dv
        - jet_einsum("pkai,pkj->paij", G, v)
        - jet_einsum("pkaj,pik->paij", G, v)
    )


def cd_endo(geom, batch, A: Jet) -> Jet:
    dA = jet_map("pijd->pdij", A.gradient())
    G = geom.gamma(batch, A.order - 1)
    return (
        dA
        + jet_einsum("piak,pkj->paij", G, A)
        - jet_einsum("pkaj,pik->paij", G, A)
    )


def cd_mixed12(geom, batch, T: Jet) -> Jet:
    """Covariant derivative of T^i_{jk} (one upper, two lower slots)."""
    dT = jet_map("pijkd->pdijk", T.gradient())
    G = geom.gamma(batch, T.order - 1)
    return (
        dT
        + jet_einsum("pial,pljk->paijk", G, T)
        - jet_einsum("plaj,pilk->paijk", G, T)
        - jet_einsum("plak,pijl->paijk", G, T)
    )


def cd_cov3(geom, batch, T: Jet) -> Jet:
    """Covariant derivative of a fully covariant 3-tensor T_{abc}."""
    dT = jet_map("pabcd->pdabc", T.gradient())
    G = geom.gamma(batch, T.order - 1)
    return (
        dT
        - jet_einsum("pkda,pkbc->pdabc", G, T)
        - jet_einsum("pkdb,pakc->pdabc", G, T)
        - jet_einsum("pkdc,pabk->pdabc", G, T)
    )


# ---------------------------------------------------------------------------
# index gymnastics and pairings


def sharp_sym2(geom, batch, v: Jet) -> Jet:
    """v*_g = g^{-1} v as an endomorphism."""
    return jet_einsum("pik,pkj->pij", geom.ginv(batch, v.order), v)


def flat_endo(geom, batch, A: Jet) -> Jet:
    """g A as a bilinear form."""
    return jet_einsum("pik,pkj->pij", geom.g(batch, A.order), A)


def sharp_oneform(geom, batch, al: Jet) -> Jet:
    return jet_einsum("pij,pj->pi", geom.ginv(batch, al.order), al)


def flat_vector(geom, batch, X: Jet) -> Jet:
    return jet_einsum("pij,pj->pi", geom.g(batch, X.order), X)


def grad_scalar(geom, batch, u: Jet) -> Jet:
    return sharp_oneform(geom, batch, u.gradient())


def raise2(geom, batch, v: Jet) -> Jet:
    gi = geom.ginv(batch, v.order)
    return jet_einsum("pik,pkj->pij", gi, jet_einsum("pik,pjk->pij", v, gi))


def pair_scalars(a: Jet, b: Jet) -> Jet:
    return jet_einsum("p,p->p", a, b)


def pair_vectors(geom, batch, X: Jet, Y: Jet) -> Jet:
    return jet_einsum("pi,pi->p", flat_vector(geom, batch, X), Y)


def pair_oneforms(geom, batch, a: Jet, b: Jet) -> Jet:
    return jet_einsum("pi,pi->p", sharp_oneform(geom, batch, a), b)


def pair_2tensors(geom, batch, u: Jet, v: Jet) -> Jet:
    """<u, v>_g = u(e_k, e_l) v(e_k, e_l), no half factor."""
    return jet_einsum("pij,pij->p", raise2(geom, batch, u), v)


def pair_endos(geom, batch, A: Jet, B: Jet) -> Jet:
    """<A, B>_g = sum_k g(A e_k, B e_k)."""
    gA = flat_endo(geom, batch, A)
    Bu = jet_einsum("pjl,plk->pjk", B, geom.ginv(batch, B.order))
    return jet_einsum("pjk,pjk->p", gA, Bu)


def pair_slots2(geom, batch, S: Jet, T: Jet) -> Jet:
    """Full frame contraction of two tangent-valued 2-slot objects.

    Layout (m, i, a, b): value index i first, then the two covariant slots.
    """
    g = geom.g(batch, S.order)
    gi = geom.ginv(batch, S.order)
    Sl = jet_einsum("pij,pjab->piab", g, S)
    Tu = jet_einsum("piab,pac->picb", T, gi)
    Tu = jet_einsum("picb,pbd->picd", Tu, gi)
    return jet_einsum("piab,piab->p", Sl, Tu)


def endo_mul(A: Jet, B: Jet) -> Jet:
    return jet_einsum("pik,pkj->pij", A, B)


def commutator(A: Jet, B: Jet) -> Jet:
    return endo_mul(A, B) - endo_mul(B, A)


def transpose_endo(geom, batch, A: Jet) -> Jet:
    """g-transpose: g(A^T x, y) = g(x, A y)."""
    gi = geom.ginv(batch, A.order)
    g = geom.g(batch, A.order)
    return jet_einsum("pik,pkj->pij", gi, jet_einsum("plk,plj->pkj", A, g))


# ---------------------------------------------------------------------------
# weighted divergences, adjoints, Laplacians


def div_omega_vector(geom, batch, X: Jet) -> Jet:
    cd = cd_vector(geom, batch, X)
    tr = jet_map("paa->p", cd)
    df = geom.df(batch, cd.order)
    return tr - jet_einsum("pi,pi->p", df, X)


def div_omega_oneform(geom, batch, al: Jet) -> Jet:
    cd = cd_oneform(geom, batch, al)
    gi = geom.ginv(batch, cd.order)
    tr = jet_einsum("pai,pai->p", gi, cd)
    return tr - jet_einsum("pi,pi->p", geom.gradf(batch, cd.order), al)


def adjoint_sym2(geom, batch, v: Jet) -> Jet:
    """nabla*_w on symmetric 2-tensors, a 1-form: -g^{-1} hook cd(v) + grad f hook v."""
    cd = cd_sym2(geom, batch, v)
    gi = geom.ginv(batch, cd.order)
    t1 = jet_einsum("pkl,pklj->pj", gi, cd) * (-1.0)
    t2 = jet_einsum("pk,pkj->pj", geom.gradf(batch, cd.order), v)
    return t1 + t2


def adjoint_endo(geom, batch, A: Jet) -> Jet:
    """nabla*_w on endomorphisms, a vector field: -sum_k (cd_k A)(e_k) + A grad f."""
    cd = cd_endo(geom, batch, A)
    gi = geom.ginv(batch, cd.order)
    t1 = jet_einsum("pal,pail->pi", gi, cd) * (-1.0)
    t2 = jet_einsum("pij,pj->pi", A, geom.gradf(batch, cd.order))
    return t1 + t2


def adjoint_slots2(geom, batch, B: Jet) -> Jet:
    """nabla*_w on tangent-valued 2-slot objects (m, i, a, b), contracting the
    first slot: an endomorphism -sum_k (cd_k B)(e_k, .) + B(grad f, .)."""
    cd = cd_mixed12(geom, batch, B)  # (m, d, i, a, b)
    gi = geom.ginv(batch, cd.order)
    t1 = jet_einsum("pda,pdiab->pib", gi, cd) * (-1.0)
    t2 = jet_einsum("pa,piab->pib", geom.gradf(batch, cd.order), B)
    return t1 + t2


def laplacian_scalar(geom, batch, u: Jet) -> Jet:
    H = cd_oneform(geom, batch, u.gradient())
    gi = geom.ginv(batch, H.order)
    lap = jet_einsum("pab,pab->p", gi, H) * (-1.0)
    du = u.gradient().truncate(H.order)
    return lap + jet_einsum("pa,pa->p", geom.gradf(batch, H.order), du)


def hessian_scalar(geom, batch, u: Jet) -> Jet:
    return cd_oneform(geom, batch, u.gradient())


def rough_laplacian_endo(geom, batch, A: Jet) -> Jet:
    cdA = cd_endo(geom, batch, A)                       # (m, a, i, j)
    T = jet_map("paij->piaj", cdA)
    cd2 = cd_mixed12(geom, batch, T)                    # (m, b, i, a, j)
    gi = geom.ginv(batch, cd2.order)
    lap = jet_einsum("pba,pbiaj->pij", gi, cd2) * (-1.0)
    return lap + jet_einsum("pa,paij->pij", geom.gradf(batch, cd2.order), cdA)


def rough_laplacian_sym2(geom, batch, v: Jet) -> Jet:
    cdv = cd_sym2(geom, batch, v)                       # (m, a, i, j)
    cd2 = cd_cov3(geom, batch, cdv)                     # (m, b, a, i, j)
    gi = geom.ginv(batch, cd2.order)
    lap = jet_einsum("pba,pbaij->pij", gi, cd2) * (-1.0)
    return lap + jet_einsum("pa,paij->pij", geom.gradf(batch, cd2.order), cdv)


def curvature_action_sym2(geom, batch, v: Jet) -> Jet:
    """R(v)_{ij} = R_{iajb} v^{ab} with the covariant curvature."""
    R = geom.riemann_cov(batch, min(v.order, 2))
    vu = raise2(geom, batch, v)
    return jet_einsum("piajb,pab->pij", R, vu)


# ---------------------------------------------------------------------------
# the weighted 1-form M and the contraction operations


def m_form(geom, batch, u: Jet, v: Jet) -> Jet:
    """M(u, v)(xi) = 2 cd(v)(e_k, u* e_k, xi) + cd(u)(xi, v* e_k, e_k)."""
    cdv = cd_sym2(geom, batch, v)
    cdu = cd_sym2(geom, batch, u)
    u_up = raise2(geom, batch, u).truncate(cdv.order)
    v_up = raise2(geom, batch, v).truncate(cdu.order)
    t1 = jet_einsum("pab,pabc->pc", u_up, cdv) * 2.0
    t2 = jet_einsum("pbc,pabc->pa", v_up, cdu)
    return t1 + t2


def contraction(A: Jet, B: Jet) -> Jet:
    """A hook B := Alt(B o A); Alt normalized to fix antisymmetric forms.

    B may be a 1-form (plain composition) or a bilinear form.
    """
    nb = len(B.batch_shape)
    if nb == 2:  # (m, i): 1-form
        return jet_einsum("pa,pai->pi", B, A)
    if nb == 3:  # (m, i, j): bilinear
        D = jet_einsum("paj,pai->pij", B, A)
        return (D - jet_map("pij->pji", D)) * 0.5
    raise BadValenceError("contraction expects a 1-form or bilinear form")


def generalized_contraction(alpha: Jet, beta: Jet, p: int, q: int) -> Jet:
    """Contraction of a tangent-valued p-form into an E-valued q-form.

    Implemented for p = 1 (endomorphism-type alpha).  For q = 1 this is
    composition; for q = 2 the two-slot alternating insertion (no half
    factor), matching the graded expansion used by the bracket identities.
    ``beta`` layout: scalar-valued (m, slots...) or tangent-valued with the
    value index first (m, i, slots...).
    """
    if p < 1:
        raise BadDegreeError("contraction needs a form degree >= 1")
    if p != 1:
        raise BadDegreeError("only degree-1 contractions are implemented")
    nb = len(beta.batch_shape)
    if q == 1:
        if nb == 2:      # scalar-valued 1-form
            return jet_einsum("pa,pai->pi", beta, alpha)
        if nb == 3:      # tangent-valued 1-form (endomorphism)
            return jet_einsum("pia,paj->pij", beta, alpha)
    if q == 2:
        if nb == 3:      # scalar-valued 2-form
            D = jet_einsum("pab,pai->pib", beta, alpha)
            return D - jet_map("pib->pbi", D)
        if nb == 4:      # tangent-valued 2-form (m, i, a, b)
            D = jet_einsum("piab,paj->pijb", beta, alpha)
            return D - jet_map("pijb->pibj", D)
    raise BadValenceError(f"unsupported contraction arity q={q} for shape {beta.batch_shape}")


# ---------------------------------------------------------------------------
# orthonormal frames (used only by independence cross-checks)


def cholesky_frame(gval: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Columns form a g-orthonormal frame; optional random rotation."""
    L = np.linalg.cholesky(gval)
    frame = np.linalg.inv(np.swapaxes(L, -1, -2))  # L^{-T}: columns e_k
    if rng is not None:
        n = gval.shape[-1]
        Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        frame = frame @ Q
    return frame


def m_form_frame_values(geom, batch, u: Jet, v: Jet, frame: np.ndarray) -> np.ndarray:
    """Value-level frame-sum route for M(u, v), for frame-independence tests.

    ``frame[p, :, k]`` is the k-th frame vector at node p.
    """
    cdv = cd_sym2(geom, batch, v).value
    cdu = cd_sym2(geom, batch, u).value
    u_star = sharp_sym2(geom, batch, u).value
    v_star = sharp_sym2(geom, batch, v).value
    t1 = 2.0 * np.einsum("pak,pbm,pmk,pabc->pc", frame, u_star, frame, cdv)
    t2 = np.einsum("pbm,pmk,pck,pabc->pa", v_star, frame, frame, cdu)
    return t1 + t2
