"""Frozen normalization conventions used by every operator and check.

Each entry is load-bearing: changing one changes the numerical value of some
residual, so the whole table is hashed and the hash is stamped into every
check result.  The Lichnerowicz curvature coefficients were calibrated once
by requiring the endomorphism Bochner identity and the second-variation
assembly to hold simultaneously on curved fixtures (see
scripts/calibrate_lichnerowicz.py); everything else is fixed a priori.
"""

from __future__ import annotations

import hashlib
import json

MANIFEST = {
    "schema": 1,
    "symplectic_form": "omega(xi, eta) = g(J xi, eta); equivalently J = omega^{-1} g",
    "weight": "f = (1/2) log det g - log rho, rho the density of the unit-mass form",
    "chern_ricci": "-d d^c log rho in a holomorphic chart, d^c u = -(1/2) du o J",
    "laplacian": "positive spectrum: lap_w u = -tr_g Hess u + <grad f, grad u>",
    "complex_laplacian": "lap_w - i B, B u = g(grad u, J grad f)",
    "endo_inner_product": "<A,B> = sum_k g(A e_k, B e_k), no half factor",
    "two_tensor_inner_product": "<u,v> = sum_kl u(e_k,e_l) v(e_k,e_l), no half factor",
    "hessian_pairing": "<Hess f, A^2> pairs the 2-tensor g(A^2 ., .) against Hess f",
    "alt_simple": "A hook B = Alt(B o A), Alt fixing antisymmetric forms (half factor)",
    "alt_graded": "degree-1 graded contraction (a hook B)(x,y) = B(a x, y) - B(a y, x)",
    "dbar": "del-bar(A) = plain alternation of the (0,1) covariant derivative",
    "nijenhuis": "N(x,y) = [Jx,Jy] - [x,y] - J[Jx,y] - J[x,Jy]",
    "nijenhuis_variation": "dN/dt = Jdot hook N - Jdot o N - 2 J o del-bar(Jdot)",
    "nijenhuis_variation_scale": -2.0,
    "complex_action": "(a + i b) x_J A = a A + b J A on anti-linear endomorphisms",
    "curve_cayley_bridge": "2 theta = mu - i J mu",
    "lichnerowicz": "L_w v = lap_w v + cR * R(v), R(v)_ij = R_ikjl v^kl",
    "lichnerowicz_cR": -2.0,
    "hamiltonian_flow": "2 dPsi/dt = -(omega^{-1} du) o Psi",
    "potential_direction": "eta(psi) = (-g(del-bar grad_J conj(psi)), "
                           "(1/2) Re[(lap_c - 2) psi] Omega); oriented so "
                           "D H_bar(eta(psi)) = (1/4) P Re(psi)",
    "report_norms": "sup over nodes of the pointwise g-norm; L2 against the unit-mass form",
}


def manifest_json() -> str:
    return json.dumps(MANIFEST, indent=2, sort_keys=True)


def manifest_hash() -> str:
    canonical = json.dumps(MANIFEST, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
