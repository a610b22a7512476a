"""Derived geometric data (inverse metric, connection, curvature, log-density)
as cached jets over node batches.

Conventions: Christoffel symbols Gamma^i_{jk} carry the upper index first;
curvature is R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma Gamma,
Ricci is the (j, l) trace, which makes the round unit sphere satisfy
Ric = g.  The weight function is f = 1/2 log det g - log(rho), rho the
fixture density with respect to chart Lebesgue measure.
"""

from __future__ import annotations

import numpy as np

from . import jets
from .backends import NodeBatch
from .errors import OrderExhaustedError
from .jets import Jet, jet_einsum, jet_linear, jet_map

MAX_FIELD_ORDER = 4


def inverse_and_logdet(G: Jet) -> tuple[Jet, Jet]:
    """Jet inverse and log-determinant of an SPD jet matrix.

    Uses the Neumann series around the pointwise value, which terminates
    exactly at the jet order because the remainder has no constant term.
    """
    G0 = G.value
    G0inv = np.linalg.inv(G0)
    n = G0.shape[-1]
    E = jet_linear("pik,pkj->pij", G0inv, G) * (-1.0)
    E.coeffs[0] += np.eye(n)
    acc = E.copy()
    acc.coeffs[0] += np.eye(n)
    logdet_corr = jet_map("pii->p", E) * (-1.0)
    P = E
    for k in range(2, G.order + 1):
        P = jet_einsum("pij,pjk->pik", P, E)
        acc = acc + P
        logdet_corr = logdet_corr + jet_map("pii->p", P) * (-1.0 / k)
    Ginv = jet_linear("pkj,pik->pij", G0inv, acc)
    sign, base_logdet = np.linalg.slogdet(G0)
    logdet = logdet_corr + base_logdet
    return Ginv, logdet


class GeometryState:
    """Lazy per-batch jets of everything derived from (g, Omega, J)."""

    def __init__(self, fixture, weightless: bool = False):
        self.fixture = fixture
        self.weightless = weightless
        self._cache: dict = {}

    def unweighted(self):
        """Same metric data with the weight turned off (f constant)."""
        twin = GeometryState(self.fixture, weightless=True)
        twin._cache = self._cache
        return twin

    @property
    def dim(self) -> int:
        return self.fixture.backend.dim

    @property
    def is_kahler(self) -> bool:
        return self.fixture.J is not None

    # -- cache plumbing ------------------------------------------------------

    def _get(self, name: str, batch: NodeBatch, order: int, builder):
        key = (name, batch.token, order)
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def _guard(self, order: int, depth: int, what: str):
        if order + depth > MAX_FIELD_ORDER:
            raise OrderExhaustedError(
                f"{what} at jet order {order} needs field order {order + depth} > {MAX_FIELD_ORDER}"
            )

    # -- primary fields ------------------------------------------------------

    def g(self, batch: NodeBatch, order: int) -> Jet:
        self._guard(order, 0, "metric")
        return self._get("g", batch, order, lambda: self.fixture.g(batch, order))

    def rho(self, batch: NodeBatch, order: int) -> Jet:
        self._guard(order, 0, "density")
        return self._get("rho", batch, order, lambda: self.fixture.omega_density(batch, order))

    def J(self, batch: NodeBatch, order: int) -> Jet:
        return self._get("J", batch, order, lambda: self.fixture.J(batch, order))

    # -- metric-derived -------------------------------------------------------

    def ginv(self, batch: NodeBatch, order: int) -> Jet:
        def build():
            inv, logdet = inverse_and_logdet(self.g(batch, order))
            self._cache[("logdetg", batch.token, order)] = logdet
            return inv

        return self._get("ginv", batch, order, build)

    def logdetg(self, batch: NodeBatch, order: int) -> Jet:
        self.ginv(batch, order)
        return self._cache[("logdetg", batch.token, order)]

    def gamma(self, batch: NodeBatch, order: int) -> Jet:
        """Christoffel jets Gamma[p, i, j, k] = Gamma^i_{jk}."""

        def build():
            self._guard(order, 1, "connection")
            g = self.g(batch, order + 1)
            dg = jet_map("pijd->pdij", g.gradient())
            S = jet_map("pikj->pkij", dg) + jet_map("pjki->pkij", dg) - dg
            ginv = self.ginv(batch, order)
            return jet_einsum("plk,pkij->plij", ginv, S) * 0.5

        return self._get("gamma", batch, order, build)

    def riemann(self, batch: NodeBatch, order: int) -> Jet:
        """R[p, i, j, k, l] = R^i_{jkl}."""

        def build():
            self._guard(order, 2, "curvature")
            G = self.gamma(batch, order + 1)
            dG = jet_map("pijkd->pdijk", G.gradient())
            T1 = jet_map("pkilj->pijkl", dG)
            T2 = jet_map("plikj->pijkl", dG)
            Q1 = jet_einsum("pikq,pqlj->pijkl", G, G)
            Q2 = jet_einsum("pilq,pqkj->pijkl", G, G)
            return T1 - T2 + Q1 - Q2

        return self._get("riemann", batch, order, build)

    def riemann_cov(self, batch: NodeBatch, order: int) -> Jet:
        def build():
            return jet_einsum("pia,pajkl->pijkl", self.g(batch, order), self.riemann(batch, order))

        return self._get("riemann_cov", batch, order, build)

    def ric(self, batch: NodeBatch, order: int) -> Jet:
        def build():
            return jet_map("pijil->pjl", self.riemann(batch, order))

        return self._get("ric", batch, order, build)

    def ric_endo(self, batch: NodeBatch, order: int) -> Jet:
        def build():
            return jet_einsum("pik,pkj->pij", self.ginv(batch, order), self.ric(batch, order))

        return self._get("ric_endo", batch, order, build)

    # -- weight ---------------------------------------------------------------

    def f(self, batch: NodeBatch, order: int) -> Jet:
        key = "f0" if self.weightless else "f"

        def build():
            if self.weightless:
                return Jet.const(0.0, self.dim, order, (batch.size,))
            return self.logdetg(batch, order) * 0.5 - jets.log(self.rho(batch, order))

        return self._get(key, batch, order, build)

    def df(self, batch: NodeBatch, order: int) -> Jet:
        key = "df0" if self.weightless else "df"

        def build():
            if self.weightless:
                return Jet.const(0.0, self.dim, order, (batch.size, self.dim))
            return self.f(batch, order + 1).gradient()

        return self._get(key, batch, order, build)

    def gradf(self, batch: NodeBatch, order: int) -> Jet:
        key = "gradf0" if self.weightless else "gradf"

        def build():
            return jet_einsum("pij,pj->pi", self.ginv(batch, order), self.df(batch, order))

        return self._get(key, batch, order, build)

    def hessf(self, batch: NodeBatch, order: int) -> Jet:
        """Covariant Hessian of f, a symmetric 2-tensor."""
        key = "hessf0" if self.weightless else "hessf"

        def build():
            if self.weightless:
                return Jet.const(0.0, self.dim, order, (batch.size, self.dim, self.dim))
            d2 = self.f(batch, order + 2).gradient().gradient()
            corr = jet_einsum("pcab,pc->pab", self.gamma(batch, order), self.df(batch, order))
            return d2 - corr

        return self._get(key, batch, order, build)

    # -- symplectic form -------------------------------------------------------

    def omega(self, batch: NodeBatch, order: int) -> Jet:
        """omega_{ij} = g(J e_i, e_j)."""

        def build():
            return jet_einsum("pki,pkj->pij", self.J(batch, order), self.g(batch, order))

        return self._get("omega", batch, order, build)

    # -- norms and integrals ----------------------------------------------------

    def integrate(self, values_per_batch, nodes=None) -> float:
        return self.fixture.integrate(values_per_batch, nodes)
