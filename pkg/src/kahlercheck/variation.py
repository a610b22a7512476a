"""One-parameter families of geometries and finite-difference t-derivatives.

Spatial data stays jet-exact along every curve: linear curves evaluate their
direction fields as jets, pullback curves integrate the flow in jet
arithmetic (so the transported frame is the first-order block of the flow
jets), and structure-conjugation curves exponentiate pointwise in jets.
Only the t-derivative is discretized, with central stencils and Richardson
extrapolation, and each result carries an observed convergence order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets as jmath
from .backends import Field, Fixture, NodeBatch
from .errors import FlowDivergedError, NanInFieldError
from .geometry import GeometryState, inverse_and_logdet
from .jets import Jet, jet_einsum

# ---------------------------------------------------------------------------
# composition of a field with jet-valued positions


def compose_field(field: Field, chart: int, pos: list[Jet], order: int) -> Jet:
    """Taylor-exact evaluation of ``field`` along jet-valued positions.

    The field is expanded at the position values and recomposed with the
    zero-constant part of the position jets, which terminates exactly at the
    jet order.
    """
    yvals = np.stack([np.real(p.value) for p in pos], axis=-1)
    nb = NodeBatch(chart, yvals)
    F = field(nb, order)
    from .jets import table

    tb = table(pos[0].dim, order)
    w = []
    for p in pos:
        q = p.truncate(order).copy()
        q.coeffs = q.coeffs.copy()
        q.coeffs[0] = 0.0
        w.append(q)
    shape_extra = (1,) * (F.coeffs.ndim - 2)
    out = None
    mono_cache: dict = {}

    def monomial(beta):
        if beta in mono_cache:
            return mono_cache[beta]
        for a in range(len(beta)):
            if beta[a] > 0:
                prev = list(beta)
                prev[a] -= 1
                m = jmath.jet_mul(monomial(tuple(prev)), w[a])
                mono_cache[beta] = m
                return m
        one = Jet.const(1.0, pos[0].dim, order, pos[0].batch_shape)
        mono_cache[beta] = one
        return one

    for idx, beta in enumerate(tb.alphas):
        coef = F.coeffs[idx]
        if not np.any(coef):
            continue
        mono = monomial(tuple(int(x) for x in beta))
        term = Jet(
            mono.dim,
            mono.order,
            mono.coeffs.reshape(mono.coeffs.shape + shape_extra) * coef[None, ...],
        )
        out = term if out is None else out + term
    if out is None:
        out = Jet.const(0.0, pos[0].dim, order, (yvals.shape[0],) + F.coeffs.shape[2:])
    return out


# ---------------------------------------------------------------------------
# finite differences with Richardson extrapolation


@dataclass
class FDInfo:
    observed_order: float | None
    nominal_order: int
    base_step: float
    shrunk: bool
    note: str = ""


_SCHEMES = {
    ("central-2", 1): (2, {1.0: 0.5, -1.0: -0.5}, 1),
    ("central-4", 1): (4, {2.0: -1 / 12, 1.0: 8 / 12, -1.0: -8 / 12, -2.0: 1 / 12}, 1),
    ("central-2", 2): (2, {1.0: 1.0, 0.0: -2.0, -1.0: 1.0}, 2),
    ("central-4", 2): (
        4,
        {2.0: -1 / 12, 1.0: 16 / 12, 0.0: -30 / 12, -1.0: 16 / 12, -2.0: -1 / 12},
        2,
    ),
}


def fd_derivative(map_fn, t0: float = 0.0, order: int = 1, scheme: str = "central-4",
                  base_step: float = 1e-2, richardson_levels: int = 2,
                  t_max: float | None = None):
    """Richardson-extrapolated central difference of a jet-valued map.

    Returns ``(derivative, FDInfo)``.  The map is evaluated on a shared
    t-cache; the observed order is estimated from three step halvings.
    """
    nominal, stencil, power = _SCHEMES[(scheme, order)]
    h = base_step
    shrunk = False
    span = max(abs(o) for o in stencil)
    if t_max is not None and span * h + abs(t0) > t_max:
        h = (t_max - abs(t0)) / (span * 1.25)
        shrunk = True
    cache: dict = {}

    def ev(t):
        if t not in cache:
            val = map_fn(t)
            arr = val.coeffs if isinstance(val, Jet) else np.asarray(val, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise NanInFieldError(f"map evaluation not finite at t={t}")
            cache[t] = val
        return cache[t]

    def coeffs_of(v):
        return v.coeffs if isinstance(v, Jet) else np.asarray(v, dtype=float)

    proto = ev(t0 + h)

    def stencil_eval(step):
        acc = None
        for off, wgt in stencil.items():
            c = coeffs_of(ev(t0 + off * step)) * (wgt / step**power)
            acc = c if acc is None else acc + c
        return acc

    levels = [stencil_eval(h / 2**k) for k in range(max(richardson_levels + 1, 3))]
    d0 = np.max(np.abs(levels[0] - levels[1]))
    d1 = np.max(np.abs(levels[1] - levels[2]))
    scale = np.max(np.abs(levels[-1])) + 1e-300
    floor = max(1e-10 * scale, 1e-11)
    if d1 < floor or d0 < floor:
        observed = None  # converged to roundoff; order estimate meaningless
    else:
        observed = float(np.log2(d0 / d1))
    ext = levels
    p = nominal
    for _ in range(richardson_levels):
        ext = [
            (2**p * ext[k + 1] - ext[k]) / (2**p - 1) for k in range(len(ext) - 1)
        ]
        p += 2
    best = ext[-1]
    info = FDInfo(observed_order=observed, nominal_order=nominal,
                  base_step=h, shrunk=shrunk)
    if isinstance(proto, Jet):
        return Jet(proto.dim, proto.order, best), info
    return best, info


# ---------------------------------------------------------------------------
# deformation curves


class LinearCurve:
    """g_t = g + t v and density rate rho_t = rho (1 + t V*)."""

    kind = "linear_metric"

    def __init__(self, fixture: Fixture, v_field: Field, Vstar_field: Field | None,
                 keep_J: bool = False):
        self.base = fixture
        self.v = v_field
        self.Vstar = Vstar_field
        self.keep_J = keep_J
        self.t_max = self._spd_window()

    def _spd_window(self) -> float:
        geom = GeometryState(self.base)
        batch = self.base.check_nodes(987, 80)[0]
        g = geom.g(batch, 0).value
        v = self.v(batch, 0).value
        lam = np.linalg.eigvals(np.linalg.solve(g, v))
        lim_g = 0.45 / max(np.max(np.abs(lam)), 1e-9)
        lim_r = np.inf
        if self.Vstar is not None:
            vs = np.max(np.abs(self.Vstar(batch, 0).value))
            lim_r = 0.45 / max(vs, 1e-9)
        return float(min(lim_g, lim_r, 0.5))

    def fixture_at(self, t: float) -> Fixture:
        base = self.base

        def g_fn(batch, order):
            return base.g(batch, order) + self.v(batch, order) * t

        def rho_fn(batch, order):
            rho = base.omega_density(batch, order)
            if self.Vstar is None:
                return rho
            return rho + jet_einsum("p,p->p", rho, self.Vstar(batch, order)) * t

        J = base.J if self.keep_J else None
        return Fixture(f"{base.name}+t*dir", base.backend, Field(g_fn, base.g.shape),
                       Field(rho_fn), J, base.tags, base.descriptor)


class HamiltonianFlowCurve:
    """Pullback along the flow of -(1/2) omega^{-1} du, integrated in jets."""

    kind = "pullback"

    def __init__(self, fixture: Fixture, u_field: Field, t_max: float = 0.2,
                 step: float = 0.0125):
        self.base = fixture
        self.geom = GeometryState(fixture)
        self.u = u_field
        self.t_max = t_max
        self.step = step
        self._flows: dict = {}
        geomref = self.geom

        def xi_fn(batch, order):
            du = u_field(batch, order + 1).gradient()
            om = geomref.omega(batch, order)
            om_inv, _ = inverse_and_logdet(om)
            return jet_einsum("pij,pj->pi", om_inv, du) * (-0.5)

        self.xi = Field(xi_fn, shape=(fixture.backend.dim,))

    def flow_jets(self, batch: NodeBatch, t: float, order: int) -> list[Jet]:
        key = (batch.token, round(t, 12), order)
        if key in self._flows:
            return self._flows[key]
        dim = self.base.backend.dim
        pos = Jet.coordinates(batch.pts, dim, order)
        if t != 0.0:
            n = max(4, int(math.ceil(abs(t) / self.step)))
            h = t / n
            for _ in range(n):
                pos = self._rk4_step(batch.chart, pos, h, order)
        for p in pos:
            if not np.all(np.isfinite(p.coeffs)):
                raise FlowDivergedError("flow integration produced non-finite jets")
        self._flows[key] = pos
        return pos

    def _rk4_step(self, chart, pos, h, order):
        def f(state):
            xi = compose_field(self.xi, chart, state, order)
            return [Jet(xi.dim, xi.order, xi.coeffs[..., i]) for i in range(len(pos))]

        k1 = f(pos)
        k2 = f([p + k * (h / 2) for p, k in zip(pos, k1)])
        k3 = f([p + k * (h / 2) for p, k in zip(pos, k2)])
        k4 = f([p + k * h for p, k in zip(pos, k3)])
        return [
            p + (a + b * 2.0 + c * 2.0 + d) * (h / 6.0)
            for p, a, b, c, d in zip(pos, k1, k2, k3, k4)
        ]

    def _jacobian(self, pos: list[Jet]) -> Jet:
        rows = [p.gradient() for p in pos]      # each (m, a): d_a Psi^i
        return jmath.jet_stack(rows, axis=2)    # (m, i, a)

    def fixture_at(self, t: float) -> Fixture:
        base = self.base
        curve = self

        def g_fn(batch, order):
            pos = curve.flow_jets(batch, t, order + 1)
            dpsi = curve._jacobian(pos)
            gY = compose_field(base.g, batch.chart, [p.truncate(order) for p in pos], order)
            return jet_einsum("pia,pij->paj",
                              dpsi, jet_einsum("pij,pjb->pib", gY, dpsi))

        def rho_fn(batch, order):
            pos = curve.flow_jets(batch, t, order + 1)
            dpsi = curve._jacobian(pos)
            _, logdet = inverse_and_logdet(dpsi)
            rhoY = compose_field(base.omega_density, batch.chart,
                                 [p.truncate(order) for p in pos], order)
            return jet_einsum("p,p->p", rhoY, jmath.exp(logdet))

        def J_fn(batch, order):
            pos = curve.flow_jets(batch, t, order + 1)
            dpsi = curve._jacobian(pos)
            dpsi_inv, _ = inverse_and_logdet(dpsi)
            JY = compose_field(base.J, batch.chart, [p.truncate(order) for p in pos], order)
            return jet_einsum("pia,paj->pij",
                              dpsi_inv, jet_einsum("pik,pkj->pij", JY, dpsi))

        return Fixture(f"{base.name}@flow", base.backend, Field(g_fn, base.g.shape),
                       Field(rho_fn), Field(J_fn, base.g.shape), base.tags,
                       base.descriptor)

    def pullback_scalar_values(self, field: Field, batch: NodeBatch, t: float):
        pos = self.flow_jets(batch, t, 0)
        return compose_field(field, batch.chart, pos, 0).value


class StructureConjugationCurve:
    """J_t = exp(t S) J exp(-t S) with S = (1/2) J A for anti-linear symmetric
    A; the induced metric is read off the fixed symplectic form."""

    kind = "complex_curve"

    def __init__(self, fixture: Fixture, A_field: Field, t_max: float = 0.25):
        self.base = fixture
        self.geom = GeometryState(fixture)
        self.A = A_field
        self.t_max = t_max

    def _expm(self, S: Jet, t: float) -> Jet:
        n = S.batch_shape[-1]
        out = Jet.const(0.0, S.dim, S.order, S.batch_shape)
        out.coeffs[0] = np.eye(n)
        term = out
        for k in range(1, 24):
            term = jet_einsum("pik,pkj->pij", term, S) * (t / k)
            out = out + term
            if np.max(np.abs(term.coeffs)) < 1e-19:
                break
        return out

    def J_field_at(self, t: float) -> Field:
        geom = self.geom
        A = self.A

        def fn(batch, order):
            J0 = geom.J(batch, order)
            S = jet_einsum("pik,pkj->pij", J0, A(batch, order)) * 0.5
            E = self._expm(S, t)
            Einv = self._expm(S, -t)
            return jet_einsum("pik,pkj->pij", E, jet_einsum("pik,pkj->pij", J0, Einv))

        return Field(fn, shape=(geom.dim,) * 2)

    def fixture_at(self, t: float) -> Fixture:
        base = self.base
        geom = self.geom
        Jf = self.J_field_at(t)

        def g_fn(batch, order):
            om = geom.omega(batch, order)
            Jt = Jf(batch, order)
            return jet_einsum("pai,paj->pij", Jt, om) * (-1.0)

        return Fixture(f"{base.name}@conj", base.backend, Field(g_fn, base.g.shape),
                       base.omega_density, Jf, base.tags, base.descriptor)
