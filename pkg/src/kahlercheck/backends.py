"""Compact model geometries: flat/perturbed tori and the round projective line.

A :class:`Backend` owns charts and quadrature; a :class:`Fixture` adds the
metric, the normalized positive density and (where defined) the complex
structure.  All fields are chart-local closed-form expressions evaluated in
jet arithmetic, so every spatial derivative used downstream is exact.

Quadrature weights are stored with respect to the chart Lebesgue measure of
the node's own chart; ``Fixture.integrate`` folds in the fixture density.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import jets
from .errors import (
    BadInputError,
    BadVolumeError,
    DegenerateMetricError,
    NanInFieldError,
    NoOverlapError,
)
from .jets import Jet, jet_stack

TWO_PI = 2.0 * math.pi

_token_counter = itertools.count()


@dataclass(frozen=True)
class NodeBatch:
    chart: int
    pts: np.ndarray                    # (m, dim)
    weights: np.ndarray | None = None  # chart-Lebesgue weights
    token: int = dc_field(default_factory=lambda: next(_token_counter))

    @property
    def size(self) -> int:
        return self.pts.shape[0]


NodeSet = tuple


class Field:
    """Chart-indexed tensor field, evaluated as a jet at a node batch."""

    def __init__(self, fn, shape=(), name=""):
        self.fn = fn
        self.shape = shape
        self.name = name

    def __call__(self, batch: NodeBatch, order: int) -> Jet:
        return self.fn(batch, order)


def chart_expr_field(backend, exprs, shape=(), name=""):
    """Build a Field from per-chart closures acting on coordinate jets.

    ``exprs`` is a single callable (same formula on every chart) or a dict
    chart -> callable; each callable receives the coordinate jets and returns
    a Jet of batch shape ``(m, *shape)``.
    """

    def fn(batch: NodeBatch, order: int) -> Jet:
        e = exprs[batch.chart] if isinstance(exprs, dict) else exprs
        xs = Jet.coordinates(batch.pts, backend.dim, order)
        return e(*xs)

    return Field(fn, shape=shape, name=name)


def const_matrix_field(backend, mat, name=""):
    m = np.asarray(mat, dtype=float)

    def fn(batch: NodeBatch, order: int) -> Jet:
        j = Jet.const(0.0, backend.dim, order, (batch.size,) + m.shape)
        j.coeffs[0] = m
        return j

    return Field(fn, shape=m.shape, name=name)


# ---------------------------------------------------------------------------
# backends


class Backend:
    kind = "abstract"
    dim = 0
    n_charts = 1
    is_fano = False

    def quad_nodes(self) -> NodeSet:
        raise NotImplementedError

    def check_nodes(self, seed: int, count: int = 200) -> NodeSet:
        raise NotImplementedError

    def integrate_chart(self, values_per_batch, nodes: NodeSet) -> float:
        """Sum of chart-Lebesgue weighted values over all batches."""
        total = 0.0
        for batch, vals in zip(nodes, values_per_batch):
            v = np.asarray(vals)
            if not np.all(np.isfinite(v)):
                raise NanInFieldError("non-finite value at a quadrature node")
            total += np.sum(batch.weights * v)
        return total


class Torus(Backend):
    def __init__(self, dim: int, grid: int):
        self.dim = dim
        self.kind = f"Torus{dim}"
        self.grid = grid
        self.n_charts = 1
        self._quad = None

    def quad_nodes(self) -> NodeSet:
        if self._quad is None:
            axes = [np.arange(self.grid) / self.grid for _ in range(self.dim)]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
            w = np.full(pts.shape[0], self.grid ** (-self.dim), dtype=float)
            self._quad = (NodeBatch(0, pts, w),)
        return self._quad

    def check_nodes(self, seed: int, count: int = 200) -> NodeSet:
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0.0, 1.0, size=(count, self.dim))
        return (NodeBatch(0, pts),)


class CP1(Backend):
    """Two stereographic charts with transition w = 1/z; Gauss x uniform grid."""

    dim = 2
    kind = "CP1"
    n_charts = 2
    is_fano = True

    def __init__(self, n_theta: int = 32, n_phi: int = 64):
        self.n_theta = n_theta
        self.n_phi = n_phi
        self._quad = None

    def quad_nodes(self) -> NodeSet:
        if self._quad is None:
            u, gw = np.polynomial.legendre.leggauss(self.n_theta)
            phi = (np.arange(self.n_phi) + 0.5) * TWO_PI / self.n_phi
            U, PHI = np.meshgrid(u, phi, indexing="ij")
            W = np.repeat(gw, self.n_phi) * (TWO_PI / self.n_phi)
            U, PHI = U.ravel(), PHI.ravel()
            batches = []
            for chart in (0, 1):
                mask = U <= 0 if chart == 0 else U > 0
                pts = self._angles_to_chart(U[mask], PHI[mask], chart)
                r2 = np.sum(pts**2, axis=1)
                w_leb = W[mask] * (1.0 + r2) ** 2 / 4.0
                batches.append(NodeBatch(chart, pts, w_leb))
            self._quad = tuple(batches)
        return self._quad

    @staticmethod
    def _angles_to_chart(u, phi, chart):
        s = np.sqrt(np.maximum(1.0 - u**2, 0.0))
        X, Y, Z = s * np.cos(phi), s * np.sin(phi), u
        if chart == 0:
            return np.stack([X / (1.0 - Z), Y / (1.0 - Z)], axis=-1)
        return np.stack([X / (1.0 + Z), -Y / (1.0 + Z)], axis=-1)

    def check_nodes(self, seed: int, count: int = 200) -> NodeSet:
        rng = np.random.default_rng(seed)
        u = rng.uniform(-1.0, 1.0, size=count)
        phi = rng.uniform(0.0, TWO_PI, size=count)
        batches = []
        for chart in (0, 1):
            mask = u <= 0 if chart == 0 else u > 0
            if np.any(mask):
                batches.append(
                    NodeBatch(chart, self._angles_to_chart(u[mask], phi[mask], chart))
                )
        return tuple(batches)

    # -- chart transition ---------------------------------------------------

    @staticmethod
    def transition_jacobian(pts: np.ndarray) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        r2 = x * x + y * y
        if np.any(r2 < 0.04) or np.any(r2 > 25.0):
            raise NoOverlapError("point outside the chart overlap annulus")
        r4 = r2 * r2
        m = np.empty(pts.shape[:1] + (2, 2))
        m[:, 0, 0] = (y * y - x * x) / r4
        m[:, 0, 1] = -2 * x * y / r4
        m[:, 1, 0] = 2 * x * y / r4
        m[:, 1, 1] = (y * y - x * x) / r4
        return m

    @staticmethod
    def transition_point(pts: np.ndarray) -> np.ndarray:
        r2 = np.sum(pts**2, axis=1, keepdims=True)
        if np.any(r2 < 1e-12):
            raise NoOverlapError("transition undefined at the chart origin")
        out = pts / r2
        out[:, 1] *= -1.0
        return out


def chart_transition(components: np.ndarray, valence: str, pts: np.ndarray):
    """CP1 tensor components in the other chart, at the image points.

    ``components`` has shape (m, ...) matching the valence: scalar (m,),
    vector (m,2), oneform (m,2), sym2 (m,2,2), endo (m,2,2).
    Returns (new_points, new_components).
    """
    new_pts = CP1.transition_point(pts)
    M = CP1.transition_jacobian(pts)           # d(new)/d(old) at old points
    Minv = CP1.transition_jacobian(new_pts)    # involution: inverse = jacobian at image
    if valence == "scalar":
        out = components
    elif valence == "vector":
        out = np.einsum("pai,pi->pa", M, components)
    elif valence == "oneform":
        out = np.einsum("pi,pia->pa", components, Minv)
    elif valence == "sym2":
        out = np.einsum("pia,pjb,pij->pab", Minv, Minv, components)
    elif valence == "endo":
        out = np.einsum("pai,pij,pjb->pab", M, components, Minv)
    else:
        raise BadInputError(f"unsupported valence {valence!r}")
    return new_pts, out


# ---------------------------------------------------------------------------
# fixtures


@dataclass
class Fixture:
    name: str
    backend: Backend
    g: Field
    omega_density: Field
    J: Field | None
    tags: frozenset
    descriptor: dict

    def quad_nodes(self) -> NodeSet:
        return self.backend.quad_nodes()

    def check_nodes(self, seed: int, count: int = 200) -> NodeSet:
        return self.backend.check_nodes(seed, count)

    @property
    def dim(self) -> int:
        return self.backend.dim

    def density_values(self, nodes: NodeSet) -> list:
        return [self.omega_density(b, 0).value for b in nodes]

    def integrate(self, values_per_batch, nodes: NodeSet | None = None) -> float:
        """Integral against the fixture density Omega."""
        nodes = nodes or self.quad_nodes()
        rho = self.density_values(nodes)
        weighted = [np.asarray(v) * r for v, r in zip(values_per_batch, rho)]
        return self.backend.integrate_chart(weighted, nodes)

    def integrate_field(self, fld: Field, nodes: NodeSet | None = None) -> float:
        nodes = nodes or self.quad_nodes()
        return self.integrate([fld(b, 0).value for b in nodes], nodes)


# -- torus helper fields ----------------------------------------------------


def trig_scalar(backend, rng, band=1, nmodes=3, amp=1.0, mean_zero=False):
    """Seeded band-limited trig polynomial on a torus."""
    dim = backend.dim
    ks, phases, amps = [], [], []
    while len(ks) < nmodes:
        k = rng.integers(-band, band + 1, size=dim)
        if not np.any(k):
            continue
        ks.append(k.astype(float))
        phases.append(rng.uniform(0, TWO_PI))
        amps.append(rng.normal() * amp / nmodes)
    const = 0.0 if mean_zero else rng.normal() * amp / 3.0

    def expr(*xs):
        acc = Jet.const(const, dim, xs[0].order, xs[0].batch_shape)
        for k, ph, a in zip(ks, phases, amps):
            arg = Jet.const(ph, dim, xs[0].order, xs[0].batch_shape)
            for i in range(dim):
                arg = arg + (TWO_PI * float(k[i])) * xs[i]
            acc = acc + a * jets.sin(arg)
        return acc

    return chart_expr_field(backend, expr, name="trig-scalar")


def stack_matrix_field(backend, entries, name=""):
    """Assemble a matrix Field from a dim x dim nested list of scalar Fields."""

    def fn(batch, order):
        rows = []
        for row in entries:
            rows.append(jet_stack([f(batch, order) for f in row], axis=2))
        return jet_stack(rows, axis=2)

    return Field(fn, shape=(backend.dim, backend.dim), name=name)


def standard_J(dim: int) -> np.ndarray:
    """Block-diagonal complex structure for coordinates (x0+ix1, x2+ix3, ...)."""
    J = np.zeros((dim, dim))
    for b in range(dim // 2):
        J[2 * b, 2 * b + 1] = -1.0
        J[2 * b + 1, 2 * b] = 1.0
    return J


def _kahler_metric_from_modes(backend, modes, J0: np.ndarray):
    """Metric of omega0 + d d^c(phi) for phi = sum_m amp sin(2 pi k.x + phase).

    The potential Hessian is closed-form trig, so the metric evaluates at any
    jet order without spending derivative budget:
    (d d^c phi)_ij = -1/2 (H J - (H J)^T)_ij and g = -J0^T omega.
    """
    dim = backend.dim
    omega0 = J0.T.copy()

    def fn(batch, order):
        xs = Jet.coordinates(batch.pts, dim, order)
        H = Jet.const(0.0, dim, order, (batch.size, dim, dim))
        for k, ph, a in modes:
            arg = Jet.const(ph, dim, order, (batch.size,))
            for i in range(dim):
                arg = arg + (TWO_PI * float(k[i])) * xs[i]
            s = jets.sin(arg)
            kk = -a * TWO_PI**2 * np.outer(k, k)
            H = H + jets.jet_linear("ij,p->pij", kk, s)
        HJ = jets.jet_linear("kj,pik->pij", J0, H)
        ddc = (HJ + (-1.0) * jets.jet_map("pij->pji", HJ)) * (-0.5)
        om = ddc + omega0[None, :, :]
        g = jets.jet_linear("ki,pkj->pij", -J0, om)
        return g

    return Field(fn, shape=(dim, dim), name="kahler-metric")


def _seeded_potential_modes(rng, dim, band, nmodes, amp):
    modes = []
    while len(modes) < nmodes:
        k = rng.integers(-band, band + 1, size=dim)
        if not np.any(k):
            continue
        modes.append((k.astype(float), rng.uniform(0, TWO_PI), rng.normal() * amp / nmodes))
    return modes


def _normalized_density(backend, raw: Field, name: str) -> Field:
    nodes = backend.quad_nodes()
    vals = [raw(b, 0).value for b in nodes]
    if any(np.any(v <= 0) for v in vals):
        raise BadVolumeError(f"{name}: density not positive on quadrature nodes")
    total = backend.integrate_chart(vals, nodes)
    if total <= 0:
        raise BadVolumeError(f"{name}: non-positive total mass")
    scale = 1.0 / total

    def fn(batch, order):
        return raw(batch, order) * scale

    return Field(fn, name=name)


def _check_spd(fixture: Fixture, floor: float = 0.15):
    for batch in fixture.quad_nodes():
        gv = fixture.g(batch, 0).value
        ev = np.linalg.eigvalsh(gv)
        if np.min(ev) <= floor * max(1.0, np.median(ev)):
            raise DegenerateMetricError(
                f"{fixture.name}: metric not safely positive (min eig {np.min(ev):.3e})"
            )


def _check_unit_mass(fixture: Fixture, tol: float = 1e-10):
    total = fixture.integrate([np.ones(b.size) for b in fixture.quad_nodes()])
    if abs(total - 1.0) > tol:
        raise BadVolumeError(f"{fixture.name}: density integrates to {total!r}")


# -- fixture constructors ----------------------------------------------------


def _flat2(desc):
    backend = Torus(2, desc.get("grid", 24))
    g = const_matrix_field(backend, np.eye(2), name="flat-metric")
    rho = chart_expr_field(
        backend, lambda x, y: Jet.const(1.0, 2, x.order, x.batch_shape), name="lebesgue"
    )
    J = const_matrix_field(backend, standard_J(2), name="J0")
    return Fixture("FLAT2", backend, g, rho, J, frozenset({"riemannian", "kahler", "flat"}), desc)


def _pert2(desc):
    backend = Torus(2, desc.get("grid", 24))
    eps = desc.get("epsilon", 0.08)
    J0 = standard_J(2)

    # potential eps' sin(2 pi x) cos(2 pi y), scaled so the induced metric
    # perturbation has size ~eps; written in the sum-angle mode basis
    amp = eps / TWO_PI**2
    modes = [
        (np.array([1.0, 1.0]), 0.0, amp / 2.0),
        (np.array([1.0, -1.0]), 0.0, amp / 2.0),
    ]
    g = _kahler_metric_from_modes(backend, modes, J0)
    raw = chart_expr_field(backend, lambda x, y: jets.exp(jets.sin(TWO_PI * y)), name="raw-density")
    rho = _normalized_density(backend, raw, "PERT2-density")
    J = const_matrix_field(backend, J0, name="J0")
    fx = Fixture("PERT2", backend, g, rho, J, frozenset({"riemannian", "kahler"}), desc)
    _check_spd(fx)
    _check_unit_mass(fx)
    return fx


def _riem4(desc):
    backend = Torus(4, desc.get("grid", 10))
    seed = desc.get("seed", 7)
    eps = desc.get("epsilon", 0.05)
    rng = np.random.default_rng(seed)
    entries = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i, 4):
            f = trig_scalar(backend, rng, band=1, nmodes=2, amp=eps, mean_zero=True)
            if i == j:
                one = lambda *xs: Jet.const(1.0, 4, xs[0].order, xs[0].batch_shape)
                base = chart_expr_field(backend, one)
                entries[i][j] = _field_sum(base, f)
            else:
                entries[i][j] = f
                entries[j][i] = f
    g = stack_matrix_field(backend, entries, name="riem4-metric")
    raw_pert = trig_scalar(backend, rng, band=1, nmodes=2, amp=0.3, mean_zero=True)
    raw = _field_shift(raw_pert, 1.0)
    rho = _normalized_density(backend, raw, "RIEM4-density")
    fx = Fixture("RIEM4", backend, g, rho, None, frozenset({"riemannian"}), desc)
    _check_spd(fx)
    _check_unit_mass(fx)
    return fx


def _kah4(desc):
    backend = Torus(4, desc.get("grid", 10))
    seed = desc.get("seed", 11)
    eps = desc.get("epsilon", 0.04)
    rng = np.random.default_rng(seed)
    J0 = standard_J(4)
    modes = _seeded_potential_modes(rng, 4, band=1, nmodes=4, amp=eps / TWO_PI**2)
    g = _kahler_metric_from_modes(backend, modes, J0)
    raw_pert = trig_scalar(backend, rng, band=1, nmodes=2, amp=0.25, mean_zero=True)
    raw = _field_shift(raw_pert, 1.0)
    rho = _normalized_density(backend, raw, "KAH4-density")
    J = const_matrix_field(backend, J0, name="J0")
    fx = Fixture("KAH4", backend, g, rho, J, frozenset({"riemannian", "kahler"}), desc)
    _check_spd(fx)
    _check_unit_mass(fx)
    return fx


def _fs(desc):
    backend = CP1(desc.get("n_theta", 32), desc.get("n_phi", 64))

    def g_expr(x, y):
        lam = 4.0 / (1.0 + x * x + y * y) ** 2
        z = Jet.const(0.0, 2, lam.order, lam.batch_shape)
        row0 = jet_stack([lam, z], axis=2)
        row1 = jet_stack([z, lam], axis=2)
        return jet_stack([row0, row1], axis=2)

    def rho_expr(x, y):
        return (1.0 / math.pi) / ((1.0 + x * x + y * y) ** 2)

    g = chart_expr_field(backend, g_expr, shape=(2, 2), name="fs-metric")
    rho = chart_expr_field(backend, rho_expr, name="fs-density")
    J = const_matrix_field(backend, standard_J(2), name="J0")
    fx = Fixture(
        "FS", backend, g, rho, J, frozenset({"riemannian", "kahler", "fano_soliton"}), desc
    )
    _check_spd(fx)
    _check_unit_mass(fx)
    return fx


def _field_sum(f1: Field, f2: Field) -> Field:
    return Field(lambda b, k: f1(b, k) + f2(b, k), shape=f1.shape)


def _field_shift(f: Field, c: float) -> Field:
    return Field(lambda b, k: f(b, k) + c, shape=f.shape)


_MAKERS = {"FLAT2": _flat2, "PERT2": _pert2, "RIEM4": _riem4, "KAH4": _kah4, "FS": _fs}

_cache: dict = {}


def make_fixture(desc) -> Fixture:
    """Build a fixture from a descriptor (dict with ``kind`` or a kind name)."""
    if isinstance(desc, str):
        desc = {"kind": desc}
    kind = desc.get("kind")
    if kind not in _MAKERS:
        raise BadInputError(f"unknown fixture kind {kind!r}")
    key = tuple(sorted((k, repr(v)) for k, v in desc.items()))
    if key not in _cache:
        _cache[key] = _MAKERS[kind](dict(desc))
    return _cache[key]


FIXTURE_KINDS = tuple(_MAKERS)


# -- projective-line closed-form data ----------------------------------------


def ambient_coordinates(chart: int, xs):
    """Jets of the unit-sphere embedding (X, Y, Z) in a stereographic chart."""
    x, y = xs
    r2 = x * x + y * y
    inv = jets.reciprocal(1.0 + r2)
    X = 2.0 * x * inv
    Y = (2.0 if chart == 0 else -2.0) * y * inv
    Z = (r2 - 1.0) * inv if chart == 0 else (1.0 - r2) * inv
    return X, Y, Z


def ambient_poly_scalar(backend, rng, degree=2, amp=1.0):
    """Seeded polynomial in the ambient coordinates; globally smooth."""
    monos = [
        (i, j, k)
        for i in range(degree + 1)
        for j in range(degree + 1)
        for k in range(degree + 1)
        if 0 < i + j + k <= degree
    ]
    coeffs = rng.normal(size=len(monos)) * amp / len(monos)

    def expr_for(chart):
        def expr(x, y):
            X, Y, Z = ambient_coordinates(chart, (x, y))
            acc = Jet.const(0.0, 2, x.order, x.batch_shape)
            for (i, j, k), c in zip(monos, coeffs):
                term = Jet.const(c, 2, x.order, x.batch_shape)
                for _ in range(i):
                    term = term * X
                for _ in range(j):
                    term = term * Y
                for _ in range(k):
                    term = term * Z
                acc = acc + term
            return acc

        return expr

    return chart_expr_field(backend, {0: expr_for(0), 1: expr_for(1)}, name="ambient-poly")


def holomorphic_basis(backend) -> list[Field]:
    """Real vector fields of the three holomorphic generators on CP1."""

    def make(chart_exprs):
        def fn(batch, order):
            xs = Jet.coordinates(batch.pts, 2, order)
            re, im = chart_exprs[batch.chart](*xs)
            return jet_stack([re, im], axis=2)

        return Field(fn, shape=(2,), name="holomorphic-field")

    def c(val, x):
        return Jet.const(val, 2, x.order, x.batch_shape)

    # phi in {1, z, z^2} on chart 0 maps to {-w^2, -w, -1} on chart 1
    gens = [
        {
            0: lambda x, y: (c(1.0, x), c(0.0, x)),
            1: lambda x, y: (-(x * x) + y * y, -2.0 * x * y),
        },
        {
            0: lambda x, y: (x * 1.0, y * 1.0),
            1: lambda x, y: (-1.0 * x, -1.0 * y),
        },
        {
            0: lambda x, y: (x * x - y * y, 2.0 * x * y),
            1: lambda x, y: (c(-1.0, x), c(0.0, x)),
        },
    ]
    return [make(g) for g in gens]
