"""Kinetic measure, entropy dissipations and their weak-form oracles.

On a front with states ``(u_l, u_r)`` moving at ``sigma`` the kinetic
measure is ``a(v) dv`` times the time parametrisation of the front, with

    a(v) = (v - u_l) (v - u_r) / 2        for v between the two states,

so that ``int eta''(v) a(v) dv = [q] - sigma [eta]`` for every entropy pair.
It is non-positive on entropic fronts and non-negative on anti-entropic
ones.  The weak-form routines below never use this kernel: they integrate
``eta(u)`` and ``q(u)`` against test functions over the regions of constancy.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import PPoly

from .errors import DegenerateFrontError, DomainError, UsageError
from .solution import Front, FrontSolution
from .testfunctions import (
    KineticTestFunction, TestFunction, piecewise_gauss, time_breaks,
)

logger = logging.getLogger(__name__)

DEFAULT_GRID = 1025


# {{{ entropies

@dataclass(frozen=True, eq=False)
class EntropyDescriptor:
    """Entropy given by samples of ``eta''`` on a uniform grid of ``[0, 1]``.

    ``eta''`` is the piecewise-linear interpolant of the samples; ``eta'``,
    ``eta`` and ``q`` are its exact primitives with ``eta(0) = q(0) = 0`` and
    ``eta'(0) = eta_p0`` (zero by default, so affine parts are dropped unless
    requested).
    """

    eta_pp: np.ndarray
    id: str = "eta"
    eta_p0: float = 0.0
    _pp: PPoly = field(init=False, repr=False)
    _p: PPoly = field(init=False, repr=False)
    _eta: PPoly = field(init=False, repr=False)
    _q: PPoly = field(init=False, repr=False)

    def __post_init__(self):
        samples = np.asarray(self.eta_pp, dtype=float).copy()
        if samples.ndim != 1 or samples.size < 2:
            raise DomainError("eta'' needs at least two samples")
        if not np.all(np.isfinite(samples)):
            raise DomainError("eta'' samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "eta_pp", samples)

        grid = np.linspace(0.0, 1.0, samples.size)
        h = np.diff(grid)
        pp = PPoly(np.vstack([np.diff(samples) / h, samples[:-1]]), grid)
        p = pp.antiderivative()
        p.c[-1] += self.eta_p0
        eta = p.antiderivative()

        # q' = v eta'(v): multiply each local polynomial by (x_i + s)
        c = p.c
        shifted = np.vstack([c, np.zeros((1, c.shape[1]))])
        scaled = np.vstack([np.zeros((1, c.shape[1])), c * grid[:-1]])
        q = PPoly(shifted + scaled, grid).antiderivative()

        object.__setattr__(self, "_pp", pp)
        object.__setattr__(self, "_p", p)
        object.__setattr__(self, "_eta", eta)
        object.__setattr__(self, "_q", q)

    # constructors

    @classmethod
    def from_function(cls, fn, n: int = DEFAULT_GRID, id: str = "eta",
                      eta_p0: float = 0.0) -> "EntropyDescriptor":
        v = np.linspace(0.0, 1.0, n)
        return cls(np.asarray(fn(v), dtype=float) * np.ones(n), id, eta_p0)

    @classmethod
    def quadratic(cls, n: int = DEFAULT_GRID) -> "EntropyDescriptor":
        """``v^2 / 2``, the quadratic entropy."""
        return cls(np.ones(n), "quadratic")

    @classmethod
    def neg_quadratic(cls, n: int = DEFAULT_GRID) -> "EntropyDescriptor":
        return cls(-np.ones(n), "neg-quadratic")

    @classmethod
    def linear(cls, n: int = DEFAULT_GRID) -> "EntropyDescriptor":
        """``eta(v) = v`` whose flux is the Burgers flux itself."""
        return cls(np.zeros(n), "linear", 1.0)

    @classmethod
    def random_convex(cls, rng: np.random.Generator, n: int = DEFAULT_GRID,
                      id: str = "random") -> "EntropyDescriptor":
        """Random smooth convex entropy: a positive mix of Gaussian bumps."""
        v = np.linspace(0.0, 1.0, n)
        k = int(rng.integers(1, 5))
        centers = rng.uniform(-0.2, 1.2, k)
        widths = rng.uniform(0.05, 0.5, k)
        amps = rng.uniform(0.0, 2.0, k)
        vals = rng.uniform(0.0, 0.5) + np.sum(
            amps[:, None] * np.exp(-((v[None, :] - centers[:, None]) / widths[:, None]) ** 2),
            axis=0)
        return cls(vals, id)

    @classmethod
    def random_bounded(cls, rng: np.random.Generator, n: int = DEFAULT_GRID,
                       id: str = "bounded") -> "EntropyDescriptor":
        """Random entropy with ``|eta''| <= 1`` (not necessarily convex)."""
        v = np.linspace(0.0, 1.0, n)
        k = int(rng.integers(1, 6))
        freqs = rng.uniform(0.5, 6.0, k)
        phases = rng.uniform(0, 2 * np.pi, k)
        amps = rng.uniform(-1, 1, k)
        vals = np.sum(amps[:, None] * np.sin(freqs[:, None] * 2 * np.pi * v + phases[:, None]),
                      axis=0)
        vals = vals / max(1.0, np.max(np.abs(vals)))
        return cls(vals, id)

    @classmethod
    def from_json(cls, doc: dict) -> "EntropyDescriptor":
        return cls(np.asarray(doc["eta_pp"], dtype=float), str(doc["id"]),
                   float(doc.get("eta_p0", 0.0)))

    def to_json(self) -> dict:
        return {"id": self.id, "eta_pp": [float(x) for x in self.eta_pp]}

    # evaluation

    @property
    def grid(self) -> np.ndarray:
        return self._pp.x

    @property
    def convex(self) -> bool:
        return bool(np.all(self.eta_pp >= 0))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.eta_pp)))

    def eta(self, v):
        return self._eta(v)

    def eta_p(self, v):
        return self._p(v)

    def d2(self, v):
        return self._pp(v)

    def q(self, v):
        return self._q(v)

    def flux_identity_error(self) -> float:
        """``max |q'(v) - v eta'(v)|`` over the grid points."""
        v = self.grid
        return float(np.max(np.abs(self._q.derivative()(v) - v * self._p(v))))

    def integrate_against(self, fn, lo: float, hi: float) -> float:
        """``int_lo^hi eta''(v) fn(v) dv`` by Gauss rules on the grid cells.

        Exact for polynomial ``fn`` of degree <= 4.
        """
        if hi <= lo:
            return 0.0
        grid = self.grid
        inner = grid[(grid > lo) & (grid < hi)]
        knots = np.concatenate([[lo], inner, [hi]])
        nodes, w = piecewise_gauss(knots, 3)
        return float(np.sum(self._pp(nodes) * fn(nodes) * w))


def load_entropy_library(doc) -> list[EntropyDescriptor]:
    """Entropy library file: a JSON object or list of ``{"id", "eta_pp"}``."""
    if isinstance(doc, dict):
        doc = doc.get("entropies", [doc])
    return [EntropyDescriptor.from_json(d) for d in doc]

# }}}


# {{{ per-front measures

@dataclass(frozen=True)
class FrontMeasure:
    """Kinetic measure carried by one front: ``density(v) dv`` per unit time."""

    front: Front
    lo: float
    hi: float
    sign: int

    def density(self, v):
        v = np.asarray(v, dtype=float)
        inside = (v > self.lo) & (v < self.hi)
        return np.where(inside, self.sign * 0.5 * (v - self.lo) * (self.hi - v), 0.0)

    def kernel(self, v):
        """The same quadratic without the cut-off, as used in exact pairings."""
        return self.sign * 0.5 * (np.asarray(v) - self.lo) * (self.hi - np.asarray(v))

    @property
    def rate(self) -> float:
        """``int a(v) dv`` per unit time."""
        return self.sign * (self.hi - self.lo) ** 3 / 12.0

    @property
    def abs_rate(self) -> float:
        return (self.hi - self.lo) ** 3 / 12.0

    @property
    def total(self) -> float:
        return self.rate * self.front.duration


def mu_on_front(front) -> FrontMeasure:
    u_l, u_r = float(front.u_l), float(front.u_r)
    if u_l == u_r:
        raise DegenerateFrontError("front with equal states carries no measure")
    lo, hi = min(u_l, u_r), max(u_l, u_r)
    return FrontMeasure(front, lo, hi, -1 if u_l > u_r else 1)


@dataclass(frozen=True)
class KineticMeasure:
    sol: FrontSolution
    fronts: tuple[FrontMeasure, ...]

    @property
    def total(self) -> float:
        return math.fsum(m.total for m in self.fronts)

    @property
    def total_variation(self) -> float:
        return math.fsum(m.abs_rate * m.front.duration for m in self.fronts)

    @property
    def negative_part(self) -> float:
        return math.fsum(m.abs_rate * m.front.duration for m in self.fronts if m.sign < 0)

    @property
    def positive_part(self) -> float:
        return math.fsum(m.abs_rate * m.front.duration for m in self.fronts if m.sign > 0)

    def pair(self, psi: KineticTestFunction, part: str = "signed") -> float:
        """Exact pairing with a kinetic test function.

        ``part`` is one of ``signed``, ``abs``, ``negative``, ``positive``.
        """
        total = 0.0
        for m in self.fronts:
            if part == "negative" and m.sign > 0 or part == "positive" and m.sign < 0:
                continue
            sgn = 1.0 if part != "signed" else float(m.sign)
            v_int = psi.v_moment(m.lo, m.hi, weight=lambda v, m=m: 0.5 * (v - m.lo) * (m.hi - v))
            if v_int == 0.0:
                continue
            total += sgn * float(v_int) * along_front(m.front, psi.phi)
        return total


def kinetic_measure(sol: FrontSolution) -> KineticMeasure:
    return KineticMeasure(sol, tuple(mu_on_front(f) for f in sol.fronts))


def along_front(front: Front, phi: TestFunction) -> float:
    """``int phi(t, x_f(t)) dt`` over the front's lifetime, exact."""
    t_lo, t_hi = front.t_birth, front.t_death
    if phi.alpha is not None:
        a_lo, a_hi = phi.alpha.support
        t_lo, t_hi = max(t_lo, a_lo), min(t_hi, a_hi)
    if t_hi <= t_lo:
        return 0.0
    cuts = [t_lo, t_hi]
    rel = front.sigma - phi.drift
    if rel != 0.0:
        for edge in phi.beta.support:
            tc = (edge + phi.drift * (-phi.t_ref) - front.x_birth
                  + front.sigma * front.t_birth) / rel
            if t_lo < tc < t_hi:
                cuts.append(tc)
    nodes, w = piecewise_gauss(np.array(sorted(cuts)))
    return float(np.sum(phi(nodes, front.position(nodes)) * w))

# }}}


# {{{ entropy dissipation and nu

@dataclass(frozen=True)
class FrontRate:
    front_id: int
    t0: float
    t1: float
    rate_closed_form: float
    rate_kernel: float
    nu_rate: float


@dataclass(frozen=True)
class EntropyDissipation:
    entropy_id: str
    convex: bool
    rates: tuple[FrontRate, ...]

    @property
    def total(self) -> float:
        return math.fsum(r.rate_closed_form * (r.t1 - r.t0) for r in self.rates)

    @property
    def max_route_discrepancy(self) -> float:
        return max((abs(r.rate_closed_form - r.rate_kernel) for r in self.rates), default=0.0)

    def rate_map(self) -> dict[int, float]:
        return {r.front_id: r.rate_closed_form for r in self.rates}


def closed_form_rate(front, eta: EntropyDescriptor) -> float:
    """``[q] - sigma [eta]`` with ``[g] = g(u_r) - g(u_l)``."""
    u_l, u_r = front.u_l, front.u_r
    return float((eta.q(u_r) - eta.q(u_l)) - front.sigma * (eta.eta(u_r) - eta.eta(u_l)))


def kernel_rate(front, eta: EntropyDescriptor) -> float:
    """``int eta''(v) a(v) dv`` against the front's kinetic density."""
    m = mu_on_front(front)
    return eta.integrate_against(m.kernel, m.lo, m.hi)


def entropy_dissipation(sol: FrontSolution, eta: EntropyDescriptor) -> EntropyDissipation:
    if not eta.convex:
        logger.info("entropy %s is not convex; rates are still defined", eta.id)
    rates = []
    for f in sol.fronts:
        rates.append(FrontRate(f.id, f.t_birth, f.t_death, closed_form_rate(f, eta),
                               kernel_rate(f, eta), f.jump ** 3 / 12.0))
    return EntropyDissipation(eta.id, eta.convex, tuple(rates))


@dataclass(frozen=True)
class NuMeasure:
    """``nu``: line density ``|u_l - u_r|^3 / 12`` per unit time on each front."""

    sol: FrontSolution
    densities: dict[int, float]

    @property
    def total(self) -> float:
        fmap = self.sol.front_map
        return math.fsum(d * fmap[i].duration for i, d in sorted(self.densities.items()))

    def restricted_total(self, entropic: bool) -> float:
        fmap = self.sol.front_map
        return math.fsum(d * fmap[i].duration for i, d in sorted(self.densities.items())
                         if fmap[i].is_entropic == entropic)


def nu_measure(sol: FrontSolution) -> NuMeasure:
    return NuMeasure(sol, {f.id: f.jump ** 3 / 12.0 for f in sol.fronts})

# }}}


# {{{ weak-form oracles

def _slab_groups(sol: FrontSolution, nodes: np.ndarray):
    starts = np.array([s.t0 for s in sol.slabs])
    which = np.clip(np.searchsorted(starts, nodes, side="right") - 1, 0, len(sol.slabs) - 1)
    for k in np.unique(which):
        sel = which == k
        slab = sol.slabs[k]
        t = nodes[sel]
        P = slab.x_birth[:, None] + slab.sigma[:, None] * (t[None, :] - slab.t_birth[:, None])
        yield sel, t, P, slab.states


def _region_edges(P: np.ndarray, lo: float, hi: float):
    n = P.shape[1]
    left = np.vstack([np.full((1, n), lo), np.clip(P, lo, hi)])
    right = np.vstack([np.clip(P, lo, hi), np.full((1, n), hi)])
    return left, right


def _check_time_support(sol: FrontSolution, phi: TestFunction, flat_ok: bool):
    T = sol.horizon
    if phi.alpha is None:
        if not flat_ok:
            raise DomainError("time-flat test function needs the time-boundary terms")
        return
    lo, hi = phi.alpha.support
    if lo < -1e-14 or hi > T + 1e-14:
        raise DomainError(f"test function time support [{lo}, {hi}] exceeds [0, {T}]")


def _x_window(phi: TestFunction, T: float) -> tuple[float, float]:
    lo, hi = phi.beta.support
    shifts = phi.shift(np.array([0.0, T]))
    return lo + shifts.min() - 1.0, hi + shifts.max() + 1.0


def weak_residual(sol: FrontSolution, eta: EntropyDescriptor, phi: TestFunction,
                  include_time_boundary: bool = False) -> float:
    """``<mu_eta, phi> = -int int (eta(u) phi_t + q(u) phi_x) dx dt``.

    The double integral is computed cell by cell: exactly in ``x`` through the
    bump primitive and by Gauss rules on polynomial time pieces.  With
    ``include_time_boundary`` the test function may be nonzero at ``t = 0``
    and ``t = T`` and the terms ``[int eta(u) phi dx]_0^T`` are added.
    """
    _check_time_support(sol, phi, include_time_boundary)
    T = sol.horizon
    t_lo, t_hi = phi.time_support(T)
    x_lo, x_hi = _x_window(phi, T)
    nodes, w = piecewise_gauss(time_breaks(sol, phi, t_lo, t_hi))

    total = 0.0
    for sel, t, P, states in _slab_groups(sol, nodes):
        left, right = _region_edges(P, x_lo, x_hi)
        tt = t[None, :]
        e = eta.eta(states)[:, None]
        qv = eta.q(states)[:, None]
        vals = e * phi.int_phi_t(tt, left, right) + qv * phi.int_phi_x(tt, left, right)
        total -= float(np.sum(vals.sum(axis=0) * w[sel]))

    if include_time_boundary:
        total += _boundary_term(sol, eta, phi, T, x_lo, x_hi) \
            - _boundary_term(sol, eta, phi, 0.0, x_lo, x_hi)
    return total


def _boundary_term(sol, eta, phi, t, x_lo, x_hi) -> float:
    pos, states = sol.front_positions(t)
    edges = np.concatenate([[x_lo], np.clip(pos, x_lo, x_hi), [x_hi]])
    vals = eta.eta(states) * phi.int_x(t, edges[:-1], edges[1:])
    return float(np.sum(vals))


def front_pairing(sol: FrontSolution, rates: dict[int, float], phi: TestFunction) -> float:
    """``sum_f rate_f int phi(t, x_f(t)) dt``: the closed-form side of a pairing."""
    fmap = sol.front_map
    return math.fsum(r * along_front(fmap[i], phi) for i, r in sorted(rates.items()) if r)


@dataclass(frozen=True)
class KineticResidual:
    transport: float     # <chi, psi_t + v psi_x>
    source: float        # <mu, psi_v>
    sign: int
    residual: float


def kinetic_pairings(sol: FrontSolution, psi: KineticTestFunction) -> tuple[float, float]:
    """Return ``(<chi, psi_t + v psi_x>, <mu, psi_v>)``."""
    phi = psi.phi
    _check_time_support(sol, phi, False)
    T = sol.horizon
    t_lo, t_hi = phi.time_support(T)
    x_lo, x_hi = _x_window(phi, T)
    nodes, w = piecewise_gauss(time_breaks(sol, phi, t_lo, t_hi))

    transport = 0.0
    for sel, t, P, states in _slab_groups(sol, nodes):
        left, right = _region_edges(P, x_lo, x_hi)
        tt = t[None, :]
        zeros = np.zeros_like(states)
        z0 = psi.v_moment(zeros, states)[:, None]
        z1 = psi.v_moment(zeros, states, weight=lambda v: v)[:, None]
        vals = z0 * phi.int_phi_t(tt, left, right) + z1 * phi.int_phi_x(tt, left, right)
        transport += float(np.sum(vals.sum(axis=0) * w[sel]))

    source = 0.0
    for f in sol.fronts:
        m = mu_on_front(f)
        v_int = float(psi.v_moment(m.lo, m.hi, weight=m.kernel, derivative=True))
        if v_int:
            source += v_int * along_front(f, phi)
    return transport, source


@functools.lru_cache(maxsize=1)
def kinetic_sign() -> int:
    """Sign ``s`` in ``d_t chi + v d_x chi = s d_v mu`` for the pinned ``mu``.

    Measured once on an isolated entropic shock ``(1, 0)``.
    """
    from .solution import Policy, Profile, evolve

    sol = evolve(Profile.box(-2.0, 0.0), 1.0, Policy.keep())
    psi = KineticTestFunction.tensor(0.5, 0.4, 0.25, 0.5, 0.35, 0.3)
    transport, source = kinetic_pairings(sol, psi)
    if abs(source) < 1e-8:
        raise RuntimeError("sign calibration fixture produced no source term")
    return 1 if transport / source > 0 else -1


def kinetic_residual(sol: FrontSolution, psi: KineticTestFunction) -> KineticResidual:
    transport, source = kinetic_pairings(sol, psi)
    s = kinetic_sign()
    return KineticResidual(transport, source, s, abs(transport - s * source))

# }}}


# {{{ binned measures

@dataclass(frozen=True)
class GridMeasure:
    """Signed masses on axis-aligned bins of ``(t, x)`` or ``(t, x, v)``.

    ``total_variation`` is ``sum |bin mass|``; it underestimates the total
    variation of the binned measure whenever one bin holds mass of both signs.
    """

    t_edges: np.ndarray
    x_edges: np.ndarray
    masses: np.ndarray
    v_edges: np.ndarray | None = None

    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.masses)))

    @property
    def total(self) -> float:
        return float(np.sum(self.masses))


def segment_bin_lengths(front: Front, t_edges: np.ndarray, x_edges: np.ndarray) -> np.ndarray:
    """Time length of the front inside every ``(t, x)`` bin."""
    t_edges = np.asarray(t_edges, dtype=float)
    x_edges = np.asarray(x_edges, dtype=float)
    out = np.zeros((t_edges.size - 1, x_edges.size - 1))
    t0, t1 = front.t_birth, front.t_death
    cuts = [t0, t1] + [t for t in t_edges if t0 < t < t1]
    if front.sigma != 0.0:
        tc = front.t_birth + (x_edges - front.x_birth) / front.sigma
        cuts += [t for t in tc if t0 < t < t1]
    cuts = np.array(sorted(cuts))
    mids = 0.5 * (cuts[1:] + cuts[:-1])
    lengths = np.diff(cuts)
    i = np.searchsorted(t_edges, mids, side="right") - 1
    j = np.searchsorted(x_edges, front.position(mids), side="right") - 1
    ok = (i >= 0) & (i < out.shape[0]) & (j >= 0) & (j < out.shape[1]) & (lengths > 0)
    np.add.at(out, (i[ok], j[ok]), lengths[ok])
    return out


def bin_measure(km: KineticMeasure, t_edges, x_edges, v_edges=None,
                mode: str = "signed") -> GridMeasure:
    """Bin ``mu`` (``mode="signed"``) or ``|mu|`` (``mode="abs"``).

    Without ``v_edges`` the result is the projection to ``(t, x)``.
    """
    t_edges = np.asarray(t_edges, dtype=float)
    x_edges = np.asarray(x_edges, dtype=float)
    shape = (t_edges.size - 1, x_edges.size - 1)
    if v_edges is not None:
        v_edges = np.asarray(v_edges, dtype=float)
        shape = shape + (v_edges.size - 1,)
    masses = np.zeros(shape)
    for m in km.fronts:
        L = segment_bin_lengths(m.front, t_edges, x_edges)
        sgn = m.sign if mode == "signed" else 1
        if v_edges is None:
            masses += sgn * m.abs_rate * L
        else:
            a = np.clip(v_edges[:-1], m.lo, m.hi)
            b = np.clip(v_edges[1:], m.lo, m.hi)
            # primitive of (v - lo)(hi - v)/2
            def prim(v, m=m):
                return 0.5 * (-(v ** 3) / 3 + (m.lo + m.hi) * v ** 2 / 2 - m.lo * m.hi * v)
            masses += sgn * L[:, :, None] * (prim(b) - prim(a))[None, None, :]
    return GridMeasure(t_edges, x_edges, masses, v_edges)


def projected_total_variation(km: KineticMeasure, t_edges, x_edges) -> GridMeasure:
    """``|(p_{t,x})# mu|`` on bins, computed front by front.

    Fronts are disjoint segments up to finitely many points, so the total
    variation of the projected measure is the sum over fronts of the absolute
    value of each front's projected mass.
    """
    t_edges = np.asarray(t_edges, dtype=float)
    x_edges = np.asarray(x_edges, dtype=float)
    masses = np.zeros((t_edges.size - 1, x_edges.size - 1))
    for m in km.fronts:
        v_mass = _signed_v_mass(m)
        masses += abs(v_mass) * segment_bin_lengths(m.front, t_edges, x_edges)
    return GridMeasure(t_edges, x_edges, masses)


def _signed_v_mass(m: FrontMeasure, pieces: int = 64) -> float:
    knots = np.linspace(m.lo, m.hi, pieces + 1)
    nodes, w = piecewise_gauss(knots, 3)
    return float(np.sum(m.density(nodes) * w))


def _abs_v_mass(m: FrontMeasure, pieces: int = 64) -> float:
    knots = np.linspace(m.lo, m.hi, pieces + 1)
    nodes, w = piecewise_gauss(knots, 3)
    return float(np.sum(np.abs(m.density(nodes)) * w))

# }}}


# {{{ one-entropy check

@dataclass(frozen=True)
class OneEntropyReport:
    frontwise_discrepancy: float
    grid_discrepancy: float
    naive_grid_tv: float
    nu_vs_quadratic: float
    single_signed: bool
    entropy_solution: bool
    quadratic_nonpositive: bool
    no_anti_entropic_front: bool

    @property
    def equivalence_holds(self) -> bool:
        return self.entropy_solution == self.quadratic_nonpositive == self.no_anti_entropic_front


def default_bins(sol: FrontSolution, n_t: int = 8, n_x: int = 8):
    lo, hi = sol.spatial_hull()
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    return np.linspace(0.0, sol.horizon, n_t + 1), np.linspace(lo, hi, n_x + 1)


def one_entropy_check(sol: FrontSolution, t_edges=None, x_edges=None,
                      tol: float = 1e-12) -> OneEntropyReport:
    km = kinetic_measure(sol)
    if t_edges is None or x_edges is None:
        t_edges, x_edges = default_bins(sol)

    frontwise = 0.0
    single = True
    for m in km.fronts:
        signed, absolute = _signed_v_mass(m), _abs_v_mass(m)
        frontwise = max(frontwise, abs(abs(signed) - absolute))
        d = m.density(np.linspace(m.lo, m.hi, 33)[1:-1])
        single &= bool(np.all(d <= 0) or np.all(d >= 0))

    tv_projected = projected_total_variation(km, t_edges, x_edges)
    projected_abs = bin_measure(km, t_edges, x_edges, mode="abs")
    naive = bin_measure(km, t_edges, x_edges, mode="signed").total_variation()
    grid = float(np.max(np.abs(tv_projected.masses - projected_abs.masses), initial=0.0))

    quad = EntropyDescriptor.quadratic()
    neg = EntropyDescriptor.neg_quadratic()
    r_q = entropy_dissipation(sol, quad).rate_map()
    r_n = entropy_dissipation(sol, neg).rate_map()
    nu = nu_measure(sol).densities
    fmap = sol.front_map
    nu_err = 0.0
    for fid, dens in nu.items():
        ref = r_n[fid] if fmap[fid].is_entropic else r_q[fid]
        nu_err = max(nu_err, abs(ref - dens))

    no_anti = all(f.is_entropic for f in sol.fronts)
    quad_nonpos = all(r <= tol for r in r_q.values())
    return OneEntropyReport(frontwise, grid, naive, nu_err, single, no_anti,
                            quad_nonpos, no_anti)

# }}}


# {{{ density ratios and the jump representation

def _ball_time_length(front: Front, t0: float, x0: float, r: float) -> float:
    # |(t, x_f(t)) - (t0, x0)| <= r  <=>  A s^2 + 2 B s + C <= 0, s = t - t0
    d = front.position(t0) - x0
    A = 1.0 + front.sigma ** 2
    B = front.sigma * d
    C = d * d - r * r
    disc = B * B - A * C
    if disc <= 0:
        return 0.0
    root = math.sqrt(disc)
    s_lo, s_hi = (-B - root) / A, (-B + root) / A
    lo = max(t0 + s_lo, front.t_birth)
    hi = min(t0 + s_hi, front.t_death)
    return max(hi - lo, 0.0)


def j_density_estimate(sol: FrontSolution, points: Sequence[tuple[float, float]],
                       radii: Sequence[float]) -> np.ndarray:
    """``nu(B_r(p)) / r`` for every point and radius (rows: points)."""
    nu = nu_measure(sol).densities
    out = np.zeros((len(points), len(radii)))
    for i, (t0, x0) in enumerate(points):
        for j, r in enumerate(radii):
            mass = math.fsum(nu[f.id] * _ball_time_length(f, t0, x0, r) for f in sol.fronts)
            out[i, j] = mass / r
    return out


@dataclass(frozen=True)
class RectCheck:
    jump_side: float
    weak_side: float

    @property
    def discrepancy(self) -> float:
        return abs(self.jump_side - self.weak_side)


def jump_representation(sol: FrontSolution, eta: EntropyDescriptor, phi: TestFunction) -> float:
    """Pair ``((eta(u+) - eta(u-)) n_t + (q(u+) - q(u-)) n_x) H^1`` on the fronts.

    ``n = (lambda, -1) / sqrt(1 + lambda^2)`` points to the left of a front,
    so ``u+`` is the left trace and ``u-`` the right one.
    """
    total = 0.0
    for f in sol.fronts:
        lam = f.sigma
        norm = math.sqrt(1.0 + lam * lam)
        n_t, n_x = lam / norm, -1.0 / norm
        u_plus, u_minus = f.u_l, f.u_r
        dens = ((eta.eta(u_plus) - eta.eta(u_minus)) * n_t
                + (eta.q(u_plus) - eta.q(u_minus)) * n_x)
        # H^1 on the segment is sqrt(1 + lambda^2) dt
        total += float(dens) * norm * along_front(f, phi)
    return total


def rect_density_check(sol: FrontSolution, eta: EntropyDescriptor,
                       phi: TestFunction) -> RectCheck:
    _check_time_support(sol, phi, False)
    for ev in sol.events:
        lo, hi = phi.x_support(ev.time)
        if phi.a(ev.time) > 0 and lo < ev.position < hi:
            raise UsageError(f"test function support contains the interaction at t={ev.time}")
    return RectCheck(jump_representation(sol, eta, phi), weak_residual(sol, eta, phi))

# }}}


def measures_rows(sol: FrontSolution, entropies: Iterable[EntropyDescriptor]) -> list[dict]:
    """Rows of ``measures.csv``."""
    rows = []
    for eta in entropies:
        for r in entropy_dissipation(sol, eta).rates:
            rows.append({"front_id": r.front_id, "t0": r.t0, "t1": r.t1,
                         "entropy_id": eta.id, "rate_closed_form": r.rate_closed_form,
                         "rate_kernel": r.rate_kernel, "nu_rate": r.nu_rate})
    return rows
