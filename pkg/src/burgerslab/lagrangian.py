"""Lagrangian representations of the hypograph and epigraph.

Particles sample the initial hypograph ``{0 < v < u0(x)}`` (or the epigraph
``{u0(x) < v < 1}``) at cell centres.  A particle at level ``v`` moves at speed
``v``; when it meets a front it passes if it fits under the state on the far
side and otherwise reflects to ``u_l + u_r - v``.  The epigraph reuses the same
engine on ``z = 1 - v`` with speed ``1 - z`` and the states ``1 - u``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UsageError
from .kinetic import kinetic_measure
from .solution import FrontSolution
from .testfunctions import KineticTestFunction, dyadic_family

logger = logging.getLogger(__name__)

HYPOGRAPH = "hypograph"
EPIGRAPH = "epigraph"
TIE_TOL = 1e-12
EDGE_SNAP = 1e-9


@dataclass(frozen=True)
class _Side:
    name: str
    to_z: Callable      # state / level -> engine level
    speed: Callable     # engine level -> speed


_SIDES = {
    HYPOGRAPH: _Side(HYPOGRAPH, lambda v: v, lambda z: z),
    EPIGRAPH: _Side(EPIGRAPH, lambda v: 1.0 - v, lambda z: 1.0 - z),
}


# {{{ engine

@dataclass
class _Jumps:
    pid: list = field(default_factory=list)
    t: list = field(default_factory=list)
    x: list = field(default_factory=list)
    z_before: list = field(default_factory=list)
    z_after: list = field(default_factory=list)
    front: list = field(default_factory=list)

    def add(self, pid, t, x, zb, za, fid):
        self.pid.append(pid)
        self.t.append(t)
        self.x.append(x)
        self.z_before.append(zb)
        self.z_after.append(za)
        self.front.append(fid)

    def arrays(self):
        cat = (lambda parts, dt: np.concatenate(parts).astype(dt) if parts
               else np.zeros(0, dtype=dt))
        return (cat(self.pid, np.int64), cat(self.t, float), cat(self.x, float),
                cat(self.z_before, float), cat(self.z_after, float),
                cat(self.front, np.int64))


def _place(new, zs, x, z, c, t0, old=None, k=None):
    """Region index of every particle in slab ``new`` at its start time.

    Fronts that also lived in ``old`` keep their order relative to each
    particle; fronts born at ``t0`` are compared by position.  A particle
    sitting on newborn fronts (an interaction point) goes to a region whose
    state it fits under, preferring one whose bounding fronts it moves with.
    """
    m = len(new.front_ids)
    if old is None:
        born = np.ones(m, dtype=bool)
        out = np.zeros(x.size, dtype=np.int64)
    else:
        old_ids = set(old.front_ids)
        survivors = [fid in set(new.front_ids) for fid in old.front_ids]
        surv_left = np.concatenate([[0], np.cumsum(survivors)]).astype(np.int64)
        out = surv_left[k]
        born = np.array([fid not in old_ids for fid in new.front_ids], dtype=bool)
    pos = new.positions(t0)
    tie_lo = np.full(x.size, -1, dtype=np.int64)
    tie_hi = np.full(x.size, -1, dtype=np.int64)
    for j in np.nonzero(born)[0]:
        d = pos[j] - x
        out += d < -TIE_TOL
        tie = np.abs(d) <= TIE_TOL
        tie_lo[tie & (tie_lo < 0)] = j
        tie_hi[tie] = j
    for i in np.nonzero(tie_lo >= 0)[0]:
        ka = out[i]
        kb = ka + tie_hi[i] - tie_lo[i] + 1
        cands = range(ka, kb + 1)
        fits = [r for r in cands if z[i] <= zs[r]]
        slot = [r for r in cands
                if (r == 0 or c[i] >= new.sigma[r - 1]) and (r == m or c[i] <= new.sigma[r])]
        both = [r for r in fits if r in slot]
        if both:
            out[i] = both[0]
        elif fits:
            # the hit loop resolves the immediate crossing
            out[i] = fits[0]
        elif slot:
            logger.debug("particle %d above every state at an interaction point", i)
            out[i] = slot[0]
    return out


def _run_engine(sol: FrontSolution, x0: np.ndarray, z0: np.ndarray, side: _Side):
    """Push particles through every slab; returns the reflection records."""
    n = x0.size
    speed = side.speed
    xc = x0.astype(float).copy()
    tc = np.zeros(n)
    z = z0.astype(float).copy()
    jumps = _Jumps()
    pid_all = np.arange(n)
    k = None
    prev = None
    for slab in sol.slabs:
        t0, t1 = slab.t0, slab.t1
        c = speed(z)
        x_now = xc + c * (t0 - tc)
        zs = side.to_z(slab.states)
        k = _place(slab, zs, x_now, z, c, t0, prev, k)
        m = len(slab.front_ids)
        fids = np.asarray(slab.front_ids, dtype=np.int64)
        fmap = sol.front_map
        dies = np.array([fmap[int(f)].t_death == t1 < sol.horizon for f in fids], dtype=bool)
        # offsets so that front j is at xb_eff[j] + sigma[j] * t
        off = slab.x_birth - slab.sigma * slab.t_birth
        active = pid_all
        while active.size and m:
            kk = k[active]
            ca = speed(z[active])
            base = xc[active] - ca * tc[active]
            t_hit = np.full(active.size, np.inf)
            hit_left = np.zeros(active.size, dtype=bool)

            jl = kk - 1
            okl = jl >= 0
            jl_c = np.clip(jl, 0, m - 1)
            sl = slab.sigma[jl_c]
            appl = okl & (ca < sl)
            with np.errstate(divide="ignore", invalid="ignore"):
                tl = np.where(appl, (base - off[jl_c]) / (sl - ca), np.inf)

            jr = kk
            okr = jr < m
            jr_c = np.clip(jr, 0, m - 1)
            sr = slab.sigma[jr_c]
            appr = okr & (ca > sr)
            with np.errstate(divide="ignore", invalid="ignore"):
                tr = np.where(appr, (off[jr_c] - base) / (ca - sr), np.inf)

            hit_left = tl <= tr
            t_hit = np.minimum(tl, tr)
            t_hit = np.maximum(t_hit, tc[active])
            # a hit at the death of the front is an arrival at the interaction
            # point; the next slab sorts it out against the outgoing fronts
            j_hit = np.where(hit_left, jl_c, jr_c)
            at_event = dies[j_hit] & (t_hit >= t1 - TIE_TOL)
            go = (t_hit <= t1) & ~at_event
            if not np.any(go):
                break
            idx = active[go]
            th = t_hit[go]
            left = hit_left[go]
            j = np.where(left, jl_c[go], jr_c[go])
            kh = kk[go]
            ch = ca[go]
            xh = xc[idx] + ch * (th - tc[idx])
            xc[idx] = xh
            tc[idx] = th
            recv = np.where(left, zs[np.clip(kh - 1, 0, m)], zs[np.clip(kh + 1, 0, m)])
            zh = z[idx]
            passes = zh <= recv
            k[idx] = np.where(passes, np.where(left, kh - 1, kh + 1), kh)
            refl = ~passes
            if np.any(refl):
                zl, zr = zs[j[refl]], zs[j[refl] + 1]
                znew = zl + zr - zh[refl]
                r_idx = idx[refl]
                jumps.add(r_idx, th[refl], xh[refl], zh[refl], znew, fids[j[refl]])
                z[r_idx] = znew
            active = idx
        prev = slab
    return jumps, z

# }}}


# {{{ representation containers

@dataclass(frozen=True)
class Trajectory:
    """One Lagrangian curve: straight pieces with slope ``v`` between jumps."""

    pid: int
    weight: float
    x0: float
    v0: float
    jump_t: np.ndarray
    jump_x: np.ndarray
    v_before: np.ndarray
    v_after: np.ndarray
    front_ids: np.ndarray

    @property
    def breakpoints(self) -> np.ndarray:
        return self.jump_t

    @property
    def directions(self) -> list[str]:
        return ["up" if b > a else "down" for a, b in zip(self.v_before, self.v_after)]

    @property
    def totvar(self) -> float:
        return float(np.sum(np.abs(self.v_after - self.v_before)))

    def v(self, t):
        t = np.asarray(t, dtype=float)
        n = np.searchsorted(self.jump_t, t, side="right")
        vals = np.concatenate([[self.v0], self.v_after])
        return vals[n]

    def x(self, t):
        t = np.asarray(t, dtype=float)
        n = np.searchsorted(self.jump_t, t, side="right")
        knots_t = np.concatenate([[0.0], self.jump_t])
        knots_x = np.concatenate([[self.x0], self.jump_x])
        vals = np.concatenate([[self.v0], self.v_after])
        i = n  # index of the piece containing t
        return knots_x[i] + vals[i] * (t - knots_t[i])

    def pieces(self, T: float) -> list[tuple[float, float, float, float]]:
        """``(t_start, t_end, x_start, v)`` for every straight piece."""
        ts = np.concatenate([[0.0], self.jump_t, [T]])
        xs = np.concatenate([[self.x0], self.jump_x])
        vs = np.concatenate([[self.v0], self.v_after])
        return [(ts[i], ts[i + 1], xs[i], vs[i]) for i in range(len(vs))]


@dataclass(frozen=True)
class VerticalSegment:
    t: float
    x: float
    v_lo: float
    v_hi: float
    sign: int

    @property
    def length(self) -> float:
        return self.v_hi - self.v_lo


@dataclass(frozen=True)
class PerCurveMeasure:
    """``mu_gamma``: signed vertical segments at the jumps of one curve."""

    segments: tuple[VerticalSegment, ...]

    @property
    def total_variation(self) -> float:
        return math.fsum(s.length for s in self.segments)

    @property
    def signed_total(self) -> float:
        return math.fsum(s.sign * s.length for s in self.segments)


@dataclass(frozen=True, eq=False)
class LagrangianRep:
    """Particle ensemble with reflection records.

    Each particle ``i`` has weight ``weight[i]`` and starts at
    ``(x0[i], v0[i])``; the jump arrays are sorted by particle and time.
    """

    side: str
    sol: FrontSolution
    N_x: int
    N_v: int
    box: tuple[float, float]
    dx: float
    dv: float
    x0: np.ndarray
    v0: np.ndarray
    weight: np.ndarray
    jump_pid: np.ndarray
    jump_t: np.ndarray
    jump_x: np.ndarray
    v_before: np.ndarray
    v_after: np.ndarray
    jump_front: np.ndarray
    v_final: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.x0.size

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weight))

    @property
    def jump_sizes(self) -> np.ndarray:
        return self.v_after - self.v_before

    def trajectory(self, i: int) -> Trajectory:
        lo = np.searchsorted(self.jump_pid, i, side="left")
        hi = np.searchsorted(self.jump_pid, i, side="right")
        sl = slice(lo, hi)
        return Trajectory(int(i), float(self.weight[i]), float(self.x0[i]), float(self.v0[i]),
                          self.jump_t[sl], self.jump_x[sl], self.v_before[sl],
                          self.v_after[sl], self.jump_front[sl])

    def trajectories(self):
        for i in range(self.size):
            yield self.trajectory(i)

    def positions(self, t: float) -> np.ndarray:
        """``gamma_x(t)`` of all particles."""
        before = self.jump_t < t
        corr = np.bincount(self.jump_pid[before],
                           weights=self.jump_sizes[before] * (t - self.jump_t[before]),
                           minlength=self.size)
        return self.x0 + self.v0 * t + corr

    def levels(self, t: float) -> np.ndarray:
        """``gamma_v(t)`` of all particles (right-continuous at jumps)."""
        done = self.jump_t <= t
        return self.v0 + np.bincount(self.jump_pid[done], weights=self.jump_sizes[done],
                                     minlength=self.size)

    def valid_window(self, t: float) -> tuple[float, float]:
        """``x``-range on which the ensemble is complete at time ``t``."""
        lo, hi = self.box
        if self.side == EPIGRAPH:
            return lo + t, hi
        return -np.inf, np.inf


def _cells(lo: float, hi: float, N_x: int, N_v: int):
    dx = (hi - lo) / N_x
    dv = 1.0 / N_v
    xc = lo + (np.arange(N_x) + 0.5) * dx
    vc = (np.arange(N_v) + 0.5) * dv
    X, V = np.meshgrid(xc, vc, indexing="ij")
    return X.ravel(), V.ravel(), dx, dv


def _build(sol, side_name, x0, v0, weight, N_x, N_v, box, dx, dv) -> LagrangianRep:
    side = _SIDES[side_name]
    z0 = side.to_z(v0)
    jumps, z_final = _run_engine(sol, x0, z0, side)
    pid, t, x, zb, za, fid = jumps.arrays()
    order = np.lexsort((t, pid))
    return LagrangianRep(side_name, sol, N_x, N_v, box, dx, dv, x0, v0, weight,
                         pid[order], t[order], x[order], side.to_z(zb[order]),
                         side.to_z(za[order]), fid[order], side.to_z(z_final))


def _support_box(sol: FrontSolution) -> tuple[float, float]:
    lo, hi = sol.initial.support
    if hi <= lo:
        lo, hi = -1.0, 1.0
    return lo, hi


def build_hypograph_rep(sol: FrontSolution, N_x: int, N_v: int,
                        box: tuple[float, float] | None = None) -> LagrangianRep:
    if N_x < 1 or N_v < 1:
        raise UsageError("N_x and N_v must be positive")
    lo, hi = box or _support_box(sol)
    X, V, dx, dv = _cells(lo, hi, N_x, N_v)
    keep = V < sol.initial(X)
    X, V = X[keep], V[keep]
    w = np.full(X.size, dx * dv)
    return _build(sol, HYPOGRAPH, X, V, w, N_x, N_v, (lo, hi), dx, dv)


def build_epigraph_rep(sol: FrontSolution, N_x: int, N_v: int,
                       box: tuple[float, float] | None = None) -> LagrangianRep:
    """Epigraph particles on ``[lo - T, hi + T] x [0, 1]`` with the cell size of ``N_x``.

    The extra margin keeps the ensemble complete over ``[lo - T + t, hi + T]``,
    which contains the support of ``u(t)`` for every ``t <= T``.
    """
    if N_x < 1 or N_v < 1:
        raise UsageError("N_x and N_v must be positive")
    lo, hi = box or _support_box(sol)
    T = sol.horizon
    dx = (hi - lo) / N_x
    pad = math.ceil(T / dx) * dx
    n_cols = N_x + 2 * int(round(pad / dx))
    X, V, dx, dv = _cells(lo - pad, hi + pad, n_cols, N_v)
    keep = V > sol.initial(X)
    X, V = X[keep], V[keep]
    w = np.full(X.size, dx * dv)
    return _build(sol, EPIGRAPH, X, V, w, N_x, N_v, (lo - pad, hi + pad), dx, dv)


def trace_particle(sol: FrontSolution, x0: float, v0: float,
                   side: str = HYPOGRAPH, weight: float = 1.0) -> Trajectory:
    """Trajectory of a single particle released at ``(x0, v0)``."""
    rep = _build(sol, side, np.array([float(x0)]), np.array([float(v0)]),
                 np.array([weight]), 1, 1, (x0, x0), 0.0, 0.0)
    return rep.trajectory(0)

# }}}


# {{{ checks

def column_masses(rep: LagrangianRep, t: float, edges: np.ndarray) -> np.ndarray:
    """Particle weight per column; the edges must be uniformly spaced.

    Cell-centre lattices hit column edges exactly at rational times, so
    positions within ``EDGE_SNAP`` columns of an edge are assigned to the
    right-hand column instead of being left to rounding.
    """
    x = rep.positions(t)
    width = edges[1] - edges[0]
    idx = np.floor((x - edges[0]) / width + EDGE_SNAP).astype(np.int64)
    ok = (idx >= 0) & (idx < edges.size - 1)
    return np.bincount(idx[ok], weights=rep.weight[ok], minlength=edges.size - 1)


def exact_column_masses(rep: LagrangianRep, t: float, edges: np.ndarray) -> np.ndarray:
    cum = np.diff(rep.sol.cumulative(t, edges))
    if rep.side == EPIGRAPH:
        return np.diff(edges) - cum
    return cum


def pushforward_edges(rep: LagrangianRep, t: float) -> np.ndarray:
    lo, hi = rep.box
    if rep.side == HYPOGRAPH:
        s_lo, s_hi = rep.sol.spatial_hull()
        lo = min(lo, s_lo) - rep.dx
        hi = max(hi, s_hi, hi + t) + rep.dx
        n = math.ceil((hi - lo) / rep.dx)
        return lo + rep.dx * np.arange(n + 1)
    w_lo, w_hi = rep.valid_window(t)
    n = max(1, math.floor((w_hi - w_lo) / rep.dx + 1e-9))
    return w_lo + rep.dx * np.arange(n + 1)


def check_pushforward(rep: LagrangianRep, sol: FrontSolution, t: float) -> float:
    """Summed column-wise ``L1`` gap between ``(e_t)# omega`` and the exact area."""
    if rep.sol is not sol and rep.sol.fronts != sol.fronts:
        raise UsageError("representation was built on another solution")
    edges = pushforward_edges(rep, t)
    return float(np.sum(np.abs(column_masses(rep, t, edges) - exact_column_masses(rep, t, edges))))


def pushforward_bound(rep: LagrangianRep) -> float:
    return 2.0 / min(rep.N_x, rep.N_v)


def totvar_integral(rep: LagrangianRep) -> float:
    """``int TotVar(gamma_v) d omega``."""
    return float(np.sum(rep.weight[rep.jump_pid] * np.abs(rep.jump_sizes)))


def ode_identity_error(rep: LagrangianRep, n_samples: int = 2000, seed: int = 0) -> float:
    """Largest ``|x(t) - x(s) - int_s^t v|`` for sampled pairs between jumps."""
    rng = np.random.default_rng(seed)
    T = rep.sol.horizon
    ids = rng.integers(0, rep.size, n_samples) if rep.size else np.zeros(0, int)
    worst = 0.0
    for i in ids:
        tr = rep.trajectory(int(i))
        for t0, t1, x_s, v in tr.pieces(T):
            if t1 <= t0:
                continue
            s, t = np.sort(rng.uniform(t0, t1, 2))
            worst = max(worst, abs(float(tr.x(t) - tr.x(s)) - v * (t - s)))
            # slope on the piece must equal the level there
            worst = max(worst, abs(float(tr.v(0.5 * (s + t))) - v))
    return worst


def reflection_error(rep: LagrangianRep) -> float:
    """``max |v_before + v_after - (u_l + u_r)|`` over all jumps."""
    if rep.jump_t.size == 0:
        return 0.0
    fmap = rep.sol.front_map
    ul = np.array([fmap[int(f)].u_l for f in rep.jump_front])
    ur = np.array([fmap[int(f)].u_r for f in rep.jump_front])
    return float(np.max(np.abs(rep.v_before + rep.v_after - ul - ur)))


def sign_routing_ok(rep: LagrangianRep) -> bool:
    """Hypograph: down only at entropic fronts; epigraph: the mirror."""
    if rep.jump_t.size == 0:
        return True
    fmap = rep.sol.front_map
    ent = np.array([fmap[int(f)].is_entropic for f in rep.jump_front])
    down = rep.jump_sizes < 0
    if rep.side == HYPOGRAPH:
        return bool(np.all(down == ent))
    return bool(np.all(down == ~ent))


def mu_gamma(trajectory: Trajectory) -> PerCurveMeasure:
    segs = []
    for t, x, a, b in zip(trajectory.jump_t, trajectory.jump_x,
                          trajectory.v_before, trajectory.v_after):
        segs.append(VerticalSegment(float(t), float(x), float(min(a, b)), float(max(a, b)),
                                    1 if b > a else -1))
    return PerCurveMeasure(tuple(segs))


def assembled_pairing(rep: LagrangianRep, psi: KineticTestFunction,
                      part: str = "signed") -> float:
    """Pair ``sum_i w_i mu_gamma_i`` (or its parts) with ``psi``."""
    if rep.jump_t.size == 0:
        return 0.0
    sizes = rep.jump_sizes
    lo = np.minimum(rep.v_before, rep.v_after)
    hi = np.maximum(rep.v_before, rep.v_after)
    sign = np.sign(sizes)
    if part == "signed":
        coef = sign
    elif part == "abs":
        coef = np.ones_like(sign)
    elif part == "negative":
        coef = (sign < 0).astype(float)
    elif part == "positive":
        coef = (sign > 0).astype(float)
    else:
        raise UsageError(f"unknown part {part!r}")
    vm = psi.v_moment(lo, hi)
    vals = coef * rep.weight[rep.jump_pid] * psi.phi(rep.jump_t, rep.jump_x) * vm
    return float(np.sum(vals))


@dataclass(frozen=True)
class DecompositionReport:
    side: str
    n_tests: int
    tolerance: float
    signed_error: float
    abs_error: float
    negative_error: float
    positive_error: float
    signed_totals: tuple[float, float]
    abs_totals: tuple[float, float]

    @property
    def passed(self) -> bool:
        return max(self.signed_error, self.abs_error, self.negative_error,
                   self.positive_error) <= self.tolerance


def decompose_mu(rep: LagrangianRep, sol: FrontSolution, family=None, n_tests: int = 25,
                 seed: int = 0, quad_tol: float = 1e-6) -> DecompositionReport:
    """Compare ``sum w mu_gamma`` with the exact kinetic measure.

    On the hypograph the assembled measure is ``mu`` itself; on the epigraph
    it is ``-mu``, so positive hypograph parts correspond to negative
    epigraph parts and vice versa.
    """
    if rep.sol is not sol and rep.sol.fronts != sol.fronts:
        raise UsageError("representation was built on another solution")
    km = kinetic_measure(sol)
    if family is None:
        family = dyadic_family(sol, n_tests, seed=seed)
    flip = -1.0 if rep.side == EPIGRAPH else 1.0
    neg_part, pos_part = ("negative", "positive") if flip > 0 else ("positive", "negative")
    errs = {"signed": 0.0, "abs": 0.0, "negative": 0.0, "positive": 0.0}
    for psi in family:
        errs["signed"] = max(errs["signed"],
                             abs(flip * assembled_pairing(rep, psi) - km.pair(psi)))
        errs["abs"] = max(errs["abs"],
                          abs(assembled_pairing(rep, psi, "abs") - km.pair(psi, "abs")))
        errs["negative"] = max(errs["negative"], abs(
            assembled_pairing(rep, psi, neg_part) - km.pair(psi, "negative")))
        errs["positive"] = max(errs["positive"], abs(
            assembled_pairing(rep, psi, pos_part) - km.pair(psi, "positive")))
    tol = 3.0 / min(rep.N_x, rep.N_v) + quad_tol
    w = rep.weight[rep.jump_pid]
    signed_total = flip * float(np.sum(w * rep.jump_sizes))
    return DecompositionReport(rep.side, len(family), tol, errs["signed"], errs["abs"],
                               errs["negative"], errs["positive"],
                               (signed_total, km.total),
                               (totvar_integral(rep), km.total_variation))


@dataclass(frozen=True)
class LebesgueReport:
    samples: int
    violations: int
    on_front: int

    @property
    def fraction(self) -> float:
        return self.violations / self.samples if self.samples else 0.0


def lebesgue_time_check(rep: LagrangianRep, sol: FrontSolution, n_samples: int = 10_000,
                        seed: int = 0, tol: float = 1e-12) -> LebesgueReport:
    """Sample (curve, time) pairs and test ``gamma_v(t) < u(t, gamma_x(t))``.

    Mirrored for the epigraph; a sample sitting on a front counts as a
    violation as well.
    """
    if rep.size == 0:
        return LebesgueReport(n_samples, 0, 0)
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, rep.size, n_samples)
    times = rng.uniform(0.0, sol.horizon, n_samples)
    bad = 0
    on_front = 0
    for t in np.unique(times):
        sel = times == t
        x = rep.positions(t)[ids[sel]]
        v = rep.levels(t)[ids[sel]]
        pos, states = sol.front_positions(t)
        near = np.zeros(x.size, dtype=bool)
        if pos.size:
            j = np.clip(np.searchsorted(pos, x), 0, pos.size - 1)
            near = np.abs(pos[j] - x) <= tol
            jm = np.clip(j - 1, 0, pos.size - 1)
            near |= np.abs(pos[jm] - x) <= tol
        u = states[np.searchsorted(pos, x, side="left")] if pos.size else np.zeros(x.size)
        wrong = (v >= u) if rep.side == HYPOGRAPH else (v <= u)
        on_front += int(np.sum(near))
        bad += int(np.sum(near | wrong))
    return LebesgueReport(n_samples, bad, on_front)

# }}}


def particle_rows(rep: LagrangianRep, limit: int | None = None) -> list[dict]:
    """Rows of ``particles.csv``: one per breakpoint, including the start."""
    rows = []
    n = rep.size if limit is None else min(limit, rep.size)
    for i in range(n):
        tr = rep.trajectory(i)
        rows.append({"particle_id": i, "weight": tr.weight, "breakpoint_t": 0.0,
                     "x": tr.x0, "v": tr.v0})
        for t, x, v in zip(tr.jump_t, tr.jump_x, tr.v_after):
            rows.append({"particle_id": i, "weight": tr.weight, "breakpoint_t": float(t),
                         "x": float(x), "v": float(v)})
    return rows
