"""Envelope curves, tube concentration, time reversal and trace diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, UsageError
from .kinetic import mu_on_front
from .lagrangian import EPIGRAPH, HYPOGRAPH, LagrangianRep
from .solution import Event, Front, FrontSolution, Profile

EXACT_TOL = 1e-12


# {{{ curves

@dataclass(frozen=True, eq=False)
class EnvelopeCurve:
    """Piecewise-linear curve through its samples, defined for ``t >= t_start``.

    ``provenance[k]`` is the particle attaining the maximum at ``times[k]``
    (``-1`` when the selection is empty).
    """

    anchor: tuple[float, float]
    times: np.ndarray
    values: np.ndarray
    provenance: np.ndarray

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def empty(self) -> bool:
        return bool(np.all(self.provenance < 0))

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.times)

    def is_lipschitz(self, tol: float = 1e-9) -> bool:
        s = self.slopes
        return bool(np.all(s >= -tol) and np.all(s <= 1 + tol))

    def reflected(self, T: float) -> "EnvelopeCurve":
        """Image under ``(t, x) -> (T - t, -x)``."""
        t_bar, x_bar = self.anchor
        return EnvelopeCurve((T - t_bar, -x_bar), (T - self.times)[::-1],
                             (-self.values)[::-1], self.provenance[::-1])


def curve_from_front(front: Front) -> EnvelopeCurve:
    times = np.array([front.t_birth, front.t_death])
    return EnvelopeCurve((front.t_birth, front.x_birth), times, front.position(times),
                         np.array([-1, -1]))


def curve_from_line(t0: float, t1: float, x0: float, slope: float) -> EnvelopeCurve:
    times = np.array([t0, t1])
    return EnvelopeCurve((t0, x0), times, x0 + slope * (times - t0), np.array([-1, -1]))


@dataclass(frozen=True, eq=False)
class CurveFamily:
    curves: tuple[EnvelopeCurve, ...]
    anchors_t: np.ndarray
    anchors_x: np.ndarray
    n_raw: int
    tolerance: float
    reflected_from: float | None = None

    def __len__(self) -> int:
        return len(self.curves)

    def following(self, front: Front, tol: float) -> list[int]:
        """Indices of curves within ``tol`` of ``front`` over its whole life."""
        out = []
        for i, c in enumerate(self.curves):
            if c.t_start > front.t_birth + tol or c.t_end < front.t_death - tol:
                continue
            lo, hi = max(c.t_start, front.t_birth), min(c.t_end, front.t_death)
            ts = np.concatenate([np.linspace(lo, hi, 33),
                                 c.times[(c.times > lo) & (c.times < hi)]])
            if np.max(np.abs(c(ts) - front.position(ts))) <= tol:
                out.append(i)
        return out

    def reflected(self, T: float) -> "CurveFamily":
        return CurveFamily(tuple(c.reflected(T) for c in self.curves), T - self.anchors_t,
                           -self.anchors_x, self.n_raw, self.tolerance, T)

    def rows(self) -> list[dict]:
        """Rows of ``curves.csv``."""
        out = []
        for i, c in enumerate(self.curves):
            for t, f in zip(c.times, c.values):
                out.append({"curve_id": i, "t": float(t), "f": float(f)})
        return out


def sample_times(T: float, n_t: int, per_anchor: int = 8) -> np.ndarray:
    return np.linspace(0.0, T, n_t * per_anchor + 1)


def _envelopes_at(rep: LagrangianRep, times: np.ndarray, t_bars: Sequence[float],
                  x_bars: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Values and provenance of ``max {gamma_x(t) : gamma_x(t_bar) < x_bar}``.

    Returns one ``(values, provenance)`` pair of shape ``(len(times),
    len(x_bars))`` per anchor time; entries with ``t < t_bar`` are unused.
    """
    sel = []
    for t_bar in t_bars:
        x_sel = rep.positions(t_bar)
        order = np.argsort(x_sel, kind="stable")
        counts = np.searchsorted(x_sel[order], x_bars, side="left")
        sel.append((float(t_bar), order, counts))
    out = [(np.tile(x_bars, (times.size, 1)).astype(float),
            np.full((times.size, x_bars.size), -1, dtype=np.int64)) for _ in sel]
    if rep.size == 0:
        return out
    idx = np.arange(rep.size)
    for k, t in enumerate(times):
        p_all = rep.positions(t)
        for (t_bar, order, counts), (vals, prov) in zip(sel, out):
            if t < t_bar:
                continue
            p = p_all[order]
            cm = np.maximum.accumulate(p)
            arg = np.maximum.accumulate(np.where(p == cm, idx, 0))
            has = counts > 0
            c = np.clip(counts - 1, 0, rep.size - 1)
            vals[k] = np.where(has, cm[c], x_bars)
            prov[k] = np.where(has, order[arg[c]], -1)
    return out


def _merge_times(grid: np.ndarray, required: np.ndarray) -> np.ndarray:
    """Union of two time sets; grid points within rounding of a required one are dropped."""
    required = np.unique(required)
    if required.size:
        j = np.clip(np.searchsorted(required, grid), 1, required.size) - 1
        near = np.abs(grid - required[j]) <= EXACT_TOL
        j2 = np.clip(j + 1, 0, required.size - 1)
        near |= np.abs(grid - required[j2]) <= EXACT_TOL
        grid = grid[~near]
    return np.unique(np.concatenate([grid, required]))


def envelope_curve(rep_h: LagrangianRep, t_bar: float, x_bar: float,
                   times: np.ndarray | None = None) -> EnvelopeCurve:
    """``f(t) = max gamma_x(t)`` over curves with ``gamma_x(t_bar) < x_bar``.

    With an empty selection the curve is the constant ``x_bar``.
    """
    if rep_h.side != HYPOGRAPH:
        raise UsageError("envelopes are built from a hypograph representation")
    T = rep_h.sol.horizon
    if not (0.0 <= t_bar < T):
        raise DomainError(f"anchor time {t_bar} outside [0, {T})")
    if times is None:
        times = np.linspace(t_bar, T, 129)
    times = _merge_times(np.asarray(times, dtype=float), np.array([float(t_bar)]))
    times = times[times >= t_bar]
    vals, prov = _envelopes_at(rep_h, times, [t_bar], np.array([float(x_bar)]))[0]
    return EnvelopeCurve((float(t_bar), float(x_bar)), times, vals[:, 0], prov[:, 0])


def anchor_grid(sol: FrontSolution, n_t: int, n_x: int) -> tuple[np.ndarray, np.ndarray]:
    """Anchor times ``i T / n_t`` and a dyadic lattice of ``n_x`` positions.

    The spacing is the smallest power of two with ``n_x`` steps covering the
    spatial hull of the fronts, so all anchors are dyadic rationals.
    """
    T = sol.horizon
    lo, hi = sol.spatial_hull()
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    h = 2.0 ** math.ceil(math.log2((hi - lo) / n_x))
    start = math.floor(lo / h) * h
    return np.arange(n_t) * T / n_t, start + h * np.arange(1, n_x + 1)


def build_J_minus(rep_h: LagrangianRep, n_t: int = 20, n_x: int = 20,
                  anchors: tuple[np.ndarray, np.ndarray] | None = None,
                  per_anchor: int = 8, tol: float | None = None) -> CurveFamily:
    """Envelope curves over an anchor grid, without repeated arcs.

    A curve is dropped when an earlier-anchored kept curve stays within
    ``tol`` of it on its whole domain.
    """
    sol = rep_h.sol
    T = sol.horizon
    if anchors is None:
        anchors = anchor_grid(sol, n_t, n_x)
    t_bars, x_bars = (np.asarray(a, dtype=float) for a in anchors)
    if tol is None:
        tol = 2.0 * max(rep_h.dx, rep_h.dv)
    grid = _merge_times(np.linspace(0.0, T, len(t_bars) * per_anchor + 1), t_bars)
    raw = []
    t_sorted = np.sort(t_bars)
    x_sorted = np.sort(x_bars)
    for t_bar, (vals, prov) in zip(t_sorted, _envelopes_at(rep_h, grid, t_sorted, x_sorted)):
        keep = grid >= t_bar
        for j, x_bar in enumerate(x_sorted):
            raw.append(EnvelopeCurve((float(t_bar), float(x_bar)), grid[keep],
                                     vals[keep, j], prov[keep, j]))
    kept: list[EnvelopeCurve] = []
    for c in raw:
        dup = False
        for k in kept:
            if k.t_start <= c.t_start + EXACT_TOL and k.t_end >= c.t_end - EXACT_TOL:
                if np.max(np.abs(k(c.times) - c.values)) <= tol:
                    dup = True
                    break
        if not dup:
            kept.append(c)
    return CurveFamily(tuple(kept), t_bars, x_bars, len(raw), tol)


def _covered_time(front: Front, curves: Sequence[EnvelopeCurve], eps: float) -> float:
    """Length of ``{t : |x_f(t) - c(t)| <= eps for some curve c}``."""
    intervals = []
    tb, td = front.t_birth, front.t_death
    for c in curves:
        ts = c.times
        a = np.maximum(ts[:-1], tb)
        b = np.minimum(ts[1:], td)
        ok = b > a
        if not np.any(ok):
            continue
        a, b = a[ok], b[ok]
        da = front.position(a) - c(a)
        db = front.position(b) - c(b)
        # d is linear on [a, b]; solve |d| <= eps
        slope = (db - da) / (b - a)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_lo_cross = a + (-eps - da) / slope
            t_hi_cross = a + (eps - da) / slope
        flat = slope == 0
        lo = np.where(flat, a, np.minimum(t_lo_cross, t_hi_cross))
        hi = np.where(flat, b, np.maximum(t_lo_cross, t_hi_cross))
        inside_flat = np.abs(da) <= eps
        lo = np.where(flat & ~inside_flat, b, lo)
        lo, hi = np.maximum(lo, a), np.minimum(hi, b)
        good = hi > lo
        intervals.extend(zip(lo[good], hi[good]))
    if not intervals:
        return 0.0
    intervals.sort()
    total = 0.0
    cur_lo, cur_hi = intervals[0]
    for lo, hi in intervals[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + cur_hi - cur_lo


@dataclass(frozen=True)
class ConcentrationRow:
    epsilon: float
    grid_n: int
    fraction_minus: float
    fraction_plus: float
    off_tube_minus: float
    off_tube_plus: float
    vacuous_minus: bool
    vacuous_plus: bool


def _tube_fraction(fronts: Sequence[Front], curves, eps) -> tuple[float, float, bool]:
    total = 0.0
    inside = 0.0
    for f in fronts:
        dens = f.jump ** 3 / 12.0
        total += dens * f.duration
        inside += dens * min(_covered_time(f, curves, eps), f.duration)
    if total == 0.0:
        return 1.0, 0.0, True
    return inside / total, total - inside, False


@dataclass(frozen=True)
class ConcentrationReport:
    rows: tuple[ConcentrationRow, ...]
    nu_minus: float
    nu_plus: float

    def fraction_total(self, eps: float) -> float:
        """Share of all of ``nu`` inside the tubes of both families."""
        for r in self.rows:
            if r.epsilon == eps:
                total = self.nu_minus + self.nu_plus
                if total == 0:
                    return 1.0
                return 1.0 - (r.off_tube_minus + r.off_tube_plus) / total
        raise KeyError(eps)

    def csv_rows(self) -> list[dict]:
        return [{"epsilon": r.epsilon, "grid_n": r.grid_n, "fraction_minus": r.fraction_minus,
                 "fraction_plus": r.fraction_plus} for r in self.rows]


def concentration_report(sol: FrontSolution, family_minus: CurveFamily,
                         epsilons: Sequence[float],
                         family_plus: CurveFamily | None = None,
                         grid_n: int | None = None) -> ConcentrationReport:
    """Share of ``nu`` on entropic (resp. anti-entropic) fronts inside the tubes.

    ``family_plus`` must already be expressed in the original coordinates
    (see :meth:`CurveFamily.reflected`).
    """
    down = [f for f in sol.fronts if f.is_entropic]
    up = [f for f in sol.fronts if not f.is_entropic]
    if grid_n is None:
        grid_n = len(family_minus.anchors_x)
    rows = []
    curves_plus = family_plus.curves if family_plus is not None else ()
    for eps in epsilons:
        fm, om, vm = _tube_fraction(down, family_minus.curves, eps)
        fp, op, vp = _tube_fraction(up, curves_plus, eps)
        rows.append(ConcentrationRow(float(eps), int(grid_n), fm, fp, om, op, vm, vp))
    nu_m = math.fsum(f.jump ** 3 / 12.0 * f.duration for f in down)
    nu_p = math.fsum(f.jump ** 3 / 12.0 * f.duration for f in up)
    return ConcentrationReport(tuple(rows), nu_m, nu_p)

# }}}


# {{{ time reversal

def time_reversal(sol: FrontSolution) -> FrontSolution:
    """``u~(t, x) = u(T - t, -x)``; front ids are preserved."""
    T = sol.horizon
    fronts = []
    for f in sol.fronts:
        fronts.append(Front(f.id, T - f.t_death, T - f.t_birth, -f.x_death,
                            f.u_r, f.u_l, f.sigma,
                            "entropic" if f.u_r > f.u_l else "anti-entropic"))
    pos, states = sol.front_positions(T)
    # fronts that meet exactly at T leave a single breakpoint
    initial = Profile.normalized(-pos[::-1], states[::-1], tol=EXACT_TOL)
    events = [Event(T - ev.time, -ev.position, tuple(reversed(ev.outgoing)),
                    tuple(reversed(ev.incoming))) for ev in reversed(sol.events)]
    return FrontSolution(initial, T, tuple(sorted(fronts, key=lambda f: f.id)),
                         tuple(events), sol.policy)


@dataclass(frozen=True)
class ReversalReport:
    mu_plus: float
    reversed_mu_minus: float
    mu_minus: float
    reversed_mu_plus: float
    kernel_mismatch: float
    class_swapped: bool
    double_reversal_error: float

    @property
    def passed(self) -> bool:
        return (abs(self.mu_plus - self.reversed_mu_minus) <= EXACT_TOL
                and abs(self.mu_minus - self.reversed_mu_plus) <= EXACT_TOL
                and self.kernel_mismatch <= EXACT_TOL and self.class_swapped
                and self.double_reversal_error <= EXACT_TOL)

    def to_json(self) -> dict:
        return {"mu_plus": self.mu_plus, "reversed_mu_minus": self.reversed_mu_minus,
                "mu_minus": self.mu_minus, "reversed_mu_plus": self.reversed_mu_plus,
                "kernel_mismatch": self.kernel_mismatch, "class_swapped": self.class_swapped,
                "double_reversal_error": self.double_reversal_error, "passed": self.passed}


def front_set_distance(a: FrontSolution, b: FrontSolution) -> float:
    """Largest coordinate gap between fronts with equal ids (inf if ids differ)."""
    ma, mb = a.front_map, b.front_map
    if set(ma) != set(mb):
        return math.inf
    worst = 0.0
    for i, f in ma.items():
        g = mb[i]
        if f.cls != g.cls:
            return math.inf
        worst = max(worst, abs(f.t_birth - g.t_birth), abs(f.t_death - g.t_death),
                    abs(f.x_birth - g.x_birth), abs(f.u_l - g.u_l), abs(f.u_r - g.u_r),
                    abs(f.sigma - g.sigma))
    return worst


def reversal_report(sol: FrontSolution) -> ReversalReport:
    rev = time_reversal(sol)
    rmap = rev.front_map
    mismatch = 0.0
    swapped = True
    v = np.linspace(0.0, 1.0, 101)
    for f in sol.fronts:
        g = rmap[f.id]
        swapped &= f.is_entropic != g.is_entropic
        # pulled-back reversed kernel must equal minus the original one
        mismatch = max(mismatch, float(np.max(np.abs(mu_on_front(g).density(v)
                                                     + mu_on_front(f).density(v)))))
        mismatch = max(mismatch, abs(g.duration - f.duration)
                       * abs(mu_on_front(f).rate))

    def part(s, entropic):
        return math.fsum(mu_on_front(f).abs_rate * f.duration
                         for f in s.fronts if f.is_entropic == entropic)

    return ReversalReport(part(sol, False), part(rev, True), part(sol, True), part(rev, False),
                          mismatch, bool(swapped),
                          front_set_distance(time_reversal(rev), sol))


def build_J_plus(rep_h_reversed: LagrangianRep, n_t: int = 20, n_x: int = 20,
                 **kw) -> CurveFamily:
    """``J+`` of the original solution as the mirror image of ``J-`` of its reversal."""
    fam = build_J_minus(rep_h_reversed, n_t, n_x, **kw)
    return fam.reflected(rep_h_reversed.sol.horizon)

# }}}


# {{{ separation and crossing

@dataclass(frozen=True)
class SeparationReport:
    hyp_violation: float
    epi_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.hyp_violation == 0.0 and self.epi_violation <= self.tolerance


def separation_check(rep_h: LagrangianRep, rep_e: LagrangianRep, f: EnvelopeCurve,
                     t_bar: float, x_bar: float) -> SeparationReport:
    """Largest weighted mass on the wrong side of ``f`` over its sample times."""
    if (float(t_bar), float(x_bar)) != f.anchor:
        raise UsageError(f"curve anchored at {f.anchor}, not at {(t_bar, x_bar)}")
    if rep_h.side != HYPOGRAPH or rep_e.side != EPIGRAPH:
        raise UsageError("need one hypograph and one epigraph representation")
    if rep_h.sol.fronts != rep_e.sol.fronts:
        raise UsageError("representations were built on different solutions")
    left = rep_h.positions(t_bar) < x_bar
    x_e = rep_e.positions(t_bar)
    right = x_e > x_bar
    lo, hi = rep_e.valid_window(t_bar)
    right &= x_e <= hi
    worst_h = 0.0
    worst_e = 0.0
    for t, ft in zip(f.times, f.values):
        if f.empty:
            break
        xh = rep_h.positions(t)
        worst_h = max(worst_h, float(np.sum(rep_h.weight[left & (xh > ft)])))
        xe = rep_e.positions(t)
        worst_e = max(worst_e, float(np.sum(rep_e.weight[right & (xe < ft)])))
    return SeparationReport(worst_h, worst_e, 2.0 / min(rep_h.N_x, rep_h.N_v))


@dataclass(frozen=True)
class CrossingReport:
    pairs: int
    strict_violations: int
    near_ties: int


def no_crossing_sample(rep_h: LagrangianRep, rep_e: LagrangianRep, n_pairs: int = 10_000,
                       seed: int = 0, n_times: int = 41, reach: float | None = None,
                       tie_tol: float = 1e-9) -> CrossingReport:
    """Count later times at which an epigraph curve passes left of a hypograph one.

    Pairs start ordered at a sampled grid time; the epigraph partner is drawn
    among curves within ``reach`` to the right, where crossings would occur.
    """
    if rep_h.side != HYPOGRAPH or rep_e.side != EPIGRAPH:
        raise UsageError("need one hypograph and one epigraph representation")
    if rep_h.sol.fronts != rep_e.sol.fronts:
        raise UsageError("representations were built on different solutions")
    if rep_h.size == 0 or rep_e.size == 0:
        return CrossingReport(0, 0, 0)
    T = rep_h.sol.horizon
    rng = np.random.default_rng(seed)
    times = np.linspace(0.0, T, n_times)
    Xh = np.stack([rep_h.positions(t) for t in times])
    Xe = np.stack([rep_e.positions(t) for t in times])
    if reach is None:
        reach = 0.1
    strict = 0
    ties = 0
    done = 0
    attempts = 0
    order = np.argsort(Xe, axis=1)
    Xe_sorted = np.take_along_axis(Xe, order, axis=1)
    windows = np.array([rep_e.valid_window(float(t))[1] for t in times])
    later = np.arange(n_times)[:, None]
    while done < n_pairs and attempts < 20 * n_pairs:
        batch = n_pairs - done
        attempts += batch
        k = rng.integers(0, n_times - 1, batch)
        i = rng.integers(0, rep_h.size, batch)
        xi = Xh[k, i]
        offset = rng.uniform(0.0, reach, batch)
        # epigraph curve nearest to the right of xi + offset at time k
        pos = np.empty(batch, dtype=np.int64)
        for kk in np.unique(k):
            sel = k == kk
            pos[sel] = np.searchsorted(Xe_sorted[kk], xi[sel] + offset[sel], side="left")
        pos = np.minimum(pos, order.shape[1] - 1)
        j = order[k, pos]
        xj = Xe[k, j]
        keep = (xj > xi) & (xj <= windows[k])
        if not np.any(keep):
            continue
        k, i, j = k[keep], i[keep], j[keep]
        if done + k.size > n_pairs:
            k, i, j = k[:n_pairs - done], i[:n_pairs - done], j[:n_pairs - done]
        gap = Xe[:, j] - Xh[:, i]
        mask = later >= k[None, :]
        strict += int(np.sum(np.any((gap < -tie_tol) & mask, axis=0)))
        ties += int(np.sum(np.any((gap < 0) & (gap >= -tie_tol) & mask, axis=0)))
        done += k.size
    return CrossingReport(done, strict, ties)

# }}}


# {{{ traces

@dataclass(frozen=True)
class TraceReport:
    side: str
    deltas: tuple[float, ...]
    values: tuple[float, ...]

    @property
    def slope(self) -> float:
        """Least-squares slope of ``log value`` against ``log delta``."""
        d = np.log(np.asarray(self.deltas))
        v = np.asarray(self.values)
        if np.any(v <= 0):
            return math.nan
        return float(np.polyfit(d, np.log(v), 1)[0])


def _curve_breaks(sol: FrontSolution, curve: EnvelopeCurve, offsets) -> np.ndarray:
    cuts = set(curve.times.tolist())
    for slab in sol.slabs:
        cuts.update(t for t in (slab.t0, slab.t1) if curve.t_start < t < curve.t_end)
    for a, b, xa, xb in zip(curve.times[:-1], curve.times[1:],
                            curve.values[:-1], curve.values[1:]):
        s = (xb - xa) / (b - a)
        for slab in sol.slabs:
            lo, hi = max(a, slab.t0), min(b, slab.t1)
            if hi <= lo:
                continue
            for c in offsets:
                # xb_f + sigma (t - tb_f) = xa + s (t - a) + c
                with np.errstate(divide="ignore", invalid="ignore"):
                    tc = (xa + c - s * a - slab.x_birth + slab.sigma * slab.t_birth) \
                        / (slab.sigma - s)
                tc = tc[np.isfinite(tc)]
                cuts.update(tc[(tc > lo) & (tc < hi)].tolist())
    return np.array(sorted(cuts))


def trace_functional(sol: FrontSolution, curve: EnvelopeCurve, side: str,
                     delta: float) -> float:
    """``int int_0^delta |u(t, gamma(t) +- y) - trace(t)| dy / delta dt``.

    The inner integral is piecewise linear in ``t`` between the returned break
    times, so the midpoint rule on each piece is exact.
    """
    sgn = 1.0 if side == "right" else -1.0
    breaks = _curve_breaks(sol, curve, (0.0, sgn * delta))
    mids = 0.5 * (breaks[1:] + breaks[:-1])
    widths = np.diff(breaks)
    total = 0.0
    for t, w in zip(mids, widths):
        if w <= 0:
            continue
        g = float(curve(t))
        pos, states = sol.front_positions(t)
        probe = g + sgn * EXACT_TOL * (1.0 + abs(g))
        trace = states[np.searchsorted(pos, probe, side="left")]
        a, b = (g, g + delta) if sgn > 0 else (g - delta, g)
        edges = np.concatenate([[-np.inf], pos, [np.inf]])
        overlap = np.clip(np.minimum(edges[1:], b) - np.maximum(edges[:-1], a), 0.0, None)
        total += w * float(np.sum(np.abs(states - trace) * overlap)) / delta
    return total


def trace_check(sol: FrontSolution, curve: EnvelopeCurve, side: str,
                deltas: Sequence[float]) -> TraceReport:
    if side not in ("left", "right"):
        raise UsageError("side must be 'left' or 'right'")
    if curve.t_start < -EXACT_TOL or curve.t_end > sol.horizon + EXACT_TOL:
        raise DomainError("curve leaves the time domain")
    values = tuple(trace_functional(sol, curve, side, float(d)) for d in deltas)
    return TraceReport(side, tuple(float(d) for d in deltas), values)

# }}}
