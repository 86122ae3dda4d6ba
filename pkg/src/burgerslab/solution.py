"""Exact piecewise-constant weak solutions of the Burgers equation.

Solutions are produced by event-driven front tracking.  Every front is a
straight space-time segment moving at its Rankine-Hugoniot speed, so the
output is an exact weak solution; the :class:`Policy` decides whether an
increasing jump is kept as a single anti-entropic front or split into small
upward fronts (a discretised rarefaction).
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ResourceError

logger = logging.getLogger(__name__)

#: Collision guard band: approaching fronts closer than this collide.
GUARD = 1e-12
#: Tolerance used when comparing states that should agree exactly.
STATE_TOL = 1e-12

ENTROPIC = "entropic"
ANTI_ENTROPIC = "anti-entropic"


def _check_state(u: float, name: str = "state") -> float:
    u = float(u)
    if not (0.0 <= u <= 1.0) or math.isnan(u):
        raise DomainError(f"{name} {u!r} outside [0, 1]")
    return u


# {{{ profiles

@dataclass(frozen=True)
class Profile:
    """Piecewise-constant function of ``x`` vanishing outside a bounded set.

    ``values[k]`` is the state on ``(breakpoints[k-1], breakpoints[k])``; the
    first and last entries are the zero tails.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

        if len(vals) != len(bp) + 1:
            raise DomainError("need exactly one more value than breakpoints")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        if not all(math.isfinite(x) for x in bp):
            raise DomainError("breakpoints must be finite")
        for v in vals:
            _check_state(v, "profile value")
        if vals[0] != 0.0 or vals[-1] != 0.0:
            raise DomainError("profile must vanish at both tails")
        if any(a == b for a, b in zip(vals, vals[1:])):
            raise DomainError("adjacent values must differ (use Profile.normalized)")

    @classmethod
    def normalized(cls, breakpoints: Sequence[float], values: Sequence[float],
                   tol: float = 0.0) -> "Profile":
        """Build a profile, dropping empty intervals and merging equal states."""
        bp = [float(x) for x in breakpoints]
        vals = [float(v) for v in values]
        if len(vals) != len(bp) + 1:
            raise DomainError("need exactly one more value than breakpoints")

        out_bp: list[float] = []
        out_vals: list[float] = [vals[0]]
        for x, v in zip(bp, vals[1:]):
            if out_bp and x - out_bp[-1] <= tol:
                # interval of zero length: the new value replaces the old one
                out_bp.pop()
                out_vals.pop()
            if abs(v - out_vals[-1]) <= tol:
                continue
            out_bp.append(x)
            out_vals.append(v)
        # a zero-length cleanup can leave equal neighbours behind
        bp2: list[float] = []
        vals2 = [out_vals[0]]
        for x, v in zip(out_bp, out_vals[1:]):
            if abs(v - vals2[-1]) <= tol:
                continue
            bp2.append(x)
            vals2.append(v)
        return cls(tuple(bp2), tuple(vals2))

    @classmethod
    def zero(cls) -> "Profile":
        return cls((), (0.0,))

    @classmethod
    def box(cls, a: float, b: float, value: float = 1.0) -> "Profile":
        return cls((a, b), (0.0, value, 0.0))

    @property
    def is_zero(self) -> bool:
        return not self.breakpoints

    @property
    def support(self) -> tuple[float, float]:
        if self.is_zero:
            return (0.0, 0.0)
        return (self.breakpoints[0], self.breakpoints[-1])

    def __call__(self, x):
        """Evaluate; at a breakpoint the left value is returned."""
        idx = np.searchsorted(np.asarray(self.breakpoints), x, side="left")
        return np.asarray(self.values)[idx]

    def cumulative(self, x):
        """Return ``int_{-inf}^x u``; exact since the primitive is piecewise linear."""
        if self.is_zero:
            return np.zeros_like(np.asarray(x, dtype=float))
        bp = np.asarray(self.breakpoints)
        inner = np.asarray(self.values[1:-1])
        knots = np.concatenate([[0.0], np.cumsum(inner * np.diff(bp))])
        return np.interp(x, bp, knots)

    def integrate(self, a: float, b: float) -> float:
        return float(self.cumulative(b) - self.cumulative(a))

    def mass(self) -> float:
        return self.integrate(*self.support)


def l1_distance(bp_a, vals_a, bp_b, vals_b) -> float:
    """Exact L1 distance between two piecewise-constant functions.

    Each function is given by increasing breakpoints and one more value than
    breakpoints (tails included).  Tails must agree for the result to be finite.
    """
    bp_a = np.asarray(bp_a, dtype=float)
    bp_b = np.asarray(bp_b, dtype=float)
    vals_a = np.asarray(vals_a, dtype=float)
    vals_b = np.asarray(vals_b, dtype=float)
    if vals_a[0] != vals_b[0] or vals_a[-1] != vals_b[-1]:
        return math.inf
    knots = np.union1d(bp_a, bp_b)
    if knots.size < 2:
        return 0.0
    mids = 0.5 * (knots[1:] + knots[:-1])
    fa = vals_a[np.searchsorted(bp_a, mids, side="right")]
    fb = vals_b[np.searchsorted(bp_b, mids, side="right")]
    return float(np.sum(np.abs(fa - fb) * np.diff(knots)))

# }}}


# {{{ fronts, policy, events

class Wave(NamedTuple):
    """Birth descriptor of a front produced by a Riemann resolution."""

    u_l: float
    u_r: float
    sigma: float


@dataclass(frozen=True)
class Policy:
    """Treatment of increasing jumps.

    ``increasing="keep"`` keeps them as anti-entropic fronts; ``"rarefy"``
    splits them into ``ceil(jump / delta)`` equal upward fronts.
    """

    increasing: str = "keep"
    delta: float | None = None
    tie_break: str = "left-to-right"

    def __post_init__(self):
        if self.increasing not in ("keep", "rarefy", "reversed", "custom"):
            raise DomainError(f"unknown increasing-jump treatment {self.increasing!r}")
        if self.increasing == "rarefy":
            if self.delta is None or not self.delta > 0:
                raise DomainError("rarefy policy needs delta > 0")

    @classmethod
    def keep(cls) -> "Policy":
        return cls("keep")

    @classmethod
    def rarefy(cls, delta: float) -> "Policy":
        return cls("rarefy", float(delta))

    def describe(self) -> dict:
        return {"increasing": self.increasing, "delta": self.delta,
                "tie_break": self.tie_break}


@dataclass(frozen=True)
class Front:
    id: int
    t_birth: float
    t_death: float
    x_birth: float
    u_l: float
    u_r: float
    sigma: float
    cls: str

    def __post_init__(self):
        if self.u_l == self.u_r:
            raise DomainError(f"front {self.id} has equal states")
        if self.sigma != 0.5 * (self.u_l + self.u_r):
            raise DomainError(f"front {self.id} violates Rankine-Hugoniot")
        expected = ENTROPIC if self.u_l > self.u_r else ANTI_ENTROPIC
        if self.cls != expected:
            raise DomainError(f"front {self.id} misclassified")
        if not self.t_birth < self.t_death:
            raise DomainError(f"front {self.id} has empty lifetime")

    @property
    def is_entropic(self) -> bool:
        return self.cls == ENTROPIC

    @property
    def jump(self) -> float:
        return abs(self.u_l - self.u_r)

    @property
    def duration(self) -> float:
        return self.t_death - self.t_birth

    def position(self, t):
        return self.x_birth + self.sigma * (t - self.t_birth)

    @property
    def x_death(self) -> float:
        return self.position(self.t_death)


@dataclass(frozen=True)
class Event:
    time: float
    position: float
    incoming: tuple[int, ...]
    outgoing: tuple[int, ...]


@dataclass(frozen=True)
class Slab:
    """Fronts alive on ``[t0, t1]`` ordered in ``x``, with the region states."""

    t0: float
    t1: float
    front_ids: tuple[int, ...]
    states: np.ndarray
    x_birth: np.ndarray
    t_birth: np.ndarray
    sigma: np.ndarray

    def positions(self, t):
        return self.x_birth + self.sigma * (t - self.t_birth)


def front_class(u_l: float, u_r: float) -> str:
    return ENTROPIC if u_l > u_r else ANTI_ENTROPIC

# }}}


# {{{ solution container

@dataclass(frozen=True)
class FrontSolution:
    """Full event history of a front-tracking solution on ``[0, horizon]``.

    The object is immutable; :attr:`slabs` caches the ordered front lists
    between consecutive event times and is what all evaluators use.
    """

    initial: Profile
    horizon: float
    fronts: tuple[Front, ...]
    events: tuple[Event, ...] = ()
    policy: Policy = field(default_factory=Policy)
    slabs: tuple[Slab, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")
        object.__setattr__(self, "fronts", tuple(self.fronts))
        object.__setattr__(self, "events", tuple(self.events))
        ids = [f.id for f in self.fronts]
        if len(set(ids)) != len(ids):
            raise DomainError("front ids must be unique")
        object.__setattr__(self, "slabs", self._build_slabs())
        self._check_events()

    def _build_slabs(self) -> tuple[Slab, ...]:
        T = self.horizon
        times = {0.0, T}
        for f in self.fronts:
            if f.t_birth < 0 or f.t_death > T:
                raise DomainError(f"front {f.id} lives outside [0, T]")
            times.add(f.t_birth)
            times.add(f.t_death)
        times = sorted(times)

        slabs = []
        for t0, t1 in zip(times, times[1:]):
            alive = [f for f in self.fronts if f.t_birth <= t0 and f.t_death >= t1]
            tm = 0.5 * (t0 + t1)
            alive.sort(key=lambda f: f.position(tm))
            states = [0.0]
            for f in alive:
                if abs(f.u_l - states[-1]) > STATE_TOL:
                    raise DomainError(
                        f"inconsistent states at front {f.id} on [{t0}, {t1}]")
                states.append(f.u_r)
            if abs(states[-1]) > STATE_TOL:
                raise DomainError(f"nonzero right tail on [{t0}, {t1}]")
            pos = [f.position(tm) for f in alive]
            if any(b <= a for a, b in zip(pos, pos[1:])):
                raise DomainError(f"fronts cross inside [{t0}, {t1}]")
            slabs.append(Slab(
                t0, t1, tuple(f.id for f in alive), np.asarray(states),
                np.asarray([f.x_birth for f in alive], dtype=float),
                np.asarray([f.t_birth for f in alive], dtype=float),
                np.asarray([f.sigma for f in alive], dtype=float)))
        return tuple(slabs)

    def _check_events(self):
        by_id = self.front_map
        for ev in self.events:
            inc = [by_id[i] for i in ev.incoming]
            out = [by_id[i] for i in ev.outgoing]
            if inc and out:
                if (abs(inc[0].u_l - out[0].u_l) > STATE_TOL
                        or abs(inc[-1].u_r - out[-1].u_r) > STATE_TOL):
                    raise DomainError(f"event at t={ev.time} breaks outer states")
            elif inc:
                if abs(inc[0].u_l - inc[-1].u_r) > STATE_TOL:
                    raise DomainError(f"annihilation at t={ev.time} with unequal states")
            elif out:
                if abs(out[0].u_l - out[-1].u_r) > STATE_TOL:
                    raise DomainError(f"creation at t={ev.time} with unequal states")

    # -- lookup helpers ---------------------------------------------------

    @property
    def front_map(self) -> dict[int, Front]:
        return {f.id: f for f in self.fronts}

    @property
    def event_times(self) -> list[float]:
        return sorted({ev.time for ev in self.events})

    def slab_index(self, t: float) -> int:
        if not (0.0 <= t <= self.horizon):
            raise DomainError(f"time {t} outside [0, {self.horizon}]")
        starts = [s.t0 for s in self.slabs]
        return min(bisect.bisect_right(starts, t) - 1, len(self.slabs) - 1)

    def slab_at(self, t: float) -> Slab:
        return self.slabs[self.slab_index(t)]

    def front_positions(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Return (positions, states) of the configuration valid at time ``t``."""
        slab = self.slab_at(t)
        return slab.positions(t), slab.states

    def evaluate(self, t: float, x):
        """State at ``(t, x)``; on a front the left trace is returned."""
        pos, states = self.front_positions(t)
        return states[np.searchsorted(pos, x, side="left")]

    def right_trace(self, t: float, x):
        pos, states = self.front_positions(t)
        return states[np.searchsorted(pos, x, side="right")]

    def profile_at(self, t: float) -> Profile:
        pos, states = self.front_positions(t)
        return Profile.normalized(pos, states)

    def cumulative(self, t: float, x):
        """``int_{-inf}^x u(t, y) dy``, exact."""
        pos, states = self.front_positions(t)
        if pos.size == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        knots = np.concatenate([[0.0], np.cumsum(states[1:-1] * np.diff(pos))])
        return np.interp(x, pos, knots)

    def mass(self, t: float) -> float:
        pos, states = self.front_positions(t)
        if pos.size == 0:
            return 0.0
        return float(np.sum(states[1:-1] * np.diff(pos)))

    @property
    def is_constant(self) -> bool:
        return not self.fronts

    def spatial_hull(self) -> tuple[float, float]:
        """Smallest interval containing every front over the whole horizon."""
        if not self.fronts:
            return self.initial.support
        lo = min(min(f.x_birth, f.x_death) for f in self.fronts)
        hi = max(max(f.x_birth, f.x_death) for f in self.fronts)
        return (lo, hi)

# }}}


# {{{ Riemann problems and front tracking

def riemann_resolve(u_l: float, u_r: float, policy: Policy) -> list[Wave]:
    """Resolve the jump ``(u_l, u_r)`` into fronts ordered by increasing speed."""
    u_l = _check_state(u_l, "left state")
    u_r = _check_state(u_r, "right state")
    if u_l == u_r:
        return []
    if u_l > u_r or policy.increasing != "rarefy":
        return [Wave(u_l, u_r, 0.5 * (u_l + u_r))]

    n = max(1, math.ceil((u_r - u_l) / policy.delta - 1e-9))
    levels = [u_l + (u_r - u_l) * k / n for k in range(n + 1)]
    levels[-1] = u_r
    return [Wave(a, b, 0.5 * (a + b)) for a, b in zip(levels, levels[1:])]


@dataclass
class _Live:
    id: int
    t_birth: float
    x_birth: float
    u_l: float
    u_r: float
    sigma: float

    def pos(self, t: float) -> float:
        return self.x_birth + self.sigma * (t - self.t_birth)


def evolve(initial: Profile, T: float, policy: Policy | None = None,
           max_events: int = 100_000, guard: float = GUARD) -> FrontSolution:
    """Track fronts of ``initial`` up to time ``T``.

    Collisions are detected between neighbours only; a chain of fronts meeting
    at one point is resolved as a single Riemann problem of its outer states.
    """
    if policy is None:
        policy = Policy.keep()
    if not T > 0:
        raise DomainError("horizon must be positive")

    next_id = 0
    records: dict[int, tuple[_Live, float]] = {}
    active: list[_Live] = []

    def spawn(t, x, waves):
        nonlocal next_id
        born = []
        for w in waves:
            live = _Live(next_id, t, x, w.u_l, w.u_r, w.sigma)
            next_id += 1
            born.append(live)
        return born

    for x, (a, b) in zip(initial.breakpoints, zip(initial.values, initial.values[1:])):
        active.extend(spawn(0.0, x, riemann_resolve(a, b, policy)))

    events: list[Event] = []
    t = 0.0
    while len(active) > 1:
        hit = []
        for a, b in zip(active, active[1:]):
            if a.sigma > b.sigma:
                gap = b.pos(t) - a.pos(t)
                hit.append(t if gap <= guard else t + gap / (a.sigma - b.sigma))
            else:
                hit.append(math.inf)
        t_next = min(hit)
        if t_next >= T:
            break
        if len(events) >= max_events:
            raise ResourceError(f"event cascade exceeded {max_events} events")

        # group neighbouring pairs that meet at t_next into clusters
        clusters: list[list[int]] = []
        for i, tc in enumerate(hit):
            if tc <= t_next + guard:
                if clusters and clusters[-1][-1] == i:
                    clusters[-1].append(i + 1)
                else:
                    clusters.append([i, i + 1])

        t = t_next
        new_active: list[_Live] = []
        cursor = 0
        for members in clusters:
            new_active.extend(active[cursor:members[0]])
            group = [active[i] for i in members]
            x_c = sum(g.pos(t) for g in group) / len(group)
            born = spawn(t, x_c, riemann_resolve(group[0].u_l, group[-1].u_r, policy))
            for g in group:
                records[g.id] = (g, t)
            events.append(Event(t, x_c, tuple(g.id for g in group),
                                tuple(b.id for b in born)))
            new_active.extend(born)
            cursor = members[-1] + 1
        new_active.extend(active[cursor:])
        active = new_active

    for live in active:
        records[live.id] = (live, T)

    fronts = []
    for fid in sorted(records):
        live, t_death = records[fid]
        fronts.append(Front(fid, live.t_birth, t_death, live.x_birth, live.u_l,
                            live.u_r, live.sigma, front_class(live.u_l, live.u_r)))
    logger.debug("evolve: %d fronts, %d events", len(fronts), len(events))
    return FrontSolution(initial, float(T), tuple(fronts), tuple(events), policy)


def evaluate(sol: FrontSolution, t: float, x):
    return sol.evaluate(t, x)


def mass(sol: FrontSolution, t: float) -> float:
    return sol.mass(t)

# }}}


# {{{ Oleinik diagnostic

@dataclass(frozen=True)
class OleinikReport:
    """Largest forward difference quotient of ``u(t, .)``.

    ``value`` is ``inf`` (and ``flagged`` set) when a genuine increasing jump
    is present.  Upward fronts of a rarefy policy are read as a discretised
    fan: their slope is measured between the midstates of consecutive upward
    fronts.
    """

    t: float
    value: float
    flagged: bool
    n_upward: int


def oleinik_report(sol: FrontSolution, t: float) -> OleinikReport:
    if not t > 0:
        raise DomainError("the one-sided estimate needs t > 0")
    slab = sol.slab_at(t)
    pos = slab.positions(t)
    fmap = sol.front_map
    fronts = [fmap[i] for i in slab.front_ids]
    up = [k for k, f in enumerate(fronts) if not f.is_entropic]

    delta = sol.policy.delta if sol.policy.increasing == "rarefy" else None
    if up and (delta is None or any(fronts[k].jump > delta * (1 + 1e-9) for k in up)):
        return OleinikReport(t, math.inf, True, len(up))

    value = 0.0
    for k, k_next in zip(up, up[1:]):
        if k_next != k + 1:
            continue
        mid_a = 0.5 * (fronts[k].u_l + fronts[k].u_r)
        mid_b = 0.5 * (fronts[k_next].u_l + fronts[k_next].u_r)
        gap = pos[k_next] - pos[k]
        if gap > 0:
            value = max(value, (mid_b - mid_a) / gap)
    return OleinikReport(t, value, False, len(up))

# }}}
