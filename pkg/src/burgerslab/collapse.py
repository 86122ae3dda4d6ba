"""Transport-collapse splitting for Burgers on a particle ensemble.

Each step moves every particle freely (``x += v tau``) and then compacts
each column of width ``dx`` downwards: particles keep their relative order
in ``v`` and are restacked from ``v = 0`` with height ``weight / dx`` each.
The column heights are the approximate solution.

Particles start on a lattice (cell centres), so each level row holds one
particle per column.  A particle whose level changes at a compaction is
moved inside its column to the lattice position of its new row; without
this, rows lose their spacing behind shocks and the column counts become
noisy.  Unmoved particles are never touched, which keeps free transport
exact on rarefactions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .solution import FrontSolution, Profile, l1_distance

#: Particles this close to a column edge (in column units) go right; lattice
#: rows land exactly on edges at rational times and rounding must not decide.
EDGE_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class CollapseResult:
    tau: float
    dx: float
    dv: float
    T: float
    origin: float
    times: np.ndarray
    heights: np.ndarray      # (n_steps + 1, n_columns)
    x0: np.ndarray
    v0: np.ndarray
    weight: np.ndarray
    x_final: np.ndarray
    v_final: np.ndarray
    jump_pid: np.ndarray
    jump_t: np.ndarray
    jump_x: np.ndarray
    v_before: np.ndarray
    v_after: np.ndarray

    @property
    def n_columns(self) -> int:
        return self.heights.shape[1]

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.n_columns + 1)

    def slice_at(self, step: int) -> tuple[np.ndarray, np.ndarray]:
        """Column edges and heights after ``step`` steps."""
        return self.edges, self.heights[step]

    def profile(self, step: int) -> Profile:
        edges, h = self.slice_at(step)
        return Profile.normalized(edges, [0.0, *np.round(h, 12), 0.0])

    def l1_error(self, ref: FrontSolution, step: int | None = None) -> float:
        """``L1`` distance to ``ref`` at the time of ``step`` (default: last)."""
        if step is None:
            step = len(self.times) - 1
        t = float(self.times[step])
        edges, h = self.slice_at(step)
        pos, states = ref.front_positions(min(t, ref.horizon))
        return l1_distance(edges, np.concatenate([[0.0], h, [0.0]]), pos, states)

    @property
    def mass_series(self) -> np.ndarray:
        return self.heights.sum(axis=1) * self.dx


def transport_collapse(initial: Profile, tau: float, dx: float, dv: float, T: float,
                       record_jumps: bool = True, cfl: float = 1.0) -> CollapseResult:
    """Run the scheme up to ``T`` (rounded to a whole number of steps)."""
    for name, val in (("tau", tau), ("dx", dx), ("dv", dv), ("T", T)):
        if not val > 0:
            raise DomainError(f"{name} must be positive")
    if tau > cfl * dx:
        warnings.warn(f"tau={tau} exceeds {cfl} * dx={dx}; particles may skip columns",
                      RuntimeWarning, stacklevel=2)

    n_steps = max(1, int(round(T / tau)))
    lo, hi = initial.support
    if hi <= lo:
        lo, hi = -dx, dx
    n_init = math.ceil((hi - lo) / dx - 1e-9)
    n_cols = n_init + math.ceil(n_steps * tau / dx) + 2
    xc = lo + (np.arange(n_init) + 0.5) * dx
    vc = (np.arange(math.ceil(1.0 / dv - 1e-9)) + 0.5) * dv
    X, V = np.meshgrid(xc, vc, indexing="ij")
    X, V = X.ravel(), V.ravel()
    keep = V < initial(X)
    x, v = X[keep].copy(), V[keep].copy()
    x0, v0 = x.copy(), v.copy()
    n = x.size
    w = np.full(n, dx * dv)
    h_unit = dv  # weight / dx

    heights = np.zeros((n_steps + 1, n_cols))
    col0 = np.floor((x - lo) / dx).astype(np.int64)
    heights[0] = np.bincount(col0, minlength=n_cols)[:n_cols] * h_unit

    rec = {"pid": [], "t": [], "x": [], "vb": [], "va": []}
    pid = np.arange(n)
    for step in range(1, n_steps + 1):
        t = step * tau
        x = x + v * tau
        col = np.floor((x - lo) / dx + EDGE_SNAP).astype(np.int64)
        order = np.lexsort((v, col))
        c_sorted = col[order]
        starts = np.searchsorted(c_sorted, c_sorted, side="left")
        rank = np.arange(n) - starts
        v_new = np.empty(n)
        v_new[order] = (rank + 0.5) * h_unit
        changed = v_new != v
        # a moved particle joins the lattice that its new level row has
        # carried since t = 0, so every row keeps one particle per column
        phase = np.mod(0.5 + v_new[changed] * t / dx, 1.0)
        phase[phase > 1.0 - EDGE_SNAP] = 0.0
        x_moved = lo + dx * (col[changed] + phase)
        if record_jumps and np.any(changed):
            rec["pid"].append(pid[changed])
            rec["t"].append(np.full(int(changed.sum()), t))
            rec["x"].append(x[changed])
            rec["vb"].append(v[changed])
            rec["va"].append(v_new[changed])
        x[changed] = x_moved
        v = v_new
        heights[step] = np.bincount(col, minlength=n_cols)[:n_cols] * h_unit

    def cat(key, dtype=float):
        return np.concatenate(rec[key]).astype(dtype) if rec[key] else np.zeros(0, dtype)

    jp = cat("pid", np.int64)
    jt = cat("t")
    order = np.lexsort((jt, jp))
    return CollapseResult(tau, dx, dv, n_steps * tau, lo, np.arange(n_steps + 1) * tau,
                          heights, x0, v0, w, x, v, jp[order], jt[order],
                          cat("x")[order], cat("vb")[order], cat("va")[order])
