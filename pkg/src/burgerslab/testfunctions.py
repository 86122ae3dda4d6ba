"""Compactly supported polynomial test functions and exact cell quadrature.

The bump profile is ``(1 - s^2)^3`` on ``|s| < 1``: a single polynomial piece
that is C^2 across the support boundary.  Because every front is a straight
segment, integrals of these bumps over the polygonal regions where a
piecewise-constant solution is constant reduce to Gauss-Legendre rules on
time pieces with polynomial integrands, which are exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GAUSS_CACHE:
        _GAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GAUSS_CACHE[n]


def gauss_nodes(a: float, b: float, n: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss rule on ``[a, b]``."""
    s, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * s, half * w


@dataclass(frozen=True)
class Bump:
    """One-dimensional bump ``(1 - ((x - center)/half_width)^2)^3``."""

    center: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.half_width, self.center + self.half_width)

    def _s(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.half_width

    def __call__(self, x):
        s = self._s(x)
        inside = np.abs(s) < 1
        return np.where(inside, (1 - s * s) ** 3, 0.0)

    def derivative(self, x):
        s = self._s(x)
        inside = np.abs(s) < 1
        return np.where(inside, -6 * s * (1 - s * s) ** 2, 0.0) / self.half_width

    def antiderivative(self, x):
        """``int_{-inf}^x`` of the bump."""
        s = np.clip(self._s(x), -1.0, 1.0)
        prim = s - s**3 + 0.6 * s**5 - s**7 / 7 + 16.0 / 35.0
        return prim * self.half_width

    @property
    def integral(self) -> float:
        return 32.0 / 35.0 * self.half_width


@dataclass(frozen=True)
class TestFunction:
    """Space-time test function ``alpha(t) * beta(x - drift * (t - t_ref))``.

    ``alpha=None`` means ``alpha == 1`` over the whole horizon; such functions
    do not vanish at ``t = 0`` or ``t = T`` and can only be paired with the
    time-boundary terms included (see ``weak_residual``).
    """

    __test__ = False  # not a pytest class

    alpha: Bump | None
    beta: Bump
    drift: float = 0.0
    t_ref: float = 0.0

    @classmethod
    def tensor(cls, t_c: float, h_t: float, x_c: float, h_x: float) -> "TestFunction":
        return cls(Bump(t_c, h_t), Bump(x_c, h_x))

    @classmethod
    def moving_window(cls, x_c: float, h_x: float, drift: float) -> "TestFunction":
        return cls(None, Bump(x_c, h_x), drift, 0.0)

    @property
    def time_flat(self) -> bool:
        return self.alpha is None

    def time_support(self, T: float) -> tuple[float, float]:
        if self.alpha is None:
            return (0.0, T)
        lo, hi = self.alpha.support
        return (max(lo, 0.0), min(hi, T))

    def shift(self, t):
        return self.drift * (np.asarray(t, dtype=float) - self.t_ref)

    def x_support(self, t) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.beta.support
        d = self.shift(t)
        return lo + d, hi + d

    def a(self, t):
        if self.alpha is None:
            return np.ones_like(np.asarray(t, dtype=float))
        return self.alpha(t)

    def da(self, t):
        if self.alpha is None:
            return np.zeros_like(np.asarray(t, dtype=float))
        return self.alpha.derivative(t)

    def __call__(self, t, x):
        return self.a(t) * self.beta(np.asarray(x) - self.shift(t))

    def phi_t(self, t, x):
        xi = np.asarray(x) - self.shift(t)
        return self.da(t) * self.beta(xi) - self.drift * self.a(t) * self.beta.derivative(xi)

    def phi_x(self, t, x):
        xi = np.asarray(x) - self.shift(t)
        return self.a(t) * self.beta.derivative(xi)

    # exact x-integrals over [lo, hi] at fixed t (arrays broadcast)

    def int_x(self, t, lo, hi):
        d = self.shift(t)
        return self.a(t) * (self.beta.antiderivative(hi - d) - self.beta.antiderivative(lo - d))

    def int_phi_t(self, t, lo, hi):
        d = self.shift(t)
        B = self.beta.antiderivative(hi - d) - self.beta.antiderivative(lo - d)
        b = self.beta(hi - d) - self.beta(lo - d)
        return self.da(t) * B - self.drift * self.a(t) * b

    def int_phi_x(self, t, lo, hi):
        d = self.shift(t)
        return self.a(t) * (self.beta(hi - d) - self.beta(lo - d))


@dataclass(frozen=True)
class KineticTestFunction:
    """Test function ``phi(t, x) * zeta(v)`` on ``(t, x, v)`` space."""

    __test__ = False

    phi: TestFunction
    zeta: Bump

    @classmethod
    def tensor(cls, t_c, h_t, x_c, h_x, v_c, h_v) -> "KineticTestFunction":
        return cls(TestFunction.tensor(t_c, h_t, x_c, h_x), Bump(v_c, h_v))

    def __call__(self, t, x, v):
        return self.phi(t, x) * self.zeta(v)

    def v_moment(self, lo, hi, weight=None, derivative: bool = False, n: int = 8):
        """``int_lo^hi w(v) zeta(v) dv`` (or ``zeta'``) with a polynomial weight.

        ``weight`` is a callable polynomial of low degree; the rule is exact
        as long as ``deg(weight) <= 2n - 7``.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        s_lo, s_hi = self.zeta.support
        a = np.clip(lo, s_lo, s_hi)
        b = np.clip(hi, s_lo, s_hi)
        nodes, wts = gauss_legendre(n)
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        v = mid[..., None] + half[..., None] * nodes
        f = self.zeta.derivative(v) if derivative else self.zeta(v)
        if weight is not None:
            f = f * weight(v)
        return np.sum(f * wts, axis=-1) * half


def time_breaks(sol, tf: TestFunction, t_lo: float, t_hi: float) -> np.ndarray:
    """Sorted times in ``[t_lo, t_hi]`` where the integrand may lose smoothness.

    These are slab boundaries and the times at which a front line meets an
    edge of the (possibly drifting) x-support of ``tf``.
    """
    cuts = {t_lo, t_hi}
    b_lo, b_hi = tf.beta.support
    for slab in sol.slabs:
        if slab.t1 <= t_lo or slab.t0 >= t_hi:
            continue
        for t in (slab.t0, slab.t1):
            if t_lo < t < t_hi:
                cuts.add(t)
        for edge in (b_lo, b_hi):
            # front: xb + sigma (t - tb);  edge: edge + drift (t - t_ref)
            rel = slab.sigma - tf.drift
            with np.errstate(divide="ignore", invalid="ignore"):
                tc = (edge - tf.drift * tf.t_ref - slab.x_birth + slab.sigma * slab.t_birth) / rel
            tc = tc[np.isfinite(tc)]
            for t in tc[(tc > max(t_lo, slab.t0)) & (tc < min(t_hi, slab.t1))]:
                cuts.add(float(t))
    return np.array(sorted(cuts))


def piecewise_gauss(breaks: np.ndarray, n: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule over consecutive ``breaks``."""
    s, w = gauss_legendre(n)
    a = breaks[:-1]
    b = breaks[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * s).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def dyadic_family(sol, n: int = 25, seed: int = 0,
                  kinetic: bool = True) -> list:
    """Deterministic family of bumps on dyadic rectangles around the fronts.

    Time rectangles are dyadic subintervals of ``[0, T]`` (levels 0-2); space
    rectangles are dyadic subintervals of the spatial hull (levels 1-3); for
    kinetic functions the v-rectangles are dyadic subintervals of ``[0, 1]``.
    Only rectangles met by at least one front are kept.
    """
    T = sol.horizon
    lo, hi = sol.spatial_hull()
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    width = hi - lo
    pad = 0.05 * width
    lo, hi = lo - pad, hi + pad
    width = hi - lo

    def dyadic(a, b, levels):
        out = []
        for j in levels:
            m = 2 ** j
            for k in range(m):
                out.append((a + (b - a) * k / m, a + (b - a) * (k + 1) / m))
        return out

    t_rects = dyadic(0.0, T, (0, 1, 2))
    x_rects = dyadic(lo, hi, (1, 2, 3))
    v_rects = dyadic(0.0, 1.0, (0, 1, 2)) if kinetic else [None]

    def hits(tr, xr):
        for f in sol.fronts:
            t0, t1 = max(f.t_birth, tr[0]), min(f.t_death, tr[1])
            if t1 <= t0:
                continue
            xa, xb = sorted((f.position(t0), f.position(t1)))
            if xb >= xr[0] and xa <= xr[1]:
                return True
        return False

    combos = [(tr, xr, vr) for tr in t_rects for xr in x_rects for vr in v_rects]
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(combos))
    chosen = []
    leftovers = []
    for i in order:
        tr, xr, vr = combos[i]
        (chosen if (not sol.fronts or hits(tr, xr)) else leftovers).append((tr, xr, vr))
    chosen = (chosen + leftovers)[:n]

    out = []
    for tr, xr, vr in chosen:
        phi = TestFunction.tensor(0.5 * (tr[0] + tr[1]), 0.5 * (tr[1] - tr[0]),
                                  0.5 * (xr[0] + xr[1]), 0.5 * (xr[1] - xr[0]))
        if kinetic:
            out.append(KineticTestFunction(phi, Bump(0.5 * (vr[0] + vr[1]),
                                                     0.5 * (vr[1] - vr[0]))))
        else:
            out.append(phi)
    return out
