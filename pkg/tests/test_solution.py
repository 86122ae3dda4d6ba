import math

import numpy as np
import pytest

from burgerslab import fixtures as F
from burgerslab.errors import DomainError, ResourceError
from burgerslab.solution import (ANTI_ENTROPIC, ENTROPIC, Front, Policy,
                                 Profile, evolve, l1_distance, oleinik_report,
                                 riemann_resolve)


def lax_oleinik(profile, t, xs, n=200_001):
    """Entropy solution by brute-force minimisation of the Hopf-Lax functional."""
    lo, hi = profile.support
    y = np.linspace(lo - 1.0, hi + 1.0 + t, n)
    U0 = profile.cumulative(y)
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        j = np.argmin(U0 + (x - y) ** 2 / (2 * t))
        out[i] = (x - y[j]) / t
    return np.clip(out, 0.0, 1.0)


# {{{ profiles

def test_profile_validation():
    with pytest.raises(DomainError):
        Profile((0.0, 1.0), (0.0, 1.2, 0.0))
    with pytest.raises(DomainError):
        Profile((1.0, 0.0), (0.0, 0.5, 0.0))
    with pytest.raises(DomainError):
        Profile((0.0,), (0.5, 0.0))
    with pytest.raises(DomainError):
        Profile((0.0, 1.0), (0.0, 0.5))


def test_profile_normalized_merges():
    p = Profile.normalized([0, 1, 1, 2], [0, 0.5, 0.7, 0.7, 0])
    assert p.breakpoints == (0.0, 1.0, 2.0)
    assert p.values == (0.0, 0.5, 0.7, 0.0)
    assert p.mass() == pytest.approx(1.2)


def test_l1_distance_symmetric():
    d = l1_distance([0.0, 1.0], [0, 1, 0], [0.5, 1.5], [0, 0.5, 0])
    assert d == pytest.approx(0.5 * 1.0 + 0.5 * 0.5 + 0.5 * 0.5)
    assert d == pytest.approx(l1_distance([0.5, 1.5], [0, 0.5, 0], [0.0, 1.0], [0, 1, 0]))

# }}}


# {{{ riemann

def test_riemann_entropic():
    waves = riemann_resolve(1.0, 0.0, Policy.keep())
    assert len(waves) == 1
    assert waves[0].sigma == 0.5


def test_riemann_constant():
    assert riemann_resolve(0.4, 0.4, Policy.rarefy(0.1)) == []


def test_riemann_rarefy_quarter():
    waves = riemann_resolve(0.0, 1.0, Policy.rarefy(0.25))
    assert [w.sigma for w in waves] == [0.125, 0.375, 0.625, 0.875]
    assert all(w.u_r - w.u_l == pytest.approx(0.25) for w in waves)


def test_riemann_rarefy_uneven_split():
    waves = riemann_resolve(0.1, 0.8, Policy.rarefy(0.3))
    assert len(waves) == math.ceil(0.7 / 0.3)
    assert waves[-1].u_r == 0.8
    assert max(w.u_r - w.u_l for w in waves) <= 0.3 + 1e-15


def test_riemann_domain():
    with pytest.raises(DomainError):
        riemann_resolve(-0.1, 0.5, Policy.keep())
    with pytest.raises(DomainError):
        Policy.rarefy(0.0)

# }}}


# {{{ evolve

def test_merging_event():
    sol = F.merging()
    assert len(sol.events) == 1
    ev = sol.events[0]
    assert (ev.time, ev.position) == (2.0, 1.5)
    assert sol.evaluate(3.0, 1.9) == 1.0
    assert sol.mass(0.0) == sol.mass(3.0) == 1.5
    merged = sol.front_map[ev.outgoing[0]]
    assert (merged.u_l, merged.u_r, merged.sigma) == (1.0, 0.0, 0.5)


def test_front_classes():
    sol = F.mixed()
    classes = sorted(f.cls for f in sol.fronts)
    assert classes == [ANTI_ENTROPIC, ENTROPIC]


def test_fan_front_count():
    sol = F.fan(0.25)
    upward = [f for f in sol.fronts if not f.is_entropic]
    assert len(upward) == 4
    assert [f.sigma for f in upward] == [0.125, 0.375, 0.625, 0.875]


def test_cascade_bound():
    with pytest.raises(ResourceError):
        evolve(Profile.box(-1, 0), 5.0, Policy.rarefy(0.01), max_events=3)


def test_evolve_domain():
    with pytest.raises(DomainError):
        evolve(Profile.box(0, 1), 0.0, Policy.keep())


def test_right_and_left_traces():
    sol = F.shock()
    assert sol.evaluate(0.5, 0.25) == 1.0
    assert sol.right_trace(0.5, 0.25) == 0.0


def test_event_consistency_check():
    f = Front(0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.5, ENTROPIC)
    with pytest.raises(DomainError):
        Front(0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.4, ENTROPIC)
    with pytest.raises(DomainError):
        Front(0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, ENTROPIC)
    assert f.x_death == 0.5


def test_entropy_solution_against_lax_oleinik():
    prof = Profile((-1.0, 0.0, 1.0), (0.0, 1.0, 0.25, 0.0))
    sol = evolve(prof, 1.5, Policy.rarefy(1e-3))
    xs = np.linspace(-1.5, 2.5, 801)
    exact = lax_oleinik(prof, 1.5, xs)
    approx = sol.evaluate(1.5, xs)
    err = np.mean(np.abs(exact - approx)) * (xs[-1] - xs[0])
    assert err < 5e-3


def test_oleinik_report():
    for t in (0.25, 0.5, 1.0):
        rep = oleinik_report(F.step(), t)
        assert not rep.flagged
        assert rep.value <= (1 + 1e-9) / t
    assert oleinik_report(F.mixed(), 0.5).flagged
    with pytest.raises(DomainError):
        oleinik_report(F.step(), 0.0)

# }}}
