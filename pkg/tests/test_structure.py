import numpy as np
import pytest

from burgerslab import fixtures as F
from burgerslab.errors import DomainError, UsageError
from burgerslab.lagrangian import build_hypograph_rep
from burgerslab.structure import (anchor_grid, build_J_minus, build_J_plus,
                                  concentration_report, curve_from_front, curve_from_line,
                                  envelope_curve, front_set_distance, no_crossing_sample,
                                  reversal_report, separation_check, time_reversal,
                                  trace_check)


@pytest.fixture(scope="module")
def merging_families(merging_reps):
    sol, h, _ = merging_reps
    fam_m = build_J_minus(h, 20, 20)
    fam_p = build_J_plus(build_hypograph_rep(time_reversal(sol), 200, 200), 20, 20)
    return sol, fam_m, fam_p


# {{{ envelopes

def test_envelope_tracks_single_front(shock_reps):
    _, h, _ = shock_reps
    c = envelope_curve(h, 0.0, 0.0)
    assert not c.empty
    assert np.max(np.abs(c(c.times) - c.times / 2)) <= 1 / 200 + 1e-12
    assert c.is_lipschitz


def test_envelope_empty_case(shock_reps):
    _, h, _ = shock_reps
    c = envelope_curve(h, 0.5, -5.0)
    assert c.empty
    assert np.all(c.values == -5.0)


def test_envelope_anchor_time_domain(shock_reps):
    _, h, _ = shock_reps
    with pytest.raises(DomainError):
        envelope_curve(h, 1.0, 0.0)


def test_anchor_grid_shape():
    ts, xs = anchor_grid(F.merging(), 20, 20)
    assert len(ts) == 20 and len(xs) == 20
    assert ts[0] == 0.0
    assert np.all(np.diff(xs) > 0)


def test_merging_curves_join(merging_families):
    sol, fam, _ = merging_families
    fmap = sol.front_map
    before = [fam.following(fmap[1], 0.02), fam.following(fmap[2], 0.02)]
    assert all(len(b) == 1 for b in before)
    merged = set(fam.following(fmap[3], 0.02))
    # the curves of both incoming fronts continue on the merged front
    assert set(before[0]) <= merged and set(before[1]) <= merged
    assert all(np.max(np.abs(c.slopes)) <= 1 + 1e-12 for c in fam.curves if c.times.size > 1)

# }}}


# {{{ concentration

def test_concentration_merging(merging_families):
    sol, fam_m, fam_p = merging_families
    rep = concentration_report(sol, fam_m, [0.01, 0.05], fam_p, grid_n=20)
    assert rep.fraction_total(0.01) >= 0.99
    assert all(r.fraction_minus >= 0.99 and r.fraction_plus >= 0.99 for r in rep.rows)
    assert set(rep.csv_rows()[0]) == {"epsilon", "grid_n", "fraction_minus", "fraction_plus"}


def test_concentration_refinement_monotone(merging_reps):
    sol, h, _ = merging_reps
    off = []
    for n in (1, 2, 5, 10):
        off.append(concentration_report(sol, build_J_minus(h, n, n), [0.01]).rows[0].off_tube_minus)
    assert all(a >= b for a, b in zip(off, off[1:]))
    assert off[0] > 0 and off[-1] == 0.0


def test_anti_plus_side_via_reversal():
    sol = F.anti()
    fam_m = build_J_minus(build_hypograph_rep(sol, 200, 200), 20, 20)
    fam_p = build_J_plus(build_hypograph_rep(time_reversal(sol), 200, 200), 20, 20)
    row = concentration_report(sol, fam_m, [0.01], fam_p, grid_n=20).rows[0]
    assert row.fraction_plus == 1.0

# }}}


# {{{ reversal

@pytest.mark.parametrize("name", sorted(F.FIXTURES))
def test_reversal_exact(name):
    sol = F.FIXTURES[name]()
    rep = reversal_report(sol)
    assert rep.passed
    assert rep.mu_plus == pytest.approx(rep.reversed_mu_minus, abs=1e-12)
    assert front_set_distance(sol, time_reversal(time_reversal(sol))) <= 1e-12


def test_reversal_swaps_classes():
    rev = time_reversal(F.mixed())
    assert sorted((f.id, f.cls) for f in rev.fronts) == [(0, "entropic"), (1, "anti-entropic")]

# }}}


# {{{ separation and crossing

def test_separation_single_front(shock_reps):
    _, h, e = shock_reps
    for anchor in [(0.0, 0.0), (0.3, 0.25)]:
        rep = separation_check(h, e, envelope_curve(h, *anchor), *anchor)
        assert rep.hyp_violation == 0.0 and rep.epi_violation == 0.0


def test_separation_merging(merging_reps):
    _, h, e = merging_reps
    for anchor in [(0.0, 0.0), (0.0, 0.5), (1.0, 1.0)]:
        rep = separation_check(h, e, envelope_curve(h, *anchor), *anchor)
        assert rep.hyp_violation == 0.0
        assert rep.epi_violation <= 2 / 200


def test_separation_anchor_mismatch(shock_reps):
    _, h, e = shock_reps
    with pytest.raises(UsageError):
        separation_check(h, e, envelope_curve(h, 0.0, 0.0), 0.3, 0.2)


@pytest.mark.parametrize("fixture", ["shock_reps", "merging_reps", "step_reps"])
def test_no_crossing(fixture, request):
    _, h, e = request.getfixturevalue(fixture)
    rep = no_crossing_sample(h, e, 10_000)
    assert rep.pairs == 10_000
    assert rep.strict_violations == 0

# }}}


# {{{ traces

def test_trace_zero_on_front():
    sol = F.shock()
    c = curve_from_front(sol.front_map[1])
    for side in ("left", "right"):
        assert max(trace_check(sol, c, side, [0.5, 0.1, 0.01]).values) == 0.0


def test_trace_linear_in_fan():
    fan = F.fan(0.001)
    first = min((f for f in fan.fronts if not f.is_entropic), key=lambda f: f.sigma)
    line = curve_from_line(0.5, 2.0, first.position(0.5), first.sigma)
    rep = trace_check(fan, line, "right", [0.2, 0.1, 0.05, 0.025])
    assert abs(rep.slope - 1.0) <= 0.2


def test_trace_errors():
    sol = F.shock()
    with pytest.raises(UsageError):
        trace_check(sol, curve_from_front(sol.front_map[1]), "up", [0.1])
    with pytest.raises(DomainError):
        trace_check(sol, curve_from_line(0.0, 2.0, 0.0, 0.5), "left", [0.1])

# }}}


def test_no_crossing_detects_corrupted_ensemble(shock_reps):
    import dataclasses
    _, h, e = shock_reps
    slowed = dataclasses.replace(e, v0=0.5 * e.v0)
    assert no_crossing_sample(h, slowed, 10_000).strict_violations > 0
