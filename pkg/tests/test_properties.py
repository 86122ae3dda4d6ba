import numpy as np
from hypothesis import given, settings, strategies as st

from burgerslab.kinetic import (EntropyDescriptor, closed_form_rate, kernel_rate,
                                one_entropy_check, weak_residual)
from burgerslab.solution import Front, Policy, Profile, evolve, front_class
from burgerslab.testfunctions import TestFunction
from burgerslab.structure import front_set_distance, time_reversal

levels = st.integers(1, 8).map(lambda k: k / 8)


@st.composite
def scenarios(draw):
    n = draw(st.integers(1, 4))
    gaps = draw(st.lists(st.integers(1, 8), min_size=n + 1, max_size=n + 1))
    bp = np.cumsum([g / 4 for g in gaps]) - 2.0
    vals = [0.0] + draw(st.lists(levels, min_size=n, max_size=n)) + [0.0]
    policy = draw(st.sampled_from([Policy.keep(), Policy.rarefy(0.25), Policy.rarefy(0.1)]))
    T = draw(st.sampled_from([0.5, 1.0, 2.0]))
    return evolve(Profile.normalized(bp, vals), T, policy)


SETTINGS = settings(max_examples=40, deadline=None)


@SETTINGS
@given(scenarios())
def test_rankine_hugoniot(sol):
    for f in sol.fronts:
        assert f.sigma == 0.5 * (f.u_l + f.u_r)
        assert f.cls == front_class(f.u_l, f.u_r)


@SETTINGS
@given(scenarios())
def test_mass_conserved(sol):
    m0 = sol.mass(0.0)
    for t in np.linspace(0, sol.horizon, 7):
        assert abs(sol.mass(float(t)) - m0) <= 1e-12


@SETTINGS
@given(scenarios())
def test_fronts_ordered_between_events(sol):
    for slab in sol.slabs:
        t = 0.5 * (slab.t0 + slab.t1)
        assert np.all(np.diff(slab.positions(t)) > 0)
        assert slab.states[0] == 0.0 and slab.states[-1] == 0.0


@SETTINGS
@given(scenarios(), st.floats(0.2, 0.8), st.floats(-1.0, 1.0), st.floats(0.2, 1.0))
def test_weak_solution(sol, tc, xc, hx):
    phi = TestFunction.tensor(tc * sol.horizon, 0.19 * sol.horizon, xc, hx)
    assert abs(weak_residual(sol, EntropyDescriptor.linear(), phi)) <= 1e-12


@SETTINGS
@given(scenarios(), st.floats(0.2, 0.8), st.floats(-1.0, 1.0), st.floats(0.2, 1.0))
def test_weak_residual_matches_fronts(sol, tc, xc, hx):
    from burgerslab.kinetic import front_pairing
    eta = EntropyDescriptor.quadratic()
    phi = TestFunction.tensor(tc * sol.horizon, 0.19 * sol.horizon, xc, hx)
    rates = {f.id: closed_form_rate(f, eta) for f in sol.fronts}
    assert abs(weak_residual(sol, eta, phi) - front_pairing(sol, rates, phi)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 2 ** 32 - 1))
def test_kernel_identity(ul, ur, seed):
    if ul == ur:
        return
    f = Front(0, 0.0, 1.0, 0.0, ul, ur, 0.5 * (ul + ur), front_class(ul, ur))
    eta = EntropyDescriptor.random_convex(np.random.default_rng(seed))
    assert abs(closed_form_rate(f, eta) - kernel_rate(f, eta)) <= 1e-8


@SETTINGS
@given(scenarios())
def test_one_entropy_equivalence(sol):
    rep = one_entropy_check(sol)
    assert rep.frontwise_discrepancy == 0.0
    assert rep.equivalence_holds


@SETTINGS
@given(scenarios())
def test_double_reversal(sol):
    assert front_set_distance(sol, time_reversal(time_reversal(sol))) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(scenarios())
def test_lagrangian_invariants(sol):
    from burgerslab.lagrangian import (build_epigraph_rep, build_hypograph_rep,
                                       check_pushforward, lebesgue_time_check,
                                       reflection_error, sign_routing_ok)
    from burgerslab.structure import no_crossing_sample
    N = 64
    h, e = build_hypograph_rep(sol, N, N), build_epigraph_rep(sol, N, N)
    lo, hi = sol.initial.support
    # columns have width (hi - lo) / N, so the bound scales with the support
    bound = 2.0 * max(1.0, hi - lo) / N
    for rep in (h, e):
        assert sign_routing_ok(rep)
        assert reflection_error(rep) <= 1e-12
        assert lebesgue_time_check(rep, sol, 2000).violations == 0
        for t in np.linspace(0, sol.horizon, 5):
            assert check_pushforward(rep, sol, float(t)) <= bound
    assert no_crossing_sample(h, e, 2000).strict_violations == 0
