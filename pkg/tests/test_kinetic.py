import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy.integrate import quad

from burgerslab import fixtures as F
from burgerslab.errors import DegenerateFrontError, DomainError, UsageError
from burgerslab.kinetic import (EntropyDescriptor, bin_measure, closed_form_rate,
                                entropy_dissipation, j_density_estimate, kernel_rate,
                                kinetic_measure, kinetic_residual, kinetic_sign,
                                load_entropy_library, measures_rows, mu_on_front,
                                nu_measure, one_entropy_check, projected_total_variation,
                                rect_density_check, weak_residual, front_pairing)
from burgerslab.solution import Front
from burgerslab.testfunctions import KineticTestFunction, TestFunction


def midpoint_weak_form(sol, eta_fn, q_fn, phi, n=1200):
    """``-int int eta(u) phi_t + q(u) phi_x`` on a uniform midpoint grid."""
    t_lo, t_hi = phi.time_support(sol.horizon)
    total = 0.0
    ts = t_lo + (np.arange(n) + 0.5) * (t_hi - t_lo) / n
    for t in ts:
        x_lo, x_hi = phi.x_support(t)
        xs = x_lo + (np.arange(n) + 0.5) * (x_hi - x_lo) / n
        u = sol.evaluate(t, xs)
        vals = eta_fn(u) * phi.phi_t(t, xs) + q_fn(u) * phi.phi_x(t, xs)
        total -= vals.sum() * (x_hi - x_lo) / n * (t_hi - t_lo) / n
    return total


def front(u_l, u_r):
    return Front(0, 0.0, 1.0, 0.0, u_l, u_r, 0.5 * (u_l + u_r),
                 "entropic" if u_l > u_r else "anti-entropic")


# {{{ entropy descriptors

def test_quadratic_descriptor_exact():
    eta = EntropyDescriptor.quadratic()
    v = np.linspace(0, 1, 7)
    assert np.allclose(eta.eta(v), v ** 2 / 2, atol=1e-15)
    assert np.allclose(eta.q(v), v ** 3 / 3, atol=1e-15)
    assert eta.flux_identity_error() < 1e-14


def test_random_convex_flux_identity():
    rng = np.random.default_rng(5)
    for _ in range(5):
        eta = EntropyDescriptor.random_convex(rng)
        assert eta.convex
        assert eta.flux_identity_error() < 1e-12


def test_entropy_library_roundtrip():
    eta = EntropyDescriptor.from_function(lambda v: 1 + v, id="lin-pp")
    lib = load_entropy_library({"entropies": [eta.to_json()]})
    assert lib[0].id == "lin-pp"
    assert np.allclose(lib[0].eta(np.linspace(0, 1, 5)), eta.eta(np.linspace(0, 1, 5)))

# }}}


# {{{ rates

def test_shock_rate_quadratic():
    eta = EntropyDescriptor.quadratic()
    f = front(1.0, 0.0)
    # [q] - sigma [eta] = (0 - 1/3) - 1/2 (0 - 1/2)
    assert closed_form_rate(f, eta) == pytest.approx(-1 / 12, abs=1e-15)
    assert kernel_rate(f, eta) == pytest.approx(-1 / 12, abs=1e-15)


@pytest.mark.parametrize("ul,ur", [(0.9, 0.2), (0.1, 0.75), (0.3, 0.31)])
def test_kernel_against_scipy(ul, ur):
    rng = np.random.default_rng(11)
    eta = EntropyDescriptor.random_convex(rng)
    lo, hi = min(ul, ur), max(ul, ur)
    sign = -1.0 if ul > ur else 1.0
    cuts = np.concatenate([[lo], eta.grid[(eta.grid > lo) & (eta.grid < hi)], [hi]])
    ref = sum(quad(lambda v: float(eta.d2(v)) * sign * (v - lo) * (hi - v) / 2, a, b,
                   epsabs=1e-15)[0] for a, b in zip(cuts[:-1], cuts[1:]))
    assert kernel_rate(front(ul, ur), eta) == pytest.approx(ref, abs=1e-9)
    assert closed_form_rate(front(ul, ur), eta) == pytest.approx(ref, abs=1e-9)


def test_degenerate_front():
    with pytest.raises(DegenerateFrontError):
        mu_on_front(SimpleNamespace(u_l=0.4, u_r=0.4))


def test_measures_rows():
    assert measures_rows(F.constant(), [EntropyDescriptor.quadratic()]) == []
    rows = measures_rows(F.shock(), [EntropyDescriptor.quadratic()])
    shock_row = [r for r in rows if r["front_id"] == 1][0]
    assert shock_row["rate_closed_form"] == pytest.approx(-1 / 12, abs=1e-15)
    assert shock_row["nu_rate"] == pytest.approx(1 / 12, abs=1e-15)


def test_dissipation_total_and_nu():
    sol = F.mixed()
    diss = entropy_dissipation(sol, EntropyDescriptor.quadratic())
    assert diss.total == pytest.approx(0.0, abs=1e-15)     # +1/12 and -1/12
    assert nu_measure(sol).total == pytest.approx(1 / 6, abs=1e-15)
    assert diss.max_route_discrepancy < 1e-14


def test_nu_is_supremum():
    sol = F.merging()
    nu = nu_measure(sol).densities
    rng = np.random.default_rng(2)
    library = [EntropyDescriptor.random_bounded(rng) for _ in range(50)]
    for f in sol.fronts:
        rates = [closed_form_rate(f, eta) for eta in library]
        assert max(rates) <= nu[f.id] + 1e-12
        best = max(closed_form_rate(f, EntropyDescriptor.quadratic()),
                   closed_form_rate(f, EntropyDescriptor.neg_quadratic()))
        assert best == pytest.approx(nu[f.id], abs=1e-14)

# }}}


# {{{ weak forms

def test_weak_residual_against_midpoint_oracle():
    sol = F.mixed()
    phi = TestFunction.tensor(0.5, 0.4, 0.1, 0.6)
    eta = EntropyDescriptor.quadratic()
    exact = weak_residual(sol, eta, phi)
    oracle = midpoint_weak_form(sol, lambda u: u ** 2 / 2, lambda u: u ** 3 / 3, phi)
    assert exact == pytest.approx(oracle, abs=2e-4)
    rates = {f.id: closed_form_rate(f, eta) for f in sol.fronts}
    assert front_pairing(sol, rates, phi) == pytest.approx(exact, abs=1e-12)


def test_weak_solution_linear_entropy():
    eta = EntropyDescriptor.linear()
    for sol in (F.merging(), F.step(), F.mixed()):
        for phi in (TestFunction.tensor(0.5, 0.45, 0.0, 0.8),
                    TestFunction.tensor(0.6, 0.3, 0.4, 0.3)):
            assert abs(weak_residual(sol, eta, phi)) < 1e-13


def test_moving_window_total():
    sol = F.shock()
    phi = TestFunction.moving_window(0.0, 0.5, 0.5)
    val = weak_residual(sol, EntropyDescriptor.quadratic(), phi, include_time_boundary=True)
    assert val == pytest.approx(-1 / 12, abs=1e-12)


def test_time_flat_needs_boundary():
    phi = TestFunction.moving_window(0.0, 0.5, 0.5)
    with pytest.raises(DomainError):
        weak_residual(F.shock(), EntropyDescriptor.quadratic(), phi)


def test_kinetic_sign_and_residuals():
    assert kinetic_sign() == -1
    psi = KineticTestFunction.tensor(0.5, 0.4, 0.25, 0.5, 0.35, 0.3)
    assert abs(kinetic_residual(F.shock(), psi).residual) < 1e-6
    psi_anti = KineticTestFunction.tensor(0.5, 0.4, 0.25, 0.5, 0.6, 0.3)
    res = kinetic_residual(F.anti(), psi_anti)
    assert abs(res.residual) < 1e-6
    assert abs(res.source) > 1e-4

# }}}


# {{{ binning and one-entropy

def test_bin_measure_conserves_mass():
    sol = F.merging()
    km = kinetic_measure(sol)
    t_edges = np.linspace(0, 3, 7)
    x_edges = np.linspace(-1.5, 3.0, 10)
    g = bin_measure(km, t_edges, x_edges)
    assert g.total == pytest.approx(km.total, abs=1e-13)
    g3 = bin_measure(km, t_edges, x_edges, np.linspace(0, 1, 5))
    assert g3.total == pytest.approx(km.total, abs=1e-13)
    assert projected_total_variation(km, t_edges, x_edges).total == pytest.approx(
        km.total_variation, abs=1e-13)


def test_one_entropy_mixed():
    rep = one_entropy_check(F.mixed())
    assert rep.frontwise_discrepancy == 0.0
    assert rep.grid_discrepancy <= 1e-15
    assert not rep.entropy_solution
    assert rep.equivalence_holds


def test_one_entropy_classification():
    # with zero tails every non-constant profile has an upward jump, so the
    # only entropy solution among the fixtures is the constant one
    assert one_entropy_check(F.constant()).entropy_solution
    for name in ("merging", "step", "anti", "fan"):
        rep = one_entropy_check(F.FIXTURES[name]())
        assert not rep.entropy_solution
        assert rep.equivalence_holds
        assert rep.frontwise_discrepancy == 0.0


# }}}


# {{{ densities

def test_j_density_on_and_off_front():
    sol = F.shock()
    r = j_density_estimate(sol, [(0.5, 0.25)], [1e-3, 1e-4])
    assert r[0] == pytest.approx([1 / 6 / math.sqrt(1.25)] * 2, rel=1e-12)
    off = j_density_estimate(sol, [(0.5, 0.8)], [0.1, 0.01])
    assert np.all(off == 0.0)


def test_rect_density():
    sol = F.mixed()
    phi = TestFunction.tensor(0.5, 0.4, 0.2, 0.5)
    rc = rect_density_check(sol, EntropyDescriptor.quadratic(), phi)
    assert rc.discrepancy < 1e-12


def test_rect_density_rejects_event():
    sol = F.merging()
    phi = TestFunction.tensor(2.0, 0.5, 1.5, 0.5)
    with pytest.raises(UsageError):
        rect_density_check(sol, EntropyDescriptor.quadratic(), phi)

# }}}
