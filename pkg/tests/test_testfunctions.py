import numpy as np
import pytest
from scipy.integrate import quad

from burgerslab import fixtures as F
from burgerslab.kinetic import along_front
from burgerslab.testfunctions import (Bump, KineticTestFunction, TestFunction, dyadic_family,
                                      gauss_nodes, piecewise_gauss, time_breaks)


def test_bump_integral_and_primitive():
    b = Bump(0.3, 0.2)
    assert b.integral == pytest.approx(32 / 35 * 0.2, rel=1e-14)
    ref, _ = quad(lambda x: float(b(x)), 0.1, 0.35)
    assert b.antiderivative(0.35) - b.antiderivative(0.1) == pytest.approx(ref, abs=1e-13)
    assert b(0.1) == pytest.approx(0.0, abs=1e-30) and b(0.3) == 1.0


def test_bump_derivative_matches_difference():
    b = Bump(0.0, 1.0)
    x = np.linspace(-0.9, 0.9, 7)
    h = 1e-6
    assert np.allclose(b.derivative(x), (b(x + h) - b(x - h)) / (2 * h), atol=1e-8)


def test_bump_rejects_width():
    with pytest.raises(ValueError):
        Bump(0.0, 0.0)


def test_gauss_exact_on_polynomials():
    x, w = gauss_nodes(-1.0, 2.0, 12)
    assert np.sum(w * x ** 23) == pytest.approx((2.0 ** 24 - 1.0) / 24, rel=1e-12)


def test_along_front_against_scipy():
    sol = F.shock()
    phi = TestFunction.tensor(0.5, 0.4, 0.1, 0.3)
    f = sol.front_map[1]
    ref, _ = quad(lambda t: float(phi(t, f.position(t))), 0.1, 0.8, epsabs=1e-13, epsrel=1e-13,
                  limit=200)
    assert along_front(f, phi) == pytest.approx(ref, abs=1e-12)


def test_time_breaks_cover_support():
    sol = F.merging()
    phi = TestFunction.tensor(2.0, 0.5, 1.5, 0.4)
    br = time_breaks(sol, phi, 1.5, 2.5)
    assert br[0] == 1.5 and br[-1] == 2.5
    assert 2.0 in br
    nodes, w = piecewise_gauss(br)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-14)


def test_kinetic_v_moment():
    psi = KineticTestFunction.tensor(0.5, 0.4, 0.0, 0.5, 0.4, 0.3)
    ref, _ = quad(lambda v: float(psi.zeta(v)) * v, 0.2, 0.7, epsabs=1e-13, epsrel=1e-13)
    assert psi.v_moment(0.2, 0.9, weight=lambda v: v) == pytest.approx(ref, abs=1e-13)


def test_dyadic_family_deterministic():
    a = dyadic_family(F.step(), 25, seed=3)
    b = dyadic_family(F.step(), 25, seed=3)
    assert len(a) == 25
    assert a == b
