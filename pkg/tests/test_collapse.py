import warnings

import numpy as np
import pytest

from burgerslab import fixtures as F
from burgerslab.collapse import transport_collapse
from burgerslab.errors import DomainError
from burgerslab.solution import Profile


@pytest.fixture(scope="module")
def reference():
    # fine fan splitting: within 1e-3 of the entropy solution in L1
    return F.step(delta=1e-3)


@pytest.mark.parametrize("h", [0.02, 0.01, 0.005])
def test_l1_error_is_h(reference, h):
    res = transport_collapse(Profile.box(-1.0, 0.0), h, h, h, 1.0, record_jumps=False)
    assert res.l1_error(reference) == pytest.approx(h, rel=1e-9)


def test_halving_factor(reference):
    errs = [transport_collapse(Profile.box(-1.0, 0.0), h, h, h, 1.0,
                               record_jumps=False).l1_error(reference) for h in (0.01, 0.005)]
    assert errs[0] <= 0.05
    assert errs[0] / errs[1] >= 1.7


def test_mass_conserved():
    res = transport_collapse(Profile((-1.0, 0.0, 1.0), (0.0, 1.0, 0.5, 0.0)), 0.01, 0.01,
                             0.01, 1.0)
    assert np.allclose(res.mass_series, 1.5, atol=1e-12)


def test_jumps_are_downward_restacks():
    res = transport_collapse(Profile.box(-1.0, 0.0), 0.02, 0.02, 0.02, 0.5)
    assert res.jump_pid.size > 0
    assert np.all(np.diff(res.jump_pid) >= 0)
    assert np.all(res.v_after != res.v_before)


def test_cfl_warning_and_domain():
    with pytest.warns(RuntimeWarning):
        transport_collapse(Profile.box(-1.0, 0.0), 0.05, 0.01, 0.01, 0.1)
    with pytest.raises(DomainError):
        transport_collapse(Profile.box(-1.0, 0.0), 0.0, 0.01, 0.01, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transport_collapse(Profile.box(-1.0, 0.0), 0.01, 0.01, 0.01, 0.1)
