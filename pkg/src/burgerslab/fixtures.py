"""Named desk-scale scenarios used by the tests, the CLI and the acceptance run."""

from __future__ import annotations

import numpy as np

from .solution import FrontSolution, Policy, Profile, evolve


def step(delta: float = 0.01, T: float = 1.0) -> FrontSolution:
    """``u0 = 1`` on ``(-1, 0)``: entropic shock from 0, split fan from -1.

    The fan reaches the shock only at ``t = 2``.
    """
    return evolve(Profile.box(-1.0, 0.0), T, Policy.rarefy(delta))


def shock(T: float = 1.0) -> FrontSolution:
    """Isolated entropic front ``(1, 0)`` from the origin.

    The upward jump at ``x = -2`` is kept and stays out of the way until
    ``t = 2`` (both fronts move at speed 1/2).
    """
    return evolve(Profile.box(-2.0, 0.0), T, Policy.keep())


def mixed(T: float = 1.0) -> FrontSolution:
    """One kept upward front at -1 and one entropic front at 0."""
    return evolve(Profile.box(-1.0, 0.0), T, Policy.keep())


def merging(T: float = 3.0, policy: Policy | None = None) -> FrontSolution:
    """``1`` on ``(-1, 0)``, ``1/2`` on ``(0, 1)``: two shocks merging at ``(2, 3/2)``."""
    return evolve(Profile((-1.0, 0.0, 1.0), (0.0, 1.0, 0.5, 0.0)), T,
                  policy or Policy.keep())


def fan(delta: float = 0.1, T: float = 2.0) -> FrontSolution:
    """Split rarefaction from 0; the shock from ``x = 2`` is met only at ``t = 4``."""
    return evolve(Profile.box(0.0, 2.0), T, Policy.rarefy(delta))


def anti(T: float = 1.0) -> FrontSolution:
    """Kept anti-entropic front ``(0, 1)`` from the origin, shock far to the right."""
    return evolve(Profile.box(0.0, 2.0), T, Policy.keep())


def constant(T: float = 1.0) -> FrontSolution:
    return evolve(Profile.zero(), T, Policy.keep())


FIXTURES = {
    "step": step,
    "shock": shock,
    "mixed": mixed,
    "merging": merging,
    "fan": fan,
    "anti": anti,
    "constant": constant,
}


def random_profile(rng: np.random.Generator, n_max: int = 6, levels: int | None = None,
                   width: float = 4.0) -> Profile:
    """Random zero-tailed profile with up to ``n_max`` interior pieces."""
    n = int(rng.integers(1, n_max + 1))
    bp = np.sort(rng.uniform(-width / 2, width / 2, n + 1))
    if levels:
        vals = rng.integers(1, levels + 1, n) / levels
    else:
        vals = rng.uniform(0.05, 1.0, n)
    return Profile.normalized(bp, [0.0, *vals, 0.0], tol=1e-9)


def random_mixed(rng: np.random.Generator, T: float = 1.0) -> FrontSolution:
    """Random scenario with a random policy; the kept branch has anti-entropic fronts."""
    prof = random_profile(rng)
    if rng.uniform() < 0.5:
        policy = Policy.keep()
    else:
        policy = Policy.rarefy(float(rng.choice([0.05, 0.1, 0.25])))
    return evolve(prof, T, policy)
