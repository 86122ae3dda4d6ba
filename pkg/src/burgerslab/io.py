"""Scenario files and deterministic report writers."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DomainError, ScenarioError
from .kinetic import EntropyDescriptor, load_entropy_library
from .solution import FrontSolution, Policy, Profile, evolve

FRONTS_HEADER = ("t_birth", "t_death", "x_birth", "u_l", "u_r", "sigma", "class")
MEASURES_HEADER = ("front_id", "t0", "t1", "entropy_id", "rate_closed_form",
                   "rate_kernel", "nu_rate")
PARTICLES_HEADER = ("particle_id", "weight", "breakpoint_t", "x", "v")
CURVES_HEADER = ("curve_id", "t", "f")
CONCENTRATION_HEADER = ("epsilon", "grid_n", "fraction_minus", "fraction_plus")

DEFAULT_TOLERANCES = {
    "pushforward": None,    # 2 / min(N_x, N_v) when unset
    "quadrature": 1e-6,
    "exact": 1e-12,
}


# {{{ scenario

@dataclass(frozen=True)
class Scenario:
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    horizon: float
    policy: Policy = field(default_factory=Policy.keep)
    seed: int = 0
    N_x: int = 200
    N_v: int = 200
    tau: float = 0.01
    dx: float = 0.01
    dv: float = 0.01
    n_t: int = 20
    n_x: int = 20
    epsilons: tuple[float, ...] = (0.01,)
    entropies: tuple[EntropyDescriptor, ...] = ()
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str | None = None
    name: str = "scenario"
    max_events: int = 100_000

    @property
    def profile(self) -> Profile:
        return Profile.normalized(self.breakpoints, self.values)

    def solve(self) -> FrontSolution:
        return evolve(self.profile, self.horizon, self.policy, max_events=self.max_events)

    def entropy_library(self) -> list[EntropyDescriptor]:
        return list(self.entropies) or [EntropyDescriptor.quadratic()]

    def tolerance(self, key: str) -> float:
        val = self.tolerances.get(key)
        if val is None and key == "pushforward":
            return 2.0 / min(self.N_x, self.N_v)
        return float(val)

    def replace(self, **kw) -> "Scenario":
        from dataclasses import replace
        return replace(self, **kw)


def _number(doc: dict, key: str, default=None, positive: bool = True, kind=float):
    val = doc.get(key, default)
    if val is None:
        raise ScenarioError(f"missing field {key!r}")
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(f"field {key!r} must be a number, got {val!r}")
    if kind is int and val != int(val):
        raise ScenarioError(f"field {key!r} must be an integer")
    val = kind(val)
    if not math.isfinite(val):
        raise ScenarioError(f"field {key!r} must be finite")
    if positive and not val > 0:
        raise ScenarioError(f"field {key!r} must be positive")
    return val


def _policy(doc) -> Policy:
    if doc is None:
        return Policy.keep()
    if not isinstance(doc, dict):
        raise ScenarioError("policy must be an object")
    kind = doc.get("increasing", "keep")
    try:
        if kind == "keep":
            return Policy.keep()
        if kind == "rarefy":
            return Policy.rarefy(_number(doc, "delta"))
    except DomainError as exc:
        raise ScenarioError(str(exc)) from exc
    raise ScenarioError(f"unknown policy {kind!r}")


def scenario_from_dict(doc: dict, base: Path | None = None) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    for key in ("breakpoints", "values"):
        if not isinstance(doc.get(key), list):
            raise ScenarioError(f"field {key!r} must be a list")
    bp = [_number({"x": x}, "x", positive=False) for x in doc["breakpoints"]]
    vals = [_number({"u": u}, "u", positive=False) for u in doc["values"]]
    if any(b <= a for a, b in zip(bp, bp[1:])):
        raise ScenarioError("breakpoints must be strictly increasing")
    try:
        Profile.normalized(bp, vals)
    except (DomainError, ValueError) as exc:
        raise ScenarioError(f"bad profile: {exc}") from exc

    samp = doc.get("sampling", {}) or {}
    tc = doc.get("transport_collapse", {}) or {}
    anc = doc.get("anchors", {}) or {}
    for sub, name in ((samp, "sampling"), (tc, "transport_collapse"), (anc, "anchors")):
        if not isinstance(sub, dict):
            raise ScenarioError(f"{name} must be an object")

    eps = doc.get("epsilons", [0.01])
    if not isinstance(eps, list) or not eps:
        raise ScenarioError("epsilons must be a non-empty list")
    eps = tuple(_number({"e": e}, "e") for e in eps)

    tol = dict(DEFAULT_TOLERANCES)
    user_tol = doc.get("tolerances", {}) or {}
    if not isinstance(user_tol, dict):
        raise ScenarioError("tolerances must be an object")
    for key in user_tol:
        if key not in tol:
            raise ScenarioError(f"unknown tolerance {key!r}")
        tol[key] = _number(user_tol, key)

    return Scenario(
        breakpoints=tuple(bp), values=tuple(vals),
        horizon=_number(doc, "horizon"),
        policy=_policy(doc.get("policy")),
        seed=_number(doc, "seed", 0, positive=False, kind=int),
        N_x=_number(samp, "N_x", 200, kind=int), N_v=_number(samp, "N_v", 200, kind=int),
        tau=_number(tc, "tau", 0.01), dx=_number(tc, "dx", 0.01), dv=_number(tc, "dv", 0.01),
        n_t=_number(anc, "n_t", 20, kind=int), n_x=_number(anc, "n_x", 20, kind=int),
        epsilons=eps,
        entropies=tuple(_entropies(doc.get("entropies"), base)),
        tolerances=tol,
        out=doc.get("out"),
        name=str(doc.get("name", "scenario")),
        max_events=_number(doc, "max_events", 100_000, kind=int),
    )


def _entropies(ref, base: Path | None) -> list[EntropyDescriptor]:
    if ref is None:
        return []
    if isinstance(ref, str):
        path = Path(ref)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            ref = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read entropy library {path}: {exc}") from exc
    try:
        return load_entropy_library(ref)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad entropy library: {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc, path.parent)


def fixture_scenario(name: str) -> Scenario:
    """Scenario equivalent of a bundled fixture (see ``fixtures``)."""
    table = {
        "step": ((-1.0, 0.0), (0.0, 1.0, 0.0), 1.0, Policy.rarefy(0.01)),
        "shock": ((-2.0, 0.0), (0.0, 1.0, 0.0), 1.0, Policy.keep()),
        "mixed": ((-1.0, 0.0), (0.0, 1.0, 0.0), 1.0, Policy.keep()),
        "merging": ((-1.0, 0.0, 1.0), (0.0, 1.0, 0.5, 0.0), 3.0, Policy.keep()),
        "fan": ((0.0, 2.0), (0.0, 1.0, 0.0), 2.0, Policy.rarefy(0.1)),
        "anti": ((0.0, 2.0), (0.0, 1.0, 0.0), 1.0, Policy.keep()),
        "constant": ((), (0.0,), 1.0, Policy.keep()),
    }
    if name not in table:
        raise ScenarioError(f"unknown fixture {name!r}")
    bp, vals, T, pol = table[name]
    return Scenario(bp, vals, T, pol, name=name)


def resolve_scenario(ref: str) -> Scenario:
    """A path to a scenario file, or the name of a bundled fixture."""
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        return load_scenario(path)
    return fixture_scenario(ref)

# }}}


# {{{ writers

def _plain(val: Any) -> Any:
    if isinstance(val, (np.floating, float)):
        return float(val)
    if isinstance(val, (np.integer,)):
        return int(val)
    if isinstance(val, np.bool_):
        return bool(val)
    if isinstance(val, dict):
        return {str(k): _plain(v) for k, v in val.items()}
    if isinstance(val, (list, tuple, np.ndarray)):
        return [_plain(v) for v in val]
    return val


def _cell(val: Any) -> str:
    val = _plain(val)
    if isinstance(val, float):
        return repr(val)
    return str(val)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if set(row) != set(header):
                raise ValueError(f"row keys {sorted(row)} do not match header {list(header)}")
            w.writerow([_cell(row[k]) for k in header])
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[dict]]:
    with Path(path).open(newline="") as fh:
        r = csv.DictReader(fh)
        return list(r.fieldnames or []), list(r)


def dumps(doc: Any) -> str:
    return json.dumps(_plain(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: str | Path, doc: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc))
    return path


def front_rows(sol: FrontSolution) -> list[dict]:
    return [{"t_birth": f.t_birth, "t_death": f.t_death, "x_birth": f.x_birth,
             "u_l": f.u_l, "u_r": f.u_r, "sigma": f.sigma, "class": f.cls}
            for f in sol.fronts]


def event_rows(sol: FrontSolution) -> list[dict]:
    return [{"time": e.time, "position": e.position, "incoming": list(e.incoming),
             "outgoing": list(e.outgoing)} for e in sol.events]


def mass_series(sol: FrontSolution, n: int = 11) -> list[dict]:
    return [{"t": float(t), "mass": sol.mass(float(t))}
            for t in np.linspace(0.0, sol.horizon, n)]

# }}}
