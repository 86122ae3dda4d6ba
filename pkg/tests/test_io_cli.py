import json

import pytest

from burgerslab import io
from burgerslab.cli import main
from burgerslab.errors import ScenarioError

STEP_DOC = {"breakpoints": [-1, 0], "values": [0, 1, 0], "horizon": 1,
            "policy": {"increasing": "rarefy", "delta": 0.01}, "seed": 3}


def write(tmp_path, doc, name="scenario.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


# {{{ scenarios

def test_scenario_defaults(tmp_path):
    sc = io.load_scenario(write(tmp_path, STEP_DOC))
    assert sc.policy.increasing == "rarefy" and sc.policy.delta == 0.01
    assert (sc.N_x, sc.N_v, sc.seed) == (200, 200, 3)
    assert sc.tolerance("pushforward") == 0.01
    assert sc.tolerance("exact") == 1e-12
    assert [e.id for e in sc.entropy_library()] == ["quadratic"]


@pytest.mark.parametrize("patch", [
    {"values": [0, 1.5, 0]},
    {"values": [0.2, 1, 0]},
    {"breakpoints": [0, -1]},
    {"horizon": -1},
    {"horizon": "one"},
    {"policy": {"increasing": "rarefy"}},
    {"policy": {"increasing": "rarefy", "delta": 0}},
    {"policy": {"increasing": "smooth"}},
    {"sampling": {"N_x": 0}},
    {"sampling": {"N_x": 2.5}},
    {"epsilons": []},
    {"tolerances": {"bogus": 1}},
    {"entropies": "missing.json"},
])
def test_scenario_rejects(tmp_path, patch):
    with pytest.raises(ScenarioError):
        io.load_scenario(write(tmp_path, {**STEP_DOC, **patch}))


def test_entropy_library_file(tmp_path):
    write(tmp_path, {"entropies": [{"id": "cubic-ish", "eta_pp": [0.0, 1.0, 2.0]}]}, "lib.json")
    sc = io.load_scenario(write(tmp_path, {**STEP_DOC, "entropies": "lib.json"}))
    assert [e.id for e in sc.entropy_library()] == ["cubic-ish"]


def test_fixture_scenario_matches_fixture():
    from burgerslab import fixtures as F
    for name, make in F.FIXTURES.items():
        assert io.fixture_scenario(name).solve().fronts == make().fronts
    with pytest.raises(ScenarioError):
        io.fixture_scenario("nope")


def test_csv_writer_rejects_wrong_keys(tmp_path):
    with pytest.raises(ValueError):
        io.write_csv(tmp_path / "x.csv", ("a", "b"), [{"a": 1}])


def test_floats_written_as_repr(tmp_path):
    p = io.write_csv(tmp_path / "x.csv", ("a",), [{"a": 0.1 + 0.2}])
    assert p.read_text().splitlines()[1] == repr(0.1 + 0.2)

# }}}


# {{{ commands

def test_solve_outputs(tmp_path, capsys):
    assert main(["solve", "--scenario", "merging", "--out", str(tmp_path)]) == 0
    header, rows = io.read_csv(tmp_path / "fronts.csv")
    assert header == list(io.FRONTS_HEADER)
    assert len(rows) == 4
    summary = json.loads((tmp_path / "solution.json").read_text())
    assert len(summary["events"]) == 1
    assert summary["mass_drift"] <= 1e-12


def test_solve_fan_rows(tmp_path):
    doc = {"breakpoints": [0, 2], "values": [0, 1, 0], "horizon": 2,
           "policy": {"increasing": "rarefy", "delta": 0.25}}
    assert main(["solve", "--scenario", str(write(tmp_path, doc)), "--out", str(tmp_path)]) == 0
    _, rows = io.read_csv(tmp_path / "fronts.csv")
    assert sum(r["class"] == "anti-entropic" for r in rows) == 4


def test_measures(tmp_path):
    assert main(["measures", "--scenario", "mixed", "--out", str(tmp_path)]) == 0
    header, rows = io.read_csv(tmp_path / "measures.csv")
    assert header == list(io.MEASURES_HEADER)
    assert sorted(float(r["rate_closed_form"]) for r in rows) == pytest.approx([-1 / 12, 1 / 12])
    summary = json.loads((tmp_path / "measures.json").read_text())
    assert summary["classification"] == "not entropy solution"
    assert main(["measures", "--scenario", "constant", "--out", str(tmp_path / "c")]) == 0
    assert io.read_csv(tmp_path / "c" / "measures.csv")[1] == []


def test_represent(tmp_path):
    assert main(["represent", "--scenario", "step", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "representation.json").read_text())
    hyp = summary["sides"]["hypograph"]
    assert max(hyp["pushforward_discrepancies"]) <= 0.01
    assert hyp["checks"] == {"pushforward": True, "ode_identity": True, "decomposition": True}
    assert summary["transport_collapse"]["l1_error"] <= 0.05
    header, _ = io.read_csv(tmp_path / "particles.csv")
    assert header == list(io.PARTICLES_HEADER)


def test_represent_constant(tmp_path):
    assert main(["represent", "--scenario", "constant", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "representation.json").read_text())
    for side in summary["sides"].values():
        assert side["totvar_integral"] == 0.0
        assert max(side["pushforward_discrepancies"]) <= 1e-12


def test_concentrate(tmp_path):
    assert main(["concentrate", "--scenario", "merging", "--out", str(tmp_path)]) == 0
    header, rows = io.read_csv(tmp_path / "concentration.csv")
    assert header == list(io.CONCENTRATION_HEADER)
    assert float(rows[0]["fraction_minus"]) >= 0.99
    assert io.read_csv(tmp_path / "curves.csv")[0] == list(io.CURVES_HEADER)


def test_exit_codes(tmp_path):
    assert main(["solve", "--scenario", str(write(tmp_path, "{broken")), "--out",
                 str(tmp_path)]) == 2
    assert main(["solve", "--scenario", "no-such-fixture"]) == 2
    cascade = {**STEP_DOC, "horizon": 5, "max_events": 3}
    assert main(["solve", "--scenario", str(write(tmp_path, cascade, "c.json")),
                 "--out", str(tmp_path)]) == 3
    assert main(["verify-all", "--only", "13", "--out", str(tmp_path)]) == 2


def test_verify_all_tightened(tmp_path):
    tight = {**STEP_DOC, "tolerances": {"quadrature": 1e-30}}
    p = write(tmp_path, tight)
    assert main(["verify-all", "--scenario", str(p), "--only", "1", "7",
                 "--out", str(tmp_path)]) == 1
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    first = verdict["criteria"][0]
    assert not first["passed"]
    assert first["detail"]["mu_closed_vs_weak"]["margin"] < 0
    assert verdict["criteria"][1]["passed"]
    assert main(["verify-all", "--only", "1", "7", "--out", str(tmp_path / "ok")]) == 0


def test_deterministic_outputs(tmp_path):
    for run in ("a", "b"):
        for cmd in ("solve", "measures"):
            assert main([cmd, "--scenario", "merging", "--out", str(tmp_path / run)]) == 0
    for name in ("fronts.csv", "solution.json", "measures.csv", "measures.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

# }}}
