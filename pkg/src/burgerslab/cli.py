"""Command line entry point: ``burgerslab <command> --scenario <file|fixture>``.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad input, 3 resource bound.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance, io
from .collapse import transport_collapse
from .errors import DomainError, ResourceError, ScenarioError, UsageError
from .kinetic import kinetic_measure, measures_rows, nu_measure, one_entropy_check
from .lagrangian import (build_epigraph_rep, build_hypograph_rep, check_pushforward,
                         decompose_mu, ode_identity_error, particle_rows, totvar_integral)
from .solution import Policy, evolve
from .structure import (build_J_minus, build_J_plus, concentration_report, time_reversal)

log = logging.getLogger("burgerslab")

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
CONCENTRATION_FLOOR = 0.99


def _scenario_doc(sc: io.Scenario) -> dict:
    return {"name": sc.name, "breakpoints": list(sc.breakpoints), "values": list(sc.values),
            "horizon": sc.horizon, "policy": sc.policy.describe(), "seed": sc.seed}


# {{{ commands

def cmd_solve(sc: io.Scenario, out: Path) -> int:
    sol = sc.solve()
    io.write_csv(out / "fronts.csv", io.FRONTS_HEADER, io.front_rows(sol))
    series = io.mass_series(sol)
    m0 = series[0]["mass"]
    drift = max(abs(r["mass"] - m0) for r in series)
    ok = drift <= sc.tolerance("exact")
    io.write_json(out / "solution.json", {
        "scenario": _scenario_doc(sc), "n_fronts": len(sol.fronts),
        "events": io.event_rows(sol), "mass": series, "mass_drift": drift,
        "passed": ok,
    })
    print(f"solve: {len(sol.fronts)} fronts, {len(sol.events)} events, mass drift {drift:.3g}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_measures(sc: io.Scenario, out: Path) -> int:
    sol = sc.solve()
    entropies = sc.entropy_library()
    io.write_csv(out / "measures.csv", io.MEASURES_HEADER, measures_rows(sol, entropies))
    rep = one_entropy_check(sol)
    km = kinetic_measure(sol)
    ok = rep.equivalence_holds and rep.frontwise_discrepancy <= sc.tolerance("exact")
    io.write_json(out / "measures.json", {
        "scenario": _scenario_doc(sc),
        "classification": "entropy solution" if rep.entropy_solution else "not entropy solution",
        "mu_total": km.total, "mu_negative": km.negative_part, "mu_positive": km.positive_part,
        "nu_total": nu_measure(sol).total,
        "projection": {"frontwise_discrepancy": rep.frontwise_discrepancy,
                       "grid_discrepancy": rep.grid_discrepancy,
                       "naive_grid_tv": rep.naive_grid_tv},
        "nu_vs_quadratic": rep.nu_vs_quadratic,
        "quadratic_nonpositive": rep.quadratic_nonpositive,
        "no_anti_entropic_front": rep.no_anti_entropic_front,
        "entropies": [e.id for e in entropies],
        "passed": ok,
    })
    cls = "entropy solution" if rep.entropy_solution else "not entropy solution"
    print(f"measures: {cls}, frontwise discrepancy {rep.frontwise_discrepancy:.3g}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_represent(sc: io.Scenario, out: Path) -> int:
    sol = sc.solve()
    bound = sc.tolerance("pushforward")
    times = np.linspace(0.0, sol.horizon, 10)
    summary = {"scenario": _scenario_doc(sc), "sides": {}}
    ok = True
    for side, build in (("hypograph", build_hypograph_rep), ("epigraph", build_epigraph_rep)):
        rep = build(sol, sc.N_x, sc.N_v)
        disc = [check_pushforward(rep, sol, float(t)) for t in times]
        ode = ode_identity_error(rep, seed=sc.seed)
        dec = decompose_mu(rep, sol, seed=sc.seed, quad_tol=sc.tolerance("quadrature"))
        checks = {"pushforward": max(disc) <= bound + sc.tolerance("exact"),
                  "ode_identity": ode <= sc.tolerance("exact"),
                  "decomposition": dec.passed}
        ok &= all(checks.values())
        summary["sides"][side] = {
            "side": side, "N_x": sc.N_x, "N_v": sc.N_v,
            "totvar_integral": totvar_integral(rep),
            "pushforward_discrepancies": disc, "pushforward_bound": bound,
            "ode_identity_error": ode,
            "decomposition": {"signed": dec.signed_error, "abs": dec.abs_error,
                              "negative": dec.negative_error, "positive": dec.positive_error,
                              "tolerance": dec.tolerance},
            "checks": checks,
        }
        name = "particles.csv" if side == "hypograph" else "particles_epigraph.csv"
        io.write_csv(out / name, io.PARTICLES_HEADER, particle_rows(rep))

    # the scheme converges to the entropy solution, so compare against that
    ref = evolve(sc.profile, sol.horizon, Policy.rarefy(1e-3))
    res = transport_collapse(sc.profile, sc.tau, sc.dx, sc.dv, sol.horizon, record_jumps=False)
    err = res.l1_error(ref)
    limit = 5.0 * max(sc.tau, sc.dx, sc.dv)
    summary["transport_collapse"] = {"tau": sc.tau, "dx": sc.dx, "dv": sc.dv,
                                     "l1_error": err, "limit": limit, "passed": err <= limit}
    ok &= err <= limit
    summary["passed"] = bool(ok)
    io.write_json(out / "representation.json", summary)
    h = summary["sides"]["hypograph"]
    print(f"represent: max pushforward {max(h['pushforward_discrepancies']):.3g}, "
          f"totvar {h['totvar_integral']:.6g}, collapse L1 {err:.3g}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_concentrate(sc: io.Scenario, out: Path) -> int:
    sol = sc.solve()
    fam_m = build_J_minus(build_hypograph_rep(sol, sc.N_x, sc.N_v), sc.n_t, sc.n_x)
    rev = time_reversal(sol)
    fam_p = build_J_plus(build_hypograph_rep(rev, sc.N_x, sc.N_v), sc.n_t, sc.n_x)
    rep = concentration_report(sol, fam_m, list(sc.epsilons), fam_p, grid_n=sc.n_t)
    io.write_csv(out / "curves.csv", io.CURVES_HEADER, fam_m.rows())
    io.write_csv(out / "curves_plus.csv", io.CURVES_HEADER, fam_p.rows())
    io.write_csv(out / "concentration.csv", io.CONCENTRATION_HEADER, rep.csv_rows())
    totals = {repr(float(e)): rep.fraction_total(e) for e in sc.epsilons}
    ok = all(v >= CONCENTRATION_FLOOR for v in totals.values())
    io.write_json(out / "concentration.json", {
        "scenario": _scenario_doc(sc), "n_curves_minus": len(fam_m),
        "n_curves_plus": len(fam_p), "nu_minus": rep.nu_minus, "nu_plus": rep.nu_plus,
        "fraction_total": totals, "floor": CONCENTRATION_FLOOR, "passed": ok,
    })
    print(f"concentrate: {len(fam_m)} + {len(fam_p)} curves, fractions {totals}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify_all(sc: io.Scenario | None, out: Path, threads: int = 1, seed: int = 0,
                   only: list[int] | None = None) -> int:
    tolerances = {k: v for k, v in (sc.tolerances if sc else {}).items() if v is not None}
    results = acceptance.run_all(tolerances, seed, threads, only)
    for r in results:
        print(r.line())
    verdict = {"seed": seed, "tolerances": tolerances,
               "criteria": [r.to_json() for r in results]}
    ok = all(r.passed for r in results)
    if sc is not None:
        sol = sc.solve()
        series = io.mass_series(sol)
        drift = max(abs(x["mass"] - series[0]["mass"]) for x in series)
        rh = max((abs(f.sigma - 0.5 * (f.u_l + f.u_r)) for f in sol.fronts), default=0.0)
        sc_ok = drift <= sc.tolerance("exact") and rh == 0.0
        verdict["scenario"] = {**_scenario_doc(sc), "mass_drift": drift,
                               "rankine_hugoniot_error": rh, "passed": sc_ok}
        ok &= sc_ok
    verdict["passed"] = bool(ok)
    io.write_json(out / "verdict.json", verdict)
    print("verify-all:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK

# }}}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="burgerslab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "measures", "represent", "concentrate", "verify-all"):
        s = sub.add_parser(name)
        s.add_argument("--scenario", required=name != "verify-all",
                       help="scenario JSON file or fixture name")
        s.add_argument("--out", type=Path, default=None, help="output directory")
        s.add_argument("--threads", type=int, default=1)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("-v", "--verbose", action="store_true")
        if name == "verify-all":
            s.add_argument("--only", type=int, nargs="+", default=None,
                           help="criterion numbers to run (default: all)")
    return p


COMMANDS = {"solve": cmd_solve, "measures": cmd_measures, "represent": cmd_represent,
            "concentrate": cmd_concentrate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        sc = io.resolve_scenario(args.scenario) if args.scenario else None
        if sc is not None and args.seed is not None:
            sc = sc.replace(seed=args.seed)
        out = args.out or Path(sc.out if sc and sc.out else "out")
        if args.command == "verify-all":
            seed = args.seed if args.seed is not None else (sc.seed if sc else 0)
            if args.only and not all(1 <= n <= len(acceptance.CRITERIA) for n in args.only):
                raise UsageError(f"criteria are numbered 1..{len(acceptance.CRITERIA)}")
            return cmd_verify_all(sc, out, args.threads, seed, args.only)
        return COMMANDS[args.command](sc, out)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ScenarioError, UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
