"""Command-line entry points.

``teach run`` executes a config (optionally a named suite) and writes
reports; ``teach check`` runs a fast self-verification battery and exits
nonzero on any failure; ``teach demo`` replays the card worked example
and prints the full transcript.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from random import Random

from .domains import (StateDomain, generate_hypothesis_grid,
                      gridworld_domain, numeric_domain, valid_trajectory)
from .errors import NoProgressError
from .formulas import (And, Atom, F, G, Label, Not, Threshold, TrueF,
                       normalize, parse, render)
from .harness import (SUITE_NAMES, emit, export_lp_programs, load_config,
                      run_experiment, run_suite, suite_configs)
from .learner import HypothesisSet, VersionSpace, uniform_preference
from .semantics import format_trajectory, strong_sat, verdict, weak_sat
from .teaching import (TeacherConfig, boundary_oracle, compute_demonstration,
                       _exhaustive_choice, enumerate_demo_pool,
                       exhaustive_teach, ip_teach, optimal_cover_teach)

SUITS = ("♣", "♠", "♦")  # club, spade, diamond


def _card_setup():
    """The card worked example: F[<=i](suit) for i in 0..4 over 3 suits."""
    domain = StateDomain(kind="cards", alphabet=SUITS)
    formulas = [F(i, Atom(Label(s))) for s in SUITS for i in range(5)]
    hyps = HypothesisSet(tuple(formulas), target_id=2)
    return domain, hyps


# ---------------------------------------------------------------------------
# teach run


def _print_summary(reports) -> None:
    for report in reports:
        print(f"suite={report.suite} domain={report.domain} a={report.a} "
              f"preference={report.preference} l_max={report.l_max} "
              f"seed={report.seed}")
        for method in report.methods:
            st = report.aggregates[method]
            fmt = lambda v: "-" if v is None else (
                f"{v:.2f}" if isinstance(v, float) else str(v))
            print(f"  {method:28s} completed {st['completed']:>3}/"
                  f"{st['sessions']:<3} mean_an={fmt(st['mean_an'])} "
                  f"mean_al={fmt(st['mean_al'])} "
                  f"mean_solver_ms={fmt(st['mean_solver_ms'])}")
        for pair, d in report.deltas.items():
            print(f"  delta {pair}: an {d['an_diff']:+.2f} "
                  f"al {d['al_diff']:+.2f}")


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    if args.format is not None:
        overrides["format"] = args.format
    if overrides:
        cfg = replace(cfg, **overrides)
    if args.suite is not None:
        reports = run_suite(
            args.suite, domain=cfg.domain, sessions=cfg.sessions,
            seed=cfg.seed, short=args.short, time_budget=cfg.time_budget,
            sample_size=cfg.sample_size, perturb_radius=cfg.perturb_radius)
        stem = args.suite
        lp_cfgs = [c for group in suite_configs(
            args.suite, domain=cfg.domain, sessions=cfg.sessions,
            seed=cfg.seed, short=args.short, time_budget=cfg.time_budget,
            sample_size=cfg.sample_size,
            perturb_radius=cfg.perturb_radius) for c in group]
    else:
        reports = (run_experiment(cfg),)
        stem = cfg.suite
        lp_cfgs = [cfg]
    if cfg.out is not None:
        for path in emit(reports, cfg.out, cfg.format, stem=stem):
            print(f"wrote {path}")
    if args.export_lp is not None:
        for c in lp_cfgs:
            if c.engine != "ip" or c.step_only:
                continue
            for path in export_lp_programs(c, args.export_lp):
                print(f"wrote {path}")
    _print_summary(reports)
    return 0


# ---------------------------------------------------------------------------
# teach check


def _random_formula(rng: Random, depth: int, preds, max_tau: int = 3):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.1:
            return TrueF()
        return Atom(rng.choice(preds))
    kind = rng.randrange(4)
    if kind == 0:
        return Not(_random_formula(rng, depth - 1, preds, max_tau))
    if kind == 1:
        return And(_random_formula(rng, depth - 1, preds, max_tau),
                   _random_formula(rng, depth - 1, preds, max_tau))
    sub = _random_formula(rng, depth - 1, preds, max_tau)
    return (F if kind == 2 else G)(rng.randint(0, max_tau), sub)


def _check_semantics() -> str:
    rng = Random(2024)
    alphabet = (0, 1, 2, 3)
    preds = [Threshold(b) for b in range(4)]
    for _ in range(1500):
        f = _random_formula(rng, 3, preds)
        rho = tuple(rng.choice(alphabet)
                    for _ in range(rng.randint(1, 6)))
        if strong_sat(rho, 0, Not(f)) != (not weak_sat(rho, 0, f)):
            return f"negation duality broken on {render(f)} / {rho}"
        if strong_sat(rho, 0, f) and not weak_sat(rho, 0, f):
            return f"strong without weak on {render(f)} / {rho}"
        v = verdict(f, rho)
        ext = rho + (rng.choice(alphabet),)
        if v != 0 and verdict(f, ext) != v:
            return f"verdict not persistent on {render(f)} / {rho}"
    return ""


def _check_solver_parity() -> str:
    rng = Random(7)
    domain = StateDomain(kind="cards", alphabet=("A", "B", "C"))
    preds = [Label(s) for s in domain.alphabet]
    for trial in range(12):
        pool = {normalize((F if rng.random() < 0.5 else G)(
            rng.randint(0, 3), Atom(rng.choice(preds))))
            for _ in range(10)}
        formulas = tuple(sorted(pool, key=render))
        if len(formulas) < 3:
            continue
        hyps = HypothesisSet(formulas, target_id=rng.randrange(len(formulas)))
        cfg = TeacherConfig(l_max=4,
                            objective="AN" if trial % 2 else "AL")
        space = VersionSpace.full(hyps)
        cands = frozenset(range(len(formulas))) - {hyps.target_id}
        try:
            by_ip = compute_demonstration(space, cands, hyps.target, cfg,
                                          domain)
        except NoProgressError:
            by_ip = None
        try:
            by_enum = _exhaustive_choice(space, cands, hyps.target, cfg,
                                         domain, ())
        except NoProgressError:
            by_enum = None
        if (by_ip is None) != (by_enum is None):
            return f"trial {trial}: one search progressed, the other did not"
        if by_ip is not None and (by_ip.demo != by_enum.demo
                                  or by_ip.kappa != by_enum.kappa):
            return (f"trial {trial}: program chose "
                    f"{format_trajectory(by_ip.demo.trajectory)} "
                    f"k={by_ip.kappa}, enumeration "
                    f"{format_trajectory(by_enum.demo.trajectory)} "
                    f"k={by_enum.kappa}")
    return ""


def _check_worked_example() -> str:
    domain, hyps = _card_setup()
    pref = uniform_preference()
    cfg = TeacherConfig(l_max=5, objective="AN")
    by_ip = ip_teach(hyps, 5, pref, cfg, domain)
    if (by_ip.an_cost, by_ip.al_cost) != (2, 7):
        return f"card session cost ({by_ip.an_cost}, {by_ip.al_cost})"
    by_enum = exhaustive_teach(hyps, 5, pref, cfg, domain)
    if ([(s.demo, s.kappa, s.counted) for s in by_enum.steps]
            != [(s.demo, s.kappa, s.counted) for s in by_ip.steps]):
        return "enumeration transcript differs from the program's"
    pool = enumerate_demo_pool(domain, hyps.target, 5)
    preferred = [f for i, f in enumerate(hyps.formulas)
                 if i != hyps.target_id]
    chosen = optimal_cover_teach(pool, preferred, hyps.target, "AN")
    if len(chosen) != 2:
        return f"optimal demonstration count {len(chosen)}, expected 2"
    return ""


def _check_boundary_oracle() -> str:
    grid = generate_hypothesis_grid(numeric_domain(), 4)
    target = parse("G[<=2] (x<=3)")
    space = VersionSpace.full(grid)
    got = render(boundary_oracle(grid.id_of(parse("F[<=3] (x<=4)")),
                                 space, target))
    if got != "F[<=1] (x<=10)":
        return f"F-shaped hypothesis got step target {got}"
    same = boundary_oracle(grid.id_of(parse("G[<=1] (x<=5)")), space, target)
    if same != normalize(target):
        return "G-shaped hypothesis should get the true target"
    return ""


def _check_gridworld() -> str:
    domain = gridworld_domain()
    grid = generate_hypothesis_grid(domain, 2)
    cfg = TeacherConfig(l_max=4)
    transcript = ip_teach(grid.with_target(1), 5, uniform_preference(), cfg,
                          domain)
    if not transcript.reached_target:
        return "session did not reach the target"
    for step in transcript.steps:
        if not valid_trajectory(step.demo.trajectory, domain):
            return (f"invalid trajectory "
                    f"{format_trajectory(step.demo.trajectory)}")
    return ""


_CHECKS = (
    ("semantics fuzz: duality, strength order, persistence",
     _check_semantics),
    ("per-step search: program equals enumeration", _check_solver_parity),
    ("card worked example: costs and optimal count", _check_worked_example),
    ("boundary oracle step targets", _check_boundary_oracle),
    ("gridworld sessions emit valid trajectories", _check_gridworld),
)


def _cmd_check(_args) -> int:
    failures = 0
    for name, fn in _CHECKS:
        detail = fn()
        if detail:
            failures += 1
            print(f"FAIL {name}: {detail}")
        else:
            print(f"PASS {name}")
    print(f"{len(_CHECKS) - failures}/{len(_CHECKS)} checks passed")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# teach demo


def _cmd_demo(_args) -> int:
    domain, hyps = _card_setup()
    print("hypotheses (id: formula):")
    for i, f in enumerate(hyps.formulas):
        marker = "  <- target" if i == hyps.target_id else ""
        print(f"  {i:2d}: {render(f)}{marker}")
    initial = 5
    print(f"\ninitial hypothesis: {render(hyps.formulas[initial])} "
          f"(id {initial}), uniform preference, demonstrations up to "
          f"length 5\n")
    cfg = TeacherConfig(l_max=5, objective="AN")
    transcript = ip_teach(hyps, initial, uniform_preference(), cfg, domain)
    for k, step in enumerate(transcript.steps, start=1):
        sign = "+" if step.demo.label == 1 else "-"
        print(f"step {k}: ({format_trajectory(step.demo.trajectory)}, "
              f"{sign}1)")
        print(f"  eliminates {len(step.eliminated)} hypotheses: "
              f"{sorted(step.eliminated)}")
        print(f"  learner moves {step.learner_before} -> "
              f"{step.learner_after}; {step.alive_after} hypotheses remain")
    print(f"\nlearner reached the target: {transcript.reached_target}")
    print(f"cost: {transcript.an_cost} demonstrations, "
          f"{transcript.al_cost} total states")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="teach",
        description="Simulate teaching bounded temporal formulas by "
                    "labeled example trajectories.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured experiment or a "
                                       "named suite")
    run_p.add_argument("--config", required=True,
                       help="key=value config file")
    run_p.add_argument("--suite", choices=SUITE_NAMES,
                       help="run this named method matrix instead of the "
                            "config's single method")
    run_p.add_argument("--seed", type=int, help="override the master seed")
    run_p.add_argument("--out", help="directory for report files")
    run_p.add_argument("--format", choices=("csv", "json"),
                       help="report file format")
    run_p.add_argument("--export-lp", metavar="DIR",
                       help="also write each session's first-step program "
                            "in LP format")
    run_p.add_argument("--short", action="store_true",
                       help="reduced sizes and 60 s timing budget")
    run_p.set_defaults(fn=_cmd_run)

    check_p = sub.add_parser("check", help="run the self-verification "
                                           "battery")
    check_p.set_defaults(fn=_cmd_check)

    demo_p = sub.add_parser("demo", help="replay the card worked example")
    demo_p.set_defaults(fn=_cmd_demo)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
