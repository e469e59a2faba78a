"""Seeded experiment harness: configs, paired sessions, suites, reports.

A run draws (initial, target) hypothesis pairs from a generated grid,
teaches each pair with the configured method, and aggregates costs.  The
pair and learner-randomness seeds are derived from the master seed and
the session index only, so different methods run on identical sessions
and cost deltas isolate the teacher (paired design).  Suites bundle the
method matrices for the standard comparisons; reports serialize to CSV
rows (one per session) and to JSON that round-trips losslessly.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from random import Random
from time import perf_counter
from typing import Callable, Mapping, Optional, Sequence

from .domains import (StateDomain, generate_hypothesis_grid,
                      gridworld_domain, numeric_domain, parse_trajectory)
from .errors import (BudgetExceededError, IterationCapError, NoProgressError,
                     UncoverableError)
from .formulas import Atom, F, G, Label, Threshold, normalize, parse, render
from .learner import (HypothesisSet, PreferenceModel, VersionSpace,
                      color_manhattan_preference, manhattan_preference,
                      noisy_preference, preferred_set, ranked_preference,
                      uniform_preference)
from .semantics import Demonstration, format_trajectory
from .solver import build_ip, to_lp
from .teaching import (StepRecord, TeacherConfig, TeachingTranscript,
                       _candidate_pairs, _exhaustive_choice, _implies,
                       _sample_choice, boundary_oracle, compute_demonstration,
                       exhaustive_teach, ip_teach, rg_teach,
                       teachability_checks)

__all__ = [
    "CSV_COLUMNS",
    "ExperimentConfig",
    "ExperimentReport",
    "SessionResult",
    "SUITE_NAMES",
    "build_preference",
    "emit",
    "export_lp_programs",
    "load_config",
    "parse_config",
    "report_from_json",
    "report_to_json",
    "run_experiment",
    "run_suite",
    "strip_timing",
    "suite_configs",
    "teachable_target_ids",
]

CSV_COLUMNS = ("suite", "method", "a", "session", "an_cost", "al_cost",
               "steps", "solver_ms", "completed")

_ENGINES = ("ip", "exhaustive", "rg")
_PREFERENCES = ("uniform", "global_implication", "local_manhattan",
                "noisy_local")
_DOMAINS = ("numeric", "gridworld")


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """One method on one grid: everything a session run depends on."""

    suite: str = "custom"
    method: str = "an_ip"
    domain: str = "numeric"
    a: int = 5
    preference: str = "uniform"
    perturb_radius: int = 1
    operator_penalty: Optional[float] = None
    adaptive: bool = True
    positive_only: bool = False
    oracle: str = "none"
    l_max: Optional[int] = None
    sample_size: int = 64
    sessions: int = 10
    seed: int = 0
    target_filter: str = "any"
    step_only: bool = False
    node_budget: int = 2_000_000
    time_budget: Optional[float] = None
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self) -> None:
        objective, _, engine = self.method.partition("_")
        if objective not in ("an", "al") or engine not in _ENGINES:
            raise ValueError(
                f"unknown method {self.method!r}; expected "
                f"{{an|al}}_{{ip|exhaustive|rg}}")
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.preference not in _PREFERENCES:
            raise ValueError(f"unknown preference {self.preference!r}")
        if self.oracle not in ("none", "boundary"):
            raise ValueError(f"unknown oracle {self.oracle!r}")
        if self.oracle == "boundary" and self.domain != "numeric":
            raise ValueError("the boundary oracle needs the numeric domain")
        if self.target_filter not in ("any", "teachable"):
            raise ValueError(f"unknown target_filter {self.target_filter!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.a < 1:
            raise ValueError(f"window bound a must be >= 1, got {self.a}")
        if self.sessions < 1:
            raise ValueError(f"sessions must be >= 1, got {self.sessions}")
        if self.l_max is not None and self.l_max < self.a:
            warnings.warn(
                f"l_max={self.l_max} is below the window bound a={self.a}; "
                f"wide-window hypotheses cannot be eliminated",
                stacklevel=2)

    @property
    def objective(self) -> str:
        return self.method.partition("_")[0].upper()

    @property
    def engine(self) -> str:
        return self.method.partition("_")[2]

    @property
    def resolved_l_max(self) -> int:
        return self.l_max if self.l_max is not None else self.a + 1

    @property
    def method_label(self) -> str:
        """The CSV method column: the method plus any deviating knobs."""
        label = self.method
        if self.positive_only:
            label += "_pos"
        if not self.adaptive:
            label += "_nonadaptive"
        if self.oracle != "none":
            label += "_oracle"
        if self.step_only:
            label += f"_lmax{self.resolved_l_max}"
        return label


_CONFIG_TYPES: Mapping[str, Callable] = {
    "suite": str, "method": str, "domain": str, "preference": str,
    "oracle": str, "target_filter": str, "out": str, "format": str,
    "a": int, "perturb_radius": int, "l_max": int, "sample_size": int,
    "sessions": int, "seed": int, "node_budget": int,
    "operator_penalty": float, "time_budget": float,
    "adaptive": None, "positive_only": None, "step_only": None,
}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"config key {key!r} expects a boolean, got {raw!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config format (# starts a comment)."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, "
                             f"got {line!r}")
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in _CONFIG_TYPES:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        caster = _CONFIG_TYPES[key]
        if caster is None:
            values[key] = _parse_bool(val, key)
        else:
            try:
                values[key] = caster(val)
            except ValueError as exc:
                raise ValueError(
                    f"config line {lineno}: bad value for {key!r}: {val!r}"
                ) from exc
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Domain and preference construction


def _build_domain(name: str) -> StateDomain:
    return numeric_domain() if name == "numeric" else gridworld_domain()


def build_preference(cfg: ExperimentConfig, domain: StateDomain,
                     grid: HypothesisSet) -> PreferenceModel:
    """The preference model named by ``cfg.preference`` for this grid."""
    if cfg.preference == "uniform":
        return uniform_preference()
    if cfg.preference == "global_implication":
        return _implication_ranking(grid, cfg.a, domain)
    if domain.is_numeric:
        base = manhattan_preference(cfg.a, 10,
                                    operator_penalty=cfg.operator_penalty)
        neighbors = None
    else:
        base = color_manhattan_preference(
            cfg.a, color_order=domain.alphabet,
            operator_penalty=cfg.operator_penalty)
        neighbors = _color_neighbors(cfg.a, tuple(domain.alphabet))
    if cfg.preference == "local_manhattan":
        return base
    return noisy_preference(base, cfg.perturb_radius,
                            neighbors_fn=neighbors)


def _color_neighbors(i_max: int, colors: tuple):
    """Grid moves for color-shaped formulas: window +-1, color rank +-1."""
    def neigh(f):
        g = normalize(f)
        make = F if isinstance(g, F) else G
        idx = colors.index(g.sub.pred.symbol)
        out = []
        if g.tau - 1 >= 1:
            out.append(make(g.tau - 1, g.sub))
        if g.tau + 1 <= i_max:
            out.append(make(g.tau + 1, g.sub))
        if idx - 1 >= 0:
            out.append(make(g.tau, Atom(Label(colors[idx - 1]))))
        if idx + 1 < len(colors):
            out.append(make(g.tau, Atom(Label(colors[idx + 1]))))
        return out
    return neigh


def _implication_ranking(grid: HypothesisSet, a: int,
                         domain: StateDomain) -> PreferenceModel:
    """Global ranking that prefers implying formulas to implied ones.

    F-shapes rank by window + predicate strength (tight windows and strong
    predicates first); G-shapes rank after every F-shape and by falling
    window.  Within each operator family this linearizes semantic
    implication over the grid: whenever one grid formula implies another,
    the implying one is strictly preferred.
    """
    offset = float(a + 10)
    ranks: dict = {}
    for f in grid.formulas:
        g = normalize(f)
        pred = g.sub.pred
        strength = (pred.bound if isinstance(pred, Threshold)
                    else domain.alphabet.index(pred.symbol) + 1)
        if isinstance(g, F):
            ranks[f] = 1.0 + g.tau + strength
        else:
            ranks[f] = 1.0 + offset + (a - g.tau) + strength
    return ranked_preference(ranks)


def teachable_target_ids(grid: HypothesisSet, pref: PreferenceModel,
                         domain: StateDomain, l_max: int) -> tuple:
    """Targets passing the positive-only conditions within ``l_max``.

    A target qualifies when no strictly preferred hypothesis is implied by
    it and every preferred hypothesis is eliminable by an example no longer
    than ``l_max`` (requirement + 1 states for the strong verdict).
    """
    out = []
    for t in range(len(grid)):
        report = teachability_checks(grid.with_target(t), pref, domain)
        if (report["implication_ok"]
                and report["positive_length_required"] + 1 <= l_max):
            out.append(t)
    return tuple(out)


# ---------------------------------------------------------------------------
# Session results and reports


@dataclass(frozen=True)
class SessionResult:
    """One taught session (or one timed step) of one method."""

    suite: str
    method: str
    a: int
    session: int
    initial_id: int
    target_id: int
    an_cost: int
    al_cost: int
    steps: int
    solver_ms: float
    completed: bool
    error: Optional[str] = None
    transcript: Optional[TeachingTranscript] = None

    @property
    def timed_out(self) -> bool:
        return bool(self.error) and self.error.startswith(
            "BudgetExceededError")

    @property
    def completed_cell(self) -> str:
        """CSV value: True, False, or TIMEOUT for budget-stopped sessions."""
        if self.timed_out:
            return "TIMEOUT"
        return str(self.completed)


def _aggregate(sessions: Sequence[SessionResult], methods: Sequence[str],
               pairs: Sequence[tuple]) -> tuple:
    stats: dict = {}
    for method in methods:
        rows = [s for s in sessions if s.method == method]
        done = [s for s in rows if s.completed]
        entry = {"sessions": len(rows), "completed": len(done)}
        if done:
            entry.update(
                mean_an=sum(s.an_cost for s in done) / len(done),
                mean_al=sum(s.al_cost for s in done) / len(done),
                min_an=min(s.an_cost for s in done),
                max_an=max(s.an_cost for s in done),
                min_al=min(s.al_cost for s in done),
                max_al=max(s.al_cost for s in done),
                mean_solver_ms=sum(s.solver_ms for s in done) / len(done),
            )
        else:
            entry.update(mean_an=None, mean_al=None, min_an=None,
                         max_an=None, min_al=None, max_al=None,
                         mean_solver_ms=None)
        stats[method] = entry
    deltas: dict = {}
    for left, right in pairs:
        a, b = stats.get(left), stats.get(right)
        if not a or not b or a["mean_an"] is None or b["mean_an"] is None:
            continue
        deltas[f"{left}_vs_{right}"] = {
            "an_diff": a["mean_an"] - b["mean_an"],
            "al_diff": a["mean_al"] - b["mean_al"],
        }
    return stats, deltas


@dataclass(frozen=True)
class ExperimentReport:
    """All sessions of one suite cell (one grid size, one or more methods)."""

    suite: str
    domain: str
    preference: str
    a: int
    l_max: int
    seed: int
    methods: tuple
    pairs: tuple
    sessions: tuple
    aggregates: dict = field(default_factory=dict)
    deltas: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        stats, deltas = _aggregate(self.sessions, self.methods, self.pairs)
        if not self.aggregates and not self.deltas:
            object.__setattr__(self, "aggregates", stats)
            object.__setattr__(self, "deltas", deltas)
            return
        if stats != self.aggregates or deltas != self.deltas:
            raise ValueError("stored aggregates do not match the sessions")


def strip_timing(report: ExperimentReport) -> ExperimentReport:
    """The report with wall-clock milliseconds zeroed.

    Every logical field (draws, demonstrations, labels, costs, node
    counts, aggregates) is seed-determined; the measured per-step times
    are not.  Equality of stripped reports is the reproducibility check.
    """
    def scrub(t: Optional[TeachingTranscript]):
        if t is None:
            return None
        return replace(t, steps=tuple(replace(s, solver_ms=0.0)
                                      for s in t.steps))

    sessions = tuple(
        replace(s, solver_ms=0.0, transcript=scrub(s.transcript))
        for s in report.sessions)
    return ExperimentReport(
        suite=report.suite, domain=report.domain,
        preference=report.preference, a=report.a, l_max=report.l_max,
        seed=report.seed, methods=report.methods, pairs=report.pairs,
        sessions=sessions)


# ---------------------------------------------------------------------------
# Running sessions


def _derive_seed(master: int, *parts) -> int:
    text = ":".join(str(p) for p in (master, *parts))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _uniform_theta(rng: Random):
    def theta(tie_ids, space):
        return rng.choice(sorted(tie_ids))
    return theta


def _draw_pair(cfg: ExperimentConfig, grid: HypothesisSet,
               teachable: Optional[tuple], domain: StateDomain,
               session: int) -> tuple:
    """The session's (initial, target) ids; method-independent."""
    rng = Random(_derive_seed(cfg.seed, "draw", cfg.domain, cfg.a, session))
    n = len(grid)
    if teachable is None:
        initial, target = rng.sample(range(n), 2)
        return initial, target
    if not teachable:
        raise NoProgressError(
            "no target in this grid passes the teachability conditions")
    target = teachable[rng.randrange(len(teachable))]
    goal = grid.formulas[target]
    bound = 2 * (cfg.a + 10)
    eligible = [i for i in range(n) if i != target and not _implies(
        goal, grid.formulas[i], domain.alphabet, bound)]
    initial = eligible[rng.randrange(len(eligible))]
    return initial, target


def _run_session(cfg: ExperimentConfig, grid: HypothesisSet,
                 domain: StateDomain, pref: PreferenceModel,
                 teachable: Optional[tuple], session: int) -> SessionResult:
    initial, target = _draw_pair(cfg, grid, teachable, domain, session)
    hyps = grid.with_target(target)
    tcfg = TeacherConfig(
        l_max=cfg.resolved_l_max, objective=cfg.objective,
        adaptive=cfg.adaptive, myopic=cfg.oracle == "none",
        positive_only=cfg.positive_only, node_budget=cfg.node_budget,
        time_budget=cfg.time_budget)
    theta = _uniform_theta(Random(
        _derive_seed(cfg.seed, "learner", cfg.domain, cfg.a, session)))
    teacher_seed = _derive_seed(cfg.seed, "teacher", cfg.domain, cfg.a,
                                session)
    oracle = boundary_oracle if cfg.oracle == "boundary" else None
    base = dict(suite=cfg.suite, method=cfg.method_label, a=cfg.a,
                session=session, initial_id=initial, target_id=target)
    try:
        if cfg.step_only:
            return _run_single_step(cfg, hyps, domain, pref, tcfg, base,
                                    teacher_seed)
        if cfg.engine == "ip":
            transcript = ip_teach(hyps, initial, pref, tcfg, domain,
                                  oracle=oracle, theta=theta,
                                  seed=teacher_seed)
        elif cfg.engine == "exhaustive":
            transcript = exhaustive_teach(hyps, initial, pref, tcfg, domain,
                                          oracle=oracle, theta=theta,
                                          seed=teacher_seed)
        else:
            transcript = rg_teach(hyps, initial, pref, tcfg, domain,
                                  sample_size=cfg.sample_size, oracle=oracle,
                                  theta=theta, seed=teacher_seed)
    except (NoProgressError, BudgetExceededError, IterationCapError,
            UncoverableError) as exc:
        return SessionResult(**base, an_cost=0, al_cost=0, steps=0,
                             solver_ms=0.0, completed=False,
                             error=f"{type(exc).__name__}: {exc}")
    return SessionResult(**base, an_cost=transcript.an_cost,
                         al_cost=transcript.al_cost,
                         steps=len(transcript.steps),
                         solver_ms=transcript.solver_ms,
                         completed=transcript.reached_target,
                         transcript=transcript)


def _run_single_step(cfg: ExperimentConfig, hyps: HypothesisSet,
                     domain: StateDomain, pref: PreferenceModel,
                     tcfg: TeacherConfig, base: dict,
                     teacher_seed: int) -> SessionResult:
    """Time one myopic step from the full version space (timing suite)."""
    space = VersionSpace.full(hyps)
    candidates = (frozenset(preferred_set(space, pref, hyps.target))
                  | {base["initial_id"]}) - {hyps.target_id}
    start = perf_counter()
    try:
        if cfg.engine == "ip":
            choice = compute_demonstration(space, candidates, hyps.target,
                                           tcfg, domain)
        elif cfg.engine == "exhaustive":
            choice = _exhaustive_choice(space, candidates, hyps.target, tcfg,
                                        domain, ())
        else:
            choice = _sample_choice(space, candidates, hyps.target, tcfg,
                                    domain, (), Random(teacher_seed),
                                    cfg.sample_size)
    except (NoProgressError, BudgetExceededError) as exc:
        return SessionResult(**base, an_cost=0, al_cost=0, steps=0,
                             solver_ms=(perf_counter() - start) * 1e3,
                             completed=False,
                             error=f"{type(exc).__name__}: {exc}")
    return SessionResult(**base, an_cost=1, al_cost=choice.length, steps=1,
                         solver_ms=choice.ms, completed=True)


def _thread_count() -> int:
    raw = os.environ.get("TEACH_THREADS", "").strip()
    if not raw:
        return 1
    count = int(raw)
    if count < 1:
        raise ValueError(f"TEACH_THREADS must be >= 1, got {raw!r}")
    return count


def _run_method(cfg: ExperimentConfig, grid: HypothesisSet,
                domain: StateDomain, teachable: Optional[tuple]) -> list:
    pref = build_preference(cfg, domain, grid)
    runner = lambda s: _run_session(cfg, grid, domain, pref, teachable, s)
    threads = _thread_count()
    indices = range(cfg.sessions)
    if threads == 1:
        return [runner(s) for s in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(runner, indices))


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run one method's sessions and aggregate (reproducible from cfg)."""
    domain = _build_domain(cfg.domain)
    grid = generate_hypothesis_grid(domain, cfg.a)
    teachable = None
    if cfg.target_filter == "teachable":
        pref = build_preference(cfg, domain, grid)
        teachable = teachable_target_ids(grid, pref, domain,
                                         cfg.resolved_l_max)
    sessions = _run_method(cfg, grid, domain, teachable)
    return ExperimentReport(
        suite=cfg.suite, domain=cfg.domain, preference=cfg.preference,
        a=cfg.a, l_max=cfg.resolved_l_max, seed=cfg.seed,
        methods=(cfg.method_label,), pairs=(), sessions=tuple(sessions))


# ---------------------------------------------------------------------------
# Suites


@dataclass(frozen=True)
class _MethodSpec:
    method: str
    adaptive: bool = True
    positive_only: bool = False
    oracle: str = "none"
    l_max: Optional[int] = None
    step_only: bool = False


@dataclass(frozen=True)
class _SuiteSpec:
    preference: str
    methods: tuple
    pairs: tuple = ()
    a_values: tuple = (5, 10, 15)
    target_filter: str = "any"
    sessions: Optional[int] = None


SUITES: Mapping[str, _SuiteSpec] = {
    "global_uniform": _SuiteSpec(
        preference="uniform",
        methods=(_MethodSpec("an_ip"), _MethodSpec("al_ip"),
                 _MethodSpec("an_rg"), _MethodSpec("al_rg")),
        pairs=(("an_ip", "an_rg"), ("al_ip", "al_rg"),
               ("an_ip", "al_ip"))),
    "positive_only": _SuiteSpec(
        preference="global_implication",
        methods=(_MethodSpec("an_ip"),
                 _MethodSpec("an_ip", positive_only=True)),
        pairs=(("an_ip_pos", "an_ip"),),
        target_filter="teachable"),
    "adaptive_vs_nonadaptive": _SuiteSpec(
        preference="noisy_local",
        methods=(_MethodSpec("an_ip"), _MethodSpec("an_ip", adaptive=False),
                 _MethodSpec("al_ip"), _MethodSpec("al_ip", adaptive=False),
                 _MethodSpec("an_rg"), _MethodSpec("an_rg", adaptive=False),
                 _MethodSpec("al_rg"), _MethodSpec("al_rg", adaptive=False)),
        pairs=(("an_ip", "an_ip_nonadaptive"),
               ("al_ip", "al_ip_nonadaptive"),
               ("an_rg", "an_rg_nonadaptive"),
               ("al_rg", "al_rg_nonadaptive"))),
    "oracle_vs_plain": _SuiteSpec(
        preference="local_manhattan",
        methods=(_MethodSpec("an_ip"),
                 _MethodSpec("an_ip", oracle="boundary"),
                 _MethodSpec("al_ip"),
                 _MethodSpec("al_ip", oracle="boundary")),
        pairs=(("an_ip_oracle", "an_ip"),
               ("al_ip_oracle", "al_ip"))),
    "timing": _SuiteSpec(
        preference="uniform",
        methods=tuple(_MethodSpec(f"{obj}_{eng}", l_max=lm, step_only=True)
                      for obj, eng in (("an", "ip"), ("an", "exhaustive"))
                      for lm in (5, 10, 15)),
        a_values=(15,),
        sessions=1),
}

SUITE_NAMES = tuple(SUITES)


def suite_configs(name: str, *, domain: str = "numeric",
                  a_values: Optional[Sequence[int]] = None,
                  sessions: int = 10, seed: int = 0, short: bool = False,
                  time_budget: Optional[float] = None,
                  sample_size: int = 64, perturb_radius: int = 1) -> tuple:
    """The named suite's config matrix: one tuple of configs per grid size."""
    spec = SUITES.get(name)
    if spec is None:
        raise ValueError(
            f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    a_values = tuple(a_values) if a_values is not None else spec.a_values
    if short and a_values == spec.a_values and name != "timing":
        a_values = a_values[:1]
    sessions = spec.sessions if spec.sessions is not None else sessions
    if short and name != "timing":
        sessions = min(sessions, 3)
    node_budget = 2_000_000
    if name == "timing":
        if time_budget is None:
            time_budget = 60.0 if short else 300 * 60.0
        node_budget = 10**12
    with warnings.catch_warnings():
        if name == "timing":
            # The timing matrix sweeps l_max below the window bound on
            # purpose; the low-l_max advisory is noise there.
            warnings.simplefilter("ignore", UserWarning)
        return tuple(
            tuple(ExperimentConfig(
                suite=name, method=ms.method, domain=domain, a=a,
                preference=spec.preference, perturb_radius=perturb_radius,
                adaptive=ms.adaptive, positive_only=ms.positive_only,
                oracle=ms.oracle, l_max=ms.l_max, sample_size=sample_size,
                sessions=sessions, seed=seed,
                target_filter=spec.target_filter, step_only=ms.step_only,
                node_budget=node_budget, time_budget=time_budget)
                for ms in spec.methods)
            for a in a_values)


def run_suite(name: str, *, domain: str = "numeric",
              a_values: Optional[Sequence[int]] = None,
              sessions: int = 10, seed: int = 0, short: bool = False,
              time_budget: Optional[float] = None,
              sample_size: int = 64, perturb_radius: int = 1) -> tuple:
    """Run a named method matrix; one report per grid size, paired seeds."""
    spec = SUITES.get(name)
    if spec is None:
        raise ValueError(
            f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    groups = suite_configs(
        name, domain=domain, a_values=a_values, sessions=sessions,
        seed=seed, short=short, time_budget=time_budget,
        sample_size=sample_size, perturb_radius=perturb_radius)
    reports = []
    for group in groups:
        all_sessions: list = []
        labels: list = []
        l_max = None
        for cfg in group:
            report = run_experiment(cfg)
            all_sessions.extend(report.sessions)
            labels.append(cfg.method_label)
            l_max = report.l_max if l_max is None else max(l_max,
                                                           report.l_max)
        reports.append(ExperimentReport(
            suite=name, domain=domain, preference=spec.preference,
            a=group[0].a, l_max=l_max, seed=seed, methods=tuple(labels),
            pairs=tuple(spec.pairs), sessions=tuple(all_sessions)))
    return tuple(reports)


# ---------------------------------------------------------------------------
# Emission


def _csv_text(reports: Sequence[ExperimentReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        for s in report.sessions:
            writer.writerow([
                s.suite, s.method, s.a, s.session,
                s.an_cost if s.completed else "",
                s.al_cost if s.completed else "",
                s.steps if s.completed else "",
                f"{s.solver_ms:.3f}", s.completed_cell])
    return buffer.getvalue()


def _summary_text(reports: Sequence[ExperimentReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["suite", "method", "a", "sessions", "completed",
                     "mean_an", "mean_al", "min_an", "max_an", "min_al",
                     "max_al", "mean_solver_ms"])
    fmt = lambda v: "" if v is None else (f"{v:.4f}" if isinstance(v, float)
                                          else v)
    for report in reports:
        for method in report.methods:
            st = report.aggregates[method]
            writer.writerow([report.suite, method, report.a, st["sessions"],
                             st["completed"], fmt(st["mean_an"]),
                             fmt(st["mean_al"]), fmt(st["min_an"]),
                             fmt(st["max_an"]), fmt(st["min_al"]),
                             fmt(st["max_al"]), fmt(st["mean_solver_ms"])])
    return buffer.getvalue()


def _step_to_json(step: StepRecord) -> dict:
    return {
        "trajectory": format_trajectory(step.demo.trajectory),
        "label": step.demo.label,
        "step_target": render(step.step_target),
        "variant": step.variant,
        "kappa": step.kappa,
        "counted": sorted(step.counted),
        "eliminated": sorted(step.eliminated),
        "learner_before": step.learner_before,
        "learner_after": step.learner_after,
        "alive_after": step.alive_after,
        "solver_nodes": step.solver_nodes,
        "solver_ms": step.solver_ms,
        "optimal": step.optimal,
    }


def _step_from_json(data: dict, domain: StateDomain) -> StepRecord:
    demo = Demonstration(parse_trajectory(data["trajectory"], domain),
                         data["label"])
    return StepRecord(
        demo=demo, step_target=parse(data["step_target"]),
        variant=data["variant"], kappa=data["kappa"],
        counted=frozenset(data["counted"]),
        eliminated=frozenset(data["eliminated"]),
        learner_before=data["learner_before"],
        learner_after=data["learner_after"],
        alive_after=data["alive_after"],
        solver_nodes=data["solver_nodes"], solver_ms=data["solver_ms"],
        optimal=data["optimal"])


def _transcript_to_json(t: Optional[TeachingTranscript]) -> Optional[dict]:
    if t is None:
        return None
    return {
        "steps": [_step_to_json(s) for s in t.steps],
        "hypothesis_path": list(t.hypothesis_path),
        "target_id": t.target_id,
        "reached_target": t.reached_target,
        "an_cost": t.an_cost,
        "al_cost": t.al_cost,
    }


def _transcript_from_json(data: Optional[dict],
                          domain: StateDomain
                          ) -> Optional[TeachingTranscript]:
    if data is None:
        return None
    return TeachingTranscript(
        steps=tuple(_step_from_json(s, domain) for s in data["steps"]),
        hypothesis_path=tuple(data["hypothesis_path"]),
        target_id=data["target_id"],
        reached_target=data["reached_target"],
        an_cost=data["an_cost"], al_cost=data["al_cost"])


def _session_to_json(s: SessionResult) -> dict:
    return {
        "suite": s.suite, "method": s.method, "a": s.a,
        "session": s.session, "initial_id": s.initial_id,
        "target_id": s.target_id, "an_cost": s.an_cost,
        "al_cost": s.al_cost, "steps": s.steps, "solver_ms": s.solver_ms,
        "completed": s.completed, "error": s.error,
        "transcript": _transcript_to_json(s.transcript),
    }


def _session_from_json(data: dict, domain: StateDomain) -> SessionResult:
    return SessionResult(
        suite=data["suite"], method=data["method"], a=data["a"],
        session=data["session"], initial_id=data["initial_id"],
        target_id=data["target_id"], an_cost=data["an_cost"],
        al_cost=data["al_cost"], steps=data["steps"],
        solver_ms=data["solver_ms"], completed=data["completed"],
        error=data["error"],
        transcript=_transcript_from_json(data["transcript"], domain))


def report_to_json(reports) -> str:
    """Serialize report(s) to JSON (lossless; see report_from_json)."""
    many = isinstance(reports, (list, tuple))
    items = list(reports) if many else [reports]
    payload = [{
        "suite": r.suite, "domain": r.domain, "preference": r.preference,
        "a": r.a, "l_max": r.l_max, "seed": r.seed,
        "methods": list(r.methods),
        "pairs": [list(p) for p in r.pairs],
        "aggregates": r.aggregates, "deltas": r.deltas,
        "sessions": [_session_to_json(s) for s in r.sessions],
    } for r in items]
    return json.dumps(payload if many else payload[0], ensure_ascii=False,
                      indent=2)


def report_from_json(text: str):
    """Inverse of report_to_json: rebuild report(s) from JSON text."""
    data = json.loads(text)
    many = isinstance(data, list)
    items = data if many else [data]
    reports = []
    for d in items:
        domain = _build_domain(d["domain"])
        reports.append(ExperimentReport(
            suite=d["suite"], domain=d["domain"],
            preference=d["preference"], a=d["a"], l_max=d["l_max"],
            seed=d["seed"], methods=tuple(d["methods"]),
            pairs=tuple(tuple(p) for p in d["pairs"]),
            sessions=tuple(_session_from_json(s, domain)
                           for s in d["sessions"]),
            aggregates=d["aggregates"], deltas=d["deltas"]))
    return tuple(reports) if many else reports[0]


def export_lp_programs(cfg: ExperimentConfig, out_dir) -> list:
    """Write each session's winning first-step program in LP text format.

    Replays the session draws, finds the first greedy choice, rebuilds
    that (label, length) cell's integer program, and writes one ``.lp``
    file per session; returns the written paths.
    """
    domain = _build_domain(cfg.domain)
    grid = generate_hypothesis_grid(domain, cfg.a)
    pref = build_preference(cfg, domain, grid)
    teachable = None
    if cfg.target_filter == "teachable":
        teachable = teachable_target_ids(grid, pref, domain,
                                         cfg.resolved_l_max)
    tcfg = TeacherConfig(
        l_max=cfg.resolved_l_max, objective=cfg.objective,
        positive_only=cfg.positive_only, node_budget=cfg.node_budget,
        time_budget=cfg.time_budget)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for session in range(cfg.sessions):
        initial, target = _draw_pair(cfg, grid, teachable, domain, session)
        hyps = grid.with_target(target)
        space = VersionSpace.full(hyps)
        candidates = (frozenset(preferred_set(space, pref, hyps.target))
                      | {initial}) - {target}
        try:
            choice = compute_demonstration(space, candidates, hyps.target,
                                           tcfg, domain)
        except NoProgressError:
            continue
        pairs = _candidate_pairs(space, candidates, hyps.target, ())
        inst = build_ip(choice.variant, [f for _, f in pairs], hyps.target,
                        choice.length, domain, objective=cfg.objective)
        path = out / (f"{cfg.suite}_{cfg.method_label}_a{cfg.a}_"
                      f"s{session}.lp")
        path.write_text(to_lp(inst), encoding="utf-8")
        written.append(str(path))
    return written


def emit(reports, out_dir, fmt: str = "csv", *, stem: str = None) -> list:
    """Write report files; returns the written paths."""
    many = isinstance(reports, (list, tuple))
    items = list(reports) if many else [reports]
    if not items:
        raise ValueError("nothing to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    stem = stem or items[0].suite
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if fmt == "csv":
            sessions_path = out / f"{stem}.csv"
            sessions_path.write_text(_csv_text(items), encoding="utf-8")
            written.append(sessions_path)
            summary_path = out / f"{stem}_summary.csv"
            summary_path.write_text(_summary_text(items), encoding="utf-8")
            written.append(summary_path)
        else:
            path = out / f"{stem}.json"
            path.write_text(report_to_json(reports), encoding="utf-8")
            written.append(path)
        return [str(p) for p in written]
    except OSError as exc:
        raise OSError(f"cannot write reports under {out}: {exc}") from exc
