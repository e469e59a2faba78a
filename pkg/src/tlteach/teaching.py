"""Greedy teaching sessions for preference-biased version-space learners.

A session repeatedly synthesizes one labeled demonstration, shows it to a
stay-if-consistent learner, and ends when the learner holds the target
hypothesis.  Each step maximizes candidate eliminations (AN) or
eliminations per trace state (AL) over both labels and every admissible
length.  The teachers differ only in how a step's demonstration is found:

* :func:`ip_teach` solves the fixed-length synthesis program per cell,
* :func:`exhaustive_teach` enumerates every admissible trajectory,
* :func:`rg_teach` samples random rollouts and keeps the best.

Sessions may be adaptive (the teacher observes the learner between
demonstrations) or non-adaptive (the teacher simulates a worst-case
learner and commits to the resulting sequence).  An oracle may supply
intermediate step targets; the true target is then shielded from
elimination by a hard constraint.  Offline analyses cover exact
minimum-cost demonstration covers, worst cases over learner tie-breaks,
and necessary teachability conditions.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import islice, product
from random import Random
from time import perf_counter
from typing import Iterable, Optional, Sequence

import numpy as np

from .domains import random_rollout
from .errors import (BudgetExceededError, InfeasibleInstanceError,
                     InfeasibleLengthError, IterationCapError,
                     NoProgressError, UncoverableError)
from .formulas import (Atom, F, Formula, Threshold, implies_bruteforce,
                       implies_syntactic, minimal_length, normalize, render)
from .learner import (HypothesisSet, LearnerState, PreferenceModel,
                      VersionSpace, learner_step, preferred_set,
                      preferred_version_space)
from .semantics import (Demonstration, check_demonstration, verdict,
                        verdicts_bulk)
from .solver import _window_atom, build_ip, solve_ip

__all__ = [
    "StepChoice",
    "StepRecord",
    "TeacherConfig",
    "TeachingTranscript",
    "boundary_oracle",
    "compute_demonstration",
    "cost_metrics",
    "enumerate_demo_pool",
    "exhaustive_teach",
    "ip_teach",
    "min_demo_length",
    "optimal_cover_teach",
    "positive_only_teach",
    "rg_teach",
    "teachability_checks",
    "teaching_complexity",
    "worst_case_costs",
]

_VARIANT_LABEL = {"pos": 1, "neg": -1}


@dataclass(frozen=True, slots=True)
class TeacherConfig:
    """Session-wide knobs shared by every teacher.

    ``l_max`` bounds demonstration lengths; ``objective`` picks the per-step
    score (eliminations for AN, eliminations per state for AL).  With
    ``adaptive`` off the teacher cannot observe the learner and instead
    simulates a worst-case one.  With ``myopic`` off an oracle supplies
    intermediate step targets.  ``positive_only`` restricts every step to
    positively labeled demonstrations.  The budgets apply to each per-step
    search.
    """

    l_max: int
    objective: str = "AN"
    adaptive: bool = True
    myopic: bool = True
    positive_only: bool = False
    node_budget: int = 2_000_000
    time_budget: Optional[float] = None

    def __post_init__(self) -> None:
        if self.objective not in ("AN", "AL"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.l_max < 1:
            raise ValueError(f"l_max must be >= 1, got {self.l_max}")


@dataclass(frozen=True, slots=True)
class StepChoice:
    """One per-step search result: the demonstration and its score.

    ``counted`` holds the candidate ids the objective credits; ``kappa``
    is their number.  ``nodes`` and ``ms`` report search effort;
    ``optimal`` is False only when a budget truncated the search and an
    incumbent was kept.
    """

    demo: Demonstration
    variant: str
    length: int
    counted: frozenset
    kappa: int
    nodes: int
    ms: float
    optimal: bool

    @property
    def ratio(self) -> Fraction:
        """Eliminations per trace state, the AL objective value."""
        return Fraction(self.kappa, self.length)


@dataclass(frozen=True, slots=True)
class StepRecord:
    """One emitted demonstration with its bookkeeping.

    ``counted`` are the objective-credited candidate ids, ``eliminated``
    every alive hypothesis the demonstration removed.  ``step_target`` is
    what the demonstration was synthesized for (the true target unless an
    oracle interposed an intermediate one).
    """

    demo: Demonstration
    step_target: Formula
    variant: str
    kappa: int
    counted: frozenset
    eliminated: frozenset
    learner_before: int
    learner_after: int
    alive_after: int
    solver_nodes: int
    solver_ms: float
    optimal: bool


@dataclass(frozen=True, slots=True)
class TeachingTranscript:
    """A completed session: demonstrations plus the learner's hypothesis path.

    ``hypothesis_path`` starts at the initial hypothesis and records the
    learner's id after each demonstration; costs are the demonstration
    count (``an_cost``) and the total number of trace states (``al_cost``).
    Consistency between the fields is enforced on construction.
    """

    steps: tuple
    hypothesis_path: tuple
    target_id: int
    reached_target: bool
    an_cost: int
    al_cost: int

    def __post_init__(self) -> None:
        if self.an_cost != len(self.steps):
            raise ValueError("an_cost must equal the number of steps")
        if self.al_cost != sum(len(s.demo.trajectory) for s in self.steps):
            raise ValueError("al_cost must equal the summed trace lengths")
        if len(self.hypothesis_path) != len(self.steps) + 1:
            raise ValueError("hypothesis path must have one entry per step "
                             "plus the initial hypothesis")
        for k, step in enumerate(self.steps):
            if (step.learner_before != self.hypothesis_path[k]
                    or step.learner_after != self.hypothesis_path[k + 1]):
                raise ValueError("step records disagree with the path")
        if self.reached_target != (self.hypothesis_path[-1] == self.target_id):
            raise ValueError("reached_target disagrees with the path")

    @property
    def solver_ms(self) -> float:
        """Total per-step search time in milliseconds."""
        return sum(s.solver_ms for s in self.steps)


def _transcript(steps: list, path: list, target_id: int) -> TeachingTranscript:
    return TeachingTranscript(
        steps=tuple(steps), hypothesis_path=tuple(path), target_id=target_id,
        reached_target=path[-1] == target_id, an_cost=len(steps),
        al_cost=sum(len(s.demo.trajectory) for s in steps))


def cost_metrics(transcript: TeachingTranscript) -> tuple:
    """(demonstration count, total trace states) for a finished session."""
    return (transcript.an_cost, transcript.al_cost)


def min_demo_length(target: Formula, eliminated: Iterable[Formula],
                    label: int) -> int:
    """Length floor for a demonstration with this label and elimination set.

    The trace must be long enough both to give the target the labeled
    verdict and to drive every eliminated formula to the opposite strong
    verdict; an empty elimination set leaves only the target's requirement.
    """
    need = minimal_length(normalize(target), label)
    elim = max((minimal_length(normalize(f), -label) for f in eliminated),
               default=0)
    return max(need, elim)


# ---------------------------------------------------------------------------
# Per-step demonstration search


def _candidate_pairs(space: VersionSpace, candidate_ids, step_target: Formula,
                     forbid: tuple) -> list:
    """(id, formula) pairs the objective may credit, in id order.

    Formulas equal to the step target or to a protected formula are
    skipped: the synthesis constraints make them impossible to eliminate.
    """
    blocked = set(forbid)
    blocked.add(step_target)
    return [(i, f) for i in sorted(candidate_ids)
            if (f := space.formula(i)) not in blocked]


def _solve_cell(pairs: list, step_target: Formula, variant: str, length: int,
                cfg: TeacherConfig, domain, forbid: tuple):
    """Best demonstration for one (label, length) cell, or None if infeasible."""
    try:
        inst = build_ip(variant, [f for _, f in pairs], step_target, length,
                        domain, objective=cfg.objective, forbid=forbid)
    except InfeasibleLengthError:
        return None
    start = perf_counter()
    try:
        sol = solve_ip(inst, node_budget=cfg.node_budget,
                       time_budget=cfg.time_budget)
    except InfeasibleInstanceError:
        return None
    ms = (perf_counter() - start) * 1e3
    counted = frozenset(pairs[j][0] for j in sol.eliminated)
    demo = Demonstration(sol.trajectory, _VARIANT_LABEL[variant])
    return StepChoice(demo=demo, variant=variant, length=length,
                      counted=counted, kappa=sol.kappa, nodes=sol.nodes,
                      ms=ms, optimal=sol.optimal)


def _choice_key(cfg: TeacherConfig, kappa: int, length: int):
    """Scan ordering: AN favors more eliminations then shorter traces; AL
    favors the elimination rate then more eliminations."""
    if cfg.objective == "AL":
        return (Fraction(kappa, length), kappa)
    return (kappa, -length)


def _variants(cfg: TeacherConfig) -> tuple:
    return ("pos",) if cfg.positive_only else ("pos", "neg")


def compute_demonstration(space: VersionSpace, preferred, step_target: Formula,
                          cfg: TeacherConfig, domain, *,
                          forbid: tuple = ()) -> StepChoice:
    """One greedy step: the objective-best demonstration for the step target.

    Scans positive before negative labels and lengths from the feasibility
    floor up to ``cfg.l_max``, solving one synthesis program per cell and
    keeping strict improvements only, so label and length ties resolve
    toward positive labels and shorter traces.  ``preferred`` lists the
    candidate ids the objective credits.  Raises :class:`NoProgressError`
    when no cell eliminates any candidate.
    """
    step_target = normalize(step_target)
    pairs = _candidate_pairs(space, preferred, step_target, forbid)
    best = best_key = None
    for variant in _variants(cfg):
        label = _VARIANT_LABEL[variant]
        floor = minimal_length(step_target, label) + 1
        if pairs:
            floor = max(floor,
                        1 + min(minimal_length(f, -label) for _, f in pairs))
        for length in range(floor, cfg.l_max + 1):
            cell = _solve_cell(pairs, step_target, variant, length, cfg,
                               domain, forbid)
            if cell is None or cell.kappa == 0:
                continue
            key = _choice_key(cfg, cell.kappa, length)
            if best is None or key > best_key:
                best, best_key = cell, key
    if best is None:
        raise NoProgressError(
            f"no demonstration up to length {cfg.l_max} eliminates any of "
            f"{len(pairs)} candidates for step target {render(step_target)}")
    return best


def _all_trajectories(domain, length: int):
    """Every admissible trajectory of the given length, lexicographically."""
    transition = getattr(domain, "transition", None)
    if transition is None:
        yield from product(domain.alphabet, repeat=length)
        return
    alphabet = tuple(domain.alphabet)
    stack = [(s,) for s in reversed(alphabet)]
    while stack:
        prefix = stack.pop()
        if len(prefix) == length:
            yield prefix
            continue
        allowed = transition.get(prefix[-1], alphabet)
        for s in reversed([v for v in alphabet if v in allowed]):
            stack.append(prefix + (s,))


_CHUNK = 4096


def _exhaustive_choice(space: VersionSpace, preferred, step_target: Formula,
                       cfg: TeacherConfig, domain,
                       forbid: tuple) -> StepChoice:
    """The same greedy step as :func:`compute_demonstration`, found by
    enumerating every admissible trajectory instead of solving programs.

    Trajectories are scored in lexicographic batches with the vectorized
    verdict evaluator.  ``cfg.node_budget`` caps examined trajectories and
    ``cfg.time_budget`` the wall-clock seconds; exceeding either raises
    :class:`BudgetExceededError`.
    """
    step_target = normalize(step_target)
    pairs = _candidate_pairs(space, preferred, step_target, forbid)
    deadline = (None if cfg.time_budget is None
                else perf_counter() + cfg.time_budget)
    start = perf_counter()
    best = best_key = None
    examined = 0
    for variant in _variants(cfg):
        label = _VARIANT_LABEL[variant]
        for length in range(1, cfg.l_max + 1):
            cell_kappa = 0
            cell_rho = None
            gen = _all_trajectories(domain, length)
            while True:
                chunk = list(islice(gen, _CHUNK))
                if not chunk:
                    break
                if examined + len(chunk) > cfg.node_budget:
                    raise BudgetExceededError(
                        f"enumeration budget exhausted after "
                        f"{cfg.node_budget} trajectories")
                examined += len(chunk)
                if deadline is not None and perf_counter() > deadline:
                    raise BudgetExceededError(
                        f"enumeration time budget exhausted after "
                        f"{examined} trajectories")
                rows = np.array(chunk)
                ok = verdicts_bulk(step_target, rows) == label
                for g in forbid:
                    ok &= verdicts_bulk(g, rows) != -label
                if not ok.any():
                    continue
                kappas = np.zeros(len(chunk), dtype=np.int32)
                for _, f in pairs:
                    kappas += verdicts_bulk(f, rows) == -label
                kappas[~ok] = 0
                hit = int(np.argmax(kappas))  # first max = lex-least
                if kappas[hit] > cell_kappa:
                    cell_kappa, cell_rho = int(kappas[hit]), chunk[hit]
            if cell_kappa == 0:
                continue
            key = _choice_key(cfg, cell_kappa, length)
            if best is None or key > best_key:
                counted = frozenset(i for i, f in pairs
                                    if verdict(f, cell_rho) == -label)
                best_key = key
                best = StepChoice(
                    demo=Demonstration(tuple(cell_rho), label),
                    variant=variant, length=length, counted=counted,
                    kappa=cell_kappa, nodes=examined, ms=0.0, optimal=True)
    if best is None:
        raise NoProgressError(
            f"no demonstration up to length {cfg.l_max} eliminates any of "
            f"{len(pairs)} candidates for step target {render(step_target)}")
    return replace(best, nodes=examined,
                   ms=(perf_counter() - start) * 1e3)


def _sample_choice(space: VersionSpace, preferred, step_target: Formula,
                   cfg: TeacherConfig, domain, forbid: tuple, rng: Random,
                   sample_size: int) -> StepChoice:
    """One randomized-greedy step: the objective-best of ``sample_size``
    random valid demonstrations (uniform length, random rollout states).

    Unlike the exact searches a zero-gain best is allowed; the session's
    iteration cap catches pathological stalls.  Raises
    :class:`NoProgressError` only when no valid sample could be drawn.
    """
    step_target = normalize(step_target)
    pairs = _candidate_pairs(space, preferred, step_target, forbid)
    start = perf_counter()
    best = best_key = None
    drawn = 0
    attempts = 0
    limit = max(200, sample_size * 200)
    while drawn < sample_size and attempts < limit:
        attempts += 1
        length = rng.randint(1, cfg.l_max)
        _, rho = random_rollout(domain, length, rng)
        label = verdict(step_target, rho)
        if label == 0 or (cfg.positive_only and label != 1):
            continue
        if any(verdict(g, rho) == -label for g in forbid):
            continue
        drawn += 1
        counted = frozenset(i for i, f in pairs if verdict(f, rho) == -label)
        key = (Fraction(len(counted), length) if cfg.objective == "AL"
               else len(counted))
        if best is None or key > best_key:
            best_key = key
            best = StepChoice(
                demo=Demonstration(rho, label),
                variant="pos" if label == 1 else "neg", length=length,
                counted=counted, kappa=len(counted), nodes=attempts, ms=0.0,
                optimal=False)
    if best is None:
        raise NoProgressError(
            f"no valid demonstration found in {attempts} samples for step "
            f"target {render(step_target)}")
    return replace(best, nodes=attempts, ms=(perf_counter() - start) * 1e3)


# ---------------------------------------------------------------------------
# The session driver


def _resolve_theta(cfg: TeacherConfig, theta):
    """Observed sessions default to uniform tie-breaks; simulated ones to
    the worst case."""
    if theta is not None:
        return theta
    return "uniform" if cfg.adaptive else "adversarial"


def _drive(hyps: HypothesisSet, initial: int, pref: PreferenceModel,
           cfg: TeacherConfig, domain, chooser, *, oracle=None, theta=None,
           seed: int = 0) -> TeachingTranscript:
    """Shared session loop.

    ``chooser(space, candidate_ids, step_target, forbid, state)`` produces
    the per-step demonstration.  The loop owns everything else: preferred
    sets, oracle interposition and its fallback, elimination bookkeeping,
    the length-floor assertion, and the learner transition.
    """
    if not 0 <= initial < len(hyps):
        raise ValueError(f"initial hypothesis id {initial} out of range")
    if not cfg.myopic and oracle is None:
        raise ValueError("an oracle is required when myopic is off")
    theta = _resolve_theta(cfg, theta)
    true_target = hyps.target
    target_id = hyps.target_id
    state = LearnerState(initial, VersionSpace.full(hyps), Random(seed))
    # A non-adaptive teacher cannot observe the learner: it plans every
    # step around an internal worst-case simulation of one instead.
    sim = None if cfg.adaptive else state
    steps: list = []
    path = [initial]
    cap = max(1, 10 * len(hyps))
    while state.current != target_id:
        if len(steps) >= cap:
            raise IterationCapError(
                f"learner not at the target after {cap} demonstrations "
                f"(space of {len(hyps)})")
        space = state.space
        anchor = state.current if sim is None else sim.current
        step_target = true_target
        forbid: tuple = ()
        if not cfg.myopic:
            suggested = normalize(oracle(anchor, space, true_target))
            if suggested != true_target:
                step_target, forbid = suggested, (true_target,)

        def candidates(ambition):
            # Each step plans around the hypotheses preferred over its own
            # ambition (the intermediate target, when an oracle interposes).
            # The learner's (believed) current hypothesis joins them: a
            # stay-if-consistent learner only moves once it is contradicted.
            if pref.is_global:
                obliged = preferred_set(space, pref, ambition)
            else:
                obliged = preferred_version_space(anchor, space, pref,
                                                  ambition)
            ids = (set(obliged) | {anchor}) & space.alive
            ids.discard(target_id)
            return frozenset(ids)

        try:
            choice = chooser(space, candidates(step_target), step_target,
                             forbid, state)
        except (NoProgressError, KeyError):
            # Oracle stall — no usable demonstration, or a suggestion the
            # preference cannot even score: fall back to the true target.
            if step_target == true_target:
                raise
            step_target, forbid = true_target, ()
            choice = chooser(space, candidates(true_target), step_target,
                             forbid, state)
        demo = choice.demo
        check_demonstration(demo, step_target)
        eliminated = frozenset(
            i for i in space.alive
            if verdict(space.formula(i), demo.trajectory) == -demo.label)
        if target_id in eliminated:
            raise AssertionError("a demonstration eliminated the target")
        if not choice.counted <= eliminated:
            raise AssertionError("credited ids outside the eliminated set")
        floor = min_demo_length(step_target,
                                [space.formula(i) for i in eliminated],
                                demo.label)
        if len(demo.trajectory) < floor:
            raise AssertionError(
                f"demonstration of length {len(demo.trajectory)} below the "
                f"elimination floor {floor}")
        nxt = learner_step(state, demo, step_target, pref, theta)
        if sim is not None:
            sim = learner_step(sim, demo, step_target, pref, "adversarial")
        steps.append(StepRecord(
            demo=demo, step_target=step_target, variant=choice.variant,
            kappa=choice.kappa, counted=choice.counted, eliminated=eliminated,
            learner_before=state.current, learner_after=nxt.current,
            alive_after=len(nxt.space.alive), solver_nodes=choice.nodes,
            solver_ms=choice.ms, optimal=choice.optimal))
        path.append(nxt.current)
        state = nxt
    return _transcript(steps, path, target_id)


def ip_teach(hyps: HypothesisSet, initial: int, pref: PreferenceModel,
             cfg: TeacherConfig, domain, *, oracle=None, theta=None,
             seed: int = 0) -> TeachingTranscript:
    """Greedy teaching with the integer-program step search.

    Adaptive sessions observe the learner's hypothesis between
    demonstrations; non-adaptive ones commit to the sequence produced
    against a simulated worst-case learner.  With ``cfg.myopic`` off the
    ``oracle(current_id, space, target)`` callable names each step's
    intermediate target and the true target is shielded from elimination.
    """
    def choose(space, cand_ids, step_target, forbid, state):
        return compute_demonstration(space, cand_ids, step_target, cfg,
                                     domain, forbid=forbid)

    return _drive(hyps, initial, pref, cfg, domain, choose, oracle=oracle,
                  theta=theta, seed=seed)


def exhaustive_teach(hyps: HypothesisSet, initial: int, pref: PreferenceModel,
                     cfg: TeacherConfig, domain, *, oracle=None, theta=None,
                     seed: int = 0) -> TeachingTranscript:
    """Greedy teaching with brute-force per-step search.

    Step for step this matches :func:`ip_teach` (same scan order, same
    tie-breaks); it exists as an independent reference and scales only to
    small alphabets and lengths.  Budgets from the config cap each step's
    enumeration and raise :class:`BudgetExceededError`.
    """
    def choose(space, cand_ids, step_target, forbid, state):
        return _exhaustive_choice(space, cand_ids, step_target, cfg, domain,
                                  forbid)

    return _drive(hyps, initial, pref, cfg, domain, choose, oracle=oracle,
                  theta=theta, seed=seed)


def rg_teach(hyps: HypothesisSet, initial: int, pref: PreferenceModel,
             cfg: TeacherConfig, domain, *, sample_size: int = 64,
             oracle=None, theta=None, seed: int = 0) -> TeachingTranscript:
    """Randomized-greedy teaching: best of ``sample_size`` random valid
    demonstrations per step.

    Zero-gain steps are allowed (the learner simply stays); the session's
    iteration cap turns persistent stalls into :class:`IterationCapError`.
    """
    if sample_size < 1:
        raise ValueError(f"sample_size must be >= 1, got {sample_size}")

    def choose(space, cand_ids, step_target, forbid, state):
        return _sample_choice(space, cand_ids, step_target, cfg, domain,
                              forbid, state.rng, sample_size)

    return _drive(hyps, initial, pref, cfg, domain, choose, oracle=oracle,
                  theta=theta, seed=seed)


def positive_only_teach(hyps: HypothesisSet, initial: int,
                        pref: PreferenceModel, cfg: TeacherConfig, domain, *,
                        oracle=None, theta=None,
                        seed: int = 0) -> TeachingTranscript:
    """:func:`ip_teach` restricted to positively labeled demonstrations.

    Sessions whose preferred set cannot be eliminated by examples alone end
    in :class:`NoProgressError` (the necessary conditions are reported by
    :func:`teachability_checks`).
    """
    return ip_teach(hyps, initial, pref, replace(cfg, positive_only=True),
                    domain, oracle=oracle, theta=theta, seed=seed)


# ---------------------------------------------------------------------------
# Demonstration pools and exact minimum covers


def enumerate_demo_pool(domain, target: Formula, max_length: int, *,
                        positive_only: bool = False) -> tuple:
    """Every valid demonstration up to ``max_length``: each admissible
    trajectory with a decided verdict on the target, labeled by it."""
    target = normalize(target)
    pool = []
    for length in range(1, max_length + 1):
        for rho in _all_trajectories(domain, length):
            v = verdict(target, rho)
            if v == 0 or (positive_only and v != 1):
                continue
            pool.append(Demonstration(rho, v))
    return tuple(pool)


def optimal_cover_teach(pool: Sequence[Demonstration], preferred, target:
                        Formula, objective: str = "AN") -> tuple:
    """Cheapest subset of the pool eliminating every preferred formula.

    Cost is the demonstration count (AN) or the summed trace lengths (AL).
    Exact branch-and-bound: branch on the uncovered formula with the
    fewest covering demonstrations, cheapest cover first.  Returns the
    chosen demonstrations in pool order.  Raises
    :class:`UncoverableError` when even the whole pool leaves some
    preferred formula alive.
    """
    if objective not in ("AN", "AL"):
        raise ValueError(f"unknown objective {objective!r}")
    target = normalize(target)
    goals = [f for f in dict.fromkeys(normalize(g) for g in preferred)
             if f != target]
    for demo in pool:
        check_demonstration(demo, target)
    if not goals:
        return ()
    masks = []
    costs = []
    for demo in pool:
        m = 0
        for k, g in enumerate(goals):
            if verdict(g, demo.trajectory) == -demo.label:
                m |= 1 << k
        masks.append(m)
        costs.append(1 if objective == "AN" else len(demo.trajectory))
    want = (1 << len(goals)) - 1
    reachable = 0
    for m in masks:
        reachable |= m
    if reachable != want:
        missing = [render(goals[k]) for k in range(len(goals))
                   if not reachable >> k & 1]
        raise UncoverableError(
            f"no demonstration in the pool eliminates: {', '.join(missing)}")
    coverers = [sorted((j for j, m in enumerate(masks) if m >> k & 1),
                       key=lambda j: (costs[j], j))
                for k in range(len(goals))]
    best_cost = sum(costs) + 1
    best_sel: Optional[tuple] = None

    def descend(covered: int, cost: int, chosen: tuple) -> None:
        nonlocal best_cost, best_sel
        if cost >= best_cost:
            return
        if covered == want:
            best_cost, best_sel = cost, chosen
            return
        k = min((k for k in range(len(goals)) if not covered >> k & 1),
                key=lambda k: len(coverers[k]))
        for j in coverers[k]:
            if j in chosen:
                continue
            descend(covered | masks[j], cost + costs[j], chosen + (j,))

    descend(0, 0, ())
    if best_sel is None:
        raise AssertionError("cover search missed a reachable cover")
    return tuple(pool[j] for j in sorted(best_sel))


# ---------------------------------------------------------------------------
# Worst cases, complexity, and teachability


def worst_case_costs(hyps: HypothesisSet, initial: int, pref: PreferenceModel,
                     cfg: TeacherConfig, domain, *, teacher=None, oracle=None,
                     run_budget: int = 20_000) -> tuple:
    """Maximum (demonstration count, total states) over every learner
    tie-break realization.

    Replays the teacher once per realization with a scripted tie-break
    policy, walking the realization tree depth-first; intended for tiny
    instances.  Raises :class:`BudgetExceededError` past ``run_budget``
    replays.
    """
    teach = teacher if teacher is not None else ip_teach
    script: list = []
    worst_an = worst_al = 0
    runs = 0
    while True:
        runs += 1
        if runs > run_budget:
            raise BudgetExceededError(
                f"tie-break enumeration budget of {run_budget} runs exceeded")
        pos = 0
        sizes: list = []

        def scripted(tie_ids, space):
            nonlocal pos
            tie = sorted(tie_ids)
            if pos == len(script):
                script.append(0)
            sizes.append(len(tie))
            pick = tie[script[pos]]
            pos += 1
            return pick

        transcript = teach(hyps, initial, pref, cfg, domain, oracle=oracle,
                           theta=scripted, seed=0)
        worst_an = max(worst_an, transcript.an_cost)
        worst_al = max(worst_al, transcript.al_cost)
        del script[pos:]
        while script and script[-1] + 1 >= sizes[len(script) - 1]:
            script.pop()
        if not script:
            return (worst_an, worst_al)
        script[-1] += 1


def teaching_complexity(hyps: HypothesisSet, pref: PreferenceModel,
                        cfg: TeacherConfig, domain) -> tuple:
    """Cost floor over all teachers: the cheapest demonstration sets
    covering the preferred hypotheses, from the exhaustive pool up to
    ``cfg.l_max`` (count-minimal, length-minimal)."""
    space = VersionSpace.full(hyps)
    target = hyps.target
    obliged = preferred_set(space, pref, target)
    goals = [space.formula(i) for i in sorted(obliged)
             if i != hyps.target_id and space.formula(i) != target]
    if not goals:
        return (0, 0)
    pool = enumerate_demo_pool(domain, target, cfg.l_max,
                               positive_only=cfg.positive_only)
    an_cover = optimal_cover_teach(pool, goals, target, "AN")
    al_cover = optimal_cover_teach(pool, goals, target, "AL")
    return (len(an_cover), sum(len(d.trajectory) for d in al_cover))


def _implies(f1: Formula, f2: Formula, alphabet, l_bound: int) -> bool:
    status = implies_syntactic(f1, f2)
    if status != "unknown":
        return status == "holds"
    return implies_bruteforce(f1, f2, alphabet, l_bound)


def teachability_checks(hyps: HypothesisSet, pref: PreferenceModel, domain,
                        demos: Sequence[Demonstration] = (), *,
                        target: Optional[Formula] = None,
                        implication_bound: Optional[int] = None) -> dict:
    """Necessary conditions for teaching the target under a global model.

    Reports three checks over the preferred set: the positive-only length
    condition (some demonstration at least as long as every preferred
    hypothesis's negative-verdict requirement), the implication condition
    (no strictly more preferred hypothesis implied by the target, hence
    never eliminable by examples), and the mixed-label length condition
    (each preferred hypothesis eliminable by one of the two labels within
    the longest demonstration).  Witness ids accompany each check.
    """
    if not pref.is_global:
        raise ValueError("teachability conditions need a global "
                         "preference model")
    target = normalize(target if target is not None else hyps.target)
    space = VersionSpace.full(hyps)
    obliged = preferred_set(space, pref, target)
    others = [(i, space.formula(i)) for i in sorted(obliged)
              if space.formula(i) != target]
    max_len = max((len(d.trajectory) for d in demos), default=0)

    pos_need, pos_witness = 0, None
    for i, f in others:
        z = minimal_length(f, -1)
        if z > pos_need:
            pos_need, pos_witness = z, i

    mixed_need, mixed_witness = 0, None
    for i, f in others:
        z = min(minimal_length(f, 1), minimal_length(f, -1))
        if z > mixed_need:
            mixed_need, mixed_witness = z, i

    if implication_bound is None:
        implication_bound = 2 + max(
            (minimal_length(f, 1) + minimal_length(f, -1)
             for _, f in others), default=0)
    rank_of_target = pref.sigma(target, None)
    implication_ok, implication_witness = True, None
    for i, f in others:
        if (pref.sigma(f, None) < rank_of_target
                and _implies(target, f, domain.alphabet, implication_bound)):
            implication_ok, implication_witness = False, i
            break

    return {
        "preferred_ids": tuple(i for i, _ in others),
        "max_demo_length": max_len,
        "positive_length_required": pos_need,
        "positive_length_ok": max_len >= pos_need,
        "positive_length_witness": pos_witness,
        "implication_ok": implication_ok,
        "implication_witness": implication_witness,
        "positive_only_teachable": implication_ok and max_len >= pos_need,
        "mixed_length_required": mixed_need,
        "mixed_length_ok": max_len >= mixed_need,
        "mixed_length_witness": mixed_witness,
    }


def boundary_oracle(current: int, space: VersionSpace, target: Formula, *,
                    boundary_values: tuple = (0, 10)) -> Formula:
    """Intermediate-target oracle for threshold worlds.

    While the learner holds an eventually-window over a non-extreme
    threshold and the target is an always-window, steer toward the weakest
    eventually-window first (its threshold at the alphabet maximum), from
    where the always-windows are locally reachable; otherwise hand over
    the true target.
    """
    target = normalize(target)
    shape = _window_atom(normalize(space.formula(current)))
    goal = _window_atom(target)
    if (shape is not None and goal is not None
            and shape[0] == "F" and goal[0] == "G"
            and isinstance(shape[2], Threshold)
            and shape[2].bound not in boundary_values):
        return F(1, Atom(Threshold(max(boundary_values))))
    return target
