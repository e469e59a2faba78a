"""Learner-side machinery: hypothesis sets, preference models, version-space
pruning, and the stay-if-consistent learner with pluggable tie-breaking.

Preference models assign a positive score sigma(candidate; current) — lower is
more preferred. Global models ignore ``current``. The learner keeps its
hypothesis while it survives pruning and otherwise moves to a sigma-argmin
survivor, with ties resolved by a tie-break policy (theta).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from random import Random
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import BudgetExceededError
from .formulas import Atom, F, Formula, G, Threshold, normalize, render
from .semantics import Demonstration, check_demonstration, strongly_inconsistent

# ---------------------------------------------------------------------------
# Hypothesis sets and version spaces


@dataclass(frozen=True)
class HypothesisSet:
    """Ordered, duplicate-free formula collection; index = hypothesis id."""

    formulas: tuple
    target_id: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "formulas", tuple(normalize(f) for f in self.formulas))
        if len(set(self.formulas)) != len(self.formulas):
            raise ValueError("duplicate formulas in hypothesis set")
        if not 0 <= self.target_id < len(self.formulas):
            raise ValueError(f"target_id {self.target_id} out of range")

    def __len__(self) -> int:
        return len(self.formulas)

    @property
    def target(self) -> Formula:
        return self.formulas[self.target_id]

    def id_of(self, f: Formula) -> int:
        try:
            return self.formulas.index(normalize(f))
        except ValueError:
            raise KeyError(f"formula not in hypothesis set: {render(f)}") from None

    def with_target(self, target_id: int) -> "HypothesisSet":
        """The same formulas with a different designated target."""
        return HypothesisSet(self.formulas, target_id)


@dataclass(frozen=True)
class VersionSpace:
    """The subset of hypothesis ids not yet eliminated."""

    hyps: HypothesisSet
    alive: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "alive", frozenset(self.alive))
        if not self.alive <= set(range(len(self.hyps))):
            raise ValueError("alive ids out of range")
        if self.hyps.target_id not in self.alive:
            raise ValueError("target must stay in the version space")

    @classmethod
    def full(cls, hyps: HypothesisSet) -> "VersionSpace":
        return cls(hyps, frozenset(range(len(hyps))))

    def formula(self, hid: int) -> Formula:
        return self.hyps.formulas[hid]

    def alive_formulas(self):
        return [(i, self.hyps.formulas[i]) for i in sorted(self.alive)]


def prune(space: VersionSpace, demo: Demonstration, target: Formula):
    """Drop every alive hypothesis the demonstration eliminates.

    Returns ``(new_space, eliminated_ids)``. The demonstration is validated
    against the target, which guarantees the target itself survives.
    """
    check_demonstration(demo, target)
    eliminated = frozenset(
        i for i in space.alive
        if strongly_inconsistent(demo, target, space.formula(i), validate=False))
    if not eliminated:
        return space, eliminated
    return VersionSpace(space.hyps, space.alive - eliminated), eliminated


# ---------------------------------------------------------------------------
# Preference models

GLOBAL_KINDS = ("uniform", "global_ranked")


@dataclass(frozen=True)
class PreferenceModel:
    """Scoring model sigma: (candidate, current) -> positive float.

    ``kind`` is one of uniform / global_ranked / local / noisy_local. For
    noisy_local the learner draws uniformly from an inflated tie set:
    the sigma-argmin survivors plus every alive formula within
    ``perturb_radius`` neighbor steps of an argmin element. Planning
    (teacher-side) always uses ``sigma`` itself.
    """

    kind: str
    sigma_fn: Callable[[Formula, Optional[Formula]], float]
    neighbors_fn: Optional[Callable[[Formula], Iterable[Formula]]] = None
    perturb_radius: int = 0

    @property
    def is_global(self) -> bool:
        return self.kind in GLOBAL_KINDS

    def sigma(self, candidate: Formula, current: Optional[Formula] = None) -> float:
        value = self.sigma_fn(normalize(candidate),
                              None if current is None else normalize(current))
        if value <= 0:
            raise ValueError(
                f"sigma must be positive, got {value} for {render(candidate)}")
        return value

    def selection_set(self, candidates: Sequence[Formula],
                      current: Optional[Formula]) -> list:
        """Formulas the learner may move to, given the alive candidates."""
        scores = [self.sigma(f, current) for f in candidates]
        best = min(scores)
        chosen = [f for f, s in zip(candidates, scores) if s == best]
        if self.kind != "noisy_local":
            return chosen
        alive = set(candidates)
        tie = set(chosen)
        frontier = set(chosen)
        for _ in range(self.perturb_radius):
            frontier = {
                normalize(g)
                for f in frontier
                for g in self.neighbors_fn(f)
            }
            tie |= frontier & alive
        return [f for f in candidates if f in tie]


def uniform_preference() -> PreferenceModel:
    return PreferenceModel("uniform", lambda f, cur: 1.0)


def ranked_preference(ranks: Mapping[Formula, float]) -> PreferenceModel:
    """Global model: sigma(candidate) = explicit rank, independent of current."""
    table = {normalize(f): float(r) for f, r in ranks.items()}

    def sig(candidate, current):
        try:
            return table[candidate]
        except KeyError:
            raise KeyError(f"formula not ranked: {render(candidate)}") from None

    return PreferenceModel("global_ranked", sig)


def local_preference(sigma_fn, neighbors_fn=None) -> PreferenceModel:
    """Local model from an arbitrary sigma(candidate, current) callable."""
    return PreferenceModel("local", sigma_fn, neighbors_fn)


def window_shape(f: Formula):
    """(operator, window, value) for formulas F/G[<=i] (x<=v), else None."""
    g = normalize(f)
    if isinstance(g, (F, G)) and isinstance(g.sub, Atom) \
            and isinstance(g.sub.pred, Threshold):
        return ("F" if isinstance(g, F) else "G", g.tau, g.sub.pred.bound)
    return None


def manhattan_preference(i_max: int, v_max: int = 10,
                         operator_penalty: Optional[float] = None,
                         boundary_switch: bool = True) -> PreferenceModel:
    """Local model over F/G[<=i] (x<=v) shapes.

    sigma = |di| + |dv| + 1, plus ``operator_penalty`` when the candidate's
    temporal operator differs from the one the current hypothesis sticks to.
    The penalty defaults to more than twice the largest grid distance, making
    operator agreement lexicographically dominant. With ``boundary_switch``,
    a current hypothesis of the boundary form F[<=i](x<=0) or F[<=i](x<=v_max)
    flips the stickiness to G: from there G-candidates are unpenalized and
    F-candidates pay the penalty.
    """
    penalty = operator_penalty
    if penalty is None:
        penalty = 2 * (i_max + v_max - 1) + 1

    def sig(candidate, current):
        op_c, i_c, v_c = _require_shape(candidate)
        op_k, i_k, v_k = _require_shape(current)
        preferred_op = op_k
        if boundary_switch and op_k == "F" and v_k in (0, v_max):
            preferred_op = "G"
        dist = abs(i_c - i_k) + abs(v_c - v_k) + 1.0
        if op_c != preferred_op:
            dist += penalty
        return dist

    def neigh(f):
        op, i, v = _require_shape(f)
        make = F if op == "F" else G
        out = []
        if i - 1 >= 1:
            out.append(make(i - 1, Atom(Threshold(v))))
        if i + 1 <= i_max:
            out.append(make(i + 1, Atom(Threshold(v))))
        if v - 1 >= 0:
            out.append(make(i, Atom(Threshold(v - 1))))
        if v + 1 <= v_max:
            out.append(make(i, Atom(Threshold(v + 1))))
        return out

    return PreferenceModel("local", sig, neigh)


def _require_shape(f: Formula):
    shape = window_shape(f)
    if shape is None:
        raise ValueError(
            f"preference model needs F/G[<=i] (x<=v) shapes, got {render(f)}")
    return shape


def color_manhattan_preference(i_max: int,
                               color_order: Sequence[str] = (
                                   "Red", "Blue", "Green", "Yellow"),
                               operator_penalty: Optional[float] = None,
                               ) -> PreferenceModel:
    """Local model over F/G[<=i] (sym:Color) shapes.

    Colors are spaced on an integer line in ``color_order`` rank order
    (first = 1); sigma = |di| + |drank| + 1 with an operator-mismatch penalty
    and no boundary switching.
    """
    rank = {c: k + 1 for k, c in enumerate(color_order)}
    penalty = operator_penalty
    if penalty is None:
        penalty = 2 * (i_max + len(color_order) - 1) + 1

    def shape(f):
        g = normalize(f)
        if isinstance(g, (F, G)) and isinstance(g.sub, Atom) \
                and getattr(g.sub.pred, "symbol", None) in rank:
            return ("F" if isinstance(g, F) else "G", g.tau, rank[g.sub.pred.symbol])
        raise ValueError(f"expected F/G[<=i] (sym:Color), got {render(f)}")

    def sig(candidate, current):
        op_c, i_c, r_c = shape(candidate)
        op_k, i_k, r_k = shape(current)
        dist = abs(i_c - i_k) + abs(r_c - r_k) + 1.0
        if op_c != op_k:
            dist += penalty
        return dist

    return PreferenceModel("local", sig)


def noisy_preference(base: PreferenceModel, perturb_radius: int = 1,
                     neighbors_fn=None) -> PreferenceModel:
    """Noisy learner wrapper: same sigma, inflated selection tie set."""
    neigh = neighbors_fn or base.neighbors_fn
    if neigh is None:
        raise ValueError("noisy preference needs a neighbor function")
    if perturb_radius < 0:
        raise ValueError("perturb_radius must be non-negative")
    return PreferenceModel("noisy_local", base.sigma_fn, neigh, perturb_radius)


# ---------------------------------------------------------------------------
# Preferred sets


def preferred_set(space: VersionSpace, pref: PreferenceModel,
                  target: Formula) -> frozenset:
    """Hypotheses the teacher is obliged to handle.

    Global models: alive hypotheses scoring no worse than the target. Local
    models: alive hypotheses preferred over the target from the vantage of
    at least one alive hypothesis.
    """
    target = normalize(target)
    if pref.is_global:
        bound = pref.sigma(target, None)
        keep = {
            i for i, f in space.alive_formulas() if pref.sigma(f, None) <= bound
        }
    else:
        anchors = space.alive_formulas()
        keep = set()
        for i, f in anchors:
            for _, anchor in anchors:
                if pref.sigma(f, anchor) <= pref.sigma(target, anchor):
                    keep.add(i)
                    break
    keep.add(space.hyps.target_id)
    return frozenset(keep)


def preferred_version_space(current: int, space: VersionSpace,
                            pref: PreferenceModel, target: Formula) -> frozenset:
    """Alive hypotheses at most as far from ``current`` as the target is."""
    target = normalize(target)
    anchor = space.formula(current)
    bound = pref.sigma(target, anchor)
    return frozenset(
        i for i, f in space.alive_formulas() if pref.sigma(f, anchor) <= bound)


# ---------------------------------------------------------------------------
# Learner dynamics


@dataclass
class LearnerState:
    """Value object for the simulated learner; steps produce new values."""

    current: int
    space: VersionSpace
    rng: Random = field(default_factory=Random)

    def __post_init__(self) -> None:
        if self.current not in self.space.alive:
            raise ValueError("current hypothesis not alive")

    @property
    def current_formula(self) -> Formula:
        return self.space.formula(self.current)


def adversarial_choice(tie_ids: Sequence[int], space: VersionSpace,
                       pref: PreferenceModel, target: Formula) -> int:
    """Deterministic adversarial heuristic: avoid the target if possible and
    land where the target looks least preferred (largest sigma(target;
    landed)), lowest id on ties. Exact worst-case evaluation enumerates all
    branches instead."""
    return max(
        sorted(tie_ids),
        key=lambda i: (i != space.hyps.target_id,
                       pref.sigma(target, space.formula(i)), -i))


def learner_step(state: LearnerState, demo: Demonstration, target: Formula,
                 pref: PreferenceModel, theta="uniform") -> LearnerState:
    """One observation: prune, then stay if consistent, else move to a
    sigma-argmin survivor (tie set possibly inflated by a noisy model),
    resolving ties with ``theta`` (uniform / adversarial / callable)."""
    target = normalize(target)
    space, _ = prune(state.space, demo, target)
    if state.current in space.alive:
        return LearnerState(state.current, space, state.rng)
    ids = sorted(space.alive)
    candidates = [space.formula(i) for i in ids]
    chosen = pref.selection_set(candidates, state.current_formula)
    tie_ids = [i for i, f in zip(ids, candidates) if f in set(chosen)]
    if callable(theta):
        pick = theta(tie_ids, space)
    elif theta == "uniform":
        pick = state.rng.choice(tie_ids)
    elif theta == "adversarial":
        pick = adversarial_choice(tie_ids, space, pref, target)
    else:
        raise ValueError(f"unknown tie-break policy: {theta!r}")
    if pick not in space.alive:
        raise ValueError("tie-break policy selected an eliminated hypothesis")
    return LearnerState(pick, space, state.rng)


# ---------------------------------------------------------------------------
# Structural checks used by the bound experiments


def check_order_consistency(pref: PreferenceModel, hyps: HypothesisSet):
    """Whether preferring b over c from anywhere below the target transfers
    along the learner's possible moves.

    Checks, for all a, b, c: sigma(b;a) <= sigma(c;a) <= sigma(target;a)
    implies sigma(c;b) <= sigma(target;b). Returns (True, None) or
    (False, (a_id, b_id, c_id)) with the first violating triple in id order.
    """
    n = len(hyps)
    t = hyps.target_id
    sig = np.empty((n, n))
    for c, fc in enumerate(hyps.formulas):
        for a, fa in enumerate(hyps.formulas):
            sig[c, a] = pref.sigma(fc, fa)
    # conclusion[b, c]: sigma(c; b) <= sigma(target; b)
    conclusion = sig.T <= sig[t][:, None]
    for a in range(n):
        col = sig[:, a]
        premise = (col[:, None] <= col[None, :]) & (col[None, :] <= col[t])
        bad = premise & ~conclusion
        if bad.any():
            b, c = np.argwhere(bad)[0]
            return False, (a, int(b), int(c))
    return True, None


def check_cover_closure(hyps: HypothesisSet, demo_pool, target: Formula,
                        max_elim: int = 15):
    """Whether every sub-elimination of a pool demonstration is itself
    realizable by a pool demonstration (exactly).

    Returns (True, None) or (False, (demo, missing_id_subset)).
    """
    target = normalize(target)
    pool = list(demo_pool)
    elims = []
    for demo in pool:
        check_demonstration(demo, target)
        e = frozenset(
            i for i, f in enumerate(hyps.formulas)
            if strongly_inconsistent(demo, target, f, validate=False))
        if len(e) > max_elim:
            raise BudgetExceededError(
                f"elimination set of size {len(e)} exceeds the {max_elim} cap")
        elims.append(e)
    realized = set(elims)
    for demo, e in zip(pool, elims):
        members = sorted(e)
        for size in range(len(members) + 1):
            for subset in itertools.combinations(members, size):
                if frozenset(subset) not in realized:
                    return False, (demo, frozenset(subset))
    return True, None
