"""Fixed-length demonstration synthesis as an implicit 0/1 program.

An instance asks for one trajectory of a fixed length whose verdict on the
target formula equals the session label (+1 example, -1 counterexample),
maximizing the number of candidate hypotheses driven to the opposite strong
verdict.  The relaxation is one-sided: an elimination indicator ``b_j`` may
be set only when candidate ``j`` is eliminated, and maximization makes the
implication tight.

Three solving paths share the same contract:

* a prefix-extrema dynamic program for numeric single-window instances
  (every formula of the form ``F/G[<=i] (x<=v)`` over an integer alphabet),
* a seen-symbols dynamic program for label single-window instances
  (``F/G[<=i] (sym:c)``), which also honors transition restrictions,
* a budgeted depth-first branch-and-bound over partial trajectories for
  everything else, pruned by a three-valued evaluation that is sound in
  both directions (a decided value holds for every completion).

All paths break objective ties toward the lexicographically smallest
trajectory under the instance's state ordering.  ``to_lp`` renders any
instance as CPLEX LP text over one-hot state variables ``s_t_v`` and
indicators ``b_j``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import (BudgetExceededError, InfeasibleInstanceError,
                     InfeasibleLengthError)
from .formulas import (And, Atom, F, Formula, G, Label, Not, Threshold,
                       TrueF, minimal_length, normalize, render)
from .semantics import verdict

__all__ = [
    "IpInstance",
    "IpSolution",
    "build_ip",
    "objective_value",
    "solve_ip",
    "to_lp",
]


@dataclass(frozen=True, slots=True)
class IpInstance:
    """One fixed-length synthesis problem.

    ``candidates`` are the hypotheses whose elimination the objective counts;
    the target is never among them.  ``alphabet`` fixes both the admissible
    states and the tie-break order.  ``transition`` (state -> allowed
    successors) and ``initial`` (a forced first state) are optional
    restrictions; ``None`` leaves them unconstrained.  ``forbid`` lists
    protected formulas the trajectory must never drive to the strong
    opposite verdict (used to keep the session's true target alive while
    teaching toward an intermediate one, or to spare the learner's current
    hypothesis when that costs nothing).
    """

    variant: str
    target: Formula
    candidates: tuple
    length: int
    alphabet: tuple
    transition: Optional[Mapping] = None
    initial: object = None
    objective: str = "AN"
    forbid: tuple = ()

    @property
    def label(self) -> int:
        """Session label implied by the variant: +1 for pos, -1 for neg."""
        return 1 if self.variant == "pos" else -1


@dataclass(frozen=True, slots=True)
class IpSolution:
    """A trajectory plus the candidate indices it eliminates.

    ``kappa`` equals ``len(eliminated)``; ``optimal`` is False only when a
    branch-and-bound budget expired and the incumbent was returned instead
    of a proven optimum.  ``nodes`` counts solver expansions (DP transitions
    or search nodes), for diagnostics.
    """

    trajectory: tuple
    eliminated: frozenset
    kappa: int
    optimal: bool
    nodes: int


def build_ip(variant: str, candidates: Sequence[Formula], target: Formula,
             length: int, domain, *, objective: str = "AN",
             initial: object = None, forbid=None) -> IpInstance:
    """Assemble and gate an instance.

    Raises ``InfeasibleLengthError`` when ``length`` is too short either to
    produce the required verdict on the target or to eliminate even the
    easiest candidate (a strong verdict needs strictly more states than the
    formula's minimal-length requirement).  An empty candidate set is a
    valid instance with objective value 0.  ``forbid`` may be a single
    formula, a collection of formulas, or None.
    """
    if variant not in ("pos", "neg"):
        raise ValueError(f"unknown variant {variant!r}")
    if objective not in ("AN", "AL"):
        raise ValueError(f"unknown objective {objective!r}")
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    tgt = normalize(target)
    cands = tuple(normalize(c) for c in candidates)
    seen = set()
    for c in cands:
        if c in seen:
            raise ValueError(f"duplicate candidate {render(c)}")
        seen.add(c)
    if tgt in seen:
        raise ValueError("target must not appear among the candidates")
    alphabet = tuple(domain.alphabet)
    if not alphabet:
        raise ValueError("domain alphabet is empty")
    transition = getattr(domain, "transition", None)
    if initial is not None and initial not in alphabet:
        raise ValueError(f"initial state {initial!r} not in the alphabet")
    label = 1 if variant == "pos" else -1
    need = minimal_length(tgt, label) + 1
    if length < need:
        raise InfeasibleLengthError(
            f"length {length} cannot give the target verdict {label:+d}; "
            f"at least {need} states are required")
    if cands:
        easiest = min(minimal_length(c, -label) for c in cands)
        if length < easiest + 1:
            raise InfeasibleLengthError(
                f"length {length} cannot eliminate any candidate; the "
                f"easiest elimination requires {easiest + 1} states")
    if forbid is None:
        items = []
    elif isinstance(forbid, (set, frozenset)):
        items = sorted(forbid, key=render)
    elif isinstance(forbid, (tuple, list)):
        items = list(forbid)
    else:
        items = [forbid]
    protected = tuple(dict.fromkeys(normalize(g) for g in items))
    return IpInstance(variant=variant, target=tgt, candidates=cands,
                      length=length, alphabet=alphabet, transition=transition,
                      initial=initial, objective=objective, forbid=protected)


def solve_ip(inst: IpInstance, *, node_budget: int = 2_000_000,
             time_budget: Optional[float] = None) -> IpSolution:
    """Maximize eliminations subject to the target verdict.

    Dispatches to a polynomial dynamic program when every formula in the
    instance is a single temporal window over one atom, and to budgeted
    branch-and-bound otherwise.  Raises ``InfeasibleInstanceError`` when no
    trajectory of the requested length produces the target verdict, and
    ``BudgetExceededError`` when the search budget expires with no feasible
    incumbent.
    """
    shapes = _grid_shapes(inst)
    if shapes is not None:
        kind, tgt_shape, forbid_shapes, cand_shapes = shapes
        if kind == "numeric" and inst.transition is None:
            return _solve_numeric(inst, tgt_shape, forbid_shapes, cand_shapes)
        if kind == "label" and len(inst.alphabet) <= 12:
            return _solve_mask(inst, tgt_shape, forbid_shapes, cand_shapes)
    return _solve_branch_bound(inst, node_budget, time_budget)


def objective_value(solution: IpSolution, inst: IpInstance) -> Fraction:
    """The instance's declared objective: count for AN, count/length for AL."""
    if inst.objective == "AL":
        return Fraction(solution.kappa, inst.length)
    return Fraction(solution.kappa)


# --------------------------------------------------------------------------
# shared shape analysis


def _window_atom(f: Formula):
    """(op, window, predicate) for ``F/G[<=i]`` over one atom, else None."""
    if isinstance(f, (F, G)) and isinstance(f.sub, Atom):
        return ("F" if isinstance(f, F) else "G", f.tau, f.sub.pred)
    return None


def _grid_shapes(inst: IpInstance):
    """Classify the instance for the specialized dynamic programs.

    Returns ``(kind, target_shape, forbid_shapes, candidate_shapes)`` with
    kind ``"numeric"`` (all thresholds over an integer alphabet) or
    ``"label"`` (all symbols over a string alphabet), or None when any
    formula falls outside the single-window form.
    """
    shapes = [_window_atom(inst.target)]
    shapes.extend(_window_atom(g) for g in inst.forbid)
    shapes.extend(_window_atom(c) for c in inst.candidates)
    if any(s is None for s in shapes):
        return None
    preds = [s[2] for s in shapes]
    offset = 1 + len(inst.forbid)
    forbid_shapes = shapes[1:offset]
    if (all(isinstance(p, Threshold) for p in preds)
            and all(isinstance(v, int) for v in inst.alphabet)):
        return ("numeric", shapes[0], forbid_shapes, shapes[offset:])
    if (all(isinstance(p, Label) for p in preds)
            and all(isinstance(v, str) for v in inst.alphabet)):
        return ("label", shapes[0], forbid_shapes, shapes[offset:])
    return None


def _close_time(op: str, required: int, tau: int, length: int):
    """Step index at which the required verdict becomes determined.

    Verdicts that need the full window inside the trace (a counterexample
    for F, an example for G) are impossible when the window overhangs; those
    return None.  The permissive directions close at the window end or the
    last step, whichever is earlier.
    """
    strict = (op == "F" and required == -1) or (op == "G" and required == 1)
    if strict:
        return tau if tau <= length - 1 else None
    return min(tau, length - 1)


def _finish(inst: IpInstance, trajectory: tuple, nodes: int,
            optimal: bool = True) -> IpSolution:
    label = inst.label
    eliminated = frozenset(
        j for j, c in enumerate(inst.candidates)
        if verdict(c, trajectory) == -label)
    if verdict(inst.target, trajectory) != label:
        raise AssertionError(
            "solver produced a trajectory that misses the target verdict")
    if any(verdict(g, trajectory) == -label for g in inst.forbid):
        raise AssertionError(
            "solver produced a trajectory that violates a protected formula")
    return IpSolution(trajectory=trajectory, eliminated=eliminated,
                      kappa=len(eliminated), optimal=optimal, nodes=nodes)


# --------------------------------------------------------------------------
# numeric path: prefix-extrema dynamic program

_NUM_PRED = {
    ("F", 1): lambda lo, hi, v: lo <= v,
    ("F", -1): lambda lo, hi, v: lo > v,
    ("G", 1): lambda lo, hi, v: hi <= v,
    ("G", -1): lambda lo, hi, v: hi > v,
}


def _solve_numeric(inst: IpInstance, tgt_shape, forbid_shapes,
                   cand_shapes) -> IpSolution:
    """Exact DP over (prefix minimum, prefix maximum) pairs.

    Every verdict of a threshold window is a predicate on the prefix
    extrema at one cutoff step, so the optimum over all |alphabet|^L
    trajectories collapses to a layered graph over extrema pairs.
    """
    length, label = inst.length, inst.label
    order = {v: k for k, v in enumerate(inst.alphabet)}

    t_op, t_tau, t_pred = tgt_shape
    t_close = _close_time(t_op, label, t_tau, length)
    if t_close is None:
        raise InfeasibleInstanceError(
            f"no trajectory of length {length} gives the target "
            f"verdict {label:+d}")
    t_check = _NUM_PRED[(t_op, label)]
    t_bound = t_pred.bound

    guards: list[list] = [[] for _ in range(length)]
    for (f_op, f_tau, f_pred) in forbid_shapes:
        close = _close_time(f_op, -label, f_tau, length)
        if close is not None:
            guards[close].append((_NUM_PRED[(f_op, -label)], f_pred.bound))

    gains: list[list] = [[] for _ in range(length)]
    for (op, tau, pred) in cand_shapes:
        close = _close_time(op, -label, tau, length)
        if close is not None:
            gains[close].append((_NUM_PRED[(op, -label)], pred.bound))

    def gain(t: int, lo, hi) -> int:
        return sum(1 for check, v in gains[t] if check(lo, hi, v))

    def ok(t: int, lo, hi) -> bool:
        if t == t_close and not t_check(lo, hi, t_bound):
            return False
        return not any(check(lo, hi, v) for check, v in guards[t])

    nodes = 0
    # value[state] = best gain from close times strictly after step t,
    # honoring the target check at its close time; -1 marks a dead end.
    value = {}
    for s in inst.alphabet:
        for u in inst.alphabet:
            lo, hi = min(s, u), max(s, u)
            value.setdefault((lo, hi), 0)
    layers = [value]
    for t in range(length - 1, 0, -1):
        prev = {}
        nxt = layers[0]
        for (lo, hi) in nxt:
            for s in inst.alphabet:
                nodes += 1
                lo2, hi2 = min(lo, s), max(hi, s)
                after = nxt.get((lo2, hi2))
                if after is None or after < 0 or not ok(t, lo2, hi2):
                    continue
                got = gain(t, lo2, hi2) + after
                if got > prev.get((lo, hi), -1):
                    prev[(lo, hi)] = got
        full = {key: prev.get(key, -1) for key in nxt}
        layers.insert(0, full)

    starts = inst.alphabet if inst.initial is None else (inst.initial,)
    best = -1
    for s in starts:
        nodes += 1
        if not ok(0, s, s):
            continue
        after = layers[0].get((s, s), -1)
        if after < 0:
            continue
        best = max(best, gain(0, s, s) + after)
    if best < 0:
        raise InfeasibleInstanceError(
            f"no trajectory of length {length} gives the target "
            f"verdict {label:+d}")

    trajectory = []
    lo = hi = None
    remaining = best
    for t in range(length):
        choices = starts if t == 0 else inst.alphabet
        for s in sorted(choices, key=order.__getitem__):
            lo2 = s if lo is None else min(lo, s)
            hi2 = s if hi is None else max(hi, s)
            if not ok(t, lo2, hi2):
                continue
            after = layers[t].get((lo2, hi2), -1) if t < length - 1 else 0
            if t == length - 1:
                after = 0 if (lo2, hi2) in layers[t] else -1
            if after < 0:
                continue
            here = gain(t, lo2, hi2)
            if here + after == remaining:
                trajectory.append(s)
                lo, hi = lo2, hi2
                remaining -= here
                break
        else:
            raise AssertionError("numeric DP walk lost the optimum")
    solution = _finish(inst, tuple(trajectory), nodes)
    if solution.kappa != best:
        raise AssertionError("numeric DP objective mismatch")
    return solution


# --------------------------------------------------------------------------
# label path: seen-symbols dynamic program

def _mask_pred(op: str, required: int):
    if op == "F" and required == 1:
        return lambda mask, bit: bool(mask & bit)
    if op == "F" and required == -1:
        return lambda mask, bit: not mask & bit
    if op == "G" and required == 1:
        return lambda mask, bit: mask == bit
    return lambda mask, bit: bool(mask & ~bit)


def _solve_mask(inst: IpInstance, tgt_shape, forbid_shapes,
                cand_shapes) -> IpSolution:
    """Exact DP over (seen-symbol set, last symbol) pairs.

    Label-window verdicts depend only on which symbols appear in the prefix
    up to one cutoff step; the last symbol is kept to honor transition
    restrictions.
    """
    length, label = inst.length, inst.label
    index = {v: k for k, v in enumerate(inst.alphabet)}
    nsym = len(inst.alphabet)

    def bit_of(pred: Label) -> int:
        k = index.get(pred.symbol)
        return 0 if k is None else 1 << k

    t_op, t_tau, t_pred = tgt_shape
    t_close = _close_time(t_op, label, t_tau, length)
    if t_close is None:
        raise InfeasibleInstanceError(
            f"no trajectory of length {length} gives the target "
            f"verdict {label:+d}")
    t_check = _mask_pred(t_op, label)
    t_bit = bit_of(t_pred)

    guards: list[list] = [[] for _ in range(length)]
    for (f_op, f_tau, f_pred) in forbid_shapes:
        close = _close_time(f_op, -label, f_tau, length)
        if close is not None:
            guards[close].append((_mask_pred(f_op, -label), bit_of(f_pred)))

    gains: list[list] = [[] for _ in range(length)]
    for (op, tau, pred) in cand_shapes:
        close = _close_time(op, -label, tau, length)
        if close is not None:
            gains[close].append((_mask_pred(op, -label), bit_of(pred)))

    def gain(t: int, mask: int) -> int:
        return sum(1 for check, bit in gains[t] if check(mask, bit))

    def ok(t: int, mask: int) -> bool:
        if t == t_close and not t_check(mask, t_bit):
            return False
        return not any(check(mask, bit) for check, bit in guards[t])

    if inst.transition is None:
        allowed = {v: inst.alphabet for v in inst.alphabet}
    else:
        allowed = {v: tuple(w for w in inst.alphabet
                            if w in inst.transition.get(v, inst.alphabet))
                   for v in inst.alphabet}

    nodes = 0
    value = {(mask, k): 0 for mask in range(1 << nsym) if mask
             for k in range(nsym) if mask & (1 << k)}
    layers = [value]
    for t in range(length - 1, 0, -1):
        prev = {}
        nxt = layers[0]
        for (mask, k) in nxt:
            last = inst.alphabet[k]
            for s in allowed[last]:
                nodes += 1
                k2 = index[s]
                mask2 = mask | (1 << k2)
                after = nxt.get((mask2, k2))
                if after is None or after < 0 or not ok(t, mask2):
                    continue
                got = gain(t, mask2) + after
                key = (mask, k)
                if got > prev.get(key, -1):
                    prev[key] = got
        full = {key: prev.get(key, -1) for key in nxt}
        layers.insert(0, full)

    starts = inst.alphabet if inst.initial is None else (inst.initial,)
    best = -1
    for s in starts:
        nodes += 1
        mask = 1 << index[s]
        if not ok(0, mask):
            continue
        after = layers[0].get((mask, index[s]), -1)
        if after < 0:
            continue
        best = max(best, gain(0, mask) + after)
    if best < 0:
        raise InfeasibleInstanceError(
            f"no trajectory of length {length} gives the target "
            f"verdict {label:+d}")

    trajectory = []
    mask = 0
    last = None
    remaining = best
    for t in range(length):
        if t == 0:
            choices = starts
        else:
            choices = allowed[last]
        for s in sorted(choices, key=index.__getitem__):
            k2 = index[s]
            mask2 = mask | (1 << k2)
            if not ok(t, mask2):
                continue
            if t < length - 1:
                after = layers[t].get((mask2, k2), -1)
            else:
                after = 0 if (mask2, k2) in layers[t] else -1
            if after < 0:
                continue
            here = gain(t, mask2)
            if here + after == remaining:
                trajectory.append(s)
                mask, last = mask2, s
                remaining -= here
                break
        else:
            raise AssertionError("label DP walk lost the optimum")
    solution = _finish(inst, tuple(trajectory), nodes)
    if solution.kappa != best:
        raise AssertionError("label DP objective mismatch")
    return solution


# --------------------------------------------------------------------------
# generic path: branch-and-bound with three-valued pruning

_T, _F, _U = 1, 0, 2


def _tv_not(x: int) -> int:
    return x if x == _U else 1 - x


def _tv_eval(f: Formula, t: int, prefix: tuple, length: int, strong: bool,
             memo: dict) -> int:
    """Three-valued satisfaction on a partial trajectory.

    Positions before ``len(prefix)`` are fixed, positions up to
    ``length - 1`` are free over the alphabet, later ones are off the end.
    A returned 0/1 holds for every completion; 2 means undecided.
    """
    key = (id(f), t, strong)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if t > length - 1:
        out = _F if strong else _T
    elif isinstance(f, TrueF):
        out = _T
    elif isinstance(f, Atom):
        if t < len(prefix):
            out = _T if f.pred.holds(prefix[t]) else _F
        else:
            out = _U
    elif isinstance(f, Not):
        out = _tv_not(_tv_eval(f.sub, t, prefix, length, not strong, memo))
    elif isinstance(f, And):
        a = _tv_eval(f.left, t, prefix, length, strong, memo)
        if a == _F:
            out = _F
        else:
            b = _tv_eval(f.right, t, prefix, length, strong, memo)
            out = b if a == _T else (_F if b == _F else _U)
    elif isinstance(f, (F, G)):
        find_true = isinstance(f, F)
        out = _F if find_true else _T
        for u in range(t, t + f.tau + 1):
            x = _tv_eval(f.sub, u, prefix, length, strong, memo)
            if find_true:
                if x == _T:
                    out = _T
                    break
                if x == _U:
                    out = _U
            else:
                if x == _F:
                    out = _F
                    break
                if x == _U:
                    out = _U
    else:
        raise TypeError(f"unexpected node {type(f).__name__}")
    memo[key] = out
    return out


def _tv_required(f: Formula, required: int, prefix: tuple, length: int) -> int:
    """Three-valued status of "the verdict of f equals ``required``"."""
    memo: dict = {}
    if required == 1:
        return _tv_eval(f, 0, prefix, length, True, memo)
    return _tv_not(_tv_eval(f, 0, prefix, length, False, memo))


def _solve_branch_bound(inst: IpInstance, node_budget: int,
                        time_budget: Optional[float]) -> IpSolution:
    """Depth-first search over partial trajectories in alphabet order.

    Branches die when the target verdict is decidedly missed or when even
    the optimistic elimination count (decided plus undecided candidates)
    cannot beat the incumbent.  Because only strict improvements replace
    the incumbent, the returned maximizer is the lexicographically smallest
    one.  On budget exhaustion the incumbent is returned with
    ``optimal=False``; with no incumbent the budget error propagates.
    """
    length, label = inst.length, inst.label
    deadline = None if time_budget is None else time.monotonic() + time_budget
    if inst.transition is None:
        allowed = {v: inst.alphabet for v in inst.alphabet}
    else:
        allowed = {v: tuple(w for w in inst.alphabet
                            if w in inst.transition.get(v, inst.alphabet))
                   for v in inst.alphabet}
    starts = inst.alphabet if inst.initial is None else (inst.initial,)

    best_traj: Optional[tuple] = None
    best_k = -1
    nodes = 0
    truncated = False

    stack: list[tuple] = [()]
    while stack:
        prefix = stack.pop()
        nodes += 1
        if nodes > node_budget or (deadline is not None
                                   and time.monotonic() > deadline):
            truncated = True
            break
        tgt = _tv_required(inst.target, label, prefix, length)
        if tgt == _F:
            continue
        blocked = False
        for guard in inst.forbid:
            hit = _tv_required(guard, -label, prefix, length)
            if hit == _T:
                blocked = True
                break
            if len(prefix) == length and hit != _F:
                raise AssertionError("undecided verdict on a full trajectory")
        if blocked:
            continue
        decided = 0
        potential = 0
        for c in inst.candidates:
            status = _tv_required(c, -label, prefix, length)
            if status == _T:
                decided += 1
                potential += 1
            elif status == _U:
                potential += 1
        if len(prefix) == length:
            if tgt == _T and decided > best_k:
                best_k = decided
                best_traj = prefix
            continue
        if potential <= best_k and best_traj is not None:
            continue
        choices = starts if not prefix else allowed[prefix[-1]]
        for s in reversed(choices):
            stack.append(prefix + (s,))

    if best_traj is None:
        if truncated:
            raise BudgetExceededError(
                f"search budget exhausted after {nodes} nodes with no "
                f"feasible trajectory")
        raise InfeasibleInstanceError(
            f"no trajectory of length {length} gives the target "
            f"verdict {label:+d}")
    return _finish(inst, best_traj, nodes, optimal=not truncated)


# --------------------------------------------------------------------------
# LP text export

_CONST = "const"
_VAR = "var"


class _LpBuilder:
    """Accumulates named rows and binary variables for CPLEX LP text."""

    def __init__(self) -> None:
        self.rows: list[str] = []
        self.binaries: list[str] = []
        self._row_n = 0

    def var(self, name: str) -> str:
        self.binaries.append(name)
        return name

    def row(self, terms: list, sense: str, rhs: int, tag: str) -> None:
        self._row_n += 1
        parts = []
        for coef, name in terms:
            if coef == 0:
                continue
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            lead = name if mag == 1 else f"{mag} {name}"
            parts.append(f"{sign} {lead}")
        if not parts:
            parts = ["+ 0 " + (terms[0][1] if terms else self.binaries[0])]
        body = " ".join(parts)
        if body.startswith("+ "):
            body = body[2:]
        self.rows.append(f" {tag}_{self._row_n}: {body} {sense} {rhs}")


def _state_token(value, k: int) -> str:
    """Variable-name suffix for a state: the value for non-negative
    integers, the symbol for plain alphanumeric strings, otherwise the
    alphabet index (LP names cannot hold arbitrary characters)."""
    if isinstance(value, int) and value >= 0:
        return str(value)
    if isinstance(value, str) and value.isalnum():
        return value
    return f"i{k}"


def to_lp(inst: IpInstance) -> str:
    """Render the instance as CPLEX LP text.

    One-hot binaries ``s_t_v`` pick the state at each step, ``b_j`` flags
    candidate eliminations (constrained only from above, so maximization
    makes them exact), and auxiliary ``yS_k_t`` / ``yW_k_t`` binaries track
    strong and weak satisfaction of each distinct subformula at each step.
    """
    length, label = inst.length, inst.label
    lp = _LpBuilder()
    svar: dict = {}
    for t in range(length):
        for k, v in enumerate(inst.alphabet):
            svar[(t, v)] = lp.var(f"s_{t}_{_state_token(v, k)}")
    for t in range(length):
        lp.row([(1, svar[(t, v)]) for v in inst.alphabet], "=", 1, "onehot")

    sf_index: dict = {}
    cache: dict = {}

    def sf_id(f: Formula) -> int:
        if f not in sf_index:
            sf_index[f] = len(sf_index)
        return sf_index[f]

    def encode(f: Formula, t: int, strong: bool):
        if t > length - 1:
            return (_CONST, 0 if strong else 1)
        key = (f, t, strong)
        if key in cache:
            return cache[key]
        view = "S" if strong else "W"
        if isinstance(f, TrueF):
            out = (_CONST, 1)
        elif isinstance(f, Atom):
            hits = [v for v in inst.alphabet if f.pred.holds(v)]
            if not hits:
                out = (_CONST, 0)
            elif len(hits) == len(inst.alphabet):
                out = (_CONST, 1)
            else:
                twin = cache.get((f, t, not strong))
                if twin is not None:
                    out = twin
                else:
                    y = lp.var(f"y{view}_{sf_id(f)}_{t}")
                    lp.row([(1, y)] + [(-1, svar[(t, v)]) for v in hits],
                           "=", 0, "atom")
                    out = (_VAR, y)
        elif isinstance(f, Not):
            child = encode(f.sub, t, not strong)
            if child[0] == _CONST:
                out = (_CONST, 1 - child[1])
            else:
                y = lp.var(f"y{view}_{sf_id(f)}_{t}")
                lp.row([(1, y), (1, child[1])], "=", 1, "neg")
                out = (_VAR, y)
        elif isinstance(f, (And, F, G)):
            if isinstance(f, And):
                children = [encode(f.left, t, strong),
                            encode(f.right, t, strong)]
                conj = True
            else:
                children = [encode(f.sub, u, strong)
                            for u in range(t, t + f.tau + 1)]
                conj = isinstance(f, G)
            keep = []
            short = False
            for kind, val in children:
                if kind == _CONST:
                    if conj and val == 0:
                        short = True
                        break
                    if not conj and val == 1:
                        short = True
                        break
                else:
                    keep.append(val)
            if short:
                out = (_CONST, 0 if conj else 1)
            elif not keep:
                out = (_CONST, 1 if conj else 0)
            elif len(keep) == 1:
                out = (_VAR, keep[0])
            else:
                y = lp.var(f"y{view}_{sf_id(f)}_{t}")
                if conj:
                    for name in keep:
                        lp.row([(1, y), (-1, name)], "<=", 0, "and")
                    lp.row([(1, y)] + [(-1, name) for name in keep],
                           ">=", 1 - len(keep), "and")
                else:
                    for name in keep:
                        lp.row([(1, y), (-1, name)], ">=", 0, "or")
                    lp.row([(1, y)] + [(-1, name) for name in keep],
                           "<=", 0, "or")
                out = (_VAR, y)
        else:
            raise TypeError(f"unexpected node {type(f).__name__}")
        cache[key] = out
        return out

    def impossible_row(tag: str) -> None:
        lp.row([(1, svar[(0, v)]) for v in inst.alphabet], "=", 2, tag)

    if label == 1:
        tgt = encode(inst.target, 0, True)
        if tgt[0] == _CONST:
            if tgt[1] == 0:
                impossible_row("target_unsat")
        else:
            lp.row([(1, tgt[1])], "=", 1, "target")
    else:
        tgt = encode(inst.target, 0, False)
        if tgt[0] == _CONST:
            if tgt[1] == 1:
                impossible_row("target_unsat")
        else:
            lp.row([(1, tgt[1])], "=", 0, "target")

    for guard in inst.forbid:
        # A protected formula must keep the weak verdict (pos sessions)
        # or avoid the strong one (neg sessions).
        if label == 1:
            keep = encode(guard, 0, False)
            if keep[0] == _CONST:
                if keep[1] == 0:
                    impossible_row("protect_unsat")
            else:
                lp.row([(1, keep[1])], "=", 1, "protect")
        else:
            keep = encode(guard, 0, True)
            if keep[0] == _CONST:
                if keep[1] == 1:
                    impossible_row("protect_unsat")
            else:
                lp.row([(1, keep[1])], "=", 0, "protect")

    bvars = []
    for j, c in enumerate(inst.candidates):
        b = lp.var(f"b_{j}")
        bvars.append(b)
        if label == 1:
            weak = encode(c, 0, False)
            if weak[0] == _CONST:
                if weak[1] == 1:
                    lp.row([(1, b)], "<=", 0, "elim")
            else:
                lp.row([(1, b), (1, weak[1])], "<=", 1, "elim")
        else:
            strong = encode(c, 0, True)
            if strong[0] == _CONST:
                if strong[1] == 0:
                    lp.row([(1, b)], "<=", 0, "elim")
            else:
                lp.row([(1, b), (-1, strong[1])], "<=", 0, "elim")

    if inst.initial is not None:
        lp.row([(1, svar[(0, inst.initial)])], "=", 1, "init")
    if inst.transition is not None:
        for t in range(length - 1):
            for u in inst.alphabet:
                allowed = inst.transition.get(u, inst.alphabet)
                for w in inst.alphabet:
                    if w not in allowed:
                        lp.row([(1, svar[(t, u)]), (1, svar[(t + 1, w)])],
                               "<=", 1, "trans")

    if bvars:
        if inst.objective == "AL":
            coef = f"{1 / length:.12g}"
            obj = " + ".join(f"{coef} {b}" for b in bvars)
        else:
            obj = " + ".join(bvars)
    else:
        obj = f"0 {svar[(0, inst.alphabet[0])]}"
    lines = ["Maximize", f" obj: {obj}", "Subject To"]
    lines.extend(lp.rows)
    lines.append("Binary")
    for name in lp.binaries:
        lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"
