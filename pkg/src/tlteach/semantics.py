"""Two-view (strong/weak) semantics over finite trajectories.

A trajectory is a non-empty tuple of states (ints for numeric domains, strings
for symbolic ones). Positions beyond the final state evaluate atoms as
strongly false / weakly true, which is what lets short trajectories leave
formulas undetermined instead of silently deciding them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MalformedDemonstrationError
from .formulas import (
    And,
    Atom,
    F,
    Formula,
    G,
    Not,
    Threshold,
    TrueF,
    normalize,
    total_window,
)

Trajectory = tuple


def strong_sat(trajectory: Sequence, t: int, f: Formula) -> bool:
    """Strong satisfaction of ``f`` at position ``t``."""
    return _sat(tuple(trajectory), t, normalize(f), True, {})


def weak_sat(trajectory: Sequence, t: int, f: Formula) -> bool:
    """Weak satisfaction of ``f`` at position ``t``."""
    return _sat(tuple(trajectory), t, normalize(f), False, {})


def _sat(rho: tuple, t: int, f: Formula, strong: bool, memo: dict) -> bool:
    key = (id(f), t, strong)
    hit = memo.get(key)
    if hit is not None:
        return hit
    end = len(rho) - 1
    if isinstance(f, TrueF):
        out = t <= end if strong else True
    elif isinstance(f, Atom):
        out = f.pred.holds(rho[t]) if t <= end else not strong
    elif isinstance(f, Not):
        out = not _sat(rho, t, f.sub, not strong, memo)
    elif isinstance(f, And):
        out = _sat(rho, t, f.left, strong, memo) and _sat(rho, t, f.right, strong, memo)
    elif isinstance(f, F):
        out = any(_sat(rho, u, f.sub, strong, memo) for u in range(t, t + f.tau + 1))
    elif isinstance(f, G):
        out = all(_sat(rho, u, f.sub, strong, memo) for u in range(t, t + f.tau + 1))
    else:
        raise TypeError(f"not a base-grammar formula: {f!r}")
    memo[key] = out
    return out


def verdict(f: Formula, trajectory: Sequence) -> int:
    """Three-valued verdict at position 0.

    +1 when the trajectory strongly satisfies ``f``, -1 when it strongly
    violates it (strongly satisfies the negation), 0 when undetermined.
    """
    rho = tuple(trajectory)
    g = normalize(f)
    memo: dict = {}
    if _sat(rho, 0, g, True, memo):
        return 1
    if not _sat(rho, 0, g, False, memo):
        return -1
    return 0


# ---------------------------------------------------------------------------
# Demonstrations


@dataclass(frozen=True, slots=True)
class Demonstration:
    """A labeled trajectory: label +1 marks an example, -1 a counterexample."""

    trajectory: tuple
    label: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "trajectory", tuple(self.trajectory))
        if not self.trajectory:
            raise ValueError("empty trajectory")
        if self.label not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")

    @property
    def length(self) -> int:
        return len(self.trajectory)


def check_demonstration(demo: Demonstration, target: Formula) -> None:
    """Reject demonstrations whose label contradicts the target's verdict."""
    v = verdict(target, demo.trajectory)
    if v != demo.label:
        raise MalformedDemonstrationError(
            f"label {demo.label:+d} but target verdict {v:+d} on "
            f"{format_trajectory(demo.trajectory)}")


def strongly_inconsistent(demo: Demonstration, target: Formula, f: Formula,
                          validate: bool = True) -> bool:
    """True when the demonstration eliminates ``f``: the trajectory gives ``f``
    the strong verdict opposite to the demonstration's label."""
    if validate:
        check_demonstration(demo, target)
    return verdict(f, demo.trajectory) == -demo.label


def format_trajectory(trajectory: Sequence) -> str:
    """Comma-separated state tokens, e.g. ``3,7,2,0`` or ``Red,Blue,Green``."""
    return ",".join(str(s) for s in trajectory)


# ---------------------------------------------------------------------------
# Vectorized evaluation


def eval_bulk(f: Formula, states: np.ndarray, horizon: int = 0):
    """Evaluate ``f`` over a batch of equal-length trajectories at once.

    Args:
        f: formula (normalized or not).
        states: array of shape (n, L); dtype int for numeric domains, str or
            object for symbolic ones.
        horizon: largest position of interest; positions beyond the trajectory
            end follow the off-end convention.

    Returns:
        (strong, weak) bool arrays of shape (n, horizon + 1).
    """
    g = normalize(f)
    n, length = states.shape

    def rec(node: Formula, width: int):
        if isinstance(node, TrueF):
            s = np.zeros((n, width), dtype=bool)
            s[:, : min(length, width)] = True
            return s, np.ones((n, width), dtype=bool)
        if isinstance(node, Atom):
            upto = min(length, width)
            s = np.zeros((n, width), dtype=bool)
            if isinstance(node.pred, Threshold):
                s[:, :upto] = states[:, :upto] <= node.pred.bound
            else:
                s[:, :upto] = states[:, :upto] == node.pred.symbol
            w = s.copy()
            w[:, upto:] = True
            return s, w
        if isinstance(node, Not):
            s_sub, w_sub = rec(node.sub, width)
            return ~w_sub, ~s_sub
        if isinstance(node, And):
            s1, w1 = rec(node.left, width)
            s2, w2 = rec(node.right, width)
            return s1 & s2, w1 & w2
        if isinstance(node, (F, G)):
            s_sub, w_sub = rec(node.sub, width + node.tau)
            combine = np.logical_or if isinstance(node, F) else np.logical_and
            s = s_sub[:, :width].copy()
            w = w_sub[:, :width].copy()
            for k in range(1, node.tau + 1):
                combine(s, s_sub[:, k : k + width], out=s)
                combine(w, w_sub[:, k : k + width], out=w)
            return s, w
        raise TypeError(f"not a base-grammar formula: {node!r}")

    return rec(g, horizon + 1)


def verdicts_bulk(f: Formula, states: np.ndarray) -> np.ndarray:
    """Verdict of ``f`` at position 0 for each row of ``states``; int8 array."""
    strong, weak = eval_bulk(f, states, horizon=0)
    return np.where(strong[:, 0], 1, np.where(weak[:, 0], 0, -1)).astype(np.int8)


def max_horizon(f: Formula) -> int:
    """Largest position evaluation at 0 can reach (nesting depth of windows)."""
    return total_window(normalize(f))
