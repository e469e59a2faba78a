"""State domains the teaching problems live in.

Two domains ship by default:

* ``numeric``: states are the integers 0..10, formulas use threshold
  predicates ``x<=v``, and any in-alphabet state sequence is a valid
  trajectory.
* ``gridworld``: a 9x9 cell grid where each cell carries one of four
  colors.  Formulas and demonstrations see the color sequence (the
  observation projection); cells and the five deterministic actions
  (stay, N, S, E, W, with absorbing boundaries) generate realistic
  rollouts.  A color-level transition relation restricts consecutive
  observations — by default a Red observation may only be followed by
  Red or Blue, and Green only by Green, Yellow, or Blue — and is
  injected into solver instances so emitted demonstrations respect it.

The alphabet order of a domain doubles as the solver's branching and
tie-break order: numeric states ascend, colors follow the fixed rank
Red, Blue, Green, Yellow.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from random import Random
from typing import Mapping, Optional, Sequence

from .formulas import Atom, F, Formula, G, Label, Threshold
from .learner import HypothesisSet
from .solver import IpInstance

__all__ = [
    "ACTIONS",
    "COLORS",
    "DEFAULT_TRANSITION",
    "GRID_SIDE",
    "StateDomain",
    "default_color_map",
    "generate_hypothesis_grid",
    "gridworld_domain",
    "inject_constraints",
    "load_color_map",
    "numeric_domain",
    "parse_trajectory",
    "random_rollout",
    "render_color_map",
    "valid_trajectory",
]

COLORS = ("Red", "Blue", "Green", "Yellow")
_LETTER = {"R": "Red", "B": "Blue", "G": "Green", "Y": "Yellow"}
GRID_SIDE = 9
N_CELLS = GRID_SIDE * GRID_SIDE

# Action deltas in (row, column); moves past the edge stay put.
ACTIONS: Mapping[str, tuple] = {
    "stay": (0, 0),
    "N": (-1, 0),
    "S": (1, 0),
    "E": (0, 1),
    "W": (0, -1),
}
_ACTION_ORDER = ("stay", "N", "S", "E", "W")

DEFAULT_TRANSITION: Mapping[str, frozenset] = {
    "Red": frozenset({"Red", "Blue"}),
    "Green": frozenset({"Green", "Yellow", "Blue"}),
    "Blue": frozenset(COLORS),
    "Yellow": frozenset(COLORS),
}


@dataclass(frozen=True)
class StateDomain:
    """An immutable state space.

    ``alphabet`` lists the formula-visible states in branching order.
    ``transition`` maps an observation to the observations allowed next
    (None = unconstrained).  ``cells`` holds the 81 cell colors row-major
    for gridworlds and is None for numeric domains.
    """

    kind: str
    alphabet: tuple
    transition: Optional[Mapping] = None
    cells: Optional[tuple] = None

    @property
    def is_numeric(self) -> bool:
        return self.kind == "numeric"

    @property
    def is_gridworld(self) -> bool:
        return self.kind == "gridworld"

    def state_index(self, state) -> int:
        """Position of a state in the branching order."""
        return self.alphabet.index(state)

    def observation(self, cell: int):
        """Color of a cell index (0..80, row-major)."""
        if self.cells is None:
            raise ValueError("observation projection needs a gridworld")
        return self.cells[cell]


def numeric_domain() -> StateDomain:
    """States 0..10 in ascending order; no transition restrictions."""
    return StateDomain(kind="numeric", alphabet=tuple(range(11)))


def gridworld_domain(color_map=None, transition: Optional[Mapping] = None
                     ) -> StateDomain:
    """A 9x9 colored grid observed through its color sequence.

    ``color_map`` may be None (a fixed built-in map), the 9-line text
    format (one letter R/B/G/Y per cell), or a sequence of 81 color
    names.  ``transition`` overrides the default color-level relation.
    """
    if color_map is None:
        cells = default_color_map()
    elif isinstance(color_map, str):
        cells = load_color_map(color_map)
    else:
        cells = tuple(color_map)
        if len(cells) != N_CELLS:
            raise ValueError(
                f"color map must assign {N_CELLS} cells, got {len(cells)}")
        for c in cells:
            if c not in COLORS:
                raise ValueError(f"unknown color {c!r}")
    trans = DEFAULT_TRANSITION if transition is None else {
        c: frozenset(allowed) for c, allowed in transition.items()}
    return StateDomain(kind="gridworld", alphabet=COLORS,
                       transition=trans, cells=cells)


def load_color_map(text: str) -> tuple:
    """Parse the 9-line x 9-letter map format into 81 row-major colors."""
    lines = [ln for ln in (row.strip() for row in text.splitlines()) if ln]
    if len(lines) != GRID_SIDE:
        raise ValueError(
            f"color map must have {GRID_SIDE} rows, got {len(lines)}")
    cells = []
    for r, line in enumerate(lines):
        if len(line) != GRID_SIDE:
            raise ValueError(
                f"row {r} must have {GRID_SIDE} cells, got {len(line)}")
        for ch in line:
            color = _LETTER.get(ch)
            if color is None:
                raise ValueError(f"unknown color letter {ch!r} in row {r}")
            cells.append(color)
    return tuple(cells)


def render_color_map(cells: Sequence) -> str:
    """Inverse of ``load_color_map``: 9 lines of 9 letters."""
    if len(cells) != N_CELLS:
        raise ValueError(f"expected {N_CELLS} cells, got {len(cells)}")
    letters = {color: letter for letter, color in _LETTER.items()}
    rows = []
    for r in range(GRID_SIDE):
        row = cells[r * GRID_SIDE:(r + 1) * GRID_SIDE]
        rows.append("".join(letters[c] for c in row))
    return "\n".join(rows) + "\n"


def default_color_map(seed: int = 1105) -> tuple:
    """A fixed map whose undirected cell adjacencies all respect the
    default transition relation in both travel directions.

    Rows are painted one color each by a seeded chain that only steps
    between mutually compatible colors, retrying until all four colors
    appear; every horizontal neighbor pair shares a color and every
    vertical pair is compatible, so random walks can never be forced
    into a forbidden observation pair.
    """
    compatible = {
        "Red": ("Red", "Blue"),
        "Blue": ("Red", "Blue", "Green", "Yellow"),
        "Green": ("Blue", "Green", "Yellow"),
        "Yellow": ("Blue", "Green", "Yellow"),
    }
    rng = Random(seed)
    while True:
        rows = ["Blue"]
        while len(rows) < GRID_SIDE:
            rows.append(rng.choice(compatible[rows[-1]]))
        if set(rows) == set(COLORS):
            break
    cells = []
    for color in rows:
        cells.extend([color] * GRID_SIDE)
    return tuple(cells)


def generate_hypothesis_grid(domain: StateDomain, a: int,
                             target_id: int = 0) -> HypothesisSet:
    """The standard two-operator hypothesis grid over a domain.

    Numeric: ``F/G[<=i] (x<=v)`` for windows 1..a and thresholds 1..9
    (18a formulas).  Gridworld: ``F/G[<=i] (sym:c)`` for the four colors
    (8a formulas).  Ids run F-block first, window-major, predicate-minor;
    ``target_id`` just seeds the designated target and can be swapped
    later with ``HypothesisSet.with_target``.
    """
    if a < 1:
        raise ValueError(f"window bound a must be >= 1, got {a}")
    formulas: list[Formula] = []
    if domain.is_numeric:
        preds = [Threshold(v) for v in range(1, 10)]
    else:
        preds = [Label(c) for c in domain.alphabet]
    for op in (F, G):
        for i in range(1, a + 1):
            for pred in preds:
                formulas.append(op(i, Atom(pred)))
    return HypothesisSet(tuple(formulas), target_id)


def valid_trajectory(rho: Sequence, domain: StateDomain) -> bool:
    """Whether a trajectory is realizable in the domain.

    Numeric: every state must be in the alphabet.  Gridworld observation
    sequences: every color in the alphabet and every consecutive pair in
    the transition relation.  Gridworld cell sequences (integer indices)
    additionally require each step to be reachable by one action.
    """
    if len(rho) == 0:
        return False
    if domain.is_numeric:
        return all(s in domain.alphabet for s in rho)
    if all(isinstance(s, int) for s in rho):
        if not all(0 <= s < N_CELLS for s in rho):
            return False
        for u, w in zip(rho, rho[1:]):
            if w not in _reachable(u):
                return False
        obs = [domain.observation(c) for c in rho]
    else:
        obs = list(rho)
    if not all(s in domain.alphabet for s in obs):
        return False
    if domain.transition is None:
        return True
    for u, w in zip(obs, obs[1:]):
        if w not in domain.transition.get(u, domain.alphabet):
            return False
    return True


def inject_constraints(inst: IpInstance, domain: StateDomain) -> IpInstance:
    """Copy the domain's transition relation into a solver instance, so
    its feasible set shrinks to exactly the valid trajectories."""
    return dataclasses.replace(inst, transition=domain.transition)


def _step_cell(cell: int, action: str) -> int:
    dr, dc = ACTIONS[action]
    r, c = divmod(cell, GRID_SIDE)
    r2, c2 = r + dr, c + dc
    if not (0 <= r2 < GRID_SIDE and 0 <= c2 < GRID_SIDE):
        return cell
    return r2 * GRID_SIDE + c2


def _reachable(cell: int) -> frozenset:
    return frozenset(_step_cell(cell, a) for a in _ACTION_ORDER)


def random_rollout(domain: StateDomain, length: int, rng: Random,
                   start: Optional[int] = None):
    """Sample one trajectory; returns ``(cells, observations)``.

    Flat domains draw states uniformly (cells is None), restricted to the
    transition relation when one is present.  Gridworlds walk from a
    uniform (or given) start cell, at each step choosing uniformly among
    the actions whose destination color the transition relation allows
    from the current color.
    """
    if length < 1:
        raise ValueError("rollout length must be >= 1")
    if not domain.is_gridworld:
        trans = domain.transition
        states = [rng.choice(domain.alphabet)]
        while len(states) < length:
            allowed = (tuple(trans.get(states[-1], domain.alphabet))
                       if trans else domain.alphabet)
            if not allowed:
                raise ValueError(
                    f"no successor state from {states[-1]!r} respects the "
                    f"transition relation")
            states.append(rng.choice(allowed))
        return None, tuple(states)
    cell = rng.randrange(N_CELLS) if start is None else start
    if not 0 <= cell < N_CELLS:
        raise ValueError(f"start cell {cell} out of range")
    cells = [cell]
    trans = domain.transition
    while len(cells) < length:
        here = domain.observation(cells[-1])
        allowed = trans.get(here, domain.alphabet) if trans else domain.alphabet
        moves = [a for a in _ACTION_ORDER
                 if domain.observation(_step_cell(cells[-1], a)) in allowed]
        if not moves:
            raise ValueError(
                f"no action from color {here} respects the transition relation")
        cells.append(_step_cell(cells[-1], rng.choice(moves)))
    return tuple(cells), tuple(domain.observation(c) for c in cells)


def parse_trajectory(text: str, domain: StateDomain) -> tuple:
    """Inverse of the comma-separated trajectory format, domain-checked."""
    tokens = [tok.strip() for tok in text.split(",")]
    if tokens == [""]:
        raise ValueError("empty trajectory text")
    states = []
    for tok in tokens:
        if domain.is_numeric:
            try:
                state = int(tok)
            except ValueError:
                raise ValueError(f"bad numeric state {tok!r}") from None
        else:
            state = tok
        if state not in domain.alphabet:
            raise ValueError(f"state {tok!r} not in the domain alphabet")
        states.append(state)
    return tuple(states)
