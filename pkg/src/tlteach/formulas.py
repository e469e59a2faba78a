"""Bounded temporal formulas: syntax tree, parser, renderer, and length bounds.

Grammar (whitespace-insensitive)::

    E ::= 'T' | 'x<=' INT | 'sym:' NAME | '!' E | '(' E ')'
        | '(' E '&' E ')' | '(' E '|' E ')' | '(' E '->' E ')'
        | 'F[<=' INT ']' E | 'G[<=' INT ']' E

``Or`` and ``Implies`` are surface forms only; :func:`normalize` rewrites them
into negation/conjunction and every semantic routine expects normalized input.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Union

from .errors import BudgetExceededError, FormulaSyntaxError

#: Bounds and window sizes are machine-width non-negative integers.
INT_LIMIT = 2**63 - 1


@dataclass(frozen=True, slots=True)
class Threshold:
    """Numeric state predicate ``x <= bound``."""

    bound: int

    def __post_init__(self) -> None:
        if not isinstance(self.bound, int) or isinstance(self.bound, bool):
            raise TypeError("threshold bound must be an int")
        if not 0 <= self.bound <= INT_LIMIT:
            raise ValueError(f"threshold bound out of range: {self.bound}")

    def holds(self, state) -> bool:
        return state <= self.bound


@dataclass(frozen=True, slots=True)
class Label:
    """Symbolic state predicate ``state == symbol``."""

    symbol: str

    def __post_init__(self) -> None:
        if not isinstance(self.symbol, str):
            raise TypeError("label symbol must be a string")
        if not self.symbol:
            raise ValueError("label symbol must be non-empty")

    def holds(self, state) -> bool:
        return state == self.symbol


Predicate = Union[Threshold, Label]


class _Node:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class TrueF(_Node):
    """The constant true formula (behaves as an always-satisfied atom)."""


@dataclass(frozen=True, slots=True)
class Atom(_Node):
    pred: Predicate


@dataclass(frozen=True, slots=True)
class Not(_Node):
    sub: "Formula"


@dataclass(frozen=True, slots=True)
class And(_Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Or(_Node):
    """Surface form; normalized to ``!(!left & !right)``."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Implies(_Node):
    """Surface form; normalized to ``!(!!left & !right)``."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class F(_Node):
    """Bounded eventually: a witness within ``[t, t + tau]``."""

    tau: int
    sub: "Formula"

    def __post_init__(self) -> None:
        _check_window(self.tau)


@dataclass(frozen=True, slots=True)
class G(_Node):
    """Bounded always: every step within ``[t, t + tau]``."""

    tau: int
    sub: "Formula"

    def __post_init__(self) -> None:
        _check_window(self.tau)


Formula = Union[TrueF, Atom, Not, And, Or, Implies, F, G]


def _check_window(tau) -> None:
    if not isinstance(tau, int) or isinstance(tau, bool):
        raise TypeError("window size must be an int")
    if not 0 <= tau <= INT_LIMIT:
        raise ValueError(f"window size out of range: {tau}")


def normalize(f: Formula) -> Formula:
    """Rewrite ``Or``/``Implies`` into the base grammar.

    Returns the argument object itself when nothing changes, so normalizing an
    already-normalized formula is cheap and preserves identity.
    """
    if isinstance(f, (TrueF, Atom)):
        return f
    if isinstance(f, Not):
        sub = normalize(f.sub)
        return f if sub is f.sub else Not(sub)
    if isinstance(f, And):
        left, right = normalize(f.left), normalize(f.right)
        return f if left is f.left and right is f.right else And(left, right)
    if isinstance(f, Or):
        return Not(And(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Implies):
        return Not(And(Not(Not(normalize(f.left))), Not(normalize(f.right))))
    if isinstance(f, F):
        sub = normalize(f.sub)
        return f if sub is f.sub else F(f.tau, sub)
    if isinstance(f, G):
        sub = normalize(f.sub)
        return f if sub is f.sub else G(f.tau, sub)
    raise TypeError(f"not a formula: {f!r}")


def is_normalized(f: Formula) -> bool:
    if isinstance(f, (TrueF, Atom)):
        return True
    if isinstance(f, Not):
        return is_normalized(f.sub)
    if isinstance(f, And):
        return is_normalized(f.left) and is_normalized(f.right)
    if isinstance(f, (F, G)):
        return is_normalized(f.sub)
    return False


# ---------------------------------------------------------------------------
# Rendering


def render(f: Formula) -> str:
    """Canonical text for ``f``; always emits the normalized base grammar."""
    return _render(normalize(f))


def _render(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "T"
    if isinstance(f, Atom):
        if isinstance(f.pred, Threshold):
            return f"(x<={f.pred.bound})"
        return f"(sym:{f.pred.symbol})"
    if isinstance(f, Not):
        return "!" + _render(f.sub)
    if isinstance(f, And):
        return f"({_render(f.left)} & {_render(f.right)})"
    if isinstance(f, F):
        return f"F[<={f.tau}] {_render(f.sub)}"
    if isinstance(f, G):
        return f"G[<={f.tau}] {_render(f.sub)}"
    raise TypeError(f"not a base-grammar formula: {f!r}")


# ---------------------------------------------------------------------------
# Parsing

_NAME_CHAR = re.compile(r"[0-9A-Za-z_]|[^\x00-\x7f]")


class _Scanner:
    __slots__ = ("text", "pos")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, literal: str, what: str | None = None) -> None:
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise FormulaSyntaxError(f"expected {what or literal!r}", self.pos)
        self.pos += len(literal)


def parse(text: str) -> Formula:
    """Parse formula text; raises :class:`FormulaSyntaxError` with the offset
    of the first offending character."""
    s = _Scanner(text)
    f = _parse_expr(s)
    s.skip_ws()
    if not s.eof():
        raise FormulaSyntaxError("unexpected trailing input", s.pos)
    return f


def _parse_expr(s: _Scanner) -> Formula:
    s.skip_ws()
    if s.eof():
        raise FormulaSyntaxError("unexpected end of input", s.pos)
    ch = s.peek()
    if ch == "T":
        s.pos += 1
        return TrueF()
    if ch == "x":
        s.pos += 1
        s.expect("<=")
        return Atom(Threshold(_parse_int(s)))
    if ch == "s":
        s.expect("sym:")
        s.skip_ws()
        start = s.pos
        while s.pos < len(s.text) and _NAME_CHAR.match(s.text[s.pos]):
            s.pos += 1
        if s.pos == start:
            raise FormulaSyntaxError("expected symbol name", s.pos)
        return Atom(Label(s.text[start : s.pos]))
    if ch == "!":
        s.pos += 1
        return Not(_parse_expr(s))
    if ch in "FG":
        s.pos += 1
        s.expect("[")
        s.expect("<=")
        tau = _parse_int(s)
        s.expect("]")
        sub = _parse_expr(s)
        return F(tau, sub) if ch == "F" else G(tau, sub)
    if ch == "(":
        s.pos += 1
        left = _parse_expr(s)
        s.skip_ws()
        if s.peek() == ")":
            s.pos += 1
            return left
        if s.peek() == "&":
            s.pos += 1
            node = And(left, _parse_expr(s))
        elif s.peek() == "|":
            s.pos += 1
            node = Or(left, _parse_expr(s))
        elif s.peek() == "-":
            s.expect("->", "'&', '|', '->' or ')'")
            node = Implies(left, _parse_expr(s))
        else:
            raise FormulaSyntaxError("expected '&', '|', '->' or ')'", s.pos)
        s.expect(")")
        return node
    raise FormulaSyntaxError(f"unexpected character {ch!r}", s.pos)


def _parse_int(s: _Scanner) -> int:
    s.skip_ws()
    start = s.pos
    while s.pos < len(s.text) and s.text[s.pos].isdigit():
        s.pos += 1
    if s.pos == start:
        raise FormulaSyntaxError("expected integer", s.pos)
    value = int(s.text[start : s.pos])
    if value > INT_LIMIT:
        raise FormulaSyntaxError("integer too large", start)
    return value


# ---------------------------------------------------------------------------
# Length bounds


def minimal_length(f: Formula, label: int) -> int:
    """Minimal-length index for a strong verdict.

    A trajectory can give ``f`` the strong verdict ``label`` (+1 satisfied,
    -1 violated) only if its length is at least ``minimal_length(f, label) + 1``;
    below ``minimal_length(f, label)`` the opposite weak verdict is forced.
    Requires a normalized formula.
    """
    if label not in (1, -1):
        raise ValueError(f"label must be +1 or -1, got {label!r}")
    if isinstance(f, (TrueF, Atom)):
        return 0
    if isinstance(f, Not):
        return minimal_length(f.sub, -label)
    if isinstance(f, And):
        agg = max if label == 1 else min
        return agg(minimal_length(f.left, label), minimal_length(f.right, label))
    if isinstance(f, F):
        inner = minimal_length(f.sub, label)
        return inner if label == 1 else inner + f.tau
    if isinstance(f, G):
        inner = minimal_length(f.sub, label)
        return inner + f.tau if label == 1 else inner
    raise ValueError("minimal_length requires a normalized formula")


def total_window(f: Formula) -> int:
    """Sum of all temporal window sizes; bounds how far evaluation can look."""
    if isinstance(f, (TrueF, Atom)):
        return 0
    if isinstance(f, Not):
        return total_window(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return max(total_window(f.left), total_window(f.right))
    return f.tau + total_window(f.sub)


# ---------------------------------------------------------------------------
# Implication checks


def _unary_threshold_shape(f: Formula):
    if isinstance(f, (F, G)) and isinstance(f.sub, Atom) and isinstance(f.sub.pred, Threshold):
        return ("F" if isinstance(f, F) else "G", f.tau, f.sub.pred.bound)
    return None


def implies_syntactic(f1: Formula, f2: Formula) -> str:
    """Decide whether every trajectory strongly satisfying ``f1`` strongly
    satisfies ``f2``, for single-operator threshold shapes.

    Returns ``"holds"`` or ``"fails"`` when the shapes are decidable (both
    formulas of the form ``F/G[<=i] (x<=v)``, except the F-to-G direction),
    ``"unknown"`` otherwise. Identical formulas imply each other.
    The verdict is relative to unconstrained integer-valued trajectories.
    """
    a, b = normalize(f1), normalize(f2)
    if a == b:
        return "holds"
    sa, sb = _unary_threshold_shape(a), _unary_threshold_shape(b)
    if sa is None or sb is None:
        return "unknown"
    (op_a, i_a, v_a), (op_b, i_b, v_b) = sa, sb
    if op_a == "F" and op_b == "F":
        return "holds" if i_a <= i_b and v_a <= v_b else "fails"
    if op_a == "G" and op_b == "G":
        return "holds" if i_a >= i_b and v_a <= v_b else "fails"
    if op_a == "G" and op_b == "F":
        return "holds" if v_a <= v_b else "fails"
    return "unknown"


def implies_bruteforce(f1: Formula, f2: Formula, alphabet, l_bound: int,
                       node_budget: int = 16_000_000) -> bool:
    """Exhaustively search trajectories over ``alphabet`` up to length
    ``l_bound`` for one strongly satisfying ``f1`` but not ``f2``.

    Returns True when no counterexample exists within the bound. Raises
    :class:`BudgetExceededError` once more than ``node_budget`` states have
    been generated.
    """
    from .semantics import strong_sat

    a, b = normalize(f1), normalize(f2)
    used = 0
    for length in range(1, l_bound + 1):
        for states in itertools.product(alphabet, repeat=length):
            used += length
            if used > node_budget:
                raise BudgetExceededError(
                    f"implication search exceeded {node_budget} states")
            if strong_sat(states, 0, a) and not strong_sat(states, 0, b):
                return False
    return True
