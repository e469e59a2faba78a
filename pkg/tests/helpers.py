"""Shared test utilities: a literal reference evaluator and a formula fuzzer.

The reference evaluator is a direct, unoptimized transliteration of the
two-view semantics used to cross-check the library's memoized and vectorized
implementations.
"""

from __future__ import annotations

import itertools
from random import Random

from tlteach.formulas import (
    And,
    Atom,
    F,
    G,
    Implies,
    Label,
    Not,
    Or,
    Threshold,
    TrueF,
)


def ref_strong(rho, t, f):
    end = len(rho) - 1
    if isinstance(f, TrueF):
        return t <= end
    if isinstance(f, Atom):
        return t <= end and f.pred.holds(rho[t])
    if isinstance(f, Not):
        return not ref_weak(rho, t, f.sub)
    if isinstance(f, And):
        return ref_strong(rho, t, f.left) and ref_strong(rho, t, f.right)
    if isinstance(f, F):
        return any(ref_strong(rho, u, f.sub) for u in range(t, t + f.tau + 1))
    if isinstance(f, G):
        return all(ref_strong(rho, u, f.sub) for u in range(t, t + f.tau + 1))
    raise TypeError(f)


def ref_weak(rho, t, f):
    end = len(rho) - 1
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Atom):
        return t > end or f.pred.holds(rho[t])
    if isinstance(f, Not):
        return not ref_strong(rho, t, f.sub)
    if isinstance(f, And):
        return ref_weak(rho, t, f.left) and ref_weak(rho, t, f.right)
    if isinstance(f, F):
        return any(ref_weak(rho, u, f.sub) for u in range(t, t + f.tau + 1))
    if isinstance(f, G):
        return all(ref_weak(rho, u, f.sub) for u in range(t, t + f.tau + 1))
    raise TypeError(f)


def ref_verdict(f, rho):
    if ref_strong(rho, 0, f):
        return 1
    if not ref_weak(rho, 0, f):
        return -1
    return 0


def random_formula(rng: Random, max_depth: int, preds, max_tau: int = 3,
                   surface: bool = False):
    """Random formula tree; ``surface=True`` mixes in Or/Implies nodes."""
    if max_depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.1:
            return TrueF()
        return Atom(rng.choice(preds))

    def sub():
        return random_formula(rng, max_depth - 1, preds, max_tau, surface)

    kinds = 6 if surface else 4
    k = rng.randrange(kinds)
    if k == 0:
        return Not(sub())
    if k == 1:
        return And(sub(), sub())
    if k == 2:
        return F(rng.randint(0, max_tau), sub())
    if k == 3:
        return G(rng.randint(0, max_tau), sub())
    if k == 4:
        return Or(sub(), sub())
    return Implies(sub(), sub())


def numeric_preds(max_bound: int):
    return [Threshold(v) for v in range(max_bound + 1)]


def label_preds(symbols):
    return [Label(s) for s in symbols]


def all_trajectories(alphabet, max_len: int, min_len: int = 1):
    for length in range(min_len, max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


SUITS = ("♣", "♠", "♦")


def suit_grid():
    """The 15-formula card example: F[<=i] (sym:suit) for suits ♣,♠,♦ and
    i in 0..4, target F[<=2] (sym:♣) at id 2."""
    from tlteach.learner import HypothesisSet

    formulas = [F(i, Atom(Label(s))) for s in SUITS for i in range(5)]
    return HypothesisSet(tuple(formulas), target_id=2)
