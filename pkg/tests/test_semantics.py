"""Two-view evaluation, verdicts, demonstrations, and their properties."""

from random import Random

import numpy as np
import pytest

from tlteach.errors import MalformedDemonstrationError
from tlteach.formulas import (
    And,
    Atom,
    F,
    G,
    Label,
    Not,
    Threshold,
    TrueF,
    minimal_length,
    normalize,
    parse,
)
from tlteach.semantics import (
    Demonstration,
    check_demonstration,
    eval_bulk,
    format_trajectory,
    max_horizon,
    strong_sat,
    strongly_inconsistent,
    verdict,
    verdicts_bulk,
    weak_sat,
)
from helpers import (
    all_trajectories,
    label_preds,
    numeric_preds,
    random_formula,
    ref_strong,
    ref_verdict,
    ref_weak,
)

CLUB, SPADE, DIAMOND = "♣", "♠", "♦"


def suit(tau, symbol):
    return F(tau, Atom(Label(symbol)))


class TestHandCases:
    def test_strong_sat(self):
        target = suit(2, CLUB)
        assert strong_sat((SPADE, DIAMOND, CLUB), 0, target)
        assert not strong_sat((SPADE, DIAMOND, SPADE, CLUB, CLUB), 0, target)
        assert not strong_sat(("a", "b"), 5, Atom(Label("a")))

    def test_weak_sat(self):
        assert weak_sat(("a", "b"), 5, Atom(Label("a")))
        assert weak_sat((CLUB, DIAMOND), 0, suit(4, SPADE))
        assert weak_sat((SPADE, DIAMOND, CLUB), 0, suit(2, CLUB))

    def test_verdicts(self):
        assert verdict(suit(2, CLUB), (SPADE, DIAMOND, CLUB)) == 1
        assert verdict(suit(2, CLUB), (SPADE, DIAMOND, SPADE, CLUB, CLUB)) == -1
        assert verdict(suit(4, SPADE), (CLUB, DIAMOND)) == 0

    def test_numeric_verdicts(self):
        g = parse("G[<=2] (x<=3)")
        assert verdict(g, (1, 2, 3)) == 1
        assert verdict(g, (1, 2)) == 0
        assert verdict(g, (1, 4)) == -1
        f = parse("F[<=4] (x<=1)")
        assert verdict(f, (5, 1)) == 1
        assert verdict(f, (5, 5, 5, 5, 5)) == -1
        assert verdict(f, (5, 5)) == 0

    def test_true_constant(self):
        assert verdict(TrueF(), (0,)) == 1
        assert not strong_sat((0,), 3, TrueF())
        assert weak_sat((0,), 3, TrueF())

    def test_surface_forms_are_normalized_before_evaluation(self):
        f = parse("((x<=1) | (x<=5))")
        assert verdict(f, (4,)) == 1
        assert verdict(f, (9,)) == -1

    def test_contradiction_is_strongly_violated_once_determined(self):
        g = F(1, Atom(Threshold(0)))
        f = And(g, Not(g))
        assert verdict(f, (0,)) == -1
        assert ref_verdict(f, (0,)) == -1


class TestDemonstration:
    def test_construction(self):
        d = Demonstration([1, 2, 3], 1)
        assert d.trajectory == (1, 2, 3)
        assert d.length == 3
        with pytest.raises(ValueError):
            Demonstration((1,), 0)
        with pytest.raises(ValueError):
            Demonstration((), 1)

    def test_check_demonstration(self):
        target = suit(2, CLUB)
        check_demonstration(Demonstration((SPADE, DIAMOND, CLUB), 1), target)
        check_demonstration(
            Demonstration((SPADE, DIAMOND, SPADE, CLUB, CLUB), -1), target)
        with pytest.raises(MalformedDemonstrationError):
            check_demonstration(Demonstration((SPADE, DIAMOND, CLUB), -1), target)
        with pytest.raises(MalformedDemonstrationError):
            check_demonstration(Demonstration((CLUB, DIAMOND), 1), suit(4, SPADE))

    def test_strongly_inconsistent(self):
        target = suit(2, CLUB)
        neg = Demonstration((SPADE, DIAMOND, SPADE, CLUB, CLUB), -1)
        assert strongly_inconsistent(neg, target, suit(4, CLUB))
        pos = Demonstration((SPADE, DIAMOND, CLUB), 1)
        assert not strongly_inconsistent(pos, target, target)
        undet = Demonstration((CLUB, DIAMOND), 1)
        assert not strongly_inconsistent(undet, suit(0, CLUB), suit(4, SPADE))

    def test_strongly_inconsistent_validates_by_default(self):
        bad = Demonstration((DIAMOND,), 1)
        with pytest.raises(MalformedDemonstrationError):
            strongly_inconsistent(bad, suit(0, CLUB), suit(1, CLUB))
        assert not strongly_inconsistent(
            bad, suit(0, CLUB), suit(1, CLUB), validate=False)

    def test_format_trajectory(self):
        assert format_trajectory((3, 7, 2, 0)) == "3,7,2,0"
        assert format_trajectory(("Red", "Blue", "Green")) == "Red,Blue,Green"


def _corpus(seed, count):
    """Random (trajectory, t, formula) triples: half numeric, half symbolic."""
    rng = Random(seed)
    symbols = ("a", "b", "c")
    numeric = tuple(range(4))
    out = []
    for k in range(count):
        if k % 2:
            alphabet, preds = symbols, label_preds(symbols)
        else:
            alphabet, preds = numeric, numeric_preds(3)
        f = random_formula(rng, rng.randint(0, 4), preds, max_tau=3, surface=True)
        length = rng.randint(1, 8)
        rho = tuple(rng.choice(alphabet) for _ in range(length))
        t = rng.randint(0, length + 2)
        out.append((rho, t, normalize(f), alphabet))
    return out


class TestProperties:
    def test_duality_strength_and_reference_agreement(self):
        for rho, t, f, _ in _corpus(1137, 10_000):
            s, w = strong_sat(rho, t, f), weak_sat(rho, t, f)
            assert s == ref_strong(rho, t, f)
            assert w == ref_weak(rho, t, f)
            assert strong_sat(rho, t, Not(f)) == (not w)
            assert weak_sat(rho, t, Not(f)) == (not s)
            if s:
                assert w

    def test_verdict_negation_duality(self):
        for rho, _, f, _ in _corpus(2293, 2_000):
            v = verdict(f, rho)
            assert verdict(Not(f), rho) == -v
            assert v == ref_verdict(f, rho)

    def test_prefix_persistence(self):
        for rho, _, f, alphabet in _corpus(3391, 2_000):
            v = verdict(f, rho)
            if v == 0:
                continue
            for ext in all_trajectories(alphabet, 2):
                assert verdict(f, rho + ext) == v

    def test_short_trajectories_force_the_opposite_weak_view(self):
        # With L < t + minimal_length(f, +1) the trajectory weakly satisfies
        # !f, and with L < t + minimal_length(f, -1) it weakly satisfies f —
        # exhaustive over |S|=3 and every trajectory of length <= 6.
        rng = Random(4493)
        preds = numeric_preds(2)
        alphabet = tuple(range(3))
        formulas = [
            normalize(random_formula(rng, rng.randint(0, 3), preds, surface=True))
            for _ in range(100)
        ]
        batches = []
        for length in range(1, 7):
            batches.append(np.array(list(all_trajectories(alphabet, length, length)),
                                    dtype=np.int16))
        for f in formulas:
            zpos, zneg = minimal_length(f, 1), minimal_length(f, -1)
            for states in batches:
                length = states.shape[1]
                strong, weak = eval_bulk(f, states, horizon=7)
                for t in range(8):
                    if length < t + zpos:
                        assert not strong[:, t].any()
                    if length < t + zneg:
                        assert weak[:, t].all()

    def test_minimal_length_bound_is_tight_for_window_threshold_shapes(self):
        # For F/G over a threshold atom there is a trajectory of length
        # exactly minimal_length(f, l) + 1 realizing the strong verdict l.
        for op in "FG":
            for i in range(4):
                for v in range(3):
                    f = parse(f"{op}[<={i}] (x<={v})")
                    for label in (1, -1):
                        z = minimal_length(f, label)
                        realized = [
                            rho
                            for rho in all_trajectories((0, 1, 2, 3), z + 1, z + 1)
                            if verdict(f, rho) == label
                        ]
                        assert realized, (op, i, v, label)


class TestBulkEvaluation:
    def test_matches_reference_numeric(self):
        rng = Random(5557)
        preds = numeric_preds(3)
        states = np.array(list(all_trajectories((0, 1, 2), 4, 4)), dtype=np.int64)
        rows = [tuple(int(x) for x in row) for row in states]
        for _ in range(40):
            f = normalize(random_formula(rng, 3, preds, surface=True))
            strong, weak = eval_bulk(f, states, horizon=5)
            for r, rho in enumerate(rows):
                for t in range(6):
                    assert strong[r, t] == ref_strong(rho, t, f)
                    assert weak[r, t] == ref_weak(rho, t, f)

    def test_matches_reference_symbolic(self):
        rng = Random(7919)
        symbols = ("Red", "Blue", "Green")
        preds = label_preds(symbols)
        states = np.array(list(all_trajectories(symbols, 3, 3)))
        rows = [tuple(row) for row in states]
        for _ in range(40):
            f = normalize(random_formula(rng, 3, preds, surface=True))
            strong, weak = eval_bulk(f, states, horizon=4)
            for r, rho in enumerate(rows):
                for t in range(5):
                    assert strong[r, t] == ref_strong(rho, t, f)
                    assert weak[r, t] == ref_weak(rho, t, f)

    def test_verdicts_bulk(self):
        states = np.array(list(all_trajectories((0, 1, 2, 3), 3, 3)), dtype=np.int64)
        for text in ("G[<=2] (x<=1)", "F[<=1] (x<=0)", "!F[<=3] (x<=2)"):
            f = parse(text)
            got = verdicts_bulk(f, states)
            assert got.dtype == np.int8
            for r, row in enumerate(states):
                assert got[r] == verdict(f, tuple(int(x) for x in row))


def test_max_horizon():
    assert max_horizon(parse("T")) == 0
    assert max_horizon(parse("F[<=3] G[<=2] (x<=1)")) == 5
