"""Hypothesis sets, preference models, pruning, and learner dynamics."""

from random import Random

import pytest

from tlteach.errors import BudgetExceededError, MalformedDemonstrationError
from tlteach.formulas import Atom, F, G, Label, Threshold, parse, render
from tlteach.learner import (
    HypothesisSet,
    LearnerState,
    VersionSpace,
    check_cover_closure,
    check_order_consistency,
    color_manhattan_preference,
    learner_step,
    local_preference,
    manhattan_preference,
    noisy_preference,
    preferred_set,
    preferred_version_space,
    prune,
    ranked_preference,
    uniform_preference,
    window_shape,
)
from tlteach.semantics import Demonstration, verdict
from helpers import SUITS, all_trajectories, suit_grid

NEG_DEMO = Demonstration(("♠", "♦", "♠", "♣", "♣"), -1)
POS_DEMO = Demonstration(("♠", "♦", "♣"), 1)


class TestHypothesisSet:
    def test_construction(self):
        hyps = suit_grid()
        assert len(hyps) == 15
        assert hyps.target == F(2, Atom(Label("♣")))
        assert hyps.id_of(parse("F[<=2] (sym:♣)")) == 2
        with pytest.raises(KeyError):
            hyps.id_of(parse("F[<=9] (sym:♣)"))

    def test_rejects_duplicates_and_bad_target(self):
        f = parse("F[<=1] (x<=1)")
        with pytest.raises(ValueError):
            HypothesisSet((f, f), 0)
        with pytest.raises(ValueError):
            HypothesisSet((f,), 1)

    def test_normalizes_members(self):
        surface = parse("((x<=1) | (x<=2))")
        hyps = HypothesisSet((surface, parse("T")), 1)
        assert hyps.formulas[0] == parse("!(!(x<=1) & !(x<=2))")


class TestVersionSpace:
    def test_full_and_validation(self):
        hyps = suit_grid()
        space = VersionSpace.full(hyps)
        assert space.alive == frozenset(range(15))
        with pytest.raises(ValueError):
            VersionSpace(hyps, frozenset({0, 99}))
        with pytest.raises(ValueError):
            VersionSpace(hyps, frozenset({0, 1}))  # target missing

    def test_prune_card_example(self):
        hyps = suit_grid()
        space = VersionSpace.full(hyps)
        target = hyps.target
        space, eliminated = prune(space, NEG_DEMO, target)
        # The club suit first appears at step 3, spades at 0, diamonds at 1.
        expect = {3, 4} | {5, 6, 7, 8, 9} | {11, 12, 13, 14}
        assert eliminated == expect
        assert space.alive == {0, 1, 2, 10}
        space, eliminated = prune(space, POS_DEMO, target)
        assert eliminated == {0, 1, 10}
        assert space.alive == {hyps.target_id}

    def test_prune_nothing_and_target_survival(self):
        hyps = suit_grid()
        space = VersionSpace.full(hyps)
        neutral = Demonstration(("♣",), 1)  # clubs at 0 satisfies every F[<=i]♣
        space2, eliminated = prune(space, neutral, hyps.target)
        assert eliminated == {5, 10}  # F[<=0](♠/♦) are strongly violated
        only_target = VersionSpace(hyps, frozenset({2}))
        space3, eliminated = prune(only_target, POS_DEMO, hyps.target)
        assert space3.alive == {2} and not eliminated

    def test_prune_rejects_malformed(self):
        hyps = suit_grid()
        with pytest.raises(MalformedDemonstrationError):
            prune(VersionSpace.full(hyps), Demonstration(("♠",), 1), hyps.target)

    def test_prune_idempotent_and_sound(self):
        hyps = suit_grid()
        target = hyps.target
        rng = Random(404)
        demos = []
        space = VersionSpace.full(hyps)
        pool = [
            Demonstration(rho, verdict(target, rho))
            for rho in all_trajectories(SUITS, 4)
            if verdict(target, rho) != 0
        ]
        for demo in rng.sample(pool, 30):
            demos.append(demo)
            space, eliminated = prune(space, demo, target)
            again, none_left = prune(space, demo, target)
            assert again.alive == space.alive and not none_left
            fresh = {
                i for i in range(len(hyps))
                if all(verdict(hyps.formulas[i], d.trajectory) != -d.label
                       for d in demos)
            }
            assert space.alive == fresh


class TestPreferredSets:
    def test_uniform_is_everything(self):
        hyps = suit_grid()
        space = VersionSpace.full(hyps)
        assert preferred_set(space, uniform_preference(), hyps.target) == space.alive

    def test_ranked_cutoff(self):
        a, b, c, t = (parse(s) for s in
                      ("F[<=1] (x<=1)", "F[<=2] (x<=2)", "F[<=3] (x<=3)", "G[<=1] (x<=1)"))
        hyps = HypothesisSet((a, b, c, t), 3)
        pref = ranked_preference({a: 1, t: 2, b: 3, c: 5})
        space = VersionSpace.full(hyps)
        assert preferred_set(space, pref, t) == {0, 3}

    def test_local_manhattan_union_rule_matches_direct_loop(self):
        formulas = [
            parse(f"{op}[<={i}] (x<={v})")
            for op in "FG" for i in range(1, 6) for v in range(11)
        ]
        target = parse("G[<=2] (x<=3)")
        hyps = HypothesisSet(tuple(formulas), formulas.index(target))
        space = VersionSpace(hyps, frozenset(range(0, len(formulas), 3)) | {hyps.target_id})
        pref = manhattan_preference(i_max=5)
        got = preferred_set(space, pref, target)
        expect = {
            i for i in space.alive
            if any(pref.sigma(space.formula(i), space.formula(j))
                   <= pref.sigma(target, space.formula(j))
                   for j in space.alive)
        }
        assert got == expect
        # sigma(f; f) = 1 <= sigma(target; anchor=f), so the union rule keeps
        # every alive hypothesis under this model.
        assert got == space.alive

    def test_preferred_version_space_matches_global_cutoff(self):
        a, b, c, t = (parse(s) for s in
                      ("F[<=1] (x<=1)", "F[<=2] (x<=2)", "F[<=3] (x<=3)", "G[<=1] (x<=1)"))
        hyps = HypothesisSet((a, b, c, t), 3)
        pref = ranked_preference({a: 1, t: 2, b: 3, c: 5})
        space = VersionSpace.full(hyps)
        for current in range(4):
            assert (preferred_version_space(current, space, pref, t)
                    == preferred_set(space, pref, t))

    def test_preferred_version_space_local(self):
        formulas = (parse("G[<=1] (x<=1)"), parse("G[<=1] (x<=3)"),
                    parse("F[<=1] (x<=1)"), parse("G[<=3] (x<=1)"))
        hyps = HypothesisSet(formulas, 1)
        space = VersionSpace.full(hyps)
        pref = manhattan_preference(i_max=5)
        got = preferred_version_space(0, space, pref, hyps.target)
        # From G[<=1](x<=1) the target G[<=1](x<=3) is at 3; the F twin pays
        # the operator penalty and G[<=3](x<=1) ties the bound exactly.
        assert got == {0, 1, 3}


class TestManhattanModel:
    def test_distances(self):
        pref = manhattan_preference(i_max=5)
        cur = parse("F[<=3] (x<=4)")
        assert pref.sigma(parse("F[<=3] (x<=5)"), cur) == 2
        assert pref.sigma(parse("F[<=1] (x<=1)"), cur) == 6
        assert pref.sigma(cur, cur) == 1
        g = pref.sigma(parse("G[<=3] (x<=4)"), cur)
        assert g == 1 + 2 * (5 + 9) + 1

    def test_boundary_switch_flips_operator_stickiness(self):
        pref = manhattan_preference(i_max=5)
        boundary = parse("F[<=1] (x<=10)")
        assert pref.sigma(parse("G[<=1] (x<=10)"), boundary) == 1
        assert pref.sigma(parse("F[<=1] (x<=9)"), boundary) == 2 + 29
        low_boundary = parse("F[<=2] (x<=0)")
        assert pref.sigma(parse("G[<=2] (x<=1)"), low_boundary) == 2
        off = manhattan_preference(i_max=5, boundary_switch=False)
        assert off.sigma(parse("G[<=1] (x<=10)"), boundary) == 1 + 29

    def test_argmin_invariant_under_constant_shift(self):
        base = manhattan_preference(i_max=5)
        shifted = local_preference(lambda f, cur: base.sigma(f, cur) + 7.0)
        cur = parse("F[<=2] (x<=6)")
        pool = [parse(f"F[<={i}] (x<={v})") for i in range(1, 6) for v in range(11)]
        assert base.selection_set(pool, cur) == shifted.selection_set(pool, cur)

    def test_rejects_other_shapes(self):
        pref = manhattan_preference(i_max=5)
        with pytest.raises(ValueError):
            pref.sigma(parse("T"), parse("F[<=1] (x<=1)"))

    def test_color_model(self):
        pref = color_manhattan_preference(i_max=3)
        cur = parse("F[<=2] (sym:Blue)")
        assert pref.sigma(parse("F[<=2] (sym:Red)"), cur) == 2
        assert pref.sigma(parse("F[<=1] (sym:Yellow)"), cur) == 4
        assert pref.sigma(parse("G[<=2] (sym:Blue)"), cur) == 1 + 2 * (3 + 3) + 1
        # No boundary rule: an extreme-color F hypothesis still sticks to F.
        edge = parse("F[<=1] (sym:Yellow)")
        assert pref.sigma(parse("G[<=1] (sym:Yellow)"), edge) > pref.sigma(
            parse("F[<=3] (sym:Red)"), edge)

    def test_window_shape(self):
        assert window_shape(parse("F[<=2] (x<=3)")) == ("F", 2, 3)
        assert window_shape(parse("G[<=1] (x<=0)")) == ("G", 1, 0)
        assert window_shape(parse("T")) is None
        assert window_shape(parse("F[<=2] (sym:Red)")) is None


class TestSelectionSets:
    def test_deterministic_argmin(self):
        pref = manhattan_preference(i_max=5)
        cur = parse("F[<=3] (x<=4)")
        pool = [parse("F[<=3] (x<=5)"), parse("F[<=1] (x<=1)"), parse("G[<=2] (x<=3)")]
        assert pref.selection_set(pool, cur) == [parse("F[<=3] (x<=5)")]

    def test_noisy_inflates_tie_set(self):
        base = manhattan_preference(i_max=5)
        noisy = noisy_preference(base, perturb_radius=1)
        cur = parse("F[<=2] (x<=3)")
        pool = [parse("F[<=2] (x<=2)"), parse("F[<=2] (x<=4)"),
                parse("F[<=2] (x<=5)"), parse("G[<=1] (x<=1)")]
        assert base.selection_set(pool, cur) == pool[:2]
        assert noisy.selection_set(pool, cur) == pool[:3]

    def test_noisy_radius_two(self):
        base = manhattan_preference(i_max=5)
        noisy = noisy_preference(base, perturb_radius=2)
        cur = parse("F[<=2] (x<=3)")
        pool = [parse("F[<=2] (x<=2)"), parse("F[<=2] (x<=6)"),
                parse("F[<=4] (x<=2)"), parse("G[<=1] (x<=1)")]
        # argmin is x<=2; radius 2 reaches F[<=4](x<=2) but not F[<=2](x<=6).
        assert noisy.selection_set(pool, cur) == [pool[0], pool[2]]

    def test_noisy_requires_neighbors(self):
        with pytest.raises(ValueError):
            noisy_preference(local_preference(lambda f, c: 1.0))


class TestLearnerStep:
    def _setting(self):
        formulas = (parse("F[<=1] (x<=1)"), parse("F[<=2] (x<=2)"),
                    parse("G[<=2] (x<=3)"), parse("F[<=3] (x<=5)"))
        hyps = HypothesisSet(formulas, 3)
        return hyps, Demonstration((3, 3), 1)

    def test_stay_if_consistent(self):
        hyps, demo = self._setting()
        state = LearnerState(1, VersionSpace.full(hyps), Random(1))
        nxt = learner_step(state, demo, hyps.target, manhattan_preference(5))
        assert nxt.current == 1
        assert nxt.space.alive == {1, 2, 3}

    def test_move_to_sigma_argmin(self):
        hyps, demo = self._setting()
        state = LearnerState(0, VersionSpace.full(hyps), Random(1))
        nxt = learner_step(state, demo, hyps.target, manhattan_preference(5))
        assert nxt.current == 1  # F[<=2](x<=2) at distance 2 from F[<=1](x<=1)

    def test_uniform_theta_picks_within_alive(self):
        hyps, demo = self._setting()
        pref = uniform_preference()
        seen = set()
        for seed in range(40):
            state = LearnerState(0, VersionSpace.full(hyps), Random(seed))
            nxt = learner_step(state, demo, hyps.target, pref, theta="uniform")
            assert nxt.current in nxt.space.alive
            seen.add(nxt.current)
        assert seen == {1, 2, 3}

    def test_adversarial_theta_avoids_target_deterministically(self):
        hyps, demo = self._setting()
        pref = uniform_preference()
        state = LearnerState(0, VersionSpace.full(hyps), Random(0))
        nxt = learner_step(state, demo, hyps.target, pref, theta="adversarial")
        assert nxt.current == 1
        again = learner_step(LearnerState(0, VersionSpace.full(hyps), Random(9)),
                             demo, hyps.target, pref, theta="adversarial")
        assert again.current == nxt.current

    def test_callable_theta_and_bad_theta(self):
        hyps, demo = self._setting()
        state = LearnerState(0, VersionSpace.full(hyps), Random(1))
        nxt = learner_step(state, demo, hyps.target, uniform_preference(),
                           theta=lambda tie, space: tie[-1])
        assert nxt.current == 3
        with pytest.raises(ValueError):
            learner_step(state, demo, hyps.target, uniform_preference(),
                         theta="nope")

    def test_rejects_bad_state(self):
        hyps, _ = self._setting()
        space = VersionSpace(hyps, frozenset({2, 3}))
        with pytest.raises(ValueError):
            LearnerState(0, space)


def _sticky_suit_model():
    """Preference fixture: candidates pay a big penalty unless they use the
    operator the current hypothesis sticks to (G once the current formula
    mentions clubs, its own operator otherwise); cheaper suits win ties."""
    symrank = {"♠": 1, "♣": 2, "♦": 3}

    def suit_of(f):
        return f.sub.pred.symbol

    def op_of(f):
        return "F" if isinstance(f, F) else "G"

    def sig(candidate, current):
        if candidate == current:
            return 1.0
        preferred_op = "G" if suit_of(current) == "♣" else op_of(current)
        penalty = 10.0 if op_of(candidate) != preferred_op else 0.0
        return penalty + symrank[suit_of(candidate)]

    return local_preference(sig)


class TestOrderConsistency:
    def test_uniform_and_ranked_are_consistent(self):
        hyps = suit_grid()
        ok, witness = check_order_consistency(uniform_preference(), hyps)
        assert ok and witness is None
        ranks = {f: k + 1 for k, f in enumerate(hyps.formulas)}
        ok, witness = check_order_consistency(ranked_preference(ranks), hyps)
        assert ok and witness is None

    def test_sticky_suit_model_fails_with_known_triple(self):
        formulas = (
            parse("F[<=3] (sym:♠)"),
            parse("F[<=5] (sym:♣)"),
            parse("F[<=3] (sym:♦)"),
            parse("G[<=2] (sym:♣)"),
        )
        hyps = HypothesisSet(formulas, 3)
        ok, witness = check_order_consistency(_sticky_suit_model(), hyps)
        assert not ok
        assert witness == (0, 1, 2)

    def test_manhattan_line_violates_order_consistency(self):
        # From anchor F[<=2](x<=1), the hypotheses x<=0 (the target) and
        # x<=2 tie, but from x<=0 the far side x<=2 is strictly worse than
        # the target — Manhattan distance is not order-consistent.
        formulas = tuple(parse(f"F[<=2] (x<={v})") for v in range(4))
        hyps = HypothesisSet(formulas, 0)
        ok, witness = check_order_consistency(
            manhattan_preference(i_max=3, v_max=3), hyps)
        assert not ok
        assert witness == (1, 0, 2)


class TestCoverClosure:
    def _tiny(self):
        formulas = (parse("G[<=1] (x<=1)"), parse("G[<=1] (x<=0)"),
                    parse("F[<=1] (x<=2)"))
        return HypothesisSet(formulas, 2)

    def test_singleton_eliminations_need_an_empty_demo(self):
        hyps = self._tiny()
        target = hyps.target
        neutral = Demonstration((0,), 1)     # leaves both G-hypotheses open
        kill_g0 = Demonstration((1,), 1)     # state 1 violates only x<=0
        ok, witness = check_cover_closure(hyps, [neutral, kill_g0], target)
        assert ok and witness is None
        ok, witness = check_cover_closure(hyps, [kill_g0], target)
        assert not ok
        assert witness == (kill_g0, frozenset())

    def test_missing_singleton_witness(self):
        hyps = self._tiny()
        target = hyps.target
        neutral = Demonstration((0,), 1)
        kill_both = Demonstration((2,), 1)   # state 2 violates both bounds
        ok, witness = check_cover_closure(hyps, [neutral, kill_both], target)
        assert not ok
        assert witness == (kill_both, frozenset({0}))

    def test_numeric_pool_exhaustive(self):
        formulas = tuple(
            parse(s) for s in (
                "F[<=1] (x<=0)", "F[<=2] (x<=1)", "G[<=1] (x<=1)",
                "G[<=2] (x<=2)", "F[<=1] (x<=1)", "F[<=2] (x<=2)",
            ))
        hyps = HypothesisSet(formulas, 5)
        target = hyps.target
        pool = [
            Demonstration(rho, verdict(target, rho))
            for rho in all_trajectories((0, 1, 2), 3)
            if verdict(target, rho) != 0
        ]
        ok, witness = check_cover_closure(hyps, pool, target)
        assert not ok
        demo, missing = witness
        # First unrealizable sub-elimination: (2,2) kills ids {0,2,4}, but no
        # pool demonstration kills F[<=1](x<=1) alone — any trajectory that
        # strongly violates it runs two states above 1, violating ids 0 and 2
        # as well.
        assert demo.trajectory == (2, 2) and demo.label == 1
        assert missing == frozenset({4})

    def test_budget_cap(self):
        hyps = suit_grid()
        # A long negative demonstration eliminates far more than the cap.
        demo = Demonstration(("♠", "♦", "♠", "♣", "♣"), -1)
        with pytest.raises(BudgetExceededError):
            check_cover_closure(hyps, [demo], hyps.target, max_elim=5)
