import pytest

from helpers import random_letters, random_two_way
from polyreg.atomic import IterRev, Squaring, identity_transducer, letter_map, seq_from_step
from polyreg.core import Alphabet, hom_image, random_word, words_up_to
from polyreg.errors import ParseError, RejectedInput, ValidationError
from polyreg.pebble import (
    ACCEPT,
    FIRST,
    LAST,
    LEFT,
    MOVE_RIGHT,
    POP,
    PUSH,
    REJECT,
    RIGHT,
    STAY,
    PebbleTransducer,
    at_last,
    crossing_compose,
    crossing_semigroup,
    crossing_semigroup_full,
    crossing_type,
    format_peb,
    overlapping_rules,
    parse_guard,
    parse_peb,
    pebble_compose_runtime,
    pebble_eval,
    pebble_from_sequential,
    pebble_iterated_reverse,
    pebble_run,
    pebble_run_word,
    pebble_running_example,
    pebble_squaring,
    pebble_step,
    rule,
)
from polyreg.pipeline import running_example_reference
from test_atomic import double_a, seen_a

AB = Alphabet(("a", "b"))
SEP = Alphabet(("a", "b", "|"))


def sweeper(alphabet=AB):
    """Moves right to the last position, then stops in the final state."""
    rules = (rule("go", "end", STAY, guard=at_last()), rule("go", "go", MOVE_RIGHT))
    return PebbleTransducer(alphabet, alphabet, 1, ("go", "end"), "go", "end", rules, {"go": ("a",)})


class TestStep:
    def test_move_past_last_is_terminal(self):
        assert pebble_step(sweeper(), "ab", "go", (1,)) == ("end", (1,))
        t = PebbleTransducer(AB, AB, 1, ("s",), "s", "s", (rule("s", "s", MOVE_RIGHT),), {})
        assert pebble_step(t, "ab", "s", (1,)) is None
        assert pebble_step(t, "ab", "s", (0,)) == ("s", (1,))

    def test_push_at_capacity_and_pop_at_bottom(self):
        t = PebbleTransducer(AB, AB, 2, ("s", "t"), "s", "t", (rule("s", "t", PUSH), rule("t", "s", POP)), {})
        assert pebble_step(t, "ab", "s", (0,)) == ("t", (0, 0))
        assert pebble_step(t, "ab", "s", (0, 1)) is None
        assert pebble_step(t, "ab", "t", (1,)) is None
        assert pebble_step(t, "ab", "t", (0, 1)) == ("s", (0,))


class TestRun:
    def test_initial_is_final(self):
        t = PebbleTransducer(AB, AB, 1, ("f",), "f", "f", (), {"f": ("a",)})
        run, ok = pebble_run(t, "b")
        assert ok and len(run) == 1
        assert pebble_run_word(t, "b") == "[1:f]b"

    def test_right_sweep(self):
        run, ok = pebble_run(sweeper(), "ab")
        assert ok and run == [("go", (0,)), ("go", (1,)), ("end", (1,))]
        text = pebble_run_word(sweeper(), "ab")
        assert text == "[1:go]ab|a[1:go]b|a[1:end]b"
        assert len(text.split("|")) == len(run)

    def test_loop_detected_by_bound(self):
        t = PebbleTransducer(AB, AB, 1, ("s", "f"), "s", "f", (rule("s", "s", STAY),), {})
        run, ok = pebble_run(t, "ab")
        assert not ok and len(run) == t.config_bound(2) + 1
        with pytest.raises(RejectedInput):
            pebble_eval(t, "ab")

    def test_empty_input(self):
        t = pebble_from_sequential(double_a())
        assert pebble_eval(t, "") == ()
        with pytest.raises(ValidationError):
            pebble_run(t, "")

    def test_two_pebble_run_word_marks_both(self):
        text = pebble_run_word(pebble_squaring(Alphabet(("a",))), "a")
        assert text.split("|")[1] == "[1][2:rewind]a"

    def test_run_length_bound(self, rng):
        t = pebble_squaring(AB)
        for w in words_up_to(AB, 5):
            if w:
                run, ok = pebble_run(t, w)
                assert ok and len(run) <= t.n_states * len(w) ** t.k


class TestBuilders:
    def test_from_sequential(self, rng):
        for s in (identity_transducer(AB), double_a(), seen_a()):
            t = pebble_from_sequential(s)
            assert pebble_eval(t, "") == s.eval("")
            for w in list(words_up_to(AB, 5)) + [random_word(rng, "ab", 20) for _ in range(500)]:
                assert pebble_eval(t, w) == s.eval(w)
        assert "".join(pebble_eval(pebble_from_sequential(double_a()), "aba")) == "aabaa#"
        assert pebble_from_sequential(seen_a()).is_first_order()

    def test_squaring(self, rng):
        digits = Alphabet(tuple("1234"))
        assert "".join(pebble_eval(pebble_squaring(digits), "1234")) == "_12341_23412_34123_4"
        assert pebble_eval(pebble_squaring(AB), "a") == ("_a",)
        t, sq = pebble_squaring(AB), Squaring(AB)
        for w in list(words_up_to(AB, 5)) + [random_word(rng, "ab", 8) for _ in range(500)]:
            out = pebble_eval(t, w)
            assert out == sq.eval(w) and len(out) == len(w) ** 2

    def test_iterated_reverse(self, rng):
        digits = Alphabet(tuple("123456789|"))
        assert "".join(pebble_eval(pebble_iterated_reverse(IterRev(digits, "|")), "123|45|678|9")) == "321|54|876|9"
        spec = IterRev(SEP, "|")
        t = pebble_iterated_reverse(spec)
        assert pebble_eval(t, "") == ()
        for w in list(words_up_to(SEP, 5)) + [random_word(rng, "ab|", 20) for _ in range(500)]:
            assert pebble_eval(t, w) == spec.eval(w)

    def test_running_example(self, rng):
        t = pebble_running_example()
        assert "".join(pebble_eval(t, "babaaa")) == "b|ab|bab|abab|aabab|aaabab|"
        for w in words_up_to(AB, 5):
            assert pebble_eval(t, w) == running_example_reference(w)


class TestComposeRuntime:
    def test_squaring_after_identity(self, rng):
        c = pebble_compose_runtime(pebble_squaring(AB), pebble_from_sequential(identity_transducer(AB)))
        for _ in range(50):
            w = random_word(rng, "ab", 8)
            assert c.eval(w) == Squaring(AB).eval(w)

    def test_iterated_reverse_twice(self, rng):
        t = pebble_iterated_reverse(IterRev(SEP, "|"))
        c = pebble_compose_runtime(t, t)
        for w in words_up_to(SEP, 5):
            assert c.eval(w) == w

    def test_running_assembly(self):
        outer = pebble_running_example()
        inner = pebble_from_sequential(identity_transducer(AB))
        c = pebble_compose_runtime(outer, inner)
        assert "".join(c.eval("babaaa")) == "b|ab|bab|abab|aabab|aaabab|"

    def test_mismatch(self):
        with pytest.raises(ValidationError):
            pebble_compose_runtime(pebble_squaring(Alphabet(("x",))), pebble_squaring(AB))

    def test_rejection_propagates(self):
        stuck = PebbleTransducer(AB, AB, 1, ("s", "f"), "s", "f", (), {})
        c = pebble_compose_runtime(stuck, pebble_from_sequential(identity_transducer(AB)))
        with pytest.raises(RejectedInput):
            c.eval("ab")


class TestCrossing:
    def test_right_mover_exits_right(self):
        t = PebbleTransducer(AB, AB, 1, ("q", "r", "f"), "q", "f", (rule("q", "r", MOVE_RIGHT),), {})
        c = crossing_type(t, "a")
        assert c.outcome("q", LEFT) == ("r", RIGHT)
        assert c.outcome("r", LEFT) == REJECT

    def test_no_rules_rejects_everywhere(self):
        t = PebbleTransducer(AB, AB, 1, ("q", "f"), "q", "f", (), {})
        c = crossing_type(t, "ab")
        assert all(v == REJECT for (q, _), v in c.behavior if q != "f")

    def test_reaching_final_accepts(self):
        c = crossing_type(sweeper(), "ab", {LAST})
        assert c.outcome("go", LEFT) == ACCEPT
        assert c.outcome("end", RIGHT) == ACCEPT

    def test_incompatible_marks(self):
        t = sweeper()
        with pytest.raises(ValidationError):
            crossing_compose(crossing_type(t, "a", {LAST}), crossing_type(t, "b"))
        with pytest.raises(ValidationError):
            crossing_type(pebble_squaring(AB), "a")

    def test_compose_with_all_reject(self):
        t = PebbleTransducer(AB, AB, 1, ("q", "f"), "q", "f", (rule("q", "q", MOVE_RIGHT, "a"),), {})
        left, dead = crossing_type(t, "a"), crossing_type(t, "b")
        assert left.outcome("q", LEFT) == ("q", RIGHT)
        assert crossing_compose(left, dead).outcome("q", LEFT) == REJECT

    def test_homomorphism_random(self, rng):
        for _ in range(200):
            t = random_two_way(rng)
            u = random_letters(rng, ("a", "b"), 1, 5)
            v = random_letters(rng, ("a", "b"), 1, 5)
            mu = {FIRST} if rng.random() < 0.5 else set()
            mv = {LAST} if rng.random() < 0.5 else set()
            assert crossing_type(t, u + v, mu | mv) == crossing_compose(crossing_type(t, u, mu), crossing_type(t, v, mv))

    def test_whole_word_type_predicts_acceptance(self, rng):
        for _ in range(100):
            t = random_two_way(rng)
            w = random_letters(rng, ("a", "b"), 1, 6)
            _, ok = pebble_run(t, w)
            assert (crossing_type(t, w, {FIRST, LAST}).outcome("q0", LEFT) == ACCEPT) == ok

    def test_associativity(self, rng):
        for _ in range(100):
            t = random_two_way(rng)
            a, b, c = (crossing_type(t, random_letters(rng, ("a", "b"), 1, 3)) for _ in range(3))
            assert crossing_compose(crossing_compose(a, b), c) == crossing_compose(a, crossing_compose(b, c))


class TestCrossingSemigroup:
    def test_right_sweeper_aperiodic(self):
        m, _ = crossing_semigroup(sweeper())
        assert m.size <= 4 and m.is_aperiodic()

    def test_hom_matches_crossing_of_word(self, rng):
        for _ in range(20):
            t = random_two_way(rng)
            m, h, elems = crossing_semigroup_full(t)
            for w in ("ab", "ba", "aab", "abba"):
                assert elems[hom_image(h, w)] == crossing_type(t, w)

    def test_identity_neutral(self, rng):
        m, _ = crossing_semigroup(random_two_way(rng))
        assert all(m.mul(0, x) == x == m.mul(x, 0) for x in range(m.size))

    def test_counter_free_sources_aperiodic(self):
        for t in (
            pebble_from_sequential(seen_a()),
            pebble_from_sequential(identity_transducer(AB)),
            pebble_iterated_reverse(IterRev(SEP, "|")),
        ):
            assert crossing_semigroup(t)[0].is_aperiodic()

    def test_parity_sweep_is_not_aperiodic(self):
        parity = seq_from_step(AB, AB, 0, lambda q, a: (1 - q, a))
        assert not crossing_semigroup(pebble_from_sequential(parity))[0].is_aperiodic()


class TestTextFormat:
    def test_round_trip(self, rng):
        for t in (pebble_squaring(AB), pebble_running_example(), pebble_iterated_reverse(IterRev(SEP, "|"))):
            u = parse_peb(format_peb(t))
            for w in words_up_to(t.input_alphabet, 4):
                assert pebble_eval(u, w) == pebble_eval(t, w)

    def test_guards(self):
        g = parse_guard("p1<=p2 & !(height=1) | placed(p2)")
        assert g.holds((0, 1), 0, 3)
        assert not parse_guard("last<=p1").holds((1,), 0, 3)
        with pytest.raises(ParseError):
            parse_guard("p1 <=")

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            parse_peb("alphabet: a\npebbles: 1\nstates: q\ninitial: q\n")
        with pytest.raises(ParseError):
            parse_peb("alphabet: a\npebbles: 1\nstates: q\ninitial: q\nfinal: q\nq => q jump\n")

    def test_undeclared_state(self):
        with pytest.raises(ValidationError):
            PebbleTransducer(AB, AB, 1, ("q",), "q", "q", (rule("q", "z"),), {})

    def test_overlap_warning(self):
        assert overlapping_rules(sweeper()) != []
        t = PebbleTransducer(AB, AB, 1, ("q",), "q", "q", (rule("q", "q", STAY, "a"), rule("q", "q", STAY, "b")), {})
        assert overlapping_rules(t) == []
