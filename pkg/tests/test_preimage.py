import numpy as np
import pytest

from polyreg.atomic import IterRev, Squaring, identity_transducer, letter_map, seq_eval
from polyreg.core import (
    Alphabet,
    Dfa,
    dfa_all,
    dfa_contains,
    dfa_ends_with,
    dfa_is_aperiodic,
    dfa_length_mod,
    dfa_none,
    dfa_only_empty,
    random_dfa,
    random_word,
    words_up_to,
)
from polyreg.errors import AlphabetMismatch
from polyreg.pipeline import Pipeline, running_example_pipeline
from polyreg.preimage import (
    brute_force_agreement,
    dfa_minimize,
    pipeline_can_output,
    preimage_iterated_reverse,
    preimage_pipeline,
    preimage_sequential,
    preimage_squaring,
    preimage_stage,
)
from test_atomic import double_a, seen_a

AB = Alphabet(("a", "b"))
ABS = Alphabet(("a", "b", "|"))


def agrees(f, pre, L, alphabet, n=6, rng=None, extra=0, max_len=12):
    ws = list(words_up_to(alphabet, n))
    if rng is not None:
        ws += [random_word(rng, tuple(alphabet), max_len) for _ in range(extra)]
    total, bad = brute_force_agreement(f, pre, L, ws)
    assert total == len(ws)
    return bad




class TestSequential:
    def test_identity(self, rng):
        for _ in range(5):
            L = random_dfa(rng, AB, 4)
            pre = preimage_sequential(identity_transducer(AB), L)
            for w in words_up_to(AB, 5):
                assert pre.accepts(w) == L.accepts(w)

    def test_double_a_even_length(self):
        t = double_a()
        L = dfa_length_mod(t.output_alphabet, 2, [0])
        pre = preimage_sequential(t, L)
        assert agrees(lambda w: seq_eval(t, w), pre, L, AB) == []

    def test_everything(self):
        t = double_a()
        pre = preimage_sequential(t, dfa_all(t.output_alphabet))
        assert all(pre.accepts(w) for w in words_up_to(AB, 4))

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            preimage_sequential(double_a(), dfa_all(AB))

    def test_random_languages(self, rng):
        t = seen_a()
        for _ in range(10):
            L = random_dfa(rng, AB, 4)
            pre = preimage_sequential(t, L)
            assert agrees(lambda w: seq_eval(t, w), pre, L, AB) == []


class TestSquaring:
    def test_contains_underlined_b(self):
        s = Squaring(AB)
        L = dfa_contains(s.output_alphabet, "_b")
        pre = preimage_squaring(s, L)
        for w in words_up_to(AB, 5):
            assert pre.accepts(w) == ("b" in w)

    def test_all_and_none(self):
        s = Squaring(AB)
        assert all(preimage_squaring(s, dfa_all(s.output_alphabet)).accepts(w) for w in words_up_to(AB, 4))
        assert preimage_squaring(s, dfa_none(s.output_alphabet)).is_empty()

    def test_only_empty(self):
        s = Squaring(AB)
        pre = preimage_squaring(s, dfa_only_empty(s.output_alphabet))
        assert [w for w in words_up_to(AB, 4) if pre.accepts(w)] == [()]

    def test_random_languages(self, rng):
        s = Squaring(AB)
        for _ in range(8):
            L = random_dfa(rng, s.output_alphabet, 3)
            pre = preimage_squaring(s, L)
            assert agrees(s.eval, pre, L, AB) == []

    def test_three_letters(self, rng):
        s = Squaring(Alphabet(("a", "b", "c")))
        L = random_dfa(rng, s.output_alphabet, 3)
        assert agrees(s.eval, preimage_squaring(s, L), L, s.alphabet, 5) == []


class TestIteratedReverse:
    def test_random_languages(self, rng):
        s = IterRev(ABS, "|")
        for _ in range(10):
            L = random_dfa(rng, ABS, 4)
            pre = preimage_iterated_reverse(s, L)
            assert agrees(s.eval, pre, L, ABS) == []

    def test_reversal_closed_language(self):
        s = IterRev(ABS, "|")
        L = Dfa.build(
            ABS, ["e", "o"], "e", ["e"], {(q, a): ({"e": "o", "o": "e"}[q] if a == "|" else q) for q in "eo" for a in ABS}
        )
        pre = preimage_iterated_reverse(s, L)
        for w in words_up_to(ABS, 5):
            assert pre.accepts(w) == L.accepts(w)

    def test_empty(self):
        assert preimage_iterated_reverse(IterRev(ABS, "|"), dfa_none(ABS)).is_empty()

    def test_last_block_starts_with_a(self):
        # the output ends with a iff the last input block starts with a
        s = IterRev(ABS, "|")
        L = dfa_ends_with(ABS, "a")
        pre = preimage_iterated_reverse(s, L)
        assert pre.accepts("ab|ba") is False
        assert pre.accepts("ba|ab") is True
        assert pre.accepts("b|a") is True
        assert pre.accepts("ab|") is False


class TestPipeline:
    def test_running_ends_with_bar(self):
        p = running_example_pipeline()
        L = dfa_ends_with(p.output_alphabet, "|")
        rep = preimage_pipeline(p, L)
        # the empty input has the empty output, which does not end with |
        for w in words_up_to(AB, 6):
            assert rep.result.accepts(w) == (len(w) > 0)
        assert rep.applicable and rep.first_order_preserved
        assert dfa_is_aperiodic(rep.result)

    def test_all_words(self):
        p = running_example_pipeline()
        rep = preimage_pipeline(p, dfa_all(p.output_alphabet))
        assert rep.result.n_states == 1 and rep.result.accepts("abba")

    def test_two_stage(self, rng):
        p = Pipeline([Squaring(AB), letter_map(AB.underlined(), AB, {"a": "a", "b": "b", "_a": "b", "_b": "a"})])
        for _ in range(5):
            L = random_dfa(rng, AB, 3)
            rep = preimage_pipeline(p, L)
            assert agrees(p.eval, rep.result, L, AB) == []

    def test_non_first_order_not_applicable(self):
        from test_atomic import parity_transducer

        t = parity_transducer()
        rep = preimage_pipeline(Pipeline([t]), dfa_all(t.output_alphabet))
        assert not rep.applicable and not rep.first_order_preserved

    def test_single_stage_equals_atomic(self, rng):
        s = IterRev(ABS, "|")
        L = random_dfa(rng, ABS, 3)
        a = preimage_stage(s, L)
        b = preimage_pipeline(Pipeline([s]), L).result
        for w in words_up_to(ABS, 5):
            assert a.accepts(w) == b.accepts(w)


class TestCanOutput:
    def test_empty_output(self):
        s = Squaring(AB)
        assert pipeline_can_output(Pipeline([s]), dfa_only_empty(s.output_alphabet))

    def test_no_underlined_b_over_a(self):
        s = Squaring(Alphabet(("a",)))
        L = dfa_contains(Alphabet(("a", "_a", "_b")), "_b")
        assert not pipeline_can_output(Pipeline([s]), L)

    def test_nonempty_output(self):
        p = running_example_pipeline()
        L = Dfa.build(p.output_alphabet, ["e", "n"], "e", ["n"], {(q, a): "n" for q in "en" for a in p.output_alphabet})
        assert pipeline_can_output(p, L)


class TestMinimize:
    def test_language_preserved(self, rng):
        for _ in range(20):
            d = random_dfa(rng, AB, 6)
            m = dfa_minimize(d)
            assert m.n_states <= d.n_states
            for w in words_up_to(AB, 6):
                assert m.accepts(w) == d.accepts(w)

    def test_collapses(self):
        d = dfa_length_mod(AB, 4, [0, 2])
        assert dfa_minimize(d).n_states == 2
