import numpy as np
import pytest

from polyreg.atomic import IterRev, SequentialTransducer, Squaring, identity_transducer, letter_map, seq_from_step
from polyreg.core import (
    Alphabet,
    dfa_all,
    dfa_contains,
    dfa_length_mod,
    dfa_none,
    random_word,
    words_up_to,
)
from polyreg.errors import AlphabetMismatch, ParseError, ValidationError
from polyreg.pipeline import (
    Pipeline,
    comb_blockwise_map,
    comb_domain_extend,
    comb_if_then_else,
    comb_iterated_append,
    comb_pair_concat,
    format_pipe,
    parse_pipe,
    pipeline_eval,
    pipeline_reverse,
    pipeline_validate,
    rational_from_bidirectional,
    running_example_pipeline,
    running_example_reference,
)

AB = Alphabet(("a", "b"))


def words(alphabet, rng, n_random=500, exhaustive=5, max_len=20):
    out = list(words_up_to(alphabet, exhaustive))
    out += [random_word(rng, tuple(alphabet), max_len, exhaustive + 1) for _ in range(n_random)]
    return out


def square_ab():
    """Squaring read back into {a, b} by dropping underlines."""
    return Pipeline([Squaring(AB), letter_map(AB.underlined(), AB, {"a": "a", "b": "b", "_a": "a", "_b": "b"})])


def parity():
    return seq_from_step(AB, AB, 0, lambda q, a: (1 - q, a))


class TestEval:
    def test_running_example(self):
        p = running_example_pipeline()
        assert "".join(pipeline_eval(p, "babaaa")) == "b|ab|bab|abab|aabab|aaabab|"

    def test_running_example_matches_reference(self, rng):
        p = running_example_pipeline()
        for w in words(AB, rng, 200, 5, 30):
            assert p.eval(w) == running_example_reference(w) == p.eval_reference(w)

    def test_identity_stage(self, rng):
        p = Pipeline([identity_transducer(AB)])
        for w in words(AB, rng, 20):
            assert pipeline_eval(p, w) == w

    def test_squaring_then_full_reverse(self):
        wide = AB.underlined().union(["|"])
        embed = letter_map(AB.underlined(), wide, {a: a for a in AB.underlined()})
        p = Pipeline([Squaring(AB), embed, IterRev(wide, "|")])
        # reversal is per symbol, so underlines stay attached to their letters
        assert p.eval("ab") == ("_b", "a", "b", "_a")

    def test_composition_is_associative(self, rng):
        f, g = running_example_pipeline(), pipeline_reverse(Alphabet(("a", "b", "|")))
        both = f.then(g)
        for w in words(AB, rng, 50, 4, 15):
            assert both.eval(w) == g.eval(f.eval(w))


class TestValidate:
    def test_ok_and_first_order(self):
        r = pipeline_validate(Pipeline([identity_transducer(AB), pipeline_reverse(AB)]))
        assert r.ok and r.first_order

    def test_mismatch_reports_index(self):
        r = pipeline_validate([identity_transducer(AB), Squaring(Alphabet(("x",)))])
        assert not r.ok and r.error_index == 1
        with pytest.raises(AlphabetMismatch):
            Pipeline([identity_transducer(AB), Squaring(Alphabet(("x",)))])

    def test_parity_not_first_order(self):
        assert not pipeline_validate(Pipeline([parity()])).first_order


class TestReverse:
    def test_examples(self, abc):
        p = pipeline_reverse(abc)
        assert "".join(p.eval("abc")) == "cba"
        assert p.eval("") == ()
        assert p.eval("a") == ("a",)
        assert p.is_first_order()


class TestBidirectional:
    def test_identity(self, rng):
        p = rational_from_bidirectional(identity_transducer(AB), identity_transducer(AB))
        for w in words(AB, rng, 50):
            assert p.eval(w) == w

    def test_replace_last_a(self, rng):
        # on the reversed input, the first a is the original last a
        right = seq_from_step(AB, AB, False, lambda done, a: (done or a == "a", "b" if a == "a" and not done else a))
        p = rational_from_bidirectional(identity_transducer(AB), right)

        def spec(w):
            w = list(w)
            for i in range(len(w) - 1, -1, -1):
                if w[i] == "a":
                    w[i] = "b"
                    break
            return tuple(w)

        for w in words_up_to(AB, 6):
            assert p.eval(w) == spec(w)

    def test_empty_input_gets_end_words(self):
        left = letter_map(AB, AB, {"a": "a", "b": "b"}, end="a")
        right = letter_map(AB, AB, {"a": "a", "b": "b"}, end="b")
        # right's end word b is reversed into position 0, then left appends a
        assert "".join(rational_from_bidirectional(left, right).eval("")) == "ba"

    def test_chaining_checked(self):
        with pytest.raises(AlphabetMismatch):
            rational_from_bidirectional(identity_transducer(Alphabet(("x",))), identity_transducer(AB))


class TestIfThenElse:
    def test_always_and_never(self, rng):
        f, g = square_ab(), pipeline_reverse(AB)
        yes = comb_if_then_else(dfa_all(AB), f, g)
        no = comb_if_then_else(dfa_none(AB), f, g)
        for w in words(AB, rng, 50, 3, 10):
            assert yes.eval(w) == f.eval(w)
            assert no.eval(w) == g.eval(w)

    def test_even_length(self, rng):
        f, g = square_ab(), pipeline_reverse(AB)
        L = dfa_length_mod(AB, 2, [0])
        h = comb_if_then_else(L, f, g)
        for w in words(AB, rng, 500, 5, 14):
            assert h.eval(w) == (f.eval(w) if len(w) % 2 == 0 else g.eval(w))

    def test_first_order_when_inputs_qualify(self):
        h = comb_if_then_else(dfa_contains(AB, "a"), square_ab(), pipeline_reverse(AB))
        assert pipeline_validate(h).first_order

    def test_alphabet_constraints(self):
        with pytest.raises(ValidationError):
            comb_if_then_else(dfa_all(Alphabet(("x",))), square_ab(), pipeline_reverse(AB))


class TestDomainExtend:
    def test_sigma_and_delta_inputs(self, rng):
        delta = Alphabet(("x", "y"))
        for h in (square_ab(), pipeline_reverse(AB), running_example_pipeline()):
            e = comb_domain_extend(h, delta)
            for w in words(AB, rng, 100, 4, 12):
                assert e.eval(w) == h.eval(w)
            for w in words(delta, rng, 100, 4, 12):
                assert e.eval(w) == w

    def test_mixed_input_is_total(self, rng):
        e = comb_domain_extend(running_example_pipeline(), Alphabet(("x",)))
        for w in words(Alphabet(("a", "b", "x")), rng, 50, 3, 10):
            e.eval(w)

    def test_disjointness(self):
        with pytest.raises(ValidationError):
            comb_domain_extend(square_ab(), Alphabet(("a",)))


class TestPairConcat:
    def test_examples(self):
        ident, rev = Pipeline([identity_transducer(AB)]), pipeline_reverse(Alphabet(("a", "b", "c")))
        assert "".join(comb_pair_concat(ident, ident).eval("ab")) == "abab"
        id3 = Pipeline([identity_transducer(Alphabet(("a", "b", "c")))])
        assert "".join(comb_pair_concat(id3, rev).eval("abc")) == "abccba"

    def test_against_reference(self, rng):
        f, g = square_ab(), pipeline_reverse(AB)
        h = comb_pair_concat(f, g)
        assert h.eval("") == f.eval("") + g.eval("")
        for w in words(AB, rng, 500, 5, 12):
            assert h.eval(w) == f.eval(w) + g.eval(w)
        assert pipeline_validate(h).first_order


def iterated_append_ref(w, sep="|"):
    blocks = [[]]
    for a in w:
        if a == sep:
            blocks.append([])
        else:
            blocks[-1].append(a)
    v = blocks[-1]
    out = []
    for i, b in enumerate(blocks[:-1]):
        if i:
            out.append(sep)
        out.extend(b + v)
    return tuple(out)


class TestIteratedAppend:
    def test_examples(self):
        p = comb_iterated_append(Alphabet(tuple("12345678|")), "|")
        assert "".join(p.eval("12|345|6|78")) == "1278|34578|678"
        q = comb_iterated_append(Alphabet(("a", "b", "v", "|")), "|")
        assert "".join(q.eval("|v")) == "v"
        assert "".join(q.eval("a|b")) == "ab"

    def test_against_reference(self, rng):
        alpha = Alphabet(("a", "b", "|"))
        p = comb_iterated_append(alpha, "|")
        for w in words(alpha, rng, 500, 5, 16):
            assert p.eval(w) == iterated_append_ref(w)
        assert p.is_first_order()


def blockwise_ref(f, w, sep="|"):
    blocks = [[]]
    for a in w:
        if a == sep:
            blocks.append([])
        else:
            blocks[-1].append(a)
    out = []
    for i, b in enumerate(blocks):
        if i:
            out.append(sep)
        out.extend(f(tuple(b)))
    return tuple(out)


class TestBlockwiseMap:
    def test_reverse_example(self):
        digits = Alphabet(tuple("12345"))
        p = comb_blockwise_map(pipeline_reverse(digits), "|")
        assert "".join(p.eval("12|3|45")) == "21|3|54"

    @pytest.mark.parametrize("make", [lambda: Pipeline([identity_transducer(AB)]), lambda: pipeline_reverse(AB), square_ab, running_example_pipeline])
    def test_against_reference(self, make, rng):
        f = make()
        p = comb_blockwise_map(f, "#")
        alpha = Alphabet(("a", "b", "#"))
        for w in words(alpha, rng, 300, 5, 14):
            assert p.eval(w) == blockwise_ref(f.eval, w, "#")

    def test_single_block_squaring(self):
        sq = Squaring(Alphabet(("a", "b", "c")))
        p = comb_blockwise_map(sq, "|")
        assert p.eval("abc") == sq.eval("abc")

    def test_separator_collision(self):
        with pytest.raises(ValidationError):
            comb_blockwise_map(pipeline_reverse(AB), "a")


class TestTextFormat:
    def test_round_trip(self, rng):
        for p in (running_example_pipeline(), square_ab(), comb_iterated_append(Alphabet(("a", "b", "|")), "|")):
            q = parse_pipe(format_pipe(p))
            for w in words(p.input_alphabet, rng, 50, 4, 12):
                assert q.eval(w) == p.eval(w)

    def test_reverse_line(self):
        p = parse_pipe("alphabet: a b\nreverse\n")
        assert "".join(p.eval("aab")) == "baa"

    def test_errors(self):
        with pytest.raises(ParseError):
            parse_pipe("square\n")
        with pytest.raises(ParseError):
            parse_pipe("alphabet: a\nfrobnicate\n")
        with pytest.raises(ValidationError):
            parse_pipe("alphabet: a\nitrev |\n")
