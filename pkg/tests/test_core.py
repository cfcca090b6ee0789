import itertools

import numpy as np
import pytest

from polyreg.core import (
    Alphabet,
    Dfa,
    FiniteMonoid,
    LetterHom,
    Nfa,
    cyclic_group,
    dfa_accepts,
    dfa_all,
    dfa_contains,
    dfa_is_aperiodic,
    dfa_is_empty,
    dfa_length_mod,
    dfa_none,
    dfa_run,
    flip_flop,
    format_dfa,
    format_monoid,
    hom_image,
    monoid_is_aperiodic,
    nfa_determinize,
    parse_dfa,
    parse_monoid,
    random_dfa,
    tokenize,
    transition_monoid,
    words_up_to,
)
from polyreg.errors import AlphabetMismatch, ParseError, ValidationError


def parity_dfa():
    return Dfa.build("a", ["even", "odd"], "even", ["even"], {("even", "a"): "odd", ("odd", "a"): "even"})


def cyclic3():
    return Dfa.build("a", ["0", "1", "2"], "0", ["0"], {("0", "a"): "1", ("1", "a"): "2", ("2", "a"): "0"})


class TestAlphabetAndWords:
    def test_rejects_empty_duplicate_and_reserved(self):
        for bad in [(), ("a", "a"), ("_",)]:
            with pytest.raises(ValidationError):
                Alphabet(bad)

    def test_tokenize_plain_underline_and_escape(self):
        assert tokenize("ab_c") == ("a", "b", "_c")
        assert tokenize(r"a\x7cb") == ("a", "|", "b")
        assert tokenize("") == ()

    def test_tokenize_longest_match(self):
        assert tokenize("_aab", ["a", "b", "_a"]) == ("_a", "a", "b")
        with pytest.raises(AlphabetMismatch):
            tokenize("abz", ["a", "b"])

    def test_words_up_to_counts(self):
        assert [len(list(words_up_to("ab", n))) for n in range(4)] == [1, 3, 7, 15]

    def test_encode_mismatch(self, ab):
        with pytest.raises(AlphabetMismatch):
            ab.encode(("a", "z"))


class TestDfa:
    def test_run_examples(self):
        d = parity_dfa()
        assert dfa_run(d, "") == d.initial
        assert d.names[dfa_run(d, "aaa")] == "odd"
        one = Dfa.build("abc", ["s"], "s", [], {("s", x): "s" for x in "abc"})
        assert dfa_run(one, "abc") == 0

    def test_accepts_examples(self, ab):
        assert dfa_accepts(dfa_all(ab), "abba")
        assert not dfa_accepts(dfa_none(ab), "abba")
        assert dfa_accepts(parity_dfa(), "aa") and not dfa_accepts(parity_dfa(), "aaa")

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            parity_dfa().run("ab")

    def test_emptiness(self, ab):
        assert dfa_is_empty(dfa_none(ab))
        assert not dfa_is_empty(dfa_all(ab))
        unreachable = Dfa(ab, np.array([[0, 0], [1, 1]]), 0, frozenset({1}))
        assert dfa_is_empty(unreachable)

    def test_incomplete_build_rejected(self):
        with pytest.raises(ValidationError):
            Dfa.build("ab", ["s"], "s", [], {("s", "a"): "s"})

    def test_text_round_trip(self, rng, ab):
        d = random_dfa(rng, ab, 5)
        e = parse_dfa(format_dfa(d))
        assert all(d.accepts(w) == e.accepts(w) for w in words_up_to(ab, 6))

    def test_parse_error(self):
        with pytest.raises(ParseError):
            parse_dfa("alphabet: a\nstates: q\ninitial: q\naccepting: q\nq a -> nowhere\n")


class TestNfa:
    def test_deterministic_nfa(self, ab):
        nfa = Nfa.build(ab, 2, [0], [1], [(0, "a", 1), (0, "b", 0), (1, "a", 1), (1, "b", 0)])
        d = nfa_determinize(nfa)
        assert all(d.accepts(w) == (len(w) > 0 and w[-1] == "a") for w in words_up_to(ab, 5))

    def test_two_initial_states(self, ab):
        # starts with a (states 0,1) or starts with b (states 2,3)
        edges = [(0, "a", 1), (1, "a", 1), (1, "b", 1), (2, "b", 3), (3, "a", 3), (3, "b", 3)]
        nfa = Nfa.build(ab, 4, [0, 2], [1, 3], edges)
        d = nfa_determinize(nfa)
        for w in words_up_to(ab, 4):
            assert d.accepts(w) == nfa.accepts(w) == (len(w) > 0)

    def test_empty_nfa(self, ab):
        d = nfa_determinize(Nfa.build(ab, 1, [0], [], []))
        assert not any(d.accepts(w) for w in words_up_to(ab, 4))

    def test_random_nfas_brute_force(self, rng):
        for k in (1, 2, 3):
            alpha = Alphabet(tuple("abc"[:k]))
            for _ in range(10):
                n = int(rng.integers(1, 5))
                edges = [(p, a, q) for p in range(n) for a in alpha for q in range(n) if rng.random() < 0.3]
                init = [q for q in range(n) if rng.random() < 0.5] or [0]
                acc = [q for q in range(n) if rng.random() < 0.4]
                nfa = Nfa.build(alpha, n, init, acc, edges)
                d = nfa.determinize()
                assert all(d.accepts(w) == nfa.accepts(w) for w in words_up_to(alpha, 5))


class TestMonoids:
    def test_transition_monoid_examples(self):
        one = Dfa.build("a", ["s"], "s", ["s"], {("s", "a"): "s"})
        assert transition_monoid(one)[0].size == 1
        m2, _ = transition_monoid(parity_dfa())
        assert m2.size == 2 and m2.is_group()
        m3, h3 = transition_monoid(cyclic3())
        assert m3.size == 3 and m3.is_group()
        a = h3.letter("a")
        assert m3.power(a, 3) == m3.identity and m3.power(a, 1) != m3.identity

    def test_aperiodicity_examples(self, ab):
        assert monoid_is_aperiodic(FiniteMonoid(np.zeros((1, 1)), 0))
        assert not monoid_is_aperiodic(cyclic_group(2))
        assert monoid_is_aperiodic(flip_flop())
        assert dfa_is_aperiodic(dfa_contains(ab, "a"))
        assert not dfa_is_aperiodic(dfa_length_mod(ab, 2, [0]))

    def test_aperiodic_brute_force(self, rng, ab):
        for _ in range(30):
            m, _ = transition_monoid(random_dfa(rng, ab, int(rng.integers(1, 5))))
            n = m.size
            brute = any(all(m.power(s, N) == m.power(s, N + 1) for s in range(n)) for N in range(1, n + 2))
            assert m.is_aperiodic() == brute

    def test_non_associative_rejected(self):
        table = np.array([[0, 1, 2], [1, 2, 0], [2, 2, 2]])
        with pytest.raises(ValidationError):
            FiniteMonoid(table, 0)

    def test_identity_laws_checked(self):
        with pytest.raises(ValidationError):
            FiniteMonoid(np.array([[0, 0], [0, 1]]), 0)

    def test_hom_image_examples(self):
        z2 = cyclic_group(2)
        h = LetterHom(Alphabet(("a", "b")), z2, (1, 0))
        assert hom_image(h, "") == z2.identity
        assert hom_image(h, "a") == 1
        assert hom_image(h, "ab") == z2.mul(1, 0)

    def test_homomorphism_and_run_laws(self, rng, abc):
        for _ in range(15):
            d = random_dfa(rng, abc, int(rng.integers(1, 6)))
            m, h = transition_monoid(d)
            T = m.transformations
            for _ in range(20):
                u = tuple(rng.choice(list(abc), int(rng.integers(0, 6))))
                v = tuple(rng.choice(list(abc), int(rng.integers(0, 6))))
                assert h(u + v) == m.mul(h(u), h(v))
                assert d.run(u + v) == T[h(v)][T[h(u)][d.initial]]

    def test_monoid_text_round_trip(self):
        text = "elements: e x\nidentity: e\ntable:\n  e x\n  x e\nletters: a->x b->e\n"
        h = parse_monoid(text)
        assert h.monoid.size == 2 and h("aab") == h.monoid.identity
        assert parse_monoid(format_monoid(h)).image == h.image

    def test_monoid_parse_error(self):
        with pytest.raises(ParseError):
            parse_monoid("elements: e x\nidentity: e\ntable:\n  e x\nletters: a->x\n")

    def test_cyclic_and_flip_flop_tables(self):
        z3 = cyclic_group(3)
        assert [z3.mul(a, b) for a, b in itertools.product(range(3), repeat=2)] == [0, 1, 2, 1, 2, 0, 2, 0, 1]
        ff = flip_flop()
        assert ff.mul(1, 2) == 2 and ff.mul(2, 1) == 1
