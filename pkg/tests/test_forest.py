import numpy as np
import pytest

from polyreg.core import Alphabet, LetterHom, cyclic_group, hom_image, parse_monoid, random_word
from polyreg.errors import CapExceeded, ValidationError
from polyreg.forest import (
    BINARY,
    UNRANKED,
    Forest,
    Node,
    TouchCounter,
    forest_build,
    forest_height,
    forest_validate,
    format_forest,
    h_height_bruteforce,
    interval_product,
    leaf,
)
from helpers import random_hom, small_homs


def z2_hom(image=(1,), letters=("a",)):
    return LetterHom(Alphabet(letters), cyclic_group(2), image)


class TestBuild:
    def test_single_letter(self):
        f = forest_build(z2_hom(), "a")
        assert f.root == leaf(1, 1)
        assert forest_height(f) == 1

    def test_aaaa_plain(self):
        f = forest_build(z2_hom(), "aaaa", "plain")
        assert f.root.kind == UNRANKED and len(f.root.children) == 4
        assert forest_height(f) == 2

    def test_aaaa_idempotent(self):
        f = forest_build(z2_hom(), "aaaa", "idempotent")
        assert forest_height(f) == 3
        assert forest_validate(f).ok

    def test_empty_word_rejected(self):
        with pytest.raises(ValidationError):
            forest_build(z2_hom(), "")

    def test_bad_mode(self):
        with pytest.raises(ValidationError):
            forest_build(z2_hom(), "a", "greedy")

    def test_minimal_against_bruteforce(self, rng):
        for h in small_homs(rng, 8):
            for _ in range(6):
                w = random_word(rng, tuple(h.alphabet), 9, 1)
                for mode in ("plain", "idempotent"):
                    f = forest_build(h, w, mode)
                    assert forest_validate(f, height_bound=None if mode == "idempotent" else 10**6).ok
                    assert forest_height(f) == h_height_bruteforce(h, w, mode)

    def test_height_cap(self):
        with pytest.raises(CapExceeded):
            forest_build(z2_hom(), "a" * 20, "idempotent", max_height=2)

    def test_long_words_within_bound(self, rng):
        for h in small_homs(rng, 6):
            w = random_word(rng, tuple(h.alphabet), 120, 100)
            f = forest_build(h, w)
            assert forest_height(f) <= 3 * h.monoid.size
            assert forest_validate(f).ok


class TestValidate:
    def test_unequal_unranked(self):
        h = LetterHom(Alphabet(("a", "b")), cyclic_group(2), (1, 0))
        kids = (leaf(1, 1), leaf(2, 0), leaf(3, 1))
        f = Forest(tuple("aba"), h, Node(UNRANKED, 1, 3, 0, kids), "plain")
        report = forest_validate(f)
        assert not report.ok
        assert any("different values" in v.message for v in report.violations)

    def test_wrong_annotation_has_path(self):
        h = z2_hom()
        bad = Node(BINARY, 1, 2, 0, (leaf(1, 1), leaf(2, 0)))
        f = Forest(("a", "a"), h, bad, "plain")
        paths = [v.path for v in forest_validate(f).violations]
        assert (1,) in paths

    def test_non_idempotent_run(self):
        h = z2_hom()
        f = Forest(tuple("aaa"), h, Node(UNRANKED, 1, 3, 1, tuple(leaf(i, 1) for i in (1, 2, 3))), "idempotent")
        assert any("idempotent" in v.message for v in forest_validate(f).violations)

    def test_gap_between_children(self):
        h = z2_hom()
        f = Forest(tuple("aaa"), h, Node(BINARY, 1, 3, 1, (leaf(1, 1), leaf(3, 1))), "plain")
        assert not forest_validate(f).ok


class TestHeight:
    def test_examples(self):
        assert forest_height(leaf(1, 0)) == 1
        assert forest_height(Node(BINARY, 1, 2, 0, (leaf(1, 1), leaf(2, 1)))) == 2


class TestIntervalProduct:
    def test_examples(self):
        h = LetterHom(Alphabet(("a", "b")), cyclic_group(2), (1, 0))
        f = forest_build(h, "abab")
        assert interval_product(f, 1, 3) == 0
        assert interval_product(f, 2, 2) == 0
        assert interval_product(f, 1, 4) == f.root.value

    def test_out_of_range(self):
        f = forest_build(z2_hom(), "aa")
        with pytest.raises(ValidationError):
            interval_product(f, 0, 1)
        with pytest.raises(ValidationError):
            interval_product(f, 2, 1)

    def test_random_queries_and_touch_count(self, rng):
        for h in small_homs(rng, 6):
            w = random_word(rng, tuple(h.alphabet), 80, 40)
            f = forest_build(h, w)
            bound = 4 * forest_height(f)
            for _ in range(100):
                i = int(rng.integers(1, len(w) + 1))
                j = int(rng.integers(i, len(w) + 1))
                c = TouchCounter()
                assert interval_product(f, i, j, c) == hom_image(h, w[i - 1 : j])
                assert c.touched <= bound


class TestBruteForce:
    def test_examples(self):
        h = z2_hom()
        assert h_height_bruteforce(h, "a") == 1
        assert h_height_bruteforce(h, "aa") == 2
        assert h_height_bruteforce(h, "aaaa") == 2

    def test_guard(self):
        with pytest.raises(CapExceeded):
            h_height_bruteforce(z2_hom(), "a" * 13)


def test_format_and_monoid_file():
    from pathlib import Path

    text = (Path(__file__).resolve().parent.parent / "models" / "flipflop.mon").read_text()
    h = parse_monoid(text)
    f = forest_build(h, tuple(h.alphabet) * 3)
    out = format_forest(f)
    assert out.splitlines()[0].startswith(f.root.kind)
    assert forest_validate(f).ok
