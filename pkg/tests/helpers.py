"""Shared generators for the test suites."""

from polyreg.core import Alphabet
from polyreg.pebble import MOVE_LEFT, MOVE_RIGHT, STAY, TRUE, PebbleTransducer, at_first, at_last, rule


def random_two_way(rng, alphabet=("a", "b"), n_states=3, n_rules=8) -> PebbleTransducer:
    """A random one-pebble automaton; states q0.. plus the final state f."""
    sigma = Alphabet(tuple(alphabet))
    states = [f"q{i}" for i in range(n_states)] + ["f"]
    guards = [TRUE, TRUE, at_first(), at_last()]
    rules = []
    for _ in range(n_rules):
        src = states[int(rng.integers(0, n_states))]
        dst = states[int(rng.integers(0, n_states + 1))]
        letters = [a for a in sigma if rng.random() < 0.6] or None
        guard = guards[int(rng.integers(0, len(guards)))]
        action = (MOVE_LEFT, STAY, MOVE_RIGHT, MOVE_RIGHT)[int(rng.integers(0, 4))]
        rules.append(rule(src, dst, action, letters, guard))
    outputs = {q: (q[-1],) for q in states}
    gamma = Alphabet(tuple(sorted({q[-1] for q in states})))
    return PebbleTransducer(sigma, gamma, 1, tuple(states), "q0", "f", tuple(rules), outputs)


def random_letters(rng, alphabet, lo, hi):
    n = int(rng.integers(lo, hi + 1))
    return tuple(alphabet[int(i)] for i in rng.integers(0, len(alphabet), n))


def random_hom(rng, monoid, letters=("a", "b", "c")):
    from polyreg.core import Alphabet, LetterHom

    image = [int(rng.integers(monoid.size)) for _ in letters]
    return LetterHom(Alphabet(tuple(letters)), monoid, tuple(image))


def random_small_hom(rng, max_size=6):
    """Transition monoid of a random small Dfa, retried until it is small."""
    from polyreg.core import Alphabet, random_dfa, transition_monoid

    while True:
        k = int(rng.integers(2, 4))
        alphabet = Alphabet(tuple("abc"[:k]))
        m, h = transition_monoid(random_dfa(rng, alphabet, int(rng.integers(2, 4))))
        if m.size <= max_size:
            return h


def small_homs(rng, count=20):
    """Z2, Z3, the flip-flop, a product, then random transition monoids."""
    from polyreg.core import FiniteMonoid, cyclic_group, flip_flop

    z2, ff = cyclic_group(2), flip_flop()
    n = z2.size * ff.size
    table = [[ff.size * ((a // ff.size + b // ff.size) % 2) + ff.mul(a % ff.size, b % ff.size) for b in range(n)] for a in range(n)]
    prod = FiniteMonoid(table, ff.identity)
    homs = [random_hom(rng, m) for m in (z2, cyclic_group(3), ff, prod)]
    while len(homs) < count:
        homs.append(random_small_hom(rng))
    return homs
