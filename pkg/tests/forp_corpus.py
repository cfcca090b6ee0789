"""Programs used alongside the built-in corpus in compiler tests."""

from polyreg.forlang import CORPUS, corpus_program, forp_parse

EXTRA = {
    "copy_bar": """\
input: a b |
output: a b |
for x in first..last {
  if a(x) then output a
  if b(x) then output b
  if |(x) then output |
}
""",
    "strip": """\
input: a b _a _b
output: a b
for x in first..last {
  if a(x) or _a(x) then output a else output b
}
""",
    "count_p": """\
input: p
output: a b
for x in first..last { if x = last then output b else output a }
""",
}

# (inner, outer) pairs with matching alphabets
COMPOSE_PAIRS = [
    ("copy", "copy"),
    ("running", "block_reverse"),
    ("block_reverse", "block_reverse"),
    ("reverse", "copy"),
    ("square", "strip"),
    ("after_first_b", "reverse"),
    ("as_then_bs", "pairs"),
    ("copy", "parity"),
    ("reverse", "running"),
    ("pairs", "count_p"),
    ("running", "copy_bar"),
]


def program(name):
    return forp_parse(EXTRA[name]) if name in EXTRA else corpus_program(name)


NAMES = list(CORPUS)
