"""For-transducers: a small imperative language whose loops range over
input positions.

Concrete syntax::

    input: a b            # optional headers
    output: a b |
    for x in first..last {
      for y in last..first {
        if y =< x and a(y) then output a
        if y =< x and b(y) then output b
      }
      output |
    }

Statements are ``for v in B..B { ... }``, ``if C then S [else S]`` (``S`` a
statement or a braced block), ``output w`` (a symbol, ``_c`` or a quoted
word), ``bool b`` and ``b := true|false``.  Conditions combine ``and``,
``or``, ``not``, parentheses, ``true``/``false``, boolean variables,
label tests ``c(x)`` and comparisons (``<=``, ``=<``, ``<``, ``=``, ``>=``,
``>``) between position variables, ``first`` and ``last``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .core import Alphabet, Word, as_word, quote_word, tokenize
from .errors import ParseError, ValidationError

FIRST, LAST = "first", "last"
KEYWORDS = {"for", "in", "if", "then", "else", "output", "bool", "true", "false", "and", "or", "not", FIRST, LAST}


# ---------------------------------------------------------------------------
# syntax tree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cmp:
    op: str  # "<=", "<" or "="
    a: str  # position variable, "first" or "last"
    b: str


@dataclass(frozen=True)
class Label:
    letter: str
    var: str


@dataclass(frozen=True)
class BoolRef:
    name: str


@dataclass(frozen=True)
class CAnd:
    a: "Cond"
    b: "Cond"


@dataclass(frozen=True)
class COr:
    a: "Cond"
    b: "Cond"


@dataclass(frozen=True)
class CNot:
    a: "Cond"


@dataclass(frozen=True)
class CConst:
    value: bool


Cond = Union[Cmp, Label, BoolRef, CAnd, COr, CNot, CConst]


@dataclass(frozen=True)
class For:
    var: str
    lo: str
    hi: str
    body: tuple


@dataclass(frozen=True)
class If:
    cond: Cond
    then: tuple
    els: tuple = ()


@dataclass(frozen=True)
class Output:
    word: Word


@dataclass(frozen=True)
class BoolDecl:
    name: str


@dataclass(frozen=True)
class BoolSet:
    name: str
    value: bool


Stmt = Union[For, If, Output, BoolDecl, BoolSet]


@dataclass(frozen=True, eq=False)
class ForProgram:
    body: tuple
    input_alphabet: Alphabet | None = None
    output_alphabet: Alphabet | None = None
    _compiled: list = field(default_factory=list, repr=False, compare=False)

    def eval(self, word: Sequence[str] | str) -> Word:
        return forp_eval(self, word)

    __call__ = eval

    def is_first_order(self) -> bool:
        return forp_is_first_order(self)


def conj(*cs: Cond) -> Cond:
    out: Cond | None = None
    for c in cs:
        if isinstance(c, CConst):
            if not c.value:
                return CConst(False)
            continue
        out = c if out is None else CAnd(out, c)
    return CConst(True) if out is None else out


def disj(*cs: Cond) -> Cond:
    out: Cond | None = None
    for c in cs:
        if isinstance(c, CConst):
            if c.value:
                return CConst(True)
            continue
        out = c if out is None else COr(out, c)
    return CConst(False) if out is None else out


def neg(c: Cond) -> Cond:
    if isinstance(c, CConst):
        return CConst(not c.value)
    if isinstance(c, CNot):
        return c.a
    return CNot(c)


def cond_vars(c: Cond) -> set[str]:
    if isinstance(c, Cmp):
        return {x for x in (c.a, c.b) if x not in (FIRST, LAST)}
    if isinstance(c, Label):
        return {c.var}
    if isinstance(c, (CAnd, COr)):
        return cond_vars(c.a) | cond_vars(c.b)
    if isinstance(c, CNot):
        return cond_vars(c.a)
    return set()


def cond_bools(c: Cond) -> set[str]:
    if isinstance(c, BoolRef):
        return {c.name}
    if isinstance(c, (CAnd, COr)):
        return cond_bools(c.a) | cond_bools(c.b)
    if isinstance(c, CNot):
        return cond_bools(c.a)
    return set()


def map_cond(c: Cond, f) -> Cond:
    """Rebuild a condition bottom-up, letting ``f`` replace atoms."""
    if isinstance(c, CAnd):
        return CAnd(map_cond(c.a, f), map_cond(c.b, f))
    if isinstance(c, COr):
        return COr(map_cond(c.a, f), map_cond(c.b, f))
    if isinstance(c, CNot):
        return CNot(map_cond(c.a, f))
    return f(c)


def has_loop(stmts: Iterable[Stmt]) -> bool:
    for s in stmts:
        if isinstance(s, For):
            return True
        if isinstance(s, If) and (has_loop(s.then) or has_loop(s.els)):
            return True
    return False


def walk(stmts: Iterable[Stmt]):
    for s in stmts:
        yield s
        if isinstance(s, For):
            yield from walk(s.body)
        elif isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.els)


def loop_depth(stmts: Iterable[Stmt]) -> int:
    best = 0
    for s in stmts:
        if isinstance(s, For):
            best = max(best, 1 + loop_depth(s.body))
        elif isinstance(s, If):
            best = max(best, loop_depth(s.then), loop_depth(s.els))
    return best


# ---------------------------------------------------------------------------
# lexer and parser
# ---------------------------------------------------------------------------

_PUNCT = ("..", ":=", "<=", "=<", ">=", "{", "}", "(", ")", "<", ">", "=", ",", ";")
_WORD_STOP = set(' \t\r\n{}()<>=,;"')


@dataclass(frozen=True)
class Token:
    kind: str  # "word", "punct", "string", "eof"
    text: str
    line: int
    col: int


def _lex(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)

    def adv(k):
        nonlocal i, line, col
        for ch in text[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            adv(1)
            continue
        if ch == "#" and text[:i].rsplit("\n", 1)[-1].strip() == "":
            # whole-line comment
            j = text.find("\n", i)
            adv((n if j < 0 else j) - i)
            continue
        if ch == '"':
            m = re.compile(r'"((?:[^"\\]|\\.)*)"').match(text, i)
            if not m:
                raise ParseError("unterminated string", line, col)
            toks.append(Token("string", re.sub(r"\\(.)", r"\1", m.group(1)), line, col))
            adv(m.end() - i)
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                adv(len(p))
                break
        else:
            j = i
            while j < n and text[j] not in _WORD_STOP and not text.startswith("..", j):
                j += 1
            if j == i:
                raise ParseError(f"unexpected character {ch!r}", line, col)
            toks.append(Token("word", text[i:j], line, col))
            adv(j - i)
    toks.append(Token("eof", "", line, col))
    return toks


_HEADER = re.compile(r"^\s*(input|output)\s*:\s*(.*)$")


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.pos_scope: list[set[str]] = [set()]
        self.bool_scope: list[set[str]] = [set()]

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text or t.kind == "string":
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind != "string" and t.text == text

    # scopes
    def positions(self) -> set[str]:
        return set().union(*self.pos_scope)

    def bools(self) -> set[str]:
        return set().union(*self.bool_scope)

    def program(self) -> tuple:
        body = self.block_until("eof")
        return body

    def block_until(self, end: str) -> tuple:
        stmts = []
        while not (self.peek().kind == "eof" if end == "eof" else self.at(end)):
            if self.peek().kind == "eof":
                self.error("unexpected end of input; missing '}'")
            if self.at(";"):
                self.next()
                continue
            stmts.extend(self.statement())
        return tuple(stmts)

    def braced(self) -> tuple:
        self.expect("{")
        self.pos_scope.append(set())
        self.bool_scope.append(set())
        body = self.block_until("}")
        self.expect("}")
        self.pos_scope.pop()
        self.bool_scope.pop()
        return body

    def branch(self) -> tuple:
        if self.at("{"):
            return self.braced()
        # a single statement is its own scope
        self.pos_scope.append(set())
        self.bool_scope.append(set())
        body = tuple(self.statement())
        self.pos_scope.pop()
        self.bool_scope.pop()
        return body

    def name(self, what: str) -> Token:
        t = self.next()
        if t.kind != "word" or t.text in KEYWORDS or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", t.text):
            self.error(f"expected a {what} name, found {t.text!r}", t)
        return t

    def bound(self) -> str:
        t = self.next()
        if t.kind == "word" and t.text in (FIRST, LAST):
            return t.text
        if t.kind == "word" and t.text in self.positions():
            return t.text
        if t.kind == "word":
            self.error(f"unbound position variable {t.text!r}", t)
        self.error(f"expected a loop bound, found {t.text!r}", t)

    def statement(self) -> list:
        t = self.peek()
        if t.kind != "word":
            self.error(f"expected a statement, found {t.text!r}")
        if t.text == "for":
            self.next()
            v = self.name("position variable")
            if v.text in self.positions() or v.text in self.bools():
                self.error(f"variable {v.text!r} is already bound", v)
            self.expect("in")
            lo = self.bound()
            self.expect("..")
            hi = self.bound()
            self.pos_scope.append({v.text})
            self.bool_scope.append(set())
            if self.at("{"):
                self.expect("{")
                body = self.block_until("}")
                self.expect("}")
            else:
                body = tuple(self.statement())
            self.pos_scope.pop()
            self.bool_scope.pop()
            return [For(v.text, lo, hi, body)]
        if t.text == "if":
            self.next()
            c = self.condition()
            if self.at("then"):
                self.next()
            then = self.branch()
            els: tuple = ()
            if self.at("else"):
                self.next()
                els = self.branch()
            return [If(c, then, els)]
        if t.text == "output":
            self.next()
            w = self.next()
            if w.kind == "string":
                return [Output(tokenize(w.text))]
            if w.kind != "word" and w.text not in ("<", ">", "=", ","):
                self.error(f"expected an output symbol, found {w.text!r}", w)
            return [Output(tokenize(w.text) if w.text.startswith("_") else (w.text,))]
        if t.text == "bool":
            self.next()
            out = []
            while True:
                v = self.name("boolean variable")
                if v.text in self.bools() or v.text in self.positions():
                    self.error(f"variable {v.text!r} is already declared", v)
                self.bool_scope[-1].add(v.text)
                out.append(BoolDecl(v.text))
                if not self.at(","):
                    break
                self.next()
            return out
        if self.peek(1).text == ":=":
            v = self.next()
            if v.text not in self.bools():
                self.error(f"assignment to undeclared boolean {v.text!r}", v)
            self.expect(":=")
            val = self.next()
            if val.text not in ("true", "false"):
                self.error("booleans can only be assigned true or false", val)
            return [BoolSet(v.text, val.text == "true")]
        self.error(f"unknown statement starting with {t.text!r}")

    # conditions
    def condition(self) -> Cond:
        c = self.conjunction()
        while self.at("or"):
            self.next()
            c = COr(c, self.conjunction())
        return c

    def conjunction(self) -> Cond:
        c = self.unary()
        while self.at("and"):
            self.next()
            c = CAnd(c, self.unary())
        return c

    def unary(self) -> Cond:
        if self.at("not"):
            self.next()
            return CNot(self.unary())
        if self.at("("):
            self.next()
            c = self.condition()
            self.expect(")")
            return c
        t = self.next()
        if t.kind != "word":
            self.error(f"expected a condition, found {t.text!r}", t)
        if t.text in ("true", "false"):
            return CConst(t.text == "true")
        if self.at("(") and t.text not in self.positions() and t.text not in (FIRST, LAST):
            self.next()
            v = self.next()
            if v.text not in self.positions():
                self.error(f"unbound position variable {v.text!r}", v)
            self.expect(")")
            return Label(t.text, v.text)
        if t.text in self.bools() and not self._cmp_ahead():
            return BoolRef(t.text)
        a = self._term(t)
        op_tok = self.next()
        op = op_tok.text
        if op not in ("<=", "=<", "<", "=", ">=", ">"):
            self.error(f"expected a comparison, found {op!r}", op_tok)
        b = self._term(self.next())
        if a in (FIRST, LAST) and b in (FIRST, LAST):
            self.error("a comparison must mention a position variable", t)
        if op == "=<":
            op = "<="
        if op == ">=":
            return Cmp("<=", b, a)
        if op == ">":
            return Cmp("<", b, a)
        return Cmp(op, a, b)

    def _cmp_ahead(self) -> bool:
        return self.peek().text in ("<=", "=<", "<", "=", ">=", ">")

    def _term(self, t: Token) -> str:
        if t.kind == "word" and (t.text in (FIRST, LAST) or t.text in self.positions()):
            return t.text
        if t.kind == "word" and t.text in self.bools():
            self.error(f"boolean {t.text!r} used as a position", t)
        self.error(f"unbound position variable {t.text!r}", t)


def forp_parse(text: str, input_alphabet: Iterable[str] | None = None, output_alphabet: Iterable[str] | None = None) -> ForProgram:
    headers: dict[str, list[str]] = {}
    lines = text.splitlines()
    body_lines = []
    in_header = True
    for line in lines:
        m = _HEADER.match(line)
        if line.strip() and not line.lstrip().startswith("#") and not m:
            in_header = False
        if m and in_header:
            headers[m.group(1)] = m.group(2).split()
            body_lines.append("")
            continue
        body_lines.append(line)
    body = _Parser("\n".join(body_lines)).program()
    inp = input_alphabet if input_alphabet is not None else headers.get("input")
    out = output_alphabet if output_alphabet is not None else headers.get("output")
    return with_alphabets(ForProgram(body), inp, out)


def with_alphabets(p: ForProgram, inp=None, out=None) -> ForProgram:
    """Fill in missing alphabets from the letters the program mentions."""
    labels = dict.fromkeys(s.letter for s in _all_conds(p.body) if isinstance(s, Label))
    outs: dict[str, None] = {}
    for s in walk(p.body):
        if isinstance(s, Output):
            outs.update(dict.fromkeys(s.word))
    if inp is None:
        inp = p.input_alphabet if p.input_alphabet is not None else (Alphabet(tuple(labels)) if labels else None)
    if out is None:
        out = p.output_alphabet if p.output_alphabet is not None else (Alphabet(tuple(outs)) if outs else None)
    inp = None if inp is None else (inp if isinstance(inp, Alphabet) else Alphabet(tuple(inp)))
    out = None if out is None else (out if isinstance(out, Alphabet) else Alphabet(tuple(out)))
    if out is not None:
        missing = [a for a in outs if a not in out]
        if missing:
            raise ValidationError(f"output letters {missing} not in output alphabet")
    return ForProgram(p.body, inp, out)


def _all_conds(stmts):
    for s in walk(stmts):
        if isinstance(s, If):
            yield from _atoms(s.cond)


def _atoms(c):
    if isinstance(c, (CAnd, COr)):
        yield from _atoms(c.a)
        yield from _atoms(c.b)
    elif isinstance(c, CNot):
        yield from _atoms(c.a)
    else:
        yield c


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def format_cond(c: Cond, top: bool = True) -> str:
    if isinstance(c, Cmp):
        return f"{c.a} {c.op} {c.b}"
    if isinstance(c, Label):
        return f"{c.letter}({c.var})"
    if isinstance(c, BoolRef):
        return c.name
    if isinstance(c, CConst):
        return "true" if c.value else "false"
    if isinstance(c, CNot):
        return f"not {format_cond(c.a, False)}"
    op = "and" if isinstance(c, CAnd) else "or"
    s = f"{format_cond(c.a, False)} {op} {format_cond(c.b, False)}"
    return s if top else f"({s})"


def _format_word(w: Word) -> str:
    if len(w) == 1 and re.fullmatch(r"_?[^\s{}()<>=,;\"#.]+", w[0]) and w[0] not in KEYWORDS:
        return w[0]
    return quote_word(w)


def format_stmts(stmts: Iterable[Stmt], indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    for s in stmts:
        if isinstance(s, For):
            lines.append(f"{pad}for {s.var} in {s.lo}..{s.hi} {{")
            lines.extend(format_stmts(s.body, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(s, If):
            lines.append(f"{pad}if {format_cond(s.cond)} then {{")
            lines.extend(format_stmts(s.then, indent + 1))
            if s.els:
                lines.append(f"{pad}}} else {{")
                lines.extend(format_stmts(s.els, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(s, Output):
            lines.append(f"{pad}output {_format_word(s.word)}")
        elif isinstance(s, BoolDecl):
            lines.append(f"{pad}bool {s.name}")
        elif isinstance(s, BoolSet):
            lines.append(f"{pad}{s.name} := {'true' if s.value else 'false'}")
    return lines


def format_program(p: ForProgram) -> str:
    lines = []
    if p.input_alphabet is not None:
        lines.append(f"input: {' '.join(p.input_alphabet)}")
    if p.output_alphabet is not None:
        lines.append(f"output: {' '.join(p.output_alphabet)}")
    lines.extend(format_stmts(p.body))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reference interpreter (with boolean change tracing)
# ---------------------------------------------------------------------------


class _Cell:
    __slots__ = ("value", "changes")

    def __init__(self):
        self.value = False
        self.changes = 0


def _span(lo: int, hi: int):
    return range(lo, hi + 1) if lo <= hi else range(lo, hi - 1, -1)


def _resolve(term: str, env: dict, n: int) -> int:
    if term == FIRST:
        return 0
    if term == LAST:
        return n - 1
    return env[term]


def _eval_cond(c: Cond, env, bools, word, n) -> bool:
    if isinstance(c, Cmp):
        x, y = _resolve(c.a, env, n), _resolve(c.b, env, n)
        return x <= y if c.op == "<=" else x < y if c.op == "<" else x == y
    if isinstance(c, Label):
        return word[env[c.var]] == c.letter
    if isinstance(c, BoolRef):
        return bools[c.name].value
    if isinstance(c, CAnd):
        return _eval_cond(c.a, env, bools, word, n) and _eval_cond(c.b, env, bools, word, n)
    if isinstance(c, COr):
        return _eval_cond(c.a, env, bools, word, n) or _eval_cond(c.b, env, bools, word, n)
    if isinstance(c, CNot):
        return not _eval_cond(c.a, env, bools, word, n)
    return c.value


def _exec(stmts, env, bools, word, n, out, cells):
    saved = dict(bools)
    for s in stmts:
        if isinstance(s, Output):
            out.extend(s.word)
        elif isinstance(s, If):
            branch = s.then if _eval_cond(s.cond, env, bools, word, n) else s.els
            _exec(branch, env, bools, word, n, out, cells)
        elif isinstance(s, For):
            if n == 0:
                continue
            for pos in _span(_resolve(s.lo, env, n), _resolve(s.hi, env, n)):
                env[s.var] = pos
                _exec(s.body, env, bools, word, n, out, cells)
            env.pop(s.var, None)
        elif isinstance(s, BoolDecl):
            cell = _Cell()
            cells.append(cell)
            bools[s.name] = cell
        elif isinstance(s, BoolSet):
            cell = bools[s.name]
            if cell.value != s.value:
                cell.changes += 1
                cell.value = s.value
    bools.clear()
    bools.update(saved)


@dataclass(frozen=True)
class Trace:
    output: Word
    instances: int  # boolean variable instances created
    max_changes: int  # most value changes of any single instance


def forp_trace(p: ForProgram, word: Sequence[str] | str) -> Trace:
    word = _input_word(p, word)
    out: list[str] = []
    cells: list[_Cell] = []
    _exec(p.body, {}, {}, word, len(word), out, cells)
    return Trace(tuple(out), len(cells), max((c.changes for c in cells), default=0))


def forp_eval_reference(p: ForProgram, word: Sequence[str] | str) -> Word:
    return forp_trace(p, word).output


def _input_word(p: ForProgram, word) -> Word:
    if p.input_alphabet is not None:
        return as_word(word, p.input_alphabet)
    return tokenize(word) if isinstance(word, str) else tuple(word)


# ---------------------------------------------------------------------------
# compiled evaluation: the program becomes a Python function
# ---------------------------------------------------------------------------


def _py_term(t: str) -> str:
    return "0" if t == FIRST else "_n1" if t == LAST else f"v_{t}"


def _py_cond(c: Cond) -> str:
    if isinstance(c, Cmp):
        op = "==" if c.op == "=" else c.op
        return f"({_py_term(c.a)} {op} {_py_term(c.b)})"
    if isinstance(c, Label):
        return f"(_w[v_{c.var}] == {c.letter!r})"
    if isinstance(c, BoolRef):
        return f"b_{c.name}"
    if isinstance(c, CAnd):
        return f"({_py_cond(c.a)} and {_py_cond(c.b)})"
    if isinstance(c, COr):
        return f"({_py_cond(c.a)} or {_py_cond(c.b)})"
    if isinstance(c, CNot):
        return f"(not {_py_cond(c.a)})"
    return "True" if c.value else "False"


def _py_block(stmts, indent: int, lines: list[str]) -> None:
    pad = "    " * indent
    start = len(lines)
    for s in stmts:
        if isinstance(s, Output):
            if len(s.word) == 1:
                lines.append(f"{pad}_emit({s.word[0]!r})")
            elif s.word:
                lines.append(f"{pad}_extend({tuple(s.word)!r})")
        elif isinstance(s, If):
            lines.append(f"{pad}if {_py_cond(s.cond)}:")
            _py_block(s.then, indent + 1, lines)
            if s.els:
                lines.append(f"{pad}else:")
                _py_block(s.els, indent + 1, lines)
        elif isinstance(s, For):
            if (s.lo, s.hi) == (FIRST, LAST):
                rng = "range(_n)"
            elif (s.lo, s.hi) == (LAST, FIRST):
                rng = "range(_n1, -1, -1)"
            else:
                rng = f"_span({_py_term(s.lo)}, {_py_term(s.hi)})"
            lines.append(f"{pad}for v_{s.var} in {rng}:")
            _py_block(s.body, indent + 1, lines)
        elif isinstance(s, BoolDecl):
            lines.append(f"{pad}b_{s.name} = False")
        elif isinstance(s, BoolSet):
            lines.append(f"{pad}b_{s.name} = {s.value}")
    if len(lines) == start:
        lines.append(f"{pad}pass")


def compile_program(p: ForProgram):
    if p._compiled:
        return p._compiled[0]
    lines = ["def _run(_w):", "    _n = len(_w)", "    _n1 = _n - 1", "    _out = []", "    _emit = _out.append", "    _extend = _out.extend"]
    body: list[str] = []
    _py_block(p.body, 1, body)
    lines.extend(body)
    lines.append("    return tuple(_out)")
    namespace: dict = {"_span": _span}
    exec(compile("\n".join(lines), "<for-program>", "exec"), namespace)
    fn = namespace["_run"]
    p._compiled.append(fn)
    return fn


def forp_eval(p, word: Sequence[str] | str) -> Word:
    from .forcompile import PrenexProgram

    if isinstance(p, PrenexProgram):
        return p.eval(word)
    return compile_program(p)(_input_word(p, word))


def forp_is_first_order(p) -> bool:
    from .forcompile import PrenexProgram

    body = p.kernel if isinstance(p, PrenexProgram) else p.body
    return not any(isinstance(s, BoolSet) and not s.value for s in walk(body))


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

RUNNING_EXAMPLE = """\
input: a b
output: a b |
for x in first..last {
  for y in last..first {
    if y =< x and a(y) then output a
    if y =< x and b(y) then output b
  }
  output |
}
"""

# The listing as printed tests x instead of y; it parses but computes a
# different function (each letter repeated), kept for comparison.
RUNNING_EXAMPLE_AS_PRINTED = """\
input: a b
output: a b |
for x in first..last
  for y in last..first {
    if x =< y and a(x) then output a
    if x =< y and b(x) then output b
  }
  output |
"""

BLOCK_REVERSE = """\
input: a b |
output: a b |
for x in first..last {
  if |(x) or x = last {
    bool stop
    for y in x..first {
      if |(y) and y < x then stop := true
      if not stop and a(y) then output a
      if not stop and b(y) then output b
    }
    if |(x) then output |
  }
}
"""

CORPUS: dict[str, str] = {
    "running": RUNNING_EXAMPLE,
    "running_as_printed": RUNNING_EXAMPLE_AS_PRINTED,
    "copy": """\
input: a b
output: a b
for x in first..last {
  if a(x) then output a
  if b(x) then output b
}
""",
    "reverse": """\
input: a b
output: a b
for x in last..first {
  if a(x) then output a else output b
}
""",
    "square": """\
input: a b
output: a b _a _b
for x in first..last {
  for y in first..last {
    if x = y then {
      if a(y) then output _a else output _b
    } else {
      if a(y) then output a else output b
    }
  }
}
""",
    "block_reverse": BLOCK_REVERSE,
    "as_then_bs": """\
input: a b
output: a b
for x in first..last { output a }
for y in first..last { output b }
""",
    "after_first_b": """\
input: a b
output: a b
bool seen
for x in first..last {
  if seen then { if a(x) then output a else output b }
  if b(x) then seen := true
}
""",
    "parity": """\
input: a b
output: a b #
bool odd
for x in first..last {
  if odd then odd := false else odd := true
}
if odd then output #
""",
    "brackets": """\
input: a b
output: [ ] a b
output [
for x in first..last {
  if a(x) then output a
}
output ]
""",
    "pairs": """\
input: a b
output: p
for x in first..last {
  for y in x..last {
    if x < y and a(x) and b(y) then output p
  }
}
""",
    "branch_loops": """\
input: a b
output: a b n
bool hasa
for x in first..last { if a(x) then hasa := true }
if hasa then {
  for y in last..first { if b(y) then output b }
} else {
  output n
}
""",
    "between": """\
input: a b
output: c |
for x in first..last {
  for y in last..first {
    for z in x..y {
      if a(z) then output c
    }
    output |
  }
}
""",
}


def corpus_program(name: str) -> ForProgram:
    return forp_parse(CORPUS[name])
