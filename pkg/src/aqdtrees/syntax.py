"""Text surface syntax for formulas.

Grammar (loosest binding first)::

    formula := quant | iff
    quant   := ('E' | 'A') IDENT '.' formula        body extends maximally right
    iff     := imp ('<->' imp)*                     left associative
    imp     := or ('->' imp)?                       right associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | quant | atom | '(' formula ')'
    atom    := term '=' term | 'pi' '(' term ')' '=' term
    term    := IDENT | 'R'

``E``, ``A``, ``R`` and ``pi`` are reserved words.
"""

import re

from .errors import FormulaSyntaxError
from .logic import (ROOT, And, Eq, Exists, Forall, Iff, Implies, Not, Or, ParentOf, RootConst,
                    Var, _Quant)

_TOKEN = re.compile(r"\s*(?:(<->|->|[!&|().=])|([A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        out.append((m.group(1) or m.group(2), m.start(m.lastindex)))
        pos = m.end()
    out.append((None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def formula(self):
        if self.peek() in ("E", "A"):
            return self.quant()
        return self.iff()

    def quant(self):
        kind = self.take()
        tok, pos = self.toks[self.i]
        if tok is None or not (tok[0].isalpha() or tok[0] == "_") or tok in ("E", "A", "R", "pi"):
            raise FormulaSyntaxError(f"expected a variable after {kind!r}", pos)
        self.take()
        self.take(".")
        body = self.formula()
        return (Exists if kind == "E" else Forall)(tok, body)

    def iff(self):
        left = self.imp()
        while self.peek() == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.imp_rhs())
        return left

    def imp_rhs(self):
        if self.peek() in ("E", "A"):
            return self.quant()
        return self.imp()

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.rhs(self.conj))
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.rhs(self.unary))
        return left

    def rhs(self, fallback):
        # A quantifier on the right of a connective swallows the rest.
        if self.peek() in ("E", "A"):
            return self.quant()
        return fallback()

    def unary(self):
        tok, pos = self.toks[self.i]
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("E", "A"):
            return self.quant()
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def term(self):
        tok, pos = self.toks[self.i]
        if tok == "R":
            self.take()
            return ROOT
        if tok is None or tok in ("E", "A", "pi") or not (tok[0].isalpha() or tok[0] == "_"):
            raise FormulaSyntaxError(f"expected a term, found {tok!r}", pos)
        self.take()
        return Var(tok)

    def atom(self):
        if self.peek() == "pi":
            self.take()
            self.take("(")
            child = self.term()
            self.take(")")
            self.take("=")
            return ParentOf(child, self.term())
        left = self.term()
        self.take("=")
        return Eq(left, self.term())


def parse_formula(text: str):
    p = _Parser(text)
    phi = p.formula()
    tok, pos = p.toks[p.i]
    if tok is not None:
        raise FormulaSyntaxError(f"trailing input {tok!r}", pos)
    return phi


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _term(t):
    return "R" if isinstance(t, RootConst) else t.name


def to_text(phi) -> str:
    """Print ``phi`` so that :func:`parse_formula` reads back the same AST."""
    if isinstance(phi, Eq):
        return f"{_term(phi.left)} = {_term(phi.right)}"
    if isinstance(phi, ParentOf):
        return f"pi({_term(phi.child)}) = {_term(phi.parent)}"
    if isinstance(phi, _Quant):
        q = "E" if isinstance(phi, Exists) else "A"
        return f"{q} {phi.var} . {to_text(phi.body)}"
    if isinstance(phi, Not):
        return "!" + _wrap(phi.body, lambda c: isinstance(c, (_Quant,) + tuple(_PREC)))
    prec = _PREC[type(phi)]
    left = _wrap(phi.left, lambda c: isinstance(c, _Quant) or _PREC.get(type(c), 9) <= prec)
    right = _wrap(phi.right, lambda c: isinstance(c, _Quant) or _PREC.get(type(c), 9) <= prec)
    return f"{left} {_OPS[type(phi)]} {right}"


def _wrap(child, needs):
    text = to_text(child)
    return f"({text})" if needs(child) else text
