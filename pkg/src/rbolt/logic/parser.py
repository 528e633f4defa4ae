"""Recursive-descent parser and printer for the concrete formula syntax.

Grammar (whitespace insignificant)::

    impl   := or ('->' impl)?                      right-associative
    or     := and ('|' and)*
    and    := temp ('&' temp)*
    temp   := unary (('U' | 'R') temp)?            LTLf only, right-assoc
    unary  := '!' unary | 'X' unary | 'WX' unary | 'F' unary | 'G' unary
            | '<' path '>' unary | '[' path ']' unary     (LDLf)
            | primary
    primary:= 'true' | 'false' | 'tt' | 'ff' | IDENT | '(' impl ')'

    path   := seq ('+' seq)*
    seq    := rep (';' rep)*
    rep    := pprim '*'*
    pprim  := unary '?'            test
            | prop                 one step whose label satisfies prop
            | '(' path ')'

Inside LDLf formulas a bare propositional formula ``p`` abbreviates
``<p>tt``.
"""

from __future__ import annotations

import re
from typing import Iterable, List, Optional, Tuple

from .ast import (
    FF,
    RESERVED_DONE,
    TT,
    And,
    Atom,
    Box,
    Diamond,
    Formula,
    Next,
    Not,
    Or,
    PAnd,
    PathExpr,
    PathProp,
    PFalse,
    PNot,
    POr,
    Prop,
    PropFormula,
    PTrue,
    Release,
    Seq,
    Star,
    Test,
    Union_,
    Until,
    always,
    conj,
    disj,
    eventually,
    implies,
    neg,
    weak_next,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = {"true", "false", "tt", "ff", "X", "WX", "F", "G", "U", "R"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op>->|[!&|()<>\[\];+*?])|(?P<word>[A-Za-z_][A-Za-z0-9_]*))"
)


class FormulaError(ValueError):
    """Base class for formula parsing errors."""


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.text = text


class UndeclaredFluentError(FormulaSyntaxError):
    def __init__(self, name: str, position: int, text: str = ""):
        FormulaError.__init__(self, f"undeclared fluent {name!r} at offset {position}")
        self.name = name
        self.position = position
        self.text = text


def tokenize(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise FormulaSyntaxError(f"unexpected character {text[start]!r}", start, text)
        kind = "op" if m.group("op") else "word"
        tok = m.group(kind)
        tokens.append((tok, m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, fluents: Optional[Iterable[str]], ldlf: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.ldlf = ldlf
        self.fluents = None if fluents is None else set(fluents) | {RESERVED_DONE}

    # token helpers

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def offset(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def error(self, message: str):
        tok = self.peek()
        found = "end of input" if tok is None else repr(tok)
        raise FormulaSyntaxError(f"{message}, found {found}", self.offset(), self.text)

    def eat(self, tok: str) -> bool:
        if self.peek() == tok:
            self.i += 1
            return True
        return False

    def expect(self, tok: str):
        if not self.eat(tok):
            self.error(f"expected {tok!r}")

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or not IDENT_RE.match(tok) or tok in KEYWORDS:
            self.error("expected fluent name")
        if self.fluents is not None and tok not in self.fluents:
            raise UndeclaredFluentError(tok, self.offset(), self.text)
        self.i += 1
        return tok

    # entry

    def parse(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", 0, self.text)
        f = self.impl()
        if self.peek() is not None:
            self.error("unexpected token")
        return f

    # formulas

    def impl(self) -> Formula:
        left = self.disjunction()
        if self.eat("->"):
            right = self.impl()
            if self.ldlf:
                return Or(Not(left), right)
            return implies(left, right)
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.eat("|"):
            g = self.conjunction()
            f = Or(f, g) if self.ldlf else disj(f, g)
        return f

    def conjunction(self) -> Formula:
        f = self.temporal()
        while self.eat("&"):
            g = self.temporal()
            f = And(f, g) if self.ldlf else conj(f, g)
        return f

    def temporal(self) -> Formula:
        left = self.unary()
        if not self.ldlf:
            if self.eat("U"):
                return Until(left, self.temporal())
            if self.eat("R"):
                return Release(left, self.temporal())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.i += 1
            f = self.unary()
            return Not(f) if self.ldlf else neg(f)
        if self.ldlf:
            if tok == "<":
                self.i += 1
                path = self.path()
                self.expect(">")
                return Diamond(path, self.unary())
            if tok == "[":
                self.i += 1
                path = self.path()
                self.expect("]")
                return Not(Diamond(path, Not(self.unary())))
        else:
            if tok == "X":
                self.i += 1
                return Next(self.unary())
            if tok == "WX":
                self.i += 1
                return weak_next(self.unary())
            if tok == "F":
                self.i += 1
                return eventually(self.unary())
            if tok == "G":
                self.i += 1
                return always(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.i += 1
            f = self.impl()
            self.expect(")")
            return f
        if self.ldlf:
            if tok == "tt":
                self.i += 1
                return TT()
            if tok == "ff":
                self.i += 1
                return FF()
            if tok in ("true", "false") or (tok is not None and IDENT_RE.match(tok) and tok not in KEYWORDS):
                return Diamond(PathProp(self.prop_primary()), TT())
            self.error("expected formula")
        if tok == "true":
            self.i += 1
            return Prop(PTrue())
        if tok == "false":
            self.i += 1
            return Prop(PFalse())
        return Prop(Atom(self.ident()))

    # propositional formulas (inside path expressions)

    def prop_impl(self) -> PropFormula:
        left = self.prop_or()
        if self.eat("->"):
            return POr(PNot(left), self.prop_impl())
        return left

    def prop_or(self) -> PropFormula:
        p = self.prop_and()
        while self.eat("|"):
            p = POr(p, self.prop_and())
        return p

    def prop_and(self) -> PropFormula:
        p = self.prop_unary()
        while self.eat("&"):
            p = PAnd(p, self.prop_unary())
        return p

    def prop_unary(self) -> PropFormula:
        if self.eat("!"):
            return PNot(self.prop_unary())
        return self.prop_primary()

    def prop_primary(self) -> PropFormula:
        tok = self.peek()
        if tok == "(":
            self.i += 1
            p = self.prop_impl()
            self.expect(")")
            return p
        if tok == "true":
            self.i += 1
            return PTrue()
        if tok == "false":
            self.i += 1
            return PFalse()
        return Atom(self.ident())

    # path expressions

    def path(self) -> PathExpr:
        p = self.path_seq()
        while self.eat("+"):
            p = Union_(p, self.path_seq())
        return p

    def path_seq(self) -> PathExpr:
        p = self.path_rep()
        while self.eat(";"):
            p = Seq(p, self.path_rep())
        return p

    def path_rep(self) -> PathExpr:
        p = self.path_primary()
        while self.eat("*"):
            p = Star(p)
        return p

    def _attempt(self, fn):
        start = self.i
        try:
            return fn()
        except UndeclaredFluentError:
            raise
        except FormulaSyntaxError:
            self.i = start
            return None

    def path_primary(self) -> PathExpr:
        def test():
            f = self.unary()
            self.expect("?")
            return Test(f)

        def step():
            p = self.prop_impl()
            if self.peek() == "?":
                self.error("test operand must be a formula")
            return PathProp(p)

        def group():
            self.expect("(")
            p = self.path()
            self.expect(")")
            return p

        for alternative in (test, step, group):
            result = self._attempt(alternative)
            if result is not None:
                return result
        self.error("expected path expression")


def parse_ltlf(text: str, fluents: Optional[Iterable[str]] = None) -> Formula:
    """Parse an LTLf formula; ``fluents=None`` accepts any fluent name."""
    return _Parser(text, fluents, ldlf=False).parse()


def parse_ldlf(text: str, fluents: Optional[Iterable[str]] = None) -> Formula:
    """Parse an LDLf formula; ``[re]phi`` becomes ``!<re>!phi``."""
    return _Parser(text, fluents, ldlf=True).parse()


def parse(text: str, fluents: Optional[Iterable[str]] = None, logic: str = "ltlf") -> Formula:
    if logic == "ltlf":
        return parse_ltlf(text, fluents)
    if logic == "ldlf":
        return parse_ldlf(text, fluents)
    raise ValueError(f"unknown logic {logic!r}")


# --------------------------------------------------------------------------
# printing


def prop_to_text(p: PropFormula) -> str:
    if isinstance(p, PTrue):
        return "true"
    if isinstance(p, PFalse):
        return "false"
    if isinstance(p, Atom):
        return p.name
    if isinstance(p, PNot):
        return "!" + prop_to_text(p.arg)
    if isinstance(p, PAnd):
        return f"({prop_to_text(p.left)} & {prop_to_text(p.right)})"
    if isinstance(p, POr):
        return f"({prop_to_text(p.left)} | {prop_to_text(p.right)})"
    raise TypeError(p)


def path_to_text(p: PathExpr) -> str:
    if isinstance(p, PathProp):
        return prop_to_text(p.prop)
    if isinstance(p, Test):
        return f"({to_text(p.formula)})?"
    if isinstance(p, Union_):
        return f"({path_to_text(p.left)} + {path_to_text(p.right)})"
    if isinstance(p, Seq):
        return f"({path_to_text(p.left)} ; {path_to_text(p.right)})"
    if isinstance(p, Star):
        return f"({path_to_text(p.arg)})*"
    raise TypeError(p)


def to_text(f: Formula) -> str:
    """Fully parenthesized concrete syntax; parses back to the same tree."""
    if isinstance(f, Prop):
        return prop_to_text(f.prop)
    if isinstance(f, TT):
        return "tt"
    if isinstance(f, FF):
        return "ff"
    if isinstance(f, Not):
        return "!" + to_text(f.arg)
    if isinstance(f, And):
        return f"({to_text(f.left)} & {to_text(f.right)})"
    if isinstance(f, Or):
        return f"({to_text(f.left)} | {to_text(f.right)})"
    if isinstance(f, Next):
        return "X " + to_text(f.arg)
    if isinstance(f, Until):
        return f"({to_text(f.left)} U {to_text(f.right)})"
    if isinstance(f, Release):
        return f"({to_text(f.left)} R {to_text(f.right)})"
    if isinstance(f, Diamond):
        return f"<{path_to_text(f.path)}>{to_text(f.arg)}"
    if isinstance(f, Box):
        return f"[{path_to_text(f.path)}]{to_text(f.arg)}"
    raise TypeError(f)
