"""A small statement language for per-prime claims about F_p and GL2(F_p).

Grammar (whitespace-insensitive)::

    stmt    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | "(" stmt ")" | atom
    atom    := "cong(" expr "," int "," int ")"
             | "v" ELL "(" expr ")" cmp int
             | "sylow" ELL "(GL2)" "==" int
             | "volvachev(" ("V1" | "V2" | "V3") ")"
             | "unextendable(p=" int ", k=" int ")"
             | "allconj(p=" int ", k=" int ")"
    expr    := term (("+" | "-") term)*
    term    := factor ("*" factor)*
    factor  := base ("^" factor)?
    base    := "p" | "|GL2|" | int | "(" expr ")"
    cmp     := ">=" | "<=" | "==" | "!=" | ">" | "<"

Printing is canonical: binary connectives are fully parenthesized, with
single spaces, so ``parse(to_text(s)) == s``.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Union

from ._arith import is_prime, valuation
from . import volvachev as vv
from .errors import DomainError
from .harness import Property
from .matrix_group import DEFAULT_ENUMERATION_BOUND, enumerate_group, gl2_order
from .sylow import DEFAULT_SUBGROUP_BUDGET, sentence_all_conjugate, sentence_unextendable, sylow_order


class ParseError(DomainError):
    def __init__(self, message: str, position: int, expected=()):
        self.position = position
        self.expected = tuple(sorted(expected))
        if len(self.expected) == 1:
            exp = f"; expected {self.expected[0]}"
        elif self.expected:
            exp = f"; expected one of {', '.join(self.expected)}"
        else:
            exp = ""
        super().__init__(f"{message} at position {position}{exp}")


# -- AST ----------------------------------------------------------------------

class _StatementNode:
    def as_property(self, budget=None):
        return as_property(self, budget or Budget())


@dataclass(frozen=True)
class Var:
    def __str__(self):
        return "p"


@dataclass(frozen=True)
class GL2Order:
    def __str__(self):
        return "|GL2|"


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return f"{_sub(self.left)} {self.op} {_sub(self.right)}"


Expr = Union[Var, GL2Order, Int, BinOp]


def _sub(e) -> str:
    return f"({e})" if isinstance(e, BinOp) else str(e)


@dataclass(frozen=True)
class Congruence(_StatementNode):
    expr: Expr
    residue: int
    modulus: int

    def __str__(self):
        return f"cong({self.expr}, {self.residue}, {self.modulus})"


@dataclass(frozen=True)
class ValuationCmp(_StatementNode):
    expr: Expr
    base: int
    cmp: str
    bound: int

    def __str__(self):
        return f"v{self.base}({self.expr}) {self.cmp} {self.bound}"


@dataclass(frozen=True)
class SylowOrderEq(_StatementNode):
    ell: int
    value: int
    group: str = "GL2"

    def __str__(self):
        return f"sylow{self.ell}({self.group}) == {self.value}"


@dataclass(frozen=True)
class Volvachev(_StatementNode):
    condition: str

    def __str__(self):
        return f"volvachev({self.condition})"


@dataclass(frozen=True)
class Unextendable(_StatementNode):
    ell: int
    k: int

    def __str__(self):
        return f"unextendable(p={self.ell}, k={self.k})"


@dataclass(frozen=True)
class AllConjugate(_StatementNode):
    ell: int
    k: int

    def __str__(self):
        return f"allconj(p={self.ell}, k={self.k})"


@dataclass(frozen=True)
class And(_StatementNode):
    left: "Statement"
    right: "Statement"

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(_StatementNode):
    left: "Statement"
    right: "Statement"

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Not(_StatementNode):
    operand: "Statement"

    def __str__(self):
        return f"!{self.operand}"


Statement = Union[Congruence, ValuationCmp, SylowOrderEq, Volvachev, Unextendable, AllConjugate, And, Or, Not]
LEAVES = (Congruence, ValuationCmp, SylowOrderEq, Volvachev, Unextendable, AllConjugate)


def to_text(stmt) -> str:
    """Canonical text of a statement or expression."""
    return str(stmt)


# -- lexer --------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<gl2ord>\|\s*GL2\s*\|)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>>=|<=|==|!=|[()&|!,+\-*^<>=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            out.append(Token(kind if kind != "op" else tok, tok, pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# -- parser -------------------------------------------------------------------

_CMPS = {">=", "<=", "==", "!=", ">", "<"}
_FUNCS = ("cong", "v<n>", "sylow<n>", "volvachev", "unextendable", "allconj")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, *kinds: str) -> Token:
        if self.tok.kind not in kinds:
            what = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ParseError(f"unexpected {what}", self.tok.pos, kinds)
        return self.advance()

    def parse(self):
        s = self.stmt()
        self.expect("end")
        return s

    def stmt(self):
        left = self.conj()
        while self.tok.kind == "|":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.tok.kind == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.tok.kind == "!":
            self.advance()
            return Not(self.unary())
        if self.tok.kind == "(":
            self.advance()
            s = self.stmt()
            self.expect(")")
            return s
        if self.tok.kind != "ident":
            self.expect("ident", "!", "(")
        return self.atom()

    def integer(self) -> int:
        sign = 1
        if self.tok.kind == "-":
            self.advance()
            sign = -1
        return sign * int(self.expect("int").text)

    def _args(self, first=None) -> list:
        """Comma separated list up to ')'; ``first`` parses the first argument."""
        args = []
        if self.tok.kind != ")":
            args.append(first() if first else self.integer())
            while self.tok.kind == ",":
                self.advance()
                args.append(self.integer())
        self.expect(")", ",")
        return args

    def _prime(self, n: int, what: str, pos: int) -> int:
        if not is_prime(n):
            raise ParseError(f"{what} must be prime, got {n}", pos)
        return n

    def _arity(self, name, args, n, pos):
        if len(args) != n:
            raise ParseError(f"{name} expects {n} arguments, got {len(args)}", pos)

    def atom(self):
        t = self.expect("ident")
        name, pos = t.text, t.pos
        if name == "cong":
            self.expect("(")
            args = self._args(self.expr)
            self._arity("cong", args, 3, pos)
            if args[2] < 1:
                raise ParseError("cong modulus must be positive", pos)
            return Congruence(args[0], args[1], args[2])
        m = re.fullmatch(r"v(\d+)", name)
        if m:
            self.expect("(")
            e = self.expr()
            self.expect(")")
            cmp = self.expect(*sorted(_CMPS)).text
            return ValuationCmp(e, self._prime(int(m.group(1)), "valuation base", pos), cmp, self.integer())
        m = re.fullmatch(r"sylow(\d+)", name)
        if m:
            self.expect("(")
            g = self.expect("ident")
            if g.text != "GL2":
                raise ParseError(f"unknown group {g.text!r}", g.pos, {"GL2"})
            self.expect(")")
            self.expect("==")
            return SylowOrderEq(self._prime(int(m.group(1)), "Sylow prime", pos), self.integer())
        if name == "volvachev":
            self.expect("(")
            c = self.expect("ident")
            if c.text not in ("V1", "V2", "V3"):
                raise ParseError(f"unknown condition {c.text!r}", c.pos, {"V1", "V2", "V3"})
            self.expect(")")
            return Volvachev(c.text)
        if name in ("unextendable", "allconj"):
            self.expect("(")
            kw = {}
            while True:
                k = self.expect("ident")
                if k.text not in ("p", "k") or k.text in kw:
                    raise ParseError(f"unexpected keyword {k.text!r}", k.pos, {"p", "k"} - set(kw))
                self.expect("=")
                vpos = self.tok.pos
                kw[k.text] = self.integer()
                if k.text == "p":
                    self._prime(kw["p"], "p", vpos)
                elif kw["k"] < 0:
                    raise ParseError("k must be non-negative", vpos)
                if self.tok.kind != ",":
                    break
                self.advance()
            self.expect(")", ",")
            if set(kw) != {"p", "k"}:
                raise ParseError(f"{name} expects arguments p= and k=", pos)
            cls = Unextendable if name == "unextendable" else AllConjugate
            return cls(kw["p"], kw["k"])
        raise ParseError(f"unknown identifier {name!r}", pos, _FUNCS)

    def expr(self):
        left = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.factor()
        while self.tok.kind == "*":
            self.advance()
            left = BinOp("*", left, self.factor())
        return left

    def factor(self):
        base = self.base()
        if self.tok.kind == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def base(self):
        t = self.tok
        if t.kind in ("int", "-"):
            return Int(self.integer())
        if t.kind == "gl2ord":
            self.advance()
            return GL2Order()
        if t.kind == "ident":
            if t.text != "p":
                raise ParseError(f"unknown identifier {t.text!r}", t.pos, {"p", "|GL2|"})
            self.advance()
            return Var()
        if t.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.expect("int", "-", "ident", "gl2ord", "(")


def parse(text: str) -> Statement:
    return _Parser(text).parse()


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    p.expect("end")
    return e


# -- evaluation ---------------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    enumeration_bound: int = DEFAULT_ENUMERATION_BOUND
    subgroup_budget: int = DEFAULT_SUBGROUP_BUDGET


MAX_VALUE_BITS = 1 << 16

_OPS = {"+": operator.add, "-": operator.sub, "*": operator.mul, "^": operator.pow}
_CMP_FN = {
    ">=": operator.ge, "<=": operator.le, "==": operator.eq,
    "!=": operator.ne, ">": operator.gt, "<": operator.lt,
}


def eval_expr(e: Expr, p: int) -> int:
    if isinstance(e, Var):
        return p
    if isinstance(e, GL2Order):
        return gl2_order(p)
    if isinstance(e, Int):
        return e.value
    if e.op == "^":
        base, exp = eval_expr(e.left, p), eval_expr(e.right, p)
        if exp < 0:
            raise DomainError("negative exponent")
        if abs(base) > 1 and exp * abs(base).bit_length() > MAX_VALUE_BITS:
            raise DomainError(f"value of {e} exceeds {MAX_VALUE_BITS} bits")
        return base ** exp
    v = _OPS[e.op](eval_expr(e.left, p), eval_expr(e.right, p))
    if v.bit_length() > MAX_VALUE_BITS:
        raise DomainError(f"value of {e} exceeds {MAX_VALUE_BITS} bits")
    return v


def evaluate(stmt: Statement, p: int, budget: Budget = Budget()) -> bool:
    """Truth value of ``stmt`` at the prime p.

    Enumeration-backed leaves raise BudgetExceeded rather than returning False.
    """
    if isinstance(stmt, And):
        return evaluate(stmt.left, p, budget) and evaluate(stmt.right, p, budget)
    if isinstance(stmt, Or):
        return evaluate(stmt.left, p, budget) or evaluate(stmt.right, p, budget)
    if isinstance(stmt, Not):
        return not evaluate(stmt.operand, p, budget)
    if isinstance(stmt, Congruence):
        return eval_expr(stmt.expr, p) % stmt.modulus == stmt.residue % stmt.modulus
    if isinstance(stmt, ValuationCmp):
        n = eval_expr(stmt.expr, p)
        if n < 1:
            raise DomainError(f"v{stmt.base} of non-positive value {n}")
        return _CMP_FN[stmt.cmp](valuation(n, stmt.base), stmt.bound)
    if isinstance(stmt, SylowOrderEq):
        return sylow_order(gl2_order(p), stmt.ell) == stmt.value
    if isinstance(stmt, Volvachev):
        if stmt.condition == "V1":
            return vv.check_v1(p) is not None
        if stmt.condition == "V2":
            return vv.check_v2(p)
        return vv.check_v3_finite(p)[0]
    if isinstance(stmt, (Unextendable, AllConjugate)):
        G = enumerate_group(p, budget.enumeration_bound)
        fn = sentence_unextendable if isinstance(stmt, Unextendable) else sentence_all_conjugate
        return fn(G, stmt.ell, stmt.k, budget.subgroup_budget)
    raise TypeError(f"not a statement: {stmt!r}")


def as_property(stmt: Statement, budget: Budget = Budget()) -> Property:
    """Wrap a statement for :func:`sylowlab.harness.evaluate_family`; the
    canonical text is the property id."""
    return Property(to_text(stmt), lambda p: evaluate(stmt, p, budget))
