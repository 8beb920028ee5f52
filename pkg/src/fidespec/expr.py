"""Expression language for problem data: tokenizer, parser, evaluator.

The language covers exactly what problem files need and nothing more:
``+ - * / ^`` with the usual precedence (``^`` is right-associative and
binds tighter than unary minus), parentheses, the constants ``pi`` and
``e`` (folded to numbers at parse time), and a fixed set of builtin
functions.  There are no user-defined functions and no conditionals, so
parsing always terminates.

Grammar, lowest precedence first::

    sum    := term  (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative, so 2^3^2 = 512
    atom   := NUMBER | IDENT | IDENT '(' sum (',' sum)* ')' | '(' sum ')'

Expr values are immutable after parse; ``eval_expr`` is a pure function of
the tree and the bindings and is safe to call from concurrent contexts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from . import specialfn

__all__ = [
    "Token",
    "Expr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprError",
    "LexError",
    "ParseError",
    "UnknownFunctionError",
    "UnknownVariableError",
    "EvalDomainError",
    "BUILTIN_ARITY",
    "tokenize",
    "parse",
    "eval_expr",
    "free_vars",
    "to_source",
]


class ExprError(ValueError):
    """Base class for everything this module raises."""


class LexError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class UnknownFunctionError(ParseError):
    pass


class UnknownVariableError(ParseError):
    pass


class EvalDomainError(ExprError):
    """Evaluation left the real domain; names the offending sub-expression."""

    def __init__(self, message: str, subexpr: "Expr"):
        super().__init__(f"{message} in '{to_source(subexpr)}'")
        self.subexpr = subexpr


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | paren | comma
    lexeme: str
    position: int  # 0-based character offset


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    child: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


Expr = Union[Const, Var, Neg, BinOp, Call]

BUILTIN_ARITY = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "pow": 2,
    "gamma": 1,
    "besselj0": 1,
    "besselj1": 1,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_OPERATOR_CHARS = "+-*/^"
_WHITESPACE = " \t\r\n"


def tokenize(source: str) -> list[Token]:
    """Lex *source* into tokens; raises LexError with the offending offset."""
    tokens: list[Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in _WHITESPACE:
            i += 1
            continue
        if ch in _OPERATOR_CHARS:
            tokens.append(Token("operator", ch, i))
            i += 1
        elif ch in "()":
            tokens.append(Token("paren", ch, i))
            i += 1
        elif ch == ",":
            tokens.append(Token("comma", ch, i))
            i += 1
        elif ch.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                if i >= n or not source[i].isdigit():
                    raise LexError("malformed number: expected digit after '.'", i)
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                i += 1
                if i < n and source[i] in "+-":
                    i += 1
                if i >= n or not source[i].isdigit():
                    raise LexError("malformed number: expected digit in exponent", i)
                while i < n and source[i].isdigit():
                    i += 1
            tokens.append(Token("number", source[start:i], start))
        elif ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(Token("identifier", source[start:i], start))
        else:
            raise LexError(f"unrecognized character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], allowed_vars: frozenset[str], length: int):
        self.tokens = tokens
        self.pos = 0
        self.allowed = allowed_vars
        self.length = length

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_paren(self, which: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "paren" or tok.lexeme != which:
            raise ParseError(f"expected '{which}'", tok.position if tok else self.length)
        self.advance()

    def parse_sum(self) -> Expr:
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "operator" and tok.lexeme in "+-":
                self.advance()
                node = BinOp(tok.lexeme, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "operator" and tok.lexeme in "*/":
                self.advance()
                node = BinOp(tok.lexeme, node, self.parse_unary())
            else:
                return node

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and tok.lexeme == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and tok.lexeme == "^":
            self.advance()
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression", self.length)
        if tok.kind == "number":
            self.advance()
            return Const(float(tok.lexeme))
        if tok.kind == "paren" and tok.lexeme == "(":
            self.advance()
            node = self.parse_sum()
            self.expect_paren(")")
            return node
        if tok.kind == "identifier":
            self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "paren" and nxt.lexeme == "(":
                return self.parse_call(tok)
            if tok.lexeme in _CONSTANTS:
                return Const(_CONSTANTS[tok.lexeme])
            if tok.lexeme in self.allowed:
                return Var(tok.lexeme)
            allowed = ", ".join(sorted(self.allowed)) or "(none)"
            raise UnknownVariableError(
                f"unknown variable '{tok.lexeme}'; allowed variables: {allowed}", tok.position
            )
        raise ParseError(f"unexpected token '{tok.lexeme}'", tok.position)

    def parse_call(self, name_tok: Token) -> Expr:
        name = name_tok.lexeme
        if name not in BUILTIN_ARITY:
            raise UnknownFunctionError(f"unknown function '{name}'", name_tok.position)
        self.expect_paren("(")
        args = [self.parse_sum()]
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "comma":
                self.advance()
                args.append(self.parse_sum())
            else:
                break
        self.expect_paren(")")
        arity = BUILTIN_ARITY[name]
        if len(args) != arity:
            raise ParseError(
                f"function '{name}' takes {arity} argument(s), got {len(args)}", name_tok.position
            )
        return Call(name, tuple(args))


def parse(source: str, allowed_vars: Iterable[str]) -> Expr:
    """Parse *source* with variables restricted to *allowed_vars*."""
    tokens = tokenize(source)
    if not tokens:
        raise ParseError("empty expression", 0)
    parser = _Parser(tokens, frozenset(allowed_vars), len(source))
    node = parser.parse_sum()
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(f"unexpected token '{trailing.lexeme}'", trailing.position)
    return node


def eval_expr(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate the tree in double precision under the given variable bindings."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return float(bindings[e.name])
        except KeyError:
            raise ExprError(f"unbound variable '{e.name}'") from None
    if isinstance(e, Neg):
        return -eval_expr(e.child, bindings)
    if isinstance(e, BinOp):
        a = eval_expr(e.left, bindings)
        b = eval_expr(e.right, bindings)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0.0:
                raise EvalDomainError("division by zero", e)
            return a / b
        # real power; integer exponents are not special-cased
        try:
            return _checked(a**b, e)
        except (ValueError, OverflowError, ZeroDivisionError) as err:
            raise EvalDomainError(f"invalid power ({err})", e) from None
    if isinstance(e, Call):
        args = [eval_expr(arg, bindings) for arg in e.args]
        return _apply_builtin(e, args)
    raise TypeError(f"not an Expr node: {e!r}")


def _checked(value: float, e: Expr) -> float:
    if math.isnan(value):
        raise EvalDomainError("result is not a number", e)
    return value


def _apply_builtin(e: Call, args: list[float]) -> float:
    name = e.func
    a = args[0]
    try:
        if name == "sin":
            return math.sin(a)
        if name == "cos":
            return math.cos(a)
        if name == "tan":
            return math.tan(a)
        if name == "exp":
            return math.exp(a)
        if name == "log":
            if a <= 0.0:
                raise EvalDomainError("log of non-positive value", e)
            return math.log(a)
        if name == "sqrt":
            if a < 0.0:
                raise EvalDomainError("sqrt of negative value", e)
            return math.sqrt(a)
        if name == "abs":
            return abs(a)
        if name == "pow":
            return _checked(a ** args[1], e)
        if name == "gamma":
            return specialfn.gamma(a)
        if name == "besselj0":
            return specialfn.bessel_j0(a)
        if name == "besselj1":
            return specialfn.bessel_j1(a)
    except EvalDomainError:
        raise
    except (ValueError, OverflowError, ZeroDivisionError) as err:
        raise EvalDomainError(str(err), e) from None
    raise TypeError(f"unhandled builtin '{name}'")


def free_vars(e: Expr) -> frozenset[str]:
    """The exact set of variable names appearing in the tree."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return free_vars(e.child)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Call):
        out: frozenset[str] = frozenset()
        for arg in e.args:
            out |= free_vars(arg)
        return out
    return frozenset()


_LEVEL_SUM = 1
_LEVEL_TERM = 2
_LEVEL_UNARY = 3
_LEVEL_POW = 4
_LEVEL_ATOM = 5


def to_source(e: Expr) -> str:
    """Render the tree back to source; reparsing yields an identical tree."""
    return _format(e, 0)


def _format(e: Expr, parent_level: int) -> str:
    if isinstance(e, Const):
        text = repr(e.value)
        level = _LEVEL_ATOM if e.value >= 0 else _LEVEL_UNARY
    elif isinstance(e, Var):
        text = e.name
        level = _LEVEL_ATOM
    elif isinstance(e, Neg):
        text = "-" + _format(e.child, _LEVEL_UNARY)
        level = _LEVEL_UNARY
    elif isinstance(e, BinOp):
        if e.op in "+-":
            level = _LEVEL_SUM
            text = _format(e.left, _LEVEL_SUM) + e.op + _format(e.right, _LEVEL_TERM)
        elif e.op in "*/":
            level = _LEVEL_TERM
            text = _format(e.left, _LEVEL_TERM) + e.op + _format(e.right, _LEVEL_UNARY)
        else:  # ^ is right associative; its left operand must be an atom
            level = _LEVEL_POW
            text = _format(e.left, _LEVEL_ATOM) + e.op + _format(e.right, _LEVEL_UNARY)
    else:
        text = e.func + "(" + ",".join(_format(arg, 0) for arg in e.args) + ")"
        level = _LEVEL_ATOM
    if level < parent_level:
        return "(" + text + ")"
    return text
