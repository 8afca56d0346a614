"""A tiny expression language for coefficient functions ``a(x1, ..., xd)``.

Grammar (LL(1))::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' unsigned)?
    base   := number | 'x' digit | '(' expr ')' | ('sin' | 'cos' | 'exp') '(' expr ')'

A bare ``x`` is accepted as an alias of ``x1``. Expressions are real valued
and evaluate elementwise on numpy arrays.
"""
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

__all__ = ['Expr', 'Num', 'Var', 'BinOp', 'Pow', 'Neg', 'Call', 'parse_coeff']

_FUNCS = {'sin': np.sin, 'cos': np.cos, 'exp': np.exp}
_BINOPS = {
    '+': np.add,
    '-': np.subtract,
    '*': np.multiply,
    '/': np.divide,
}


class Expr:
    """Base node. Subclasses are frozen dataclasses, so equality is structural."""

    def __call__(self, *xs):
        return self.evaluate(xs)

    def __add__(self, other):
        return BinOp('+', self, _lift(other))

    def __radd__(self, other):
        return BinOp('+', _lift(other), self)

    def __sub__(self, other):
        return BinOp('-', self, _lift(other))

    def __mul__(self, other):
        return BinOp('*', self, _lift(other))

    def __rmul__(self, other):
        return BinOp('*', _lift(other), self)

    def __truediv__(self, other):
        return BinOp('/', self, _lift(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return self.to_string()


def _lift(v):
    return v if isinstance(v, Expr) else Num(float(v))


def _fmt(v):
    # repr of a float round-trips exactly; strip a trailing '.0' for readability
    s = repr(float(v))
    return s[:-2] if s.endswith('.0') else s


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float

    def evaluate(self, xs):
        return np.float64(self.value)

    def to_string(self):
        if self.value < 0:
            return f"(-{_fmt(-self.value)})"
        return _fmt(self.value)

    def max_var(self):
        return 0

    def polynomial_degree(self):
        return 0


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int

    def evaluate(self, xs):
        if self.index > len(xs):
            raise ValueError(f"x{self.index} used but only {len(xs)} coordinates supplied")
        return np.asarray(xs[self.index - 1], dtype=float)

    def to_string(self):
        return f"x{self.index}"

    def max_var(self):
        return self.index

    def polynomial_degree(self):
        return 1


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, xs):
        return _BINOPS[self.op](self.left.evaluate(xs), self.right.evaluate(xs))

    def to_string(self):
        return f"({self.left.to_string()}{self.op}{self.right.to_string()})"

    def max_var(self):
        return max(self.left.max_var(), self.right.max_var())

    def polynomial_degree(self):
        dl, dr = self.left.polynomial_degree(), self.right.polynomial_degree()
        if dl is None or dr is None:
            return None
        if self.op in '+-':
            return max(dl, dr)
        if self.op == '*':
            return dl + dr
        return dl if dr == 0 else None


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def evaluate(self, xs):
        return np.power(self.base.evaluate(xs), self.exponent)

    def to_string(self):
        return f"({self.base.to_string()}^{self.exponent})"

    def max_var(self):
        return self.base.max_var()

    def polynomial_degree(self):
        d = self.base.polynomial_degree()
        return None if d is None else d * self.exponent


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr

    def evaluate(self, xs):
        return np.negative(self.arg.evaluate(xs))

    def to_string(self):
        return f"(-{self.arg.to_string()})"

    def max_var(self):
        return self.arg.max_var()

    def polynomial_degree(self):
        return self.arg.polynomial_degree()


@dataclass(frozen=True, eq=True)
class Call(Expr):
    name: str
    arg: Expr

    def evaluate(self, xs):
        return _FUNCS[self.name](self.arg.evaluate(xs))

    def to_string(self):
        return f"{self.name}({self.arg.to_string()})"

    def max_var(self):
        return self.arg.max_var()

    def polynomial_degree(self):
        return 0 if self.arg.polynomial_degree() == 0 else None


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<func>sin|cos|exp)
  | (?P<var>x\d?)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             ('number', 'x<digit>', 'sin', 'cos', 'exp', '('))
        kind = m.lastgroup
        if kind != 'ws':
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(('end', '', len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.tok
        if text != value:
            raise ParseError(f"unexpected {text or 'end of input'!r}", pos, (repr(value),))
        self.advance()

    def expr(self):
        node = self.term()
        while self.tok[1] in ('+', '-') and self.tok[0] == 'op':
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[1] in ('*', '/') and self.tok[0] == 'op':
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.tok == ('op', '-', self.tok[2]):
            self.advance()
            return Neg(self.factor())
        node = self.base()
        if self.tok[1] == '^':
            self.advance()
            kind, text, pos = self.tok
            if kind != 'num' or not text.isdigit():
                raise ParseError("exponent must be an unsigned integer", pos, ('unsigned integer',))
            self.advance()
            node = Pow(node, int(text))
        return node

    def base(self):
        kind, text, pos = self.tok
        if kind == 'num':
            self.advance()
            return Num(float(text))
        if kind == 'var':
            self.advance()
            return Var(int(text[1:]) if len(text) > 1 else 1)
        if kind == 'func':
            self.advance()
            self.expect('(')
            arg = self.expr()
            self.expect(')')
            return Call(text, arg)
        if text == '(':
            self.advance()
            node = self.expr()
            self.expect(')')
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos,
                         ('number', 'x<digit>', 'sin', 'cos', 'exp', '('))


def parse_coeff(text):
    """Parse a coefficient expression.

    >>> parse_coeff("1+x1")
    BinOp(op='+', left=Num(value=1.0), right=Var(index=1))

    Raises
    ------
    ParseError
        With the byte offset of the first offending token.
    """
    p = _Parser(text)
    node = p.expr()
    kind, tail, pos = p.tok
    if kind != 'end':
        raise ParseError(f"unexpected {tail!r}", pos, ("'+'", "'-'", "'*'", "'/'", 'end of input'))
    return node
