"""Expressions for meromorphic functions on a torus.

Grammar (whitespace ignored, columns in errors are 1-based)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | base ('^' ['-'] integer)?
    base   := number | name '(' arg ')' | '(' expr ')'
    name   := 'wp' | 'wpp' | 'sigma'
    arg    := 'z' (('+' | '-') (number | '(' complex ')'))*  |  complex
    number := digits ['.' digits] [exponent] ['i'] | 'i'

``wpp`` is the derivative of ``wp``.  In an argument the offsets after ``z``
are read arithmetically, so ``z-0.3+0.2i`` is ``z - (0.3 - 0.2i)``.  An
argument without ``z`` is a constant (``wp(0.3)`` is the number wp(0.3)).
"""

from __future__ import annotations

import re

import numpy as np

from . import elliptic as ell
from .errors import DomainError, ParseError, PoleError

_NUM = re.compile(r"(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?(i)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
FUNCTIONS = ("wp", "wpp", "sigma")


# ==========
# tree nodes
# ==========

class Node:
    def dual(self, ctx, z):
        """(value, d/dz value) at z (numpy arrays)."""
        raise NotImplementedError

    def value(self, ctx, z):
        return self.dual(ctx, z)[0]

    def leaves(self):
        return []


class Const(Node):
    def __init__(self, c):
        self.c = complex(c)

    def dual(self, ctx, z):
        z = np.asarray(z, dtype=complex)
        return np.full(z.shape, self.c), np.zeros(z.shape, complex)

    def text(self):
        return _fmt(self.c, paren=True)


class Leaf(Node):
    """``name(z - center)``; ``center`` is None for a constant argument."""

    def __init__(self, name, center=0j, const_arg=None):
        self.name = name
        self.center = complex(center)
        self.const_arg = const_arg

    def leaves(self):
        return [self]

    def dual(self, ctx, z):
        z = np.asarray(z, dtype=complex)
        if self.const_arg is not None:
            v = _leaf_value(self.name, ctx, np.asarray(self.const_arg))
            return np.full(z.shape, v, dtype=complex), np.zeros(z.shape, complex)
        u = z - self.center
        if self.name == "wp":
            return np.asarray(ell.wp(ctx, u)), np.asarray(ell.wp_prime(ctx, u))
        if self.name == "wpp":
            p = np.asarray(ell.wp(ctx, u))
            return np.asarray(ell.wp_prime(ctx, u)), 6 * p ** 2 - ctx.g2 / 2
        # sigma' = sigma zeta (not evaluated exactly at a zero of sigma)
        s = np.asarray(ell.sigma_fn(ctx, u))
        return s, s * np.asarray(ell.zeta_fn(ctx, u))

    def text(self):
        if self.const_arg is not None:
            return f"{self.name}({_fmt(self.const_arg, paren=True)})"
        if self.center == 0:
            return f"{self.name}(z)"
        return f"{self.name}(z-{_fmt(self.center, paren=True)})"


def _leaf_value(name, ctx, u):
    if name == "wp":
        return ell.wp(ctx, u)
    if name == "wpp":
        return ell.wp_prime(ctx, u)
    return ell.sigma_fn(ctx, u)


class Binary(Node):
    def __init__(self, op, left, right):
        self.op, self.left, self.right = op, left, right

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def dual(self, ctx, z):
        a, da = self.left.dual(ctx, z)
        b, db = self.right.dual(ctx, z)
        if self.op == "+":
            return a + b, da + db
        if self.op == "-":
            return a - b, da - db
        if self.op == "*":
            return a * b, da * b + a * db
        if np.any(b == 0):
            raise PoleError("division by zero", None)
        return a / b, (da * b - a * db) / (b * b)

    def text(self):
        return f"({self.left.text()}{self.op}{self.right.text()})"


class Neg(Node):
    def __init__(self, arg):
        self.arg = arg

    def leaves(self):
        return self.arg.leaves()

    def dual(self, ctx, z):
        a, da = self.arg.dual(ctx, z)
        return -a, -da

    def text(self):
        return f"(-{self.arg.text()})"


class Pow(Node):
    def __init__(self, base, n):
        self.base, self.n = base, int(n)

    def leaves(self):
        return self.base.leaves()

    def dual(self, ctx, z):
        a, da = self.base.dual(ctx, z)
        n = self.n
        if n == 0:
            return np.ones_like(a), np.zeros_like(a)
        if n < 0 and np.any(a == 0):
            raise PoleError("negative power of zero", None)
        return a ** n, n * a ** (n - 1) * da

    def text(self):
        return f"{self.base.text()}^{self.n}"


class MeroExpr:
    """A parsed expression; ``root`` is the tree."""

    def __init__(self, root, source=None):
        self.root = root
        self.source = source if source is not None else root.text()

    def __call__(self, ctx, z):
        return evaluate(self, ctx, z)

    def leaves(self):
        return self.root.leaves()

    def text(self):
        return self.root.text()

    def __repr__(self):
        return f"MeroExpr({self.source!r})"


def _fmt(c, paren=False):
    c = complex(c)
    if c.imag == 0:
        s = repr(c.real)
    elif c.real == 0:
        s = f"{c.imag!r}i"
    else:
        sign = "+" if c.imag >= 0 else "-"
        s = f"{c.real!r}{sign}{abs(c.imag)!r}i"
    if paren and (c.real < 0 or (c.real != 0 and c.imag != 0) or (c.real == 0 and c.imag < 0)):
        return f"({s})"
    return s


# ======
# parser
# ======

class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def col(self):
        return self.pos + 1

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise ParseError(f"unexpected {got!r}", self.col(), repr(ch))
        self.pos += 1

    def number(self):
        self.skip()
        m = _NUM.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            v = float(m.group(1) + (m.group(2) or ""))
            return complex(0, v) if m.group(3) else complex(v)
        m = _NAME.match(self.text, self.pos)
        if m and m.group() == "i":
            self.pos = m.end()
            return 1j
        raise ParseError("expected a number", self.col(), "number")

    def at_number(self):
        self.skip()
        if _NUM.match(self.text, self.pos):
            return True
        m = _NAME.match(self.text, self.pos)
        return bool(m) and m.group() == "i"

    def parse(self):
        node = self.expr()
        if self.peek():
            raise ParseError(f"unexpected {self.peek()!r}", self.col(), "operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.peek()
            self.pos += 1
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() in ("*", "/") and self.peek():
            op = self.peek()
            self.pos += 1
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return Neg(self.factor())
        if ch == "+":
            self.pos += 1
            return self.factor()
        node = self.base()
        if self.peek() == "^":
            self.pos += 1
            sign = 1
            if self.peek() == "-":
                sign = -1
                self.pos += 1
            self.skip()
            m = re.compile(r"\d+").match(self.text, self.pos)
            if not m:
                raise ParseError("exponent must be an integer", self.col(), "integer")
            self.pos = m.end()
            node = Pow(node, sign * int(m.group()))
        return node

    def base(self):
        ch = self.peek()
        if not ch:
            raise ParseError("unexpected end of input", self.col(), "number, function or '('")
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if self.at_number():
            return Const(self.number())
        m = _NAME.match(self.text, self.pos)
        if m:
            name = m.group()
            if name not in FUNCTIONS:
                raise ParseError(f"unknown identifier {name!r}", self.col(), "wp, wpp or sigma")
            self.pos = m.end()
            self.expect("(")
            leaf = self.arg(name)
            self.expect(")")
            return leaf
        raise ParseError(f"unexpected {ch!r}", self.col(), "number, function or '('")

    def complex_value(self):
        """Constant complex expression: signed sums of numbers, optionally in
        parentheses."""
        total = 0j
        sign = 1
        first = True
        while True:
            ch = self.peek()
            if ch in ("+", "-"):
                sign = -1 if ch == "-" else 1
                self.pos += 1
            elif not first:
                return total
            if self.peek() == "(":
                self.pos += 1
                val = self.complex_value()
                self.expect(")")
            else:
                val = self.number()
            total += sign * val
            sign = 1
            first = False
            if self.peek() not in ("+", "-"):
                return total

    def arg(self, name):
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if m and m.group() == "z":
            self.pos = m.end()
            offset = 0j
            while self.peek() in ("+", "-") and self.peek():
                sign = -1 if self.peek() == "-" else 1
                self.pos += 1
                if self.peek() == "(":
                    self.pos += 1
                    val = self.complex_value()
                    self.expect(")")
                else:
                    val = self.number()
                offset += sign * val
            return Leaf(name, -offset)
        if self.peek() in ("(", "+", "-") or self.at_number():
            return Leaf(name, 0j, const_arg=self.complex_value())
        raise ParseError("expected an argument", self.col(), "'z' or a number")


def parse(text: str) -> MeroExpr:
    if not isinstance(text, str):
        raise ParseError("expression must be a string", 1)
    return MeroExpr(_Parser(text).parse(), text)


# ==========
# evaluation
# ==========

def evaluate(expr, ctx, z):
    root = expr.root if isinstance(expr, MeroExpr) else expr
    v = root.value(ctx, z)
    return complex(v) if np.ndim(v) == 0 else v


def evaluate_dual(expr, ctx, z):
    root = expr.root if isinstance(expr, MeroExpr) else expr
    return root.dual(ctx, z)


def is_constant(expr):
    """True when no leaf depends on z."""
    root = expr.root if isinstance(expr, MeroExpr) else expr
    return all(leaf.const_arg is not None for leaf in root.leaves())


def check_well_formed(expr, ctx, samples=7, seed=0):
    """Sample a few points; a denominator that vanishes at all of them is
    treated as identically zero."""
    rng = np.random.default_rng(seed)
    zs = rng.random(samples) + rng.random(samples) * ctx.tau
    bad = 0
    for z in zs:
        try:
            evaluate(expr, ctx, z)
        except PoleError:
            bad += 1
    if bad == samples:
        raise DomainError("expression is singular everywhere (a denominator vanishes identically)")
    return expr
