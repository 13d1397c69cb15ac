"""Expression trees for holomorphic functions of one complex variable ``z``.

Text grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' exponent)?
    unary  := '-'? atom
    atom   := number | 'i' | 'z' | func '(' expr ')' | '(' expr ')' | 'e' '^' unary
    func   := exp | log | sin | cos | sinh | cosh | sqrt
    exponent := '-'? number | '(' expr ')'      # must reduce to a real constant

Arithmetic on constants is folded while parsing, so ``(1+i)`` becomes a single
:class:`Const`. A tree is *canonical* when it holds no foldable node; for
canonical trees ``parse_expr(format_expr(t)) == t``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import ClassVar

from ..errors import ExprSyntaxError


class Expr:
    """Base node. Subclasses are frozen dataclasses, hence hashable and comparable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"non-finite constant {v!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    """``base ** exponent`` with a real exponent; principal branch when non-integer."""

    base: Expr
    exponent: float

    def __post_init__(self):
        a = float(self.exponent)
        if not math.isfinite(a):
            raise ValueError("exponent must be finite")
        object.__setattr__(self, "exponent", a)


@dataclass(frozen=True)
class Func(Expr):
    arg: Expr
    name: ClassVar[str] = ""


@dataclass(frozen=True)
class Exp(Func):
    name: ClassVar[str] = "exp"


@dataclass(frozen=True)
class Log(Func):
    name: ClassVar[str] = "log"


@dataclass(frozen=True)
class Sin(Func):
    name: ClassVar[str] = "sin"


@dataclass(frozen=True)
class Cos(Func):
    name: ClassVar[str] = "cos"


@dataclass(frozen=True)
class Sinh(Func):
    name: ClassVar[str] = "sinh"


@dataclass(frozen=True)
class Cosh(Func):
    name: ClassVar[str] = "cosh"


@dataclass(frozen=True)
class Sqrt(Func):
    name: ClassVar[str] = "sqrt"


FUNCTIONS: dict[str, type[Func]] = {
    cls.name: cls for cls in (Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt)
}

_BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div}


# --------------------------------------------------------------------------
# constant folding


def _int_power(x: complex, n: int) -> complex:
    if n < 0:
        return 1 / _int_power(x, -n)
    result = complex(1.0)
    base = x
    while n:
        if n & 1:
            result *= base
        base *= base
        n >>= 1
    return result


def _const_pow(x: complex, a: float) -> complex:
    if float(a).is_integer() and abs(a) < 2**31:
        return _int_power(x, int(a))
    if x == 0:
        raise ZeroDivisionError("branch point")
    import cmath

    return cmath.exp(a * cmath.log(x))


def _fold(node: Expr) -> Expr:
    """Collapse ``node`` into a Const if all its children are Const."""
    if isinstance(node, Neg) and isinstance(node.arg, Const):
        return Const(-node.arg.value)
    if isinstance(node, Pow) and isinstance(node.base, Const):
        return Const(_const_pow(node.base.value, node.exponent))
    if isinstance(node, (Add, Sub, Mul, Div)):
        a, b = node.left, node.right
        if isinstance(a, Const) and isinstance(b, Const):
            x, y = a.value, b.value
            if isinstance(node, Add):
                return Const(x + y)
            if isinstance(node, Sub):
                return Const(x - y)
            if isinstance(node, Mul):
                return Const(x * y)
            return Const(x / y)
    return node


def fold_constants(expr: Expr) -> Expr:
    """Return the canonical form of ``expr`` (bottom-up constant folding).

    Raises ZeroDivisionError or ValueError when a folded constant is not finite.
    """
    if isinstance(expr, (Const, Var)):
        return expr
    if isinstance(expr, Neg):
        return _fold(Neg(fold_constants(expr.arg)))
    if isinstance(expr, Pow):
        return _fold(Pow(fold_constants(expr.base), expr.exponent))
    if isinstance(expr, Func):
        return type(expr)(fold_constants(expr.arg))
    return _fold(type(expr)(fold_constants(expr.left), fold_constants(expr.right)))


def substitute(expr: Expr, replacement: Expr) -> Expr:
    """Composition ``expr ∘ replacement``: every Var is replaced."""
    if isinstance(expr, Var):
        return replacement
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Neg):
        return Neg(substitute(expr.arg, replacement))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.base, replacement), expr.exponent)
    if isinstance(expr, Func):
        return type(expr)(substitute(expr.arg, replacement))
    return type(expr)(substitute(expr.left, replacement), substitute(expr.right, replacement))


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str  # 'num' | 'ident' | 'op' | 'end'
    text: str
    offset: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    raw = source.encode("utf-8")
    # offsets are reported in bytes; map char index -> byte index
    def byte_offset(ci: int) -> int:
        return len(source[:ci].encode("utf-8"))

    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            rest = source[pos:]
            if rest.strip() == "":
                break
            skip = len(rest) - len(rest.lstrip())
            ch = source[pos + skip]
            raise ExprSyntaxError(f"unexpected character {ch!r}", byte_offset(pos + skip))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), byte_offset(m.start(kind))))
        pos = m.end()
    toks.append(_Tok("end", "", len(raw)))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _error(self, message: str | None = None):
        t = self.tok
        if message is None:
            message = "unexpected end of input" if t.kind == "end" else f"unexpected {t.text!r}"
        raise ExprSyntaxError(message, t.offset)

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text: str):
        if not self._accept(text):
            self._error()

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            self._error("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            self._error()
        return node

    def _combine(self, op: str, left: Expr, right: Expr, offset: int) -> Expr:
        try:
            return _fold(_BINARY[op](left, right))
        except (ZeroDivisionError, ValueError):
            raise ExprSyntaxError("constant expression is not finite", offset) from None

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op, off = self.tok.text, self.tok.offset
            self.i += 1
            node = self._combine(op, node, self.term(), off)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op, off = self.tok.text, self.tok.offset
            self.i += 1
            node = self._combine(op, node, self.factor(), off)
        return node

    def factor(self) -> Expr:
        node = self.unary()
        if self.tok.kind == "op" and self.tok.text == "^":
            off = self.tok.offset
            self.i += 1
            a = self.exponent()
            try:
                node = _fold(Pow(node, a))
            except (ZeroDivisionError, ValueError, OverflowError):
                raise ExprSyntaxError("constant expression is not finite", off) from None
        return node

    def exponent(self) -> float:
        t = self.tok
        if t.kind == "op" and t.text == "(":
            self.i += 1
            inner = self.expr()
            self._expect(")")
            if isinstance(inner, Const) and inner.value.imag == 0:
                return inner.value.real
            raise ExprSyntaxError("non-real exponent", t.offset)
        sign = -1.0 if self._accept("-") else 1.0
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return sign * float(t.text)
        if t.kind == "end":
            self._error()
        raise ExprSyntaxError("non-real exponent", t.offset)

    def unary(self) -> Expr:
        if self._accept("-"):
            return _fold(Neg(self.atom()))
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(float(t.text))
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        if t.kind == "ident":
            self.i += 1
            if t.text == "z":
                return Var()
            if t.text == "i":
                return Const(1j)
            if t.text == "e" and self.tok.kind == "op" and self.tok.text == "^":
                self.i += 1
                return Exp(self.unary())
            if t.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return FUNCTIONS[t.text](arg)
            raise ExprSyntaxError(f"unknown identifier {t.text!r}", t.offset)
        self._error()


def parse_expr(source: str) -> Expr:
    """Parse expression text into a canonical tree.

    >>> parse_expr("e^z")
    Exp(arg=Var())
    """
    if not isinstance(source, str):
        raise TypeError("source must be str")
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# formatter

_ADD, _MUL, _POW, _UNARY, _ATOM = 1, 2, 3, 4, 5


def _num(x: float) -> str:
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _const_text(c: complex) -> tuple[str, int]:
    re_, im = c.real, c.imag
    if im == 0 and re_ >= 0 and not math.copysign(1.0, re_) < 0:
        return _num(re_), _ATOM
    if re_ == 0 and im == 1:
        return "i", _ATOM
    if im == 0:
        return f"({_num(re_)})", _ATOM
    imag_mag = "i" if abs(im) == 1 else f"{_num(abs(im))}*i"
    if re_ == 0:
        return ("(-" if im < 0 else "(") + imag_mag + ")", _ATOM
    sign = " - " if im < 0 else " + "
    return f"({_num(re_)}{sign}{imag_mag})", _ATOM


def _fmt(e: Expr) -> tuple[str, int]:
    if isinstance(e, Var):
        return "z", _ATOM
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Exp):
        return "e^" + _wrap(e.arg, _UNARY), _ATOM
    if isinstance(e, Func):
        return f"{e.name}({format_expr(e.arg)})", _ATOM
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _ATOM), _UNARY
    if isinstance(e, Pow):
        base = _wrap(e.base, _UNARY)
        if isinstance(e.base, Exp):
            base = f"({base})"
        return f"{base}^{_num(e.exponent)}", _POW
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        return _wrap(e.left, _ADD) + op + _wrap(e.right, _MUL), _ADD
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return _wrap(e.left, _MUL) + op + _wrap(e.right, _POW), _MUL
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e: Expr, min_level: int) -> str:
    text, level = _fmt(e)
    return text if level >= min_level else f"({text})"


def format_expr(expr: Expr) -> str:
    """Render a tree as text that parses back to the same (canonical) tree."""
    return _fmt(expr)[0]
