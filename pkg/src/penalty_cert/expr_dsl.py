"""
expr_dsl.py — Scalar expression language for problem files

Provides:
- Constant / Variable / Unary / Binary: immutable AST nodes
- parse: recursive-descent parser (text → AST, variables x1..x<dim>)
- to_text: canonical printed form (re-parses to an identical AST)
- evaluate: exact scalar evaluation in real arithmetic
- evaluate_many: vectorized evaluation over an (N, dim) array of points
- variables: indices referenced by an AST

Grammar:
    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? power
    power  := atom ('^' factor)?          # right-associative
    atom   := number | 'x'<k> | func '(' args ')' | '(' expr ')'

No implicit multiplication; "2x1" is a syntax error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from penalty_cert.errors import DomainError, ExprSyntaxError, UnknownIdentifier, VariableOutOfRange

UNARY_FUNCS = ("abs", "sqrt", "sin", "cos", "exp", "log")
BINARY_FUNCS = ("max", "min")
INFIX_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "^": "pow"}
OP_SYMBOLS = {v: k for k, v in INFIX_OPS.items()}


# ─────────────────────────────────────────
# AST
# ─────────────────────────────────────────

@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    index: int  # 1-based


@dataclass(frozen=True)
class Unary:
    op: str  # neg | abs | sqrt | sin | cos | exp | log
    child: "ExprAst"


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div | pow | max | min
    left: "ExprAst"
    right: "ExprAst"


ExprAst = Union[Constant, Variable, Unary, Binary]


# ─────────────────────────────────────────
# Tokenizer
# ─────────────────────────────────────────

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | punct | end
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"Unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


# ─────────────────────────────────────────
# Parser
# ─────────────────────────────────────────

class _Parser:
    def __init__(self, text: str, dim: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.dim = dim

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _accept(self, text: str) -> bool:
        if self.current.kind == "punct" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            found = self.current.text or "end of input"
            raise ExprSyntaxError(f"Expected '{text}', found '{found}'", self.current.offset)

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(f"Unexpected '{self.current.text}'", self.current.offset)
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.current.kind == "punct" and self.current.text in "+-":
            op = INFIX_OPS[self._advance().text]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.current.kind == "punct" and self.current.text in "*/":
            op = INFIX_OPS[self._advance().text]
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        if self._accept("-"):
            return Unary("neg", self.power())
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        if self._accept("^"):
            return Binary("pow", base, self.factor())
        return base

    def atom(self) -> ExprAst:
        tok = self.current
        if tok.kind == "number":
            self._advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"Numeric literal {tok.text} out of range", tok.offset)
            return Constant(value)
        if tok.kind == "ident":
            self._advance()
            return self._identifier(tok)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"Expected a number, variable, function or '(', found '{found}'", tok.offset)

    def _identifier(self, tok: _Token) -> ExprAst:
        name = tok.text
        var = re.fullmatch(r"x(\d+)", name)
        if var:
            index = int(var.group(1))
            if not 1 <= index <= self.dim:
                raise VariableOutOfRange(index, self.dim, tok.offset)
            return Variable(index)
        if name in UNARY_FUNCS:
            self._expect("(")
            child = self.expr()
            self._expect(")")
            return Unary(name, child)
        if name in BINARY_FUNCS:
            self._expect("(")
            left = self.expr()
            self._expect(",")
            right = self.expr()
            self._expect(")")
            return Binary(name, left, right)
        raise UnknownIdentifier(name, tok.offset)


def parse(text: str, dim: int) -> ExprAst:
    """
    Parse expression text against problem dimension dim.

    Raises:
        ExprSyntaxError: malformed text (carries the byte offset) or nesting beyond the interpreter recursion limit
        UnknownIdentifier: a name that is neither x<k> nor a known function
        VariableOutOfRange: x<k> with k outside 1..dim
    """
    if not text or not text.strip():
        raise ExprSyntaxError("Empty expression", 0)
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    parser = _Parser(text, dim)
    try:
        return parser.parse()
    except RecursionError:
        raise ExprSyntaxError("Expression nested too deeply", parser.current.offset) from None


def to_text(node: ExprAst) -> str:
    """Canonical form: infix operators fully parenthesised, functions in call syntax."""
    if isinstance(node, Constant):
        return repr(node.value)
    if isinstance(node, Variable):
        return f"x{node.index}"
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{to_text(node.child)})"
        return f"{node.op}({to_text(node.child)})"
    if node.op in BINARY_FUNCS:
        return f"{node.op}({to_text(node.left)}, {to_text(node.right)})"
    return f"({to_text(node.left)} {OP_SYMBOLS[node.op]} {to_text(node.right)})"


def variables(node: ExprAst) -> set[int]:
    if isinstance(node, Variable):
        return {node.index}
    if isinstance(node, Constant):
        return set()
    if isinstance(node, Unary):
        return variables(node.child)
    return variables(node.left) | variables(node.right)


# ─────────────────────────────────────────
# Scalar evaluation
# ─────────────────────────────────────────

def _scalar_pow(base: float, exponent: float) -> float:
    if base < 0 and not float(exponent).is_integer():
        raise DomainError(f"Fractional power {exponent!r} of negative base {base!r}")
    if base == 0 and exponent < 0:
        raise DomainError("Zero raised to a negative power")
    return math.pow(base, exponent)


def _eval(node: ExprAst, x) -> float:
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, Variable):
        return float(x[node.index - 1])
    if isinstance(node, Unary):
        v = _eval(node.child, x)
        op = node.op
        if op == "neg":
            return -v
        if op == "abs":
            return abs(v)
        if op == "sqrt":
            if v < 0:
                raise DomainError(f"sqrt of negative value {v!r}")
            return math.sqrt(v)
        if op == "log":
            if v <= 0:
                raise DomainError(f"log of non-positive value {v!r}")
            return math.log(v)
        if op == "exp":
            return math.exp(v)
        if op == "sin":
            return math.sin(v)
        return math.cos(v)
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    op = node.op
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DomainError("Division by zero")
        return a / b
    if op == "pow":
        return _scalar_pow(a, b)
    if op == "max":
        return max(a, b)
    return min(a, b)


def evaluate(node: ExprAst, x) -> float:
    """
    Evaluate at a single point x (sequence of finite reals, length >= max variable index).

    Raises:
        DomainError: sqrt/log outside domain, division by zero, non-real power,
                     or any non-finite result
    """
    try:
        value = _eval(node, x)
    except (OverflowError, ValueError) as e:
        raise DomainError(f"Evaluation of {to_text(node)} failed: {e}") from e
    if not math.isfinite(value):
        raise DomainError(f"Evaluation of {to_text(node)} produced a non-finite value {value!r}")
    return value


# ─────────────────────────────────────────
# Vectorized evaluation
# ─────────────────────────────────────────

def _eval_many(node: ExprAst, points: np.ndarray) -> np.ndarray:
    if isinstance(node, Constant):
        return np.full(points.shape[0], node.value)
    if isinstance(node, Variable):
        return points[:, node.index - 1].astype(float)
    if isinstance(node, Unary):
        v = _eval_many(node.child, points)
        if node.op == "neg":
            return -v
        if node.op == "sqrt":
            return np.where(v < 0, np.nan, np.sqrt(np.abs(v)))
        if node.op == "log":
            return np.where(v <= 0, np.nan, np.log(np.where(v > 0, v, 1.0)))
        return {"abs": np.abs, "exp": np.exp, "sin": np.sin, "cos": np.cos}[node.op](v)
    a = _eval_many(node.left, points)
    b = _eval_many(node.right, points)
    op = node.op
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return np.where(b == 0, np.nan, a / np.where(b == 0, 1.0, b))
    if op == "pow":
        bad = ((a < 0) & (b != np.floor(b))) | ((a == 0) & (b < 0))
        return np.where(bad, np.nan, np.power(np.where(bad, 1.0, a), b))
    if op == "max":
        return np.maximum(a, b)
    return np.minimum(a, b)


def evaluate_many(node: ExprAst, points: np.ndarray) -> np.ndarray:
    """
    Evaluate at every row of points (shape (N, dim)); same domain rules as evaluate.

    Raises:
        DomainError: naming the first offending point
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    with np.errstate(all="ignore"):
        values = _eval_many(node, points)
    bad = ~np.isfinite(values)
    if bad.any():
        first = int(np.argmax(bad))
        raise DomainError(
            f"Evaluation of {to_text(node)} is undefined or non-finite at x={points[first].tolist()}"
        )
    return values
