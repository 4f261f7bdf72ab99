"""Quantum-logic formulas: AST, parser, printer, and rewrites.

Formulas are immutable.  Constructions such as :func:`restrict` share
subterms instead of copying them, so a formula is in general a DAG whose
unfolded tree can be exponentially larger than the object graph.  Every
traversal in this package memoizes on node identity for that reason.

Concrete syntax (whitespace insignificant)::

    formula := or
    or      := and { ("|" | "∨") and }
    and     := not { ("&" | "∧") not }
    not     := ("!" | "¬") not | atom
    atom    := ident | "top" | "⊤" | "1" | "bot" | "⊥" | "0" | "(" formula ")"
    ident   := letter { letter | digit | "_" }

Precedence is ``! > & > |`` and both binary operators associate to the left.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "Formula",
    "Var",
    "Top",
    "Bot",
    "Not",
    "And",
    "Or",
    "TOP",
    "BOT",
    "ParseError",
    "VariableOverlapError",
    "parse",
    "to_text",
    "nnf",
    "is_nnf",
    "freshen",
    "variables",
    "restrict",
    "structurally_equal",
    "node_count",
    "tree_size",
    "mk_P",
    "mk_alpha",
    "mk_alpha_chain",
    "mk_gamma",
    "mk_beta",
    "stage_formula",
    "mk_separator",
    "formula_digest",
    "gamma_depth",
    "random_formula",
]

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not IDENT_RE.match(self.name) or self.name in ("top", "bot"):
            raise ValueError(f"invalid variable name {self.name!r}")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    child: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


Formula = Union[Var, Top, Bot, Not, And, Or]

TOP = Top()
BOT = Bot()


def _transform(f: Formula, leaf: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``f`` bottom-up, replacing Var/Top/Bot leaves via ``leaf``; preserves sharing."""
    memo: dict[int, Formula] = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Not):
            out = Not(go(g.child))
        elif isinstance(g, And):
            out = And(go(g.left), go(g.right))
        elif isinstance(g, Or):
            out = Or(go(g.left), go(g.right))
        else:
            out = leaf(g)
        memo[key] = out
        return out

    return go(f)


def structurally_equal(f: Formula, g: Formula) -> bool:
    """Tree equality, memoized on node pairs so shared DAGs compare in linear time."""
    seen: set[tuple[int, int]] = set()
    keep = []  # pin visited nodes so ids stay valid

    def go(x, y):
        if x is y:
            return True
        key = (id(x), id(y))
        if key in seen:
            return True
        if type(x) is not type(y):
            return False
        if isinstance(x, Var):
            ok = x.name == y.name
        elif isinstance(x, Not):
            ok = go(x.child, y.child)
        elif isinstance(x, (And, Or)):
            ok = go(x.left, y.left) and go(x.right, y.right)
        else:
            ok = True
        if ok:
            seen.add(key)
            keep.append((x, y))
        return ok

    return go(f, g)


def variables(f: Formula) -> list[str]:
    """Variable names in first-occurrence (left-to-right) order."""
    seen_nodes: set[int] = set()
    names: dict[str, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen_nodes:
            continue
        seen_nodes.add(id(g))
        if isinstance(g, Var):
            names.setdefault(g.name)
        elif isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.append(g.right)
            stack.append(g.left)
    return list(names)


def node_count(f: Formula) -> int:
    """Number of distinct nodes in the shared representation."""
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
    return len(seen)


def tree_size(f: Formula) -> int:
    """Number of nodes of the unfolded tree."""
    memo: dict[int, int] = {}

    def go(g):
        if id(g) in memo:
            return memo[id(g)]
        if isinstance(g, Not):
            out = 1 + go(g.child)
        elif isinstance(g, (And, Or)):
            out = 1 + go(g.left) + go(g.right)
        else:
            out = 1
        memo[id(g)] = out
        return out

    return go(f)


# --------------------------------------------------------------------------
# parsing and printing

class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


_SYMBOLS = {
    "|": "or", "∨": "or",
    "&": "and", "∧": "and",
    "!": "not", "¬": "not",
    "(": "lparen", ")": "rparen",
    "⊤": "top", "1": "top",
    "⊥": "bot", "0": "bot",
}
_KEYWORDS = {"top": "top", "bot": "bot"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    byte = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            pass
        elif ch in _SYMBOLS:
            tokens.append((_SYMBOLS[ch], ch, byte))
        elif ch.isascii() and ch.isalpha():
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append((_KEYWORDS.get(word, "ident"), word, byte))
            byte += j - i
            i = j
            continue
        else:
            raise ParseError(f"unexpected character {ch!r}", byte)
        byte += len(ch.encode("utf-8"))
        i += 1
    tokens.append(("eof", "", byte))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        kind, _, offset = self.peek()
        if kind == "eof":
            raise ParseError("empty input", offset)
        f = self.parse_or()
        kind, text, offset = self.peek()
        if kind == "rparen":
            raise ParseError("unbalanced ')'", offset)
        if kind != "eof":
            raise ParseError(f"unexpected token {text!r}", offset)
        return f

    def parse_or(self):
        f = self.parse_and()
        while self.peek()[0] == "or":
            self.take()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self):
        f = self.parse_not()
        while self.peek()[0] == "and":
            self.take()
            f = And(f, self.parse_not())
        return f

    def parse_not(self):
        depth = 0
        while self.peek()[0] == "not":
            self.take()
            depth += 1
        f = self.parse_atom()
        for _ in range(depth):
            f = Not(f)
        return f

    def parse_atom(self):
        kind, text, offset = self.take()
        if kind == "ident":
            return Var(text)
        if kind == "top":
            return TOP
        if kind == "bot":
            return BOT
        if kind == "lparen":
            f = self.parse_or()
            kind, text, close = self.take()
            if kind != "rparen":
                raise ParseError(f"unbalanced '(' opened at byte {offset}", close)
            return f
        if kind == "eof":
            raise ParseError("unexpected end of input", offset)
        raise ParseError(f"unexpected token {text!r}", offset)


def parse(text: str) -> Formula:
    """Parse the concrete syntax into a Formula; raises :class:`ParseError`."""
    return _Parser(text).parse()


_PREC = {Or: 1, And: 2, Not: 3}


def _prec(f) -> int:
    return _PREC.get(type(f), 4)


def to_text(f: Formula) -> str:
    """Canonical ASCII rendering with minimal parentheses."""
    memo: dict[int, str] = {}

    def wrap(g, need_parens):
        s = go(g)
        return f"({s})" if need_parens else s

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            s = g.name
        elif isinstance(g, Top):
            s = "top"
        elif isinstance(g, Bot):
            s = "bot"
        elif isinstance(g, Not):
            s = "!" + wrap(g.child, _prec(g.child) < 3)
        else:
            p = _prec(g)
            op = " & " if isinstance(g, And) else " | "
            s = wrap(g.left, _prec(g.left) < p) + op + wrap(g.right, _prec(g.right) <= p)
        memo[key] = s
        return s

    return go(f)


# --------------------------------------------------------------------------
# rewrites

def nnf(f: Formula) -> Formula:
    """Push negations onto variables with De Morgan; ``!top -> bot``, ``!bot -> top``."""
    memo: dict[tuple[int, bool], Formula] = {}

    def go(g, neg):
        key = (id(g), neg)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            out = Not(g) if neg else g
        elif isinstance(g, Top):
            out = BOT if neg else TOP
        elif isinstance(g, Bot):
            out = TOP if neg else BOT
        elif isinstance(g, Not):
            out = go(g.child, not neg)
        elif isinstance(g, And):
            out = (Or if neg else And)(go(g.left, neg), go(g.right, neg))
        else:
            out = (And if neg else Or)(go(g.left, neg), go(g.right, neg))
        memo[key] = out
        return out

    return go(f, False)


def is_nnf(f: Formula) -> bool:
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if isinstance(g, Not):
            if not isinstance(g.child, Var):
                return False
        elif isinstance(g, (And, Or)):
            stack.extend((g.left, g.right))
    return True


def freshen(f: Formula, suffix: str) -> Formula:
    """Append ``suffix`` to every variable name."""
    if not suffix:
        raise ValueError("suffix must be nonempty")
    renamed: dict[str, Var] = {}

    def leaf(g):
        if isinstance(g, Var):
            if g.name not in renamed:
                renamed[g.name] = Var(g.name + suffix)
            return renamed[g.name]
        return g

    return _transform(f, leaf)


class VariableOverlapError(ValueError):
    pass


def restrict(alpha: Formula, beta: Formula) -> Formula:
    """Relativize ``alpha`` to the subspace computed by ``beta``.

    In ``nnf(alpha)`` each ``u`` becomes ``u & beta``, each ``!u`` becomes
    ``!(u & beta) & beta``, ``top`` becomes ``beta`` and ``bot`` stays.
    The variable sets must be disjoint.
    """
    overlap = set(variables(alpha)) & set(variables(beta))
    if overlap:
        raise VariableOverlapError(f"shared variables: {sorted(overlap)}")
    positive: dict[str, Formula] = {}
    negative: dict[str, Formula] = {}

    def pos(v: Var) -> Formula:
        if v.name not in positive:
            positive[v.name] = And(v, beta)
        return positive[v.name]

    memo: dict[int, Formula] = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            out = pos(g)
        elif isinstance(g, Top):
            out = beta
        elif isinstance(g, Bot):
            out = BOT
        elif isinstance(g, Not):
            v = g.child
            if v.name not in negative:
                negative[v.name] = And(Not(pos(v)), beta)
            out = negative[v.name]
        elif isinstance(g, And):
            out = And(go(g.left), go(g.right))
        else:
            out = Or(go(g.left), go(g.right))
        memo[key] = out
        return out

    return go(nnf(alpha))


# --------------------------------------------------------------------------
# named constructions

def mk_P(a: str, b: str) -> Formula:
    """``(a | !b) & b``: the image of the projection of ``a`` onto ``b``."""
    return And(Or(Var(a), Not(Var(b))), Var(b))


def mk_alpha(a: str, b: str) -> Formula:
    """``P(b, a) & !(a & b)``; its maximal dimension in C^n is ``n // 2``."""
    return And(mk_P(b, a), Not(And(Var(a), Var(b))))


def mk_alpha_chain(k: int, a: str = "a", b: str = "b") -> Formula:
    """``alpha`` restricted to itself ``k - 1`` times.

    Copy ``j`` (1 = innermost) uses variables ``a_s<j>``, ``b_s<j>``.
    """
    if k < 1:
        raise ValueError(f"chain length must be >= 1, got {k}")
    phi = freshen(mk_alpha(a, b), "_s1")
    for j in range(2, k + 1):
        phi = restrict(freshen(mk_alpha(a, b), f"_s{j}"), phi)
    return phi


def gamma_depth(l: int) -> int:
    """Smallest ``t`` with ``2l >> (t+1) == (2l+1) >> (t+1) == 1``."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    t = 0
    while not ((2 * l) >> (t + 1) == 1 and (2 * l + 1) >> (t + 1) == 1):
        t += 1
    return t


def mk_gamma(l: int) -> Formula:
    """Self-restricted alpha over ``c_s*``, ``d_s*`` taking value 1 at both ``2l`` and ``2l+1``."""
    return mk_alpha_chain(gamma_depth(l) + 1, "c", "d")


def mk_beta(l: int) -> Formula:
    """``(!(P(b,a) | P(a,b)) & gamma) | alpha(a, b)``."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    beta_tilde = And(Not(Or(mk_P("b", "a"), mk_P("a", "b"))), mk_gamma(l))
    return Or(beta_tilde, mk_alpha("a", "b"))


def stage_formula(kind: str, l: int | None, stage: int) -> Formula:
    """Stage ``stage`` of the separating construction, variables suffixed ``_s<stage>``."""
    if kind == "alpha":
        f = mk_alpha("a", "b")
    elif kind == "beta":
        f = mk_beta(l)
    else:
        raise ValueError(f"unknown stage kind {kind!r}")
    return freshen(f, f"_s{stage}")


def mk_separator(m: int, n: int):
    """Formula that is a tautology in C^m but not in C^n, with its certificate.

    Returns ``(phi, certificate)``.
    """
    from .profile import Certificate, Stage

    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    a, b = m, n
    stages = []
    phi = None
    s = 0
    while a > 0:
        s += 1
        if a % 2 == 0 and b == a + 1:
            kind, l = "beta", a // 2
            a, b = l, l + 1
        else:
            kind, l = "alpha", None
            a, b = a // 2, b // 2
        stage = stage_formula(kind, l, s)
        phi = stage if phi is None else restrict(stage, phi)
        stages.append(Stage(kind, l, (a, b)))
    cert = Certificate(m=m, n=n, stages=tuple(stages), formula_digest=formula_digest(phi))
    return phi, cert


def formula_digest(f: Formula) -> str:
    """SHA-256 of the canonical text, computed with shared subterms hashed once."""
    import hashlib

    memo: dict[int, str] = {}

    def go(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            s = "v:" + g.name
        elif isinstance(g, Top):
            s = "top"
        elif isinstance(g, Bot):
            s = "bot"
        elif isinstance(g, Not):
            s = "not:" + go(g.child)
        else:
            tag = "and:" if isinstance(g, And) else "or:"
            s = tag + go(g.left) + "," + go(g.right)
        out = hashlib.sha256(s.encode()).hexdigest()
        memo[key] = out
        return out

    return go(f)


def random_formula(rng: random.Random, max_nodes: int = 12, names=("a", "b", "c", "d")) -> Formula:
    """Random formula with at most ``max_nodes`` nodes over ``names``."""
    budget = rng.randint(1, max_nodes)

    def build(size):
        if size <= 1:
            r = rng.random()
            if r < 0.08:
                return TOP
            if r < 0.16:
                return BOT
            return Var(rng.choice(names))
        if size == 2 or rng.random() < 0.25:
            return Not(build(size - 1))
        left = rng.randint(1, size - 2)
        cls = And if rng.random() < 0.5 else Or
        return cls(build(left), build(size - 1 - left))

    return build(budget)
