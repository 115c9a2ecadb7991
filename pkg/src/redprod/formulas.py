"""First-order formulas over a single binary relation symbol ``R``.

Variables are integer indices; quantifiers bind an index and an assignment
is a list indexed by variable. Evaluation uses the raw relation: callers
reflexivize explicitly when connectivity semantics are wanted.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .filters import Filter, member
from .products import ReducedProduct, _check_dims, _check_point, build_reduced_product
from .structure import BinaryStructure

MAX_DIST_N = 8


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


@dataclass(frozen=True)
class Rel:
    left: int
    right: int

    def __str__(self) -> str:
        return f"R(v{self.left},v{self.right})"


@dataclass(frozen=True)
class Eq:
    left: int
    right: int

    def __str__(self) -> str:
        return f"v{self.left} = v{self.right}"


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return f"~{_wrap(self.body)}"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]

    def __str__(self) -> str:
        return " & ".join(_wrap(p) for p in self.parts) if self.parts else "true"


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]

    def __str__(self) -> str:
        return " | ".join(_wrap(p) for p in self.parts) if self.parts else "false"


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Formula"

    def __str__(self) -> str:
        return f"exists v{self.var}. {self.body}"


@dataclass(frozen=True)
class Forall:
    var: int
    body: "Formula"

    def __str__(self) -> str:
        return f"forall v{self.var}. {self.body}"


Formula = Union[Rel, Eq, Not, And, Or, Exists, Forall]
Atom = (Rel, Eq)


def _wrap(f: Formula) -> str:
    return str(f) if isinstance(f, (Rel, Eq, Not)) else f"({f})"


def conj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def free_vars(f: Formula) -> frozenset[int]:
    if isinstance(f, Atom):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    return free_vars(f.body) - {f.var}


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def negate(f: Formula) -> Formula:
    """Negation pushed down to the atoms (negation normal form of ``~f``)."""
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return f.body
    if isinstance(f, And):
        return Or(tuple(negate(p) for p in f.parts))
    if isinstance(f, Or):
        return And(tuple(negate(p) for p in f.parts))
    if isinstance(f, Exists):
        return Forall(f.var, negate(f.body))
    return Exists(f.var, negate(f.body))


# --- classification -------------------------------------------------------

def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.body, Atom))


def _disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return [d for p in f.parts for d in _disjuncts(p)]
    return [f]


def is_basic_horn(f: Formula) -> bool:
    """A disjunction of literals with at most one of them un-negated (equality counts as atomic)."""
    lits = _disjuncts(f)
    if not all(_is_literal(l) for l in lits):
        return False
    return sum(isinstance(l, Atom) for l in lits) <= 1


def is_horn(f: Formula) -> bool:
    if is_basic_horn(f):
        return True
    if isinstance(f, And):
        return all(is_horn(p) for p in f.parts)
    if isinstance(f, (Exists, Forall)):
        return is_horn(f.body)
    return False


def is_positive(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return False
    if isinstance(f, (And, Or)):
        return all(is_positive(p) for p in f.parts)
    return is_positive(f.body)


# --- evaluation -----------------------------------------------------------

def _compile(f: Formula, X: BinaryStructure) -> Callable[[list], bool]:
    rel = X.relation
    universe = range(X.size)
    if isinstance(f, Rel):
        a, b = f.left, f.right
        return lambda env: (env[a], env[b]) in rel
    if isinstance(f, Eq):
        a, b = f.left, f.right
        return lambda env: env[a] == env[b]
    if isinstance(f, Not):
        g = _compile(f.body, X)
        return lambda env: not g(env)
    if isinstance(f, And):
        gs = [_compile(p, X) for p in f.parts]
        return lambda env: all(g(env) for g in gs)
    if isinstance(f, Or):
        gs = [_compile(p, X) for p in f.parts]
        return lambda env: any(g(env) for g in gs)
    g = _compile(f.body, X)
    v = f.var
    quant = any if isinstance(f, Exists) else all

    def run(env: list) -> bool:
        saved = env[v]
        try:
            return quant(g(_set(env, v, u)) for u in universe)
        finally:
            env[v] = saved

    return run


def _set(env: list, v: int, u: int) -> list:
    env[v] = u
    return env


def _max_var(f: Formula) -> int:
    if isinstance(f, Atom):
        return max(f.left, f.right)
    if isinstance(f, Not):
        return _max_var(f.body)
    if isinstance(f, (And, Or)):
        return max((_max_var(p) for p in f.parts), default=-1)
    return max(f.var, _max_var(f.body))


def miniscope(f: Formula) -> Formula:
    """Push quantifiers inward as far as they go; equivalent over nonempty universes.

    ``exists`` distributes over ``|`` and ``forall`` over ``&``; conjuncts
    (disjuncts) not mentioning the bound variable move outside its scope.
    """
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(miniscope(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(miniscope(p) for p in f.parts))
    body = miniscope(f.body)
    v, Q = f.var, type(f)
    if v not in free_vars(body):
        return body
    spread, split = (Or, And) if Q is Exists else (And, Or)
    if isinstance(body, spread):
        return spread(tuple(miniscope(Q(v, p)) for p in body.parts))
    if isinstance(body, split):
        inside = [p for p in body.parts if v in free_vars(p)]
        outside = [p for p in body.parts if v not in free_vars(p)]
        if outside:
            inner = Q(v, inside[0] if len(inside) == 1 else split(tuple(inside)))
            return split((*outside, inner))
    return Q(v, body)


def _bind(f: Formula, X: BinaryStructure, assignment: Sequence[Optional[int]]) -> list:
    for v in free_vars(f):
        if v >= len(assignment) or assignment[v] is None:
            raise FormulaError(f"free variable v{v} is unbound")
        X.check_element(assignment[v])
    return list(assignment) + [None] * max(0, _max_var(f) + 1 - len(assignment))


def evaluate(X: BinaryStructure, f: Formula, assignment: Sequence[Optional[int]] = ()) -> bool:
    env = _bind(f, X, assignment)
    return _compile(miniscope(f), X)(env)


def evaluate_naive(X: BinaryStructure, f: Formula, assignment: Sequence[Optional[int]] = ()) -> bool:
    """Direct Tarskian recursion on the formula as written (no rewriting)."""
    env = _bind(f, X, assignment)
    return _compile(f, X)(env)


# --- builders -------------------------------------------------------------

def build_dist_formula(n: int, x: int = 0, y: int = 1) -> Formula:
    """``d(x, y) <= n+1``: intermediate points z_0..z_{n-1}, one disjunct per orientation pattern."""
    if not 0 <= n <= MAX_DIST_N:
        raise FormulaError(f"n must be in 0..{MAX_DIST_N}")
    zs = [max(x, y) + 1 + k for k in range(n)]
    chain = [x, *zs, y]
    disjuncts = []
    for eps in itertools.product((0, 1), repeat=n + 1):
        steps = [
            Rel(a, b) if bit == 0 else Rel(b, a) for a, b, bit in zip(chain, chain[1:], eps)
        ]
        disjuncts.append(conj(*steps))
    body = disj(*disjuncts)
    for z in reversed(zs):
        body = Exists(z, body)
    return body


def build_conn_sentence(n: int) -> Formula:
    return Forall(0, Forall(1, build_dist_formula(n)))


# --- text syntax ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()~&|=,.]))")


def parse_formula(text: str) -> tuple[Formula, dict[str, int]]:
    """Parse ``R(x,y)``, ``x = y``, ``~``, ``&``, ``|``, ``exists x,y. ...``, ``forall x. ...``.

    Variable names get indices in order of first appearance; the mapping is returned.
    """
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos + 1)
        tok = m.group("name") or m.group("sym")
        tokens.append((tok, m.start(m.lastgroup) + 1))
        pos = m.end()
    names: dict[str, int] = {}
    p = _Parser(tokens, names, len(text) + 1)
    f = p.formula()
    if p.i != len(tokens):
        tok, col = tokens[p.i]
        raise FormulaSyntaxError(f"unexpected {tok!r}", col)
    return f, names


class _Parser:
    def __init__(self, tokens, names, end_col):
        self.tokens, self.names, self.end_col, self.i = tokens, names, end_col, 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def col(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else self.end_col

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise FormulaSyntaxError(f"expected {tok!r}", self.col())
        self.i += 1

    def var(self) -> int:
        tok = self.peek()
        if tok is None or not re.fullmatch(r"[A-Za-z_]\w*", tok) or tok in ("R", "exists", "forall"):
            raise FormulaSyntaxError("expected a variable", self.col())
        self.i += 1
        return self.names.setdefault(tok, len(self.names))

    def formula(self) -> Formula:
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.i += 1
            parts.append(self.conjunction())
        return disj(*parts)

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.i += 1
            parts.append(self.unary())
        return conj(*parts)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.i += 1
            return Not(self.unary())
        if tok in ("exists", "forall"):
            self.i += 1
            vs = [self.var()]
            while self.peek() == ",":
                self.i += 1
                vs.append(self.var())
            self.expect(".")
            body = self.formula()
            for v in reversed(vs):
                body = Exists(v, body) if tok == "exists" else Forall(v, body)
            return body
        if tok == "(":
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if tok == "R":
            self.i += 1
            self.expect("(")
            a = self.var()
            self.expect(",")
            b = self.var()
            self.expect(")")
            return Rel(a, b)
        a = self.var()
        self.expect("=")
        return Eq(a, self.var())


# --- preservation harnesses -----------------------------------------------

@dataclass(frozen=True)
class PreservationVerdict:
    hypothesis: bool
    conclusion: Optional[bool]
    violated: bool


def _assignment(f: Formula, values: Sequence[int]) -> list[Optional[int]]:
    fv = sorted(free_vars(f))
    if len(values) != len(fv):
        raise FormulaError(f"formula has {len(fv)} free variables, got {len(values)} values")
    env: list[Optional[int]] = [None] * (max(fv, default=-1) + 1)
    for v, a in zip(fv, values):
        env[v] = a
    return env


def check_horn_preservation(
    factors: Sequence[BinaryStructure],
    phi: Filter,
    f: Formula,
    points: Sequence[Sequence[int]],
    rp: Optional[ReducedProduct] = None,
) -> PreservationVerdict:
    """Falsification check: the filter-set hypothesis must force truth in the reduced product.

    ``points[k]`` is the product point assigned to the k-th free variable
    (by index). The product is built on the raw relations.
    """
    if not is_horn(f):
        raise FormulaError("formula is not Horn")
    _check_dims(factors, phi)
    points = [_check_point(factors, p) for p in points]
    holds = {
        lab
        for p, (lab, X) in enumerate(zip(phi.index, factors))
        if evaluate(X, f, _assignment(f, [pt[p] for pt in points]))
    }
    if not member(phi, holds):
        return PreservationVerdict(False, None, False)
    if rp is None:
        rp = build_reduced_product(factors, phi, reflexive=False)
    concl = evaluate(rp.quotient, f, _assignment(f, [rp.class_of(pt) for pt in points]))
    return PreservationVerdict(True, concl, not concl)


def check_positive_factor_preservation(
    factors: Sequence[BinaryStructure],
    phi: Filter,
    f: Formula,
    rp: Optional[ReducedProduct] = None,
) -> PreservationVerdict:
    """Falsification check: truth in the reduced product must hold on a filter set of factors."""
    if not is_sentence(f):
        raise FormulaError("formula must be a sentence")
    if not is_positive(f):
        raise FormulaError("formula is not positive")
    _check_dims(factors, phi)
    if rp is None:
        rp = build_reduced_product(factors, phi, reflexive=False)
    if not evaluate(rp.quotient, f):
        return PreservationVerdict(False, None, False)
    holds = {lab for lab, X in zip(phi.index, factors) if evaluate(X, f)}
    ok = member(phi, holds)
    return PreservationVerdict(True, ok, not ok)
