"""Line-oriented instance description language.

::

    # comments run to end of line
    structure P3 3
    edge 0 1
    edge 1 2
    structure D2 2
    index 2
    assign 0 P3
    assign 1 D2
    filter generators { {0,1} {0} }     # or: trivial | principal {0} | frechet | principal-cofinite {..}
    point x = (0,0)
    seq s constant 0                    # symbolic instances: constant c | affine a b
    seq t eventually (4,4) affine 1 2   #   | eventually (prefix) affine a b | eventually (prefix) constant c
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .filters import Filter, FilterError, ImproperFilterError, make_filter
from .structure import BinaryStructure
from .symbolic import SymbolicFilter, SymbolicSequence


class InstanceError(ValueError):
    code = "E_INSTANCE"

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "line": self.line, "column": self.column}


class SyntaxErrorAt(InstanceError):
    code = "E_SYNTAX"


class UnresolvedNameError(InstanceError):
    code = "E_UNRESOLVED"


class DimensionMismatchError(InstanceError):
    code = "E_DIMENSION"


class ImproperFilterSpecError(InstanceError):
    code = "E_IMPROPER_FILTER"


FINITE_FILTERS = ("generators", "trivial", "principal")
SYMBOLIC_FILTERS = ("frechet", "principal-cofinite")


@dataclass
class FilterSpec:
    kind: str
    sets: tuple[frozenset[int], ...] = ()


@dataclass
class InstanceSpec:
    structures: dict[str, BinaryStructure] = field(default_factory=dict)
    index_size: Optional[int] = None
    assignment: dict[int, str] = field(default_factory=dict)
    filter: Optional[FilterSpec] = None
    points: dict[str, tuple[int, ...]] = field(default_factory=dict)
    sequences: dict[str, SymbolicSequence] = field(default_factory=dict)
    allow_improper: bool = field(default=False, compare=False)

    @property
    def is_symbolic(self) -> bool:
        return bool(self.sequences) or (self.filter is not None and self.filter.kind in SYMBOLIC_FILTERS)

    @property
    def factors(self) -> list[BinaryStructure]:
        return [self.structures[self.assignment[i]] for i in range(self.index_size or 0)]

    def finite_filter(self) -> Filter:
        f = self.filter
        if f.kind == "trivial":
            return make_filter(self.index_size, [range(self.index_size)])
        return make_filter(self.index_size, f.sets, proper_required=not self.allow_improper)

    def symbolic_filter(self) -> SymbolicFilter:
        f = self.filter
        if f.kind == "frechet":
            return SymbolicFilter("frechet")
        if f.kind == "principal-cofinite":
            return SymbolicFilter("principal-cofinite", f.sets[0])
        if f.kind == "principal":
            return SymbolicFilter("principal", f.sets[0])
        raise InstanceError(f"filter {f.kind!r} has no symbolic reading")


_TOKEN = re.compile(r"(?P<int>-?\d+)|(?P<word>[A-Za-z_][\w\-]*)|(?P<sym>[{}(),=])|(?P<bad>\S)")


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[tuple[str, str, int]] = []
        for m in _TOKEN.finditer(text):
            kind = m.lastgroup
            if kind == "bad":
                raise SyntaxErrorAt(f"unexpected character {m.group()!r}", lineno, m.start() + 1)
            self.toks.append((kind, m.group(), m.start() + 1))
        self.i = 0
        self.end = len(text) + 1

    def col(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else self.end

    def err(self, msg: str, cls=SyntaxErrorAt, col: Optional[int] = None) -> InstanceError:
        return cls(msg, self.lineno, self.col() if col is None else col)

    def peek(self) -> Optional[str]:
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def word(self) -> str:
        if self.i >= len(self.toks) or self.toks[self.i][0] != "word":
            raise self.err("expected a name")
        self.i += 1
        return self.toks[self.i - 1][1]

    def int(self, minimum: Optional[int] = None) -> int:
        if self.i >= len(self.toks) or self.toks[self.i][0] != "int":
            raise self.err("expected an integer")
        v = int(self.toks[self.i][1])
        if minimum is not None and v < minimum:
            raise self.err(f"expected an integer >= {minimum}")
        self.i += 1
        return v

    def sym(self, s: str) -> None:
        if self.peek() != s:
            raise self.err(f"expected {s!r}")
        self.i += 1

    def int_list(self, open_: str, close: str) -> list[int]:
        self.sym(open_)
        out: list[int] = []
        if self.peek() != close:
            out.append(self.int(0))
            while self.peek() == ",":
                self.i += 1
                out.append(self.int(0))
        self.sym(close)
        return out

    def done(self) -> None:
        if self.i != len(self.toks):
            raise self.err(f"unexpected {self.peek()!r}")


def parse_instance(text: str, *, allow_improper: bool = False) -> InstanceSpec:
    spec = InstanceSpec(allow_improper=allow_improper)
    where: dict[str, tuple[int, int]] = {}
    current: Optional[str] = None
    edges: dict[str, set[tuple[int, int]]] = {}
    sizes: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        ln = _Line(raw.split("#", 1)[0], lineno)
        if not ln.toks:
            continue
        start_col = ln.col()
        kw = ln.word()
        if kw == "structure":
            col = ln.col()
            name = ln.word()
            if name in sizes:
                raise ln.err(f"structure {name!r} defined twice", col=col)
            sizes[name] = ln.int(1)
            edges[name] = set()
            current = name
        elif kw == "edge":
            if current is None:
                raise ln.err("edge before any structure", col=start_col)
            col = ln.col()
            u, v = ln.int(0), ln.int(0)
            if u >= sizes[current] or v >= sizes[current]:
                raise ln.err(f"edge ({u},{v}) outside {current!r} of size {sizes[current]}", DimensionMismatchError, col)
            edges[current].add((u, v))
        elif kw == "index":
            spec.index_size = ln.int(1)
            where["index"] = (lineno, start_col)
        elif kw == "assign":
            col = ln.col()
            i = ln.int(0)
            ncol = ln.col()
            name = ln.word()
            spec.assignment[i] = name
            where[f"assign:{i}"] = (lineno, col)
            where[f"name:{i}"] = (lineno, ncol)
        elif kw == "filter":
            col = ln.col()
            kind = ln.word()
            where["filter"] = (lineno, col)
            if kind in ("trivial", "frechet"):
                spec.filter = FilterSpec(kind)
            elif kind in ("principal", "principal-cofinite"):
                spec.filter = FilterSpec(kind, (frozenset(ln.int_list("{", "}")),))
            elif kind == "generators":
                ln.sym("{")
                sets = []
                while ln.peek() == "{":
                    sets.append(frozenset(ln.int_list("{", "}")))
                ln.sym("}")
                if not sets:
                    raise ln.err("at least one generator is required", col=col)
                spec.filter = FilterSpec(kind, tuple(sets))
            else:
                raise ln.err(f"unknown filter kind {kind!r}", col=col)
        elif kw == "point":
            name = ln.word()
            ln.sym("=")
            col = ln.col()
            spec.points[name] = tuple(ln.int_list("(", ")"))
            where[f"point:{name}"] = (lineno, col)
        elif kw == "seq":
            name = ln.word()
            spec.sequences[name] = _parse_seq(ln)
        else:
            raise ln.err(f"unknown keyword {kw!r}", col=start_col)
        ln.done()

    spec.structures = {n: BinaryStructure(sizes[n], frozenset(edges[n])) for n in sizes}
    _validate(spec, where)
    return spec


def _parse_seq(ln: _Line) -> SymbolicSequence:
    col = ln.col()
    kind = ln.word()
    prefix: list[int] = []
    if kind == "eventually":
        prefix = ln.int_list("(", ")")
        col = ln.col()
        kind = ln.word()
    if kind == "constant":
        a, b = 0, ln.int(0)
    elif kind == "affine":
        a, b = ln.int(0), ln.int()
    else:
        raise ln.err(f"unknown sequence kind {kind!r}", col=col)
    try:
        return SymbolicSequence(tuple(prefix), a, b)
    except ValueError as exc:
        raise ln.err(str(exc), col=col) from None


def _validate(spec: InstanceSpec, where: dict) -> None:
    n = spec.index_size
    for i, name in spec.assignment.items():
        if n is not None and i >= n:
            raise DimensionMismatchError(f"assign {i} outside index set of size {n}", *where[f"assign:{i}"])
        if name not in spec.structures:
            raise UnresolvedNameError(f"unknown structure {name!r}", *where[f"name:{i}"])
    if spec.filter is None:
        raise SyntaxErrorAt("missing filter declaration")
    fl, fc = where["filter"]
    if spec.is_symbolic:
        if spec.filter.kind not in ("frechet", "principal-cofinite", "principal"):
            raise SyntaxErrorAt(f"filter {spec.filter.kind!r} is not available for symbolic instances", fl, fc)
        if spec.filter.kind == "principal" and not spec.filter.sets[0]:
            raise ImproperFilterSpecError("principal filter with empty kernel", fl, fc)
        return
    if spec.index_size is None:
        raise SyntaxErrorAt("missing index declaration")
    missing = [i for i in range(n) if i not in spec.assignment]
    if missing:
        raise DimensionMismatchError(f"indices {missing} have no structure assigned", *where["index"])
    for s in spec.filter.sets:
        if any(i >= n for i in s):
            raise DimensionMismatchError(f"filter set {sorted(s)} outside index set of size {n}", fl, fc)
    try:
        spec.finite_filter()
    except ImproperFilterError as exc:
        raise ImproperFilterSpecError(str(exc), fl, fc) from None
    except FilterError as exc:
        raise SyntaxErrorAt(str(exc), fl, fc) from None
    for name, pt in spec.points.items():
        line, col = where[f"point:{name}"]
        if len(pt) != n:
            raise DimensionMismatchError(f"point {name!r} has {len(pt)} coordinates, expected {n}", line, col)
        for i, v in enumerate(pt):
            if v >= spec.factors[i].size:
                raise DimensionMismatchError(f"point {name!r}: coordinate {i} out of range", line, col)


def _set(s) -> str:
    return "{" + ",".join(map(str, sorted(s))) + "}"


def render_instance(spec: InstanceSpec) -> str:
    """Canonical text; ``parse_instance(render_instance(s)) == s``."""
    out = []
    for name, X in spec.structures.items():
        out.append(f"structure {name} {X.size}")
        out.extend(f"edge {u} {v}" for u, v in sorted(X.relation))
    if spec.index_size is not None:
        out.append(f"index {spec.index_size}")
    out.extend(f"assign {i} {spec.assignment[i]}" for i in sorted(spec.assignment))
    f = spec.filter
    if f is not None:
        if f.kind == "generators":
            out.append("filter generators { " + " ".join(_set(s) for s in f.sets) + " }")
        elif f.sets:
            out.append(f"filter {f.kind} {_set(f.sets[0])}")
        else:
            out.append(f"filter {f.kind}")
    for name, pt in spec.points.items():
        out.append(f"point {name} = (" + ",".join(map(str, pt)) + ")")
    for name, s in spec.sequences.items():
        head = f"seq {name} "
        if s.prefix:
            head += "eventually (" + ",".join(map(str, s.prefix)) + ") "
        tail = f"constant {s.intercept}" if s.slope == 0 else f"affine {s.slope} {s.intercept}"
        out.append(head + tail)
    return "\n".join(out) + "\n"
