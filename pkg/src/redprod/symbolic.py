"""Symbolic reduced powers of the linear graph on the naturals.

Elements of the power are eventually-affine sequences ``i -> a*i + b`` (after
a finite explicit prefix). Every set of indices this module produces is
finite or cofinite, so membership in the supported filters is decidable.
Connectivity of two elements is decided by the distance-set criterion, which
is valid for every filter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .structure import BinaryStructure, satisfies_conn_formula


class SymbolicError(ValueError):
    pass


def gdist(x: int, y: int) -> int:
    """Shortest-path distance in the linear graph: ``|x - y|``."""
    return abs(x - y)


@dataclass(frozen=True)
class SymbolicSequence:
    prefix: tuple[int, ...] = ()
    slope: int = 0
    intercept: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        if self.slope < 0:
            raise SymbolicError("slope must be >= 0")
        if any(v < 0 for v in self.prefix) or self.slope * len(self.prefix) + self.intercept < 0:
            raise SymbolicError("sequence values must be natural numbers")

    @classmethod
    def constant(cls, c: int) -> SymbolicSequence:
        return cls((), 0, c)

    @classmethod
    def affine(cls, a: int, b: int) -> SymbolicSequence:
        return cls((), a, b)

    @classmethod
    def eventually_affine(cls, prefix: Sequence[int], a: int, b: int) -> SymbolicSequence:
        return cls(tuple(prefix), a, b)

    def __call__(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.slope * i + self.intercept

    def describe(self) -> str:
        tail = f"{self.intercept}" if self.slope == 0 else f"{self.slope}*i+{self.intercept}"
        if self.prefix:
            return f"[{','.join(map(str, self.prefix))}] then {tail}"
        return tail


def Constant(c: int) -> SymbolicSequence:
    return SymbolicSequence.constant(c)


def Affine(a: int, b: int) -> SymbolicSequence:
    return SymbolicSequence.affine(a, b)


def EventuallyAffine(prefix: Sequence[int], a: int, b: int) -> SymbolicSequence:
    return SymbolicSequence.eventually_affine(prefix, a, b)


@dataclass(frozen=True)
class IndexSet:
    """A finite set of naturals, or (``cofinite=True``) the complement of one."""

    elements: frozenset[int] = frozenset()
    cofinite: bool = False

    @classmethod
    def finite(cls, elems: Iterable[int]) -> IndexSet:
        return cls(frozenset(elems), False)

    @classmethod
    def omega(cls) -> IndexSet:
        return cls(frozenset(), True)

    @classmethod
    def empty(cls) -> IndexSet:
        return cls(frozenset(), False)

    @property
    def is_finite(self) -> bool:
        return not self.cofinite

    @property
    def missing(self) -> frozenset[int]:
        """Complement of a cofinite set."""
        if not self.cofinite:
            raise SymbolicError("complement of a finite set is infinite")
        return self.elements

    def __contains__(self, i: int) -> bool:
        return (i in self.elements) != self.cofinite

    def complement(self) -> IndexSet:
        return IndexSet(self.elements, not self.cofinite)

    def __and__(self, other: IndexSet) -> IndexSet:
        if self.cofinite and other.cofinite:
            return IndexSet(self.elements | other.elements, True)
        if self.cofinite:
            return IndexSet(other.elements - self.elements, False)
        if other.cofinite:
            return IndexSet(self.elements - other.elements, False)
        return IndexSet(self.elements & other.elements, False)

    def __or__(self, other: IndexSet) -> IndexSet:
        return (self.complement() & other.complement()).complement()

    def __le__(self, other: IndexSet) -> bool:
        return (self & other.complement()) == IndexSet.empty()

    def describe(self) -> str:
        body = "{" + ",".join(map(str, sorted(self.elements))) + "}"
        if self.cofinite:
            return "omega" if not self.elements else f"omega minus {body}"
        return body


DefinableIndexSet = IndexSet


@dataclass(frozen=True)
class SymbolicFilter:
    """``frechet``: cofinite sets; ``principal-cofinite``: supersets of
    ``omega - excluded``; ``principal``: supersets of a finite kernel."""

    kind: str
    finite_set: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "finite_set", frozenset(self.finite_set))
        if self.kind not in ("frechet", "principal-cofinite", "principal"):
            raise SymbolicError(f"unknown filter kind {self.kind!r}")
        if self.kind == "principal" and not self.finite_set:
            raise SymbolicError("principal filter needs a nonempty kernel")

    def contains(self, S: IndexSet) -> bool:
        if self.kind == "frechet":
            return S.cofinite
        if self.kind == "principal-cofinite":
            return S.cofinite and S.missing <= self.finite_set
        return all(i in S for i in self.finite_set)

    @property
    def contains_all_cofinite(self) -> bool:
        return self.kind == "frechet"

    def describe(self) -> str:
        if self.kind == "frechet":
            return "frechet"
        return f"{self.kind} " + "{" + ",".join(map(str, sorted(self.finite_set))) + "}"


def Frechet() -> SymbolicFilter:
    return SymbolicFilter("frechet")


def PrincipalCofinite(excluded: Iterable[int]) -> SymbolicFilter:
    return SymbolicFilter("principal-cofinite", frozenset(excluded))


def PrincipalFinite(kernel: Iterable[int]) -> SymbolicFilter:
    return SymbolicFilter("principal", frozenset(kernel))


def _tail_start(x: SymbolicSequence, y: SymbolicSequence) -> int:
    return max(len(x.prefix), len(y.prefix))


def distance_set(x: SymbolicSequence, y: SymbolicSequence, m: int) -> IndexSet:
    """``{i : |x(i) - y(i)| <= m}``."""
    start = _tail_start(x, y)
    head = {i for i in range(start) if gdist(x(i), y(i)) <= m}
    alpha = x.slope - y.slope
    beta = x.intercept - y.intercept
    if alpha == 0:
        if abs(beta) <= m:
            return IndexSet(frozenset(i for i in range(start) if i not in head), True)
        return IndexSet.finite(head)
    # |alpha*i + beta| <= m  <=>  (-m - beta)/alpha <= i <= (m - beta)/alpha  (alpha > 0 wlog)
    if alpha < 0:
        alpha, beta = -alpha, -beta
    lo = max(start, -((m + beta) // alpha))  # ceil((-m - beta) / alpha)
    hi = (m - beta) // alpha
    return IndexSet.finite(head | set(range(lo, hi + 1)))


@dataclass(frozen=True)
class Certificate:
    connected: bool
    case: str
    n: Optional[int] = None
    obstruction: Optional[str] = None
    distance_sets: tuple[tuple[int, str], ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "connected": self.connected,
            "case": self.case,
            "n": self.n,
            "obstruction": self.obstruction,
            "distance_sets": [{"n": n, "set": s} for n, s in self.distance_sets],
        }


def _sample_sets(x, y, upto: int) -> tuple[tuple[int, str], ...]:
    return tuple((n, distance_set(x, y, n + 1).describe()) for n in range(upto + 1))


def symbolic_connected(
    x: SymbolicSequence, y: SymbolicSequence, phi: SymbolicFilter, show: int = 4
) -> Certificate:
    """Decide whether some distance set ``{i : d(x_i, y_i) <= n+1}`` lies in ``phi``."""
    start = _tail_start(x, y)
    if phi.kind == "principal":
        worst = max(gdist(x(i), y(i)) for i in phi.finite_set)
        n = max(0, worst - 1)
        assert phi.contains(distance_set(x, y, n + 1))
        return Certificate(True, "principal kernel: finitely many coordinates", n, None, _sample_sets(x, y, n))

    if x.slope != y.slope:
        return Certificate(
            False,
            "slope mismatch: every distance set is finite",
            None,
            f"|x(i)-y(i)| grows like {abs(x.slope - y.slope)}*i, so no distance set is cofinite",
            _sample_sets(x, y, show),
        )
    gap = abs(x.intercept - y.intercept)
    if phi.kind == "frechet":
        worst = gap
        case = "equal slopes, bounded difference: distance sets cofinite from n0"
    else:
        # indices outside the excluded set must all lie in the distance set
        outside_head = [i for i in range(start) if i not in phi.finite_set]
        worst = max([gap, *(gdist(x(i), y(i)) for i in outside_head)])
        case = "equal slopes: distance set covers omega minus the excluded set from n0"
    n = max(0, worst - 1)
    assert phi.contains(distance_set(x, y, n + 1))
    assert n == 0 or not phi.contains(distance_set(x, y, n))
    return Certificate(True, case, n, None, _sample_sets(x, y, n))


@dataclass(frozen=True)
class DisconnectionTrace:
    x: SymbolicSequence
    y: SymbolicSequence
    steps: tuple[str, ...]
    distance_sets: tuple[tuple[int, IndexSet], ...]


def frechet_disconnection_witness(show: int = 6) -> tuple[SymbolicSequence, SymbolicSequence, DisconnectionTrace]:
    """A pair of elements of the power of the linear graph that no cofinite-containing filter connects.

    ``x = 0`` and ``y(i) = i + 2`` put ``d(x_i, y_i) = i + 2 > i + 1`` on the
    layer ``{i}``: each distance set ``{i : i + 2 <= n + 1}`` is the finite
    interval ``{0..n-1}``.
    """
    x, y = Constant(0), Affine(1, 2)
    sets = tuple((n, distance_set(x, y, n + 1)) for n in range(show + 1))
    for n, S in sets:
        assert S.is_finite and S == IndexSet.finite(range(n))
    steps = (
        "x = constant 0, y = i -> i + 2",
        "d(x_i, y_i) = i + 2, so index i needs n >= i + 1",
        "distance set for n is {0, ..., n-1}: finite for every n",
        "a filter containing all cofinite sets, or a non-principal ultrafilter, has no finite member",
        "so no distance set is in the filter and [x], [y] lie in different components",
    )
    return x, y, DisconnectionTrace(x, y, steps, sets)


def homogeneous_profile(X: BinaryStructure) -> dict[int, IndexSet]:
    """Which indices satisfy the n-th bounded-diameter sentence in a power of ``X`` (all or none)."""
    return {
        n: IndexSet.omega() if satisfies_conn_formula(X, n) else IndexSet.empty()
        for n in range(X.size + 1)
    }


def linear_graph_profile(upto: int = 16) -> dict[int, IndexSet]:
    """The linear graph has infinite diameter: no index satisfies any bounded-diameter sentence."""
    return {n: IndexSet.empty() for n in range(upto + 1)}


def remark_b_prime_check(profile: Mapping[int, IndexSet], phi: SymbolicFilter) -> bool:
    """Whether some ``{i : X_i satisfies the n-th bounded-diameter sentence}`` is in ``phi``.

    Only meaningful for filters containing every cofinite set. ``profile`` is
    read as stationary beyond its largest key.
    """
    if not phi.contains_all_cofinite:
        raise SymbolicError("the simplified criterion needs a filter containing all cofinite sets")
    return any(phi.contains(S) for S in profile.values())
