"""Finite binary structures and single-structure connectivity notions.

Every distance/connectivity operation here works on the reflexivization of
the relation; raw-relation semantics live in :mod:`redprod.formulas`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

INF = math.inf

Distance = Union[int, float]
"""A natural number, or ``INF`` when no finite path exists."""


class StructureError(ValueError):
    """Raised for malformed structures or out-of-range elements."""


@dataclass(frozen=True)
class BinaryStructure:
    """A finite structure ``<{0..size-1}, relation>``."""

    size: int
    relation: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 1:
            raise StructureError(f"universe must be nonempty, got size={self.size!r}")
        rel = frozenset((int(u), int(v)) for u, v in self.relation)
        for u, v in rel:
            if not (0 <= u < self.size and 0 <= v < self.size):
                raise StructureError(f"pair ({u},{v}) outside universe of size {self.size}")
        object.__setattr__(self, "relation", rel)

    @classmethod
    def from_edges(cls, size: int, edges: Iterable[tuple[int, int]] = ()) -> BinaryStructure:
        return cls(size, frozenset(edges))

    @property
    def universe(self) -> range:
        return range(self.size)

    def holds(self, u: int, v: int) -> bool:
        return (u, v) in self.relation

    def check_element(self, u: int) -> None:
        if not (isinstance(u, int) and 0 <= u < self.size):
            raise StructureError(f"element {u!r} not in universe of size {self.size}")

    def __repr__(self) -> str:
        return f"BinaryStructure({self.size}, {sorted(self.relation)})"


@dataclass(frozen=True)
class PathWitness:
    """Intermediate points ``z_0..z_{n-1}`` and an orientation pattern of length n+1.

    Bit 0 steps along the relation, bit 1 along its inverse.
    """

    points: tuple[int, ...]
    pattern: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "pattern", tuple(self.pattern))
        if len(self.pattern) != len(self.points) + 1:
            raise StructureError("pattern must be exactly one longer than points")
        if any(b not in (0, 1) for b in self.pattern):
            raise StructureError("orientation bits must be 0 or 1")

    @property
    def length(self) -> int:
        return len(self.pattern)


# Named small structures used throughout tests and examples.
def linear_path(n: int, symmetric: bool = False) -> BinaryStructure:
    """The path 0 -> 1 -> ... -> n-1 (both orientations if ``symmetric``)."""
    edges = {(i, i + 1) for i in range(n - 1)}
    if symmetric:
        edges |= {(j, i) for i, j in edges}
    return BinaryStructure(n, frozenset(edges))


E2 = BinaryStructure(2, frozenset({(0, 1)}))
E2REV = BinaryStructure(2, frozenset({(1, 0)}))
D2 = BinaryStructure(2)
P3 = linear_path(3)


def reflexivize(X: BinaryStructure) -> BinaryStructure:
    return BinaryStructure(X.size, X.relation | {(u, u) for u in X.universe})


def symmetrize(X: BinaryStructure) -> BinaryStructure:
    return BinaryStructure(X.size, X.relation | {(v, u) for u, v in X.relation})


def oriented(X: BinaryStructure, u: int, v: int, bit: int) -> bool:
    """``u rho^bit v`` in the raw relation."""
    return (u, v) in X.relation if bit == 0 else (v, u) in X.relation


def check_path(X: BinaryStructure, x: int, y: int, w: PathWitness) -> bool:
    X.check_element(x)
    X.check_element(y)
    for z in w.points:
        X.check_element(z)
    R = reflexivize(X)
    chain = (x, *w.points, y)
    return all(oriented(R, a, b, bit) for a, b, bit in zip(chain, chain[1:], w.pattern))


def _neighbours(X: BinaryStructure) -> list[list[int]]:
    """Adjacency of the symmetrized reflexivization (loops omitted)."""
    adj: list[set[int]] = [set() for _ in X.universe]
    for u, v in X.relation:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return [sorted(a) for a in adj]


def bfs_distances(X: BinaryStructure, source: int) -> list[Distance]:
    X.check_element(source)
    adj = _neighbours(X)
    dist: list[Distance] = [INF] * X.size
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] == INF:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distance_matrix(X: BinaryStructure) -> list[list[Distance]]:
    return [bfs_distances(X, s) for s in X.universe]


def distance(X: BinaryStructure, x: int, y: int) -> Distance:
    X.check_element(y)
    return bfs_distances(X, x)[y]


def components(X: BinaryStructure) -> list[frozenset[int]]:
    """Components as a list of classes, ordered by their least element."""
    adj = _neighbours(X)
    seen = [False] * X.size
    parts = []
    for s in X.universe:
        if seen[s]:
            continue
        seen[s] = True
        stack, part = [s], [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
                    part.append(v)
        parts.append(frozenset(part))
    return parts


def is_connected(X: BinaryStructure) -> bool:
    return len(components(X)) == 1


def diameter(X: BinaryStructure) -> Distance:
    return max(max(row) for row in distance_matrix(X))


def satisfies_conn_formula(X: BinaryStructure, n: int) -> bool:
    """Whether every two points are joined by a path of length <= n+1."""
    if n < 0:
        raise StructureError("n must be a natural number")
    return diameter(X) <= n + 1


def smallest_pattern_path(X: BinaryStructure, x: int, y: int, length: int) -> PathWitness | None:
    """The lexicographically least-pattern path of exactly ``length`` steps, if any.

    Greedy over bits: a prefix is kept when some node it reaches is still
    within the remaining step budget of ``y``; reflexive loops absorb slack.
    Points are recovered backwards choosing the least admissible predecessor.
    """
    if length < 1:
        raise StructureError("paths have length >= 1")
    X.check_element(x)
    R = reflexivize(X)
    to_y = bfs_distances(X, y)
    if to_y[x] > length:
        return None

    succ: list[list[set[int]]] = [[set() for _ in X.universe] for _ in (0, 1)]
    for u, v in R.relation:
        succ[0][u].add(v)
        succ[1][v].add(u)

    layers = [{x}]
    bits: list[int] = []
    for k in range(length):
        remaining = length - k - 1
        for bit in (0, 1):
            nxt = set().union(*(succ[bit][u] for u in layers[-1]))
            if any(to_y[v] <= remaining for v in nxt):
                break
        bits.append(bit)
        layers.append(nxt)

    chain = [y]
    for k in range(length - 1, 0, -1):
        v = chain[-1]
        chain.append(min(u for u in layers[k] if oriented(R, u, v, bits[k])))
    points = tuple(reversed(chain[1:]))
    return PathWitness(points, tuple(bits))
