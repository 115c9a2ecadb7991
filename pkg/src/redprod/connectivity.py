"""Connectivity of reduced products: a brute-force oracle and the filter criteria.

Two independent routes decide the same questions. The BFS route materializes
the quotient and searches it. The criterion route never looks at the quotient
graph; it only evaluates per-factor distances and filter membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .filters import Filter, member
from .products import (
    DEFAULT_CAP,
    Point,
    ReducedProduct,
    _check_dims,
    _check_point,
    build_reduced_product,
    equiv_mod_filter,
)
from .structure import (
    BinaryStructure,
    PathWitness,
    check_path,
    components,
    distance,
    distance_matrix,
    is_connected,
    oriented,
    satisfies_conn_formula,
    smallest_pattern_path,
)


def connected_bfs(rp: ReducedProduct) -> bool:
    return is_connected(rp.quotient)


def components_bfs(rp: ReducedProduct) -> list[frozenset[int]]:
    return components(rp.quotient)


def search_bound(factors: Sequence[BinaryStructure]) -> int:
    """Beyond this ``n`` all per-factor distance sets and ``A_n`` are stationary."""
    return max(X.size for X in factors)


@dataclass(frozen=True)
class DiameterStratification:
    A: dict[int, frozenset[int]]
    layers: dict[int, frozenset[int]]
    inf: frozenset[int]
    bound: int


def stratify(factors: Sequence[BinaryStructure], phi: Filter) -> DiameterStratification:
    _check_dims(factors, phi)
    bound = search_bound(factors)
    A: dict[int, frozenset[int]] = {}
    layers: dict[int, frozenset[int]] = {}
    prev: frozenset[int] = frozenset()
    for n in range(bound + 1):
        A[n] = frozenset(lab for lab, X in zip(phi.index, factors) if satisfies_conn_formula(X, n))
        layers[n] = A[n] - prev
        prev = A[n]
    return DiameterStratification(A, layers, phi.index_set - prev, bound)


@dataclass(frozen=True)
class ConditionBWitness:
    K: frozenset[int]
    n: int


def condition_b(factors: Sequence[BinaryStructure], phi: Filter) -> Optional[ConditionBWitness]:
    """A witness ``(K, n)`` for the finite-exception criterion, or None.

    Membership means containing the kernel, so ``K`` only has to cover
    ``kernel - A_n``; any witness shrinks to that canonical one. Among the
    canonical witnesses we return the one with fewest exceptions, then
    smallest ``n``.
    """
    strat = stratify(factors, phi)
    connected = {lab for lab, X in zip(phi.index, factors) if is_connected(X)}
    candidates = [
        (len(phi.kernel - strat.A[n]), n)
        for n in range(strat.bound + 1)
        if phi.kernel - strat.A[n] <= connected
    ]
    if not candidates:
        return None
    _, n = min(candidates)
    K = phi.kernel - strat.A[n]
    assert member(phi, strat.A[n] | K)
    return ConditionBWitness(K, n)


def _coordinate_distances(factors, x, y) -> list:
    return [distance(X, a, b) for X, a, b in zip(factors, x, y)]


def criterion_level(
    factors: Sequence[BinaryStructure], phi: Filter, x: Sequence[int], y: Sequence[int]
) -> Optional[int]:
    """Least ``n`` with ``{i : d(x_i, y_i) <= n+1}`` in the filter, or None."""
    _check_dims(factors, phi)
    x = _check_point(factors, x)
    y = _check_point(factors, y)
    dists = _coordinate_distances(factors, x, y)
    for n in range(search_bound(factors) + 1):
        if member(phi, {lab for lab, d in zip(phi.index, dists) if d <= n + 1}):
            return n
    return None


def connected_criterion(
    factors: Sequence[BinaryStructure], phi: Filter, x: Sequence[int], y: Sequence[int]
) -> bool:
    return criterion_level(factors, phi, x, y) is not None


def components_criterion(rp: ReducedProduct) -> list[frozenset[int]]:
    """Partition of quotient classes from the pairwise distance-set criterion alone."""
    factors, phi = rp.factors, rp.filter
    reps = np.array(rp.reps, dtype=np.int64).reshape(len(rp.classes), len(factors))
    big = np.iinfo(np.int64).max
    dmats = [
        np.array([[big if d == float("inf") else d for d in row] for row in distance_matrix(X)], dtype=np.int64)
        for X in factors
    ]
    sub = [D[np.ix_(reps[:, p], reps[:, p])] for p, D in enumerate(dmats)]
    kmask = sum(1 << p for p, lab in enumerate(phi.index) if lab in phi.kernel)
    linked = np.zeros((len(reps), len(reps)), dtype=bool)
    for n in range(search_bound(factors) + 1):
        masks = np.zeros_like(linked, dtype=np.int64)
        for p, S in enumerate(sub):
            masks |= (S <= n + 1).astype(np.int64) << p
        linked |= (masks & kmask) == kmask

    parts: list[frozenset[int]] = []
    seen = np.zeros(len(reps), dtype=bool)
    for a in range(len(reps)):
        if seen[a]:
            continue
        part = np.flatnonzero(linked[a])
        # the criterion must itself be an equivalence relation
        if not (linked[np.ix_(part, part)].all() and not linked[np.ix_(part, ~linked[a])].any()):
            raise AssertionError(f"criterion is not transitive at class {a}")
        seen[part] = True
        parts.append(frozenset(int(k) for k in part))
    return parts


@dataclass(frozen=True)
class Segment:
    """One application of path lifting: ``start rho^e0 t^0 ... t^{n-1} rho^en end``."""

    start: Point
    points: tuple[Point, ...]
    pattern: tuple[int, ...]
    end: Point
    over: frozenset[int]

    @property
    def chain(self) -> tuple[Point, ...]:
        return (self.start, *self.points, self.end)


class WitnessError(ValueError):
    pass


def lift_path(
    factors: Sequence[BinaryStructure],
    phi: Filter,
    x: Sequence[int],
    y: Sequence[int],
    A,
    pattern: Sequence[int],
    coordinate_witnesses: Mapping[int, Sequence[int]],
) -> Segment:
    """Lift coordinate paths sharing one orientation pattern to a path in the product.

    Coordinates outside ``A`` must already agree; they stay fixed while the
    ``A`` coordinates follow their own witnesses step by step.
    """
    _check_dims(factors, phi)
    x = _check_point(factors, x)
    y = _check_point(factors, y)
    A = frozenset(A)
    pattern = tuple(pattern)
    pos = {lab: p for p, lab in enumerate(phi.index)}
    if not A <= phi.index_set:
        raise WitnessError("A must be a subset of the index set")
    if any(x[p] != y[p] for lab, p in pos.items() if lab not in A):
        raise WitnessError("x and y must agree outside A")
    if set(coordinate_witnesses) != A:
        raise WitnessError("need exactly one coordinate witness per index in A")
    if not A:
        if pattern:
            raise WitnessError("empty A lifts to the empty segment")
        return Segment(x, (), (), y, A)
    n = len(pattern) - 1
    for lab in A:
        p = pos[lab]
        pts = tuple(coordinate_witnesses[lab])
        if len(pts) != n:
            raise WitnessError(f"coordinate {lab}: witness has {len(pts)} points, pattern needs {n}")
        try:
            w = PathWitness(pts, pattern)
        except ValueError as exc:
            raise WitnessError(str(exc)) from None
        if not check_path(factors[p], x[p], y[p], w):
            raise WitnessError(f"coordinate {lab}: not a path from {x[p]} to {y[p]} with this pattern")
    points = tuple(
        tuple(coordinate_witnesses[lab][m] if lab in A else x[p] for lab, p in pos.items())
        for m in range(n)
    )
    seg = Segment(x, points, pattern, y, A)
    assert validate_segment(factors, phi, seg)
    return seg


def quotient_step(factors, phi: Filter, a: Point, b: Point, bit: int) -> bool:
    """``[a] rho^bit [b]`` in the reduced product of the reflexivized factors."""
    holds = {
        lab
        for lab, X, ai, bi in zip(phi.index, factors, a, b)
        if ai == bi or oriented(X, ai, bi, bit)
    }
    return member(phi, holds)


def validate_segment(factors, phi: Filter, seg: Segment) -> bool:
    if not seg.pattern:
        return seg.start == seg.end and not seg.points
    if len(seg.pattern) != len(seg.points) + 1:
        return False
    ch = seg.chain
    return all(quotient_step(factors, phi, a, b, bit) for a, b, bit in zip(ch, ch[1:], seg.pattern))


@dataclass(frozen=True)
class ProductPathWitness:
    x: Point
    y: Point
    segments: tuple[Segment, ...] = field(default_factory=tuple)
    level: Optional[int] = None

    @property
    def length(self) -> int:
        return sum(len(s.pattern) for s in self.segments)

    @property
    def waypoints(self) -> list[Point]:
        if not self.segments:
            return [self.x]
        return [self.segments[0].start, *(s.end for s in self.segments)]

    def validate(self, factors, phi: Filter) -> bool:
        if not self.segments:
            return equiv_mod_filter(phi, self.x, self.y)
        if self.segments[0].start != self.x:
            return False
        for s, t in zip(self.segments, self.segments[1:]):
            if s.end != t.start:
                return False
        return all(validate_segment(factors, phi, s) for s in self.segments) and equiv_mod_filter(
            phi, self.segments[-1].end, self.y
        )


def build_path_witness(
    factors: Sequence[BinaryStructure], phi: Filter, x: Sequence[int], y: Sequence[int]
) -> Optional[ProductPathWitness]:
    """An explicit quotient path from ``[x]`` to ``[y]``, or None when they are disconnected.

    Coordinates within distance ``n+1`` are grouped by their chosen orientation
    pattern; each group is moved from ``x`` to ``y`` by one lifted segment,
    and the last waypoint agrees with ``y`` on a filter set.
    """
    _check_dims(factors, phi)
    x = _check_point(factors, x)
    y = _check_point(factors, y)
    if equiv_mod_filter(phi, x, y):
        return ProductPathWitness(x, y, (), None)
    n = criterion_level(factors, phi, x, y)
    if n is None:
        return None

    pos = {lab: p for p, lab in enumerate(phi.index)}
    chosen: dict[int, PathWitness] = {}
    for lab, p in pos.items():
        w = smallest_pattern_path(factors[p], x[p], y[p], n + 1)
        if w is not None:
            chosen[lab] = w
    A = frozenset(chosen)
    assert member(phi, A)

    by_pattern: dict[tuple[int, ...], set[int]] = {}
    for lab, w in chosen.items():
        by_pattern.setdefault(w.pattern, set()).add(lab)

    segments = []
    done: set[int] = set()
    prev = x
    for pattern in sorted(by_pattern):
        group = frozenset(by_pattern[pattern])
        done |= group
        nxt = tuple(y[p] if lab in done else x[p] for lab, p in pos.items())
        seg = lift_path(
            factors, phi, prev, nxt, group, pattern, {lab: chosen[lab].points for lab in group}
        )
        segments.append(seg)
        prev = nxt
    return ProductPathWitness(x, y, tuple(segments), n)


@dataclass(frozen=True)
class EquivalenceReport:
    bfs_connected: bool
    condition_b_witness: Optional[ConditionBWitness]

    @property
    def agree(self) -> bool:
        return self.bfs_connected == (self.condition_b_witness is not None)


def verify_equivalence(
    factors: Sequence[BinaryStructure], phi: Filter, *, cap: int = DEFAULT_CAP
) -> EquivalenceReport:
    rp = build_reduced_product(factors, phi, cap=cap)
    return EquivalenceReport(connected_bfs(rp), condition_b(factors, phi))
