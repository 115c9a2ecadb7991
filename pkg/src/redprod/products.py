"""Direct and reduced products of finite binary structures."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .filters import Filter, NotInFilterError, member, restrict, trivial_filter
from .structure import BinaryStructure, StructureError, reflexivize

DEFAULT_CAP = 10**6

Point = tuple[int, ...]


class ProductError(ValueError):
    pass


class DimensionError(ProductError):
    pass


class SizeCapError(ProductError):
    pass


class WellDefinednessError(ProductError):
    """The quotient relation depended on the choice of representatives."""


def _check_point(factors: Sequence[BinaryStructure], x: Sequence[int]) -> Point:
    if len(x) != len(factors):
        raise DimensionError(f"point has {len(x)} coordinates, expected {len(factors)}")
    for X, xi in zip(factors, x):
        try:
            X.check_element(xi)
        except StructureError as exc:
            raise DimensionError(str(exc)) from None
    return tuple(x)


def _check_dims(factors: Sequence[BinaryStructure], phi: Filter) -> None:
    if len(factors) != phi.index_size:
        raise DimensionError(f"{len(factors)} factors but the filter is on {phi.index_size} indices")


def agreement_set(phi: Filter, x: Sequence[int], y: Sequence[int]) -> frozenset[int]:
    """``{i : x_i = y_i}`` with coordinates labelled by the filter's index set."""
    return frozenset(lab for lab, a, b in zip(phi.index, x, y) if a == b)


def equiv_mod_filter(phi: Filter, x: Sequence[int], y: Sequence[int]) -> bool:
    if len(x) != len(y) or len(x) != phi.index_size:
        raise DimensionError("points must have one coordinate per index")
    return member(phi, agreement_set(phi, x, y))


def relation_set(
    factors: Sequence[BinaryStructure], phi: Filter, x: Sequence[int], y: Sequence[int], bit: int = 0
) -> frozenset[int]:
    """``{i : x_i rho_i^bit y_i}`` (relations taken as given)."""
    out = set()
    for lab, X, a, b in zip(phi.index, factors, x, y):
        if (X.holds(a, b) if bit == 0 else X.holds(b, a)):
            out.add(lab)
    return frozenset(out)


def _mask_matrix(mats: Sequence[np.ndarray], rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Bitmask over coordinate positions of ``rows[a] rho cols[b]``."""
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for p, M in enumerate(mats):
        out |= M[np.ix_(rows[:, p], cols[:, p])].astype(np.int64) << p
    return out


@dataclass(frozen=True, eq=False)
class ReducedProduct:
    """A materialized reduced product.

    ``factors`` are kept as given; ``working`` are the structures the
    quotient was built from (reflexivized unless ``reflexive`` is false).
    Class ``k`` has canonical representative ``reps[k]``, its lexicographically
    least tuple, and is vertex ``k`` of ``quotient``.
    """

    factors: tuple[BinaryStructure, ...]
    filter: Filter
    reflexive: bool
    working: tuple[BinaryStructure, ...]
    classes: tuple[tuple[Point, ...], ...]
    quotient: BinaryStructure
    _key_to_class: dict = field(repr=False)

    @property
    def reps(self) -> list[Point]:
        return [c[0] for c in self.classes]

    @property
    def n_tuples(self) -> int:
        return sum(len(c) for c in self.classes)

    @property
    def _kernel_positions(self) -> list[int]:
        k = self.filter.kernel
        return [p for p, lab in enumerate(self.filter.index) if lab in k]

    def class_of(self, x: Sequence[int]) -> int:
        x = _check_point(self.working, x)
        k = self._key_to_class[tuple(x[p] for p in self._kernel_positions)]
        assert equiv_mod_filter(self.filter, x, self.classes[k][0])
        return k

    def related(self, a: int, b: int) -> bool:
        return self.quotient.holds(a, b)


def build_reduced_product(
    factors: Sequence[BinaryStructure],
    phi: Filter,
    *,
    reflexive: bool = True,
    cap: int = DEFAULT_CAP,
) -> ReducedProduct:
    factors = tuple(factors)
    _check_dims(factors, phi)
    total = math.prod(X.size for X in factors)
    if total > cap:
        raise SizeCapError(f"product has {total} tuples, cap is {cap}")
    working = tuple(reflexivize(X) for X in factors) if reflexive else factors

    # x ~ y iff the agreement set contains the kernel, i.e. iff x, y agree on it.
    kpos = [p for p, lab in enumerate(phi.index) if lab in phi.kernel]
    groups: dict[Point, list[Point]] = {}
    for t in itertools.product(*(X.universe for X in working)):
        groups.setdefault(tuple(t[p] for p in kpos), []).append(t)
    # product() enumerates lexicographically, so each group is sorted and
    # its first tuple is the canonical representative.
    ordered = sorted(groups.items(), key=lambda kv: kv[1][0])
    classes = tuple(tuple(members) for _, members in ordered)
    key_to_class = {key: k for k, (key, _) in enumerate(ordered)}
    for cls in classes:
        for t in cls:
            if not equiv_mod_filter(phi, t, cls[0]):
                raise WellDefinednessError("class grouping disagrees with ~_Phi")

    mats = [_relation_matrix(X) for X in working]
    kmask = sum(1 << p for p in kpos)
    reps = np.array([c[0] for c in classes], dtype=np.int64).reshape(len(classes), len(working))
    masks = _mask_matrix(mats, reps, reps)
    Q = (masks & kmask) == kmask
    _verify_well_defined(mats, kmask, classes, Q)

    rel = frozenset((int(a), int(b)) for a, b in np.argwhere(Q))
    quotient = BinaryStructure(len(classes), rel)
    return ReducedProduct(factors, phi, reflexive, working, classes, quotient, key_to_class)


def _relation_matrix(X: BinaryStructure) -> np.ndarray:
    M = np.zeros((X.size, X.size), dtype=bool)
    for u, v in X.relation:
        M[u, v] = True
    return M


_EXHAUSTIVE_LIMIT = 2048


def _verify_well_defined(mats, kmask: int, classes, Q: np.ndarray) -> None:
    if sum(len(c) for c in classes) <= _EXHAUSTIVE_LIMIT:
        tuples = np.array([t for c in classes for t in c], dtype=np.int64).reshape(-1, len(mats))
        owner = np.array([k for k, c in enumerate(classes) for _ in c])
        full = (_mask_matrix(mats, tuples, tuples) & kmask) == kmask
        ok = np.array_equal(full, Q[np.ix_(owner, owner)])
    else:
        # Compare against the lexicographically greatest member of each class.
        alt = np.array([c[-1] for c in classes], dtype=np.int64).reshape(len(classes), len(mats))
        ok = np.array_equal((_mask_matrix(mats, alt, alt) & kmask) == kmask, Q)
    if not ok:
        raise WellDefinednessError("quotient relation depends on representatives")


def build_direct_product(
    factors: Sequence[BinaryStructure], *, reflexive: bool = True, cap: int = DEFAULT_CAP
) -> ReducedProduct:
    return build_reduced_product(factors, trivial_filter(len(factors)), reflexive=reflexive, cap=cap)


@dataclass(frozen=True)
class RestrictionIso:
    source: ReducedProduct
    target: ReducedProduct
    J: frozenset[int]
    mapping: dict[int, int]

    def __call__(self, k: int) -> int:
        return self.mapping[k]


def restrict_iso(rp: ReducedProduct, J, *, cap: int = DEFAULT_CAP) -> RestrictionIso:
    """The map ``[x] -> [x|J]`` onto the product over the restricted filter."""
    J = frozenset(J)
    if not member(rp.filter, J):
        raise NotInFilterError(f"J={sorted(J)} is not in the filter")
    sub = restrict(rp.filter, J)
    positions = [p for p, lab in enumerate(rp.filter.index) if lab in J]
    target = build_reduced_product(
        [rp.factors[p] for p in positions], sub, reflexive=rp.reflexive, cap=cap
    )
    mapping = {k: target.class_of(tuple(rep[p] for p in positions)) for k, rep in enumerate(rp.reps)}
    return RestrictionIso(rp, target, J, mapping)


def is_isomorphism(src: BinaryStructure, dst: BinaryStructure, mapping: dict[int, int]) -> bool:
    """Bijective and relation-preserving in both directions."""
    if sorted(mapping) != list(src.universe) or sorted(mapping.values()) != list(dst.universe):
        return False
    image = {(mapping[a], mapping[b]) for a, b in src.relation}
    return image == set(dst.relation)
