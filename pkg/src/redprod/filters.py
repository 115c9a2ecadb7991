"""Filters on finite index sets.

On a finite set every filter is principal, so a filter is fully described by
its kernel (the intersection of its generators); membership is a superset test.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterable, Iterator


class FilterError(ValueError):
    pass


class ImproperFilterError(FilterError):
    """The generators have empty intersection, so the filter contains the empty set."""


class NotInFilterError(FilterError):
    pass


@dataclass(frozen=True)
class Filter:
    index: tuple[int, ...]
    generators: tuple[frozenset[int], ...]
    proper_required: bool = True

    def __post_init__(self) -> None:
        if not self.index:
            raise FilterError("index set must be nonempty")
        if not self.generators:
            raise FilterError("at least one generator is required")
        universe = set(self.index)
        for g in self.generators:
            if not g <= universe:
                raise FilterError(f"generator {sorted(g)} is not a subset of the index set")
        if self.proper_required and not self.kernel:
            raise ImproperFilterError(
                "generators " + " ".join(_fmt(g) for g in self.generators) + " have empty intersection"
            )

    @property
    def index_size(self) -> int:
        return len(self.index)

    @property
    def index_set(self) -> frozenset[int]:
        return frozenset(self.index)

    @property
    def kernel(self) -> frozenset[int]:
        return frozenset.intersection(*self.generators)

    @property
    def is_proper(self) -> bool:
        return bool(self.kernel)

    def __contains__(self, A: Iterable[int]) -> bool:
        return member(self, A)

    def members(self) -> Iterator[frozenset[int]]:
        """All member sets (exponential; for tests and small displays)."""
        k = self.kernel
        rest = sorted(self.index_set - k)
        for extra in chain.from_iterable(combinations(rest, r) for r in range(len(rest) + 1)):
            yield k | frozenset(extra)


def _fmt(s: Iterable[int]) -> str:
    return "{" + ",".join(map(str, sorted(s))) + "}"


def make_filter(
    index_size: int, generators: Iterable[Iterable[int]], proper_required: bool = True
) -> Filter:
    if index_size < 1:
        raise FilterError("index_size must be >= 1")
    gens = tuple(frozenset(g) for g in generators)
    return Filter(tuple(range(index_size)), gens, proper_required)


def trivial_filter(index_size: int) -> Filter:
    """The minimal filter ``{I}``; reduced products over it are direct products."""
    return make_filter(index_size, [range(index_size)])


def principal_filter(index_size: int, kernel: Iterable[int], proper_required: bool = True) -> Filter:
    return make_filter(index_size, [kernel], proper_required)


def member(phi: Filter, A: Iterable[int]) -> bool:
    return phi.kernel <= frozenset(A)


def kernel(phi: Filter) -> frozenset[int]:
    return phi.kernel


def restrict(phi: Filter, J: Iterable[int]) -> Filter:
    """``phi`` restricted to ``P(J)``; requires ``J`` to be a member."""
    J = frozenset(J)
    if not J <= phi.index_set:
        raise FilterError(f"{_fmt(J)} is not a subset of the index set")
    if not member(phi, J):
        raise NotInFilterError(f"{_fmt(J)} is not in the filter (kernel {_fmt(phi.kernel)})")
    return Filter(tuple(sorted(J)), (phi.kernel,), phi.proper_required)


def is_ultrafilter(phi: Filter) -> bool:
    return len(phi.kernel) == 1
