import itertools

import pytest
from hypothesis import given, strategies as st

from oracles import filter_members_by_closure
from redprod.filters import (
    FilterError,
    ImproperFilterError,
    NotInFilterError,
    is_ultrafilter,
    kernel,
    make_filter,
    member,
    restrict,
    trivial_filter,
)


def subsets(n):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def test_make_filter_examples():
    f = make_filter(3, [{0, 1}, {1, 2}])
    assert f.kernel == {1}
    # frozen from exhaustive upward closure
    expected = {frozenset(s) for s in ({1}, {0, 1}, {1, 2}, {0, 1, 2})}
    assert filter_members_by_closure(3, [{0, 1}, {1, 2}]) == expected
    assert set(f.members()) == expected
    assert set(trivial_filter(3).members()) == {frozenset({0, 1, 2})}
    with pytest.raises(ImproperFilterError):
        make_filter(2, [{0}, {1}])
    assert not make_filter(2, [{0}, {1}], proper_required=False).is_proper


def test_make_filter_rejects_bad_generators():
    with pytest.raises(FilterError):
        make_filter(2, [{3}])
    with pytest.raises(FilterError):
        make_filter(2, [])
    with pytest.raises(FilterError):
        make_filter(0, [set()])


def test_member_examples():
    assert member(make_filter(3, [{1}]), {1, 2})
    assert not member(make_filter(3, [{0, 1}]), {1})
    assert not member(make_filter(3, [{0, 1}]), set())


def test_kernel_examples():
    assert kernel(make_filter(3, [{0, 1}, {1, 2}])) == {1}
    assert kernel(trivial_filter(3)) == {0, 1, 2}
    assert kernel(make_filter(4, [{2}, {2, 3}, {1, 2}])) == {2}


def test_restrict_examples():
    f = make_filter(3, [{1}])
    g = restrict(f, {1, 2})
    assert g.index_set == {1, 2} and g.kernel == {1}
    # frozen: Phi ∩ P(J) by intersecting member lists
    assert set(g.members()) == {s for s in f.members() if s <= {1, 2}} == {frozenset({1}), frozenset({1, 2})}
    assert set(restrict(f, {0, 1, 2}).members()) == set(f.members())
    with pytest.raises(NotInFilterError):
        restrict(make_filter(3, [{0, 1}]), {2})


def test_ultrafilter_examples():
    assert is_ultrafilter(make_filter(3, [{1}]))
    assert not is_ultrafilter(make_filter(3, [{0, 1}]))
    assert not is_ultrafilter(trivial_filter(2))


def _exactly_one_side(f):
    n = f.index_size
    return all(member(f, A) != member(f, frozenset(range(n)) - A) for A in subsets(n))


def test_ultrafilter_matches_exhaustive_side_check():
    for n in range(1, 5):
        for K in subsets(n):
            if K:
                f = make_filter(n, [K])
                assert is_ultrafilter(f) == _exactly_one_side(f)


gen_family = st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.sets(st.integers(0, n - 1)), min_size=1, max_size=4))
)


@given(gen_family)
def test_kernel_description_equals_closure(nf):
    n, gens = nf
    f = make_filter(n, gens, proper_required=False)
    assert set(f.members()) == filter_members_by_closure(n, gens)
    assert {A for A in subsets(n) if member(f, A)} == filter_members_by_closure(n, gens)


@given(gen_family)
def test_members_closed_under_intersection_and_superset(nf):
    n, gens = nf
    f = make_filter(n, gens, proper_required=False)
    mem = [A for A in subsets(n) if member(f, A)]
    for A in mem:
        for B in mem:
            assert member(f, A & B)
        for B in subsets(n):
            if A <= B:
                assert member(f, B)


@given(gen_family, st.data())
def test_restriction_agrees_with_membership(nf, data):
    n, gens = nf
    f = make_filter(n, gens, proper_required=False)
    J = data.draw(st.sampled_from([A for A in subsets(n) if member(f, A) and A]))
    g = restrict(f, J)
    for A in subsets(n):
        if A <= J:
            assert member(g, A) == member(f, A)
