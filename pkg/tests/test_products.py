import itertools
import math

import pytest
from hypothesis import given, strategies as st

from conftest import instances, structures
from oracles import brute_reduced_product
from redprod.filters import NotInFilterError, make_filter, member, trivial_filter
from redprod.products import (
    DimensionError,
    SizeCapError,
    build_direct_product,
    build_reduced_product,
    equiv_mod_filter,
    is_isomorphism,
    restrict_iso,
)
from redprod.structure import D2, E2, P3, distance, is_connected, reflexivize


def test_equiv_mod_filter_examples():
    f = make_filter(3, [{0, 1}])
    assert equiv_mod_filter(f, (0, 1, 2), (0, 1, 3))
    assert not equiv_mod_filter(trivial_filter(2), (0, 0), (0, 1))
    assert equiv_mod_filter(trivial_filter(2), (1, 0), (1, 0))
    with pytest.raises(DimensionError):
        equiv_mod_filter(f, (0, 1), (0, 1, 2))


def test_reduced_product_fact_example():
    f = make_filter(3, [{0, 1}])
    rp = build_reduced_product([E2, E2, P3], f)
    assert len(rp.classes) == 4
    iso = restrict_iso(rp, {0, 1})
    assert len(iso.target.classes) == 4
    assert is_isomorphism(rp.quotient, iso.target.quotient, iso.mapping)


def test_direct_square_of_edge():
    rp = build_reduced_product([E2, E2], trivial_filter(2))
    assert len(rp.classes) == 4
    assert is_connected(rp.quotient)
    # frozen from path enumeration on the brute-force quotient: (0,1) and (1,0)
    # need opposite orientations, so they sit at distance 2
    expected = [[0, 1, 1, 1], [1, 0, 2, 1], [1, 2, 0, 1], [1, 1, 1, 0]]
    assert [[distance(rp.quotient, a, b) for b in range(4)] for a in range(4)] == expected


def test_unary_product_is_reflexivization():
    for X in (E2, P3, D2):
        rp = build_reduced_product([X], trivial_filter(1))
        assert rp.quotient == reflexivize(X)


def test_direct_product_examples():
    assert len(build_direct_product([P3, E2]).classes) == 6
    assert len(build_direct_product([D2, D2]).classes) == 4
    assert len(build_direct_product([E2]).classes) == 2


def test_size_cap():
    with pytest.raises(SizeCapError):
        build_direct_product([P3, P3, P3], cap=26)
    assert len(build_direct_product([P3, P3, P3], cap=27).classes) == 27


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        build_reduced_product([E2], trivial_filter(2))


def test_restrict_iso_examples():
    rp = build_reduced_product([E2, E2, P3], make_filter(3, [{0, 1}]))
    full = restrict_iso(rp, {0, 1, 2})
    assert full.mapping == {k: k for k in range(4)}
    with pytest.raises(NotInFilterError):
        restrict_iso(rp, {0, 2})


def test_class_of_canonical_rep():
    rp = build_reduced_product([E2, E2, P3], make_filter(3, [{0, 1}]))
    assert rp.reps == [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)]
    assert rp.class_of((1, 0, 2)) == 2


@given(instances(), st.booleans())
def test_quotient_matches_brute_force(inst, reflexive):
    factors, phi = inst
    rp = build_reduced_product(factors, phi, reflexive=reflexive)
    classes, rel = brute_reduced_product(factors, set(phi.members()), reflexive)
    assert [list(c) for c in rp.classes] == classes
    assert rp.quotient.relation == rel


@given(instances())
def test_classes_partition_tuple_space(inst):
    factors, phi = inst
    rp = build_reduced_product(factors, phi)
    seen = [t for c in rp.classes for t in c]
    assert sorted(seen) == list(itertools.product(*(range(X.size) for X in factors)))
    assert len(rp.classes) == math.prod(factors[i].size for i in phi.kernel)
    for k, c in enumerate(rp.classes):
        assert all(rp.class_of(t) == k for t in c)


@given(instances(), st.data())
def test_restriction_isomorphism(inst, data):
    factors, phi = inst
    J = data.draw(st.sampled_from(sorted((s for s in phi.members() if s), key=sorted)))
    rp = build_reduced_product(factors, phi)
    iso = restrict_iso(rp, J)
    assert is_isomorphism(rp.quotient, iso.target.quotient, iso.mapping)


@given(st.lists(structures(3), min_size=1, max_size=3))
def test_direct_product_is_coordinatewise(factors):
    rp = build_direct_product(factors)
    assert len(rp.classes) == math.prod(X.size for X in factors)
    R = [reflexivize(X) for X in factors]
    for a, b in itertools.product(range(len(rp.classes)), repeat=2):
        s, t = rp.reps[a], rp.reps[b]
        assert rp.related(a, b) == all(X.holds(u, v) for X, u, v in zip(R, s, t))


def test_is_isomorphism_rejects_non_bijection():
    assert not is_isomorphism(E2, E2, {0: 0, 1: 0})
    assert not is_isomorphism(E2, E2, {0: 1, 1: 0})
    assert is_isomorphism(E2, E2, {0: 0, 1: 1})
    assert member(trivial_filter(1), {0})
