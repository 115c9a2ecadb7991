import pytest
from hypothesis import given, strategies as st

from redprod.fuzz import trial_rng, truncation_trial
from redprod.structure import D2, E2, P3, linear_path
from redprod.symbolic import (
    Affine,
    Constant,
    EventuallyAffine,
    Frechet,
    IndexSet,
    PrincipalCofinite,
    PrincipalFinite,
    SymbolicError,
    distance_set,
    frechet_disconnection_witness,
    gdist,
    homogeneous_profile,
    linear_graph_profile,
    remark_b_prime_check,
    symbolic_connected,
)

HORIZON = 60


def test_gdist_examples():
    assert gdist(3, 3) == 0
    assert gdist(0, 7) == 7
    assert gdist(5, 2) == 3


def test_distance_set_examples():
    assert distance_set(Constant(0), Constant(7), 7) == IndexSet.omega()
    # frozen by solving i + 2 <= 5
    assert distance_set(Constant(0), Affine(1, 2), 5) == IndexSet.finite({0, 1, 2, 3})
    assert distance_set(Affine(1, 0), Affine(1, 4), 3) == IndexSet.empty()
    assert distance_set(Affine(1, 0), Affine(1, 4), 4) == IndexSet.omega()


def test_symbolic_connected_examples():
    c = symbolic_connected(Affine(1, 0), Affine(1, 4), Frechet())
    assert c.connected and c.n == 3
    c = symbolic_connected(Constant(0), Affine(1, 2), Frechet())
    assert not c.connected and c.obstruction
    c = symbolic_connected(Constant(0), Affine(1, 2), PrincipalFinite({5}))
    assert c.connected and c.n == 6


def test_frechet_witness_examples():
    x, y, trace = frechet_disconnection_witness()
    assert not symbolic_connected(x, y, Frechet()).connected
    assert all(S.is_finite for _, S in trace.distance_sets)
    for k in range(8):
        c = symbolic_connected(x, y, PrincipalFinite({k}))
        assert c.connected and c.n == k + 1
    assert not symbolic_connected(Constant(5), Affine(1, 2), Frechet()).connected


def test_remark_b_prime_examples():
    for X in (E2, P3, linear_path(5, symmetric=True)):
        assert remark_b_prime_check(homogeneous_profile(X), Frechet())
    assert not remark_b_prime_check(homogeneous_profile(D2), Frechet())
    assert not remark_b_prime_check(linear_graph_profile(), Frechet())
    with pytest.raises(SymbolicError):
        remark_b_prime_check(homogeneous_profile(E2), PrincipalFinite({0}))
    with pytest.raises(SymbolicError):
        remark_b_prime_check(homogeneous_profile(E2), PrincipalCofinite({0}))


def test_sequence_validation():
    with pytest.raises(SymbolicError):
        Affine(-1, 0)
    with pytest.raises(SymbolicError):
        EventuallyAffine([-1], 0, 0)
    assert EventuallyAffine([4, 4], 1, 0)(1) == 4
    assert EventuallyAffine([4, 4], 1, 0)(5) == 5


def test_principal_cofinite_connected():
    x, y = EventuallyAffine([9], 1, 0), Affine(1, 1)
    assert symbolic_connected(x, y, PrincipalCofinite({0})).n == 0
    assert symbolic_connected(x, y, PrincipalCofinite(set())).n == 7


sequences = st.one_of(
    st.builds(Constant, st.integers(0, 8)),
    st.builds(Affine, st.integers(0, 3), st.integers(0, 8)),
    st.builds(EventuallyAffine, st.lists(st.integers(0, 8), min_size=1, max_size=4), st.integers(0, 3), st.integers(0, 8)),
)
index_sets = st.builds(IndexSet, st.frozensets(st.integers(0, 10), max_size=5), st.booleans())


@given(sequences, sequences, st.integers(0, 12))
def test_distance_set_matches_pointwise(x, y, m):
    S = distance_set(x, y, m)
    for i in range(HORIZON):
        assert (i in S) == (gdist(x(i), y(i)) <= m)
    if S.cofinite:
        assert x.slope == y.slope


@given(sequences, sequences, st.integers(0, 12))
def test_distance_set_monotone(x, y, m):
    assert distance_set(x, y, m) <= distance_set(x, y, m + 1)


@given(index_sets, index_sets)
def test_index_set_algebra_pointwise(A, B):
    for i in range(15):
        assert (i in A & B) == (i in A and i in B)
        assert (i in A | B) == (i in A or i in B)
        assert (i in A.complement()) == (i not in A)
    assert (A <= B) == all((i not in A) or (i in B) for i in range(15))


@given(sequences, sequences)
def test_frechet_iff_equal_slopes(x, y):
    assert symbolic_connected(x, y, Frechet()).connected == (x.slope == y.slope)


@given(sequences, sequences, st.frozensets(st.integers(0, 8), min_size=1, max_size=3))
def test_principal_always_connected_at_pointwise_level(x, y, K):
    c = symbolic_connected(x, y, PrincipalFinite(K))
    worst = max(gdist(x(i), y(i)) for i in K)
    assert c.connected and c.n == max(0, worst - 1)


@given(sequences, sequences)
def test_certificate_level_is_least(x, y):
    c = symbolic_connected(x, y, Frechet())
    if c.connected:
        assert Frechet().contains(distance_set(x, y, c.n + 1))
        assert c.n == 0 or not Frechet().contains(distance_set(x, y, c.n))


@pytest.mark.parametrize("trial", range(20))
def test_truncation_agrees(trial):
    assert truncation_trial(trial_rng(7, trial))["agree"]
