import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwiretap.errors import (
    BudgetExceeded,
    IndivisibleDomain,
    NotPrime,
    RankDeficient,
    SizeMismatch,
)
from qwiretap.gf import (
    GFMatrix,
    ToeplitzEnsemble,
    all_injective_ensemble,
    all_vectors,
    check_prime,
    code_pair,
    code_pair_c1_ensemble,
    default_z,
    field_multiplier_ensemble,
    gf_rank,
    gf_solve,
    hash_family,
    index_vector,
    irreducible_polynomial,
    nested_toeplitz_c1_ensemble,
    span_contains,
    toeplitz_injective_ensemble,
    toeplitz_submodule_ensemble,
    vector_index,
    verify_condition,
)

primes = st.sampled_from([2, 3, 5])


@given(primes, st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_rank_is_transpose_invariant(q, r, c, seed):
    A = np.random.default_rng(seed).integers(0, q, size=(r, c))
    assert gf_rank(A, q) == gf_rank(A.T, q) <= min(r, c)


@given(primes, st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_solve_recovers_a_solution(q, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, q, size=(n + 1, n))
    x = rng.integers(0, q, size=n)
    b = A @ x % q
    sol = gf_solve(A, b, q)
    assert sol is not None
    assert np.array_equal(A @ sol % q, b)


@given(primes, st.integers(1, 4))
def test_vector_index_roundtrip(q, n):
    V = all_vectors(q, n)
    assert V.shape == (q**n, n)
    idx = vector_index(V.T, q)
    assert np.array_equal(idx, np.arange(q**n))
    assert np.array_equal(index_vector(q**n - 1, q, n), np.full(n, q - 1))
    # first coordinate is most significant
    assert np.array_equal(index_vector(q ** (n - 1), q, n), np.eye(n, dtype=int)[0])


def test_matrix_ops():
    A = GFMatrix(3, [[1, 2], [0, 1]])
    B = GFMatrix(3, [[1, 1], [0, 1]])
    assert (A @ B) == GFMatrix(3, [[1, 0], [0, 1]])
    assert A.rank() == 2
    assert sorted(GFMatrix(2, [[1], [1]]).image().tolist()) == [0, 3]


def test_check_prime():
    assert check_prime(3) == 3
    with pytest.raises(NotPrime):
        check_prime(4)


@given(primes, st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_toeplitz_is_constant_on_diagonals(q, r, c, seed):
    ens = ToeplitzEnsemble(q, r, c)
    vec = np.random.default_rng(seed).integers(0, q, size=ens.free_entries)
    T = ens.matrix(vec).entries
    for i in range(1, r):
        for j in range(1, c):
            assert T[i, j] == T[i - 1, j - 1]
    assert ens.size == q ** (r + c - 1)


@pytest.mark.parametrize("q,k,l1,l2", [(2, 3, 2, 1), (2, 4, 3, 1), (3, 3, 2, 1), (2, 4, 2, 2)])
def test_code_pair_nested_with_right_dimensions(q, k, l1, l2):
    for X in ToeplitzEnsemble(q, k - l2, l2).enumerate():
        C1, C2 = code_pair(q, k, l1, l2, X, default_z(q, k, l1, l2))
        assert C1.rank() == l1 and C2.rank() == l2
        assert span_contains(C1, C2)


def test_code_pair_errors():
    X = ToeplitzEnsemble(2, 2, 1).matrix([0, 0])
    with pytest.raises(RankDeficient):
        code_pair(2, 3, 2, 1, X, GFMatrix(2, np.zeros((2, 1), dtype=int)))
    with pytest.raises(SizeMismatch):
        code_pair(2, 3, 2, 1, X, GFMatrix(2, np.ones((3, 1), dtype=int)))
    with pytest.raises(SizeMismatch):
        code_pair(2, 3, 1, 2, X, GFMatrix(2, np.ones((2, 1), dtype=int)))


@pytest.mark.parametrize("q,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_irreducible_polynomial_has_no_roots(q, k):
    f = irreducible_polynomial(q, k)
    assert f[-1] == 1 and len(f) == k + 1
    for x in range(q):
        assert sum(int(c) * x**i for i, c in enumerate(f)) % q != 0


# ---- conditions: exact values


@pytest.mark.parametrize("q,k,l", [(2, 2, 1), (2, 3, 2), (3, 2, 1), (2, 4, 2)])
def test_field_multiplier_spread_is_exact(q, k, l):
    r = verify_condition("spread", field_multiplier_ensemble(q, k, l))
    assert r.passed
    assert r.worst == pytest.approx(1 / (q**k - 1), abs=1e-15)


def test_toeplitz_injective_violates_spread():
    # (X'; X) with X' invertible and X Toeplitz does not spread 1 evenly
    r = verify_condition("spread", toeplitz_injective_ensemble(2, 2, 1))
    assert not r.passed
    assert r.worst == pytest.approx(0.5, abs=1e-15)
    assert r.bound == pytest.approx(1 / 3)


def test_all_injective_spread():
    r = verify_condition("spread", all_injective_ensemble(2, 3, 2))
    assert r.passed


def test_submodule_cover():
    r = verify_condition("cover", toeplitz_submodule_ensemble(2, 3, 1))
    assert r.passed
    assert r.bound == pytest.approx(2 / 8)


def test_fixed_z_c1_fails_cover_nested_variant_passes():
    assert not verify_condition("cover", code_pair_c1_ensemble(2, 3, 2, 1)).passed
    assert verify_condition("cover", nested_toeplitz_c1_ensemble(2, 3, 2, 1)).passed


def test_partition_permutation_collision():
    fam = hash_family("partition_permutation", domain=4, M=2)
    r = verify_condition("collision", fam)
    assert fam.size == 24
    assert r.passed
    assert r.worst == pytest.approx(1 / 3)


def test_toeplitz_hash_families():
    assert verify_condition("collision", hash_family("toeplitz", q=2, n=3, m=2)).passed
    r = verify_condition("balanced", hash_family("toeplitz_2c", q=3, l1=3, l2=1))
    assert r.passed


def test_explicit_family_collision_failure():
    fam = hash_family("explicit", tables=[[0, 0, 1, 1]], M=2)
    r = verify_condition("collision", fam)
    assert not r.passed and r.worst == 1.0


def test_family_errors():
    with pytest.raises(IndivisibleDomain):
        hash_family("partition_permutation", domain=5, M=2)
    with pytest.raises(BudgetExceeded):
        verify_condition("spread", all_injective_ensemble(2, 4, 2), budget=10)
    with pytest.raises(ValueError):
        verify_condition("nonsense", field_multiplier_ensemble(2, 2, 1))
