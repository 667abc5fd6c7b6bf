"""Exact linear algebra against independent reference oracles."""
import itertools

import numpy as np
import pytest

from matprobe import (
    DenseMatrix,
    PrimeField,
    ZeroMatrix,
    jacobi_singular_values,
    matrix_entropy,
    rank_exact,
    schatten_norm,
    singular_values,
    stable_rank,
)
from oracles_ref import charpoly_singular_values, minor_rank_batch


GF2 = PrimeField(2)
GF3 = PrimeField(3)


def test_rank_gf2_exhaustive_4x4_vs_minor_oracle():
    bits = np.arange(2**16, dtype=np.int64)
    shifts = np.arange(16)
    As = ((bits[:, None] >> shifts[None, :]) & 1).reshape(-1, 4, 4)
    expected = minor_rank_batch(As, 2)
    got = np.array([rank_exact(DenseMatrix(A, field=GF2)) for A in As])
    assert np.array_equal(got, expected)


@pytest.mark.parametrize("n,trials", [(4, 200), (5, 200)])
def test_rank_gf3_random_vs_minor_oracle(rng, n, trials):
    As = rng.integers(0, 3, size=(trials, n, n), dtype=np.int64)
    expected = minor_rank_batch(As, 3)
    got = np.array([rank_exact(DenseMatrix(A, field=GF3)) for A in As])
    assert np.array_equal(got, expected)


def test_rank_real_examples(rng):
    assert rank_exact(DenseMatrix(np.zeros((3, 3)))) == 0
    assert rank_exact(DenseMatrix(np.eye(5))) == 5
    u = rng.standard_normal(6)
    v = rng.standard_normal(6)
    assert rank_exact(DenseMatrix(np.outer(u, v))) == 1
    U = rng.standard_normal((8, 3))
    V = rng.standard_normal((8, 3))
    assert rank_exact(DenseMatrix(U @ V.T)) == 3


def test_singular_values_vs_charpoly_oracle(rng):
    for _ in range(20):
        A = rng.standard_normal((6, 6))
        sv = singular_values(DenseMatrix(A)).singular_values
        ref = charpoly_singular_values(A)
        assert np.allclose(sv, ref, rtol=1e-6, atol=1e-8 * sv[0])


def test_singular_values_vs_jacobi_reference(rng):
    for shape in [(6, 6), (8, 5), (5, 8)]:
        A = rng.standard_normal(shape)
        sv = singular_values(DenseMatrix(A)).singular_values
        ref = jacobi_singular_values(A)
        k = min(shape)
        assert np.allclose(sv[:k], ref[:k], rtol=1e-8)


def test_spectral_summary_invariants(rng):
    A = rng.standard_normal((7, 7))
    s = singular_values(DenseMatrix(A))
    assert np.all(np.diff(s.singular_values) <= 1e-12)
    assert s.operator == s.singular_values[0]
    assert s.frobenius == pytest.approx(np.linalg.norm(A), rel=1e-12)


def test_singular_values_rejects_field_matrices():
    with pytest.raises(ValueError):
        singular_values(DenseMatrix(np.eye(2, dtype=np.int64), field=GF2))


def test_schatten_examples(rng):
    A = rng.standard_normal((6, 6))
    M = DenseMatrix(A)
    assert schatten_norm(M, 2) == pytest.approx(np.linalg.norm(A), rel=1e-10)
    # p = 6 against the matrix-power trace oracle: tr((A^T A)^3)^(1/6)
    B = A.T @ A
    ref = np.trace(B @ B @ B) ** (1.0 / 6.0)
    assert schatten_norm(M, 6) == pytest.approx(ref, rel=1e-10)
    # p -> large approaches sigma_1 without overflow
    assert schatten_norm(M, 400) == pytest.approx(
        singular_values(M).operator, rel=1e-2)
    assert schatten_norm(DenseMatrix(np.zeros((3, 3))), 4) == 0.0
    with pytest.raises(ValueError):
        schatten_norm(M, 0.5)


def test_stable_rank_examples(rng):
    assert stable_rank(DenseMatrix(np.eye(5))) == pytest.approx(5.0, rel=1e-12)
    assert stable_rank(DenseMatrix(np.ones((8, 8)))) == pytest.approx(1.0, rel=1e-12)
    u = rng.standard_normal(9)
    assert stable_rank(DenseMatrix(np.outer(u, u))) == pytest.approx(1.0, rel=1e-10)
    A = rng.standard_normal((10, 10))
    sr = stable_rank(DenseMatrix(A))
    assert 1.0 <= sr <= rank_exact(DenseMatrix(A)) + 1e-9
    with pytest.raises(ZeroMatrix):
        stable_rank(DenseMatrix(np.zeros((4, 4))))


def test_entropy_of_scaled_orthogonal_is_log_n(rng):
    n = 16
    G = rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(G)
    H = matrix_entropy(DenseMatrix(np.sqrt(n) * Q))
    assert H == pytest.approx(np.log(n), abs=1e-8)


def test_entropy_scaling_identity(rng):
    # H(beta * A) = H(A) - ln(beta^2) whenever both inputs are admissible
    n = 8
    A = 0.5 * rng.standard_normal((n, n))
    A *= 0.9 * n / singular_values(DenseMatrix(A)).operator
    M = DenseMatrix(A)
    beta = 0.3
    H1 = matrix_entropy(M)
    H2 = matrix_entropy(DenseMatrix(beta * A))
    assert H2 == pytest.approx(H1 - np.log(beta**2), abs=1e-8)


def test_entropy_rank_one_extreme_is_zero():
    n = 12
    u = np.ones(n)
    M = DenseMatrix(np.outer(u, u) / 1.0)  # sigma_1 = n exactly
    assert matrix_entropy(M) == pytest.approx(0.0, abs=1e-12)


def test_entropy_preconditions():
    with pytest.raises(ValueError):
        matrix_entropy(DenseMatrix(np.ones((2, 3))))
    with pytest.raises(ValueError):
        matrix_entropy(DenseMatrix(10.0 * np.eye(3)))  # sigma_1 > n
    with pytest.raises(ZeroMatrix):
        matrix_entropy(DenseMatrix(np.zeros((3, 3))))


def test_jacobi_handles_zero_matrix():
    assert np.array_equal(jacobi_singular_values(np.zeros((4, 4))), np.zeros(4))
