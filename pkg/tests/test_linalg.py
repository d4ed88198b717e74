import numpy as np
import pytest

from qgelab.linalg import (NearDefective, Singular, eigen_full, frobenius_norm,
                           invert, pair_conjugates, solve)
from qgelab.quat import QuaternionMatrix, embed, extract_quaternionic


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_quaternion_matrix(rng, n):
    return QuaternionMatrix(random_complex(rng, n), random_complex(rng, n))


def test_eigen_diag():
    es = eigen_full(np.diag([1 + 1j, 2.0]))
    assert sorted(es.values, key=lambda v: v.real) == [1 + 1j, 2 + 0j]
    # eigenvectors are the standard basis up to phase
    assert np.allclose(np.abs(es.right_vectors), np.eye(2))


def test_eigen_jordan_block_near_defective():
    with pytest.raises(NearDefective):
        eigen_full(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigen_values_only_skips_vector_checks():
    es = eigen_full(np.array([[0.0, 1.0], [0.0, 0.0]]), want_vectors=False)
    assert np.allclose(es.values, 0)
    assert es.right_vectors is None


def test_biorthogonality_and_residuals():
    rng = np.random.default_rng(3)
    for n in (4, 8, 32):
        a = random_complex(rng, n)
        es = eigen_full(a)
        gram = es.left_vectors @ es.right_vectors
        assert np.abs(gram - np.eye(n)).max() < 1e-8
        assert es.residuals.max() < 1e-9


def test_conjugate_pairing_on_embeddings():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        q = random_quaternion_matrix(rng, n)
        values = np.linalg.eigvals(embed(q))
        reps, residual = pair_conjugates(values)
        worst = max(worst, residual)
        assert reps.size == n and (reps.imag >= 0).all()
    assert worst < 1e-7


def test_pairing_rejects_odd_count():
    with pytest.raises(ValueError):
        pair_conjugates(np.array([1j, 2j, 3j]))


def test_frobenius_identity_and_examples():
    assert frobenius_norm(np.eye(4)) == 2.0
    assert frobenius_norm(np.array([[0, 3.0], [0, 0]])) == 3.0
    rng = np.random.default_rng(5)
    a = random_complex(rng, 6)
    assert abs(frobenius_norm(a) ** 2 - np.trace(a.conj().T @ a).real) < 1e-10


def test_frobenius_inequality():
    rng = np.random.default_rng(6)
    for _ in range(50):
        a = random_complex(rng, 5)
        values = np.linalg.eigvals(a)
        assert frobenius_norm(a) ** 2 >= (np.abs(values) ** 2).sum() - 1e-10


def test_invert_examples():
    assert np.allclose(invert(np.eye(3, dtype=complex)), np.eye(3))
    inv = invert(np.diag([2.0, 4j]))
    assert np.allclose(inv, np.diag([0.5, -0.25j]))


def test_invert_singular():
    with pytest.raises(Singular):
        invert(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_invert_residual():
    rng = np.random.default_rng(7)
    a = random_complex(rng, 12)
    err = frobenius_norm(a @ invert(a) - np.eye(12))
    assert err < 1e-10 * np.linalg.cond(a)


def test_solve_matches_invert():
    rng = np.random.default_rng(8)
    a = random_complex(rng, 6)
    b = random_complex(rng, 6)
    assert np.allclose(solve(a, b), invert(a) @ b)


def test_inverse_preserves_quaternionic_structure():
    rng = np.random.default_rng(9)
    q = random_quaternion_matrix(rng, 4)
    inv = invert(embed(q))
    back = extract_quaternionic(inv)  # raises if the structure broke
    assert np.abs(embed(back) - inv).max() < 1e-10
