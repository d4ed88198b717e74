import numpy as np
import pytest

from qgelab.quat import (Quaternion, QuaternionMatrix, StructureViolation,
                         conjugacy_class, embed, extract_quaternionic,
                         quat_mul, structure_defect, symplectic_j)

RNG = np.random.default_rng(20240607)

I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)
ONE = Quaternion(1, 0, 0, 0)


def random_quaternion(rng=RNG):
    return Quaternion(*rng.standard_normal(4))


def test_multiplication_table():
    assert quat_mul(I, J) == K
    assert quat_mul(J, I) == -K
    assert quat_mul(J, K) == I
    assert quat_mul(K, J) == -I
    assert quat_mul(K, I) == J
    assert quat_mul(I, K) == -J
    for unit in (I, J, K):
        assert quat_mul(unit, unit) == -ONE


def test_identity_element():
    q = Quaternion(2, 3, -1, 0.5)
    assert quat_mul(q, ONE) == q
    assert quat_mul(ONE, q) == q


def test_product_expansion():
    # (1+i)(1+j) = 1 + i + j + k from coordinate multiplication
    assert quat_mul(Quaternion(1, 1, 0, 0), Quaternion(1, 0, 1, 0)) == \
        Quaternion(1, 1, 1, 1)


def test_norm_multiplicative():
    for _ in range(200):
        p, q = random_quaternion(), random_quaternion()
        assert abs((p * q).norm() - p.norm() * q.norm()) < 1e-12


def test_associativity():
    for _ in range(100):
        p, q, r = (random_quaternion() for _ in range(3))
        lhs = (p * q) * r
        rhs = p * (q * r)
        assert max(abs(lhs.a - rhs.a), abs(lhs.b - rhs.b),
                   abs(lhs.c - rhs.c), abs(lhs.d - rhs.d)) < 1e-12


def test_conjugacy_class_real_point():
    cc = conjugacy_class(Quaternion(3, 0, 0, 0))
    assert cc.center == 3 and cc.radius == 0


def test_conjugacy_class_radius():
    cc = conjugacy_class(Quaternion(1, 2, 2, 1))
    assert cc.center == 1
    assert abs(cc.radius - 3.0) < 1e-15  # sqrt(4 + 4 + 1)


def test_conjugacy_class_of_i():
    cc = conjugacy_class(I)
    assert cc.center == 0 and cc.radius == 1


def test_conjugacy_class_invariant_under_conjugation():
    for _ in range(50):
        lam = random_quaternion()
        q = random_quaternion()
        conj = q.inverse() * lam * q
        cc0, cc1 = conjugacy_class(lam), conjugacy_class(conj)
        assert abs(cc0.center - cc1.center) < 1e-10
        assert abs(cc0.radius - cc1.radius) < 1e-10


def test_embed_real_unit():
    m = QuaternionMatrix.from_entries([[ONE]])
    assert np.allclose(embed(m), np.eye(2))


def test_embed_j_block():
    # the 2x2 representation of j; multiplicativity forces this sign layout
    m = QuaternionMatrix.from_entries([[J]])
    assert np.allclose(embed(m), np.array([[0, 1], [-1, 0]]))
    assert np.allclose(embed(m), symplectic_j(1))


def test_embed_scalar_blocks_satisfy_relations():
    bi, bj, bk = I.block(), J.block(), K.block()
    assert np.allclose(bi @ bj, bk)
    assert np.allclose(bj @ bk, bi)
    assert np.allclose(bk @ bi, bj)
    assert np.allclose(bi @ bi, -np.eye(2))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_embed_ring_homomorphism(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(100):
        a = QuaternionMatrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)),
                             rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        b = QuaternionMatrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)),
                             rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        assert np.abs(embed(a @ b) - embed(a) @ embed(b)).max() < 1e-12 * n
        assert np.allclose(embed(a) + embed(b), embed(QuaternionMatrix(a.z + b.z, a.w + b.w)))


def test_structure_test_on_embeddings():
    rng = np.random.default_rng(7)
    for n in (1, 3):
        q = QuaternionMatrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)),
                             rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        assert structure_defect(embed(q)) == 0.0


def test_extract_round_trip():
    rng = np.random.default_rng(8)
    q = QuaternionMatrix(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
                         rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    m = embed(q)
    back = extract_quaternionic(m)
    assert np.allclose(back.z, q.z) and np.allclose(back.w, q.w)
    assert np.allclose(embed(back), m)


def test_extract_identity():
    q = extract_quaternionic(np.eye(4, dtype=complex))
    assert np.allclose(q.z, np.eye(2)) and np.allclose(q.w, 0)


def test_extract_rejects_unstructured():
    with pytest.raises(StructureViolation):
        extract_quaternionic(np.ones((2, 2), dtype=complex))


def test_structure_invariant_via_j_conjugation():
    rng = np.random.default_rng(9)
    n = 2
    q = QuaternionMatrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)),
                         rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    m = embed(q)
    j = symplectic_j(n)
    assert np.abs(j @ m.conj() @ np.linalg.inv(j) - m).max() < 1e-14


def test_conj_transpose_matches_embedding():
    rng = np.random.default_rng(10)
    q = QuaternionMatrix(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
                         rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    assert np.allclose(embed(q.conj_transpose()), embed(q).conj().T)


def test_frobenius_norm_matches_embedding():
    rng = np.random.default_rng(11)
    q = QuaternionMatrix(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)),
                         rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    assert abs(q.frobenius_norm() - np.linalg.norm(embed(q))) < 1e-12
