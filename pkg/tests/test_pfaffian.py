import math

import numpy as np
import pytest

from qgelab.pfaffian import (AsymmetricG, FactorialOverflow, MixedPolynomial,
                             NotSkew, OddSize, RadialPolynomial, SizeTooLarge,
                             debruijn_lhs_bruteforce, debruijn_pair_matrix,
                             debruijn_rhs, gaussian_mixed_moment, moment_matrix,
                             pfaffian, pfaffian_naive, product_statistic,
                             product_statistic_log)


def random_skew(rng, m):
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return a - a.T


def test_naive_two_by_two():
    assert pfaffian_naive(np.array([[0, 5.0], [-5.0, 0]])) == pytest.approx(5.0)


def test_naive_four_by_four_formula():
    rng = np.random.default_rng(1)
    a = random_skew(rng, 4)
    expected = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    assert pfaffian_naive(a) == pytest.approx(expected)


def test_naive_zero_matrix():
    assert pfaffian_naive(np.zeros((4, 4))) == 0


def test_naive_size_limit():
    with pytest.raises(SizeTooLarge):
        pfaffian_naive(np.zeros((10, 10)))


def test_odd_size_rejected():
    with pytest.raises(OddSize):
        pfaffian(np.zeros((3, 3)))


def test_not_skew_rejected():
    with pytest.raises(NotSkew):
        pfaffian(np.ones((2, 2)))


def test_pfaffian_tridiagonal_product():
    m = np.zeros((6, 6))
    for i, b in enumerate([1.0, 2.0, 3.0, 4.0, 5.0]):
        m[i, i + 1] = b
        m[i + 1, i] = -b
    assert pfaffian(m) == pytest.approx(1 * 3 * 5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pfaffian_block_formula(n):
    rng = np.random.default_rng(10 + n)
    m = rng.standard_normal((n, n))
    block = np.block([[np.zeros((n, n)), m], [-m.T, np.zeros((n, n))]])
    expected = (-1) ** (n * (n - 1) // 2) * np.linalg.det(m)
    assert pfaffian(block) == pytest.approx(expected)


def test_pfaffian_matches_naive():
    rng = np.random.default_rng(2)
    for m in (2, 4, 6, 8):
        for _ in range(20):
            a = random_skew(rng, m)
            pf, ref = pfaffian(a), pfaffian_naive(a)
            assert abs(pf - ref) < 1e-11 * max(1.0, abs(ref))


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(3)
    for m in (2, 4, 6, 8, 10, 12):
        a = random_skew(rng, m)
        det = np.linalg.det(a)
        assert abs(pfaffian(a) ** 2 - det) < 1e-10 * max(1.0, abs(det))


def test_pfaffian_congruence():
    rng = np.random.default_rng(4)
    for m in (2, 4, 6):
        a = random_skew(rng, m)
        b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        lhs = pfaffian(b @ a @ b.T)
        rhs = np.linalg.det(b) * pfaffian(a)
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))


def test_gaussian_mixed_moments():
    assert gaussian_mixed_moment(0, 0) == 1.0
    assert gaussian_mixed_moment(3, 3) == 6.0
    assert gaussian_mixed_moment(2, 5) == 0.0
    with pytest.raises(FactorialOverflow):
        gaussian_mixed_moment(171, 171)


def test_moment_matrix_unit_weight():
    mm = moment_matrix(RadialPolynomial((1.0,)), 1)
    assert mm.entries[0, 1] == pytest.approx(1.0)
    assert pfaffian(mm.entries) == pytest.approx(1.0)
    assert product_statistic(RadialPolynomial((1.0,)), 1) == pytest.approx(1.0)


def test_moment_matrix_skew_for_symmetric_g():
    g = MixedPolynomial.from_monomials([(0, 0, 1.0), (2, 1, 0.5), (1, 2, 0.5)])
    mm = moment_matrix(g, 2)
    assert np.abs(mm.entries + mm.entries.T).max() < 1e-12


def test_moment_matrix_rejects_asymmetric_g():
    with pytest.raises(AsymmetricG):
        moment_matrix(MixedPolynomial.from_monomials([(2, 1, 1.0)]), 1)


def test_second_moment_of_single_radius():
    # E|lambda_1|^2 at N = 1 equals the gamma(2) mean
    assert product_statistic(RadialPolynomial((0.0, 1.0)), 1) == pytest.approx(2.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_unit_statistic(n):
    assert product_statistic(RadialPolynomial((1.0,)), n) == pytest.approx(1.0)


def test_product_statistic_examples():
    # E[|l1|^2 |l2|^2] = E[gamma_2] E[gamma_4] = 8
    assert product_statistic(RadialPolynomial((0.0, 1.0)), 2) == pytest.approx(8.0)
    # E[(1+|l1|^2)(1+|l2|^2)] = 3 * 5 = 15
    assert product_statistic(RadialPolynomial((1.0, 1.0)), 2) == pytest.approx(15.0)


def test_radial_and_mixed_routes_agree():
    radial = RadialPolynomial((1.0, 2.0, 0.5))
    for n in (1, 2, 3):
        a = product_statistic(radial, n)
        b = product_statistic(radial.to_mixed(), n)
        assert a == pytest.approx(b, rel=1e-12)


def test_exact_triangle_identity():
    # the Pfaffian statistic equals the product of gamma means, from factorials
    for coeffs in ((1.0, 1.0), (0.0, 0.0, 1.0), (1.0, 2.0, 1.0)):
        g = RadialPolynomial(coeffs)
        for n in range(1, 7):
            rhs = 1.0
            for i in range(1, n + 1):
                rhs *= g.gamma_mean(2 * i)
            assert product_statistic(g, n) == pytest.approx(rhs, rel=1e-12)


def test_gamma_mean_rising_factorial():
    g = RadialPolynomial((0.0, 0.0, 1.0))  # t^2
    assert g.gamma_mean(4) == pytest.approx(4 * 5)
    assert RadialPolynomial((1.0, 1.0)).gamma_mean(2) == pytest.approx(3.0)


def test_log_space_statistic_matches_dense_range():
    g = RadialPolynomial((1.0, 1.0))
    sign, log = product_statistic_log(g, 4)
    assert sign == 1.0
    assert math.exp(log) == pytest.approx(product_statistic(g, 4), rel=1e-12)


def test_log_space_statistic_beyond_double_range():
    # prod (2i-1)! overflows a double near N = 18; the ratio stays finite
    g = RadialPolynomial((1.0, 1.0))
    val = product_statistic(g, 20)
    expected = 1.0
    for i in range(1, 21):
        expected *= g.gamma_mean(2 * i)
    assert val == pytest.approx(expected, rel=1e-10)


def test_power_statistic_boundary_counterexample():
    """Angular independence of eigenvalue powers starts at M = 2N + 1.

    At M = 2N the moment matrix acquires nonzero corner entries and the
    exact statistic E[prod(1 + Re lambda_k^M)] departs from the value 1
    that a set of independent uniform-angle points would give.  These
    values are exact (factorial arithmetic, no sampling).
    """
    for n, m, expected in [(2, 4, -3.0), (3, 6, -23.0), (4, 8, -191.0)]:
        g = MixedPolynomial.from_monomials([(0, 0, 1.0), (m, 0, 0.5), (0, m, 0.5)])
        assert product_statistic(g, n) == pytest.approx(expected)
        corner = moment_matrix(g, n).entries[0, 2 * n - 1]
        assert corner != 0
    for n, m in [(2, 5), (2, 6), (3, 7), (4, 9)]:
        g = MixedPolynomial.from_monomials([(0, 0, 1.0), (m, 0, 0.5), (0, m, 0.5)])
        assert product_statistic(g, n) == pytest.approx(1.0)
        assert np.abs(moment_matrix(g, n).entries[0, 2 * n - 1]) == 0.0


def test_debruijn_single_point():
    phis = [MixedPolynomial.one(), MixedPolynomial.from_monomials([(1, 0, 1.0)])]
    psis = [MixedPolynomial.one(), MixedPolynomial.from_monomials([(0, 1, 1.0)])]
    lhs = debruijn_lhs_bruteforce(phis, psis)
    f = debruijn_pair_matrix(phis, psis)
    assert lhs == pytest.approx(2.0 * pfaffian(0.5 * (f - f.T)))


def test_debruijn_density_normalization():
    # monomial bases with the (conj z - z) g weight integrate to the
    # partition constant 2^N N! prod (2i-1)!, up to the parity of the
    # column ordering: rewriting the interaction as a Vandermonde times
    # prod(conj z - z) costs (-1)^N in the interleaved layout
    for n in (1, 2, 3):
        phis = [MixedPolynomial.from_monomials([(i, 0, 1.0)]) for i in range(2 * n)]
        psis = [MixedPolynomial.from_monomials([(0, i, 1.0)]) for i in range(2 * n)]
        weight = MixedPolynomial.from_monomials([(0, 1, 1.0), (1, 0, -1.0)])
        lhs = debruijn_lhs_bruteforce(phis, psis, weight)
        z_n = 2**n * math.factorial(n)
        for i in range(1, n + 1):
            z_n *= math.factorial(2 * i - 1)
        assert lhs == pytest.approx((-1) ** n * z_n, rel=1e-12)
        assert debruijn_rhs(phis, psis, weight) == pytest.approx(lhs, rel=1e-12)


def test_debruijn_zero_functions():
    phis = [MixedPolynomial({}) for _ in range(2)]
    psis = [MixedPolynomial.one() for _ in range(2)]
    assert debruijn_lhs_bruteforce(phis, psis) == 0


def test_debruijn_size_limit():
    phis = [MixedPolynomial.one()] * 8
    with pytest.raises(SizeTooLarge):
        debruijn_lhs_bruteforce(phis, phis)


def test_debruijn_random_systems():
    rng = np.random.default_rng(6)

    def rand_poly():
        return MixedPolynomial.from_monomials(
            [(rng.integers(0, 3), rng.integers(0, 3),
              complex(*rng.standard_normal(2))) for _ in range(3)])

    for n in (1, 2, 3):
        for _ in range(5):
            phis = [rand_poly() for _ in range(2 * n)]
            psis = [rand_poly() for _ in range(2 * n)]
            lhs = debruijn_lhs_bruteforce(phis, psis)
            rhs = debruijn_rhs(phis, psis)
            assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(rhs))
