"""Pfaffians, Gaussian moment matrices, product statistics, De Bruijn checks.

Sign convention: Pf [[0, a], [-a, 0]] = a, so the Pfaffian of a skew
tridiagonal matrix with upper diagonal (b_1, ..., b_{2n-1}) is the product
b_1 b_3 ... b_{2n-1}, and Pf(A)^2 = det(A).

The brute-force De Bruijn integral pairs the two columns belonging to one
integration variable next to each other (columns 2j-1, 2j hold phi(z_j),
psi(z_j)).  With that layout the identity

    integral det(...) dnu^N  =  N! 2^N Pf( f_{i,j} ),
    f_{i,j} = integral phi_i psi_j dnu

holds exactly as written; splitting the columns into a phi half and a psi
half would cost an extra factor (-1)^{N(N-1)/2}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np


class SizeTooLarge(ValueError):
    """Brute-force routine asked to handle more points than it enumerates."""


class OddSize(ValueError):
    """Pfaffian of an odd-size matrix."""


class NotSkew(ValueError):
    """Matrix deviates from skew symmetry beyond tolerance."""


class AsymmetricG(ValueError):
    """Statistic weight g does not satisfy g(z) = g(conj z)."""


class FactorialOverflow(OverflowError):
    """Factorial beyond double range requested outside the log-space path."""


TAU_SKEW = 1e-12
NAIVE_MAX_SIZE = 8
FACTORIAL_TABLE = np.array([math.factorial(k) for k in range(171)], dtype=float)


def factorial(n: int) -> float:
    """n! from the precomputed table; raises beyond double range."""
    if n < 0:
        raise ValueError("negative factorial")
    if n >= len(FACTORIAL_TABLE):
        raise FactorialOverflow(f"{n}! exceeds double range")
    return float(FACTORIAL_TABLE[n])


def _check_even_skew(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if A.shape[0] % 2 != 0:
        raise OddSize(f"size {A.shape[0]} is odd")
    scale = float(np.abs(A).max(initial=0.0))
    if np.abs(A + A.T).max(initial=0.0) > TAU_SKEW * (1.0 + scale):
        raise NotSkew("matrix is not skew-symmetric within tolerance")
    return 0.5 * (A - A.T)


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


_PERM_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _perm_table(m: int) -> tuple[np.ndarray, np.ndarray]:
    if m not in _PERM_CACHE:
        perms = np.array(list(itertools.permutations(range(m))), dtype=np.intp)
        signs = np.array([_perm_sign(p) for p in perms], dtype=np.int8)
        _PERM_CACHE[m] = (perms, signs)
    return _PERM_CACHE[m]


def pfaffian_naive(A: np.ndarray) -> complex:
    """Definition-level Pfaffian: the full sum over all permutations.

    Serves as the independent oracle for :func:`pfaffian`; limited to sizes
    <= NAIVE_MAX_SIZE because the sum has (2n)! terms.
    """
    A = _check_even_skew(A)
    m = A.shape[0]
    if m == 0:
        return 1.0 + 0j
    if m > NAIVE_MAX_SIZE:
        raise SizeTooLarge(f"naive Pfaffian limited to size {NAIVE_MAX_SIZE}")
    perms, signs = _perm_table(m)
    prods = A[perms[:, ::2], perms[:, 1::2]].prod(axis=1)
    n = m // 2
    return complex((signs * prods).sum() / (2**n * math.factorial(n)))


def pfaffian(A: np.ndarray) -> complex:
    """Pfaffian by skew elimination with pivoting (congruence transforms).

    Each step picks the largest-modulus pivot in the active column; row and
    column swaps are congruences by a permutation (tracked sign), Gauss
    eliminations are congruences with unit determinant, so the product of
    the resulting superdiagonal entries is the Pfaffian.
    """
    A = _check_even_skew(A).copy()
    m = A.shape[0]
    if m == 0:
        return 1.0 + 0j
    value = 1.0 + 0j
    for k in range(0, m - 2, 2):
        col = np.abs(A[k + 1:, k])
        p = int(np.argmax(col)) + k + 1
        if col.max() == 0.0:
            return 0j
        if p != k + 1:
            A[[k + 1, p], :] = A[[p, k + 1], :]
            A[:, [k + 1, p]] = A[:, [p, k + 1]]
            value = -value
        value *= A[k, k + 1]
        tau = A[k + 2:, k] / A[k + 1, k]
        A[k + 2:, k + 2:] += np.outer(tau, A[k + 2:, k + 1])
        A[k + 2:, k + 2:] -= np.outer(A[k + 2:, k + 1], tau)
    return complex(value * A[m - 2, m - 1])


def gaussian_mixed_moment(p: int, q: int) -> float:
    """Moment of the standard complex Gaussian: int z^p conj(z)^q dmu.

    Vanishes unless p == q by rotational symmetry, and equals p! on the
    diagonal (|z|^2 is a unit-rate exponential variable).
    """
    if p < 0 or q < 0:
        raise ValueError("moment orders must be nonnegative")
    if p != q:
        return 0.0
    return factorial(p)


@dataclass(frozen=True)
class MixedPolynomial:
    """Finite sum of monomials c * z^p conj(z)^q, stored as {(p, q): c}."""

    terms: dict = field(default_factory=dict)

    @classmethod
    def from_monomials(cls, monomials) -> "MixedPolynomial":
        terms = {}
        for p, q, c in monomials:
            key = (int(p), int(q))
            terms[key] = terms.get(key, 0) + complex(c)
        return cls({k: v for k, v in terms.items() if v != 0})

    @classmethod
    def one(cls) -> "MixedPolynomial":
        return cls({(0, 0): 1.0 + 0j})

    def __mul__(self, other: "MixedPolynomial") -> "MixedPolynomial":
        out = {}
        for (p1, q1), c1 in self.terms.items():
            for (p2, q2), c2 in other.terms.items():
                key = (p1 + p2, q1 + q2)
                out[key] = out.get(key, 0) + c1 * c2
        return MixedPolynomial(out)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for (p, q), c in self.terms.items():
            out = out + c * z**p * np.conj(z) ** q
        return out

    def shifted(self, dp: int, dq: int) -> "MixedPolynomial":
        return MixedPolynomial({(p + dp, q + dq): c for (p, q), c in self.terms.items()})

    def is_conjugation_symmetric(self, tol: float = 0.0) -> bool:
        for (p, q), c in self.terms.items():
            if abs(self.terms.get((q, p), 0) - c) > tol:
                return False
        return True

    def gaussian_integral(self) -> complex:
        """int of the polynomial against the standard complex Gaussian."""
        return complex(sum(c * gaussian_mixed_moment(p, q)
                           for (p, q), c in self.terms.items()))


@dataclass(frozen=True)
class RadialPolynomial:
    """g(z) = sum_m coeffs[m] * |z|^(2m), a polynomial in t = |z|^2."""

    coeffs: tuple

    @classmethod
    def from_coeffs(cls, coeffs) -> "RadialPolynomial":
        return cls(tuple(float(c) for c in coeffs))

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float),
                                                np.asarray(self.coeffs))

    def to_mixed(self) -> MixedPolynomial:
        return MixedPolynomial({(m, m): complex(c)
                                for m, c in enumerate(self.coeffs) if c != 0})

    def gamma_mean(self, k: int) -> float:
        """E[g(X)] for X ~ gamma(k), via E[X^m] = k (k+1) ... (k+m-1)."""
        total = 0.0
        for m, c in enumerate(self.coeffs):
            rising = 1.0
            for r in range(m):
                rising *= k + r
            total += c * rising
        return total


def _as_mixed(g) -> MixedPolynomial:
    if isinstance(g, MixedPolynomial):
        return g
    if isinstance(g, RadialPolynomial):
        return g.to_mixed()
    return MixedPolynomial.from_monomials(g)


@dataclass
class MomentMatrix:
    """Skew matrix f_{i,j} = int (z^i zbar^{j-1} - z^{i-1} zbar^j) g dmu."""

    size: int
    entries: np.ndarray
    descriptor: object


def moment_matrix(g, N: int) -> MomentMatrix:
    """Assemble the 2N x 2N product-statistic moment matrix for weight g.

    g may be a RadialPolynomial, a MixedPolynomial, or a list of (p, q, c)
    monomials; it must satisfy g(z) = g(conj z), i.e. symmetric coefficients
    under p <-> q.  Every entry is assembled exactly from factorials.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if isinstance(g, RadialPolynomial):
        # radial weight collapses the matrix to a skew tridiagonal
        ent = np.zeros((2 * N, 2 * N))
        for i in range(1, 2 * N):
            b = sum(c * factorial(i + m) for m, c in enumerate(g.coeffs))
            ent[i - 1, i] = b
            ent[i, i - 1] = -b
        return MomentMatrix(2 * N, ent, g)
    gm = _as_mixed(g)
    if not gm.is_conjugation_symmetric(tol=0.0):
        raise AsymmetricG("g must have symmetric coefficients under p <-> q")
    ent = np.zeros((2 * N, 2 * N), dtype=complex)
    for i in range(1, 2 * N + 1):
        for j in range(1, 2 * N + 1):
            val = (gm.shifted(i, j - 1).gaussian_integral()
                   - gm.shifted(i - 1, j).gaussian_integral())
            ent[i - 1, j - 1] = val
    if np.abs(ent.imag).max(initial=0.0) == 0.0:
        ent = ent.real
    return MomentMatrix(2 * N, np.asarray(ent), g)


def product_statistic(g, N: int) -> float:
    """E[ prod_k g(lambda_k) ] for unscaled spectra: Pf(f) / prod (2i-1)!.

    Uses the pivoted Pfaffian on the exact moment matrix.  When the Pfaffian
    or the normalizer overflows double range the radial log-space path takes
    over and the ratio is exponentiated.
    """
    try:
        mm = moment_matrix(g, N)
        with np.errstate(over="ignore", invalid="ignore"):
            pf = pfaffian(mm.entries)
        norm = 1.0
        for i in range(1, N + 1):
            norm *= factorial(2 * i - 1)
        if np.isfinite(pf) and np.isfinite(norm):
            return float((pf / norm).real)
    except FactorialOverflow:
        pass
    if not isinstance(g, RadialPolynomial):
        raise FactorialOverflow(
            "statistic overflows double range; only radial weights support "
            "the log-space path")
    sign, log = product_statistic_log(g, N)
    return sign * math.exp(log)


def product_statistic_log(g: RadialPolynomial, N: int) -> tuple[float, float]:
    """Log-space product statistic for radial g: returns (sign, log|value|).

    The radial moment matrix is tridiagonal, so Pf(f) = prod f_{2i-1, 2i}
    and the ratio against prod (2i-1)! is a sum of log differences.
    """
    if not isinstance(g, RadialPolynomial):
        raise TypeError("log-space path requires a RadialPolynomial")
    sign = 1.0
    log = 0.0
    for i in range(1, N + 1):
        k = 2 * i - 1  # entry f_{2i-1, 2i} = sum_m c_m (k+m)!
        s, b = _signed_logsum(
            [(c, math.lgamma(k + m + 1)) for m, c in enumerate(g.coeffs) if c != 0])
        if s == 0.0:
            return 0.0, -math.inf
        sign *= s
        log += b - math.lgamma(k + 1)
    return sign, log


def _signed_logsum(terms) -> tuple[float, float]:
    """Sum of c * exp(l) over (c, l) pairs, returned as (sign, log|sum|)."""
    if not terms:
        return 0.0, -math.inf
    m = max(l for _, l in terms)
    acc = sum(c * math.exp(l - m) for c, l in terms)
    if acc == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, acc), m + math.log(abs(acc))


def debruijn_pair_matrix(phis, psis, weight=None) -> np.ndarray:
    """f_{i,j} = int phi_i psi_j dnu with dnu = weight * dmu."""
    w = MixedPolynomial.one() if weight is None else _as_mixed(weight)
    phis = [_as_mixed(p) for p in phis]
    psis = [_as_mixed(p) for p in psis]
    m = len(phis)
    if len(psis) != m or m % 2 != 0:
        raise ValueError("need equally many phi and psi functions, even count")
    return np.array([[ (phi * psi * w).gaussian_integral() for psi in psis]
                     for phi in phis])


def debruijn_rhs(phis, psis, weight=None) -> complex:
    """N! 2^N Pf of the antisymmetrized pair-integral matrix."""
    f = debruijn_pair_matrix(phis, psis, weight)
    N = f.shape[0] // 2
    return math.factorial(N) * 2**N * pfaffian(0.5 * (f - f.T))


def debruijn_lhs_bruteforce(phis, psis, weight=None) -> complex:
    """Integral of the 2N x 2N determinant, expanded over all (2N)! terms.

    Columns 2j-1 and 2j carry phi(lambda_j) and psi(lambda_j); each
    permutation term factorizes over the independent integration variables
    and is integrated exactly through the Gaussian monomial moments.
    """
    w = MixedPolynomial.one() if weight is None else _as_mixed(weight)
    phis = [_as_mixed(p) for p in phis]
    psis = [_as_mixed(p) for p in psis]
    m = len(phis)
    if len(psis) != m or m % 2 != 0:
        raise ValueError("need equally many phi and psi functions, even count")
    N = m // 2
    if N > 3:
        raise SizeTooLarge("brute-force De Bruijn limited to N <= 3")
    memo: dict[tuple[int, int], complex] = {}

    def pair_integral(i: int, j: int) -> complex:
        if (i, j) not in memo:
            memo[(i, j)] = (phis[i] * psis[j] * w).gaussian_integral()
        return memo[(i, j)]

    total = 0j
    for perm in itertools.permutations(range(m)):
        # perm maps column -> row of the determinant expansion
        term = complex(_perm_sign(perm))
        for j in range(N):
            term *= pair_integral(perm[2 * j], perm[2 * j + 1])
            if term == 0:
                break
        total += term
    return total
