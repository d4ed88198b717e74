"""Eigenvector computations on Schur forms and dense matrices.

Left eigenvectors of the expanded triangular form have a fixed gauge: the
one for the eigenvalue at diagonal position p has a unit entry at p, zeros
before it, and coefficients after it given by a two-term recursion driven
by the Schur columns.  The classic chains are

    b: sphere 1, eigenvalue lambda_1        (anchor position 1)
    c: sphere 1, eigenvalue conj(lambda_1)  (anchor position 2)
    d: sphere 2, eigenvalue lambda_2        (anchor position 3)
    e: sphere 2, eigenvalue conj(lambda_2)  (anchor position 4)

The d and e chains follow the same recursion as b and c with the anchor
shifted by one sphere; this was cross-checked against dense left
eigenvectors rather than taken from a closed-form source.

The pair map used throughout sends (u1, u2) to (-conj(u2), conj(u1)) on
each aligned pair of coordinates.  Applying it twice negates the vector
(it is a quaternionic structure map, an involution only up to sign), and
it satisfies u . phi(v) = -conj(phi(u) . v) and <u | phi(u)> = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import SchurForm
from .laws import complex_normal
from .linalg import eigen_full, invert, frobenius_norm


class OddLength(ValueError):
    """Pair map applied to an odd-length vector."""


class DegenerateSpectrum(RuntimeError):
    """Eigenvalue gap below DELTA_GAP: chains and overlaps are meaningless."""


DELTA_GAP = 1e-8
TAU_HERM = 1e-8
TAU_ROW = 1e-8
TAU_MINSPEC = 1e-6


def phi_map(u: np.ndarray) -> np.ndarray:
    """Quaternionic pair map: (u1, u2) -> (-conj(u2), conj(u1)) per pair.

    Operates on the trailing axis, which must have even length.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape[-1] % 2 != 0:
        raise OddLength("pair map needs an even-length vector")
    out = np.empty_like(u)
    out[..., ::2] = -u[..., 1::2].conj()
    out[..., 1::2] = u[..., ::2].conj()
    return out


def _check_gaps(lambdas: np.ndarray) -> None:
    lam = np.asarray(lambdas, dtype=complex)
    n = lam.size
    for i in range(n):
        for j in range(n):
            if i != j and (abs(lam[i] - lam[j]) < DELTA_GAP
                           or abs(lam[i] - lam[j].conjugate()) < DELTA_GAP):
                raise DegenerateSpectrum(
                    f"eigenvalue gap below {DELTA_GAP:g} between spheres {i} and {j}")


@dataclass
class CoefficientChain:
    """A left eigenvector of the expanded Schur form in the triangular gauge."""

    label: str
    anchor: int                 # index of the unit entry, 0-based
    eigenvalue: complex
    vector: np.ndarray          # full left eigenvector, length 2N

    @property
    def coefficients(self) -> np.ndarray:
        """Entries after the anchor's sphere (b_3.. / c_3.. / d_5.. / e_5..)."""
        start = 2 * (self.anchor // 2 + 1)
        return self.vector[start:]


def left_chain(S: SchurForm, sphere: int, conjugated: bool,
               label: str | None = None) -> CoefficientChain:
    """Left-eigenvector chain for the given sphere via the two-term recursion."""
    n = S.size
    _check_gaps(S.lambdas)
    lam0 = S.lambdas[sphere].conjugate() if conjugated else S.lambdas[sphere]
    H = S.expanded()
    vec = np.zeros(2 * n, dtype=complex)
    anchor = 2 * sphere + (1 if conjugated else 0)
    vec[anchor] = 1.0
    for d in range(sphere + 1, n):
        prefix = vec[:2 * d]
        col = H[:2 * d, 2 * d]
        vec[2 * d] = prefix @ col / (lam0 - S.lambdas[d])
        vec[2 * d + 1] = prefix @ phi_map(col) / (lam0 - S.lambdas[d].conjugate())
    if label is None:
        idx = 2 * sphere + (1 if conjugated else 0)
        label = "bcde"[idx] if idx < 4 else f"chain{idx}"
    return CoefficientChain(label=label, anchor=anchor, eigenvalue=complex(lam0),
                            vector=vec)


def coefficient_chains(S: SchurForm) -> dict:
    """The four classic chains b, c, d, e of the first two spheres."""
    chains = {"b": left_chain(S, 0, False, "b"),
              "c": left_chain(S, 0, True, "c")}
    if S.size >= 2:
        chains["d"] = left_chain(S, 1, False, "d")
        chains["e"] = left_chain(S, 1, True, "e")
    return chains


ANGLE_PAIRS = ((1, 2), (1, -2), (-1, 2), (-1, -2), (1, -1))


def angle(S: SchurForm, pair=(1, 2)) -> complex:
    """Normalized inner product of right eigenvectors of the first two spheres.

    The pair is given as signed sphere labels: (1, 2) for (lambda_1,
    lambda_2), (1, -2) for (lambda_1, conj lambda_2), and so on; (1, -1) is
    the same-sphere pair, which is exactly zero.  Conventions follow the
    triangular gauge, in which

        R_1 = e_1,  R_2 = (-b_3, -c_3, 1, 0, ...),
        R~_2 = (-b_4, -c_4, 0, 1, 0, ...),

    so angle(lambda_1, lambda_2) = -b_3 / sqrt(1 + |b_3|^2 + |c_3|^2).
    """
    if tuple(pair) not in ANGLE_PAIRS:
        raise ValueError(f"pair must be one of {ANGLE_PAIRS}")
    if tuple(pair) == (1, -1):
        return 0j
    if S.size < 2:
        raise ValueError("need at least two spheres")
    _check_gaps(S.lambdas[:2])
    lam1, lam2 = S.lambdas[0], S.lambdas[1]
    u, v = S.u[0, 1], S.v[0, 1]
    b3 = u / (lam1 - lam2)
    b4 = v / (lam1 - lam2.conjugate())
    c3 = -v.conjugate() / (lam1.conjugate() - lam2)
    c4 = u.conjugate() / (lam1.conjugate() - lam2.conjugate())
    n3 = math.sqrt(1.0 + abs(b3) ** 2 + abs(c3) ** 2)
    n4 = math.sqrt(1.0 + abs(b4) ** 2 + abs(c4) ** 2)
    return {(1, 2): -b3 / n3, (1, -2): -b4 / n4,
            (-1, 2): -c3 / n3, (-1, -2): -c4 / n4}[tuple(pair)]


def expanded_right_vectors(S: SchurForm) -> np.ndarray:
    """Right eigenvectors of the expanded form via the dense eigensolver.

    Columns are matched to diagonal positions by eigenvalue and normalized
    to the triangular gauge (unit entry at the diagonal position), so they
    are directly comparable with the chain formulas.
    """
    H = S.expanded()
    es = eigen_full(H, want_vectors=True)
    diag = np.diag(H)
    out = np.empty_like(H)
    taken = np.zeros(len(diag), dtype=bool)
    for p, lam in enumerate(diag):
        dist = np.abs(es.values - lam)
        dist[taken] = np.inf
        k = int(np.argmin(dist))
        taken[k] = True
        col = es.right_vectors[:, k]
        if col[p] == 0:
            raise DegenerateSpectrum("gauge anchor vanished in dense eigenvector")
        out[:, p] = col / col[p]
    return out


# ---------------------------------------------------------------------------
# Overlap matrix

@dataclass
class OverlapMatrix:
    """Hermitian matrix O_{i,j} = <R_i|R_j><L_j|L_i> with eigenvalue labels."""

    entries: np.ndarray
    values: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def hermitian_defect(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(h).min())

    def conjugate_pair_offdiagonal(self) -> float:
        """max |O(lambda_i, conj lambda_i)| over matched conjugate pairs."""
        vals = self.values
        worst = 0.0
        used = np.zeros(len(vals), dtype=bool)
        order = np.argsort(-np.abs(vals.imag), kind="stable")
        for idx in order:
            if used[idx]:
                continue
            used[idx] = True
            free = np.flatnonzero(~used)
            if free.size == 0:
                break
            j = free[np.argmin(np.abs(vals[free] - vals[idx].conjugate()))]
            used[j] = True
            worst = max(worst, abs(self.entries[idx, j]))
        return worst


def overlap_matrix(A: np.ndarray) -> OverlapMatrix:
    """Overlaps from the Gram matrix of right eigenvectors.

    O = (P*P) o ((P*P)^{-1})^T entrywise, which is invariant under the
    arbitrary phases and scales of the computed eigenvectors.
    """
    es = eigen_full(A, want_vectors=True)
    gram = es.right_vectors.conj().T @ es.right_vectors
    gram_inv = invert(gram)
    return OverlapMatrix(entries=gram * gram_inv.T, values=es.values)


def diagonal_overlap_recurrence(S: SchurForm, scaled: bool = False) -> float:
    """O_{1,1} as the accumulated squared norm of the b chain.

    With scaled=True the stored eigenvalues are read as eigenvalues of the
    matrix divided by sqrt(2N); they are multiplied back before running the
    recursion, which is written once in unscaled form.
    """
    if scaled:
        S = SchurForm(lambdas=S.lambdas * math.sqrt(2 * S.size), u=S.u, v=S.v)
    chain = left_chain(S, 0, False, "b")
    return float((np.abs(chain.vector) ** 2).sum())


def diagonal_overlap_resampled(lambdas, rng, resamples: int,
                               scaled: bool = False) -> np.ndarray:
    """O_{1,1} draws at fixed eigenvalues, resampling the Gaussian columns.

    Runs the chain recursion itself (not the independent-product law) on
    fresh standard Gaussian Schur columns, vectorized over resamples.
    """
    lam = np.asarray(lambdas, dtype=complex)
    if scaled:
        lam = lam * math.sqrt(2 * lam.size)
    _check_gaps(lam)
    n = lam.size
    b = np.zeros((resamples, 2 * n), dtype=complex)
    b[:, 0] = 1.0
    for d in range(1, n):
        col = complex_normal(rng, (resamples, 2 * d))
        s = b[:, :2 * d]
        b[:, 2 * d] = (s * col).sum(axis=1) / (lam[0] - lam[d])
        b[:, 2 * d + 1] = (s * phi_map(col)).sum(axis=1) / (lam[0] - lam[d].conjugate())
    return (np.abs(b) ** 2).sum(axis=1)


# ---------------------------------------------------------------------------
# Lack of normality and quadratic forms

def lack_of_normality(A: np.ndarray) -> float:
    """Frobenius norm squared minus the sum of squared eigenvalue moduli.

    Nonnegative up to rounding; zero exactly on normal matrices, and equal
    to the strict upper-triangle mass for triangular input.
    """
    A = np.asarray(A, dtype=complex)
    values = np.linalg.eigvals(A)
    return float(frobenius_norm(A) ** 2 - (np.abs(values) ** 2).sum())


def lack_of_normality_batch(mats: np.ndarray) -> np.ndarray:
    mats = np.asarray(mats, dtype=complex)
    values = np.linalg.eigvals(mats)
    fro2 = (np.abs(mats) ** 2).sum(axis=(-2, -1))
    return fro2 - (np.abs(values) ** 2).sum(axis=-1)


def quadratic_form_check(A: np.ndarray, f_coeffs, g_coeffs):
    """Both sides of the overlap quadratic-form identity.

    lhs = tr(f(A)* g(A)) with f(A) = P f(Delta) P^{-1} through the same
    eigendecomposition that defines the overlaps; rhs = sum over i, j of
    O_{i,j} conj(f(lambda_i)) g(lambda_j).  Returns (lhs, rhs, gap) with
    gap = |lhs - rhs| / (1 + |lhs|).
    """
    es = eigen_full(np.asarray(A, dtype=complex), want_vectors=True)
    fvals = np.polynomial.polynomial.polyval(es.values, np.asarray(f_coeffs, dtype=complex))
    gvals = np.polynomial.polynomial.polyval(es.values, np.asarray(g_coeffs, dtype=complex))
    P, L = es.right_vectors, es.left_vectors
    fA = (P * fvals[None, :]) @ L
    gA = (P * gvals[None, :]) @ L
    lhs = complex(np.trace(fA.conj().T @ gA))
    gram = P.conj().T @ P
    overlaps = gram * invert(gram).T
    rhs = complex((overlaps * np.outer(fvals.conj(), gvals)).sum())
    gap = abs(lhs - rhs) / (1.0 + abs(lhs))
    return lhs, rhs, gap
