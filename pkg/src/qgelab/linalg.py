"""Dense complex matrix kernels: eigensystems, inverses, conjugate pairing.

Eigenvalues and right eigenvectors are delegated to LAPACK (Hessenberg
reduction followed by implicitly shifted QR).  Left eigenvectors are rows
of the inverse of the right-eigenvector matrix, which makes the system
biorthogonal up to solve error -- the form the overlap formulas require.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg


def _lu_factor(A: np.ndarray):
    # singularity is detected through the pivot floor; scipy's advisory
    # warning on exact zeros would just duplicate the Singular error
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(A, check_finite=False)


class NoConvergence(RuntimeError):
    """The QR iteration failed to settle an eigenvalue."""


class NearDefective(RuntimeError):
    """Right-eigenvector matrix condition estimate above KAPPA_MAX."""


class Singular(RuntimeError):
    """A pivot modulus fell below the pivot floor during LU."""


class PairingFailure(RuntimeError):
    """Conjugate pairing residual exceeded its tolerance."""


KAPPA_MAX = 1e12
TAU_BIO = 1e-8
TAU_EIG = 1e-9


@dataclass
class EigenSystem:
    """Eigenvalues with optional biorthogonal left/right eigenvectors.

    right_vectors holds eigenvectors as columns (unit norm), left_vectors as
    rows, with left_vectors @ right_vectors = I within TAU_BIO.  residuals
    are relative backward errors ||A r - lambda r|| / ||A||_F per pair.
    """

    values: np.ndarray
    right_vectors: np.ndarray | None = None
    left_vectors: np.ndarray | None = None
    residuals: np.ndarray | None = None
    condition: float | None = None


def _check_finite_square(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    return A


def eigen_full(A: np.ndarray, want_vectors: bool = True) -> EigenSystem:
    """Full eigensystem of a square complex matrix.

    Raises NoConvergence if the QR sweeps fail, NearDefective if the
    right-eigenvector matrix has condition estimate above KAPPA_MAX when
    vectors are requested.
    """
    A = _check_finite_square(A)
    try:
        if not want_vectors:
            return EigenSystem(values=np.linalg.eigvals(A))
        values, P = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc

    cond = float(np.linalg.cond(P))
    if not np.isfinite(cond) or cond > KAPPA_MAX:
        raise NearDefective(f"eigenvector condition estimate {cond:.3e}")
    L = invert(P)
    anorm = float(np.linalg.norm(A)) or 1.0
    residuals = np.linalg.norm(A @ P - P * values[None, :], axis=0) / anorm
    return EigenSystem(values=values, right_vectors=P, left_vectors=L,
                       residuals=residuals, condition=cond)


def frobenius_norm(A: np.ndarray) -> float:
    """sqrt(tr(A* A)) = sqrt of the sum of squared entry moduli."""
    return float(np.linalg.norm(np.asarray(A)))


def pivot_floor(A: np.ndarray) -> float:
    n = max(A.shape)
    return n * np.finfo(float).eps * float(np.abs(A).max(initial=0.0))


def invert(A: np.ndarray) -> np.ndarray:
    """Inverse by LU with partial pivoting; raises Singular on a tiny pivot."""
    A = _check_finite_square(A)
    lu, piv = _lu_factor(A)
    floor = pivot_floor(A)
    if np.abs(np.diag(lu)).min(initial=np.inf) <= floor:
        raise Singular(f"pivot modulus at or below floor {floor:.3e}")
    n = A.shape[0]
    return scipy.linalg.lu_solve((lu, piv), np.eye(n, dtype=complex),
                                 check_finite=False)


def solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B by the same pivoted LU as :func:`invert`."""
    A = _check_finite_square(A)
    lu, piv = _lu_factor(A)
    if np.abs(np.diag(lu)).min(initial=np.inf) <= pivot_floor(A):
        raise Singular("pivot modulus at or below floor")
    return scipy.linalg.lu_solve((lu, piv), np.asarray(B, dtype=complex),
                                 check_finite=False)


def pair_conjugates(values: np.ndarray) -> tuple[np.ndarray, float]:
    """Match 2N eigenvalues into N conjugate pairs.

    Greedy matching across the real axis: values are taken in order of
    decreasing |Im| and each is paired with the unused value closest to its
    conjugate.  Returns the N upper-half-plane representatives sorted by
    (real, imag) and the max relative pairing residual
    max |u - conj(l)| / (1 + |u|).
    """
    values = np.asarray(values, dtype=complex)
    m = values.size
    if m % 2 != 0:
        raise ValueError("need an even number of eigenvalues")
    order = np.argsort(-np.abs(values.imag), kind="stable")
    used = np.zeros(m, dtype=bool)
    reps = []
    residual = 0.0
    for idx in order:
        if used[idx]:
            continue
        used[idx] = True
        target = values[idx].conjugate()
        free = np.flatnonzero(~used)
        j = free[np.argmin(np.abs(values[free] - target))]
        used[j] = True
        residual = max(residual,
                       abs(values[j] - target) / (1.0 + abs(values[idx])))
        mean = 0.5 * (values[idx] + values[j].conjugate())
        reps.append(complex(mean.real, abs(mean.imag)))
    reps = np.array(sorted(reps, key=lambda v: (v.real, v.imag)))
    return reps, residual
