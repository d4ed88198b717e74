"""Quaternion arithmetic, quaternionic matrices and their complex embedding.

A quaternion q = a + bi + cj + dk is identified with the pair of complex
numbers (z, w) = (a + bi, c + di) through q = z + wj, and represented by
the 2x2 complex block

    [[ z,        w ],
     [ -conj(w), conj(z) ]]

This block map is an injective ring homomorphism, so an NxN quaternionic
matrix embeds as a 2Nx2N complex matrix of such blocks.  A 2Nx2N complex
matrix M arises this way exactly when J conj(M) J^{-1} = M, where J is the
block diagonal matrix of N copies of [[0, 1], [-1, 0]] (J itself is the
embedding of j times the identity).

Eigenvalue equations use right multiplication, A X = X lambda, so that the
spectrum is a union of conjugacy classes (spheres) in H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class StructureViolation(ValueError):
    """A complex matrix fails the quaternionic block-structure test."""


# Relative tolerance for the structure test; scales with the matrix max-norm.
STRUCT_TOL = 1e-10


@dataclass(frozen=True)
class Quaternion:
    """q = a + bi + cj + dk with real coordinates."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __add__(self, other):
        other = _as_quaternion(other)
        return Quaternion(self.a + other.a, self.b + other.b,
                          self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_quaternion(other)
        return Quaternion(self.a - other.a, self.b - other.b,
                          self.c - other.c, self.d - other.d)

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        other = _as_quaternion(other)
        return quat_mul(self, other)

    def __rmul__(self, other):
        return quat_mul(_as_quaternion(other), self)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return math.sqrt(self.a**2 + self.b**2 + self.c**2 + self.d**2)

    def inverse(self) -> "Quaternion":
        n2 = self.a**2 + self.b**2 + self.c**2 + self.d**2
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        co = self.conjugate()
        return Quaternion(co.a / n2, co.b / n2, co.c / n2, co.d / n2)

    @property
    def z(self) -> complex:
        return complex(self.a, self.b)

    @property
    def w(self) -> complex:
        return complex(self.c, self.d)

    def block(self) -> np.ndarray:
        """The 2x2 complex matrix representing this quaternion."""
        z, w = self.z, self.w
        return np.array([[z, w], [-w.conjugate(), z.conjugate()]])


def _as_quaternion(x) -> Quaternion:
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, complex):
        return Quaternion(x.real, x.imag, 0.0, 0.0)
    if isinstance(x, (int, float)):
        return Quaternion(float(x), 0.0, 0.0, 0.0)
    raise TypeError(f"cannot interpret {type(x).__name__} as a quaternion")


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product p q (noncommutative; ij = k, ji = -k)."""
    return Quaternion(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )


@dataclass(frozen=True)
class ConjugacyClass:
    """Conjugacy class of a quaternion: the sphere S(center, radius).

    radius == 0 iff the class is a single real point; otherwise the sphere
    is centered on the real axis but does not meet it.
    """

    center: float
    radius: float


def conjugacy_class(q: Quaternion) -> ConjugacyClass:
    """Class of q: center = real part, radius = |imaginary part|."""
    return ConjugacyClass(q.a, math.sqrt(q.b**2 + q.c**2 + q.d**2))


class QuaternionMatrix:
    """NxN quaternionic matrix stored as the complex component pair (z, w).

    ``z[i, j]`` and ``w[i, j]`` hold the components of entry q_{ij} = z + wj.
    Pure value semantics: operations return new matrices.
    """

    def __init__(self, z: np.ndarray, w: np.ndarray):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        if z.shape != w.shape or z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise ValueError("z and w must be equal square matrices")
        self.z = z
        self.w = w

    @property
    def size(self) -> int:
        return self.z.shape[0]

    @classmethod
    def from_components(cls, a, b, c, d) -> "QuaternionMatrix":
        a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
        return cls(a + 1j * b, c + 1j * d)

    @classmethod
    def from_entries(cls, entries) -> "QuaternionMatrix":
        """Build from a nested sequence of Quaternion scalars."""
        n = len(entries)
        z = np.zeros((n, n), dtype=complex)
        w = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                q = _as_quaternion(entries[i][j])
                z[i, j] = q.z
                w[i, j] = q.w
        return cls(z, w)

    def entry(self, i: int, j: int) -> Quaternion:
        z, w = self.z[i, j], self.w[i, j]
        return Quaternion(z.real, z.imag, w.real, w.imag)

    def __add__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        return QuaternionMatrix(self.z + other.z, self.w + other.w)

    def __sub__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        return QuaternionMatrix(self.z - other.z, self.w - other.w)

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        # (z1 + w1 j)(z2 + w2 j) = (z1 z2 - w1 conj(w2)) + (z1 w2 + w1 conj(z2)) j
        z = self.z @ other.z - self.w @ other.w.conj()
        w = self.z @ other.w + self.w @ other.z.conj()
        return QuaternionMatrix(z, w)

    def scale(self, s: float) -> "QuaternionMatrix":
        return QuaternionMatrix(self.z * s, self.w * s)

    def conj_transpose(self) -> "QuaternionMatrix":
        # conj(z + wj) = conj(z) - wj, then transpose
        return QuaternionMatrix(self.z.conj().T, -self.w.T)

    def minor(self, n: int) -> "QuaternionMatrix":
        return QuaternionMatrix(self.z[:n, :n].copy(), self.w[:n, :n].copy())

    def frobenius_norm(self) -> float:
        return math.sqrt(2.0 * (np.abs(self.z) ** 2 + np.abs(self.w) ** 2).sum())


def embed(M: QuaternionMatrix) -> np.ndarray:
    """Embed an NxN quaternionic matrix as a structured 2Nx2N complex matrix.

    Additive and multiplicative: embed(A @ B) = embed(A) @ embed(B).
    """
    return embed_zw(M.z, M.w)


def embed_zw(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Embedding on raw component arrays; supports leading batch dimensions."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    n = z.shape[-1]
    out = np.zeros(z.shape[:-2] + (2 * n, 2 * n), dtype=complex)
    out[..., ::2, ::2] = z
    out[..., ::2, 1::2] = w
    out[..., 1::2, ::2] = -w.conj()
    out[..., 1::2, 1::2] = z.conj()
    return out


def symplectic_j(n: int) -> np.ndarray:
    """Block diagonal of n copies of [[0, 1], [-1, 0]] (= embedding of jI)."""
    out = np.zeros((2 * n, 2 * n))
    out[::2, 1::2] = np.eye(n)
    out[1::2, ::2] = -np.eye(n)
    return out


def structure_defect(M: np.ndarray) -> float:
    """Max entrywise deviation from J conj(M) J^{-1} = M."""
    M = np.asarray(M, dtype=complex)
    n2 = M.shape[0]
    if M.ndim != 2 or M.shape[0] != M.shape[1] or n2 % 2 != 0:
        raise ValueError("expected a square matrix of even size")
    # J conj(M) J^{-1} per 2x2 block: [[B22*, -B21*], [-B12*, B11*]]
    R = np.empty_like(M)
    R[::2, ::2] = M[1::2, 1::2].conj()
    R[::2, 1::2] = -M[1::2, ::2].conj()
    R[1::2, ::2] = -M[::2, 1::2].conj()
    R[1::2, 1::2] = M[::2, ::2].conj()
    return float(np.abs(R - M).max())


def is_structured(M: np.ndarray, tol: float | None = None) -> bool:
    if tol is None:
        tol = STRUCT_TOL * (float(np.abs(M).max(initial=0.0)) + 1.0)
    return structure_defect(M) <= tol


def extract_quaternionic(M: np.ndarray, tol: float | None = None) -> QuaternionMatrix:
    """Inverse of :func:`embed` on structured matrices.

    Raises StructureViolation when the block-structure defect exceeds the
    tolerance (default STRUCT_TOL scaled by the matrix max-norm).  The two
    redundant copies of each component are averaged, so the round trip
    embed(extract(M)) recovers the structured part of M exactly.
    """
    M = np.asarray(M, dtype=complex)
    scale = float(np.abs(M).max(initial=0.0)) + 1.0
    if tol is None:
        tol = STRUCT_TOL * scale
    defect = structure_defect(M)
    if defect > tol:
        raise StructureViolation(
            f"structure defect {defect:.3e} exceeds tolerance {tol:.3e}")
    z = 0.5 * (M[::2, ::2] + M[1::2, 1::2].conj())
    w = 0.5 * (M[::2, 1::2] - M[1::2, ::2].conj())
    return QuaternionMatrix(z, w)
