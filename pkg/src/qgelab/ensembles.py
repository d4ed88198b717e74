"""Samplers for the quaternionic Gaussian ensemble and its radial relatives.

Every sampler is a pure function of (config, trial index): the per-trial
stream is a counter-based Philox generator keyed by seed XOR trial, so
trials are order-independent and embarrassingly parallel.  Within a trial
the draw order is fixed and documented by each sampler.

Matrices are sampled unscaled; the circular scaling (division by
sqrt(2N)) is applied to eigenvalues in :func:`spectrum`, which is the same
thing as scaling the matrix since the eigenvalue map is homogeneous.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .linalg import PairingFailure, Singular, pair_conjugates
from .quat import QuaternionMatrix, embed_zw, extract_quaternionic

KINDS = ("ginibre", "schur_ginibre", "schur_conditioned_zero",
         "truncated_unitary", "product", "spherical")
SCALINGS = ("unscaled", "circular")

TAU_PAIR = 1e-6
MAX_REDRAWS = 16


class RankDeficient(RuntimeError):
    """Gram-Schmidt hit a numerically zero column (probability zero)."""


@dataclass(frozen=True)
class EnsembleConfig:
    kind: str
    N: int
    scaling: str = "unscaled"
    seed: int = 0
    trunc_n: int | None = None   # n for truncated_unitary
    factors: int | None = None   # k for product

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.kind == "truncated_unitary" and (self.trunc_n or 0) < 1:
            raise ValueError("truncated_unitary requires trunc_n >= 1")
        if self.kind == "product" and (self.factors or 0) < 1:
            raise ValueError("product requires factors >= 1")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Philox stream for one trial, keyed by seed XOR trial index."""
    return np.random.Generator(np.random.Philox(key=(int(seed) ^ int(trial)) & (2**128 - 1)))


def _ginibre_zw(rng: np.random.Generator, n: int, batch: int | None = None):
    """Component pair of one (or a batch of) quaternionic Ginibre matrices.

    Coordinates a, b, c, d are i.i.d. N(0, 1/2), so z = a + bi and
    w = c + di are standard complex Gaussians.
    """
    shape = (n, n, 4) if batch is None else (batch, n, n, 4)
    g = rng.standard_normal(shape) * math.sqrt(0.5)
    return g[..., 0] + 1j * g[..., 1], g[..., 2] + 1j * g[..., 3]


def sample_ginibre(cfg: EnsembleConfig, trial: int = 0) -> QuaternionMatrix:
    """One quaternionic Ginibre matrix; circular scaling divides by sqrt(2N)."""
    z, w = _ginibre_zw(trial_rng(cfg.seed, trial), cfg.N)
    m = QuaternionMatrix(z, w)
    if cfg.scaling == "circular":
        m = m.scale(1.0 / math.sqrt(2 * cfg.N))
    return m


def sample_complex_ginibre(rng: np.random.Generator, n: int,
                           batch: int | None = None) -> np.ndarray:
    """Complex Ginibre matrix with standard complex Gaussian entries."""
    shape = (n, n, 2) if batch is None else (batch, n, n, 2)
    g = rng.standard_normal(shape) * math.sqrt(0.5)
    return g[..., 0] + 1j * g[..., 1]


def _gram_schmidt_zw(z: np.ndarray, w: np.ndarray):
    """Modified Gram-Schmidt on quaternionic columns, batch-aware.

    Projection coefficients are quaternion-valued and multiply columns on
    the right, so orthonormality holds in the quaternionic inner product
    and the embedded matrix is unitary.  Returns (z, w, ok) where ok flags
    batch members whose columns stayed numerically independent.
    """
    z = np.array(z, dtype=complex, copy=True)
    w = np.array(w, dtype=complex, copy=True)
    squeeze = z.ndim == 2
    if squeeze:
        z, w = z[None], w[None]
    b, m, _ = z.shape
    ok = np.ones(b, dtype=bool)
    for j in range(m):
        zj, wj = z[:, :, j], w[:, :, j]
        for k in range(j):
            zu, wu = z[:, :, k], w[:, :, k]
            zq = (zu.conj() * zj + wu * wj.conj()).sum(axis=1)
            wq = (zu.conj() * wj - wu * zj.conj()).sum(axis=1)
            zj = zj - (zu * zq[:, None] - wu * wq.conj()[:, None])
            wj = wj - (zu * wq[:, None] + wu * zq.conj()[:, None])
        norm = np.sqrt((np.abs(zj) ** 2 + np.abs(wj) ** 2).sum(axis=1))
        ok &= norm > m * 1e-12
        norm = np.where(norm == 0.0, 1.0, norm)
        z[:, :, j] = zj / norm[:, None]
        w[:, :, j] = wj / norm[:, None]
    if squeeze:
        return z[0], w[0], bool(ok[0])
    return z, w, ok


def sample_truncated_unitary(cfg: EnsembleConfig, trial: int = 0) -> QuaternionMatrix:
    """Top-left N x N minor of a Haar quaternionic unitary of size N + n.

    Haar sampling orthonormalizes the columns of a Ginibre draw in
    quaternion arithmetic; rank-deficient draws (probability zero) are
    redrawn from the continuation of the same trial stream.
    """
    rng = trial_rng(cfg.seed, trial)
    m = cfg.N + cfg.trunc_n
    for _ in range(MAX_REDRAWS):
        z, w = _ginibre_zw(rng, m)
        zq, wq, ok = _gram_schmidt_zw(z, w)
        if ok:
            return QuaternionMatrix(zq[:cfg.N, :cfg.N], wq[:cfg.N, :cfg.N])
    raise RankDeficient("Gram-Schmidt failed repeatedly")


def sample_product(cfg: EnsembleConfig, trial: int = 0) -> QuaternionMatrix:
    """Product of `factors` independent Ginibre matrices, left to right."""
    rng = trial_rng(cfg.seed, trial)
    out = None
    for _ in range(cfg.factors):
        z, w = _ginibre_zw(rng, cfg.N)
        g = QuaternionMatrix(z, w)
        out = g if out is None else out @ g
    return out


def sample_spherical(cfg: EnsembleConfig, trial: int = 0) -> QuaternionMatrix:
    """G1^{-1} G2 for independent Ginibre G1, G2, via the embedded inverse."""
    from .linalg import invert

    rng = trial_rng(cfg.seed, trial)
    for _ in range(MAX_REDRAWS):
        z1, w1 = _ginibre_zw(rng, cfg.N)
        z2, w2 = _ginibre_zw(rng, cfg.N)
        try:
            inv1 = invert(embed_zw(z1, w1))
        except Singular:
            continue
        q1inv = extract_quaternionic(inv1)
        return q1inv @ QuaternionMatrix(z2, w2)
    raise Singular("spherical ensemble: G1 repeatedly singular")


def sample_matrix(cfg: EnsembleConfig, trial: int = 0) -> QuaternionMatrix:
    """Dispatch on cfg.kind for the matrix-valued ensembles (unscaled)."""
    if cfg.kind == "ginibre":
        z, w = _ginibre_zw(trial_rng(cfg.seed, trial), cfg.N)
        return QuaternionMatrix(z, w)
    if cfg.kind == "truncated_unitary":
        return sample_truncated_unitary(cfg, trial)
    if cfg.kind == "product":
        return sample_product(cfg, trial)
    if cfg.kind == "spherical":
        return sample_spherical(cfg, trial)
    raise ValueError(f"{cfg.kind} does not sample a dense matrix")


# ---------------------------------------------------------------------------
# Spectra

@dataclass
class SpectrumPairs:
    """Upper-half-plane representatives of the N eigenvalue spheres."""

    lambdas: np.ndarray
    pairing_residual: float
    scaling: str = "unscaled"


def spectrum(M: QuaternionMatrix, scaling: str = "unscaled") -> SpectrumPairs:
    """Eigenvalue sphere representatives of a quaternionic matrix.

    Embeds, solves the 2N x 2N eigenproblem, pairs the spectrum across the
    real axis and keeps the upper-half-plane points sorted by (Re, Im).
    Circular scaling divides the representatives by sqrt(2N).
    """
    if scaling not in SCALINGS:
        raise ValueError(f"unknown scaling {scaling!r}")
    values = np.linalg.eigvals(embed_zw(M.z, M.w))
    reps, residual = pair_conjugates(values)
    if residual > TAU_PAIR:
        raise PairingFailure(f"pairing residual {residual:.3e} above {TAU_PAIR:g}")
    if scaling == "circular":
        reps = reps / math.sqrt(2 * M.size)
    return SpectrumPairs(lambdas=reps, pairing_residual=residual, scaling=scaling)


@dataclass
class SpectraBatch:
    """Spectra of many trials with degeneracy bookkeeping."""

    lambdas: np.ndarray            # (kept, N) upper-half representatives
    residuals: np.ndarray
    n_trials: int
    n_excluded: int
    scaling: str

    @property
    def squared_radii(self) -> np.ndarray:
        return np.sort(np.abs(self.lambdas) ** 2, axis=1)


def _embed_batch(cfg: EnsembleConfig, trials: range) -> tuple[np.ndarray, np.ndarray]:
    """Embedded sample matrices for a range of trials; returns (mats, ok)."""
    n = cfg.N
    if cfg.kind == "ginibre":
        zs = np.empty((len(trials), n, n), dtype=complex)
        ws = np.empty_like(zs)
        for i, t in enumerate(trials):
            zs[i], ws[i] = _ginibre_zw(trial_rng(cfg.seed, t), n)
        return embed_zw(zs, ws), np.ones(len(trials), dtype=bool)
    if cfg.kind == "truncated_unitary":
        m = n + cfg.trunc_n
        zs = np.empty((len(trials), m, m), dtype=complex)
        ws = np.empty_like(zs)
        for i, t in enumerate(trials):
            zs[i], ws[i] = _ginibre_zw(trial_rng(cfg.seed, t), m)
        zq, wq, ok = _gram_schmidt_zw(zs, ws)
        return embed_zw(zq[:, :n, :n], wq[:, :n, :n]), ok
    if cfg.kind == "product":
        factors_z = np.empty((len(trials), cfg.factors, n, n), dtype=complex)
        factors_w = np.empty_like(factors_z)
        for i, t in enumerate(trials):
            rng = trial_rng(cfg.seed, t)
            for k in range(cfg.factors):
                factors_z[i, k], factors_w[i, k] = _ginibre_zw(rng, n)
        z, w = factors_z[:, 0], factors_w[:, 0]
        for k in range(1, cfg.factors):
            z, w = (z @ factors_z[:, k] - w @ factors_w[:, k].conj(),
                    z @ factors_w[:, k] + w @ factors_z[:, k].conj())
        return embed_zw(z, w), np.ones(len(trials), dtype=bool)
    if cfg.kind == "spherical":
        zs1 = np.empty((len(trials), n, n), dtype=complex)
        ws1 = np.empty_like(zs1)
        zs2 = np.empty_like(zs1)
        ws2 = np.empty_like(zs1)
        for i, t in enumerate(trials):
            rng = trial_rng(cfg.seed, t)
            zs1[i], ws1[i] = _ginibre_zw(rng, n)
            zs2[i], ws2[i] = _ginibre_zw(rng, n)
        e1 = embed_zw(zs1, ws1)
        e2 = embed_zw(zs2, ws2)
        cond = np.linalg.cond(e1)
        ok = np.isfinite(cond) & (cond < 1e12)
        mats = np.full_like(e1, np.nan)
        if ok.any():
            mats[ok] = np.linalg.solve(e1[ok], e2[ok])
        return mats, ok
    raise ValueError(f"{cfg.kind} has no batched spectra path")


def spectra_batch(cfg: EnsembleConfig, n_trials: int, threads: int = 1,
                  chunk: int = 2048) -> SpectraBatch:
    """Spectra for trials 0..n_trials-1.

    Per-trial sampling is reproduced exactly from the trial streams, linear
    algebra runs chunked (and optionally threaded); trials whose pairing
    residual exceeds TAU_PAIR or whose sampler flagged degeneracy are
    excluded and counted.
    """
    n = cfg.N
    chunks = [range(s, min(s + chunk, n_trials)) for s in range(0, n_trials, chunk)]

    def run(tr: range):
        mats, ok = _embed_batch(cfg, tr)
        values = np.full((len(tr), 2 * n), np.nan, dtype=complex)
        if ok.any():
            values[ok] = np.linalg.eigvals(mats[ok])
        out = np.empty((len(tr), n), dtype=complex)
        res = np.empty(len(tr))
        for i in range(len(tr)):
            if not ok[i]:
                res[i] = np.inf
                continue
            out[i], res[i] = pair_conjugates(values[i])
        return out, res

    # small-matrix eigensolves lose badly to BLAS-internal threading, so
    # pin BLAS to one thread and parallelize across trial chunks instead
    with threadpool_limits(limits=1):
        if threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, chunks))
        else:
            results = [run(c) for c in chunks]

    lambdas = np.concatenate([r[0] for r in results], axis=0)
    residuals = np.concatenate([r[1] for r in results])
    keep = residuals <= TAU_PAIR
    if cfg.scaling == "circular":
        lambdas = lambdas / math.sqrt(2 * n)
    return SpectraBatch(lambdas=lambdas[keep], residuals=residuals[keep],
                        n_trials=n_trials, n_excluded=int((~keep).sum()),
                        scaling=cfg.scaling)


# ---------------------------------------------------------------------------
# Schur-form sampler

@dataclass
class SchurForm:
    """Upper-triangular 2x2-block form: diag(lambda_i, conj lambda_i) blocks
    on the diagonal, quaternionic Gaussian blocks above it."""

    lambdas: np.ndarray   # (N,) upper-half-plane diagonal
    u: np.ndarray         # (N, N), used strictly above the diagonal
    v: np.ndarray

    @property
    def size(self) -> int:
        return self.lambdas.size

    def expanded(self) -> np.ndarray:
        """The dense 2N x 2N upper-triangular complex matrix."""
        n = self.size
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        for i in range(n):
            out[2 * i, 2 * i] = self.lambdas[i]
            out[2 * i + 1, 2 * i + 1] = self.lambdas[i].conjugate()
        for i in range(n):
            for j in range(i + 1, n):
                out[2 * i, 2 * j] = self.u[i, j]
                out[2 * i, 2 * j + 1] = self.v[i, j]
                out[2 * i + 1, 2 * j] = -self.v[i, j].conjugate()
                out[2 * i + 1, 2 * j + 1] = self.u[i, j].conjugate()
        return out


def sample_schur(cfg: EnsembleConfig, trial: int = 0) -> SchurForm:
    """Direct draw of the Schur form.

    Diagonal eigenvalues come from an independently sampled dense Ginibre
    matrix (they are independent of the off-diagonal blocks); u, v entries
    are i.i.d. standard complex Gaussians.  The conditioned variant pins
    lambda_1 = 0 and redraws the remaining diagonal with radii
    sqrt(gamma(2i)), i = 2..N, and angles uniform on (0, pi) -- the radii
    law is exact, the angular law is a flagged modeling choice.
    """
    if cfg.kind not in ("schur_ginibre", "schur_conditioned_zero"):
        raise ValueError("sample_schur needs a schur_* ensemble kind")
    rng = trial_rng(cfg.seed, trial)
    n = cfg.N
    if cfg.kind == "schur_ginibre":
        z, w = _ginibre_zw(rng, n)
        values = np.linalg.eigvals(embed_zw(z, w))
        lams, residual = pair_conjugates(values)
        if residual > TAU_PAIR:
            raise PairingFailure(f"pairing residual {residual:.3e}")
    else:
        lams = np.zeros(n, dtype=complex)
        if n > 1:
            radii = np.sqrt(rng.gamma(shape=2.0 * np.arange(2, n + 1)))
            theta = rng.uniform(0.0, math.pi, size=n - 1)
            lams[1:] = radii * np.exp(1j * theta)
    g = rng.standard_normal((n, n, 4)) * math.sqrt(0.5)
    u = g[..., 0] + 1j * g[..., 1]
    v = g[..., 2] + 1j * g[..., 3]
    return SchurForm(lambdas=lams, u=u, v=v)
