"""Reference laws, the joint eigenvalue density, and comparison machinery.

Theoretical laws are expressed as LawSpec objects: a seeded generator for
the law plus the scalar statistics used to compare it against Monte Carlo
samples.  Set-valued laws (radii decompositions, high-power spectra) are
compared through order statistics, since the underlying results are
identities between point processes, not labeled vectors.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.integrate
import scipy.interpolate
import scipy.stats


class EmptySample(ValueError):
    """KS comparison received an empty sample."""


class Divergent(RuntimeError):
    """Numeric Gamma_V normalization failed to converge."""


class HypothesisViolated(ValueError):
    """A reference law was requested outside its theorem's hypotheses."""


class DegeneratePair(ValueError):
    """Angle law requested for coinciding eigenvalues."""


DEFAULT_KS_P = 1e-3
GAMMA_V_KNOTS = 4096
GAMMA_V_TAIL = 1e-14


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; independent streams come from distinct keys."""
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**128 - 1)))


def gamma_sample(rng: np.random.Generator, k: float, size=None):
    """Standard (unit-scale) gamma variate(s) with shape k."""
    if k <= 0:
        raise ValueError("gamma shape must be positive")
    return rng.gamma(shape=k, size=size)


def beta_sample(rng: np.random.Generator, a: float, b: float, size=None):
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    return rng.beta(a, b, size=size)


def complex_normal(rng: np.random.Generator, size=None):
    """Standard complex Gaussian: E|z|^2 = 1, real and imag parts N(0, 1/2)."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    g = rng.standard_normal(shape + (2,)) * math.sqrt(0.5)
    out = g[..., 0] + 1j * g[..., 1]
    return complex(out) if size is None else out


# ---------------------------------------------------------------------------
# Gamma_V distributions

@dataclass(frozen=True)
class GammaVSpec:
    """Distribution with density t^(alpha-1) e^(-V(t)) / Gamma_V(alpha).

    Named potentials:
      gaussian            V(t) = t                   -> gamma(alpha)
      truncated, param=n  V(t) = -(2n-1) log(1-t)    -> Beta(alpha, 2n)
      spherical, param=N  V(t) = 2(N+1) log(1+t)     -> Beta-prime(alpha, 2N+2-alpha)
    """

    potential: str
    alpha: float
    param: int | None = None

    def __post_init__(self):
        if self.potential not in ("gaussian", "truncated", "spherical"):
            raise ValueError(f"unknown potential {self.potential!r}")
        if self.potential != "gaussian" and (self.param is None or self.param < 1):
            raise ValueError("truncated/spherical potentials need param >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @property
    def upper(self) -> float:
        return 1.0 if self.potential == "truncated" else math.inf

    def neg_log_weight(self, t):
        """V(t) evaluated on the support."""
        t = np.asarray(t, dtype=float)
        if self.potential == "gaussian":
            return t
        if self.potential == "truncated":
            return -(2 * self.param - 1) * np.log1p(-t)
        return 2 * (self.param + 1) * np.log1p(t)

    def integrand(self, t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros_like(arr)
        ok = (arr > 0) & (arr < self.upper)
        out[ok] = arr[ok] ** (self.alpha - 1) * np.exp(-self.neg_log_weight(arr[ok]))
        return out.reshape(np.shape(t)) if np.ndim(t) else float(out[0])

    def closed_form(self):
        """The matching scipy.stats distribution, used for cross-checks."""
        if self.potential == "gaussian":
            return scipy.stats.gamma(self.alpha)
        if self.potential == "truncated":
            return scipy.stats.beta(self.alpha, 2 * self.param)
        b = 2 * (self.param + 1) - self.alpha
        if b <= 0:
            raise Divergent("spherical Gamma_V integral diverges for this alpha")
        return scipy.stats.betaprime(self.alpha, b)


class _GammaVTable:
    """Normalization, CDF knots and monotone interpolants for one spec."""

    def __init__(self, spec: GammaVSpec):
        self.spec = spec

        def quad(f, a, b):
            # heavy-tail cutoff probes trip advisory IntegrationWarnings
            # even when the estimate is accurate; rely on abserr instead
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
                return scipy.integrate.quad(f, a, b, limit=400)

        total, err = quad(spec.integrand, 0, spec.upper)
        if not np.isfinite(total) or total <= 0 or err > 1e-8 * max(total, 1.0):
            raise Divergent(f"Gamma_V({spec.alpha}) integral did not converge")
        self.normalization = total
        if math.isinf(spec.upper):
            hi = 1.0
            while quad(spec.integrand, hi, math.inf)[0] > GAMMA_V_TAIL * total:
                hi *= 2.0
                if hi > 1e300:
                    raise Divergent("integrand tail does not decay")
            # knots dense near zero through the map t = x / (1 - x)
            xmax = hi / (1.0 + hi)
            x = np.linspace(0.0, xmax, GAMMA_V_KNOTS)
            knots = x / (1.0 - x)
        else:
            knots = np.linspace(0.0, spec.upper, GAMMA_V_KNOTS)
        segs = [quad(spec.integrand, knots[i], knots[i + 1])[0]
                for i in range(len(knots) - 1)]
        cdf = np.concatenate([[0.0], np.cumsum(segs)]) / total
        cdf = np.minimum(np.maximum.accumulate(cdf), 1.0)
        self.knots = knots
        self.cdf_values = cdf
        self._cdf = scipy.interpolate.PchipInterpolator(knots, cdf)
        keep = np.concatenate([[True], np.diff(cdf) > 0])
        self._inv = scipy.interpolate.PchipInterpolator(cdf[keep], knots[keep])
        self._inv_lo = cdf[keep][0]
        self._inv_hi = cdf[keep][-1]

    def pdf(self, t):
        return self.spec.integrand(t) / self.normalization

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.clip(self._cdf(np.clip(t, self.knots[0], self.knots[-1])), 0.0, 1.0)
        out = np.where(t >= self.knots[-1], 1.0, out)
        out = np.where(t <= 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = np.clip(np.asarray(u, dtype=float), self._inv_lo, self._inv_hi)
        return self._inv(u)


_GAMMA_V_CACHE: dict[GammaVSpec, _GammaVTable] = {}


def _gamma_v_table(spec: GammaVSpec) -> _GammaVTable:
    if spec not in _GAMMA_V_CACHE:
        _GAMMA_V_CACHE[spec] = _GammaVTable(spec)
    return _GAMMA_V_CACHE[spec]


def gamma_v_normalization(spec: GammaVSpec) -> float:
    return _gamma_v_table(spec).normalization


def gamma_v_pdf(spec: GammaVSpec, t):
    return _gamma_v_table(spec).pdf(t)


def gamma_v_cdf(spec: GammaVSpec, t):
    return _gamma_v_table(spec).cdf(t)


def gamma_v_sample(spec: GammaVSpec, rng: np.random.Generator, size=None):
    """Inverse-CDF sampling on the adaptive knot grid."""
    table = _gamma_v_table(spec)
    return table.ppf(rng.uniform(size=size))


# ---------------------------------------------------------------------------
# Law specifications

@dataclass(frozen=True)
class LawSpec:
    """A theoretical law: a seeded generator plus comparison statistics."""

    name: str
    generator: object  # callable(rng, size) -> ndarray, rows are draws
    descriptor: tuple


def kostlan_reference(N: int, conditioned_zero: bool = False) -> LawSpec:
    """Squared radii law: sorted independent gamma(2i) draws.

    i runs over 1..N, or 2..N when conditioning the first eigenvalue at the
    origin.
    """
    if N < 1:
        raise ValueError("N must be positive")
    shapes = np.arange(2 if conditioned_zero else 1, N + 1) * 2.0

    def generate(rng, size):
        draws = rng.gamma(shape=shapes, size=(size, len(shapes)))
        return np.sort(draws, axis=1)

    stats = tuple(f"order_{k}" for k in range(1, len(shapes) + 1)) + ("sum",)
    name = f"kostlan_radii(N={N}{', lambda1=0' if conditioned_zero else ''})"
    return LawSpec(name, generate, stats)


def radii_reference(kind: str, N: int, trunc_n: int | None = None,
                    factors: int | None = None) -> LawSpec:
    """Squared-radii law of the named radially symmetric ensemble.

    ginibre: independent gamma(2i).  truncated_unitary: independent
    Beta(2i, 2n).  spherical: independent numeric Gamma_V draws with the
    spherical potential (Beta-prime(2i, 2N+2-2i) in closed form).  product:
    the experimental hypothesis of per-radius products of `factors`
    independent gamma(2i) draws, checked only by self-consistency.
    """
    if kind == "ginibre":
        return kostlan_reference(N)
    if kind == "truncated_unitary":
        if not trunc_n or trunc_n < 1:
            raise ValueError("truncated radii law needs trunc_n >= 1")
        alphas = 2.0 * np.arange(1, N + 1)

        def gen_truncated(rng, size):
            return np.sort(rng.beta(alphas, 2.0 * trunc_n, size=(size, N)), axis=1)

        stats = tuple(f"order_{k}" for k in range(1, N + 1)) + ("sum",)
        return LawSpec(f"truncated_radii(N={N}, n={trunc_n})", gen_truncated, stats)
    if kind == "spherical":
        specs = [GammaVSpec("spherical", 2.0 * i, N) for i in range(1, N + 1)]

        def gen_spherical(rng, size):
            cols = np.column_stack([gamma_v_sample(s, rng, size) for s in specs])
            return np.sort(cols, axis=1)

        stats = tuple(f"order_{k}" for k in range(1, N + 1)) + ("sum",)
        return LawSpec(f"spherical_radii(N={N})", gen_spherical, stats)
    if kind == "product":
        if not factors or factors < 1:
            raise ValueError("product radii law needs factors >= 1")
        shapes = 2.0 * np.arange(1, N + 1)

        def gen_product(rng, size):
            draws = rng.gamma(shape=shapes, size=(size, factors, N)).prod(axis=1)
            return np.sort(draws, axis=1)

        stats = tuple(f"order_{k}" for k in range(1, N + 1)) + ("sum",)
        return LawSpec(f"product_radii(N={N}, k={factors}, experimental)",
                       gen_product, stats)
    raise ValueError(f"no radii law for ensemble kind {kind!r}")


def highpowers_reference(N: int, M: int, negative_control: bool = False) -> LawSpec:
    """Law of the conjugate-duplicated M-th powers, valid for M >= 2N.

    negative_control=True builds the same functional form below the
    theorem's hypothesis, for descriptive comparisons only.
    """
    if M < 2 * N and not negative_control:
        raise HypothesisViolated(f"high-powers law requires M >= 2N, got M={M}")
    shapes = np.arange(1, N + 1) * 2.0

    def generate(rng, size):
        radii = rng.gamma(shape=shapes, size=(size, N)) ** (M / 2.0)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=(size, N))
        z = radii * np.exp(1j * theta)
        return np.concatenate([z, z.conj()], axis=1)

    return LawSpec(f"highpowers(N={N}, M={M})", generate,
                   ("sorted_moduli", "sorted_real"))


def phi_disk(z, w):
    """Map a pair of complex numbers into the open unit disk."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = z / np.sqrt(1.0 + np.abs(z) ** 2 + np.abs(w) ** 2)
    return complex(out) if out.ndim == 0 else out


def angle_reference(lambda1: complex, lambda2: complex, N: int) -> LawSpec:
    """Angle between eigenvectors of two fixed scaled eigenvalues.

    Draws phi( X / (sqrt(2N)(l1 - l2)), Y / (sqrt(2N)(conj l1 - l2)) ) with
    X, Y independent standard complex Gaussians.
    """
    if lambda1 == lambda2:
        raise DegeneratePair("angle law needs distinct eigenvalues")
    if lambda1.imag == 0 or lambda2.imag == 0:
        raise DegeneratePair("angle law needs non-real eigenvalues")
    s = math.sqrt(2 * N)

    def generate(rng, size):
        x = complex_normal(rng, size)
        y = complex_normal(rng, size)
        return phi_disk(x / (s * (lambda1 - lambda2)),
                        y / (s * (np.conj(lambda1) - lambda2)))

    return LawSpec(f"angle({lambda1}, {lambda2}, N={N})", generate,
                   ("angle_modulus",))


def angle_conditioned_sq_sample(rng: np.random.Generator, N: int, size: int):
    """|angle|^2 between the eigenvector at 0 and a uniformly chosen other.

    Built from the disk-map representation with |lambda_i|^2 ~ gamma(2i),
    i uniform on 2..N.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    i = rng.integers(2, N + 1, size=size)
    lam2 = rng.gamma(shape=2.0 * i)
    x2 = np.abs(complex_normal(rng, size)) ** 2
    y2 = np.abs(complex_normal(rng, size)) ** 2
    return x2 / (lam2 + x2 + y2)


def angle_beta_mixture_sample(rng: np.random.Generator, N: int, size: int):
    """The matching mixture law: Beta(1, I+1) with I uniform on {4, 6, ..., 2N}."""
    if N < 2:
        raise ValueError("need N >= 2")
    big_i = 2.0 * rng.integers(2, N + 1, size=size)
    return rng.beta(1.0, big_i + 1.0)


def overlap_product_sample(rng: np.random.Generator, lambdas, size: int,
                           scaled_by: float | None = None):
    """Diagonal overlap draws at fixed eigenvalues via the product law.

    lambdas are the N upper-half-plane representatives, the first being the
    conditioning one.  With scaled_by = 2N the lambdas are interpreted as
    eigenvalues of the matrix scaled by sqrt(2N); unscaled eigenvalues use
    scaled_by = None (factor 1).
    """
    lambdas = np.asarray(lambdas, dtype=complex)
    lam1, rest = lambdas[0], lambdas[1:]
    c = 1.0 if scaled_by is None else float(scaled_by)
    d_same = c * np.abs(lam1 - rest) ** 2
    d_conj = c * np.abs(lam1 - rest.conj()) ** 2
    x2 = np.abs(complex_normal(rng, (size, rest.size))) ** 2
    y2 = np.abs(complex_normal(rng, (size, rest.size))) ** 2
    return np.prod(1.0 + x2 / d_same + y2 / d_conj, axis=1)


def conditional_overlap_mean(lambdas, scaled_by: float | None = None) -> float:
    """E[O_{1,1} | eigenvalues]: the product formula with unit numerators."""
    lambdas = np.asarray(lambdas, dtype=complex)
    lam1, rest = lambdas[0], lambdas[1:]
    c = 1.0 if scaled_by is None else float(scaled_by)
    return float(np.prod(1.0 + 1.0 / (c * np.abs(lam1 - rest) ** 2)
                         + 1.0 / (c * np.abs(lam1 - rest.conj()) ** 2)))


def overlap_conditioned_product_sample(rng: np.random.Generator, N: int, size: int):
    """O_{1,1} draws conditioned on lambda_1 = 0.

    The distances to the remaining eigenvalues collapse to the squared radii,
    which are independent gamma(2k) draws, so
    O = prod_{k=2..N} (1 + gamma_2 / gamma_{2k}).
    """
    if N < 2:
        raise ValueError("need N >= 2")
    shapes = 2.0 * np.arange(2, N + 1)
    radii2 = rng.gamma(shape=shapes, size=(size, N - 1))
    numer = rng.gamma(shape=2.0, size=(size, N - 1))
    return np.prod(1.0 + numer / radii2, axis=1)


def overlap_conditioned_exact_sample(rng: np.random.Generator, N: int, size: int):
    """The closed finite-N law of O_{1,1} at lambda_1 = 0: Beta(4, 2(N-1))^{-1}.

    The beta-gamma telescope over the N-1 independent factors
    beta(2k, 2)^{-1}, k = 2..N, stacks the second parameters to 2(N-1);
    at N = 2 the single factor 1 + gamma_2/gamma_4 is Beta(4, 2)^{-1} by
    definition.  (Quoting the second parameter as 2N instead produces a
    bias that two-sample tests detect at 1e5 draws.)
    """
    if N < 2:
        raise ValueError("need N >= 2")
    return 1.0 / rng.beta(4.0, 2.0 * (N - 1), size=size)


def overlap_limit_sample(rng: np.random.Generator, size: int):
    """Large-N limit of O_{1,1} / N at lambda_1 = 0: (gamma_4 / 2)^{-1}.

    Equivalently O_{1,1} / (2N) converges to gamma_4^{-1}.
    """
    return 2.0 / rng.gamma(shape=4.0, size=size)


def overlap_reference(N: int, lambdas=None, conditioned_zero: bool = False) -> LawSpec:
    """Diagonal-overlap law, either at fixed eigenvalues or conditioned at 0."""
    if N < 2:
        raise ValueError("need N >= 2")
    if conditioned_zero:
        def generate(rng, size):
            return overlap_conditioned_exact_sample(rng, N, size)
        return LawSpec(f"overlap_conditioned(N={N})", generate, ("overlap",))
    if lambdas is None:
        raise ValueError("need eigenvalues unless conditioning at zero")
    lams = np.asarray(lambdas, dtype=complex)

    def generate(rng, size):
        return overlap_product_sample(rng, lams, size)

    return LawSpec(f"overlap_product(N={N})", generate, ("overlap",))


# ---------------------------------------------------------------------------
# Joint eigenvalue density

def log_partition(N: int) -> float:
    """log Z_N with Z_N = 2^N N! prod_{i<=N} (2i-1)!."""
    return (N * math.log(2.0) + math.lgamma(N + 1)
            + sum(math.lgamma(2 * i) for i in range(1, N + 1)))


def log_joint_density(lambdas, normalized: bool = False,
                      with_gaussian_weight: bool = False) -> float:
    """log of the joint density of the upper-half-plane representatives.

    Density with respect to the product Gaussian reference measure; the
    optional flag multiplies in the reference weight itself.  Returns -inf
    at configurations with coinciding points.
    """
    lam = np.asarray(lambdas, dtype=complex).ravel()
    n = lam.size
    diff = lam[:, None] - lam[None, :]
    conj_diff = lam[:, None] - lam[None, :].conj()
    iu = np.triu_indices(n, k=1)
    with np.errstate(divide="ignore"):
        log_val = (2.0 * np.log(np.abs(diff[iu])).sum()
                   + 2.0 * np.log(np.abs(conj_diff[np.triu_indices(n)])).sum())
    if normalized:
        log_val -= log_partition(n)
    if with_gaussian_weight:
        log_val += float(-(np.abs(lam) ** 2).sum() - n * math.log(math.pi))
    return float(log_val)


def joint_density_eval(lambdas, normalized: bool = False,
                       with_gaussian_weight: bool = False) -> float:
    log_val = log_joint_density(lambdas, normalized, with_gaussian_weight)
    if log_val == -math.inf:
        return 0.0
    try:
        return math.exp(log_val)
    except OverflowError:
        # interaction factors overflow doubles well before N ~ 20;
        # callers needing large N work with log_joint_density directly
        return math.inf


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov comparisons

def ks_statistic(sample, cdf) -> tuple[float, float]:
    """One-sample KS distance and asymptotic Kolmogorov p-value."""
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size == 0:
        raise EmptySample("empty sample")
    res = scipy.stats.ks_1samp(sample, cdf, method="asymp")
    return float(res.statistic), float(res.pvalue)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample KS distance and asymptotic p-value."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise EmptySample("empty sample")
    res = scipy.stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def ks_threshold(n: int, m: int | None = None, p: float = DEFAULT_KS_P) -> float:
    """Asymptotic KS distance quantile at level p."""
    c = math.sqrt(-0.5 * math.log(p / 2.0))
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


# ---------------------------------------------------------------------------
# Experiment reports

@dataclass
class StatResult:
    name: str
    n: int
    ks_distance: float
    p_value: float
    threshold: float
    verdict: bool
    asserted: bool = True


@dataclass
class MomentRow:
    name: str
    empirical: float
    theoretical: float
    stderr: float


@dataclass
class ExperimentReport:
    """Machine-readable verdict of one verification battery."""

    law: str
    trials: int
    statistics: list = field(default_factory=list)
    moments: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0
    exclusions: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    experimental: bool = False
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.verdict for s in self.statistics if s.asserted)

    def add_stat(self, name, n, distance, p_value, threshold=None,
                 asserted=True, m=None):
        if threshold is None:
            threshold = ks_threshold(n, m)
        self.statistics.append(StatResult(
            name=name, n=int(n), ks_distance=float(distance),
            p_value=float(p_value), threshold=float(threshold),
            verdict=bool(distance < threshold), asserted=asserted))

    def add_moment(self, name, empirical, theoretical, stderr):
        self.moments.append(MomentRow(name, float(empirical),
                                      float(theoretical), float(stderr)))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, default=str)

    def csv_rows(self):
        """One row per statistic: name, n, ks_distance, p_value, threshold, verdict."""
        for s in self.statistics:
            yield {"name": s.name, "n": s.n, "ks_distance": s.ks_distance,
                   "p_value": s.p_value, "threshold": s.threshold,
                   "verdict": "pass" if s.verdict else "fail"}
