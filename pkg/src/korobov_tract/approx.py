"""Optimal approximation of finitely supported Fourier series.

Functions are held spectrally: ``f(x) = sum_h fhat[h] exp(2 pi i h.x)``.
The optimal algorithm in both settings keeps the Fourier coefficients of
the ``n`` frequencies with the largest kernel weights and drops the rest.
Average-case errors are cross-checked by Monte Carlo over Karhunen-Loeve
draws ``fhat[h] = sqrt(omega_h) * g_h`` with ``g_h`` standard normal.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import logsumexp

from .caps import Caps, resolve
from .complexity import avg_error, trace_tau
from .errors import KorobovError
from .sequences import WeightSpec
from .spectrum import EigenStream, exponent, sign_variants, top_frequencies

_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class SpectralFunction:
    """Finitely supported Fourier series on ``[0, 1]^d``; absent keys are zero."""

    d: int
    coeffs: Mapping[tuple[int, ...], complex] = field(default_factory=dict)
    meta: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        clean = {}
        for h, c in dict(self.coeffs).items():
            h = tuple(int(x) for x in h)
            if len(h) != self.d:
                raise ValueError(f"frequency {h} does not have dimension {self.d}")
            if c != 0:
                clean[h] = complex(c)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def basis(cls, h, coeff: complex = 1.0) -> "SpectralFunction":
        """``coeff * exp(2 pi i h.x)``."""
        h = tuple(h)
        return cls(len(h), {h: coeff})

    @classmethod
    def eigenfunction(cls, spec: WeightSpec, h) -> "SpectralFunction":
        """The unit-norm eigenfunction ``sqrt(omega_h) exp(2 pi i h.x)`` of the Korobov space."""
        e = exponent(spec, h)
        return cls.basis(h, spec.omega ** (0.5 * e.value))

    def __add__(self, other: "SpectralFunction") -> "SpectralFunction":
        self._check(other)
        out = dict(self.coeffs)
        for h, c in other.coeffs.items():
            out[h] = out.get(h, 0) + c
        return SpectralFunction(self.d, out)

    def __sub__(self, other: "SpectralFunction") -> "SpectralFunction":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "SpectralFunction":
        return SpectralFunction(self.d, {h: scalar * c for h, c in self.coeffs.items()})

    def _check(self, other):
        if self.d != other.d:
            raise ValueError("dimension mismatch")

    def __call__(self, x) -> complex:
        """Point value; for illustration only, no error computation needs it."""
        x = np.asarray(x, dtype=float)
        return complex(sum(c * np.exp(2j * np.pi * np.dot(h, x)) for h, c in self.coeffs.items()))


def l2_norm(f: SpectralFunction) -> float:
    return math.sqrt(math.fsum(abs(c) ** 2 for c in f.coeffs.values()))


def h_norm(spec: WeightSpec, f: SpectralFunction) -> float:
    """Korobov-space norm ``sqrt(sum_h |fhat_h|**2 / omega_h)``, accumulated in logs."""
    if not f.coeffs:
        return 0.0
    logs = [2.0 * math.log(abs(c)) + exponent(spec, h).value * spec.log_inv_omega
            for h, c in f.coeffs.items()]
    half = 0.5 * float(logsumexp(logs))
    if half > _LOG_MAX:
        raise OverflowError(f"Korobov norm exp({half:.1f}) is not representable")
    return math.exp(half)


@functools.lru_cache(maxsize=256)
def _kept(spec: WeightSpec, d: int, n: int, caps: Caps) -> frozenset:
    return frozenset(h for h, _ in top_frequencies(spec, d, n, caps=caps))


def truncate(spec: WeightSpec, f: SpectralFunction, n: int, *, caps: Caps | None = None) -> SpectralFunction:
    """Keep the coefficients of the ``n`` leading frequencies (stream order)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    kept = _kept(spec, f.d, n, resolve(caps))
    return SpectralFunction(f.d, {h: c for h, c in f.coeffs.items() if h in kept})


def truncate_weighted(spec: WeightSpec, f: SpectralFunction, n: int, *,
                      caps: Caps | None = None) -> SpectralFunction:
    """Variant that additionally scales each kept coefficient by its eigenvalue.

    Kept for comparison only; its error exceeds the projection's.
    """
    kept = _kept(spec, f.d, n, resolve(caps))
    return SpectralFunction(f.d, {
        h: spec.omega ** exponent(spec, h).value * c for h, c in f.coeffs.items() if h in kept
    })


def worst_case_error_of_truncation(spec: WeightSpec, d: int, n: int, f: SpectralFunction, *,
                                   weighted: bool = False, caps: Caps | None = None) -> float:
    """``||f - A f||_L2 / ||f||_H`` for the truncation ``A`` (or its weighted variant)."""
    if f.d != d:
        raise ValueError("dimension mismatch")
    norm = h_norm(spec, f)
    if norm == 0.0:
        raise ValueError("f must be nonzero")
    approx = (truncate_weighted if weighted else truncate)(spec, f, n, caps=caps)
    return l2_norm(f - approx) / norm


# -- Gaussian draws ----------------------------------------------------------

@dataclass(frozen=True)
class GaussianDrawConfig:
    threshold: float = 1e-8  # neglected eigenvalue mass, as a fraction of the trace
    seed: int = 0
    samples: int = 1000

    def __post_init__(self):
        if not 0.0 < self.threshold <= 0.01:
            raise KorobovError("truncation threshold must lie in (0, 0.01]")
        if self.samples < 1:
            raise KorobovError("sample count must be positive")


@dataclass(frozen=True)
class KLBasis:
    frequencies: tuple[tuple[int, ...], ...]
    eigenvalues: np.ndarray = field(compare=False)
    trace: float
    neglected: float


@functools.lru_cache(maxsize=64)
def kl_basis(spec: WeightSpec, d: int, threshold: float, caps: Caps | None = None) -> KLBasis:
    """Leading frequencies until the neglected eigenvalue mass is ``<= threshold * trace``."""
    caps = resolve(caps)
    trace = trace_tau(spec, d, 1.0, caps=caps).point
    freqs, lams = [], []
    partial = 0.0
    stream = EigenStream(spec, d, caps=caps)
    while trace - partial > threshold * trace:
        item = next(stream)
        lam = spec.omega**item.value
        for h in sign_variants(item.index):
            freqs.append(h)
            lams.append(lam)
            partial += lam
        if len(freqs) > caps.ranks:
            raise KorobovError("Karhunen-Loeve truncation needs too many modes")
    return KLBasis(tuple(freqs), np.array(lams), trace, max(trace - partial, 0.0))


def _draw_normals(seed: int, draw: int, size: int) -> np.ndarray:
    # one counter-based substream per draw: results do not depend on scheduling
    return np.random.default_rng([seed, draw]).standard_normal(size)


def sample_gaussian(spec: WeightSpec, d: int, cfg: GaussianDrawConfig, draw: int = 0, *,
                    caps: Caps | None = None) -> SpectralFunction:
    basis = kl_basis(spec, d, cfg.threshold, caps)
    g = _draw_normals(cfg.seed, draw, len(basis.frequencies))
    coeffs = dict(zip(basis.frequencies, np.sqrt(basis.eigenvalues) * g))
    return SpectralFunction(d, coeffs, meta={"neglected_variance": basis.neglected,
                                             "modes": len(basis.frequencies)})


@dataclass(frozen=True)
class MCResult:
    estimate: float
    std_error: float
    oracle: float
    neglected: float
    allowance: float
    samples: int

    @property
    def z(self) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.estimate == self.oracle else math.inf
        return (self.estimate - self.oracle) / self.std_error

    def consistent(self, sigmas: float = 3.0) -> bool:
        return abs(self.estimate - self.oracle) <= sigmas * self.std_error + self.allowance


def mc_avg_error(spec: WeightSpec, d: int, n: int, cfg: GaussianDrawConfig, *, jobs: int = 1,
                 caps: Caps | None = None) -> MCResult:
    """Monte Carlo estimate of the average-case error of the ``n``-term truncation.

    Draw ``i`` uses the substream ``(cfg.seed, i)``, so ``jobs`` does not
    change the result. Refuses to run when the neglected variance is not
    below 1% of the squared error being estimated.
    """
    if cfg.samples < 100:
        raise KorobovError("at least 100 samples are required")
    basis = kl_basis(spec, d, cfg.threshold, caps)
    oracle = avg_error(spec, d, n, caps=caps)
    K = len(basis.frequencies)
    if n >= K:
        # nothing sampled survives the truncation
        return MCResult(0.0, 0.0, oracle, basis.neglected, oracle, cfg.samples)
    if basis.neglected >= 0.01 * oracle**2:
        raise KorobovError(
            f"neglected variance {basis.neglected:.3e} is not below 1% of the squared error "
            f"{oracle**2:.3e}; lower the truncation threshold")
    lam_tail = basis.eigenvalues[n:]

    def err2(i: int) -> float:
        g = _draw_normals(cfg.seed, i, K)[n:]
        return float(np.dot(lam_tail, g * g))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = np.array(list(pool.map(err2, range(cfg.samples), chunksize=256)))
    else:
        values = np.array([err2(i) for i in range(cfg.samples)])
    mean = float(math.fsum(values) / len(values))
    estimate = math.sqrt(mean)
    se_mean = float(np.std(values, ddof=1)) / math.sqrt(len(values))
    std_error = se_mean / (2.0 * estimate) if estimate > 0 else 0.0
    allowance = oracle - math.sqrt(max(oracle**2 - basis.neglected, 0.0))
    return MCResult(estimate, std_error, oracle, basis.neglected, allowance, cfg.samples)
