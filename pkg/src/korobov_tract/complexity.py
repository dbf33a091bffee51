"""Minimal errors and information complexity, worst case and average case.

Worst case: ``e_wor(n, d) = sqrt(lambda_{d,n+1})`` and ``n(eps, d)`` is a
lattice-point count. Average case: ``e_avg(n, d)`` is the square root of
the spectral tail, obtained as trace minus a partial sum, with the trace
computed from per-coordinate series whose remainders are bounded by
incomplete gamma integrals.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import gammaincc, gammaln

from .caps import Caps, resolve
from .errors import ConvergenceError, KorobovError, ResourceCapError
from .lattice import count_weighted
from .sequences import WeightSpec, b_star
from .spectrum import DEFAULT_REL_TOL, EigenStream, top_exponents

DEFAULT_TRACE_TOL = 1e-15
NEGATIVE_RESIDUAL_TOL = 1e-14


class Criterion(str, enum.Enum):
    ABS = "abs"
    NOR = "nor"

    @classmethod
    def parse(cls, value) -> "Criterion":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise KorobovError(f"unknown error criterion {value!r}; use abs or nor") from None


def threshold(spec: WeightSpec, eps: float) -> float:
    """Exponent budget ``ln(eps**-2) / ln(1/omega)``."""
    if not 0 < eps < 1:
        raise KorobovError(f"eps must lie in (0, 1), got {eps}")
    return -2.0 * math.log(eps) / spec.log_inv_omega


def count_lattice(spec: WeightSpec, d: int, L: float, *, caps: Caps | None = None,
                  rel_tol: float = DEFAULT_REL_TOL) -> int:
    """``#{h in Z^d : sum_k a_k |h_k|**b_k < L}`` (strict)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if L < 0:
        raise ValueError("budget must be >= 0")
    return count_weighted(spec.a_vector(d), spec.b_vector(d), L, strict=True,
                          rel_tol=rel_tol, caps=caps)


def info_complexity_worst(spec: WeightSpec, d: int, eps: float, *, caps: Caps | None = None) -> int:
    """Worst-case ``n(eps, d)``; absolute and normalized criteria coincide."""
    return count_lattice(spec, d, threshold(spec, eps), caps=caps)


def worst_error(spec: WeightSpec, d: int, n: int, *, caps: Caps | None = None) -> float:
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1.0
    e = top_exponents(spec, d, n + 1, caps=caps)[-1]
    return float(spec.omega ** (0.5 * e))


# -- trace ---------------------------------------------------------------

def _tail_integral(c: float, b: float, J: float) -> float:
    """``int_J^inf exp(-c x**b) dx``, an upper bound on ``sum_{j>J} exp(-c j**b)``."""
    s = 1.0 / b
    q = gammaincc(s, c * J**b)
    if q <= 0.0:
        return 0.0
    return math.exp(math.log(q) + gammaln(s) - math.log(b) - s * math.log(c))


def series_1d(c: float, b: float, tol: float, max_terms: int) -> tuple[float, float, int]:
    """``sum_{j>=1} exp(-c j**b)`` as ``(partial sum, tail bound, terms used)``.

    Stops once twice the tail bound is below ``tol * (1 + 2 * partial)``.
    """
    J = 16
    while True:
        j = np.arange(1, J + 1, dtype=float)
        terms = np.exp(-c * j**b)
        partial = math.fsum(terms[::-1])
        tail = _tail_integral(c, b, J)
        if 2.0 * tail <= tol * (1.0 + 2.0 * partial):
            return partial, tail, J
        if J >= max_terms:
            raise ConvergenceError(
                f"series with c={c:g}, b={b:g} did not reach tolerance {tol:g} within {max_terms} terms",
                cap_name="terms")
        J = min(2 * J, max_terms)


def m_constant(spec: WeightSpec, tau0: float, *, tol: float = DEFAULT_TRACE_TOL,
               caps: Caps | None = None) -> float:
    """Upper estimate of ``2 sum_{j>=1} omega**(tau0 a_1 (j**b_* - 1))``."""
    caps = resolve(caps)
    c = tau0 * spec.a(1) * spec.log_inv_omega
    partial, tail, _ = series_1d(c, b_star(spec), tol, caps.terms)
    return 2.0 * math.exp(c) * (partial + tail)


@dataclass(frozen=True)
class TraceBound:
    """``sum_j lambda_{d,j}**tau`` with a rigorous bracket and reference bounds.

    ``lower <= point <= upper`` bracket the numerical value. ``log_lower``
    and ``log_upper`` are the coarse analytic bounds on ``ln(trace)``:
    ``ln 2 * sum_k omega**(tau a_k)`` and ``M * sum_k omega**(tau a_k)``
    with ``M = m_constant(spec, tau0)``.
    """

    lower: float
    upper: float
    point: float
    tau: float
    factors: tuple[float, ...]
    tau0: float
    m_const: float
    log_lower: float
    log_upper: float

    @property
    def log_point(self) -> float:
        return float(sum(math.log(f) for f in self.factors))


def trace_tau(spec: WeightSpec, d: int, tau: float = 1.0, tol: float = DEFAULT_TRACE_TOL, *,
              caps: Caps | None = None) -> TraceBound:
    if not tau > 0:
        raise ValueError("tau must be positive")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    caps = resolve(caps)
    a, b = spec.a_vector(d), spec.b_vector(d)
    lo, hi, mid = [], [], []
    for k in range(d):
        partial, tail, _ = series_1d(tau * a[k] * spec.log_inv_omega, b[k], tol, caps.terms)
        lo.append(1.0 + 2.0 * partial)
        hi.append(1.0 + 2.0 * (partial + tail))
        mid.append(1.0 + 2.0 * (partial + 0.5 * tail))
    weights = math.fsum(spec.omega ** (tau * ak) for ak in a)
    tau0 = tau / 2.0
    m = m_constant(spec, tau0, tol=tol, caps=caps)
    return TraceBound(
        lower=math.prod(lo), upper=math.prod(hi), point=math.prod(mid), tau=tau,
        factors=tuple(mid), tau0=tau0, m_const=m,
        log_lower=math.log(2.0) * weights, log_upper=m * weights,
    )


def initial_avg_error(spec: WeightSpec, d: int, *, caps: Caps | None = None) -> float:
    """``e_avg(0, d) = sqrt(trace)``; at least 1."""
    return math.sqrt(trace_tau(spec, d, 1.0, caps=caps).point)


def initial_error_log_bounds(spec: WeightSpec, d: int, *, caps: Caps | None = None):
    """Nested bounds on ``ln e_avg(0, d)``.

    Returns ``(outer_lo, lo, hi, outer_hi)`` with
    ``outer_lo = omega**a_1 ln2 / 2``, ``lo = ln2/2 sum_k omega**a_k``,
    ``hi = M_1/2 sum_k omega**a_k`` and ``outer_hi = d M_1 omega**a_1 / 2``.
    """
    m1 = m_constant(spec, 1.0, caps=caps)
    w = math.fsum(spec.omega ** ak for ak in spec.a_vector(d))
    w1 = spec.omega ** spec.a(1)
    return (w1 * math.log(2) / 2, math.log(2) / 2 * w, m1 / 2 * w, d * m1 * w1 / 2)


# -- average case ----------------------------------------------------------

def _tail(residual: float, e_next: float, spec: WeightSpec, trace: float) -> float:
    """Spectral tail from ``trace - partial``, clamped at 0 and floored at ``lambda_{n+1}``.

    Once the tail falls below the round-off of the trace the difference is
    noise; the next eigenvalue is a rigorous lower bound for the tail.
    """
    if residual < 0.0 and -residual > NEGATIVE_RESIDUAL_TOL * trace:
        warnings.warn(f"negative spectral tail {residual:.3e} clamped", RuntimeWarning, stacklevel=3)
    return max(residual, spec.omega**e_next, 0.0)


def _avg_from_tail(residual: float, e_next: float, spec: WeightSpec, trace: float) -> float:
    # the floor in the square-root domain matches worst_error bit for bit
    return max(math.sqrt(_tail(residual, e_next, spec, trace)), float(spec.omega ** (0.5 * e_next)))


def residuals(spec: WeightSpec, d: int, trace: float, *,
              caps: Caps | None = None) -> Iterator[tuple[float, float]]:
    """Yield ``(trace - sum_{k<=n} lambda_{d,k}, E_{n+1})`` for ``n = 0, 1, 2, ...``.

    ``E_{n+1}`` is the exponent of ``lambda_{d,n+1}``.
    """
    caps = resolve(caps)
    stream = EigenStream(spec, d, caps=caps)
    partial = 0.0
    n = 0
    for item in stream:
        lam = spec.omega**item.value
        for _ in range(item.multiplicity):
            if n > caps.ranks:
                raise ResourceCapError(f"more than {caps.ranks} ranks needed", cap_name="ranks",
                                       lower_bound=n)
            yield trace - partial, item.value
            partial += lam
            n += 1


def avg_error(spec: WeightSpec, d: int, n: int, *, caps: Caps | None = None) -> float:
    if n < 0:
        raise ValueError("n must be >= 0")
    trace = trace_tau(spec, d, 1.0, caps=caps).point
    for k, (r, e_next) in enumerate(residuals(spec, d, trace, caps=caps)):
        if k == n:
            return _avg_from_tail(r, e_next, spec, trace)
    raise AssertionError("unreachable")


def info_complexity_avg(spec: WeightSpec, d: int, eps: float, criterion="abs", *,
                        caps: Caps | None = None, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Minimal ``n`` with ``e_avg(n, d) <= eps * CRI_d``.

    ``CRI_d`` is 1 for the absolute criterion and ``e_avg(0, d)`` for the
    normalized one. A residual within ``rel_tol`` (relative) of the
    squared target counts as reaching it.
    """
    criterion = Criterion.parse(criterion)
    if not eps > 0:
        raise KorobovError("eps must be positive")
    trace = trace_tau(spec, d, 1.0, caps=caps).point
    scale = 1.0 if criterion is Criterion.ABS else math.sqrt(trace)
    target = (eps * scale) ** 2
    limit = target * (1.0 + rel_tol)
    best = 0
    try:
        for n, (r, e_next) in enumerate(residuals(spec, d, trace, caps=caps)):
            best = n
            if _tail(r, e_next, spec, trace) <= limit:
                return n
    except ResourceCapError as exc:
        raise ResourceCapError(f"{exc}; n(eps, d) > {best}", cap_name=exc.cap_name,
                               lower_bound=best) from exc
    raise AssertionError("unreachable")


def error_curve(spec: WeightSpec, d: int, n_max: int, *, caps: Caps | None = None):
    """Rows ``(n, e_wor(n, d), e_avg(n, d))`` for ``n = 0..n_max`` from one stream pass."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    trace = trace_tau(spec, d, 1.0, caps=caps).point
    rows = []
    for n, (r, e_next) in enumerate(residuals(spec, d, trace, caps=caps)):
        e_wor = 1.0 if n == 0 else float(spec.omega ** (0.5 * e_next))
        rows.append((n, e_wor, _avg_from_tail(r, e_next, spec, trace)))
        if n == n_max:
            break
    return rows
