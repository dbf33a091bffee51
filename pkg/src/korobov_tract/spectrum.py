"""Ordered enumeration of the tensor-product spectrum.

Eigenvalues are ``omega ** E(h)`` with ``E(h) = sum_k a_k |h_k| ** b_k``.
Everything is kept in the exponent (log) domain; ``omega ** E`` is only
formed on output. Frequencies are handled through their canonical
representative ``|h|`` in ``N_0^d`` together with the number ``2**nnz``
of sign patterns sharing its exponent.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .caps import Caps, resolve
from .errors import ResourceCapError
from .sequences import WeightSpec

DEFAULT_REL_TOL = 1e-12


@dataclass(frozen=True, order=True)
class Exponent:
    value: float
    index: tuple[int, ...]
    multiplicity: int

    def eigenvalue(self, omega: float) -> float:
        return omega**self.value


def _tie_tol(value: float, rel_tol: float) -> float:
    return rel_tol * max(1.0, abs(value))


def exponent_value(a: np.ndarray, b: np.ndarray, index) -> float:
    """``sum_k a_k |h_k|**b_k`` summed in coordinate order (skips zeros)."""
    total = 0.0
    for k, h in enumerate(index):
        if h:
            total += float(a[k]) * float(abs(h)) ** float(b[k])
    return total


def exponent(spec: WeightSpec, h) -> Exponent:
    """Exponent, canonical index and sign multiplicity of frequency ``h``."""
    h = tuple(int(x) for x in h)
    d = len(h)
    canon = tuple(abs(x) for x in h)
    nnz = sum(1 for x in canon if x)
    return Exponent(exponent_value(spec.a_vector(d), spec.b_vector(d), canon), canon, 2**nnz)


def one_dim_eigenvalue(spec: WeightSpec, k: int, j: int) -> float:
    """``j``-th largest eigenvalue of the ``k``-th univariate factor.

    Rank 1 is the constant mode; ranks ``2m`` and ``2m+1`` share the
    frequency pair ``+-m``.
    """
    if k < 1 or j < 1:
        raise ValueError("k and j must be >= 1")
    if j == 1:
        return 1.0
    return spec.omega ** (spec.a(k) * float(j // 2) ** spec.b(k))


def sign_variants(index: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All frequencies with ``|h| == index``; the all-positive one first."""
    nz = [k for k, x in enumerate(index) if x]
    out = []
    for signs in itertools.product((1, -1), repeat=len(nz)):
        h = list(index)
        for k, s in zip(nz, signs):
            h[k] = s * index[k]
        out.append(tuple(h))
    return out


class EigenStream:
    """Lazy non-increasing enumeration of ``lambda_{d,1} >= lambda_{d,2} >= ...``.

    Best-first search over canonical indices. Each index is generated
    once, from the parent obtained by decrementing its last nonzero
    coordinate, so no visited set is needed. Exponents within
    ``rel_tol`` of each other form a tie group, emitted in lexicographic
    index order. Iterating yields :class:`Exponent` objects; ``emitted``
    is the cumulative rank covered so far.

    Single-owner and stateful; do not share between threads.
    """

    def __init__(self, spec: WeightSpec, d: int, *, caps: Caps | None = None,
                 rel_tol: float = DEFAULT_REL_TOL):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.spec = spec
        self.d = d
        self.rel_tol = rel_tol
        self.caps = resolve(caps)
        self._a = spec.a_vector(d)
        self._b = spec.b_vector(d)
        self._heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (0,) * d)]
        self._group: list[Exponent] = []
        self.emitted = 0

    def __iter__(self) -> Iterator[Exponent]:
        return self

    def _expand(self, index: tuple[int, ...]) -> None:
        last = max((k for k, x in enumerate(index) if x), default=0)
        for i in range(last, self.d):
            child = index[:i] + (index[i] + 1,) + index[i + 1:]
            heapq.heappush(self._heap, (exponent_value(self._a, self._b, child), child))
        if len(self._heap) > self.caps.frontier:
            raise ResourceCapError(
                f"eigen stream frontier exceeded {self.caps.frontier} entries",
                cap_name="frontier", lower_bound=self.emitted)

    def _fill_group(self) -> None:
        value, index = heapq.heappop(self._heap)
        self._expand(index)
        group = [(index, value)]
        limit = value + _tie_tol(value, self.rel_tol)
        while self._heap and self._heap[0][0] <= limit:
            v, idx = heapq.heappop(self._heap)
            self._expand(idx)
            group.append((idx, v))
        group.sort()
        # reversed so that list.pop() hands them out in order
        self._group = [
            Exponent(v, idx, 2 ** sum(1 for x in idx if x)) for idx, v in reversed(group)
        ]

    def __next__(self) -> Exponent:
        if not self._group:
            self._fill_group()
        item = self._group.pop()
        self.emitted += item.multiplicity
        return item

    def take_ranks(self, n: int) -> list[Exponent]:
        """Advance until at least ``n`` ranks are covered in total."""
        if n > self.caps.ranks:
            raise ResourceCapError(f"{n} ranks requested, cap is {self.caps.ranks}", cap_name="ranks")
        out = []
        while self.emitted < n:
            out.append(next(self))
        return out

    def take_until(self, e_max: float) -> list[Exponent]:
        """Advance over every canonical index with exponent ``<= e_max``."""
        out = []
        limit = e_max + _tie_tol(e_max, self.rel_tol)
        while True:
            if not self._group and (not self._heap or self._heap[0][0] > limit):
                return out
            if self._group and self._group[-1].value > limit:
                return out
            out.append(next(self))


def top_eigenvalues(spec: WeightSpec, d: int, N: int, *, caps: Caps | None = None,
                    rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, int]]:
    """``(exponent, cumulative rank)`` pairs covering ranks ``1..N``.

    The last pair may overshoot ``N`` when its multiplicity does.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    stream = EigenStream(spec, d, caps=caps, rel_tol=rel_tol)
    out = []
    rank = 0
    for item in stream.take_ranks(N):
        rank += item.multiplicity
        out.append((item.value, rank))
    return out


def expand_ranks(items, n: int) -> np.ndarray:
    """Per-rank exponent array of length ``n`` from stream items."""
    out = np.empty(n, dtype=float)
    pos = 0
    for item in items:
        take = min(item.multiplicity, n - pos)
        out[pos:pos + take] = item.value
        pos += take
        if pos == n:
            break
    if pos < n:
        raise ValueError("not enough stream items to cover the requested ranks")
    return out


def top_exponents(spec: WeightSpec, d: int, n: int, *, caps: Caps | None = None,
                  rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Exponents of ``lambda_{d,1..n}`` as an array (one entry per rank)."""
    if n == 0:
        return np.empty(0)
    stream = EigenStream(spec, d, caps=caps, rel_tol=rel_tol)
    return expand_ranks(stream.take_ranks(n), n)


def top_frequencies(spec: WeightSpec, d: int, n: int, *, caps: Caps | None = None,
                    rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[tuple[int, ...], float]]:
    """The ``n`` leading frequencies in ``Z^d`` with their exponents, in rank order.

    Sign patterns of one canonical index follow :func:`sign_variants`.
    """
    out: list[tuple[tuple[int, ...], float]] = []
    if n == 0:
        return out
    stream = EigenStream(spec, d, caps=caps, rel_tol=rel_tol)
    for item in stream.take_ranks(n):
        for h in sign_variants(item.index):
            out.append((h, item.value))
            if len(out) == n:
                return out
    return out


def aggregate(pairs, rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, int]]:
    """Merge ``(exponent, multiplicity)`` pairs whose exponents tie within ``rel_tol``."""
    out: list[tuple[float, int]] = []
    for value, mult in sorted(pairs):
        if out and value - out[-1][0] <= _tie_tol(out[-1][0], rel_tol):
            out[-1] = (out[-1][0], out[-1][1] + mult)
        else:
            out.append((value, mult))
    return out


def brute_force_spectrum(spec: WeightSpec, d: int, e_max: float, *, caps: Caps | None = None,
                         rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, int]]:
    """Exhaustive ``(exponent, multiplicity)`` list for ``E(h) <= e_max``.

    Enumerates the full coordinate box with numpy; shares no code with
    :class:`EigenStream`. Used as a test oracle.
    """
    caps = resolve(caps)
    a, b = spec.a_vector(d), spec.b_vector(d)
    limit = e_max + _tie_tol(e_max, rel_tol)
    if limit < 0:
        return []
    sides = [int(math.ceil((max(e_max, 0.0) / a[k]) ** (1.0 / b[k]))) + 1 for k in range(d)]
    if math.prod(sides) > caps.box:
        raise ResourceCapError(f"brute-force box of {math.prod(sides)} points exceeds cap {caps.box}",
                               cap_name="box")
    total = np.zeros(1)
    mult = np.ones(1, dtype=np.int64)
    for k in range(d):
        j = np.arange(sides[k], dtype=float)
        cost = a[k] * j ** b[k]
        cost[0] = 0.0
        total = np.add.outer(total, cost).ravel()
        signs = np.where(j > 0, 2, 1)
        mult = np.multiply.outer(mult, signs).ravel()
    keep = total <= limit
    return aggregate(zip(total[keep].tolist(), mult[keep].tolist()), rel_tol)


def stream_spectrum(spec: WeightSpec, d: int, e_max: float, *, caps: Caps | None = None,
                    rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, int]]:
    """Same output shape as :func:`brute_force_spectrum`, via :class:`EigenStream`."""
    stream = EigenStream(spec, d, caps=caps, rel_tol=rel_tol)
    return aggregate(((e.value, e.multiplicity) for e in stream.take_until(e_max)), rel_tol)
