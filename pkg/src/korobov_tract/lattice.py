"""Counting integer points in weighted anisotropic balls.

``count_weighted`` counts ``h in Z^d`` with ``sum_k a_k |h_k|**b_k``
below (strict) or at most (non-strict) a budget, without materializing
the lattice. It serves both the information complexity count and the
l_p grid numbers.
"""

from __future__ import annotations

import bisect
import sys

import numpy as np

from .caps import Caps, resolve
from .errors import ResourceCapError

DEFAULT_REL_TOL = 1e-12


def count_weighted(a, b, budget: float, *, strict: bool = True, rel_tol: float = DEFAULT_REL_TOL,
                   caps: Caps | None = None) -> int:
    """Number of ``h in Z^d`` with ``E(h) < budget`` (or ``<=`` if not strict).

    Comparisons carry an absolute slack of ``rel_tol * max(1, budget)``:
    a strict count excludes exponents within the slack of the budget, a
    non-strict count includes them.

    Coordinates are processed in decreasing ``a_k`` so expensive ones
    prune first. Partial sums are memoized per depth, which collapses
    the recursion when costs are commensurate (e.g. integer weights).
    """
    caps = resolve(caps)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-d arrays of equal length")
    slack = rel_tol * max(1.0, abs(budget))
    limit = budget - slack if strict else budget + slack

    def ok(e: float) -> bool:
        return e < limit if strict else e <= limit

    if not ok(0.0):
        return 0
    # coordinates that cannot even take |h| = 1 contribute only h = 0
    active = [k for k in np.argsort(-a, kind="stable") if ok(a[k])]
    if not active:
        return 1

    tables: list[list[float]] = []
    for k in active:
        costs = [0.0]
        j = 1
        while True:
            c = float(a[k]) * float(j) ** float(b[k])
            if not ok(c):
                break
            costs.append(c)
            j += 1
            if j > caps.terms:
                raise ResourceCapError(f"coordinate range exceeds {caps.terms}", cap_name="terms")
        tables.append(costs)

    depth = len(tables)
    cheapest_after = [min(t[1] for t in tables[i:]) for i in range(depth)] + [float("inf")]
    memo: dict[tuple[int, float], int] = {}
    nodes = 0

    def leaf(costs: list[float], partial: float) -> int:
        # number of j >= 1 with ok(partial + costs[j]); costs is increasing
        room = limit - partial
        n = bisect.bisect_left(costs, room) if strict else bisect.bisect_right(costs, room)
        # fix up float rounding at the boundary
        while n > 1 and not ok(partial + costs[n - 1]):
            n -= 1
        while n < len(costs) and ok(partial + costs[n]):
            n += 1
        return 1 + 2 * (n - 1)

    def rec(i: int, partial: float) -> int:
        nonlocal nodes
        if i == depth - 1:
            return leaf(tables[i], partial)
        if not ok(partial + cheapest_after[i]):
            return 1
        key = (i, partial)
        hit = memo.get(key)
        if hit is not None:
            return hit
        nodes += 1
        if nodes > caps.nodes:
            raise ResourceCapError(f"lattice recursion exceeded {caps.nodes} nodes", cap_name="nodes")
        total = rec(i + 1, partial)
        for c in tables[i][1:]:
            s = partial + c
            if not ok(s):
                break
            total += 2 * rec(i + 1, s)
        memo[key] = total
        return total

    old = sys.getrecursionlimit()
    if depth + 50 > old:
        sys.setrecursionlimit(depth + 100)
    try:
        return rec(0, 0.0)
    finally:
        sys.setrecursionlimit(old)
