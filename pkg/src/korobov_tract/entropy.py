"""Grid numbers of l_p balls, packing and covering of finite point sets.

``grid_count`` counts integer points with ``sum |h_k|**p <= m``. Packing
(``M_eps``: largest subset with pairwise l_inf distance > eps) and
covering (``N_eps``: fewest closed l_inf eps-balls, centred at given
candidates, covering the set) are solved exactly as 0/1 programs with
HiGHS; a greedy maximal packing is the fallback when the solver gives up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix
from scipy.spatial.distance import cdist

from .caps import Caps, resolve
from .errors import KorobovError, ResourceCapError
from .lattice import DEFAULT_REL_TOL, count_weighted


@dataclass(frozen=True)
class LpBallQuery:
    p: float
    m: float
    d: int

    def __post_init__(self):
        if not self.p > 0:
            raise KorobovError("p must be positive")
        if self.m < 0:
            raise KorobovError("m must be non-negative")
        if self.d < 1:
            raise KorobovError("d must be >= 1")


def grid_count(q: LpBallQuery, *, caps: Caps | None = None) -> int:
    """``#{h in Z^d : sum_k |h_k|**p <= m}``."""
    return count_weighted(np.ones(q.d), np.full(q.d, float(q.p)), q.m, strict=False, caps=caps)


def grid_count_by_dimension(p: float, m: float, d_max: int, *, rel_tol: float = DEFAULT_REL_TOL) -> list[int]:
    """``[G(p, m, 1), ..., G(p, m, d_max)]`` in one dynamic-programming pass.

    Tracks the distribution of partial sums; efficient when the costs
    ``j**p`` are commensurate (integer ``p``).
    """
    limit = m + rel_tol * max(1.0, m)
    costs = [0.0]
    j = 1
    while float(j) ** p <= limit:
        costs.append(float(j) ** p)
        j += 1
    dist = {0.0: 1}
    out = []
    for _ in range(d_max):
        nxt: dict[float, int] = {}
        for s, cnt in dist.items():
            for j, c in enumerate(costs):
                t = s + c
                if t > limit:
                    break
                nxt[t] = nxt.get(t, 0) + cnt * (1 if j == 0 else 2)
        dist = nxt
        out.append(sum(dist.values()))
    return out


@dataclass(frozen=True)
class LogBound:
    lemma: float  # piecewise bound on ln G, branch chosen by d vs m
    corollary: float  # C_p * d * (ln 2d + ln 2m)


def lemma_expression(m: float, d: int) -> float:
    """``m ln(2d/m)`` when ``d >= m``, else ``d ln(2m/d)``."""
    return m * math.log(2 * d / m) if d >= m else d * math.log(2 * m / d)


def grid_count_log_bound(q: LpBallQuery, C_p: float) -> LogBound:
    if not C_p > 0:
        raise KorobovError("C_p must be positive")
    if q.m < 1:
        raise KorobovError("the bound needs m >= 1")
    return LogBound(
        lemma=C_p * lemma_expression(q.m, q.d),
        corollary=C_p * q.d * (math.log(2 * q.d) + math.log(2 * q.m)),
    )


def covering_log_bound(p: float, eps: float, d: int, C_p: float) -> float:
    """Reference bound on ``ln N_eps`` of the unit l_p ball in l_inf, evaluated as printed.

    ``C_p eps**-p ln(2 d eps**p)`` when ``d eps**p >= 1``, else
    ``C_p d ln(2 / (d eps**p))``.
    """
    x = d * eps**p
    if x >= 1:
        return C_p * eps ** (-p) * math.log(2 * x)
    return C_p * d * math.log(2 / x)


def fit_lemma_constant(p: float, ms, ds) -> float:
    """Smallest constant making the lemma inequality hold on the grid ``ms x ds``."""
    best = 0.0
    d_max = max(ds)
    for m in ms:
        if m < 1:
            raise KorobovError("calibration needs m >= 1")
        counts = grid_count_by_dimension(p, m, d_max)
        for d in ds:
            best = max(best, math.log(counts[d - 1]) / lemma_expression(m, d))
    return best


# -- finite point sets ---------------------------------------------------------

def as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise KorobovError("points must be a 2-d array (one vector per row)")
    return pts


def load_points(path) -> np.ndarray:
    """One vector per line, whitespace separated."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line.split()])
        except ValueError:
            raise KorobovError(f"{path}:{lineno}: not a list of numbers") from None
        if len(rows[-1]) != len(rows[0]):
            raise KorobovError(f"{path}:{lineno}: expected {len(rows[0])} coordinates")
    if not rows:
        raise KorobovError(f"{path}: no points")
    return np.array(rows)


@dataclass(frozen=True)
class SetResult:
    size: int
    mode: str  # "exact" or "greedy"
    members: tuple[int, ...]


def _check_size(n: int, caps: Caps) -> None:
    if n > caps.points:
        raise ResourceCapError(f"{n} points exceed the cap of {caps.points}", cap_name="points")


def _greedy_packing(dist: np.ndarray, eps: float) -> list[int]:
    chosen: list[int] = []
    for i in range(len(dist)):
        if all(dist[i, j] > eps for j in chosen):
            chosen.append(i)
    return chosen


def packing_search(points, eps: float, *, caps: Caps | None = None, time_limit: float = 60.0) -> SetResult:
    """Largest subset whose pairwise l_inf distances all exceed ``eps``."""
    if not eps > 0:
        raise KorobovError("eps must be positive")
    caps = resolve(caps)
    pts = as_points(points)
    n = len(pts)
    _check_size(n, caps)
    if n <= 1:
        return SetResult(n, "exact", tuple(range(n)))
    dist = cdist(pts, pts, metric="chebyshev")
    ii, jj = np.nonzero(np.triu(dist <= eps, k=1))
    if len(ii) == 0:
        return SetResult(n, "exact", tuple(range(n)))
    rows = np.repeat(np.arange(len(ii)), 2)
    cols = np.column_stack([ii, jj]).ravel()
    A = coo_matrix((np.ones(len(cols)), (rows, cols)), shape=(len(ii), n))
    res = milp(-np.ones(n), constraints=LinearConstraint(A, -np.inf, 1), integrality=np.ones(n),
               bounds=Bounds(0, 1), options={"time_limit": time_limit})
    if res.status == 0:
        members = tuple(int(i) for i in np.flatnonzero(res.x > 0.5))
        return SetResult(len(members), "exact", members)
    members = tuple(_greedy_packing(dist, eps))
    return SetResult(len(members), "greedy", members)


def packing_max(points, eps: float, *, caps: Caps | None = None) -> int:
    return packing_search(points, eps, caps=caps).size


def covering_search(points, eps: float, candidate_centers=None, *, caps: Caps | None = None,
                    time_limit: float = 60.0) -> SetResult:
    """Fewest closed l_inf ``eps``-balls around candidates that cover all points.

    Candidates default to the points themselves.
    """
    if not eps > 0:
        raise KorobovError("eps must be positive")
    caps = resolve(caps)
    pts = as_points(points)
    cands = pts if candidate_centers is None else as_points(candidate_centers)
    if cands.shape[1] != pts.shape[1]:
        raise KorobovError("points and candidates differ in dimension")
    _check_size(max(len(pts), len(cands)), caps)
    if len(pts) == 0:
        return SetResult(0, "exact", ())
    cover = cdist(pts, cands, metric="chebyshev") <= eps
    bare = np.flatnonzero(~cover.any(axis=1))
    if len(bare):
        raise KorobovError(f"infeasible: point {int(bare[0])} is farther than eps from every candidate")
    A = coo_matrix(cover.astype(float))
    k = len(cands)
    res = milp(np.ones(k), constraints=LinearConstraint(A, 1, np.inf), integrality=np.ones(k),
               bounds=Bounds(0, 1), options={"time_limit": time_limit})
    if res.status != 0:
        raise ResourceCapError(f"set cover not solved to optimality: {res.message}", cap_name="time")
    members = tuple(int(i) for i in np.flatnonzero(res.x > 0.5))
    return SetResult(len(members), "exact", members)


def covering_min(points, eps: float, candidate_centers=None, *, caps: Caps | None = None) -> int:
    return covering_search(points, eps, candidate_centers, caps=caps).size


@dataclass(frozen=True)
class ChainCheck:
    packing_2eps: int
    covering_eps: int
    packing_eps: int

    @property
    def holds(self) -> bool:
        return self.packing_2eps <= self.covering_eps <= self.packing_eps


def chain_check(points, eps: float, candidate_centers=None, *, caps: Caps | None = None) -> ChainCheck:
    """Evaluate ``M_2eps <= N_eps <= M_eps``; the points are always among the centres."""
    pts = as_points(points)
    cands = pts if candidate_centers is None else np.vstack([pts, as_points(candidate_centers)])
    return ChainCheck(
        packing_max(pts, 2 * eps, caps=caps),
        covering_min(pts, eps, cands, caps=caps),
        packing_max(pts, eps, caps=caps),
    )
