"""Exponential-convergence tractability verdicts for parametric weight families.

Every tractability condition is a statement about the tail of ``a`` or
``b`` (a limit, a liminf, or convergence of a series). For the closed-form
families those tails are known exactly, so :func:`limit_eval` classifies
them from a per-kind table. Finite lists do not determine a tail and give
``undecidable``.

The condition tags in verdicts use the numbering of the source results,
e.g. ``(1.8)`` for ``lim j**((1-s)/s) / a_j = 0``; see ``CONDITIONS``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .complexity import Criterion, info_complexity_avg, info_complexity_worst
from .errors import KorobovError
from .sequences import SequenceFamily, WeightSpec


class LimitClass(str, enum.Enum):
    ZERO = "zero"
    FINITE_POSITIVE = "finite-positive"
    INFINITE = "infinite"
    UNDECIDABLE = "undecidable"


class Outcome(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"
    UNSUPPORTED = "unsupported"


NOTIONS = ("EC-SPT", "EC-PT", "EC-QPT", "EC-UWT", "EC-WT", "EC-(s,t)-WT")
SETTINGS = ("worst", "avg-abs", "avg-nor")

_NOTION_ALIASES = {
    "ec-spt": "EC-SPT", "spt": "EC-SPT",
    "ec-pt": "EC-PT", "pt": "EC-PT",
    "ec-qpt": "EC-QPT", "qpt": "EC-QPT",
    "ec-uwt": "EC-UWT", "uwt": "EC-UWT",
    "ec-wt": "EC-WT", "wt": "EC-WT",
    "ec-(s,t)-wt": "EC-(s,t)-WT", "(s,t)-wt": "EC-(s,t)-WT", "st-wt": "EC-(s,t)-WT",
    "ec-st-wt": "EC-(s,t)-WT",
}

# limit expressions understood by limit_eval
A_LIMIT = "lim a_k"
LOG_A_OVER_LOG_K = "lim ln a_k / ln k"
LOG_A_OVER_K = "liminf ln a_k / k"
LOGK_LOG_A_OVER_K = "liminf (1 + ln k) ln a_k / k"
INV_B_SUM = "sum 1/b_k"
INV_B_SUM_OVER_LOG = "sup_d sum_{k<=d} 1/b_k / (1 + ln d)"
LOG_J_OVER_A = "lim ln j / a_j"
POWER_OVER_A = "lim j**((1-s)/s) / a_j"
DECAY_PRODUCT = "lim j**(1-t) a_j omega**a_j"

EXPRESSIONS = (A_LIMIT, LOG_A_OVER_LOG_K, LOG_A_OVER_K, LOGK_LOG_A_OVER_K, INV_B_SUM,
               INV_B_SUM_OVER_LOG, LOG_J_OVER_A, POWER_OVER_A, DECAY_PRODUCT)

CONDITIONS = {
    "(1.7)": "lim ln j / a_j = 0",
    "(1.8)": "lim j**((1-s)/s) / a_j = 0",
    "(1.10)": "lim ln j / a_j = 0",
    "(1.11)": "lim j**((1-s)/s) / a_j = 0",
    "(1.12)": "lim j**(1-t) a_j omega**a_j = 0",
    "bullet:EC-SPT": "sum 1/b_k < inf and liminf ln a_k / k > 0",
    "bullet:EC-QPT": "sup_d sum_{k<=d} 1/b_k / (1 + ln d) < inf and liminf (1 + ln k) ln a_k / k > 0",
    "bullet:EC-UWT": "lim ln a_k / ln k = inf",
    "bullet:EC-WT": "lim a_k = inf",
    "bullet:max(s,t)>1": "always holds",
    "avg:t>1": "always holds",
}

_Z, _F, _I, _U = LimitClass.ZERO, LimitClass.FINITE_POSITIVE, LimitClass.INFINITE, LimitClass.UNDECIDABLE


def _same(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-12)


def limit_eval(expression: str, family: SequenceFamily, *, s: float | None = None,
               t: float | None = None, omega: float | None = None) -> LimitClass:
    """Classify the limit ``expression`` for ``family`` (as ``a`` or ``b`` as appropriate)."""
    if expression not in EXPRESSIONS:
        raise KorobovError(f"unknown limit expression {expression!r}")
    kind = family.kind
    if kind == "explicit-list":
        return _U
    if kind == "power" and family.p < 0 and expression not in (INV_B_SUM, INV_B_SUM_OVER_LOG):
        raise KorobovError("a decreasing power sequence is not an admissible a")
    # power with p == 0 is a constant sequence
    const = kind == "constant" or (kind in ("power", "log-power") and family.p == 0)
    p, c = family.p, family.c

    if expression == A_LIMIT:
        return _F if const else _I
    if expression == LOG_A_OVER_LOG_K:
        if kind == "exponential":
            return _I
        if kind == "power" and not const:
            return _F
        return _Z
    if expression == LOG_A_OVER_K:
        return _F if kind == "exponential" else _Z
    if expression == LOGK_LOG_A_OVER_K:
        return _I if kind == "exponential" else _Z

    if expression == INV_B_SUM:
        if kind == "exponential" or (kind == "power" and p > 1 and not _same(p, 1)):
            return _F
        return _I
    if expression == INV_B_SUM_OVER_LOG:
        if kind == "exponential" or (kind == "power" and (p > 1 or _same(p, 1))):
            return _F
        return _I

    if expression == LOG_J_OVER_A:
        if const:
            return _I
        if kind in ("power", "exponential"):
            return _Z
        # log-power: ln j / (c ln(j+1)**p)
        if _same(p, 1):
            return _F
        return _Z if p > 1 else _I

    if expression == POWER_OVER_A:
        if s is None or not 0 < s < 1:
            raise KorobovError("this limit needs 0 < s < 1")
        q = (1 - s) / s
        if kind == "exponential":
            return _Z
        if kind == "power" and not const:
            if _same(p, q):
                return _F
            return _Z if p > q else _I
        return _I

    # DECAY_PRODUCT
    if t is None or not t < 1:
        raise KorobovError("this limit needs t < 1")
    if omega is None or not 0 < omega < 1:
        raise KorobovError("this limit needs omega in (0, 1)")
    if const:
        return _I
    if kind in ("power", "exponential"):
        return _Z
    # log-power: omega**a_j = (j+1)**(-kappa c) when p == 1
    if _same(p, 1):
        kappa = -math.log(omega)
        excess = kappa * c - (1 - t)
        return _Z if excess > 0 and not _same(kappa * c, 1 - t) else _I
    return _Z if p > 1 else _I


@dataclass(frozen=True)
class TractabilityQuery:
    notion: str
    setting: str = "worst"
    s: float | None = None
    t: float | None = None

    def __post_init__(self):
        notion = _NOTION_ALIASES.get(str(self.notion).strip().lower())
        if notion is None:
            raise KorobovError(f"unknown notion {self.notion!r}; one of {NOTIONS}")
        setting = str(self.setting).strip().lower()
        if setting not in SETTINGS:
            raise KorobovError(f"unknown setting {self.setting!r}; one of {SETTINGS}")
        object.__setattr__(self, "notion", notion)
        object.__setattr__(self, "setting", setting)
        if notion == "EC-(s,t)-WT":
            if self.s is None or self.t is None:
                raise KorobovError("EC-(s,t)-WT needs both s and t")
            if not (self.s > 0 and self.t > 0):
                raise KorobovError("s and t must be positive")
            object.__setattr__(self, "s", float(self.s))
            object.__setattr__(self, "t", float(self.t))
        elif self.s is not None or self.t is not None:
            raise KorobovError(f"{notion} takes no (s, t) parameters")


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    tag: str
    condition: str
    limits: dict = field(default_factory=dict)
    note: str = ""

    @property
    def governing_condition(self) -> str:
        return f"{self.tag}: {self.condition}"


def _holds_if(limit: LimitClass, good) -> Outcome:
    if limit is _U:
        return Outcome.UNKNOWN
    return Outcome.HOLDS if limit in good else Outcome.FAILS


def _both(x: Outcome, y: Outcome) -> Outcome:
    if Outcome.FAILS in (x, y):
        return Outcome.FAILS
    if x is Outcome.HOLDS and y is Outcome.HOLDS:
        return Outcome.HOLDS
    return Outcome.UNKNOWN


def _verdict(tag, outcome, limits, note="") -> Verdict:
    return Verdict(outcome, tag, CONDITIONS[tag], limits, note)


def _spt(spec):
    lb = limit_eval(INV_B_SUM, spec.b)
    la = limit_eval(LOG_A_OVER_K, spec.a)
    out = _both(_holds_if(lb, (_Z, _F)), _holds_if(la, (_F, _I)))
    return _verdict("bullet:EC-SPT", out, {INV_B_SUM: lb.value, LOG_A_OVER_K: la.value})


def _qpt(spec):
    lb = limit_eval(INV_B_SUM_OVER_LOG, spec.b)
    la = limit_eval(LOGK_LOG_A_OVER_K, spec.a)
    out = _both(_holds_if(lb, (_Z, _F)), _holds_if(la, (_F, _I)))
    return _verdict("bullet:EC-QPT", out, {INV_B_SUM_OVER_LOG: lb.value, LOGK_LOG_A_OVER_K: la.value})


def _uwt(spec):
    lim = limit_eval(LOG_A_OVER_LOG_K, spec.a)
    return _verdict("bullet:EC-UWT", _holds_if(lim, (_I,)), {LOG_A_OVER_LOG_K: lim.value})


def _wt(spec, note=""):
    lim = limit_eval(A_LIMIT, spec.a)
    return _verdict("bullet:EC-WT", _holds_if(lim, (_I,)), {A_LIMIT: lim.value}, note)


def _vanishes(spec, tag, expression, **params):
    lim = limit_eval(expression, spec.a, **params)
    return _verdict(tag, _holds_if(lim, (_Z,)), {expression: lim.value})


def _is_one(x: float) -> bool:
    return _same(x, 1.0)


def classify(spec: WeightSpec, query: TractabilityQuery) -> Verdict:
    """Decide whether ``query.notion`` holds for ``spec`` in ``query.setting``."""
    notion, setting = query.notion, query.setting
    if notion in ("EC-SPT", "EC-PT"):
        return _spt(spec)
    if notion == "EC-UWT":
        return _uwt(spec)
    if notion == "EC-WT":
        return _wt(spec)
    if notion == "EC-QPT":
        if setting != "worst":
            return Verdict(Outcome.UNSUPPORTED, "bullet:EC-QPT", "not available for the average case",
                           note="nearest covered cell: EC-QPT in the worst case")
        return _qpt(spec)

    s, t = query.s, query.t
    if setting == "worst":
        if max(s, t) > 1 and not (_is_one(s) and _is_one(t)):
            return _verdict("bullet:max(s,t)>1", Outcome.HOLDS, {})
        if _is_one(s) and _is_one(t):
            return _wt(spec, note="EC-(1,1)-WT is EC-WT")
        if _is_one(s):
            return _vanishes(spec, "(1.7)", LOG_J_OVER_A)
        return _vanishes(spec, "(1.8)", POWER_OVER_A, s=s)

    # average case, absolute or normalized
    if t > 1 and not _is_one(t):
        return _verdict("avg:t>1", Outcome.HOLDS, {})
    if _is_one(t):
        if s >= 1 or _is_one(s):
            return _wt(spec, note="EC-(s,1)-WT with s >= 1 is equivalent to EC-WT")
        return _vanishes(spec, "(1.11)", POWER_OVER_A, s=s)
    if _is_one(s):
        if setting == "avg-nor":
            return Verdict(Outcome.UNSUPPORTED, "(1.10)", CONDITIONS["(1.10)"],
                           note="only the absolute criterion is covered; nearest covered cell: avg-abs")
        return _vanishes(spec, "(1.10)", LOG_J_OVER_A)
    if s < 1:
        return _vanishes(spec, "(1.11)", POWER_OVER_A, s=s)
    return _vanishes(spec, "(1.12)", DECAY_PRODUCT, t=t, omega=spec.omega)


# -- empirical probe ------------------------------------------------------------

@dataclass(frozen=True)
class ProbeTable:
    """Ratios ``ln n(eps, d) / ((ln 1/eps)**s + d**t)`` on a grid.

    ``rows`` are ``(eps, d, n, ratio)`` in grid order (eps descending,
    then d ascending). Antidiagonal ``k`` collects the cells whose eps
    position plus d position equals ``k``, so it advances jointly in
    ``1/eps`` and ``d``. The trend is qualitative: a finite grid cannot
    certify a double limit.
    """

    s: float
    t: float
    setting: str
    rows: tuple
    antidiagonal_max: tuple
    antidiagonal_min: tuple

    @property
    def maxima_strictly_decreasing(self) -> bool:
        m = self.antidiagonal_max
        return all(b < a for a, b in zip(m, m[1:]))

    @property
    def last_below_first(self) -> bool:
        return self.antidiagonal_max[-1] < self.antidiagonal_max[0]


def probe_ratio(spec: WeightSpec, s: float, t: float, setting: str, eps_grid, d_grid, *,
                jobs: int = 1, caps=None) -> ProbeTable:
    if not (s > 0 and t > 0):
        raise KorobovError("s and t must be positive")
    setting = setting.lower()
    if setting not in SETTINGS:
        raise KorobovError(f"unknown setting {setting!r}")
    eps_grid = sorted(set(float(e) for e in eps_grid), reverse=True)
    d_grid = sorted(set(int(d) for d in d_grid))
    if not eps_grid or not d_grid:
        raise KorobovError("grids must be non-empty")
    cells = [(i, j, e, d) for i, e in enumerate(eps_grid) for j, d in enumerate(d_grid)]

    def complexity(cell):
        _, _, e, d = cell
        if setting == "worst":
            return info_complexity_worst(spec, d, e, caps=caps)
        crit = Criterion.ABS if setting == "avg-abs" else Criterion.NOR
        return info_complexity_avg(spec, d, e, crit, caps=caps)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(complexity, cells))
    else:
        counts = [complexity(c) for c in cells]

    rows, levels = [], {}
    for (i, j, e, d), n in zip(cells, counts):
        # ln n is taken as 0 for n <= 1
        ratio = math.log(max(n, 1)) / (math.log(1 / e) ** s + d**t)
        rows.append((e, d, n, ratio))
        levels.setdefault(i + j, []).append(ratio)
    keys = sorted(levels)
    return ProbeTable(s, t, setting, tuple(rows),
                      tuple(max(levels[k]) for k in keys), tuple(min(levels[k]) for k in keys))
