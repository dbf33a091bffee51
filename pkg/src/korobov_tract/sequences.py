"""Weight sequences ``a``, ``b`` and the base ``omega`` of a Korobov problem.

A problem instance is a :class:`WeightSpec`: the Fourier weight of the
frequency ``h`` in dimension ``d`` is ``omega ** sum_k a_k * |h_k| ** b_k``.
The sequences are drawn from a small parametric grammar so that their
tail behaviour (and hence every tractability limit) is known exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import SpecError

KINDS = ("constant", "power", "log-power", "exponential", "explicit-list")

_TEXT_KINDS = {
    "const": "constant",
    "constant": "constant",
    "power": "power",
    "logpower": "log-power",
    "log-power": "log-power",
    "exp": "exponential",
    "exponential": "exponential",
    "list": "explicit-list",
    "explicit-list": "explicit-list",
}

_REQUIRED = {
    "constant": ("c",),
    "power": ("c", "p"),
    "log-power": ("c", "p"),
    "exponential": ("c", "gamma"),
}


@dataclass(frozen=True)
class SequenceFamily:
    """A positive sequence ``k -> x_k`` for ``k = 1, 2, ...``.

    ``constant``      x_k = c
    ``power``         x_k = c * k**p
    ``log-power``     x_k = c * ln(k + 1)**p      (p >= 0)
    ``exponential``   x_k = c * exp(gamma * k)    (gamma > 0)
    ``explicit-list`` x_k = values[k - 1], repeating the last value
    """

    kind: str
    c: float = 1.0
    p: float = 0.0
    gamma: float = 0.0
    values: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown sequence kind {self.kind!r}", constraint="kind")
        if self.kind == "explicit-list":
            vals = tuple(float(v) for v in self.values)
            if not vals:
                raise SpecError("explicit list must be non-empty", constraint="positivity")
            object.__setattr__(self, "values", vals)
            for k, v in enumerate(vals, start=1):
                if not (v > 0 and math.isfinite(v)):
                    raise SpecError(f"list value at k={k} is not positive", "positivity", k)
            return
        for name in ("c", "p", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.c > 0 and math.isfinite(self.c)):
            raise SpecError("coefficient c must be positive", constraint="positivity")
        if self.kind == "log-power" and self.p < 0:
            raise SpecError("log-power exponent p must be >= 0", constraint="positivity")
        if self.kind == "exponential" and not self.gamma > 0:
            raise SpecError("exponential rate gamma must be > 0", constraint="positivity")

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: float) -> "SequenceFamily":
        return cls("constant", c=c)

    @classmethod
    def power(cls, c: float, p: float) -> "SequenceFamily":
        return cls("power", c=c, p=p)

    @classmethod
    def log_power(cls, c: float, p: float) -> "SequenceFamily":
        return cls("log-power", c=c, p=p)

    @classmethod
    def exponential(cls, c: float, gamma: float) -> "SequenceFamily":
        return cls("exponential", c=c, gamma=gamma)

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "SequenceFamily":
        return cls("explicit-list", values=tuple(values))

    # evaluation -------------------------------------------------------
    def __call__(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"sequence index must be >= 1, got {k}")
        if self.kind == "constant":
            return self.c
        if self.kind == "power":
            return self.c * float(k) ** self.p
        if self.kind == "log-power":
            return self.c * math.log(k + 1.0) ** self.p
        if self.kind == "exponential":
            return self.c * math.exp(self.gamma * k)
        return self.values[min(k, len(self.values)) - 1]

    def head(self, n: int) -> np.ndarray:
        """First ``n`` terms as a float array."""
        return np.array([self(k) for k in range(1, n + 1)], dtype=float)

    def infimum(self) -> float:
        if self.kind == "explicit-list":
            return min(self.values)
        if self.kind == "power" and self.p < 0:
            return 0.0
        # every other kind is non-decreasing in k
        return self(1)

    def first_decrease(self, K: int | None = None) -> int | None:
        """Smallest ``k >= 2`` with ``x_k < x_{k-1}``, or ``None``.

        Closed forms are decided symbolically; lists termwise (the
        repeated tail cannot decrease). ``K`` limits the termwise scan.
        """
        if self.kind == "power":
            return 2 if self.p < 0 else None
        if self.kind != "explicit-list":
            return None
        vals = self.values if K is None else self.values[:K]
        for k in range(1, len(vals)):
            if vals[k] < vals[k - 1]:
                return k + 1
        return None

    # text grammar -----------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "SequenceFamily":
        """Parse ``power:c=1,p=2``, ``const:c=1``, ``list:2,1.5`` and friends."""
        head, sep, body = text.strip().partition(":")
        kind = _TEXT_KINDS.get(head.strip().lower())
        if kind is None or not sep:
            raise SpecError(f"cannot parse sequence {text!r}", constraint="grammar")
        if kind == "explicit-list":
            try:
                values = [float(v) for v in body.split(",") if v.strip()]
            except ValueError as exc:
                raise SpecError(f"cannot parse list {text!r}: {exc}", constraint="grammar") from None
            return cls.from_list(values)
        params = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise SpecError(f"expected name=value in {text!r}", constraint="grammar")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise SpecError(f"bad number {value!r} in {text!r}", constraint="grammar") from None
        return cls.from_params(kind, params)

    @classmethod
    def from_params(cls, kind: str, params: Mapping[str, float]) -> "SequenceFamily":
        kind = _TEXT_KINDS.get(kind, kind)
        if kind == "explicit-list":
            return cls.from_list(params["values"])
        required = _REQUIRED.get(kind)
        if required is None:
            raise SpecError(f"unknown sequence kind {kind!r}", constraint="kind")
        extra = set(params) - set(required)
        missing = [name for name in required if name not in params]
        if missing or extra:
            raise SpecError(
                f"{kind} expects parameters {list(required)}, got {sorted(params)}",
                constraint="grammar",
            )
        return cls(kind, **{name: float(params[name]) for name in required})

    def to_text(self) -> str:
        if self.kind == "constant":
            return f"const:c={self.c!r}"
        if self.kind == "power":
            return f"power:c={self.c!r},p={self.p!r}"
        if self.kind == "log-power":
            return f"logpower:c={self.c!r},p={self.p!r}"
        if self.kind == "exponential":
            return f"exp:c={self.c!r},gamma={self.gamma!r}"
        return "list:" + ",".join(repr(v) for v in self.values)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    message: str = "valid"
    constraint: str | None = None
    index: int | None = None

    def raise_if_invalid(self) -> None:
        if not self.valid:
            raise SpecError(self.message, self.constraint, self.index)


def validate(omega: float, a: SequenceFamily, b: SequenceFamily, K: int = 1000) -> ValidationReport:
    """Check ``0 < omega < 1``, ``a`` non-decreasing and ``inf b > 0``.

    Reports the first violated constraint only.
    """
    if not (0.0 < omega < 1.0):
        return ValidationReport(False, "omega not in (0,1)", "omega")
    k = a.first_decrease(K)
    if k is not None:
        return ValidationReport(False, f"a not non-decreasing at k={k}", "a-monotone", k)
    if not b.infimum() > 0:
        return ValidationReport(False, "b has zero infimum", "b-infimum")
    return ValidationReport(True)


@dataclass(frozen=True)
class WeightSpec:
    """``omega`` in (0, 1) together with the weight sequences ``a`` and ``b``.

    Construction validates the instance, so no other code ever sees an
    invalid one. Immutable.
    """

    omega: float
    a: SequenceFamily
    b: SequenceFamily

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega))
        validate(self.omega, self.a, self.b).raise_if_invalid()

    @classmethod
    def from_text(cls, omega: float, a: str, b: str) -> "WeightSpec":
        return cls(omega, SequenceFamily.parse(a), SequenceFamily.parse(b))

    @property
    def log_inv_omega(self) -> float:
        """``ln(1/omega) > 0``."""
        return -math.log(self.omega)

    def validate(self, K: int = 1000) -> ValidationReport:
        return validate(self.omega, self.a, self.b, K)

    def a_vector(self, d: int) -> np.ndarray:
        return self.a.head(d)

    def b_vector(self, d: int) -> np.ndarray:
        return self.b.head(d)


def eval_a(spec: WeightSpec, k: int) -> float:
    return spec.a(k)


def eval_b(spec: WeightSpec, k: int) -> float:
    return spec.b(k)


def b_star(spec: WeightSpec) -> float:
    """Infimum of the ``b`` sequence (positive by construction)."""
    return spec.b.infimum()
