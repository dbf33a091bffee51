"""Resource caps for enumeration, counting and series summation.

Defaults can be overridden per call, or process-wide through the
``KOROBOV_TRACT_CAPS`` environment variable, e.g.
``KOROBOV_TRACT_CAPS="frontier=1000000,nodes=50000000"``.
"""

from __future__ import annotations

import dataclasses
import os

ENV_VAR = "KOROBOV_TRACT_CAPS"


@dataclasses.dataclass(frozen=True)
class Caps:
    frontier: int = 10**7  # heap entries in an eigen stream
    nodes: int = 10**8  # recursion nodes in lattice counting
    terms: int = 10**5  # terms of a one-dimensional series
    ranks: int = 10**7  # eigenvalue ranks requested from a stream
    box: int = 10**7  # points in a brute-force enumeration box
    points: int = 2000  # points in an exact packing/covering instance

    def replace(self, **overrides) -> "Caps":
        return dataclasses.replace(self, **overrides)


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    """Parse ``name=value,...`` into a :class:`Caps` derived from ``base``."""
    base = base or Caps()
    names = {f.name for f in dataclasses.fields(Caps)}
    overrides = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValueError(f"unknown cap setting {item!r}; expected one of {sorted(names)}")
        overrides[key] = int(float(value))
        if overrides[key] <= 0:
            raise ValueError(f"cap {key} must be positive")
    return base.replace(**overrides)


def default_caps() -> Caps:
    text = os.environ.get(ENV_VAR, "")
    return parse_caps(text) if text else Caps()


def resolve(caps: Caps | None) -> Caps:
    return caps if caps is not None else default_caps()
