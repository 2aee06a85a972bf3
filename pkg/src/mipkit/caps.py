"""Enumeration caps shared by the group, algebra and canonical-form code.

Every cap is a hard limit: exceeding one raises :class:`CapExceeded`, never a
silent approximation.  Defaults can be overridden through the ``MIPKIT_CAPS``
environment variable, e.g. ``MIPKIT_CAPS="conjugacy=65536,orbit=1000000"``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class CapExceeded(RuntimeError):
    """An enumeration would exceed a configured cap."""

    def __init__(self, cap: str, needed: int, limit: int):
        super().__init__(f"{cap} cap exceeded: need {needed}, limit {limit}")
        self.cap = cap
        self.needed = needed
        self.limit = limit


@dataclass(frozen=True)
class Caps:
    conjugacy: int = 2**14      # element enumeration (classes, centralizers, agemos)
    iso: int = 2**10            # group isomorphism backtracking
    enum: int = 2**24           # phi/psi coset enumeration
    orbit: int = 10**7          # canonical form states per level
    oracle_dim: int = 6         # algebra isomorphism oracle
    subgroups: int = 4096       # elementary abelian subgroup enumeration
    search: int = 10**5         # default contains_normal_copy budget
    unit_gens: int = 64         # pc generators of the small unit group

    def check(self, name: str, needed: int) -> None:
        limit = getattr(self, name)
        if needed > limit:
            raise CapExceeded(name, needed, limit)


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    base = base or Caps()
    known = {f.name for f in fields(Caps)}
    updates = {}
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"unknown cap {key!r}")
        updates[key] = int(float(value))
    return replace(base, **updates)


_override: Caps | None = None


def get_caps() -> Caps:
    if _override is not None:
        return _override
    env = os.environ.get("MIPKIT_CAPS")
    return parse_caps(env) if env else Caps()


def set_caps(caps: Caps | None) -> None:
    """Process-wide override (``None`` restores env/defaults)."""
    global _override
    _override = caps
