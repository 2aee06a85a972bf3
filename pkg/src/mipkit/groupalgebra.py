"""Dense group algebra ``F_p G`` on the group basis, and quotients by ideals.

Only meant for small groups: vectors have length ``|G|`` and products go
through the Cayley table.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .linalg import Echelon
from .pcgroup import Element, PcPresentation


class GroupAlgebra:
    def __init__(self, G: PcPresentation):
        self.G = G
        self.p = G.prime
        self.dim = G.order
        self.cayley = G.enum.cayley

    def basis(self, g: Element) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.G.index(g)] = 1
        return v

    @property
    def one(self) -> np.ndarray:
        return self.basis(self.G.identity)

    def bar(self, g: Element) -> np.ndarray:
        """``g - 1``."""
        return (self.basis(g) - self.one) % self.p

    def mul(self, a, b) -> np.ndarray:
        ia, ib = np.nonzero(a)[0], np.nonzero(b)[0]
        if ia.size == 0 or ib.size == 0:
            return np.zeros(self.dim, dtype=np.int64)
        w = np.outer(a[ia], b[ib]) % self.p
        idx = self.cayley[np.ix_(ia, ib)]
        out = np.bincount(idx.ravel(), weights=w.ravel(), minlength=self.dim)
        return out.astype(np.int64) % self.p

    def power(self, a, k: int) -> np.ndarray:
        out = self.one
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def augmentation_basis(self) -> list:
        return [self.bar(g) for g in self.G.elements() if any(g)]

    def ideal_closure(self, gens) -> Echelon:
        """Two-sided ideal generated by ``gens``."""
        ech = Echelon(self.dim, self.p)
        todo = [v for v in gens if ech.add(v)]
        gs = [self.basis(g) for g in self.G.gens]
        while todo:
            v = todo.pop()
            for g in gs:
                for w in (self.mul(v, g), self.mul(g, v)):
                    if ech.add(w):
                        todo.append(w)
        return ech

    @cached_property
    def _aug_powers(self) -> list:
        """Bases of ``I, I^2, ...`` up to the zero ideal."""
        aug = self.augmentation_basis()
        bars = [self.bar(g) for g in self.G.gens]
        out = [aug]
        while out[-1]:
            ech = Echelon(self.dim, self.p)
            for v in out[-1]:
                for b in bars:
                    ech.add(self.mul(v, b))
            out.append(list(ech.matrix()))
        return out

    def aug_power_dim(self, m: int) -> int:
        """``dim I^m`` (``m >= 1``)."""
        pw = self._aug_powers
        return len(pw[m - 1]) if m - 1 < len(pw) else 0

    def aug_power(self, m: int) -> list:
        pw = self._aug_powers
        return pw[m - 1] if m - 1 < len(pw) else []


class QuotientAlgebra:
    """``A / J`` with normal forms given by reduction against ``J``."""

    def __init__(self, alg: GroupAlgebra, ideal: Echelon):
        self.alg = alg
        self.ideal = ideal
        self.p = alg.p
        self.dim = alg.dim - len(ideal)

    def reduce(self, v) -> np.ndarray:
        return self.ideal.reduce(v)

    def mul(self, a, b) -> np.ndarray:
        return self.reduce(self.alg.mul(a, b))

    def power(self, a, k: int) -> np.ndarray:
        out = self.reduce(self.alg.one)
        base = self.reduce(a)
        while k:
            if k & 1:
                out = self.mul(out, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return out

    def is_zero(self, v) -> bool:
        return not self.reduce(v).any()

    def equal(self, a, b) -> bool:
        return self.is_zero((np.asarray(a) - np.asarray(b)) % self.p)

    def unit_order(self, u) -> int:
        """Order of a unit of augmentation one (a power of ``p``)."""
        one = self.reduce(self.alg.one)
        x, o = self.reduce(u), 1
        while not np.array_equal(x, one):
            x = self.power(x, self.p)
            o *= self.p
        return o


def small_group_ring(G: PcPresentation, derived) -> QuotientAlgebra:
    """``kG/I`` where ``I`` is generated by ``(g - 1)(n - 1)``, ``n`` in ``G'``."""
    alg = GroupAlgebra(G)
    gens = [alg.mul(alg.bar(g), alg.bar(n)) for g in G.gens for n in derived.elements() if any(n)]
    return QuotientAlgebra(alg, alg.ideal_closure(gens))
