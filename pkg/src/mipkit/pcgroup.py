"""Finite p-groups given by polycyclic (power-commutator) presentations.

Generators are indexed from 0 internally and from 1 in ``.pcp`` files.  An
element is the tuple of its normal-form exponents.  A word is a tuple of
``(generator, exponent)`` pairs.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .caps import CapExceeded, get_caps

Element = tuple
Word = tuple


class PresentationError(ValueError):
    """Invalid ``.pcp`` text or an inconsistent presentation."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IsomorphismUndecided(CapExceeded):
    pass


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(math.isqrt(p)) + 1))


class CollectorTables:
    """Precomputed conjugates and powers used by the collector kernels."""

    def __init__(self, pres: "PcPresentation"):
        p, n = pres.prime, pres.ngens
        self.p = p
        self.n = n
        self.pow_words = [list(w) for w in pres.power_rels]
        # conjpow[i][k][x] = normal-form letters of (g_k^{g_i})^x, k > i
        self.conjpow = [[None] * n for _ in range(n)]
        fallback = kernels.python_collect
        for i in range(n - 1, -1, -1):
            for k in range(i + 1, n):
                w = [(k, 1)] + list(pres.comm_rels[k][i])
                base = fallback(self, [0] * n, w)
                cur = [0] * n
                row = [[]]
                for _ in range(1, p):
                    cur = fallback(self, cur, _letters(base))
                    row.append(_letters(cur))
                self.conjpow[i][k] = row
        self._pack()

    def _pack(self):
        n, p = self.n, self.p
        gens, exps = [], []
        pstart = np.zeros(n + 1, dtype=np.int64)
        for i, w in enumerate(self.pow_words):
            pstart[i] = len(gens)
            for g, e in w:
                gens.append(g)
                exps.append(e)
        pstart[n] = len(gens)
        cstart = np.zeros((n, n, p), dtype=np.int64)
        clen = np.zeros((n, n, p), dtype=np.int64)
        for i in range(n):
            for k in range(i + 1, n):
                for x in range(1, p):
                    w = self.conjpow[i][k][x]
                    cstart[i, k, x] = len(gens)
                    clen[i, k, x] = len(w)
                    for g, e in w:
                        gens.append(g)
                        exps.append(e)
        self.pow_start = pstart
        self.conj_start = cstart
        self.conj_len = clen
        self.flat_gen = np.array(gens, dtype=np.int64)
        self.flat_exp = np.array(exps, dtype=np.int64)


def _letters(exps) -> list:
    return [(i, e) for i, e in enumerate(exps) if e]


@dataclass(frozen=True, eq=False)
class PcPresentation:
    """Power-commutator presentation of a group of order ``prime**ngens``.

    ``power_rels[i]`` is the word for ``g_i^p``; ``comm_rels[j][i]`` (``j > i``)
    is the word for ``[g_j, g_i]``.  Every word in a relation with smaller
    index ``i`` only uses generators of index ``> i``.
    """

    prime: int
    ngens: int
    power_rels: tuple
    comm_rels: tuple
    name: str = ""

    def __post_init__(self):
        _check_weighting(self)

    # -- identity and equality -------------------------------------------------
    def key(self):
        return (self.prime, self.ngens, self.power_rels, self.comm_rels)

    def __eq__(self, other):
        return isinstance(other, PcPresentation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PcPresentation({self.name or '?'}, p={self.prime}, n={self.ngens})"

    @property
    def order(self) -> int:
        return self.prime ** self.ngens

    @cached_property
    def tables(self) -> CollectorTables:
        return CollectorTables(self)

    @property
    def identity(self) -> Element:
        return (0,) * self.ngens

    def gen(self, i: int) -> Element:
        e = [0] * self.ngens
        e[i] = 1
        return tuple(e)

    @property
    def gens(self) -> list:
        return [self.gen(i) for i in range(self.ngens)]

    # -- arithmetic -------------------------------------------------------------
    def collect(self, word: Iterable, start: Element | None = None) -> Element:
        letters = []
        for g, e in word:
            if not 0 <= g < self.ngens:
                raise IndexError(f"generator index {g} out of range")
            letters.append((g, e % self.prime))
        x = start if start is not None else self.identity
        return tuple(kernels.collect(self.tables, list(x), letters))

    def multiply(self, a: Element, b: Element) -> Element:
        return tuple(kernels.collect(self.tables, list(a), _letters(b)))

    def inverse(self, a: Element) -> Element:
        p, tab = self.prime, self.tables
        state = list(a)
        out = [0] * self.ngens
        for i in range(self.ngens):
            e = state[i]
            if e:
                out[i] = p - e
                state = kernels.collect(tab, state, [(i, p - e)])
        return tuple(out)

    def power(self, a: Element, k: int) -> Element:
        if k < 0:
            a, k = self.inverse(a), -k
        result = self.identity
        base = a
        while k:
            if k & 1:
                result = self.multiply(result, base)
            k >>= 1
            if k:
                base = self.multiply(base, base)
        return result

    def commutator(self, a: Element, b: Element) -> Element:
        """``[a, b] = a^-1 b^-1 a b``."""
        ab = self.multiply(a, b)
        ba = self.multiply(b, a)
        return self.multiply(self.inverse(ba), ab)

    def conjugate(self, a: Element, b: Element) -> Element:
        """``a^b = b^-1 a b``."""
        return self.multiply(self.inverse(b), self.multiply(a, b))

    def element_order(self, a: Element) -> int:
        o = 1
        while any(a):
            a = self.power(a, self.prime)
            o *= self.prime
        return o

    def elements(self):
        return itertools.product(range(self.prime), repeat=self.ngens)

    def index(self, a: Element) -> int:
        i = 0
        for e in a:
            i = i * self.prime + e
        return i

    def element(self, idx: int) -> Element:
        out = [0] * self.ngens
        for k in range(self.ngens - 1, -1, -1):
            idx, out[k] = divmod(idx, self.prime)
        return tuple(out)

    def check_element(self, a) -> Element:
        a = tuple(a)
        if len(a) != self.ngens or any(not 0 <= e < self.prime for e in a):
            raise ValueError(f"{a} is not a normal form of {self!r}")
        return a

    def is_abelian(self) -> bool:
        return all(not w for row in self.comm_rels for w in row)

    @cached_property
    def enum(self) -> "EnumeratedGroup":
        return EnumeratedGroup(self)


def depth(a: Element) -> int:
    for i, e in enumerate(a):
        if e:
            return i
    return len(a)


# ---------------------------------------------------------------------------
# construction, parsing, validation
# ---------------------------------------------------------------------------

def _norm_word(word, p: int, n: int, where: str = "") -> Word:
    out = []
    last = -1
    for g, e in word:
        if not 0 <= g < n:
            raise PresentationError(f"generator g{g + 1} out of range{where}")
        if g <= last:
            raise PresentationError(f"word indices must strictly increase{where}")
        if not 1 <= e <= p - 1:
            raise PresentationError(f"exponent {e} not in 1..{p - 1}{where}")
        out.append((g, e))
        last = g
    return tuple(out)


def make_presentation(p: int, n: int, powers=None, comms=None, name: str = "",
                      check: bool = True) -> PcPresentation:
    """Build a presentation from 0-based relation dicts.

    ``powers`` maps ``i`` to a word, ``comms`` maps ``(j, i)`` with ``j > i``
    to a word; words are lists of ``(gen, exp)`` or exponent vectors.
    """
    if not _is_prime(p):
        raise PresentationError(f"{p} is not a prime")
    powers = powers or {}
    comms = comms or {}

    def as_word(w, where):
        if w is None:
            return ()
        w = list(w)
        if w and not isinstance(w[0], (tuple, list)):
            w = _letters(w)
        return _norm_word(w, p, n, where)

    pw = tuple(as_word(powers.get(i), f" (pow {i + 1})") for i in range(n))
    cm = []
    for j in range(n):
        cm.append(tuple(as_word(comms.get((j, i)), f" (comm {j + 1} {i + 1})") for i in range(j)))
    for (j, i) in comms:
        if not j > i:
            raise PresentationError(f"commutator relation needs j > i, got ({j + 1}, {i + 1})")
    pres = PcPresentation(p, n, pw, tuple(cm), name)
    if check:
        check_consistency(pres)
    return pres


def _check_weighting(pres: PcPresentation) -> None:
    for i, w in enumerate(pres.power_rels):
        if any(g <= i for g, _ in w):
            raise PresentationError(f"relation word of pow {i + 1} uses index <= {i + 1}")
    for j, row in enumerate(pres.comm_rels):
        for i, w in enumerate(row):
            if any(g <= i for g, _ in w):
                raise PresentationError(
                    f"relation word of comm {j + 1} {i + 1} uses index <= {i + 1}")


def consistency_failures(pres: PcPresentation) -> list:
    """Overlap tests; returns the list of failing test words (empty if consistent)."""
    n, p = pres.ngens, pres.prime
    col = pres.collect
    unit = pres.gen
    bad = []

    def nf(word):
        return col(word)

    pw = [nf(w) for w in pres.power_rels]
    for i in range(n):
        # g_i (g_i^p) = (g_i^p) g_i
        if col(pres.power_rels[i], unit(i)) != col([(i, 1)], pw[i]):
            bad.append(("g^p g", i))
    for j in range(n):
        for i in range(j):
            ji = nf([(j, 1), (i, 1)])
            # (g_j^p) g_i = g_j^{p-1} (g_j g_i)
            left = col([(i, 1)], pw[j])
            start = [0] * n
            start[j] = p - 1
            right = col(_letters(ji), tuple(start))
            if left != right:
                bad.append(("g_j^p g_i", j, i))
            # g_j (g_i^p) = (g_j g_i) g_i^{p-1}
            if col(pres.power_rels[i], unit(j)) != col([(i, p - 1)], ji):
                bad.append(("g_j g_i^p", j, i))
    for k in range(n):
        for j in range(k):
            kj = nf([(k, 1), (j, 1)])
            for i in range(j):
                left = col([(i, 1)], kj)
                right = col(_letters(nf([(j, 1), (i, 1)])), unit(k))
                if left != right:
                    bad.append(("g_k g_j g_i", k, j, i))
    return bad


def check_consistency(pres: PcPresentation) -> None:
    bad = consistency_failures(pres)
    if bad:
        raise PresentationError(f"inconsistent presentation {pres.name!r}: overlap {bad[0]} disagrees")


_TOKEN = re.compile(r"^g(\d+)(?:\^(-?\d+))?$")


def _parse_word(text: str, lineno: int):
    text = text.strip()
    if text in ("", "1", "∅", "id", "e"):
        return []
    out = []
    for tok in text.replace("*", " ").split():
        m = _TOKEN.match(tok)
        if not m:
            raise PresentationError(f"bad word token {tok!r}", lineno)
        out.append((int(m.group(1)) - 1, int(m.group(2) or 1)))
    return out


def parse_presentation(text: str, check: bool = True) -> PcPresentation:
    """Parse ``.pcp`` text into a validated, consistency-checked presentation."""
    p = n = None
    name = ""
    powers: dict = {}
    comms: dict = {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "p":
            try:
                p = int(rest)
            except ValueError:
                raise PresentationError(f"bad prime {rest!r}", lineno) from None
            if not _is_prime(p):
                raise PresentationError(f"{p} is not a prime", lineno)
        elif head == "n":
            try:
                n = int(rest)
            except ValueError:
                raise PresentationError(f"bad generator count {rest!r}", lineno) from None
            if n < 0:
                raise PresentationError("negative generator count", lineno)
        elif head == "name":
            name = rest
        elif head in ("pow", "comm"):
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise PresentationError("missing '='", lineno)
            try:
                idx = [int(t) - 1 for t in lhs.split()]
            except ValueError:
                raise PresentationError(f"bad relation indices {lhs.strip()!r}", lineno) from None
            pending.append((head, idx, _parse_word(rhs, lineno), lineno))
        else:
            raise PresentationError(f"unknown directive {head!r}", lineno)
    if p is None or n is None:
        raise PresentationError("missing 'p' or 'n' header")
    for head, idx, word, lineno in pending:
        if any(not 0 <= i < n for i in idx):
            raise PresentationError("generator index out of range", lineno)
        try:
            word = _norm_word(word, p, n)
        except PresentationError as exc:
            raise PresentationError(str(exc), lineno) from None
        if head == "pow":
            if len(idx) != 1:
                raise PresentationError("pow takes one index", lineno)
            (i,) = idx
            if i in powers:
                raise PresentationError(f"duplicate pow {i + 1}", lineno)
            if any(g <= i for g, _ in word):
                raise PresentationError(f"relation word uses index <= {i + 1}", lineno)
            powers[i] = word
        else:
            if len(idx) != 2:
                raise PresentationError("comm takes two indices", lineno)
            j, i = idx
            if not j > i:
                raise PresentationError("comm needs j > i", lineno)
            if (j, i) in comms:
                raise PresentationError(f"duplicate comm {j + 1} {i + 1}", lineno)
            if any(g <= i for g, _ in word):
                raise PresentationError(f"relation word uses index <= {i + 1}", lineno)
            comms[(j, i)] = word
    return make_presentation(p, n, powers, comms, name, check=check)


def load_presentation(path) -> PcPresentation:
    with open(path, encoding="utf-8") as fh:
        pres = parse_presentation(fh.read())
    if not pres.name:
        import os
        pres = rename(pres, os.path.splitext(os.path.basename(str(path)))[0])
    return pres


def rename(pres: PcPresentation, name: str) -> PcPresentation:
    return PcPresentation(pres.prime, pres.ngens, pres.power_rels, pres.comm_rels, name)


def format_word(word) -> str:
    if not word:
        return ""
    return " ".join(f"g{g + 1}" if e == 1 else f"g{g + 1}^{e}" for g, e in word)


def format_presentation(pres: PcPresentation) -> str:
    lines = []
    if pres.name:
        lines.append(f"name {pres.name}")
    lines += [f"p {pres.prime}", f"n {pres.ngens}"]
    for i, w in enumerate(pres.power_rels):
        if w:
            lines.append(f"pow {i + 1} = {format_word(w)}")
    for j, row in enumerate(pres.comm_rels):
        for i, w in enumerate(row):
            if w:
                lines.append(f"comm {j + 1} {i + 1} = {format_word(w)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

class EnumeratedGroup:
    """Index-based view of a small group: element ``k`` is ``pres.element(k)``.

    ``right[x, i] = x * g_i`` and ``left[x, i] = g_i * x`` are built once by
    collection; everything else is array lookups.
    """

    def __init__(self, pres: PcPresentation):
        get_caps().check("conjugacy", pres.order)
        self.pres = pres
        self.size = pres.order
        n, p = pres.ngens, pres.prime
        els = list(pres.elements())
        self.elements = els
        right = np.zeros((self.size, n), dtype=np.int64)
        left = np.zeros((self.size, n), dtype=np.int64)
        tab = pres.tables
        for x, a in enumerate(els):
            for i in range(n):
                right[x, i] = pres.index(kernels.collect(tab, list(a), [(i, 1)]))
                left[x, i] = pres.index(kernels.collect(tab, [0] * i + [1] + [0] * (n - i - 1), _letters(a)))
        self.right = right
        self.left = left

    @cached_property
    def conj(self) -> np.ndarray:
        """``conj[x, i]`` = index of ``x^{g_i}``."""
        n = self.pres.ngens
        out = np.zeros((self.size, n), dtype=np.int64)
        for i in range(n):
            inv = np.empty(self.size, dtype=np.int64)
            inv[self.left[:, i]] = np.arange(self.size)
            out[:, i] = inv[self.right[:, i]]
        return out

    @cached_property
    def cayley(self) -> np.ndarray:
        """Full multiplication table ``cayley[x, y] = x * y``."""
        get_caps().check("iso", self.size)
        p = self.pres.prime
        t = np.zeros((self.size, self.size), dtype=np.int64)
        t[:, 0] = np.arange(self.size)
        for y in range(1, self.size):
            a = self.elements[y]
            k = max(i for i, e in enumerate(a) if e)
            prev = list(a)
            prev[k] -= 1
            t[:, y] = self.right[t[:, self.pres.index(prev)], k]
        del p
        return t

    @cached_property
    def orders(self) -> np.ndarray:
        pres = self.pres
        return np.array([pres.element_order(a) for a in self.elements], dtype=np.int64)

    @cached_property
    def class_labels(self) -> np.ndarray:
        """Smallest element index in each conjugacy class."""
        lab = np.arange(self.size)
        conj = self.conj
        invs = []
        for i in range(conj.shape[1]):
            inv = np.empty(self.size, dtype=np.int64)
            inv[conj[:, i]] = np.arange(self.size)
            invs.append(inv)
        while True:
            new = lab.copy()
            for i in range(conj.shape[1]):
                np.minimum.at(new, conj[:, i], lab)
                np.minimum.at(new, invs[i], lab)
            new = new[new]
            if np.array_equal(new, lab):
                return lab
            lab = new

    def power_index(self, x: int, k: int) -> int:
        return self.pres.index(self.pres.power(self.elements[x], k))


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subgroup:
    """Subgroup given by its canonical induced generating sequence."""

    parent: PcPresentation
    igs: tuple

    @property
    def order(self) -> int:
        return self.parent.prime ** len(self.igs)

    @property
    def size_exp(self) -> int:
        return len(self.igs)

    @cached_property
    def depths(self) -> tuple:
        return tuple(depth(u) for u in self.igs)

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.parent == other.parent
                and self.igs == other.igs)

    def __hash__(self):
        return hash(self.igs)

    def __repr__(self):
        return f"Subgroup(order={self.order}, depths={self.depths})"

    def is_trivial(self) -> bool:
        return not self.igs

    def exponents(self, x: Element):
        """Exponents of ``x`` relative to ``igs`` or ``None`` if ``x`` is not in the subgroup."""
        pres = self.parent
        p = pres.prime
        ex = []
        for u, d in zip(self.igs, self.depths):
            if depth(x) < d:
                return None
            e = x[d]
            ex.append(e)
            if e:
                x = pres.multiply(pres.power(u, p - e), x)
        return ex if not any(x) else None

    def contains(self, x: Element) -> bool:
        return self.exponents(x) is not None

    def __contains__(self, x):
        return self.contains(tuple(x))

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return all(self.contains(u) for u in other.igs)

    def element_from_exponents(self, ex) -> Element:
        pres = self.parent
        x = pres.identity
        for u, e in zip(self.igs, ex):
            if e:
                x = pres.multiply(x, pres.power(u, e))
        return x

    def elements(self):
        get_caps().check("conjugacy", self.order)
        for ex in itertools.product(range(self.parent.prime), repeat=len(self.igs)):
            yield self.element_from_exponents(ex)

    def is_normal(self) -> bool:
        pres = self.parent
        return all(self.contains(pres.conjugate(u, g)) for u in self.igs for g in pres.gens)

    def is_abelian(self) -> bool:
        pres = self.parent
        return all(pres.commutator(a, b) == pres.identity
                   for a, b in itertools.combinations(self.igs, 2))


def _sift(pres: PcPresentation, table: dict, x: Element) -> Element:
    p = pres.prime
    while True:
        d = depth(x)
        if d == pres.ngens or d not in table:
            return x
        x = pres.multiply(pres.power(table[d], p - x[d]), x)


def _canonical_igs(pres: PcPresentation, table: dict) -> tuple:
    p = pres.prime
    ds = sorted(table)
    us = [table[d] for d in ds]
    for a, d in enumerate(ds):
        u = us[a]
        if u[d] != 1:
            u = pres.power(u, pow(u[d], -1, p))
        for b in range(a + 1, len(ds)):
            e = u[ds[b]]
            if e:
                u = pres.multiply(u, pres.power(us[b], p - e))
        us[a] = u
    # later elements may have been reduced already; clear again above each pivot
    for a in range(len(ds) - 1, -1, -1):
        u = us[a]
        for b in range(a + 1, len(ds)):
            e = u[ds[b]]
            if e:
                u = pres.multiply(u, pres.power(us[b], p - e))
        us[a] = u
    return tuple(us)


def subgroup_generated(pres: PcPresentation, gens: Sequence) -> Subgroup:
    """Subgroup generated by ``gens`` with a canonical induced generating sequence."""
    p = pres.prime
    table: dict = {}
    queue = [pres.check_element(g) for g in gens]
    while queue:
        x = _sift(pres, table, queue.pop())
        d = depth(x)
        if d == pres.ngens:
            continue
        if x[d] != 1:
            x = pres.power(x, pow(x[d], -1, p))
        others = list(table.values())
        table[d] = x
        queue.append(pres.power(x, p))
        for u in others:
            queue.append(pres.commutator(x, u))
    return Subgroup(pres, _canonical_igs(pres, table))


def whole_group(pres: PcPresentation) -> Subgroup:
    return Subgroup(pres, tuple(pres.gens))


def trivial_subgroup(pres: PcPresentation) -> Subgroup:
    return Subgroup(pres, ())


def normal_closure(pres: PcPresentation, gens: Sequence) -> Subgroup:
    s = subgroup_generated(pres, gens)
    while True:
        new = [c for u in s.igs for g in pres.gens
               if not s.contains(c := pres.conjugate(u, g))]
        if not new:
            return s
        s = subgroup_generated(pres, list(s.igs) + new)


def subgroup_product(a: Subgroup, b: Subgroup) -> Subgroup:
    """``AB`` for subgroups where one normalizes the other."""
    return subgroup_generated(a.parent, list(a.igs) + list(b.igs))


def commutator_subgroup(a: Subgroup, b: Subgroup) -> Subgroup:
    """``[A, B]`` for normal subgroups ``A`` and ``B``."""
    pres = a.parent
    return normal_closure(pres, [pres.commutator(x, y) for x in a.igs for y in b.igs])


def agemo(s: Subgroup, k: int = 1) -> Subgroup:
    """Subgroup generated by the ``p**k``-th powers of all elements of ``s``."""
    pres = s.parent
    q = pres.prime ** k
    if k == 0:
        return s
    if s.is_abelian():
        return subgroup_generated(pres, [pres.power(u, q) for u in s.igs])
    table: dict = {}
    gens = []
    for x in s.elements():
        y = pres.power(x, q)
        if any(_sift(pres, table, y)):
            gens.append(y)
            sub = subgroup_generated(pres, gens)
            table = {d: u for d, u in zip(sub.depths, sub.igs)}
    return subgroup_generated(pres, gens)


def intersection(a: Subgroup, b: Subgroup) -> Subgroup:
    small, big = (a, b) if a.order <= b.order else (b, a)
    return subgroup_generated(a.parent, [x for x in small.elements() if big.contains(x)])


def centralizer(pres: PcPresentation, x: Element) -> Subgroup:
    """Centralizer via Schreier generators of the conjugation orbit of ``x``."""
    x = pres.check_element(x)
    cap = get_caps().conjugacy
    trans = {x: pres.identity}
    queue = deque([x])
    schreier = []
    gens = pres.gens
    while queue:
        y = queue.popleft()
        ty = trans[y]
        for g in gens:
            z = pres.conjugate(y, g)
            tg = pres.multiply(ty, g)
            if z in trans:
                s = pres.multiply(tg, pres.inverse(trans[z]))
                if any(s):
                    schreier.append(s)
            else:
                trans[z] = tg
                if len(trans) > cap:
                    raise CapExceeded("conjugacy", len(trans), cap)
                queue.append(z)
    return subgroup_generated(pres, schreier)


def center(pres: PcPresentation) -> Subgroup:
    """Simultaneous centralizer of all generators (enumerative)."""
    en = pres.enum
    mask = np.all(en.right == en.left, axis=1)
    return subgroup_generated(pres, [en.elements[i] for i in np.nonzero(mask)[0]])


def lower_central_series(pres: PcPresentation) -> list:
    g = whole_group(pres)
    series = [g]
    while not series[-1].is_trivial():
        nxt = commutator_subgroup(series[-1], g)
        if nxt == series[-1]:
            break
        series.append(nxt)
    return series


@dataclass(frozen=True)
class SubgroupRecord:
    center: Subgroup
    derived: Subgroup
    frattini: Subgroup
    lower_central: list = field(default_factory=list)
    agemo: list = field(default_factory=list)


def standard_subgroups(pres: PcPresentation) -> SubgroupRecord:
    lcs = lower_central_series(pres)
    derived = lcs[1] if len(lcs) > 1 else lcs[0]
    g = whole_group(pres)
    ag = [g]
    while not ag[-1].is_trivial():
        ag.append(agemo(g, len(ag)))
    frattini = subgroup_product(derived, ag[1] if len(ag) > 1 else trivial_subgroup(pres))
    return SubgroupRecord(center(pres), derived, frattini, lcs, ag)


def frattini_subgroup(pres: PcPresentation) -> Subgroup:
    lcs = lower_central_series(pres)
    der = lcs[1] if len(lcs) > 1 else trivial_subgroup(pres)
    return subgroup_product(der, agemo(whole_group(pres), 1))


# ---------------------------------------------------------------------------
# quotients and subgroup presentations
# ---------------------------------------------------------------------------

def _relations_from(pres_new_p: int, m: int, gen_elems: list, to_exps, mul, power, comm):
    powers, comms = {}, {}
    for k in range(m):
        powers[k] = to_exps(power(gen_elems[k], pres_new_p))
        for l in range(k + 1, m):
            comms[(l, k)] = to_exps(comm(gen_elems[l], gen_elems[k]))
    return powers, comms


class Projection:
    """Natural map ``G -> G/N`` onto the quotient presentation."""

    def __init__(self, pres: PcPresentation, normal: Subgroup):
        self.pres = pres
        self.normal = normal
        nd = set(normal.depths)
        self.factor_depths = [d for d in range(pres.ngens) if d not in nd]
        self.by_depth = dict(zip(normal.depths, normal.igs))

    def __call__(self, x: Element) -> Element:
        pres, p = self.pres, self.pres.prime
        x = tuple(x)
        out = []
        for d in range(pres.ngens):
            e = x[d]
            if not e:
                if d not in self.by_depth:
                    out.append(0)
                continue
            if d in self.by_depth:
                x = pres.multiply(x, pres.power(self.by_depth[d], p - e))
            else:
                out.append(e)
                x = pres.multiply(pres.power(pres.gen(d), p - e), x)
        return tuple(out)

    def lift(self, y: Element) -> Element:
        pres = self.pres
        x = pres.identity
        for d, e in zip(self.factor_depths, y):
            if e:
                x = pres.multiply(x, pres.power(pres.gen(d), e))
        return x


def quotient_group(pres: PcPresentation, normal: Subgroup, name: str | None = None,
                   with_projection: bool = False):
    """Presentation of ``G/N``; optionally also the natural projection."""
    if not normal.is_normal():
        raise ValueError("subgroup is not normal")
    proj = Projection(pres, normal)
    gens = [pres.gen(d) for d in proj.factor_depths]
    powers, comms = _relations_from(pres.prime, len(gens), gens, proj, pres.multiply,
                                    pres.power, pres.commutator)
    q = make_presentation(pres.prime, len(gens), powers, comms,
                          name if name is not None else f"{pres.name}/N", check=False)
    return (q, proj) if with_projection else q


def subgroup_presentation(s: Subgroup, name: str | None = None) -> PcPresentation:
    """The subgroup as a group in its own right, on its induced generators."""
    pres = s.parent
    gens = list(s.igs)
    powers, comms = _relations_from(pres.prime, len(gens), gens, s.exponents,
                                    pres.multiply, pres.power, pres.commutator)
    return make_presentation(pres.prime, len(gens), powers, comms,
                             name if name is not None else f"{pres.name}.sub", check=False)


def section(top: Subgroup, bottom: Subgroup, name: str = "") -> PcPresentation:
    """The factor group ``top/bottom`` (``bottom`` normal in ``top``)."""
    sub = subgroup_presentation(top)
    inner = subgroup_generated(sub, [tuple(top.exponents(u)) for u in bottom.igs])
    return quotient_group(sub, inner, name=name)


# ---------------------------------------------------------------------------
# conjugacy
# ---------------------------------------------------------------------------

def conjugacy_classes(pres: PcPresentation) -> list:
    """``(representative, size)`` pairs; representatives are lexicographically least."""
    en = pres.enum
    lab = en.class_labels
    counts = Counter(lab.tolist())
    return [(en.elements[r], counts[r]) for r in sorted(counts)]


# ---------------------------------------------------------------------------
# abelian groups
# ---------------------------------------------------------------------------

def smith_normal_form(m) -> tuple:
    """Integer Smith normal form ``U m V = D``; returns ``(D, U, V)`` as lists."""
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row_dst += k row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for r in a:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                bad = [(i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                       if a[i][j] % a[t][t]]
                if bad:
                    add_row(t, bad[0][0], 1)
                    done = False
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def _relation_matrix(pres: PcPresentation):
    n, p = pres.ngens, pres.prime
    rows = []
    for i in range(n):
        r = [0] * n
        r[i] = p
        for g, e in pres.power_rels[i]:
            r[g] -= e
        rows.append(r)
    return rows


def abelian_basis(pres: PcPresentation) -> list:
    """Independent generators of an abelian group with their orders (descending)."""
    if not pres.is_abelian():
        raise ValueError("group is not abelian")
    n = pres.ngens
    if n == 0:
        return []
    d, _, v = smith_normal_form(_relation_matrix(pres))
    vinv = _int_inverse(v)
    out = []
    for i in range(n):
        q = abs(d[i][i])
        if q == 1:
            continue
        x = pres.identity
        for j in range(n):
            c = vinv[i][j]
            if c:
                x = pres.multiply(x, pres.power(pres.gen(j), c))
        out.append((x, q))
    out.sort(key=lambda t: -t[1])
    return out


def _int_inverse(v):
    """Inverse of a unimodular integer matrix (exact Gauss-Jordan)."""
    n = len(v)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(v)]
    for c in range(n):
        r = next(r for r in range(c, n) if a[r][c])
        a[c], a[r] = a[r], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [[int(x) for x in row[n:]] for row in a]


def abelian_invariants(g) -> list:
    """Elementary divisors (descending prime powers) of an abelian group.

    Accepts a presentation or a :class:`Subgroup`.
    """
    pres = subgroup_presentation(g) if isinstance(g, Subgroup) else g
    if not pres.is_abelian():
        raise ValueError("group is not abelian")
    p = pres.prime
    sizes = [pres.ngens]
    s = whole_group(pres)
    while not s.is_trivial():
        s = agemo(s, 1)
        sizes.append(s.size_exp)
    # number of cyclic factors of order >= p^k is sizes[k-1] - sizes[k]
    ge = [sizes[k - 1] - sizes[k] for k in range(1, len(sizes))]
    out = []
    for k in range(len(ge), 0, -1):
        cnt = ge[k - 1] - (ge[k] if k < len(ge) else 0)
        out += [p ** k] * cnt
    return out


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

def exponent(pres: PcPresentation) -> int:
    if pres.order <= get_caps().conjugacy:
        return int(pres.enum.orders.max()) if pres.ngens else 1
    raise CapExceeded("conjugacy", pres.order, get_caps().conjugacy)


def nilpotency_class(pres: PcPresentation) -> int:
    return len(lower_central_series(pres)) - 1


def group_props(pres: PcPresentation) -> dict:
    cls = nilpotency_class(pres)
    d = pres.ngens - frattini_subgroup(pres).size_exp
    return {
        "exponent": exponent(pres),
        "nilpotency_class": cls,
        "min_generators": d,
        "is_maximal_class": pres.ngens >= 2 and cls == pres.ngens - 1,
    }


# ---------------------------------------------------------------------------
# isomorphism
# ---------------------------------------------------------------------------

class _IsoData:
    def __init__(self, pres: PcPresentation):
        self.pres = pres
        en = pres.enum
        self.en = en
        self.table = en.cayley
        frat = frattini_subgroup(pres)
        lcs = lower_central_series(pres)
        der = lcs[1] if len(lcs) > 1 else trivial_subgroup(pres)
        _, proj = quotient_group(pres, frat, with_projection=True)
        self.fcoords = np.array([proj(a) for a in en.elements], dtype=np.int64).reshape(en.size, -1)
        lab = en.class_labels
        csize = np.bincount(lab, minlength=en.size)[lab]
        in_frat = np.array([frat.contains(a) for a in en.elements])
        in_der = np.array([der.contains(a) for a in en.elements])
        self.profile = [
            (int(o), int(c), bool(f), bool(d))
            for o, c, f, d in zip(en.orders, csize, in_frat, in_der)
        ]
        self.generators = [pres.index(pres.gen(d)) for d in proj.factor_depths]
        self.d = len(self.generators)
        self.inv = np.empty(en.size, dtype=np.int64)
        rows, cols = np.nonzero(self.table == 0)
        self.inv[rows] = cols

    def comm(self, x: int, y: int) -> int:
        t, inv = self.table, self.inv
        return int(t[t[inv[x], inv[y]], t[x, y]])

    def summary(self):
        return (self.pres.order, self.d, sorted(Counter(self.profile).items()))


def _bfs_tree(table: np.ndarray, gens: list):
    size = table.shape[0]
    seen = np.full(size, -1, dtype=np.int64)
    seen[0] = 0
    layers = []
    frontier = [0]
    while frontier:
        par, gi, nodes = [], [], []
        for x in frontier:
            for k, g in enumerate(gens):
                y = int(table[x, g])
                if seen[y] < 0:
                    seen[y] = 1
                    par.append(x)
                    gi.append(k)
                    nodes.append(y)
        if nodes:
            layers.append((np.array(nodes), np.array(par), np.array(gi)))
        frontier = nodes
    return layers


def is_isomorphic_groups(g: PcPresentation, h: PcPresentation) -> bool:
    """Decide ``G ~ H`` by invariants and generator-image backtracking."""
    if g.prime != h.prime or g.ngens != h.ngens:
        return False
    if g == h:
        return True
    cap = get_caps().iso
    if g.order > cap:
        raise IsomorphismUndecided("iso", g.order, cap)
    if g.is_abelian() or h.is_abelian():
        return (g.is_abelian() and h.is_abelian()
                and abelian_invariants(g) == abelian_invariants(h))
    dg, dh = _iso_data(g), _iso_data(h)
    if dg.summary() != dh.summary():
        return False
    return _find_isomorphism(dg, dh) is not None


_ISO_CACHE: dict = {}


def _iso_data(pres: PcPresentation) -> _IsoData:
    key = pres.key()
    d = _ISO_CACHE.get(key)
    if d is None:
        if len(_ISO_CACHE) > 256:
            _ISO_CACHE.clear()
        d = _ISO_CACHE[key] = _IsoData(pres)
    return d


def _find_isomorphism(dg: _IsoData, dh: _IsoData):
    p = dg.pres.prime
    gens = dg.generators
    d = len(gens)
    tg, th = dg.table, dh.table
    layers = _bfs_tree(tg, gens)
    by_profile: dict = {}
    for x, prof in enumerate(dh.profile):
        by_profile.setdefault(prof, []).append(x)
    cands = [by_profile.get(dg.profile[s], []) for s in gens]
    pair_g = {}
    for a in range(d):
        for b in range(a):
            pair_g[(a, b)] = (dg.profile[int(tg[gens[a], gens[b]])],
                              dg.profile[dg.comm(gens[a], gens[b])])
    right_g = [tg[:, s] for s in gens]
    img = [0] * d

    def extend(k, ech_rows):
        if k == d:
            phi = np.zeros(dg.en.size, dtype=np.int64)
            for nodes, par, gi in layers:
                phi[nodes] = th[phi[par], np.array(img)[gi]]
            for a in range(d):
                if not np.array_equal(phi[right_g[a]], th[phi, img[a]]):
                    return None
            return phi
        for y in cands[k]:
            ok = True
            for b in range(k):
                prof = (dh.profile[int(th[y, img[b]])], dh.profile[dh.comm(y, img[b])])
                if prof != pair_g[(k, b)]:
                    ok = False
                    break
            if not ok:
                continue
            v = dh.fcoords[y]
            from .linalg import rank
            rows = ech_rows + [v]
            if rank(np.array(rows), p) < len(rows):
                continue
            img[k] = y
            res = extend(k + 1, rows)
            if res is not None:
                return res
        return None

    return extend(0, [])


def find_isomorphism(g: PcPresentation, h: PcPresentation):
    """An explicit isomorphism as a dict element -> element, or ``None``."""
    if g.prime != h.prime or g.ngens != h.ngens:
        return None
    cap = get_caps().iso
    if g.order > cap:
        raise IsomorphismUndecided("iso", g.order, cap)
    dg, dh = _iso_data(g), _iso_data(h)
    if dg.summary() != dh.summary():
        return None
    phi = _find_isomorphism(dg, dh)
    if phi is None:
        return None
    return {dg.en.elements[i]: dh.en.elements[int(j)] for i, j in enumerate(phi)}
