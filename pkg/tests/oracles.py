"""Brute-force reference computations used by the tests.

These deliberately avoid the package's own algorithms (Schreier-style
centralizers, Smith normal forms, Jennings bases, layered canonical forms)
and work from group multiplication or the dense group algebra instead.
"""
from __future__ import annotations

import itertools
import random

import numpy as np

from mipkit.groupalgebra import GroupAlgebra
from mipkit.linalg import Echelon, left_kernel
from mipkit.pcgroup import Subgroup, depth, subgroup_presentation


def elements(G):
    return [tuple(x) for x in itertools.product(range(G.prime), repeat=G.ngens)]


def brute_classes(G):
    els = elements(G)
    seen, out = set(), []
    for x in els:
        if x in seen:
            continue
        cls = {G.multiply(G.inverse(g), G.multiply(x, g)) for g in els}
        seen |= cls
        out.append((min(cls), len(cls)))
    return sorted(out)


def brute_centralizer_order(G, x):
    return sum(G.multiply(x, g) == G.multiply(g, x) for g in elements(G))


def brute_center_order(G):
    els = elements(G)
    return sum(all(G.multiply(x, g) == G.multiply(g, x) for g in els) for x in els)


def brute_order(G, x):
    k, y = 1, tuple(x)
    while any(y):
        y = G.multiply(y, x)
        k += 1
    return k


def brute_abelian_invariants(G):
    """Elementary divisors of an abelian p-group from its order statistics."""
    p = G.prime
    els = elements(G)
    omega = []  # omega[k] = #{x : x^{p^k} = 1}
    k = 0
    while True:
        cnt = sum(brute_order(G, x) <= p ** k for x in els)
        omega.append(cnt)
        if cnt == len(els):
            break
        k += 1
    # number of cyclic factors of order >= p^k is log_p(omega[k]/omega[k-1])
    ge = []
    for k in range(1, len(omega)):
        r, q = 0, omega[k] // omega[k - 1]
        while q > 1:
            q //= p
            r += 1
        ge.append(r)
    out = []
    for k in range(len(ge), 0, -1):
        cnt = ge[k - 1] - (ge[k] if k < len(ge) else 0)
        out += [p ** k] * cnt
    return out


def _closure_map(G, H, gens, imgs):
    """Extend ``gens -> imgs`` to a map on all of ``G`` (BFS over words);
    None when the assignment is not a homomorphism."""
    img = {G.identity: H.identity}
    todo = [G.identity]
    while todo:
        x = todo.pop()
        for g, h in zip(gens, imgs):
            y, hy = G.multiply(x, g), H.multiply(img[x], h)
            if y in img:
                if img[y] != hy:
                    return None
            else:
                img[y] = hy
                todo.append(y)
    return img


def brute_isomorphic(G, H) -> bool:
    """Try every tuple of images for a generating set of ``G``."""
    if G.order != H.order or G.prime != H.prime:
        return False
    gens = list(G.gens)
    hs = elements(H)
    orders = {x: brute_order(H, x) for x in hs}
    need = [brute_order(G, g) for g in gens]
    pools = [[x for x in hs if orders[x] == o] for o in need]
    for imgs in itertools.product(*pools):
        m = _closure_map(G, H, gens, imgs)
        if m is not None and len(set(m.values())) == H.order:
            return True
    return False


def re_present(G, seed):
    """Same group on a new pc generating sequence ``g_k * y_k`` with ``y_k``
    random of larger depth."""
    rng = random.Random(seed)
    n, p = G.ngens, G.prime
    new = []
    for k in range(n):
        y = [0] * n
        for j in range(k + 1, n):
            y[j] = rng.randrange(p)
        new.append(G.multiply(G.gen(k), tuple(y)))
    assert [depth(u) for u in new] == list(range(n))
    return subgroup_presentation(Subgroup(G, tuple(new)), name=f"{G.name}~{seed}")


# ---------------------------------------------------------------------------
# dense group algebra
# ---------------------------------------------------------------------------

_ALG = {}


def algebra(G) -> GroupAlgebra:
    key = G.key
    if key not in _ALG:
        _ALG[key] = GroupAlgebra(G)
    return _ALG[key]


def dense_weight(G, g) -> int:
    A = algebra(G)
    v = A.bar(g)
    m = 1
    while True:
        ech = Echelon(A.dim, A.p)
        for row in A.aug_power(m + 1):
            ech.add(row)
        if not ech.contains(v):
            return m
        m += 1


def dense_graded_dims(G) -> list:
    A = algebra(G)
    out, m = [], 1
    while A.aug_power_dim(m):
        out.append(A.aug_power_dim(m) - A.aug_power_dim(m + 1))
        m += 1
    return out


def _span_elements(rows, p, dim):
    rows = np.array(rows, dtype=np.int64).reshape(len(rows), dim)
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        yield (np.array(coeffs, dtype=np.int64) @ rows) % p


def _echelon(A, rows):
    ech = Echelon(A.dim, A.p)
    for r in rows:
        ech.add(r)
    return ech


def dense_phi(G, n, m, l) -> int:
    """Cosets of ``I^n/I^{n+m}`` whose ``p^l``-th power lies in ``I^{n p^l + m}``,
    found by enumerating all of ``I^n`` in ``kG``."""
    A = algebra(G)
    p = A.p
    low = _echelon(A, A.aug_power(n + m))
    tgt = _echelon(A, A.aug_power(n * p ** l + m))
    good = set()
    for x in _span_elements(A.aug_power(n), p, A.dim):
        y = A.power(x, p ** l)
        if tgt.contains(y):
            good.add(tuple(low.reduce(x)))
    return len(good)


def dense_psi(G, n) -> int:
    """Elements of ``Z(kG)`` in ``I^n`` with ``x^p = 0``."""
    A = algebra(G)
    p = A.p
    classes = {}
    for g in elements(G):
        rep = min(G.multiply(G.inverse(h), G.multiply(g, h)) for h in elements(G))
        classes.setdefault(rep, []).append(g)
    sums = []
    for rep, cls in sorted(classes.items()):
        v = np.zeros(A.dim, dtype=np.int64)
        for g in cls:
            v = (v + A.basis(g)) % p
        sums.append(v)
    In = _echelon(A, A.aug_power(n))
    S = np.array(sums, dtype=np.int64)
    # combinations of class sums that land in I^n: kernel of the residues
    K = left_kernel(np.array([In.reduce(v) for v in S]), p)
    count = 0
    for x in _span_elements(list(K @ S % p), p, A.dim):
        if not A.power(x, p).any():
            count += 1
    return count


# ---------------------------------------------------------------------------
# subgroups as element sets
# ---------------------------------------------------------------------------

def closure(G, gens) -> frozenset:
    out = {G.identity}
    todo = [G.identity]
    while todo:
        x = todo.pop()
        for g in gens:
            y = G.multiply(x, g)
            if y not in out:
                out.add(y)
                todo.append(y)
    return frozenset(out)


def brute_frattini_rank(G, sub) -> int:
    """``d(H)`` for ``H`` given by its elements: ``log_p |H : H^p [H, H]|``."""
    p = G.prime
    sub = list(sub)
    gens = [G.power(x, p) for x in sub] + [G.commutator(x, y) for x in sub for y in sub]
    q, d = len(sub) // len(closure(G, gens)), 0
    while q > 1:
        q //= p
        d += 1
    return d


def brute_roggenkamp(G) -> int:
    els = elements(G)
    total = 0
    for rep, _ in brute_classes(G):
        cent = [g for g in els if G.multiply(g, rep) == G.multiply(rep, g)]
        total += brute_frattini_rank(G, cent)
    return total


def brute_quillen(G) -> int:
    """Conjugacy classes of maximal elementary abelian subgroups, by brute force."""
    p = G.prime
    els = elements(G)
    inv = [x for x in els if any(x) and not any(G.power(x, p))]
    subs = set()
    frontier = {closure(G, [x]) for x in inv}
    while frontier:
        subs |= frontier
        nxt = set()
        for s in frontier:
            for x in inv:
                if x not in s and all(G.multiply(x, u) == G.multiply(u, x) for u in s):
                    nxt.add(closure(G, list(s) + [x]))
        frontier = nxt - subs
    maximal = [s for s in subs if not any(s < t for t in subs)]
    classes = set()
    for s in maximal:
        orbit = frozenset(frozenset(G.multiply(G.inverse(g), G.multiply(u, g)) for u in s)
                          for g in els)
        classes.add(orbit)
    return len(classes)


def brute_power_class_counts(G) -> list:
    els = elements(G)
    cls = {}
    for x in els:
        cls[x] = min(G.multiply(G.inverse(g), G.multiply(x, g)) for g in els)
    out, q = [], 1
    while True:
        n = len({cls[G.power(x, q)] for x in els})
        out.append(n)
        if n == 1:
            return out
        q *= G.prime


def brute_derived(G) -> frozenset:
    els = elements(G)
    return closure(G, [G.commutator(x, y) for x in els for y in els])


def brute_small_ring_dim(G) -> int:
    """``dim kG/I`` with ``I`` spanned by ``x (g - 1)(n - 1) y``, ``x, y`` in ``G``."""
    p = G.prime
    els = elements(G)
    der = [n for n in brute_derived(G) if any(n)]
    ech = Echelon(G.order, p)
    for g in els:
        for n in der:
            for x in els:
                for y in els:
                    v = np.zeros(G.order, dtype=np.int64)
                    for w, s in ((G.multiply(g, n), 1), (g, -1), (n, -1), (G.identity, 1)):
                        k = G.index(G.multiply(x, G.multiply(w, y)))
                        v[k] = (v[k] + s) % p
                    ech.add(v)
    return G.order - len(ech)


def poincare_from_ranks(ranks, p) -> list:
    """Graded dimensions of ``kG`` from Jennings ranks ``r_1, r_2, ...``:
    product over ``i`` of ``(1 + t^i + ... + t^{(p-1)i})^{r_i}``, degrees >= 1."""
    poly = [1]
    for i, r in enumerate(ranks, start=1):
        for _ in range(r):
            new = [0] * (len(poly) + (p - 1) * i)
            for a, c in enumerate(poly):
                for e in range(p):
                    new[a + e * i] += c
            poly = new
    return poly[1:]
