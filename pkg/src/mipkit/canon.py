"""Canonical forms of nilpotent algebra quotients ``A/A^n``.

A tuple ``y`` of elements of ``Q = A/A^n`` that is a basis modulo ``Q^2``
determines a basis ``B(y)`` of ``Q``: layer 1 is ``y`` and layer ``j`` is
picked greedily from products ``b * y_i`` (``b`` in layer ``j-1``) that are
independent modulo ``Q^{j+1}``.  The structure constants of ``Q`` on ``B(y)``
are cut into per-layer blocks ``D_2, D_3, ...``; block ``D_k`` only depends on
``y`` modulo ``Q^k``.  The certificate is the table obtained from the tuple
minimising ``(D_2, D_3, ...)`` lexicographically.

Minimisation runs layer by layer.  ``D_2`` is minimised over ``y mod Q^2`` by
a prefix-pruned search (block ``D_2`` is ordered so that its first entries
involve only ``y_1``, then ``y_1, y_2``, and so on).  For ``k >= 3`` block
``D_k`` is an affine function of the lift of ``y`` from ``Q^{k-1}`` to
``Q^k``, so the minimum over all lifts is a lexicographic minimum over an
affine subspace.  Generators annihilating ``Q`` are split off first:
``Q = Q' x (zero algebra)`` and only ``Q'`` is searched.
"""
from __future__ import annotations

import hashlib
import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algtable import SCTable, format_table, parse_table
from .caps import CapExceeded, get_caps
from .linalg import Echelon, inverse, left_kernel, lexmin_coset, rank, rref, solve

CERT_HEADER = "mipkit-cert 1"


class BudgetExceeded(CapExceeded):
    """The canonical-form search needs more candidate states than allowed."""

    def __init__(self, needed: int, limit: int, level: int):
        super().__init__("orbit", needed, limit)
        self.level = level


@dataclass(frozen=True)
class CanonCertificate:
    level: int
    canonical_bytes: bytes
    aut_gens: tuple = ()
    stats: tuple = field(default=(), compare=False)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical_bytes).hexdigest()

    @property
    def table(self) -> SCTable:
        text = self.canonical_bytes.decode("utf-8")
        return parse_table(text.split("\n", 2)[2])

    def __eq__(self, other):
        return isinstance(other, CanonCertificate) and self.canonical_bytes == other.canonical_bytes

    def __hash__(self):
        return hash(self.canonical_bytes)


# ---------------------------------------------------------------------------
# algebra plumbing
# ---------------------------------------------------------------------------

def _products(T, X, Y, p):
    """Row-wise products ``X[a] * Y[b]`` as an array ``(len X, len Y, dim)``."""
    return np.einsum("ai,bj,ijk->abk", X, Y, T) % p


def _span(rows, n, p):
    if len(rows) == 0:
        return np.zeros((0, n), dtype=np.int64)
    r, _ = rref(np.asarray(rows, dtype=np.int64).reshape(-1, n), p)
    return r


def power_filtration(T, p, stop=None) -> list:
    """Row bases of ``A^1, A^2, ...`` down to (and including) the zero space."""
    d = T.shape[0]
    eye = np.eye(d, dtype=np.int64)
    powers = [eye]
    while len(powers[-1]):
        if stop is not None and len(powers) >= stop:
            break
        prev = powers[-1]
        prods = _products(T, prev, eye, p).reshape(-1, d)
        nxt = _span(prods, d, p)
        if len(nxt) == len(prev):
            raise ValueError("algebra is not nilpotent")
        powers.append(nxt)
    return powers


def _complement(big, small, p):
    """Rows of ``big`` (a basis) extending ``small`` to a basis of span(big)."""
    ech = Echelon(big.shape[1], p)
    for r in small:
        ech.add(r)
    out = [r for r in big if ech.add(r)]
    return out


class _Frame:
    """``A/N`` on a basis adapted to the power filtration.

    Layer ``j`` occupies coordinates ``sl[j]``; ``T`` is the product tensor in
    these coordinates (layers ``1..L``, everything of ``N`` dropped).
    """

    def __init__(self, T, p, n=None, ideal=None):
        d = T.shape[0]
        self.p = p
        eye = np.eye(d, dtype=np.int64)
        powers = power_filtration(T, p)
        if n is not None and n < len(powers):
            powers = powers[:n]
        kill = powers[-1] if ideal is None else _span(np.vstack([powers[-1], ideal]) if len(ideal) else powers[-1], d, p)
        rows, self.sl = [], [None]
        pos = 0
        for j in range(1, len(powers)):
            lower = _span(np.vstack([powers[j], kill]) if len(kill) else powers[j], d, p)
            upper = _span(np.vstack([powers[j - 1], kill]) if len(kill) else powers[j - 1], d, p)
            comp = _complement(upper, lower, p)
            if not comp:
                break
            rows.extend(comp)
            self.sl.append(slice(pos, pos + len(comp)))
            pos += len(comp)
        self.dim = pos
        self.L = len(self.sl) - 1
        full = np.array(rows + list(kill), dtype=np.int64).reshape(-1, d)
        inv = inverse(full, p) if len(full) else full
        E = full[:pos]
        if pos:
            prods = _products(T, E, E, p)
            self.T = (prods @ inv % p)[:, :, :pos]
        else:
            self.T = np.zeros((0, 0, 0), dtype=np.int64)
        self.basis_in_parent = E
        self.layer = np.zeros(pos, dtype=np.int64)
        for j in range(1, self.L + 1):
            self.layer[self.sl[j]] = j
        del eye

    def ldim(self, j):
        return self.sl[j].stop - self.sl[j].start if 1 <= j <= self.L else 0

    def annihilator(self):
        D, T = self.dim, self.T
        if D == 0:
            return np.zeros((0, 0), dtype=np.int64)
        m = np.concatenate([T.reshape(D, D * D), T.transpose(1, 0, 2).reshape(D, D * D)], axis=1)
        return left_kernel(m, self.p)


# ---------------------------------------------------------------------------
# the basis B(y) and its data blocks
# ---------------------------------------------------------------------------

def _layer2_order(d):
    order = []
    for m in range(d):
        order += [(m, i) for i in range(m + 1)] + [(a, m) for a in range(m)]
    return order


def _mul(fr, x, y):
    return np.einsum("i,j,ijk->k", x, y, fr.T) % fr.p


class _Basis:
    """``B(y)`` up to layer ``k`` together with the selection masks."""

    def __init__(self, fr: _Frame, ys, k):
        p = fr.p
        self.layers = [None, [np.asarray(y, dtype=np.int64) for y in ys]]
        self.masks = [None, None]
        d = len(ys)
        for j in range(2, min(k, fr.L) + 1):
            sl = fr.sl[j]
            if j == 2:
                cands = [(self.layers[1][a], self.layers[1][i]) for a, i in _layer2_order(d)]
            else:
                cands = [(b, y) for b in self.layers[j - 1] for y in self.layers[1]]
            ech = Echelon(fr.ldim(j), p)
            sel, mask = [], []
            for b, y in cands:
                v = _mul(fr, b, y)
                if ech.add(v[sl]):
                    sel.append(v)
                    mask.append(1)
                else:
                    mask.append(0)
            self.layers.append(sel)
            self.masks.append(mask)

    def flat(self, upto):
        out, lay = [], []
        for j in range(1, min(upto, len(self.layers) - 1) + 1):
            out.extend(self.layers[j])
            lay.extend([j] * len(self.layers[j]))
        return out, lay


def _coords_matrix(fr: _Frame, rows, k):
    """Inverse of ``[rows; unit vectors of layers > k]`` (coordinates map)."""
    D = fr.dim
    extra = [np.eye(D, dtype=np.int64)[i] for j in range(k + 1, fr.L + 1)
             for i in range(fr.sl[j].start, fr.sl[j].stop)]
    M = np.array(list(rows) + extra, dtype=np.int64).reshape(-1, D)
    return inverse(M, fr.p)


def _block2(fr: _Frame, ys):
    """Block ``D_2`` as per-prefix segments (segment ``m`` involves ``y_1..y_m``)."""
    p = fr.p
    d = len(ys)
    l2 = fr.ldim(2)
    sl = fr.sl[2] if fr.L >= 2 else slice(0, 0)
    sel = []
    segs = [[] for _ in range(d)]
    for a, i in _layer2_order(d):
        v = _mul(fr, ys[a], ys[i])[sl]
        x = solve(np.array(sel), v, p) if sel else (None if v.any() else np.zeros(0, dtype=np.int64))
        if x is None:
            sel.append(v)
            entry = [1] + [0] * l2
        else:
            entry = [0] + list(x) + [0] * (l2 - len(x))
        segs[max(a, i)].extend(int(e) for e in entry)
    return segs


def _block(fr: _Frame, ys, k):
    """Block ``D_k`` for ``k >= 3`` as a flat integer vector."""
    B = _Basis(fr, ys, k)
    rows, lay = B.flat(k)
    inv = _coords_matrix(fr, rows, k)
    lay = np.array(lay)
    kpos = np.nonzero(lay == k)[0]
    low = np.nonzero(lay < k)[0]
    X = np.array(rows, dtype=np.int64)[low]
    la = lay[low]
    P = _products(fr.T, X, X, fr.p)
    keep = (la[:, None] + la[None, :]) <= k
    coords = (P[keep] @ inv % fr.p)[:, kpos]
    return np.concatenate([np.array(B.masks[k], dtype=np.int64), coords.reshape(-1)])


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def _vectors(p, n):
    for v in itertools.product(range(p), repeat=n):
        yield np.array(v, dtype=np.int64)


def _search_layer2(fr: _Frame, budget: int):
    """All ``y mod Q^2`` minimising ``D_2``; returns tuples of layer-1 vectors."""
    p, d, D = fr.p, fr.ldim(1), fr.dim
    beam = [()]
    spent = 0
    vecs = [v for v in _vectors(p, d) if v.any()]
    for m in range(d):
        best, nxt = None, []
        for prefix in beam:
            ech = Echelon(d, p)
            for v in prefix:
                ech.add(v)
            for v in vecs:
                if ech.contains(v):
                    continue
                spent += 1
                if spent > budget:
                    raise BudgetExceeded(spent, budget, 2)
                cand = prefix + (v,)
                ys = [_embed(fr, u) for u in cand]
                seg = _block2_prefix(fr, ys)
                if best is None or seg < best:
                    best, nxt = seg, [cand]
                elif seg == best:
                    nxt.append(cand)
        beam = nxt
    del D
    return [[_embed(fr, u) for u in cand] for cand in beam], spent


def _block2_prefix(fr, ys):
    return tuple(_block2(fr, ys)[len(ys) - 1])


def _embed(fr, v):
    x = np.zeros(fr.dim, dtype=np.int64)
    x[fr.sl[1]] = v
    return x


def _lift_units(fr, d, j):
    """Parameterisation of lifts of a ``d``-tuple by layer ``j`` vectors."""
    units = []
    for a in range(d):
        for i in range(fr.sl[j].start, fr.sl[j].stop):
            units.append((a, i))
    return units


def _apply_lift(ys, units, z, p):
    out = [y.copy() for y in ys]
    for (a, i), c in zip(units, z):
        if c:
            out[a][i] = (out[a][i] + c) % p
    return out


def _key(ys):
    return tuple(int(x) for y in ys for x in y)


def _search_lift(fr: _Frame, cands, k, budget, rng):
    """Minimise ``D_k`` over lifts of each candidate by layer ``k-1``."""
    p = fr.p
    d = fr.ldim(1)
    units = _lift_units(fr, d, k - 1)
    best, winners = None, []
    spent = 0
    for ys in cands:
        base = _block(fr, ys, k)
        cols = []
        for u in range(len(units)):
            z = np.zeros(len(units), dtype=np.int64)
            z[u] = 1
            cols.append((_block(fr, _apply_lift(ys, units, z, p), k) - base) % p)
        L = np.array(cols, dtype=np.int64).reshape(len(units), -1)
        spent += 1 + len(units)
        affine = True
        for _ in range(2 if units else 0):
            z = rng.integers(0, p, len(units))
            if not np.array_equal(_block(fr, _apply_lift(ys, units, z, p), k),
                                  (base + z @ L) % p):
                affine = False
                break
        if affine:
            v, z0, ker = lexmin_coset(base, L, p)
            sols = [(v, z0, ker)]
        else:  # not expected; enumerate all lifts
            get_caps().check("orbit", p ** len(units))
            vals = {}
            for z in itertools.product(range(p), repeat=len(units)):
                z = np.array(z, dtype=np.int64)
                vals.setdefault(tuple(_block(fr, _apply_lift(ys, units, z, p), k)), []).append(z)
            spent += p ** len(units)
            mv = min(vals)
            sols = [(np.array(mv), None, vals[mv])]
        v = tuple(int(x) for x in sols[0][0])
        if best is not None and v > best:
            continue
        if best is None or v < best:
            best, winners = v, []
        winners.append((ys, sols[0]))
        if spent > budget:
            raise BudgetExceeded(spent, budget, k)
    out = {}
    for ys, (v, z0, ker) in winners:
        if z0 is None:
            zs = ker
        else:
            count = p ** len(ker)
            if len(out) + count > budget:
                raise BudgetExceeded(len(out) + count, budget, k)
            zs = ((z0 + np.array(c, dtype=np.int64) @ ker) % p if len(ker) else z0
                  for c in itertools.product(range(p), repeat=len(ker)))
        for z in zs:
            lifted = _apply_lift(ys, units, z, p)
            out.setdefault(_key(lifted), lifted)
    return [out[key] for key in sorted(out)], spent


def _full_data(fr, ys):
    data = []
    if fr.L >= 2:
        for seg in _block2(fr, ys):
            data.extend(seg)
    for k in range(3, fr.L + 1):
        data.extend(int(x) for x in _block(fr, ys, k))
    return tuple(data)


def _table_on(fr: _Frame, ys, n, free=0) -> SCTable:
    """Structure constants of the frame algebra on ``B(ys)``, plus ``free``
    weight-1 basis elements annihilating everything (inserted after layer 1)."""
    p = fr.p
    B = _Basis(fr, ys, fr.L)
    rows, lay = B.flat(fr.L)
    D = len(rows)
    d1 = lay.count(1)
    pos = list(range(d1)) + list(range(d1 + free, D + free))
    weights = [1] * (d1 + free) + lay[d1:]
    prods = {}
    if D:
        inv = _coords_matrix(fr, rows, fr.L)
        X = np.array(rows, dtype=np.int64)
        C = _products(fr.T, X, X, p) @ inv % p
        for a in range(D):
            for b in range(D):
                nz = np.nonzero(C[a, b])[0]
                if len(nz):
                    prods[(pos[a], pos[b])] = tuple((pos[int(k)], int(C[a, b, k])) for k in nz)
    return SCTable(p, D + free, tuple(weights), n, prods, None, "", False)


def _split_annihilator(fr: _Frame):
    """Return ``(c, frame of Q/X)`` where ``X`` complements ``Ann meet Q^2`` in ``Ann``."""
    ann = fr.annihilator()
    if len(ann) == 0:
        return 0, fr
    p = fr.p
    d1 = fr.ldim(1)
    # Q^2 is spanned by the unit vectors of layers >= 2
    ech = Echelon(d1, p)
    X = [a for a in ann if ech.add(a[fr.sl[1]])]
    if not X:
        return 0, fr
    return len(X), _Frame(fr.T, p, ideal=np.array(X, dtype=np.int64))


def _prepare(t: SCTable, n: int):
    if n < 2:
        raise ValueError("level must be at least 2")
    if n > t.trunc:
        raise ValueError(f"level {n} exceeds the table truncation {t.trunc}")
    if t.dim == 0:
        return 0, None
    fr = _Frame(t.tensor, t.p, n=n)
    if fr.dim == 0:
        return 0, fr
    return _split_annihilator(fr)


def _serialize(table: SCTable, n: int) -> bytes:
    return (f"{CERT_HEADER}\nlevel {n}\n" + format_table(table, extras=False)).encode("utf-8")


def _empty(p, n, free=0):
    return SCTable(p, free, (1,) * free, n, {}, None, "", False)


def canonical_form(t: SCTable, n: int | None = None, budget: int | None = None,
                   seed: int = 0) -> CanonCertificate:
    """Certificate of ``A/A^n`` for the algebra ``A`` of ``t``."""
    n = t.trunc if n is None else n
    budget = get_caps().orbit if budget is None else budget
    free, fr = _prepare(t, n)
    if fr is None or fr.dim == 0:
        return CanonCertificate(n, _serialize(_empty(t.p, n, free), n))
    rng = np.random.default_rng(seed)
    stats = []
    cands, spent = _search_layer2(fr, budget)
    stats.append((2, len(cands), spent))
    auts = [(2, _auts(fr, cands, 2))]
    for k in range(3, fr.L + 1):
        cands, spent = _search_lift(fr, cands, k, budget, rng)
        stats.append((k, len(cands), spent))
        auts.append((k, _auts(fr, cands, k)))
    best = min(cands, key=_key)
    table = _table_on(fr, best, n, free)
    return CanonCertificate(n, _serialize(table, n), tuple(auts), tuple(stats))


def _auts(fr, cands, k, limit=8):
    """A few automorphisms of ``Q/Q^{k+1}`` relating minimising tuples, as
    matrices on the canonical basis (rows: images of basis vectors)."""
    if len(cands) < 2:
        return ()
    ref = min(cands, key=_key)
    rows0, _ = _Basis(fr, ref, k).flat(k)
    inv = _coords_matrix(fr, rows0, k)
    out = []
    for ys in sorted(cands, key=_key)[1:limit + 1]:
        rows, _ = _Basis(fr, ys, k).flat(k)
        m = (np.array(rows, dtype=np.int64) @ inv % fr.p)[:, :len(rows0)]
        out.append(tuple(map(tuple, m.tolist())))
    return tuple(out)


def canonical_form_exhaustive(t: SCTable, n: int | None = None, limit: int = 10**6) -> CanonCertificate:
    """Same certificate by trying every generating tuple (tiny algebras only)."""
    n = t.trunc if n is None else n
    free, fr = _prepare(t, n)
    if fr is None or fr.dim == 0:
        return CanonCertificate(n, _serialize(_empty(t.p, n, free), n))
    p, d = fr.p, fr.ldim(1)
    top = fr.sl[fr.L - 1].stop if fr.L >= 2 else fr.sl[1].stop
    total = (p ** top) ** d
    if total > limit:
        raise CapExceeded("orbit", total, limit)
    elems = [np.concatenate([np.array(v, dtype=np.int64), np.zeros(fr.dim - top, dtype=np.int64)])
             for v in itertools.product(range(p), repeat=top)]
    best, arg = None, None
    for tup in itertools.product(elems, repeat=d):
        if rank(np.array([y[fr.sl[1]] for y in tup]), p) < d:
            continue
        data = _full_data(fr, list(tup))
        if best is None or data < best:
            best, arg = data, list(tup)
    return CanonCertificate(n, _serialize(_table_on(fr, arg, n, free), n))


def certificate_from_bytes(data: bytes) -> CanonCertificate:
    text = data.decode("utf-8")
    lines = text.split("\n", 2)
    if lines[0] != CERT_HEADER or not lines[1].startswith("level "):
        raise ValueError("not a certificate")
    return CanonCertificate(int(lines[1].split()[1]), data)


# ---------------------------------------------------------------------------
# independent isomorphism oracle
# ---------------------------------------------------------------------------

class _Alg:
    def __init__(self, t: SCTable):
        self.p = t.p
        self.d = t.dim
        self.T = t.tensor
        self.powers = power_filtration(self.T, self.p) if self.d else [np.zeros((0, 0), dtype=np.int64)]

    def mul(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.T) % self.p

    def depth(self, x):
        """Largest ``j`` with ``x`` in ``A^j``."""
        j = 0
        for j in range(len(self.powers) - 1, 0, -1):
            if _in_span(self.powers[j - 1], x, self.p):
                return j
        return j

    def profile(self, x):
        p, D = self.p, self.d
        L = np.einsum("i,ijk->jk", x, self.T) % p
        R = np.einsum("j,ijk->ik", x, self.T) % p
        nil, y = 1, x
        while y.any():
            y = self.mul(y, x)
            nil += 1
        return (self.depth(x), nil, rank(L, p) if D else 0, rank(R, p) if D else 0)

    @cached_property
    def elements(self):
        return [np.array(v, dtype=np.int64) for v in itertools.product(range(self.p), repeat=self.d)]

    @cached_property
    def profiles(self):
        return [self.profile(x) if x.any() else None for x in self.elements]

    @cached_property
    def profile_counts(self):
        return sorted(Counter(pr for pr in self.profiles if pr).items())


_ALG_CACHE: dict = {}


def _alg(t: SCTable) -> _Alg:
    key = t.key()
    a = _ALG_CACHE.get(key)
    if a is None:
        if len(_ALG_CACHE) > 512:
            _ALG_CACHE.clear()
        a = _ALG_CACHE[key] = _Alg(t)
    return a


def _in_span(basis, x, p):
    if not x.any():
        return True
    if len(basis) == 0:
        return False
    return rank(np.vstack([basis, x]), p) == len(basis)


def iso_oracle(tA: SCTable, tB: SCTable) -> bool:
    """Decide ``A ~ B`` by backtracking over images of a generating set of ``A``."""
    if tA.p != tB.p:
        return False
    if tA.dim != tB.dim:
        return False
    cap = get_caps().oracle_dim
    if tA.dim > cap:
        raise CapExceeded("oracle_dim", tA.dim, cap)
    p, D = tA.p, tA.dim
    if D == 0:
        return True
    A, B = _alg(tA), _alg(tB)
    if [len(x) for x in A.powers] != [len(x) for x in B.powers]:
        return False
    if A.profile_counts != B.profile_counts:
        return False
    # generators of A: a basis of a complement of A^2
    gens = _complement(A.powers[0], A.powers[1], p)
    d = len(gens)
    # word basis of A over the generators: (word, vector)
    words = [((i,), g) for i, g in enumerate(gens)]
    ech = Echelon(D, p)
    for _, v in words:
        ech.add(v)
    frontier = list(words)
    while frontier:
        new = []
        for w, v in frontier:
            for i, g in enumerate(gens):
                x = A.mul(v, g)
                if ech.add(x):
                    new.append((w + (i,), x))
        words.extend(new)
        frontier = new
    Wmat = np.array([v for _, v in words], dtype=np.int64)
    Winv = inverse(Wmat, p)
    # relations to check: word * generator in word coordinates
    rel = []
    for a, (w, v) in enumerate(words):
        for i, g in enumerate(gens):
            rel.append((a, i, A.mul(v, g) @ Winv % p))
    elems = B.elements
    B2 = B.powers[1]
    profA = [A.profile(g) for g in gens]
    cands = []
    for i in range(d):
        cands.append([x for x, pr in zip(elems, B.profiles) if pr == profA[i]])
    img = [None] * d

    def evaluate(upto):
        """Images of words using generators < upto, or None on a violated relation."""
        vals = {}
        for a, (w, _) in enumerate(words):
            if max(w) >= upto:
                continue
            x = img[w[0]]
            for i in w[1:]:
                x = B.mul(x, img[i])
            vals[a] = x
        for a, i, coords in rel:
            if a not in vals or i >= upto:
                continue
            support = np.nonzero(coords)[0]
            if any(int(s) not in vals for s in support):
                continue
            lhs = B.mul(vals[a], img[i])
            rhs = np.zeros(D, dtype=np.int64)
            for s in support:
                rhs = (rhs + coords[s] * vals[int(s)]) % p
            if not np.array_equal(lhs, rhs):
                return None
        return vals

    def extend(i, ech_b):
        if i == d:
            vals = evaluate(d)
            if vals is None:
                return False
            M = np.array([vals[a] for a in range(len(words))], dtype=np.int64)
            return rank(M, p) == D
        for x in cands[i]:
            e2 = Echelon(D, p)
            for r in ech_b:
                e2.add(r)
            if not e2.add(x):
                continue
            img[i] = x
            if evaluate(i + 1) is None:
                continue
            if extend(i + 1, ech_b + [x]):
                return True
        img[i] = None
        return False

    base = list(B2)
    return extend(0, base)


# ---------------------------------------------------------------------------
# basis changes and random algebras
# ---------------------------------------------------------------------------

def filtered_basis_change(t: SCTable, P) -> SCTable:
    """Table on the new basis ``e'_i = sum_j P[i, j] e_j``.

    ``P`` must be invertible and map each ``span{w >= m}`` onto itself.
    """
    p, d = t.p, t.dim
    P = np.asarray(P, dtype=np.int64) % p
    w = np.array(t.weights)
    for i in range(d):
        if any(P[i, j] and w[j] < w[i] for j in range(d)):
            raise ValueError("basis change does not respect the filtration")
    Pinv = inverse(P, p) if d else P
    T = t.tensor if d else np.zeros((0, 0, 0), dtype=np.int64)
    new = np.einsum("ai,bj,ijk->abk", P, P, T) @ Pinv % p if d else T
    prods = {}
    for a in range(d):
        for b in range(d):
            nz = np.nonzero(new[a, b])[0]
            if len(nz):
                prods[(a, b)] = tuple((int(k), int(new[a, b, k])) for k in nz)
    return SCTable(p, d, t.weights, t.trunc, prods, None, t.source, t.complete)


def random_filtered_basis_change(t: SCTable, seed) -> SCTable:
    """Random invertible, filtration-preserving basis change (reproducible from ``seed``)."""
    rng = np.random.default_rng(seed)
    p, d = t.p, t.dim
    w = np.array(t.weights)
    P = np.zeros((d, d), dtype=np.int64)
    for wt in sorted(set(t.weights)):
        idx = np.nonzero(w == wt)[0]
        while True:
            blk = rng.integers(0, p, (len(idx), len(idx)))
            if rank(blk, p) == len(idx):
                break
        P[np.ix_(idx, idx)] = blk
        higher = np.nonzero(w > wt)[0]
        if len(higher):
            P[np.ix_(idx, higher)] = rng.integers(0, p, (len(idx), len(higher)))
    return filtered_basis_change(t, P)


def table_from_tensor(T, p, name: str = "") -> SCTable:
    """Table of a nilpotent algebra on a basis adapted to its power filtration."""
    fr = _Frame(np.asarray(T, dtype=np.int64) % p, p)
    D = fr.dim
    prods = {}
    for a in range(D):
        for b in range(D):
            nz = np.nonzero(fr.T[a, b])[0]
            if len(nz):
                prods[(a, b)] = tuple((int(k), int(fr.T[a, b, k])) for k in nz)
    return SCTable(p, D, tuple(int(x) for x in fr.layer), fr.L + 1, prods, None, name, True)


def matrix_algebra(mats, p):
    """Structure tensor of the associative algebra spanned by products of ``mats``."""
    mats = [np.asarray(m, dtype=np.int64) % p for m in mats]
    size = mats[0].shape[0]
    ech = Echelon(size * size, p)
    basis = []
    frontier = []
    for m in mats:
        if ech.add(m.reshape(-1)):
            basis.append(m)
            frontier.append(m)
    while frontier:
        new = []
        for x in frontier:
            for g in mats:
                y = (x @ g) % p
                if ech.add(y.reshape(-1)):
                    basis.append(y)
                    new.append(y)
        frontier = new
    D = len(basis)
    if D == 0:
        return np.zeros((0, 0, 0), dtype=np.int64)
    Bm = np.array([b.reshape(-1) for b in basis], dtype=np.int64)
    T = np.zeros((D, D, D), dtype=np.int64)
    for i in range(D):
        for j in range(D):
            prod = (basis[i] @ basis[j]) % p
            x = solve(Bm, prod.reshape(-1), p)
            T[i, j] = x
    return T


def random_nilpotent_table(p: int, seed, max_dim: int = 5, size: int | None = None) -> SCTable:
    """Random nilpotent algebra generated by strictly upper triangular matrices."""
    rng = np.random.default_rng(seed)
    while True:
        m = size or int(rng.integers(3, 6))
        k = int(rng.integers(1, 4))
        mats = [np.triu(rng.integers(0, p, (m, m)), 1) for _ in range(k)]
        T = matrix_algebra(mats, p)
        if 1 <= T.shape[0] <= max_dim:
            return table_from_tensor(T, p, name=f"rand{p}_{seed}")
