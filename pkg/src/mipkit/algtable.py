"""Graded structure-constant tables of ``I(kG)/I(kG)^s`` over the prime field.

The basis is the set of Jennings monomials ``u_1bar^a_1 ... u_n bar^a_n`` of
weight below the truncation level, ordered by weight and then by exponent
tuple in decreasing lexicographic order (so ``u_1bar`` precedes ``u_2bar``).
Products are obtained from two local rules on the Jennings presentation:

* ``u_l bar u_k bar = u_k bar u_l bar + (1 + u_k bar)(1 + u_l bar) c bar`` with
  ``c = [u_l, u_k]`` (used when ``k < l``);
* ``u_k bar^p = (u_k^p) bar``;

together with ``(prod u_j^e_j) bar = prod (1 + u_j bar)^e_j - 1`` to expand
group elements.  Monomials reaching the truncation weight are dropped as soon
as they appear.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np

from . import kernels
from .caps import get_caps
from .jennings import JenningsData, jennings_series
from .linalg import left_kernel
from .pcgroup import PcPresentation, conjugacy_classes

_DENSE_LIMIT = 160


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SCTable:
    """Structure constants of a graded nilpotent algebra truncated at ``trunc``.

    ``products[(i, j)]`` is a tuple of ``(k, c)`` pairs (0-based, ``c`` nonzero
    mod ``p``); absent keys are zero products.  ``complete`` records that the
    algebra already vanishes in weight ``>= trunc`` (a full ``I(kG)``), so
    nothing was lost by truncating.
    """

    p: int
    dim: int
    weights: tuple
    trunc: int
    products: dict
    labels: tuple | None = None
    source: str = ""
    complete: bool = False

    def key(self):
        return (self.p, self.dim, self.weights, self.trunc,
                tuple(sorted(self.products.items())))

    def __eq__(self, other):
        return isinstance(other, SCTable) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SCTable({self.source or '?'}, p={self.p}, dim={self.dim}, trunc={self.trunc})"

    @cached_property
    def tensor(self) -> np.ndarray:
        """Dense ``T[i, j, k]``; only for moderate dimension."""
        d = self.dim
        if d > _DENSE_LIMIT:
            raise MemoryError(f"dimension {d} too large for a dense tensor")
        t = np.zeros((d, d, d), dtype=np.int64)
        for (i, j), terms in self.products.items():
            for k, c in terms:
                t[i, j, k] = c
        return t

    @cached_property
    def rows(self) -> list:
        """``rows[i]`` maps ``j`` to the product ``e_i e_j`` as a dict."""
        out = [dict() for _ in range(self.dim)]
        for (i, j), terms in self.products.items():
            out[i][j] = dict(terms)
        return out

    def weight_range(self, lo: int, hi: int | None = None) -> list:
        """Basis indices with ``lo <= weight < hi``."""
        hi = self.trunc if hi is None else hi
        return [i for i, w in enumerate(self.weights) if lo <= w < hi]

    def restrict(self, s: int) -> "SCTable":
        """The quotient by the span of basis elements of weight ``>= s``."""
        if s > self.trunc:
            raise ValueError("cannot restrict above the truncation level")
        keep = [i for i, w in enumerate(self.weights) if w < s]
        if keep != list(range(len(keep))):
            raise ValueError("basis is not weight-ordered")
        d = len(keep)
        prods = {}
        for (i, j), terms in self.products.items():
            if i < d and j < d:
                kept = tuple((k, c) for k, c in terms if k < d)
                if kept:
                    prods[(i, j)] = kept
        return SCTable(self.p, d, self.weights[:d], s, prods,
                       self.labels[:d] if self.labels else None, self.source,
                       self.complete and s >= self.trunc)

    def with_complete(self, complete: bool = True) -> "SCTable":
        return SCTable(self.p, self.dim, self.weights, self.trunc, self.products,
                       self.labels, self.source, complete)


# ---------------------------------------------------------------------------
# .sct text format
# ---------------------------------------------------------------------------

def format_table(t: SCTable, extras: bool = True) -> str:
    lines = []
    if extras and t.source:
        lines.append(f"name {t.source}")
    lines += [f"p {t.p}", f"dim {t.dim}", f"trunc {t.trunc}",
              "w" + "".join(f" {w}" for w in t.weights)]
    if extras and t.complete:
        lines.append("complete 1")
    if extras and t.labels:
        for i, lab in enumerate(t.labels):
            lines.append(f"label {i + 1} " + " ".join(map(str, lab)))
    for (i, j) in sorted(t.products):
        terms = " ".join(f"{k + 1}^{c}" for k, c in t.products[(i, j)])
        lines.append(f"e {i + 1} {j + 1} : {terms}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> SCTable:
    """Parse ``.sct`` text (1-based indices) with full validation."""
    head: dict = {}
    labels: dict = {}
    prods: dict = {}
    weights = None
    name = ""
    complete = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] in ("p", "dim", "trunc"):
                head[tok[0]] = int(tok[1])
            elif tok[0] == "name":
                name = line[4:].strip()
            elif tok[0] == "w":
                weights = tuple(int(x) for x in tok[1:])
            elif tok[0] == "complete":
                complete = tok[1] == "1"
            elif tok[0] == "label":
                labels[int(tok[1]) - 1] = tuple(int(x) for x in tok[2:])
            elif tok[0] == "e":
                if tok[3] != ":":
                    raise TableFormatError(f"line {lineno}: expected ':'")
                i, j = int(tok[1]) - 1, int(tok[2]) - 1
                if (i, j) in prods:
                    raise TableFormatError(f"line {lineno}: duplicate product")
                terms = []
                for term in tok[4:]:
                    k, _, c = term.partition("^")
                    terms.append((int(k) - 1, int(c) if c else 1))
                prods[(i, j)] = terms
            else:
                raise TableFormatError(f"line {lineno}: unknown directive {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, TableFormatError):
                raise
            raise TableFormatError(f"line {lineno}: malformed line") from None
    for key in ("p", "dim", "trunc"):
        if key not in head:
            raise TableFormatError(f"missing '{key}' header")
    p, d, s = head["p"], head["dim"], head["trunc"]
    if weights is None or len(weights) != d:
        raise TableFormatError("weight line must list one weight per basis element")
    clean = {}
    for (i, j), terms in prods.items():
        if not (0 <= i < d and 0 <= j < d):
            raise TableFormatError(f"product index out of range: e {i + 1} {j + 1}")
        row = {}
        for k, c in terms:
            if not 0 <= k < d:
                raise TableFormatError(f"basis index {k + 1} out of range")
            row[k] = (row.get(k, 0) + c) % p
        kept = tuple(sorted((k, c) for k, c in row.items() if c))
        if kept:
            clean[(i, j)] = kept
    lab = None
    if labels:
        if sorted(labels) != list(range(d)):
            raise TableFormatError("labels must cover every basis element")
        lab = tuple(labels[i] for i in range(d))
    t = SCTable(p, d, weights, s, clean, lab, name, complete)
    check_grading(t)
    return t


def save_table(t: SCTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_table(t))


def load_table(path) -> SCTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read())


def check_grading(t: SCTable) -> None:
    w = t.weights
    for (i, j), terms in t.products.items():
        if w[i] + w[j] >= t.trunc:
            raise TableFormatError(f"e{i + 1}*e{j + 1} must vanish (weight >= trunc)")
        for k, _ in terms:
            if w[k] < w[i] + w[j]:
                raise TableFormatError(f"e{i + 1}*e{j + 1} has a term below its weight")


def associativity_failures(t: SCTable, triples=None, limit: int | None = None) -> list:
    """Triples ``(i, j, k)`` violating associativity (all triples by default)."""
    d, p = t.dim, t.p
    bad = []
    if triples is None:
        T = t.tensor
        for i in range(d):
            # (e_i e_j) e_k and e_i (e_j e_k) for all j, k at once
            left = (T[i] @ T.reshape(d, d * d)).reshape(d, d, d) % p
            right = (T.reshape(d * d, d) @ T[i]).reshape(d, d, d) % p
            for j, k in zip(*np.nonzero(np.any(left != right, axis=2))):
                bad.append((i, int(j), int(k)))
                if limit and len(bad) >= limit:
                    return bad
        return bad
    triples = [tuple(map(int, x)) for x in triples]
    if d <= _DENSE_LIMIT:
        T = t.tensor
        for a in range(0, len(triples), 512):
            chunk = np.array(triples[a:a + 512], dtype=np.int64).reshape(-1, 3)
            I, J, K = chunk[:, 0], chunk[:, 1], chunk[:, 2]
            # (e_i e_j) e_k = sum_l T[i,j,l] T[l,k,:], e_i (e_j e_k) = sum_l T[j,k,l] T[i,l,:]
            left = np.einsum("nl,nlm->nm", T[I, J], T[:, K, :].transpose(1, 0, 2)) % p
            right = np.einsum("nl,nlm->nm", T[J, K], T[I, :, :]) % p
            for n in np.nonzero(np.any(left != right, axis=1))[0]:
                bad.append(triples[a + int(n)])
                if limit and len(bad) >= limit:
                    return bad
        return bad
    eye = np.eye(d, dtype=np.int64)
    for i, j, k in triples:
        a = alg_multiply(t, alg_multiply(t, eye[i], eye[j]), eye[k])
        b = alg_multiply(t, eye[i], alg_multiply(t, eye[j], eye[k]))
        if not np.array_equal(a, b):
            bad.append((i, j, k))
            if limit and len(bad) >= limit:
                break
    return bad


# ---------------------------------------------------------------------------
# building tables from groups
# ---------------------------------------------------------------------------

class _Builder:
    """Rewriting machinery for one Jennings presentation at one level."""

    def __init__(self, jd: JenningsData, s: int):
        self.jd = jd
        J = jd.pres
        self.p = p = J.prime
        self.n = n = J.ngens
        self.w = jd.weights
        self.s = s
        mons = []

        def rec(k, alpha, wt):
            if k == n:
                mons.append(tuple(alpha))
                return
            for a in range(p):
                if wt + a * self.w[k] >= s:
                    break
                alpha.append(a)
                rec(k + 1, alpha, wt + a * self.w[k])
                alpha.pop()

        rec(0, [], 0)
        mons.sort(key=lambda a: (self.mweight(a), tuple(-x for x in a)))
        # index 0 is the empty monomial (the unit), not part of the table
        self.mons = mons
        self.index = {a: i for i, a in enumerate(mons)}
        self.pow_exp = [self._vec(J.power_rels[k]) for k in range(n)]
        self.comm_exp = {(l, k): self._vec(J.comm_rels[l][k]) for l in range(n) for k in range(l)}
        self._mg: dict = {}
        self._bar: dict = {}

    def mweight(self, a) -> int:
        return sum(x * w for x, w in zip(a, self.w))

    def _vec(self, word):
        v = [0] * self.n
        for g, e in word:
            v[g] = e
        return tuple(v)

    def bar(self, exps) -> dict:
        """``(prod u_j^e_j) bar`` as a sparse vector over monomial indices."""
        exps = tuple(exps)
        hit = self._bar.get(exps)
        if hit is not None:
            return hit
        p, s = self.p, self.s
        supp = [j for j, e in enumerate(exps) if e]
        out = {}
        for beta in itertools.product(*[range(exps[j] + 1) for j in supp]):
            if not any(beta):
                continue
            wt = sum(b * self.w[j] for b, j in zip(beta, supp))
            if wt >= s:
                continue
            c = 1
            for b, j in zip(beta, supp):
                c = c * comb(exps[j], b) % p
            if c:
                a = [0] * self.n
                for b, j in zip(beta, supp):
                    a[j] = b
                out[self.index[tuple(a)]] = c
        self._bar[exps] = out
        return out

    def mulgen(self, i: int, k: int) -> dict:
        """Monomial ``i`` times ``u_k bar`` on the right."""
        key = (i, k)
        hit = self._mg.get(key)
        if hit is not None:
            return hit
        p, s = self.p, self.s
        a = self.mons[i]
        last = max((j for j, x in enumerate(a) if x), default=-1)
        out: dict = {}
        if k > last or (k == last and a[k] + 1 < p):
            b = list(a)
            b[k] += 1
            b = tuple(b)
            if self.mweight(b) < s:
                out = {self.index[b]: 1}
        elif k == last:
            pre = list(a)
            pre[k] = 0
            wpre = self.mweight(pre)
            for x, c in self.bar(self.pow_exp[k]).items():
                b = tuple(u + v for u, v in zip(pre, self.mons[x]))
                if wpre + self.mweight(self.mons[x]) < s:
                    out[self.index[b]] = c
        else:
            l = last
            m0 = list(a)
            m0[l] -= 1
            v0 = {self.index[tuple(m0)]: 1}
            vk = self.vec_gen(v0, k)
            vl = self.vec_gen(v0, l)
            vkl = self.vec_gen(vk, l)
            acc = _add(_add(_add(dict(v0), vk, p), vl, p), vkl, p)
            out = dict(vkl)
            for x, c in self.bar(self.comm_exp[(l, k)]).items():
                term = self.vec_mon(acc, x)
                out = _add(out, term, p, c)
        self._mg[key] = out
        return out

    def vec_gen(self, v: dict, k: int) -> dict:
        out: dict = {}
        for i, c in v.items():
            out = _add(out, self.mulgen(i, k), self.p, c)
        return out

    def vec_mon(self, v: dict, x: int) -> dict:
        for j, e in enumerate(self.mons[x]):
            for _ in range(e):
                v = self.vec_gen(v, j)
                if not v:
                    return v
        return v

    def table(self) -> SCTable:
        p, n = self.p, self.n
        D = len(self.mons)
        rows = [[self.mulgen(i, k) or None for i in range(D)] for k in range(n)]
        last = []
        for a in self.mons:
            last.append(max((j for j, x in enumerate(a) if x), default=-1))
        prefix = []
        for a in self.mons:
            l = max((j for j, x in enumerate(a) if x), default=-1)
            if l < 0:
                prefix.append(-1)
                continue
            b = list(a)
            b[l] -= 1
            prefix.append(self.index[tuple(b)])
        wts = [self.mweight(a) for a in self.mons]
        prods = {}
        for ai in range(1, D):
            P = [None] * D
            P[0] = {ai: 1}
            for bi in range(1, D):
                if wts[ai] + wts[bi] >= self.s:
                    P[bi] = {}
                    continue
                src = P[prefix[bi]]
                P[bi] = kernels.sparse_vec_times(src, rows[last[bi]], p) if src else {}
                if P[bi]:
                    prods[(ai - 1, bi - 1)] = tuple(sorted((k - 1, c) for k, c in P[bi].items()))
        jd = self.jd
        return SCTable(p, D - 1, tuple(wts[1:]), self.s, prods, tuple(self.mons[1:]),
                       jd.group.name, self.s >= jd.nil_index)


def _add(a: dict, b: dict, p: int, c: int = 1) -> dict:
    for k, v in b.items():
        x = (a.get(k, 0) + c * v) % p
        if x:
            a[k] = x
        else:
            a.pop(k, None)
    return a


def build_aug_table(G: PcPresentation, s: int) -> SCTable:
    """Table of ``I(kG)/I(kG)^s`` on the Jennings basis."""
    if s < 2:
        raise ValueError("truncation level must be at least 2")
    return _Builder(jennings_series(G), s).table()


def extend_table(G: PcPresentation, old: SCTable, s: int) -> SCTable:
    """Rebuild at a higher level and check the old table is its restriction."""
    if s <= old.trunc:
        raise ValueError(f"new level {s} must exceed the current level {old.trunc}")
    new = build_aug_table(G, s)
    if new.restrict(old.trunc) != old:
        raise ValueError("old table was not built from this group")
    return new


def group_element_vector(t: SCTable, jd: JenningsData, g) -> np.ndarray:
    """``g - 1`` in the basis of ``t`` (``g`` given in the Jennings pcgs)."""
    b = _Builder.__new__(_Builder)
    if t.labels is None:
        raise ValueError("table has no monomial labels")
    b.p, b.n, b.w, b.s = t.p, len(jd.weights), jd.weights, t.trunc
    b.index = {lab: i + 1 for i, lab in enumerate(t.labels)}
    b.index[(0,) * b.n] = 0
    b._bar = {}
    v = np.zeros(t.dim, dtype=np.int64)
    for i, c in b.bar(g).items():
        v[i - 1] = c
    return v


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def alg_multiply(t: SCTable, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != (t.dim,) or y.shape != (t.dim,):
        raise ValueError(f"expected vectors of length {t.dim}")
    if t.dim <= _DENSE_LIMIT:
        return np.einsum("i,j,ijk->k", x, y, t.tensor) % t.p
    out = np.zeros(t.dim, dtype=np.int64)
    rows = t.rows
    ys = np.nonzero(y)[0]
    for i in np.nonzero(x)[0]:
        r = rows[i]
        for j in ys:
            row = r.get(int(j))
            if row:
                c = x[i] * y[j]
                for k, v in row.items():
                    out[k] += c * v
    return out % t.p


def alg_power(t: SCTable, x, e: int) -> np.ndarray:
    """``x^e`` for ``e >= 1`` (there is no unit in the augmentation ideal)."""
    if e < 1:
        raise ValueError("exponent must be positive")
    x = np.asarray(x, dtype=np.int64) % t.p
    result = None
    base = x
    while e:
        if e & 1:
            result = base if result is None else alg_multiply(t, result, base)
        e >>= 1
        if e:
            base = alg_multiply(t, base, base)
    return result


def batch_multiply(t: SCTable, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise products of two stacks of vectors."""
    T = t.tensor.reshape(t.dim * t.dim, t.dim)
    out = np.empty_like(X)
    step = max(1, 2 ** 22 // max(1, t.dim * t.dim))
    for a in range(0, X.shape[0], step):
        xs, ys = X[a:a + step], Y[a:a + step]
        outer = (xs[:, :, None] * ys[:, None, :]).reshape(xs.shape[0], -1)
        out[a:a + step] = (outer @ T) % t.p
    return out


def batch_power(t: SCTable, X: np.ndarray, e: int) -> np.ndarray:
    result = None
    base = X
    while e:
        if e & 1:
            result = base if result is None else batch_multiply(t, result, base)
        e >>= 1
        if e:
            base = batch_multiply(t, base, base)
    return result


def ideal_power_dims(t: SCTable) -> list:
    """``dim I^m`` for ``1 <= m < trunc``."""
    return [sum(1 for w in t.weights if w >= m) for m in range(1, t.trunc)]


def vector_weight(t: SCTable, v) -> int | None:
    nz = np.nonzero(np.asarray(v) % t.p)[0]
    return min(t.weights[i] for i in nz) if len(nz) else None


def element_weight(t: SCTable, G: PcPresentation, g) -> int:
    """Lowest weight in the expansion of ``g - 1``.

    ``g - 1`` is assembled from the generators of ``G`` with
    ``(xy) - 1 = (x-1)(y-1) + (x-1) + (y-1)``.
    """
    g = G.check_element(g)
    if not any(g):
        raise ValueError("the identity has no finite weight")
    if not t.complete:
        raise ValueError("element_weight needs a complete (untruncated) table")
    jd = jennings_series(G)
    gens = [group_element_vector(t, jd, jd.to_jennings(G.gen(i))) for i in range(G.ngens)]
    acc = np.zeros(t.dim, dtype=np.int64)
    for i, e in enumerate(g):
        for _ in range(e):
            acc = (alg_multiply(t, acc, gens[i]) + acc + gens[i]) % t.p
    return vector_weight(t, acc)


# ---------------------------------------------------------------------------
# counting maps
# ---------------------------------------------------------------------------

def _enumerate_span(basis: np.ndarray, p: int, limit: int):
    """All combinations of the rows of ``basis`` in chunks."""
    k = basis.shape[0]
    total = p ** k
    get_caps().check("enum", total)
    chunk = max(1, min(total, 1 << 14))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coeffs = np.zeros((len(idx), k), dtype=np.int64)
        rest = idx.copy()
        for c in range(k - 1, -1, -1):
            coeffs[:, c] = rest % p
            rest //= p
        yield (coeffs @ basis) % p if k else np.zeros((len(idx), basis.shape[1]), dtype=np.int64)
    del limit


def _below(t: SCTable, v: np.ndarray, level: int) -> np.ndarray:
    low = [i for i, w in enumerate(t.weights) if w < level]
    return ~np.any(v[:, low] % t.p, axis=1) if low else np.ones(v.shape[0], dtype=bool)


def phi_count(t: SCTable, n: int, m: int, l: int, samples: int = 64, seed: int = 0) -> int:
    """Number of ``x`` in ``I^n/I^{n+m}`` with ``x^{p^l}`` in ``I^{n p^l + m}``."""
    p = t.p
    top = n * p ** l + m
    if n < 1 or m < 1 or l < 0:
        raise ValueError("need n >= 1, m >= 1, l >= 0")
    if not t.complete and (n + m > t.trunc or top > t.trunc):
        raise ValueError(f"levels {n + m} and {top} must not exceed trunc {t.trunc}")
    reps = t.weight_range(n, n + m)
    basis = np.eye(t.dim, dtype=np.int64)[reps]
    q = p ** l
    count = 0
    for X in _enumerate_span(basis, p, get_caps().enum):
        Y = batch_power(t, X, q) if q > 1 else X
        count += int(_below(t, Y, top).sum())
    _check_phi_cosets(t, n, m, l, samples, seed)
    return count


def _check_phi_cosets(t, n, m, l, samples, seed):
    """Spot-check that the power map is well defined on cosets of ``I^{n+m}``."""
    rng = np.random.default_rng(seed)
    p, q, top = t.p, t.p ** l, n * t.p ** l + m
    reps = t.weight_range(n, n + m)
    tail = [i for i, w in enumerate(t.weights) if w >= n + m]
    if not tail or q == 1:
        return
    for _ in range(samples):
        x = np.zeros(t.dim, dtype=np.int64)
        x[reps] = rng.integers(0, p, len(reps))
        y = x.copy()
        y[tail] = rng.integers(0, p, len(tail))
        a = alg_power(t, x, q)
        b = alg_power(t, y, q)
        d = (a - b) % p
        if not _below(t, d[None, :], top)[0]:
            raise ArithmeticError("power map is not well defined on cosets here")


def center_ideal_basis(G: PcPresentation, t: SCTable, n: int) -> np.ndarray:
    """Basis (rows) of ``Z(kG)`` meet ``I^n`` in the coordinates of ``t``."""
    p = t.p
    jd = jennings_series(G)
    en = G.enum
    lab = en.class_labels
    sums = {}
    vecs = {}
    for x in range(1, en.size):
        r = int(lab[x])
        if r == 0:
            continue
        v = vecs.get(x)
        if v is None:
            v = group_element_vector(t, jd, jd.to_jennings(en.elements[x]))
        sums[r] = (sums.get(r, 0) + v) % p
    if not sums:
        return np.zeros((0, t.dim), dtype=np.int64)
    B = np.array([sums[r] for r in sorted(sums)], dtype=np.int64)
    low = [i for i, w in enumerate(t.weights) if w < n]
    if low:
        K = left_kernel(B[:, low], p)
        B = (K @ B) % p if len(K) else np.zeros((0, t.dim), dtype=np.int64)
    from .linalg import rref
    R, _ = rref(B, p)
    return R


def psi_count(G: PcPresentation, t: SCTable, n: int) -> int:
    """Number of ``x`` in ``Z(kG)`` meet ``I^n`` with ``x^p = 0``."""
    if not t.complete:
        raise ValueError("psi_count needs a complete (untruncated) table")
    basis = center_ideal_basis(G, t, n)
    count = 0
    for X in _enumerate_span(basis, t.p, get_caps().enum):
        Y = batch_power(t, X, t.p)
        count += int((~np.any(Y, axis=1)).sum())
    return count
