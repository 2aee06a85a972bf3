"""Dense linear algebra over the prime field F_p.

Vectors are rows.  Matrices are ``numpy`` integer arrays with entries in
``0..p-1``; every function returns reduced arrays.
"""
from __future__ import annotations

import numpy as np


def as_fp(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; zero rows are dropped."""
    a = as_fp(m, p).copy()
    if a.ndim == 1:
        a = a.reshape(1, -1)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m, p: int) -> int:
    a = as_fp(m, p)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def left_kernel(m, p: int) -> np.ndarray:
    """Basis (rows) of ``{x : x @ m == 0}``."""
    a = as_fp(m, p)
    n = a.shape[0]
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    r, piv = rref(aug, p)
    width = a.shape[1]
    keep = [i for i, c in enumerate(piv) if c >= width]
    return r[keep, width:] if keep else np.zeros((0, n), dtype=np.int64)


def inverse(m, p: int) -> np.ndarray:
    a = as_fp(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, piv = rref(np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular mod %d" % p)
    return r[:, n:]


def solve(m, b, p: int) -> np.ndarray | None:
    """Some ``x`` with ``x @ m == b`` (mod p), or ``None``."""
    a = as_fp(m, p)
    b = as_fp(b, p).reshape(1, -1)
    n = a.shape[0]
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    r, piv = rref(aug, p)
    width = a.shape[1]
    x = np.zeros(n, dtype=np.int64)
    resid = b[0].copy()
    for row, c in zip(r, piv):
        if c >= width:
            break
        coef = resid[c]
        if coef:
            resid = (resid - coef * row[:width]) % p
            x = (x + coef * row[width:]) % p
    if resid.any():
        return None
    return x


def row_space_contains(basis, v, p: int) -> bool:
    if len(basis) == 0:
        return not np.any(as_fp(v, p))
    return rank(np.vstack([basis, v]), p) == rank(basis, p)


class Echelon:
    """Incrementally maintained reduced basis of a subspace of F_p^n."""

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v) -> np.ndarray:
        v = as_fp(v, self.p).copy()
        for row, c in zip(self.rows, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v

    def add(self, v) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = (v * pow(int(v[c]), -1, self.p)) % self.p
        for i, row in enumerate(self.rows):
            if row[c]:
                self.rows[i] = (row - row[c] * v) % self.p
        self.rows.append(v)
        self.pivots.append(c)
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.n), dtype=np.int64)
        order = np.argsort(self.pivots)
        return np.array([self.rows[i] for i in order], dtype=np.int64)


def lexmin_coset(c, gens, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lexicographically least vector of the affine set ``c + rowspace(gens)``.

    ``gens`` has one row per free parameter.  Returns ``(v, z0, kernel)``
    where ``v = c + z0 @ gens`` is the minimum and ``z0 + rowspan(kernel)``
    is the full set of parameter vectors attaining it.
    """
    c = as_fp(c, p)
    g = as_fp(gens, p)
    k = g.shape[0]
    aug = np.concatenate([g, np.eye(k, dtype=np.int64)], axis=1)
    r, piv = rref(aug, p)
    width = g.shape[1]
    v = c.copy()
    z0 = np.zeros(k, dtype=np.int64)
    kern = []
    for row, col in zip(r, piv):
        if col >= width:
            kern.append(row[width:])
            continue
        coef = v[col]
        if coef:
            v = (v - coef * row[:width]) % p
            z0 = (z0 - coef * row[width:]) % p
    kernel = np.array(kern, dtype=np.int64) if kern else np.zeros((0, k), dtype=np.int64)
    return v, z0, kernel
