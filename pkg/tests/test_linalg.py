import itertools

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from mipkit.linalg import (Echelon, inverse, left_kernel, lexmin_coset, rank, row_space_contains,
                           rref, solve)


def matrices(max_rows=5, max_cols=5):
    return st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, max_rows), st.integers(1, max_cols),
                     st.integers(0, 2**32 - 1)).map(_make)


def _make(args):
    p, r, c, seed = args
    rng = np.random.default_rng(seed)
    return p, rng.integers(0, p, size=(r, c))


def _span(m, p):
    rows = [np.zeros(m.shape[1], dtype=np.int64)]
    for coeffs in itertools.product(range(p), repeat=m.shape[0]):
        rows.append(np.array(coeffs) @ m % p)
    return {tuple(int(x) for x in v) for v in rows}


@given(matrices())
def test_rank_matches_span_size(pm):
    p, m = pm
    assert p ** rank(m, p) == len(_span(m, p))


@given(matrices())
def test_rref_preserves_row_space(pm):
    p, m = pm
    r, piv = rref(m, p)
    assert _span(r[:len(piv)], p) == _span(m, p)
    for i, c in enumerate(piv):
        assert r[i, c] == 1 and not r[:i, c].any() and not r[i + 1:, c].any()


@given(matrices())
def test_left_kernel(pm):
    p, m = pm
    k = left_kernel(m, p)
    assert not (k @ m % p).any()
    assert k.shape[0] == m.shape[0] - rank(m, p)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_inverse_and_solve(p, n, seed):
    m = np.random.default_rng(seed).integers(0, p, size=(n, n))
    if rank(m, p) == n:
        assert (inverse(m, p) @ m % p == np.eye(n, dtype=np.int64)).all()
    b = np.random.default_rng(seed + 1).integers(0, p, size=n)
    x = solve(m, b, p)
    reachable = tuple(int(v) for v in b) in _span(m, p)
    assert (x is not None) == reachable
    if x is not None:
        assert ((x @ m - b) % p == 0).all()


@given(matrices(4, 4))
def test_echelon_membership(pm):
    p, m = pm
    ech = Echelon(m.shape[1], p)
    for row in m:
        ech.add(row)
    span = _span(m, p)
    assert len(ech) == rank(m, p)
    for v in itertools.product(range(p), repeat=m.shape[1]):
        assert ech.contains(np.array(v)) == (v in span)
        assert row_space_contains(m, np.array(v), p) == (v in span)


@given(matrices(3, 4), st.integers(0, 2**32 - 1))
def test_lexmin_coset_by_enumeration(pm, seed):
    p, g = pm
    c = np.random.default_rng(seed).integers(0, p, size=g.shape[1])
    v, z0, kern = lexmin_coset(c, g, p)
    pts = {}
    for z in itertools.product(range(p), repeat=g.shape[0]):
        w = tuple(int(x) for x in (c + np.array(z) @ g) % p)
        pts.setdefault(w, set()).add(z)
    best = min(pts)
    assert tuple(int(x) for x in v) == best
    attaining = {tuple(int(x) for x in (z0 + np.array(k) @ kern) % p)
                 for k in itertools.product(range(p), repeat=kern.shape[0])}
    assert attaining == pts[best]
