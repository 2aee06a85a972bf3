"""Pure-Python hot kernels (fallback when the compiled extension is absent)."""
from __future__ import annotations


def collect(tab, exps, letters):
    """Multiply the normal form ``exps`` on the right by a word.

    ``tab`` is a :class:`mipkit.pcgroup.CollectorTables`; ``letters`` is a
    sequence of ``(generator, exponent)`` pairs.  Collection from the left:
    a letter ``g_i`` is moved past the collected tail by conjugating every
    tail generator with ``g_i``.
    """
    p = tab.p
    n = tab.n
    pow_words = tab.pow_words
    conjpow = tab.conjpow
    x = list(exps)
    stack = [(g, e) for g, e in reversed(letters) if e % p]
    while stack:
        g, e = stack.pop()
        e %= p
        if not e:
            continue
        top = n - 1
        while top > g and not x[top]:
            top -= 1
        if top == g:
            s = x[g] + e
            if s >= p:
                x[g] = s - p
                stack.extend(reversed(pow_words[g]))
            else:
                x[g] = s
            continue
        if e > 1:
            stack.append((g, e - 1))
        cg = conjpow[g]
        for k in range(top, g, -1):
            xk = x[k]
            if xk:
                stack.extend(reversed(cg[k][xk]))
                x[k] = 0
        stack.append((g, 1))
    return x


def sparse_vec_times(vec, rows, p):
    """``vec`` (dict index->coef) times a sparse matrix given as row dicts."""
    out = {}
    for i, c in vec.items():
        row = rows[i]
        if row is None:
            continue
        for k, d in row.items():
            v = (out.get(k, 0) + c * d) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out
