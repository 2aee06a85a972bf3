# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled collector and sparse row combination (same contracts as _pykernels)."""
from libc.stdlib cimport malloc, realloc, free

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef struct Frame:
    long g
    long e


cdef inline int _push(Frame **stack, long *size, long *cap, long g, long e) except -1:
    cdef Frame *tmp
    if size[0] == cap[0]:
        cap[0] *= 2
        tmp = <Frame *> realloc(stack[0], cap[0] * sizeof(Frame))
        if tmp == NULL:
            raise MemoryError()
        stack[0] = tmp
    stack[0][size[0]].g = g
    stack[0][size[0]].e = e
    size[0] += 1
    return 0


def collect(tab, exps, letters):
    """Multiply the normal form ``exps`` on the right by a word."""
    cdef long p = tab.p
    cdef long n = tab.n
    cdef long[::1] pstart = tab.pow_start
    cdef long[:, :, ::1] cstart = tab.conj_start
    cdef long[:, :, ::1] clen = tab.conj_len
    cdef long[::1] fgen = tab.flat_gen
    cdef long[::1] fexp = tab.flat_exp
    cdef long *x = <long *> malloc((n + 1) * sizeof(long))
    cdef long cap = 64, size = 0
    cdef Frame *stack = <Frame *> malloc(cap * sizeof(Frame))
    cdef long g, e, top, s, k, xk, a, b, q
    if x == NULL or stack == NULL:
        free(x)
        free(stack)
        raise MemoryError()
    try:
        for k in range(n):
            x[k] = exps[k]
        for item in reversed(letters):
            g, e = item
            e %= p
            if e:
                _push(&stack, &size, &cap, g, e)
        while size:
            size -= 1
            g = stack[size].g
            e = stack[size].e % p
            if e == 0:
                continue
            top = n - 1
            while top > g and x[top] == 0:
                top -= 1
            if top == g:
                s = x[g] + e
                if s >= p:
                    x[g] = s - p
                    a = pstart[g]
                    b = pstart[g + 1]
                    q = b - 1
                    while q >= a:
                        _push(&stack, &size, &cap, fgen[q], fexp[q])
                        q -= 1
                else:
                    x[g] = s
                continue
            if e > 1:
                _push(&stack, &size, &cap, g, e - 1)
            k = top
            while k > g:
                xk = x[k]
                if xk:
                    a = cstart[g, k, xk]
                    q = a + clen[g, k, xk] - 1
                    while q >= a:
                        _push(&stack, &size, &cap, fgen[q], fexp[q])
                        q -= 1
                    x[k] = 0
                k -= 1
            _push(&stack, &size, &cap, g, 1)
        return [x[k] for k in range(n)]
    finally:
        free(x)
        free(stack)


def sparse_vec_times(dict vec, list rows, long p):
    """``vec`` (dict index->coef) times a sparse matrix given as row dicts."""
    cdef dict out = {}
    cdef dict row
    cdef long c, d, v
    for i, cc in vec.items():
        r = rows[i]
        if r is None:
            continue
        row = <dict> r
        c = cc
        for k, dd in row.items():
            d = dd
            v = (<long> out.get(k, 0) + c * d) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out
