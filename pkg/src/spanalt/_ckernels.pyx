# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled CYK and derivation-counting kernels; same contract as ``_pykernels``."""
from libc.stdlib cimport calloc, free, malloc


def cyk_recognize(int n_nt, binary, unary, word, int start):
    cdef int n = len(word)
    if n == 0:
        return False
    cdef int nb = len(binary)
    cdef int *ra = <int *> malloc(max(nb, 1) * 3 * sizeof(int))
    cdef unsigned char *chart = <unsigned char *> calloc(n * (n + 1) * n_nt, 1)
    cdef int i, k, length, r, A, B, C
    cdef Py_ssize_t base, lbase, rbase
    if ra == NULL or chart == NULL:
        free(ra); free(chart)
        raise MemoryError()
    try:
        for r, (A, B, C) in enumerate(binary):
            ra[3 * r] = A; ra[3 * r + 1] = B; ra[3 * r + 2] = C
        for i in range(n):
            base = (i * (n + 1) + 1) * n_nt
            for A in unary[word[i]]:
                chart[base + A] = 1
        for length in range(2, n + 1):
            for i in range(n - length + 1):
                base = (i * (n + 1) + length) * n_nt
                for k in range(1, length):
                    lbase = (i * (n + 1) + k) * n_nt
                    rbase = ((i + k) * (n + 1) + length - k) * n_nt
                    for r in range(nb):
                        if chart[lbase + ra[3 * r + 1]] and chart[rbase + ra[3 * r + 2]]:
                            chart[base + ra[3 * r]] = 1
        return bool(chart[(0 * (n + 1) + n) * n_nt + start])
    finally:
        free(ra)
        free(chart)


def cyk_count(int n_nt, binary, unary, word, int start):
    cdef int n = len(word)
    if n == 0:
        return 0
    cdef int nb = len(binary)
    cdef int i, k, length, r, A, B, C
    cdef list chart = [None] * (n * (n + 1))
    cdef list cell, left, right
    cdef int *ra = <int *> malloc(max(nb, 1) * 3 * sizeof(int))
    if ra == NULL:
        raise MemoryError()
    try:
        for r, (A, B, C) in enumerate(binary):
            ra[3 * r] = A; ra[3 * r + 1] = B; ra[3 * r + 2] = C
        for i in range(n):
            cell = [0] * n_nt
            for A in unary[word[i]]:
                cell[A] += 1
            chart[i * (n + 1) + 1] = cell
        for length in range(2, n + 1):
            for i in range(n - length + 1):
                cell = [0] * n_nt
                for k in range(1, length):
                    left = chart[i * (n + 1) + k]
                    right = chart[(i + k) * (n + 1) + length - k]
                    for r in range(nb):
                        lb = left[ra[3 * r + 1]]
                        if lb:
                            rc = right[ra[3 * r + 2]]
                            if rc:
                                cell[ra[3 * r]] += lb * rc
                chart[i * (n + 1) + length] = cell
        return chart[n][start]
    finally:
        free(ra)


def length_counts(int n_nt, binary, unary_count, int n):
    cdef int A, B, C, k, length
    cdef list table = [[0] * (n + 1) for _ in range(n_nt)]
    cdef list tb, tc
    if n >= 1:
        for A in range(n_nt):
            table[A][1] = unary_count[A]
    for length in range(2, n + 1):
        for A, B, C in binary:
            tb = table[B]
            tc = table[C]
            total = 0
            for k in range(1, length):
                x = tb[k]
                if x:
                    y = tc[length - k]
                    if y:
                        total += x * y
            table[A][length] += total
    return table
