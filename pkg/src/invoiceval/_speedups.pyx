# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled hot kernels. Contract mirrored by invoiceval._speedups_py."""

from libc.stdlib cimport free, malloc

BACKEND = "c"


def levenshtein(str a, str b):
    """Unit-cost edit distance between two strings."""
    if a == b:
        return 0

    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    cdef Py_ssize_t start = 0
    while start < la and start < lb and a[start] == b[start]:
        start += 1
    cdef Py_ssize_t end_a = la
    cdef Py_ssize_t end_b = lb
    while end_a > start and end_b > start and a[end_a - 1] == b[end_b - 1]:
        end_a -= 1
        end_b -= 1

    cdef str s = a[start:end_a]
    cdef str t = b[start:end_b]
    cdef Py_ssize_t m = len(s)
    cdef Py_ssize_t n = len(t)
    if m == 0:
        return n
    if n == 0:
        return m
    if m < n:
        s, t = t, s
        m, n = n, m

    cdef Py_ssize_t *prev = <Py_ssize_t *> malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc((n + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()

    cdef Py_ssize_t i, j, sub, dele, ins, best, result
    cdef Py_UCS4 cs
    cdef Py_ssize_t *tmp
    try:
        for j in range(n + 1):
            prev[j] = j
        for i in range(m):
            cs = s[i]
            cur[0] = i + 1
            for j in range(n):
                sub = prev[j] if cs == t[j] else prev[j] + 1
                dele = prev[j + 1] + 1
                ins = cur[j] + 1
                best = sub if sub < dele else dele
                cur[j + 1] = best if best < ins else ins
            tmp = prev
            prev = cur
            cur = tmp
        result = prev[n]
    finally:
        free(prev)
        free(cur)
    return result
