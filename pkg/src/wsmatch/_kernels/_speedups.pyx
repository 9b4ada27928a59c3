# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity kernels; mirrors ``_pure`` exactly."""

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

DEF WINKLER_PREFIX_WEIGHT = 0.1
DEF WINKLER_PREFIX_CAP = 4


def jaro_winkler(s1: str, s2: str) -> float:
    """Jaro-Winkler similarity in [0, 1], case-insensitive."""
    cdef str a = s1.lower()
    cdef str b = s2.lower()
    cdef Py_ssize_t n1 = len(a)
    cdef Py_ssize_t n2 = len(b)
    if n1 == 0 and n2 == 0:
        return 1.0
    if n1 == 0 or n2 == 0:
        return 0.0

    cdef Py_ssize_t window = max(n1, n2) // 2 - 1
    if window < 0:
        window = 0

    cdef unsigned char *flags1 = <unsigned char *> malloc(n1)
    cdef unsigned char *flags2 = <unsigned char *> malloc(n2)
    if flags1 == NULL or flags2 == NULL:
        if flags1 != NULL:
            free(flags1)
        if flags2 != NULL:
            free(flags2)
        raise MemoryError()

    cdef Py_ssize_t i, j, lo, hi, k
    cdef Py_ssize_t matches = 0
    cdef Py_ssize_t half_transpositions = 0
    cdef Py_UCS4 c
    cdef double jaro, score
    cdef Py_ssize_t prefix, prefix_limit

    try:
        for i in range(n1):
            flags1[i] = 0
        for j in range(n2):
            flags2[j] = 0

        for i in range(n1):
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window + 1
            if hi > n2:
                hi = n2
            c = a[i]
            for j in range(lo, hi):
                if flags2[j] or b[j] != c:
                    continue
                flags1[i] = 1
                flags2[j] = 1
                matches += 1
                break
        if matches == 0:
            return 0.0

        k = 0
        for i in range(n1):
            if not flags1[i]:
                continue
            while not flags2[k]:
                k += 1
            if a[i] != b[k]:
                half_transpositions += 1
            k += 1
    finally:
        free(flags1)
        free(flags2)

    jaro = (
        (<double> matches) / n1
        + (<double> matches) / n2
        + (<double> (matches - half_transpositions // 2)) / matches
    ) / 3.0

    prefix_limit = min(n1, n2)
    if prefix_limit > WINKLER_PREFIX_CAP:
        prefix_limit = WINKLER_PREFIX_CAP
    prefix = 0
    for i in range(prefix_limit):
        if a[i] != b[i]:
            break
        prefix += 1
    score = jaro + prefix * WINKLER_PREFIX_WEIGHT * (1.0 - jaro)
    return score


def hausdorff_reduce(matrix) -> float:
    """min(mean of row maxima, mean of column maxima) over a non-empty matrix."""
    cdef Py_ssize_t n = len(matrix)
    cdef Py_ssize_t m = len(matrix[0])
    cdef double *col_max = <double *> malloc(m * sizeof(double))
    if col_max == NULL:
        raise MemoryError()
    cdef double row_total = 0.0
    cdef double col_total = 0.0
    cdef double best, v
    cdef Py_ssize_t i, j
    try:
        for j in range(m):
            col_max[j] = 0.0
        for i in range(n):
            row = matrix[i]
            best = row[0]
            for j in range(m):
                v = row[j]
                if v > best:
                    best = v
                if v > col_max[j]:
                    col_max[j] = v
            row_total += best
        for j in range(m):
            col_total += col_max[j]
    finally:
        free(col_max)
    return min(row_total / n, col_total / m)


def literal_hausdorff_reduce(matrix) -> float:
    """max(mean of row minima, mean of column minima); the formula as printed."""
    cdef Py_ssize_t n = len(matrix)
    cdef Py_ssize_t m = len(matrix[0])
    cdef double *col_min = <double *> malloc(m * sizeof(double))
    if col_min == NULL:
        raise MemoryError()
    cdef double row_total = 0.0
    cdef double col_total = 0.0
    cdef double worst, v
    cdef Py_ssize_t i, j
    try:
        for j in range(m):
            col_min[j] = INFINITY
        for i in range(n):
            row = matrix[i]
            worst = row[0]
            for j in range(m):
                v = row[j]
                if v < worst:
                    worst = v
                if v < col_min[j]:
                    col_min[j] = v
            row_total += worst
        for j in range(m):
            col_total += col_min[j]
    finally:
        free(col_min)
    return max(row_total / n, col_total / m)
