"""Pure-Python similarity kernels.

Fallback used when the compiled extension is unavailable (or disabled via
WSMATCH_PURE=1). Must stay behaviourally identical to ``_speedups``.
"""

WINKLER_PREFIX_WEIGHT = 0.1
WINKLER_PREFIX_CAP = 4


def jaro_winkler(s1: str, s2: str) -> float:
    """Jaro-Winkler similarity in [0, 1], case-insensitive.

    Two empty strings compare as 1.0, one empty string as 0.0. The Winkler
    boost uses p = 0.1 with the common prefix capped at 4 characters.
    """
    s1 = s1.lower()
    s2 = s2.lower()
    n1, n2 = len(s1), len(s2)
    if n1 == 0 and n2 == 0:
        return 1.0
    if n1 == 0 or n2 == 0:
        return 0.0

    window = max(max(n1, n2) // 2 - 1, 0)
    flags1 = [False] * n1
    flags2 = [False] * n2

    matches = 0
    for i in range(n1):
        lo = max(0, i - window)
        hi = min(i + window + 1, n2)
        for j in range(lo, hi):
            if flags2[j] or s1[i] != s2[j]:
                continue
            flags1[i] = True
            flags2[j] = True
            matches += 1
            break
    if matches == 0:
        return 0.0

    half_transpositions = 0
    k = 0
    for i in range(n1):
        if not flags1[i]:
            continue
        while not flags2[k]:
            k += 1
        if s1[i] != s2[k]:
            half_transpositions += 1
        k += 1
    transpositions = half_transpositions // 2

    jaro = (
        matches / n1 + matches / n2 + (matches - transpositions) / matches
    ) / 3.0

    prefix = 0
    for i in range(min(n1, n2, WINKLER_PREFIX_CAP)):
        if s1[i] != s2[i]:
            break
        prefix += 1
    return jaro + prefix * WINKLER_PREFIX_WEIGHT * (1.0 - jaro)


def hausdorff_reduce(matrix) -> float:
    """min(mean of row maxima, mean of column maxima) over a non-empty matrix.

    This is the similarity form of the modified Hausdorff distance under
    d = 1 - sim. ``matrix`` is a rectangular sequence of rows of floats.
    """
    n = len(matrix)
    m = len(matrix[0])
    row_total = 0.0
    col_max = [0.0] * m
    for row in matrix:
        best = row[0]
        for j in range(m):
            v = row[j]
            if v > best:
                best = v
            if v > col_max[j]:
                col_max[j] = v
        row_total += best
    col_total = 0.0
    for j in range(m):
        col_total += col_max[j]
    return min(row_total / n, col_total / m)


def literal_hausdorff_reduce(matrix) -> float:
    """max(mean of row minima, mean of column minima).

    The aggregate exactly as printed in the source formulas, applied to a
    similarity matrix. Identical inputs do not score 1 under this form; kept
    behind a switch for experimentation.
    """
    n = len(matrix)
    m = len(matrix[0])
    row_total = 0.0
    col_min = [float("inf")] * m
    for row in matrix:
        worst = row[0]
        for j in range(m):
            v = row[j]
            if v < worst:
                worst = v
            if v < col_min[j]:
                col_min[j] = v
        row_total += worst
    col_total = 0.0
    for j in range(m):
        col_total += col_min[j]
    return max(row_total / n, col_total / m)
