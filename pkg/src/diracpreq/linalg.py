"""Gaussian elimination over the fraction field of a chart.

Matrices are lists of rows of Scalars.  Pivots are chosen by smallest
expression size to keep intermediate fractions small.
"""

from itertools import combinations, islice

from .scalar import certify_denominator, unit_certify


def _pick(rows, col, start):
    best, best_size = None, None
    for r in range(start, len(rows)):
        v = rows[r][col]
        if v.is_zero():
            continue
        size = v.nterms()
        if best is None or size < best_size:
            best, best_size = r, size
    return best


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = _pick(rows, c, r)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for k in range(len(rows)):
            if k != r and not rows[k][c].is_zero():
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols, chart):
    """Basis of {v : M v = 0} for an m x ncols matrix."""
    if not rows:
        return [[chart.one if j == k else chart.zero for j in range(ncols)] for k in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        v = [chart.zero] * ncols
        v[fc] = chart.one
        for r, pc in enumerate(piv):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(rows, rhs, chart):
    """One solution x of M x = rhs, or None when inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    x = [chart.zero] * ncols
    for r, pc in enumerate(piv):
        x[pc] = red[r][ncols]
    return x


def combination(gens, target, chart):
    """Coefficients c with sum c_i gens[i] = target, or None."""
    if not gens:
        return [] if all(t.is_zero() for t in target) else None
    n = len(target)
    cols = [[g[k] for g in gens] for k in range(n)]
    return solve(cols, list(target), chart)


def transpose(rows):
    return [list(c) for c in zip(*rows)]


def det(rows, chart):
    rows = [list(r) for r in rows]
    n = len(rows)
    out = chart.one
    for c in range(n):
        p = _pick(rows, c, c)
        if p is None:
            return chart.zero
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            out = -out
        piv = rows[c][c]
        out = out * piv
        inv = piv.inverse()
        for k in range(c + 1, n):
            if not rows[k][c].is_zero():
                f = rows[k][c] * inv
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[c])]
    return out


def inverse(rows, chart):
    n = len(rows)
    aug = [list(r) + [chart.one if j == i else chart.zero for j in range(n)] for i, r in enumerate(rows)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        return None
    return [r[n:] for r in red]


def matmul(a, b):
    return [[sum_(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def sum_(it):
    it = iter(it)
    acc = next(it)
    for v in it:
        acc = acc + v
    return acc


def is_unit(s, chart):
    """Nonzero with unit-certified numerator and denominator."""
    if s.is_zero():
        return False
    if not certify_denominator(s, chart).certified:
        return False
    return unit_certify(s.numerator(), chart).certified


MAX_MINORS = 4000


def unit_minor(rows, chart):
    """Columns of a maximal minor with unit determinant, and that determinant.

    Greedy elimination on unit pivots first; when it stalls, enumerate column
    subsets.  Returns None when no certified minor is found.
    """
    m = len(rows)
    if m == 0:
        return [], chart.one
    ncols = len(rows[0])
    work = [list(r) for r in rows]
    remaining = list(range(m))
    cols, detv = [], chart.one
    while remaining:
        found = None
        for pass_ in (0, 1):
            for r in remaining:
                for c in range(ncols):
                    if c in cols:
                        continue
                    v = work[r][c]
                    if v.is_zero():
                        continue
                    if pass_ == 0 and not v.is_constant():
                        continue
                    if pass_ == 1 and not is_unit(v, chart):
                        continue
                    found = (r, c)
                    break
                if found:
                    break
            if found:
                break
        if not found:
            break
        r, c = found
        piv = work[r][c]
        detv = detv * piv
        inv = piv.inverse()
        remaining.remove(r)
        for k in remaining:
            if not work[k][c].is_zero():
                f = work[k][c] * inv
                work[k] = [a - f * b for a, b in zip(work[k], work[r])]
        cols.append(c)
    if not remaining:
        cols_sorted = sorted(cols)
        return cols_sorted, det([[row[c] for c in cols_sorted] for row in rows], chart)
    for subset in islice(combinations(range(ncols), m), MAX_MINORS):
        dv = det([[row[c] for c in subset] for row in rows], chart)
        if is_unit(dv, chart):
            return list(subset), dv
    return None
