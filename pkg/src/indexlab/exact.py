"""Exact linear algebra over the integers and rationals.

Everything here works on Python ints / Fractions, never floats. Matrices may be
numpy integer arrays or nested lists; they are converted to sparse row dicts,
which keeps elimination on incidence-style matrices cheap.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np


def _sparse_rows(matrix) -> list[dict[int, int]]:
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows = []
    for r in range(arr.shape[0]):
        (nz,) = np.nonzero(arr[r])
        row = {}
        for c in nz:
            v = arr[r, c]
            if isinstance(v, (float, np.floating)) and v != int(v):
                raise ValueError("exact routines need integer entries")
            row[int(c)] = int(v)
        if row:
            rows.append(row)
    return rows


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def integer_rank(matrix) -> int:
    """Rank over Q by fraction-free elimination on sparse integer rows.

    Each step eliminates the pivot column from the other rows with
    ``r <- p*r - r[c]*pivot_row`` and strips the integer content, so entries
    stay small. Pivot rows are chosen sparsest-first to limit fill-in.
    """
    rows = _sparse_rows(matrix)
    col_index: dict[int, set[int]] = {}
    live: dict[int, dict[int, int]] = {}
    for i, row in enumerate(rows):
        live[i] = row
        for c in row:
            col_index.setdefault(c, set()).add(i)
    rank = 0
    while live:
        i = min(live, key=lambda k: (len(live[k]), k))
        prow = live.pop(i)
        for c in prow:
            col_index[c].discard(i)
        if not prow:
            continue
        pc = min(prow, key=lambda c: (len(col_index.get(c, ())), c))
        p = prow[pc]
        rank += 1
        for j in list(col_index.get(pc, ())):
            row = live[j]
            f = row[pc]
            new = {c: p * v for c, v in row.items()}
            for c, v in prow.items():
                nv = new.get(c, 0) - f * v
                if nv:
                    new[c] = nv
                else:
                    new.pop(c, None)
            new = _primitive(new)
            for c in row:
                if c not in new:
                    col_index[c].discard(j)
            for c in new:
                col_index.setdefault(c, set()).add(j)
            if new:
                live[j] = new
            else:
                del live[j]
    return rank


def rational_nullspace(matrix) -> list[list[Fraction]]:
    """Basis of {x : A x = 0} over Q, one vector per free column (RREF)."""
    arr = np.asarray(matrix)
    n = arr.shape[1]
    rows = _sparse_rows(arr)
    # integer row echelon with back-substitution done in Fractions
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            if c not in pivots:
                pivots[c] = _primitive(row)
                break
            prow = pivots[c]
            p, f = prow[c], row[c]
            new = {k: p * v for k, v in row.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - f * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = _primitive(new)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    order = sorted(pivots, reverse=True)
    for fcol in free:
        x: dict[int, Fraction] = {fcol: Fraction(1)}
        for c in order:
            prow = pivots[c]
            s = sum((Fraction(v) * x[k] for k, v in prow.items() if k != c and k in x), Fraction(0))
            if s:
                x[c] = -s / prow[c]
        basis.append([x.get(i, Fraction(0)) for i in range(n)])
    return basis


def bareiss_determinant(matrix) -> int:
    """Determinant of a square integer matrix by Bareiss fraction-free elimination."""
    a = [[int(v) for v in row] for row in np.asarray(matrix).tolist()]
    n = len(a)
    if n == 0:
        return 1
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def congruence_diagonal(matrix) -> list[Fraction]:
    """Diagonal D with P^T M P = D for symmetric M, computed exactly over Q.

    Symmetric Gaussian elimination; a zero pivot is replaced by swapping in a
    later nonzero diagonal entry, or, failing that, by adding a row/column with
    a nonzero off-diagonal entry (which makes the pivot 2*m_ij).
    """
    m = [[Fraction(int(v)) if not isinstance(v, Fraction) else v for v in row] for row in _as_lists(matrix)]
    n = len(m)
    for i in range(n):
        for j in range(i):
            if m[i][j] != m[j][i]:
                raise ValueError("congruence diagonalization needs a symmetric matrix")
    diag = []
    for k in range(n):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][r] != 0), None)
            if swap is not None:
                m[k], m[swap] = m[swap], m[k]
                for row in m:
                    row[k], row[swap] = row[swap], row[k]
            else:
                other = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
                if other is not None:
                    for c in range(n):
                        m[k][c] += m[other][c]
                    for r in range(n):
                        m[r][k] += m[r][other]
        p = m[k][k]
        diag.append(p)
        if p == 0:
            continue
        for i in range(k + 1, n):
            f = m[i][k] / p
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
        for i in range(k + 1, n):
            m[k][i] = Fraction(0)
            m[i][k] = Fraction(0)
    return diag


def _as_lists(matrix):
    if isinstance(matrix, np.ndarray):
        return matrix.tolist()
    return [list(r) for r in matrix]
