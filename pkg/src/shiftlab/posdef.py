"""Exact positive-semidefiniteness of symmetric rational matrices.

Diagonal-pivot Schur elimination: a symmetric matrix is PSD iff pivoting on
positive diagonal entries never exposes a negative diagonal entry and any
all-zero diagonal forces the remaining block to vanish.  On failure the
pivot trail names a principal minor with negative determinant.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _check_symmetric(mat: Sequence[Sequence[Fraction]]) -> int:
    n = len(mat)
    for row in mat:
        if len(row) != n:
            raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if mat[i][j] != mat[j][i]:
                raise ValueError("matrix must be symmetric")
    return n


def is_psd(mat: Sequence[Sequence[Fraction]]) -> tuple[bool, tuple[int, ...] | None]:
    """Decide PSD exactly; on failure return indices of a negative principal minor."""
    n = _check_symmetric(mat)
    if n == 0:
        return True, None
    work = [[Fraction(x) for x in row] for row in mat]
    active = list(range(n))
    pivots: list[int] = []
    while active:
        neg = next((i for i in active if work[i][i] < 0), None)
        if neg is not None:
            return False, tuple(sorted(pivots + [neg]))
        pos = next((i for i in active if work[i][i] > 0), None)
        if pos is None:
            # zero diagonal: PSD forces the whole remaining block to vanish
            for i in active:
                for j in active:
                    if work[i][j] != 0:
                        return False, tuple(sorted(pivots + [i, j]))
            return True, None
        p = pos
        d = work[p][p]
        active.remove(p)
        pivots.append(p)
        for i in active:
            fi = work[i][p]
            if fi == 0:
                continue
            for j in active:
                work[i][j] -= fi * work[p][j] / d
        for i in active:
            work[i][p] = Fraction(0)
            work[p][i] = Fraction(0)
    return True, None


def principal_minor_det(mat: Sequence[Sequence[Fraction]], indices: Sequence[int]) -> Fraction:
    """Exact determinant of the principal submatrix on the given indices."""
    idx = list(indices)
    sub = [[Fraction(mat[i][j]) for j in idx] for i in idx]
    n = len(sub)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if sub[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            sub[col], sub[pivot] = sub[pivot], sub[col]
            det = -det
        det *= sub[col][col]
        for r in range(col + 1, n):
            f = sub[r][col] / sub[col][col]
            for c in range(col, n):
                sub[r][c] -= f * sub[col][c]
    return det
