"""Exact Gaussian elimination over Q(i)."""

from __future__ import annotations

from typing import Sequence

from .algebra import GQ


def _copy(rows: Sequence[Sequence]) -> list[list[GQ]]:
    return [[GQ.of(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence]) -> tuple[list[list[GQ]], list[int]]:
    m = _copy(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = GQ(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[GQ]]:
    if not rows:
        return [[GQ(int(i == j)) for j in range(ncols)] for i in range(ncols or 0)]
    ncols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [GQ(0)] * ncols
        v[f] = GQ(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[GQ] | None:
    """One solution of ``a x = b`` or None when inconsistent."""
    ncols = len(a[0])
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [GQ(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][ncols]
    return x


def det(rows: Sequence[Sequence]) -> GQ:
    m = _copy(rows)
    n = len(m)
    out = GQ(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
        if piv is None:
            return GQ(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out = out * m[c][c]
        inv = GQ(1) / m[c][c]
        for i in range(c + 1, n):
            if not m[i][c].is_zero():
                f = m[i][c] * inv
                m[i] = [a - f * bb for a, bb in zip(m[i], m[c])]
    return out


def inverse(rows: Sequence[Sequence]) -> list[list[GQ]]:
    n = len(rows)
    aug = [list(r) + [GQ(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]
