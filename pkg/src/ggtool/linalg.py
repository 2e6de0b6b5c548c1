"""Linear algebra over Q(i) (sparse Gauss-Jordan) or C (numpy SVD).

Matrices are lists of rows; rows are lists of scalars.  Exact elimination
works on dict-rows so the sparse operators met in practice (d-matrices,
annihilator maps) stay cheap.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .scalars import EXACT, ZERO, Arith, GaussRat, arith_of


def _guess(rows) -> Arith:
    for r in rows:
        for x in r:
            return arith_of(x)
    return EXACT


def _to_np(rows, ncols=None) -> np.ndarray:
    if not rows:
        return np.zeros((0, ncols or 0), dtype=complex)
    return np.array([[complex(x) for x in r] for r in rows], dtype=complex)


def _sparse(rows, arith: Arith):
    out = []
    for r in rows:
        d = {}
        for j, x in enumerate(r):
            if not arith.is_zero(x):
                d[j] = arith.coerce(x)
        out.append(d)
    return out


def rref_sparse(rows: list[dict], ncols: int):
    """Exact reduced row echelon form; returns (pivot_rows, pivot_cols)."""
    rows = [dict(r) for r in rows if r]
    pivots: list[int] = []
    prow: list[dict] = []
    for col in range(ncols):
        cand = [k for k, r in enumerate(rows) if col in r]
        if not cand:
            continue
        k = min(cand, key=lambda k: len(rows[k]))
        piv = rows.pop(k)
        inv = 1 / piv[col]
        piv = {j: v * inv for j, v in piv.items()}
        for idx, r in enumerate(rows):
            f = r.get(col)
            if f is None:
                continue
            for j, v in piv.items():
                nv = r.get(j, 0) - f * v
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        for r in prow:
            f = r.get(col)
            if f is None:
                continue
            for j, v in piv.items():
                nv = r.get(j, 0) - f * v
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        rows = [r for r in rows if r]
        pivots.append(col)
        prow.append(piv)
    return prow, pivots


def rank(rows: Sequence[Sequence], arith: Arith | None = None, ncols: int | None = None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    arith = arith or _guess(rows)
    ncols = ncols if ncols is not None else len(rows[0])
    if arith.exact:
        return len(rref_sparse(_sparse(rows, arith), ncols)[1])
    a = _to_np(rows, ncols)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > arith.tol * max(1.0, s[0] if len(s) else 1.0)))


def nullspace(rows: Sequence[Sequence], ncols: int, arith: Arith | None = None) -> list[list]:
    """Basis of {x : A x = 0}."""
    rows = list(rows)
    arith = arith or _guess(rows)
    if arith.exact:
        prow, piv = rref_sparse(_sparse(rows, arith), ncols)
        free = [c for c in range(ncols) if c not in set(piv)]
        basis = []
        for f in free:
            v = [arith.zero] * ncols
            v[f] = arith.one
            for r, p in zip(prow, piv):
                c = r.get(f)
                if c is not None:
                    v[p] = -c
            basis.append(v)
        return basis
    a = _to_np(rows, ncols)
    if a.shape[0] == 0:
        return [list(r) for r in np.eye(ncols, dtype=complex)]
    _, s, vh = np.linalg.svd(a)
    r = int(np.sum(s > arith.tol * max(1.0, s[0] if len(s) else 1.0)))
    return [list(v) for v in vh[r:].conj()]


def solve(rows: Sequence[Sequence], rhs: Sequence, arith: Arith | None = None):
    """One solution of A x = b, or None when the system is inconsistent."""
    rows = list(rows)
    arith = arith or _guess(rows)
    ncols = len(rows[0]) if rows else 0
    if arith.exact:
        aug = [list(r) + [arith.coerce(b)] for r, b in zip(rows, rhs)]
        prow, piv = rref_sparse(_sparse(aug, arith), ncols + 1)
        if ncols in piv:
            return None
        x = [arith.zero] * ncols
        for r, p in zip(prow, piv):
            x[p] = r.get(ncols, arith.zero)
        return x
    a = _to_np(rows, ncols)
    b = np.array([complex(v) for v in rhs])
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.linalg.norm(a @ x - b) > arith.tol * max(1.0, np.linalg.norm(b)):
        return None
    return list(x)


def inverse(rows: Sequence[Sequence], arith: Arith | None = None) -> list[list]:
    rows = [list(r) for r in rows]
    arith = arith or _guess(rows)
    n = len(rows)
    if arith.exact:
        aug = [r + [arith.one if i == j else arith.zero for j in range(n)] for i, r in enumerate(rows)]
        prow, piv = rref_sparse(_sparse(aug, arith), 2 * n)
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise ZeroDivisionError("singular matrix")
        return [[r.get(n + j, arith.zero) for j in range(n)] for r in prow[:n]]
    a = _to_np(rows, n)
    return [list(r) for r in np.linalg.inv(a)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[_dot(r, c) for c in bt] for r in a]


def matvec(a, v):
    return [_dot(r, v) for r in a]


def _dot(r, c):
    acc = None
    for x, y in zip(r, c):
        if x and y:
            acc = x * y if acc is None else acc + x * y
    if acc is None:
        probe = r[0] if len(r) else 0
        return ZERO if type(probe) is GaussRat or type(c[0]) is GaussRat else probe * 0
    return acc


def transpose(a):
    return [list(r) for r in zip(*a)]


def identity(n: int, arith: Arith = EXACT):
    return [[arith.one if i == j else arith.zero for j in range(n)] for i in range(n)]


def det(rows, arith: Arith | None = None):
    """Determinant by exact elimination (float mode: numpy)."""
    rows = [list(r) for r in rows]
    arith = arith or _guess(rows)
    n = len(rows)
    if not arith.exact:
        return complex(np.linalg.det(_to_np(rows, n)))
    a = [[arith.coerce(x) for x in r] for r in rows]
    sign = 1
    d = arith.one
    for c in range(n):
        p = next((k for k in range(c, n) if a[k][c]), None)
        if p is None:
            return arith.zero
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        d = d * a[c][c]
        inv = 1 / a[c][c]
        for k in range(c + 1, n):
            f = a[k][c]
            if f:
                f = f * inv
                a[k] = [x - f * y for x, y in zip(a[k], a[c])]
    return d if sign > 0 else -d


def span_contains(basis: list[list], vectors: list[list], arith: Arith | None = None) -> bool:
    """True iff every vector lies in the span of basis."""
    if not vectors:
        return True
    arith = arith or _guess(basis + vectors)
    ncols = len(vectors[0])
    r0 = rank(basis, arith, ncols) if basis else 0
    return rank(list(basis) + list(vectors), arith, ncols) == r0


def is_exact_matrix(rows) -> bool:
    return all(type(x) is GaussRat for r in rows for x in r)
