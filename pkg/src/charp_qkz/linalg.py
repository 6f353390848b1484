"""Exact linear algebra over a field context, plus batched numpy kernels
for F_{p^2} matrix work (points stacked along a leading axis, elements as
(a0, a1) component pairs in the trailing axis)."""

from __future__ import annotations

import numpy as np

from .ffield import FieldCtx, FieldElement

__all__ = [
    "rank",
    "det",
    "solve",
    "kernel_basis",
    "ext_matmul",
    "ext_inv",
    "ext_rank_batch",
]


def _to_rows(mat, ctx: FieldCtx) -> list[list[int]]:
    return [
        [x.val if isinstance(x, FieldElement) else x % ctx.p for x in row] for row in mat
    ]


def _eliminate(rows: list[list[int]], ctx: FieldCtx) -> tuple[list[list[int]], list[int]]:
    """Row echelon form in place; returns (rows, pivot column indices)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = ctx.inv(rows[r][c])
        rows[r] = [ctx.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(mat, ctx: FieldCtx) -> int:
    rows = _to_rows(mat, ctx)
    _, pivots = _eliminate(rows, ctx)
    return len(pivots)


def det(mat, ctx: FieldCtx) -> FieldElement:
    rows = _to_rows(mat, ctx)
    n = len(rows)
    acc = 1
    for c in range(n):
        pr = next((i for i in range(c, n) if rows[i][c]), None)
        if pr is None:
            return FieldElement(ctx, 0)
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            acc = ctx.neg(acc)
        acc = ctx.mul(acc, rows[c][c])
        inv = ctx.inv(rows[c][c])
        for i in range(c + 1, n):
            if rows[i][c]:
                f = ctx.mul(rows[i][c], inv)
                rows[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[i], rows[c])]
    return FieldElement(ctx, acc)


def solve(mat, rhs, ctx: FieldCtx) -> list[FieldElement]:
    """Solve a square nonsingular system A x = b."""
    rows = _to_rows(mat, ctx)
    b = [x.val if isinstance(x, FieldElement) else x % ctx.p for x in rhs]
    aug = [row + [bv] for row, bv in zip(rows, b)]
    aug, pivots = _eliminate(aug, ctx)
    n = len(rows[0])
    if pivots != list(range(n)):
        raise ValueError("singular or inconsistent linear system")
    return [FieldElement(ctx, aug[i][-1]) for i in range(n)]


def kernel_basis(mat, ctx: FieldCtx) -> list[list[FieldElement]]:
    """Basis of the right kernel of the matrix."""
    rows = _to_rows(mat, ctx)
    if not rows:
        return []
    ncols = len(rows[0])
    rows, pivots = _eliminate(rows, ctx)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = ctx.neg(rows[r][fc])
        basis.append([FieldElement(ctx, v) for v in vec])
    return basis


# -- batched F_{p^2} kernels ------------------------------------------------


def ext_matmul(A: np.ndarray, B: np.ndarray, p: int, delta: int) -> np.ndarray:
    """Matrix product of stacked F_{p^2} matrices shaped (..., n, n, 2)."""
    a0, a1 = A[..., 0], A[..., 1]
    b0, b1 = B[..., 0], B[..., 1]
    c0 = (a0 @ b0 + delta * (a1 @ b1)) % p
    c1 = (a0 @ b1 + a1 @ b0) % p
    return np.stack([c0, c1], axis=-1)


def ext_inv(x: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Componentwise inverse of stacked F_{p^2} scalars shaped (..., 2)."""
    p = ctx.p
    delta = ctx.nonresidue
    a0, a1 = x[..., 0] % p, x[..., 1] % p
    norm = (a0 * a0 - delta * a1 * a1) % p
    if np.any(norm == 0):
        raise ZeroDivisionError("inverse of zero in F_{p^2}")
    inv_tab = np.asarray(ctx._inv_table, dtype=np.int64)
    ninv = inv_tab[norm]
    return np.stack([(a0 * ninv) % p, (-a1 * ninv) % p], axis=-1)


def ext_rank_batch(M: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Ranks of a stack of F_{p^2} matrices shaped (npts, r, c, 2)."""
    out = np.empty(M.shape[0], dtype=np.int64)
    for i in range(M.shape[0]):
        rows = [
            [FieldElement(ctx, int(M[i, r, c, 0]) + int(M[i, r, c, 1]) * ctx.p) for c in range(M.shape[2])]
            for r in range(M.shape[1])
        ]
        out[i] = rank(rows, ctx)
    return out
