"""Exact noiseless decoding of constructed codes by recursive peeling.

Given y = C x with C from build_C, the block structure lets x be read off
with integer arithmetic alone. Writing y as (y1 | y2 | y3) over the first r
chips, chip r+1, and the last p chips, the combination y1[:p] + y3 - y2
equals 2 w + x4 where w depends only on the B-block users: the identity-tail
bits x4 are the parities, and stripping them peels the recursion one level.
The same parity trick solves the transposed-B system on the L = 2^k - 1
branch.
"""

from __future__ import annotations

import numpy as np

from ..codeset import CodeSet, build_C, params_for

__all__ = ["LatticeError", "decode_nda", "solve_constructed"]


class LatticeError(ValueError):
    """y is not an exact noiseless superposition of the code's columns."""


def _solve_bt(k: int, w: np.ndarray, variant: str) -> np.ndarray:
    # solve B_k^T u = w; u has k 2^(k-1) entries, w has 2^k - 1
    if k == 1:
        return w[:1].copy()
    rp = 2 ** (k - 1) - 1
    ya, yb, yc = w[:rp], int(w[rp]), w[rp + 1 :]
    comb = ya + yc - yb
    u4 = comb % 2
    wa = (comb - u4) // 2  # = B_{k-1}^T u1
    u1 = _solve_bt(k - 1, wa, variant)
    u3 = _solve_bt(k - 1, ya - wa, variant)
    u2 = yb - int(u3.sum())
    return np.concatenate([u1, np.array([u2], dtype=np.int64), u3, u4])


def solve_constructed(L: int, y: np.ndarray, variant: str) -> np.ndarray:
    """Solve C_L x = y in construction row order. No range checks; the
    caller validates the result against the matrix."""
    y = np.asarray(y, dtype=np.int64)
    P = params_for(L)
    k, r, p = P.k, P.r, P.p
    if p is None:
        return _solve_bt(k, y, variant)
    if p == 0:
        x1 = _solve_bt(k, y[:r], variant)
        return np.concatenate([x1, y[r : r + 1]])
    y1, y2, y3 = y[:r], int(y[r]), y[r + 1 :]
    comb = y1[:p] + y3 - y2
    x4 = comb % 2
    w = (comb - x4) // 2  # = (B_k^p)^T x1
    x3 = solve_constructed(p, y1[:p] - w, variant)
    x2 = y2 - int(x3.sum())
    rhs = y1.copy()
    Cp = build_C(p, variant, _verify=False).bits
    rhs[:p] -= Cp.astype(np.int64) @ x3
    x1 = _solve_bt(k, rhs, variant)
    return np.concatenate([x1, np.array([x2], dtype=np.int64), x3, x4])


def decode_nda(code: CodeSet, y) -> np.ndarray:
    """Recover x from an exact superposition y = C x of a constructed code.

    Raises LatticeError when y is not integral, out of range, or fails the
    final consistency check C x_hat = y.
    """
    if not isinstance(code, CodeSet) or code.construction is None:
        raise ValueError("decode_nda needs a CodeSet with construction parameters")
    y = np.asarray(y)
    if y.shape != (code.L,):
        raise ValueError(f"expected {code.L} chip values, got shape {y.shape}")
    yi = np.asarray(np.rint(y), dtype=np.int64)
    if not np.array_equal(yi, np.asarray(y)):
        raise LatticeError("chip values must be exact integers")
    if (yi < 0).any() or (yi > code.K).any():
        raise LatticeError("chip values outside [0, K]")

    # reorder observed chips into construction row order
    y_base = np.empty(code.L, dtype=np.int64)
    for i, src in enumerate(code.row_map or range(code.L)):
        y_base[src] = yi[i]

    from ..codeset import resolve_variant

    x = solve_constructed(code.L, y_base, resolve_variant())
    if ((x < 0) | (x > 1)).any() or not np.array_equal(
        code.bits.astype(np.int64) @ x, yi
    ):
        raise LatticeError("y is not a superposition of code columns")
    return x.astype(np.uint8)
