"""Lookup, exhaustive-ML, and matched-filter decoders.

All three enumerate or correlate against the code matrix directly and work
on any code set, canonical or not. The ML scan is delegated to the active
kernel backend; lookup and matched filter are NumPy-only.
"""

from __future__ import annotations

import numpy as np

from ..codeset import CapabilityError, CodeSet, _lex_bits
from . import _backend
from .nda import LatticeError

TABLE_MAX_K = 20
_TABLE_CACHE_SLOTS = 4


class _SumTable:
    """All 2^K candidate sums of one code, plus lookup keys."""

    def __init__(self, bits: np.ndarray):
        L, K = bits.shape
        self.L = L
        self.K = K
        xs = _lex_bits(1 << K, K, 0)
        self.sums = (xs.astype(np.int16) @ bits.astype(np.int16).T)
        self._S = None
        self._norm2 = None
        self._keys = None
        self._order = None

    def dense(self):
        if self._S is None:
            self._S = self.sums.astype(np.float64)
            self._norm2 = np.einsum("ij,ij->i", self._S, self._S)
        return self._S, self._norm2

    def keys(self):
        if self._keys is None:
            flat = np.ascontiguousarray(self.sums)
            raw = flat.view(f"S{2 * self.L}").ravel()
            self._order = np.argsort(raw, kind="stable")
            self._keys = raw[self._order]
        return self._keys, self._order

    def key_of(self, y_int: np.ndarray) -> bytes:
        row = np.ascontiguousarray(y_int.astype(np.int16))
        return row.view(f"S{2 * self.L}").ravel()[0]


_tables: dict[bytes, _SumTable] = {}


def _table(code: CodeSet) -> _SumTable:
    if code.K > TABLE_MAX_K:
        raise CapabilityError(
            f"K={code.K} exceeds the 2^K table bound (K <= {TABLE_MAX_K})"
        )
    key = code.bits.tobytes()
    tab = _tables.get(key)
    if tab is None:
        if len(_tables) >= _TABLE_CACHE_SLOTS:
            _tables.pop(next(iter(_tables)))
        tab = _SumTable(code.bits)
        _tables[key] = tab
    return tab


def _index_bits(idx: np.ndarray, K: int) -> np.ndarray:
    shifts = np.arange(K - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def decode_lookup(code: CodeSet, y: np.ndarray) -> np.ndarray:
    """Exact inverse by table search; y must be a noiseless codeword sum.

    Raises LatticeError when y is not integral or matches no sum.
    """
    tab = _table(code)
    yi = np.asarray(y, dtype=np.float64).reshape(-1)
    if yi.shape[0] != code.L:
        raise ValueError(f"y has length {yi.shape[0]}, code has {code.L} chips")
    yr = np.rint(yi)
    if not np.array_equal(yr, yi):
        raise LatticeError("y is not an integer vector")
    if yr.min() < np.iinfo(np.int16).min or yr.max() > np.iinfo(np.int16).max:
        raise LatticeError("y is outside any codeword sum")
    keys, order = tab.keys()
    want = tab.key_of(yr)
    pos = np.searchsorted(keys, want)
    if pos >= keys.shape[0] or keys[pos] != want:
        raise LatticeError("no codeword sum matches y")
    return _index_bits(order[pos : pos + 1].astype(np.int64), code.K)[0]


def ml_candidates(code: CodeSet):
    """(S, norm2): float64 candidate sums in lexicographic order (first user
    is the most significant bit) and their squared norms."""
    return _table(code).dense()


def decode_ml_batch(code: CodeSet, Y: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    """Exhaustive minimum-distance decode of each row of Y.

    Ties keep the lexicographically smallest candidate. Bounded at
    K <= TABLE_MAX_K.
    """
    S, norm2 = ml_candidates(code)
    Y = np.ascontiguousarray(np.asarray(Y, dtype=np.float64))
    if Y.ndim != 2 or Y.shape[1] != code.L:
        raise ValueError(f"Y must be (batch, {code.L})")
    idx = _backend.impl().ml_argmin_batch(Y, S, norm2, float(amplitude))
    return _index_bits(np.asarray(idx, dtype=np.int64), code.K)


def decode_ml(code: CodeSet, y: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    return decode_ml_batch(code, y, amplitude)[0]


def decode_mf_batch(code: CodeSet, Y: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    """Single-user correlation with the mean of all other users removed:
    bit j is 1 iff c_j . (y - amplitude*C*(1/2 ones)) > 0."""
    Cf = code.bits.astype(np.float64)
    ref = (amplitude / 2.0) * Cf.sum(axis=1)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != code.L:
        raise ValueError(f"Y must be (batch, {code.L})")
    stat = (Y - ref[None, :]) @ Cf
    return (stat > 0.0).astype(np.uint8)


def decode_mf(code: CodeSet, y: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    return decode_mf_batch(code, y, amplitude)[0]
