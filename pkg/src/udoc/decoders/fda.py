"""Fast sequential decoder: quantize chip levels row by row under running
feasibility bounds, propagate the row-sum constraints, and finish either by
full propagation or by peeling the constructed rows; inconsistent rows are
requantized to the next-nearest level under a global retry budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..codeset import CodeSet, _lex_bits, resolve_variant
from . import _backend, pure
from .nda import solve_constructed

N_C_DEFAULT = 16
FALLBACK_MAX_UNKNOWN = 12


@dataclass
class FdaState:
    """Trace of the last quantization pass of one decode (pure backend).

    Per processed row, in processing order: dP holds [remaining ones,
    unresolved users, in-row unresolved, out-of-row unresolved]; m_LR the
    (in-size, out-size, ones-in, ones-out) split of the remaining ones;
    mP the (in-row, out-of-row) unresolved column indices; c_AL the
    (retry counter, level count) pair the quantizer saw; bounds the
    feasible [lo, hi] level range at assignment time.
    """

    n_c: int
    z_rows: list = field(default_factory=list)
    dP: list = field(default_factory=list)
    m_LR: list = field(default_factory=list)
    mP: list = field(default_factory=list)
    c_AL: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    z: Optional[np.ndarray] = None
    m: Optional[np.ndarray] = None
    n: int = 0
    i_d: int = -1
    c_T: int = 0

    def reset(self):
        self.z_rows.clear()
        self.dP.clear()
        self.m_LR.clear()
        self.mP.clear()
        self.c_AL.clear()
        self.bounds.clear()

    def levels_in_bounds(self) -> bool:
        """Every assigned level lies in the range computed for its row."""
        if self.z is None:
            return False
        for r, (lo, hi) in zip(self.z_rows, self.bounds):
            if not lo <= int(self.z[r]) <= hi:
                return False
        return True


@dataclass
class DecodeResult:
    xhat: np.ndarray
    status: str  # exact | resolved-with-corrections | fallback-enumeration | failed
    corrections: int
    rows_reprocessed: int
    state: Optional[FdaState] = None

    @property
    def ok(self) -> bool:
        return self.status != "failed"

    def describe(self) -> str:
        if self.status == "resolved-with-corrections":
            return f"resolved-with-corrections({self.corrections})"
        return self.status


class FdaDecoder:
    """Reusable decoder bound to one canonical code and amplitude."""

    def __init__(self, code: CodeSet, amplitude: float = 1.0, n_c: int = N_C_DEFAULT):
        if not isinstance(code, CodeSet) or not code.is_canonical:
            raise ValueError("decoder needs a canonical code (all-ones first row)")
        if not amplitude > 0:
            raise ValueError(f"amplitude must be positive, got {amplitude}")
        if n_c < 1:
            raise ValueError(f"retry budget must be at least 1, got {n_c}")
        self.code = code
        self.amplitude = float(amplitude)
        self.n_c = int(n_c)
        self.Ct = code.bits
        self.Cf = code.bits.astype(np.int64)
        self.L1, self.K = code.bits.shape
        con = code.construction
        self._peelable = (
            con is not None
            and code.row_map is not None
            and len(code.row_map) == con.L
            and self.L1 == con.L + 1
        )
        if self._peelable:
            self._rm = np.asarray(code.row_map, dtype=np.int64)
        self._variant: Optional[str] = None

    def _peel(self, z: np.ndarray) -> np.ndarray:
        if self._variant is None:
            self._variant = resolve_variant()
        zb = np.zeros(self.L1 - 1, dtype=np.int64)
        zb[self._rm] = z[1:]
        x = solve_constructed(self.L1 - 1, zb, self._variant)
        return np.clip(x, 0, 1).astype(np.uint8)

    def _enumerate_unknowns(self, y, m, unknown) -> np.ndarray:
        known = np.nonzero(m >= 0)[0]
        base = self.Cf[:, known] @ m[known].astype(np.int64)
        xs = _lex_bits(1 << unknown.size, unknown.size, 0)
        sums = base[None, :] + xs.astype(np.int64) @ self.Cf[:, unknown].T
        resid = y[None, :] - self.amplitude * sums
        j = int(np.argmin(np.einsum("ij,ij->i", resid, resid)))
        out = m.copy()
        out[unknown] = xs[j]
        return out.astype(np.uint8)

    def decode(self, y, trace: bool = False) -> DecodeResult:
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if y.shape[0] != self.L1:
            raise ValueError(f"expected {self.L1} chip values, got {y.shape[0]}")
        if not np.isfinite(y).all():
            raise ValueError("observation contains non-finite values")
        u = y / self.amplitude
        cal = np.zeros(self.L1, dtype=np.int64)
        state = FdaState(n_c=self.n_c) if trace else None
        impl = pure if trace else _backend.impl()
        best: Optional[np.ndarray] = None
        best_d = np.inf
        c_T = 0
        last_bad = -1

        def finish(xhat, status):
            if state is not None:
                state.c_T = c_T
                state.i_d = last_bad
            return DecodeResult(xhat, status, c_T, c_T, state)

        while True:
            if state is not None:
                state.reset()
                z, m, bad = pure.fda_pass(self.Ct, u, cal, state)
                state.z = z.copy()
                state.m = m.copy()
                state.n = int(z[0])
            else:
                z, m, bad = impl.fda_pass(self.Ct, u, cal)

            if bad < 0:
                unknown = np.nonzero(m < 0)[0]
                if unknown.size == 0:
                    mhat = m.astype(np.uint8)
                elif self._peelable:
                    mhat = self._peel(z)
                elif unknown.size <= FALLBACK_MAX_UNKNOWN:
                    return finish(
                        self._enumerate_unknowns(y, m, unknown),
                        "fallback-enumeration",
                    )
                else:
                    fill = np.where(m < 0, 0, m).astype(np.uint8)
                    return finish(best if best is not None else fill, "failed")

                resid = y - self.amplitude * (self.Cf @ mhat.astype(np.int64))
                d = float(resid @ resid)
                if d < best_d:
                    best, best_d = mhat, d
                t = z - self.Cf @ mhat.astype(np.int64)
                nz = np.nonzero(t)[0]
                if nz.size == 0:
                    status = "exact" if c_T == 0 else "resolved-with-corrections"
                    return finish(mhat, status)
                bad = int(nz[0])

            last_bad = bad
            c_T += 1
            if c_T >= self.n_c:
                fill = best if best is not None else np.zeros(self.K, dtype=np.uint8)
                return finish(fill, "failed")
            cal[bad] += 1
            if cal[bad] > self.K:
                cal[bad] = 0
                cal[0] += 1


_decoders: dict = {}


def decode_fda(
    code: CodeSet,
    y,
    amplitude: float = 1.0,
    n_c: int = N_C_DEFAULT,
    trace: bool = False,
) -> DecodeResult:
    """One-shot decode; decoder instances are cached per (code, amplitude,
    retry budget)."""
    key = (code.bits.tobytes(), code.construction, code.row_map, float(amplitude), int(n_c))
    dec = _decoders.get(key)
    if dec is None:
        if len(_decoders) >= 8:
            _decoders.pop(next(iter(_decoders)))
        dec = FdaDecoder(code, amplitude, n_c)
        _decoders[key] = dec
    return dec.decode(y, trace=trace)
