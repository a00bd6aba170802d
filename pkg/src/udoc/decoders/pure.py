"""Pure NumPy/Python decoder backend.

Reference implementations of the two hot kernels: the constraint-propagation
quantization pass used by the fast decoder, and the exhaustive ML distance
scan. The compiled backend mirrors both signatures and produces identical
integer outputs; backend selection happens in _backend.py.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def quantize(v: float, lo: int, hi: int) -> int:
    """Nearest integer to v with halves rounding up, clamped to [lo, hi]."""
    if lo > hi:
        raise ValueError(f"empty quantizer range [{lo}, {hi}]")
    z = int(np.floor(v + 0.5))
    return max(lo, min(hi, z))


def pick_level(u: float, lo: int, hi: int, retry: int) -> int:
    """The retry-th candidate level in [lo, hi], ordered by distance to u
    with ties to the larger level.

    retry=0 reproduces quantize(); larger values walk outward to the
    next-nearest levels and saturate at the worst one. u must be finite and
    is conditioned into [lo-1, hi+1] first, so far-out observations order
    the levels monotonically from the nearest end.
    """
    span = hi - lo + 1
    if span <= 0:
        raise ValueError(f"empty level range [{lo}, {hi}]")
    u = min(max(u, lo - 1.0), hi + 1.0)
    levels = sorted(range(lo, hi + 1), key=lambda z: (abs(z - u), -z))
    return levels[min(retry, span - 1)]


def fda_pass(Ct, u, cal, trace=None):
    """One full quantization pass over the rows of a canonical code.

    Ct: (L1, K) uint8 matrix whose first row is all ones. u: the observation
    scaled by 1/amplitude. cal: per-row integer retry counters that select
    quantizer levels (0 = nearest).

    Returns (z, m, bad): the integer level chosen per row, the ternary user
    assignment (-1 = unknown), and the index of the row whose constraint
    became infeasible (-1 if the pass completed cleanly).

    State is a partition of the unresolved users into cells, each carrying
    the exact number of ones among its members. Processing a row bounds the
    row's feasible level from the cells, quantizes u there, then re-tightens
    all processed rows to a fixpoint; a cell whose in-row allocation pins to
    a boundary splits, and subcells forced to all-zeros or all-ones resolve
    their members.

    trace, when given, is filled with per-row partition records (see
    FdaState); only this backend records them.
    """
    L1, K = Ct.shape
    z = np.zeros(L1, dtype=np.int64)
    m = np.full(K, -1, dtype=np.int8)

    n = pick_level(float(u[0]), 0, K, int(cal[0]))
    z[0] = n
    if trace is not None:
        _trace_row(trace, 0, n, int(cal[0]), 0, K, [(list(range(K)), n)], Ct)
    if n == 0 or n == K:
        m[:] = 0 if n == 0 else 1
        z[1:] = Ct[1:].astype(np.int64) @ m.astype(np.int64)
        return z, m, -1

    cells = [(list(range(K)), n)]

    def propagate(upto):
        nonlocal cells
        changed = True
        while changed:
            changed = False
            for rr in range(upto + 1):
                o = Ct[rr]
                res1 = sum(1 for j in range(K) if m[j] == 1 and o[j])
                S = int(z[rr]) - res1
                parts = []
                for mem, cnt in cells:
                    m1 = [j for j in mem if o[j]]
                    m0 = [j for j in mem if not o[j]]
                    lo = max(0, cnt - len(m0))
                    hi = min(cnt, len(m1))
                    parts.append((mem, m1, m0, cnt, lo, hi))
                slo = sum(p[4] for p in parts)
                shi = sum(p[5] for p in parts)
                if not slo <= S <= shi:
                    return rr
                newcells = []
                any_pin = False
                for mem, m1, m0, cnt, lo, hi in parts:
                    nlo = max(lo, S - (shi - hi))
                    nhi = min(hi, S - (slo - lo))
                    if nlo == nhi and m1 and m0:
                        any_pin = True
                        for pm, pc in ((m1, nlo), (m0, cnt - nlo)):
                            if pc == 0:
                                for j in pm:
                                    m[j] = 0
                            elif pc == len(pm):
                                for j in pm:
                                    m[j] = 1
                            else:
                                newcells.append((pm, pc))
                    else:
                        newcells.append((mem, cnt))
                if any_pin:
                    cells = newcells
                    changed = True
        return -1

    for r in range(1, L1):
        o = Ct[r]
        res1 = sum(1 for j in range(K) if m[j] == 1 and o[j])
        a_min = res1
        a_max = res1
        for mem, cnt in cells:
            in_row = sum(1 for j in mem if o[j])
            a_min += max(0, cnt - (len(mem) - in_row))
            a_max += min(cnt, in_row)
        z[r] = pick_level(float(u[r]), a_min, a_max, int(cal[r]))
        if trace is not None:
            _trace_row(trace, r, int(z[r]), int(cal[r]), a_min, a_max, cells, Ct, res1)
        bad = propagate(r)
        if bad >= 0:
            return z, m, bad

    return z, m, -1


def _trace_row(trace, r, zr, cal_r, a_min, a_max, cells, Ct, res1=0):
    # partition snapshot at assignment time
    o = Ct[r]
    unresolved = [j for mem, _ in cells for j in mem]
    n_rem = sum(cnt for _, cnt in cells)
    in_idx = [j for j in unresolved if o[j]]
    out_idx = [j for j in unresolved if not o[j]]
    n_l = zr - res1
    trace.z_rows.append(r)
    trace.dP.append([n_rem, len(unresolved), len(in_idx), len(out_idx)])
    trace.m_LR.append((len(in_idx), len(out_idx), n_l, n_rem - n_l))
    trace.mP.append((in_idx, out_idx))
    trace.c_AL.append((cal_r, a_max - a_min + 1))
    trace.bounds.append((a_min, a_max))


def ml_argmin_batch(Y, S, norm2, amplitude):
    """Index of the closest scaled codeword sum per observation row.

    Y: (B, L1) float64 observations. S: (N, L1) float64 unscaled candidate
    sums, norm2 their squared row norms. Minimizes
    amplitude^2*norm2[j] - 2*amplitude*(y . S[j]), which orders candidates
    identically to ||y - amplitude*S[j]||^2; ties keep the first (lowest)
    index.
    """
    a2 = amplitude * amplitude
    d = a2 * norm2[None, :] - (2.0 * amplitude) * (Y @ S.T)
    return np.argmin(d, axis=1).astype(np.int64)
