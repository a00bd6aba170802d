# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled decoder kernels.

fda_pass and ml_argmin_batch mirror the pure backend function for function
and integer output for integer output; pure.py stays the reference. Keep
the comparison order identical when editing, the tie-breaking depends on it.
"""

from libc.math cimport floor

import numpy as np

BACKEND_NAME = "cython"


cdef long long _pick_level(double u, long long lo, long long hi, long long retry):
    # retry-th level in [lo, hi] by distance to u, ties to the larger level;
    # saturates at the worst level. Walks two pointers outward from u, which
    # enumerates levels in the same order as sorting by (|z - u|, -z).
    cdef long long span = hi - lo + 1
    cdef long long take = retry
    if take > span - 1:
        take = span - 1
    if u > <double> hi + 1.0:
        u = <double> hi + 1.0
    elif u < <double> lo - 1.0:
        u = <double> lo - 1.0
    cdef long long a = <long long> floor(u)
    cdef long long b = a + 1
    if a > hi:
        a = hi
        b = hi + 1
    if b < lo:
        b = lo
        a = lo - 1
    cdef long long pick = 0
    cdef long long step
    for step in range(take + 1):
        if a < lo:
            pick = b
            b += 1
        elif b > hi:
            pick = a
            a -= 1
        elif b - u <= u - a:
            pick = b
            b += 1
        else:
            pick = a
            a -= 1
    return pick


cdef long _propagate(const unsigned char[:, ::1] Ct,
                     long long[::1] z, signed char[::1] m,
                     int[::1] user_cell, int[::1] order, int[::1] order2,
                     long long[::1] cnt, long long[::1] csize,
                     long long[::1] cin, long long[::1] clo,
                     long long[::1] chi, long long[::1] pinv,
                     long long[::1] meta, long upto):
    # meta[0] = live cell count, meta[1] = next unused cell id
    cdef long K = user_cell.shape[0]
    cdef long changed = 1
    cdef long rr, i, j
    cdef long long c, S, res1, slo, shi, lo_c, hi_c, nlo, nhi
    cdef long long ncells, nid, any_pin, nn, c1, c0, pc, qc, s1, s0
    while changed:
        changed = 0
        for rr in range(upto + 1):
            ncells = meta[0]
            for i in range(ncells):
                c = order[i]
                csize[c] = 0
                cin[c] = 0
            res1 = 0
            for j in range(K):
                if m[j] == 1 and Ct[rr, j]:
                    res1 += 1
                c = user_cell[j]
                if c >= 0:
                    csize[c] += 1
                    cin[c] += Ct[rr, j]
            S = z[rr] - res1
            slo = 0
            shi = 0
            for i in range(ncells):
                c = order[i]
                lo_c = cnt[c] - (csize[c] - cin[c])
                if lo_c < 0:
                    lo_c = 0
                hi_c = cnt[c]
                if cin[c] < hi_c:
                    hi_c = cin[c]
                clo[c] = lo_c
                chi[c] = hi_c
                slo += lo_c
                shi += hi_c
            if S < slo or S > shi:
                return rr
            any_pin = 0
            for i in range(ncells):
                c = order[i]
                nlo = S - (shi - chi[c])
                if nlo < clo[c]:
                    nlo = clo[c]
                nhi = S - (slo - clo[c])
                if nhi > chi[c]:
                    nhi = chi[c]
                pinv[c] = -1
                if nlo == nhi and cin[c] > 0 and csize[c] - cin[c] > 0:
                    pinv[c] = nlo
                    any_pin = 1
            if any_pin:
                nid = meta[1]
                nn = 0
                for i in range(ncells):
                    c = order[i]
                    if pinv[c] < 0:
                        order2[nn] = <int> c
                        nn += 1
                        continue
                    pc = pinv[c]
                    s1 = cin[c]
                    qc = cnt[c] - pc
                    s0 = csize[c] - s1
                    c1 = -1
                    c0 = -1
                    if 0 < pc < s1:
                        c1 = nid
                        cnt[c1] = pc
                        order2[nn] = <int> c1
                        nn += 1
                        nid += 1
                    if 0 < qc < s0:
                        c0 = nid
                        cnt[c0] = qc
                        order2[nn] = <int> c0
                        nn += 1
                        nid += 1
                    for j in range(K):
                        if user_cell[j] != c:
                            continue
                        if Ct[rr, j]:
                            if c1 >= 0:
                                user_cell[j] = <int> c1
                            else:
                                user_cell[j] = -1
                                m[j] = 1 if pc == s1 else 0
                        else:
                            if c0 >= 0:
                                user_cell[j] = <int> c0
                            else:
                                user_cell[j] = -1
                                m[j] = 1 if qc == s0 else 0
                for i in range(nn):
                    order[i] = order2[i]
                meta[0] = nn
                meta[1] = nid
                changed = 1
    return -1


def fda_pass(const unsigned char[:, ::1] Ct, const double[::1] u,
             const long long[::1] cal, trace=None):
    """One quantization pass; see pure.fda_pass for the contract. trace is
    accepted for signature parity and ignored."""
    cdef long L1 = Ct.shape[0]
    cdef long K = Ct.shape[1]
    z_arr = np.zeros(L1, dtype=np.int64)
    m_arr = np.full(K, -1, dtype=np.int8)
    cdef long long[::1] z = z_arr
    cdef signed char[::1] m = m_arr
    cdef long long n = _pick_level(u[0], 0, K, cal[0])
    cdef long r, j
    cdef long long s
    z[0] = n
    if n == 0 or n == K:
        for j in range(K):
            m[j] = 1 if n == K else 0
        for r in range(1, L1):
            s = 0
            if n == K:
                for j in range(K):
                    s += Ct[r, j]
            z[r] = s
        return z_arr, m_arr, -1

    cdef long cap = 4 * K + 8
    user_cell_arr = np.zeros(K, dtype=np.int32)
    order_arr = np.zeros(cap, dtype=np.int32)
    order2_arr = np.zeros(cap, dtype=np.int32)
    scratch = np.zeros((6, cap), dtype=np.int64)
    meta_arr = np.zeros(2, dtype=np.int64)
    cdef int[::1] user_cell = user_cell_arr
    cdef int[::1] order = order_arr
    cdef int[::1] order2 = order2_arr
    cdef long long[:, ::1] sc = scratch
    cdef long long[::1] meta = meta_arr
    cnt = scratch[0]
    cdef long long[::1] cntv = cnt
    cntv[0] = n
    order[0] = 0
    meta[0] = 1
    meta[1] = 1

    cdef long long res1, a_min, a_max, c, lo_c, hi_c
    cdef long bad, i
    for r in range(1, L1):
        res1 = 0
        for j in range(K):
            if m[j] == 1 and Ct[r, j]:
                res1 += 1
        # per-cell tallies for this row
        for i in range(meta[0]):
            c = order[i]
            sc[1, c] = 0
            sc[2, c] = 0
        for j in range(K):
            c = user_cell[j]
            if c >= 0:
                sc[1, c] += 1
                sc[2, c] += Ct[r, j]
        a_min = res1
        a_max = res1
        for i in range(meta[0]):
            c = order[i]
            lo_c = cntv[c] - (sc[1, c] - sc[2, c])
            if lo_c < 0:
                lo_c = 0
            hi_c = cntv[c]
            if sc[2, c] < hi_c:
                hi_c = sc[2, c]
            a_min += lo_c
            a_max += hi_c
        z[r] = _pick_level(u[r], a_min, a_max, cal[r])
        bad = _propagate(Ct, z, m, user_cell, order, order2,
                         sc[0], sc[1], sc[2], sc[3], sc[4], sc[5],
                         meta, r)
        if bad >= 0:
            return z_arr, m_arr, bad
    return z_arr, m_arr, -1


def ml_argmin_batch(const double[:, ::1] Y, const double[:, ::1] S,
                    const double[::1] norm2, double amplitude):
    """Index of the closest scaled candidate sum per row of Y; same distance
    form as the pure backend, strict < keeps the first (lex-smallest) tie."""
    cdef long B = Y.shape[0]
    cdef long N = S.shape[0]
    cdef long L = Y.shape[1]
    out_arr = np.empty(B, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef double a2 = amplitude * amplitude
    cdef double twoa = 2.0 * amplitude
    cdef double best, d, dot
    cdef long i, jj, l
    cdef long long bi
    for i in range(B):
        bi = 0
        best = 0.0
        for jj in range(N):
            dot = 0.0
            for l in range(L):
                dot += Y[i, l] * S[jj, l]
            d = a2 * norm2[jj] - twoa * dot
            if jj == 0 or d < best:
                best = d
                bi = jj
        out[i] = bi
    return out_arr
