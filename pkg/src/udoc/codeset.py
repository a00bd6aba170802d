"""Construction, verification and canonicalization of overloaded uniquely
decodable (UD) binary code sets.

An L x K binary matrix C is uniquely decodable when all 2^K subset sums of
its columns are distinct, equivalently when no nonzero d in {0,+1,-1}^K
satisfies C d = 0. Such matrices let K > L users share L chips with exact
separation of the noiseless superposition. The recursive builder here
reaches the largest known binary size K = gamma(L+1), where gamma counts
ones in the binary expansions of 1..L-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "CapabilityError",
    "CodeSet",
    "ConstructionError",
    "ConstructionParams",
    "TransformRecord",
    "build_B",
    "build_C",
    "canonicalize",
    "equivalent",
    "fixture",
    "gamma",
    "kmax_binary",
    "load_matrix",
    "min_distance",
    "params_for",
    "resolve_variant",
    "save_matrix",
    "verify_ud",
]

# exhaustive-search size limits; beyond these the routines refuse rather
# than silently degrade
VERIFY_SUMS_MAX_K = 20
VERIFY_NULL_MAX_K = 24
DISTANCE_MAX_K = 14
EQUIV_MAX_L = 12


class ConstructionError(ValueError):
    """A block variant produced an invalid matrix (duplicate rows or not UD)."""


class CapabilityError(ValueError):
    """Input exceeds the exhaustive-search bound of the routine."""


@dataclass(frozen=True)
class ConstructionParams:
    """Recursion parameters for a constructed code of length L."""

    L: int
    k: int
    r: int
    t: int
    p: Optional[int]  # None on the L = 2^k - 1 branch
    variant: str

    def __post_init__(self):
        if self.r != 2 ** self.k - 1 or self.t != self.k * 2 ** (self.k - 1):
            raise ValueError("inconsistent (k, r, t)")
        if self.p is None:
            if self.L != 2 ** self.k - 1:
                raise ValueError("p=None requires L = 2^k - 1")
        elif not (2 ** self.k <= self.L <= 2 ** (self.k + 1) - 2) or self.p != self.L - 2 ** self.k:
            raise ValueError("p branch requires 2^k <= L <= 2^(k+1) - 2 and p = L - 2^k")


Provenance = Tuple  # ("constructed", params) | ("fixture", name) | ("file", path) | ("matrix",) | ("canonical", base_kind)


@dataclass(frozen=True, eq=False)
class CodeSet:
    """An immutable L x K binary code matrix with optional construction data.

    construction/row_map, when present, let the structured decoders peel the
    code: row i of `bits` (or row i+1 when the first row is a canonical
    all-ones header) is construction row row_map[i].
    """

    bits: np.ndarray
    provenance: Provenance = ("matrix",)
    construction: Optional[ConstructionParams] = None
    row_map: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.bits, dtype=np.uint8))
        if b.ndim != 2 or b.size == 0:
            raise ValueError("bits must be a nonempty 2-D matrix")
        if not np.isin(b, (0, 1)).all():
            raise ValueError("bits entries must be 0 or 1")
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @property
    def L(self) -> int:
        return self.bits.shape[0]

    @property
    def K(self) -> int:
        return self.bits.shape[1]

    @property
    def is_canonical(self) -> bool:
        return bool((self.bits[0] == 1).all())


MatrixLike = Union[CodeSet, np.ndarray, Sequence[Sequence[int]]]


def _as_bits(C: MatrixLike) -> np.ndarray:
    if isinstance(C, CodeSet):
        return C.bits
    b = np.asarray(C)
    if b.ndim != 2:
        raise ValueError("expected a 2-D binary matrix")
    if not np.isin(b, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    return np.ascontiguousarray(b.astype(np.uint8))


def gamma(L: int) -> int:
    """Total popcount of the binary expansions of 1..L-1; gamma(1) = 0."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return sum(i.bit_count() for i in range(1, L))


def kmax_binary(L: int) -> int:
    """Largest binary UD set size for length L: gamma(L+1)."""
    return gamma(L + 1)


def params_for(L: int, variant: str = "") -> ConstructionParams:
    if L < 1:
        raise ValueError("L must be >= 1")
    k = 1
    while not (2 ** k - 1 == L or 2 ** k <= L <= 2 ** (k + 1) - 2):
        k += 1
    p = None if 2 ** k - 1 == L else L - 2 ** k
    return ConstructionParams(L=L, k=k, r=2 ** k - 1, t=k * 2 ** (k - 1), p=p, variant=variant)


# ---------------------------------------------------------------------------
# recursive builder

# The printed block recursion is ambiguous in the middle column of its last
# block row; taken literally it duplicates rows as soon as r = 1. The builder
# therefore carries a short list of candidate variants and resolve_variant()
# picks the first one that survives the gates: distinct rows at every level,
# UD output, and equivalence to the published 4x5 / 8x13 reference matrices.
_VARIANT_ORDER = ("printed", "z4", "mirror")
_resolved_variant: Optional[str] = None


def _step(B: np.ndarray, variant: str) -> np.ndarray:
    t, r = B.shape
    Z_t1 = np.zeros((t, 1), np.uint8)
    J_t1 = np.ones((t, 1), np.uint8)
    I_r = np.eye(r, dtype=np.uint8)
    Z_rr = np.zeros((r, r), np.uint8)
    Z_1r = np.zeros((1, r), np.uint8)
    J_1r = np.ones((1, r), np.uint8)
    one = np.ones((1, 1), np.uint8)
    if variant == "printed":
        rows = [
            np.hstack([B, Z_t1, B]),
            np.hstack([Z_1r, one, J_1r]),
            np.hstack([B, J_t1, 1 - B]),
            np.hstack([Z_rr, np.ones((r, 1), np.uint8), I_r]),
        ]
    elif variant == "z4":
        rows = [
            np.hstack([B, Z_t1, B]),
            np.hstack([Z_1r, one, J_1r]),
            np.hstack([B, J_t1, 1 - B]),
            np.hstack([Z_rr, np.zeros((r, 1), np.uint8), I_r]),
        ]
    elif variant == "mirror":
        rows = [
            np.hstack([B, Z_t1, B]),
            np.hstack([J_1r, one, Z_1r]),
            np.hstack([1 - B, J_t1, B]),
            np.hstack([I_r, np.zeros((r, 1), np.uint8), Z_rr]),
        ]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return np.vstack(rows)


def _check_distinct_rows(B: np.ndarray, variant: str, level: int) -> None:
    seen = {}
    for i, row in enumerate(map(tuple, B)):
        if row in seen:
            raise ConstructionError(
                f"variant {variant!r} duplicates rows {seen[row]} and {i} at level {level}"
            )
        seen[row] = i


def build_B(k: int, variant: Optional[str] = None) -> np.ndarray:
    """Base generator matrix of shape (k 2^(k-1)) x (2^k - 1).

    Every intermediate level is gated on having all-distinct rows; a variant
    that collapses rows raises ConstructionError naming the duplicate pair.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if variant is None:
        variant = resolve_variant()
    B = np.array([[1]], dtype=np.uint8)
    for level in range(2, k + 1):
        B = _step(B, variant)
        _check_distinct_rows(B, variant, level)
    return B


def build_C(L: int, variant: Optional[str] = None, _verify: bool = True) -> CodeSet:
    """Construct the L x gamma(L+1) UD code set.

    For L = 2^k - 1 the result is build_B(k) transposed; otherwise the
    composite block matrix over (B_k, the recursively built C_p, its
    complement, and an identity tail) is assembled and transposed.
    """
    if variant is None:
        variant = resolve_variant()
    P = params_for(L, variant)
    k, r, t, p = P.k, P.r, P.t, P.p
    if p is None:
        M = build_B(k, variant)
    else:
        B = build_B(k, variant)
        g = gamma(p + 1)
        blocks = [
            np.hstack([B, np.zeros((t, 1), np.uint8), B[:, :p]]),
            np.hstack([np.zeros((1, r), np.uint8), np.ones((1, 1), np.uint8), np.ones((1, p), np.uint8)]),
        ]
        if g > 0:
            CpT = build_C(p, variant, _verify=False).bits.T
            blocks.append(
                np.hstack([CpT, np.zeros((g, r - p), np.uint8), np.ones((g, 1), np.uint8), 1 - CpT])
            )
        if p > 0:
            blocks.append(
                np.hstack([np.zeros((p, r + 1), np.uint8), np.eye(p, dtype=np.uint8)])
            )
        M = np.vstack(blocks)
    bits = np.ascontiguousarray(M.T)
    if bits.shape != (L, kmax_binary(L)):
        raise ConstructionError(
            f"variant {variant!r} yields shape {bits.shape}, expected {(L, kmax_binary(L))}"
        )
    if _verify and bits.shape[1] <= VERIFY_SUMS_MAX_K:
        ok, witness = verify_ud(bits)
        if not ok:
            raise ConstructionError(
                f"variant {variant!r} output for L={L} is not UD; null witness {witness.tolist()}"
            )
    return CodeSet(bits, ("constructed", P), construction=P, row_map=tuple(range(L)))


def resolve_variant() -> str:
    """First variant passing distinct-rows, UD, and reference-matrix gates."""
    global _resolved_variant
    if _resolved_variant is not None:
        return _resolved_variant
    last_err = None
    for v in _VARIANT_ORDER:
        try:
            for kk in (1, 2, 3):
                build_B(kk, v)
            C4 = build_C(4, v)
            C8 = build_C(8, v)
        except ConstructionError as e:
            last_err = e
            continue
        if equivalent(C4, fixture("fig1")) and equivalent(C8, fixture("fig2")):
            _resolved_variant = v
            return v
    raise ConstructionError(f"no block variant passes the gates (last failure: {last_err})")


# ---------------------------------------------------------------------------
# reference matrices

_FIG1 = np.array(
    [
        [0, 0, 0, 0, 1],
        [1, 1, 0, 1, 0],
        [0, 1, 1, 0, 0],
        [1, 0, 1, 0, 0],
    ],
    dtype=np.uint8,
)

_FIG2 = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        [1, 1, 0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 0],
        [0, 1, 1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0],
        [1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0],
        [1, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0],
        [0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0],
        [1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0],
    ],
    dtype=np.uint8,
)


def fixture(name: str) -> CodeSet:
    """Published reference code sets: "fig1" (4x5) and "fig2" (8x13).

    Both print the construction rows bottom-up, so row_map is reversed.
    """
    if name == "fig1":
        bits, L = _FIG1, 4
    elif name == "fig2":
        bits, L = _FIG2, 8
    else:
        raise ValueError(f"unknown fixture {name!r} (have: fig1, fig2)")
    return CodeSet(
        bits,
        ("fixture", name),
        construction=params_for(L, "reference"),
        row_map=tuple(reversed(range(L))),
    )


# ---------------------------------------------------------------------------
# verification

def _lex_bits(n_rows: int, K: int, offset: int = 0) -> np.ndarray:
    # row i = bits of (offset + i), first column is the most significant bit
    idx = np.arange(offset, offset + n_rows, dtype=np.int64)
    shifts = np.arange(K - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _verify_by_sums(bits: np.ndarray):
    L, K = bits.shape
    xs = _lex_bits(2 ** K, K)
    sums = xs @ bits.T.astype(np.int32)
    order = np.lexsort(sums.T[::-1])
    s_sorted = sums[order]
    dup = np.nonzero((s_sorted[1:] == s_sorted[:-1]).all(axis=1))[0]
    if dup.size == 0:
        return True, None
    i1, i2 = int(order[dup[0]]), int(order[dup[0] + 1])
    d = xs[i1].astype(np.int8) - xs[i2].astype(np.int8)
    return False, d


def _ternary_rows(n_rows: int, K: int, offset: int = 0) -> np.ndarray:
    # row i = balanced ternary digits of (offset + i) over {-1, 0, +1}
    idx = np.arange(offset, offset + n_rows, dtype=np.int64)
    out = np.empty((n_rows, K), dtype=np.int8)
    for j in range(K):
        out[:, K - 1 - j] = (idx % 3) - 1
        idx = idx // 3
    return out


def _verify_by_null(bits: np.ndarray):
    # meet-in-the-middle over d = (d1, d2): C1 d1 = -C2 d2
    L, K = bits.shape
    K1 = K // 2
    C1 = bits[:, :K1].astype(np.int32)
    C2 = bits[:, K1:].astype(np.int32)
    T1 = _ternary_rows(3 ** K1, K1)
    T2 = _ternary_rows(3 ** (K - K1), K - K1)
    S1 = T1.astype(np.int32) @ C1.T
    S2 = -(T2.astype(np.int32) @ C2.T)
    # byte views give a total order good enough for an equality join
    key1 = np.ascontiguousarray(S1).view(f"S{4 * L}").ravel()
    key2 = np.ascontiguousarray(S2).view(f"S{4 * L}").ravel()
    o2 = np.argsort(key2, kind="stable")
    k2s = key2[o2]
    pos = np.searchsorted(k2s, key1)
    zero1 = (3 ** K1 - 1) // 2  # index of the all-zero ternary word
    zero2 = (3 ** (K - K1) - 1) // 2
    for i in np.nonzero((pos < len(k2s)) & (k2s[np.minimum(pos, len(k2s) - 1)] == key1))[0]:
        # scan the run of equal keys for a pairing that is not (0, 0)
        j = pos[i]
        while j < len(k2s) and k2s[j] == key1[i]:
            if not (i == zero1 and int(o2[j]) == zero2):
                d = np.concatenate([T1[i], T2[int(o2[j])]])
                return False, d
            j += 1
    return True, None


def verify_ud(C: MatrixLike, method: str = "auto"):
    """Check unique decodability.

    Returns (True, None) or (False, witness) where witness is a nonzero
    {0,+1,-1} vector with C witness = 0. Two independent routes exist: a
    distinct-sums scan (K <= 20) and a meet-in-the-middle ternary null
    search (K <= 24); "auto" picks by size.
    """
    bits = _as_bits(C)
    K = bits.shape[1]
    if method == "auto":
        method = "sums" if K <= VERIFY_SUMS_MAX_K else "null"
    if method == "sums":
        if K > VERIFY_SUMS_MAX_K:
            raise CapabilityError(
                f"K={K} exceeds the distinct-sums bound ({VERIFY_SUMS_MAX_K}); "
                f"use method='null' (K <= {VERIFY_NULL_MAX_K}) or sampled evidence "
                f"via min_distance(..., method='sample')"
            )
        return _verify_by_sums(bits)
    if method == "null":
        if K > VERIFY_NULL_MAX_K:
            raise CapabilityError(
                f"K={K} exceeds the exhaustive bound ({VERIFY_NULL_MAX_K}); "
                f"use sampled evidence via min_distance(..., method='sample')"
            )
        return _verify_by_null(bits)
    raise ValueError(f"unknown method {method!r}")


def min_distance(C: MatrixLike, method: str = "auto", samples: int = 200000, seed: int = 0):
    """Minimum L1 distance between distinct noiseless outputs.

    Equals min over nonzero d in {0,+1,-1}^K of ||C d||_1. Returns
    (value, (x_i, x_j)) where the pair of inputs realizes the minimum:
    x_i - x_j = d. Exhaustive for K <= 14. method="sample" draws random
    ternary vectors and returns an upper bound; method="fast" uses the
    weight-1-column shortcut valid for UD sets.
    """
    bits = _as_bits(C)
    L, K = bits.shape

    def pair_for(d):
        xi = (d > 0).astype(np.uint8)
        xj = (d < 0).astype(np.uint8)
        return xi, xj

    if method == "auto":
        if K <= DISTANCE_MAX_K:
            method = "exhaustive"
        else:
            col_w = bits.sum(axis=0)
            if (col_w == 1).any() and K <= VERIFY_NULL_MAX_K and verify_ud(bits)[0]:
                method = "fast"
            else:
                raise CapabilityError(
                    f"K={K} exceeds the exhaustive bound ({DISTANCE_MAX_K}) and no "
                    f"shortcut applies; pass method='sample' for a stochastic upper bound"
                )

    if method == "fast":
        col_w = bits.sum(axis=0)
        ones = np.nonzero(col_w == 1)[0]
        if ones.size == 0:
            raise ValueError("fast path needs a weight-1 column")
        ok, witness = (True, None) if K > VERIFY_NULL_MAX_K else verify_ud(bits)
        if not ok:
            d = witness.astype(np.int8)
            return 0, pair_for(d)
        # UD rules out distance 0, and flipping the weight-1 user moves
        # exactly one chip by one
        d = np.zeros(K, np.int8)
        d[ones[0]] = 1
        return 1, pair_for(d)

    if method == "exhaustive":
        if K > DISTANCE_MAX_K:
            raise CapabilityError(f"K={K} exceeds the exhaustive bound ({DISTANCE_MAX_K})")
        total = 3 ** K
        zero_idx = (total - 1) // 2
        best = None
        best_d = None
        chunk = 1 << 18
        Ct = bits.T.astype(np.int32)
        for off in range(0, total, chunk):
            T = _ternary_rows(min(chunk, total - off), K, offset=off)
            norms = np.abs(T.astype(np.int32) @ Ct).sum(axis=1)
            if off <= zero_idx < off + len(norms):
                norms[zero_idx - off] = np.iinfo(np.int32).max
            i = int(np.argmin(norms))
            if best is None or norms[i] < best:
                best = int(norms[i])
                best_d = T[i].copy()
        return best, pair_for(best_d)

    if method == "sample":
        rng = np.random.Generator(np.random.Philox(key=seed))
        best = None
        best_d = None
        chunk = 4096
        Ct = bits.T.astype(np.int32)
        drawn = 0
        while drawn < samples:
            n = min(chunk, samples - drawn)
            T = rng.integers(-1, 2, size=(n, K), dtype=np.int8)
            nz = np.abs(T).sum(axis=1) > 0
            T = T[nz]
            if len(T):
                norms = np.abs(T.astype(np.int32) @ Ct).sum(axis=1)
                i = int(np.argmin(norms))
                if best is None or norms[i] < best:
                    best = int(norms[i])
                    best_d = T[i].copy()
            drawn += n
        return best, pair_for(best_d)

    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# canonical form

@dataclass(frozen=True)
class TransformRecord:
    """Row/column permutation-and-complement transform, invertible exactly.

    apply() order: complement flagged rows and columns, permute rows, permute
    columns, then (if synthetic) prepend an all-ones row.
    """

    row_perm: Tuple[int, ...]
    col_perm: Tuple[int, ...]
    row_complement: Tuple[bool, ...]
    col_complement: Tuple[bool, ...]
    synthetic: bool = False

    def apply(self, M: MatrixLike) -> np.ndarray:
        b = _as_bits(M).copy()
        b[np.array(self.row_complement, bool), :] ^= 1
        b[:, np.array(self.col_complement, bool)] ^= 1
        b = b[list(self.row_perm)][:, list(self.col_perm)]
        if self.synthetic:
            b = np.vstack([np.ones((1, b.shape[1]), np.uint8), b])
        return b

    def invert(self, M: MatrixLike) -> np.ndarray:
        b = _as_bits(M)
        if self.synthetic:
            b = b[1:]
        rp = np.argsort(np.array(self.row_perm))
        cp = np.argsort(np.array(self.col_perm))
        b = b[rp][:, cp].copy()
        b[np.array(self.row_complement, bool), :] ^= 1
        b[:, np.array(self.col_complement, bool)] ^= 1
        return b


def _identity_record(L: int, K: int, synthetic: bool = False) -> TransformRecord:
    return TransformRecord(
        row_perm=tuple(range(L)),
        col_perm=tuple(range(K)),
        row_complement=(False,) * L,
        col_complement=(False,) * K,
        synthetic=synthetic,
    )


def canonicalize(C: MatrixLike):
    """Equivalent UD code set whose first row is all ones, plus the transform.

    Tries, in order: moving an existing all-ones row to the front (UD is
    preserved by permutation), complementing an all-zeros row, and the 2L
    column-complement patterns that force some row to all ones (these two
    must re-verify UD). When none survives, prepends a synthetic all-ones
    row, which always preserves UD since any null vector of the extended
    matrix is a null vector of the original.
    """
    code = C if isinstance(C, CodeSet) else CodeSet(_as_bits(C))
    bits = code.bits
    L, K = bits.shape

    def front_perm(i):
        order = [i] + [j for j in range(L) if j != i]
        return tuple(order)

    ones_rows = np.nonzero((bits == 1).all(axis=1))[0]
    if ones_rows.size:
        i = int(ones_rows[0])
        if i == 0:
            return code, _identity_record(L, K)
        rec = TransformRecord(
            row_perm=front_perm(i),
            col_perm=tuple(range(K)),
            row_complement=(False,) * L,
            col_complement=(False,) * K,
        )
        return CodeSet(rec.apply(bits), ("canonical", code.provenance[0])), rec

    can_reverify = K <= VERIFY_SUMS_MAX_K
    if can_reverify:
        zero_rows = np.nonzero((bits == 0).all(axis=1))[0]
        for i in map(int, zero_rows):
            flags = tuple(j == i for j in range(L))
            rec = TransformRecord(front_perm(i), tuple(range(K)), flags, (False,) * K)
            out = rec.apply(bits)
            if verify_ud(out)[0]:
                return CodeSet(out, ("canonical", code.provenance[0])), rec
        for i in range(L):
            colflags = tuple(bool(bits[i, j] == 0) for j in range(K))
            if not any(colflags):
                continue
            rec = TransformRecord(front_perm(i), tuple(range(K)), (False,) * L, colflags)
            out = rec.apply(bits)
            if verify_ud(out)[0]:
                return CodeSet(out, ("canonical", code.provenance[0])), rec

    rec = _identity_record(L, K, synthetic=True)
    out = CodeSet(
        rec.apply(bits),
        ("canonical", code.provenance[0]),
        construction=code.construction,
        row_map=code.row_map,
    )
    return out, rec


# ---------------------------------------------------------------------------
# equivalence up to permutations and complements

def equivalent(C1: MatrixLike, C2: MatrixLike) -> bool:
    """True when row/column permutations plus row/column complements map C1
    onto C2. Backtracks over row assignments, pruning on the multiset of
    column-prefix complement classes (a column prefix and its complement are
    interchangeable because a column flag can absorb the difference)."""
    A = _as_bits(C1)
    B = _as_bits(C2)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    L, K = A.shape
    if L > EQUIV_MAX_L:
        raise CapabilityError(f"L={L} exceeds the equivalence-search bound ({EQUIV_MAX_L})")

    def classes(prefixes, depth):
        mask = (1 << depth) - 1
        comp = prefixes ^ mask
        return np.minimum(prefixes, comp)

    # target class multisets per depth, from B's column prefixes
    Bcols = np.zeros(K, dtype=np.int64)
    targets = []
    for d in range(L):
        Bcols = (Bcols << 1) | B[d].astype(np.int64)
        targets.append(np.sort(classes(Bcols, d + 1)).tobytes())

    Arows = [A[i].astype(np.int64) for i in range(L)]
    seen = set()

    def bt(depth, used, acc):
        if depth == L:
            return True
        for rho in range(L):
            if used & (1 << rho):
                continue
            for flip in (0, 1):
                nxt = (acc << 1) | (Arows[rho] ^ flip)
                cls = np.sort(classes(nxt, depth + 1))
                if cls.tobytes() != targets[depth]:
                    continue
                key = (used | (1 << rho), nxt.tobytes())
                if key in seen:
                    continue
                seen.add(key)
                if bt(depth + 1, used | (1 << rho), nxt):
                    return True
        return False

    return bt(0, 0, np.zeros(K, dtype=np.int64))


# ---------------------------------------------------------------------------
# matrix files: first line "L K", then L rows of K space-separated 0/1

def dumps_matrix(C: MatrixLike) -> str:
    bits = _as_bits(C)
    L, K = bits.shape
    lines = [f"{L} {K}"]
    lines += [" ".join(str(int(v)) for v in row) for row in bits]
    return "\n".join(lines) + "\n"


def save_matrix(path, C: MatrixLike) -> None:
    with open(path, "w") as f:
        f.write(dumps_matrix(C))


def loads_matrix(text: str, origin: str = "<string>") -> CodeSet:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError(f"{origin}: missing 'L K' header")
    try:
        L, K = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise ValueError(f"{origin}: malformed 'L K' header") from None
    body = tokens[2:]
    if L < 1 or K < 1 or len(body) != L * K:
        raise ValueError(f"{origin}: expected {L}x{K} entries, found {len(body)}")
    try:
        flat = np.array([int(v) for v in body], dtype=np.int64)
    except ValueError:
        raise ValueError(f"{origin}: non-integer matrix entry") from None
    if not np.isin(flat, (0, 1)).all():
        raise ValueError(f"{origin}: matrix entries must be 0 or 1")
    return CodeSet(flat.reshape(L, K), ("file", origin))


def load_matrix(path) -> CodeSet:
    with open(path) as f:
        return loads_matrix(f.read(), str(path))
