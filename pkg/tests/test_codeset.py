import numpy as np
import pytest

from udoc.codeset import (
    CapabilityError,
    CodeSet,
    ConstructionError,
    build_B,
    build_C,
    canonicalize,
    dumps_matrix,
    equivalent,
    fixture,
    gamma,
    kmax_binary,
    load_matrix,
    loads_matrix,
    min_distance,
    params_for,
    save_matrix,
    verify_ud,
)

# independently recomputed: gamma(L) = sum of popcounts below L
GAMMA_KNOWN = {1: 0, 2: 1, 3: 2, 4: 4, 5: 5, 8: 12, 9: 13, 16: 32, 17: 33}
KMAX_KNOWN = {1: 1, 2: 2, 3: 4, 4: 5, 5: 7, 6: 9, 7: 12, 8: 13, 9: 15, 10: 17, 16: 33}

FIG1_ROWS = [
    [0, 0, 0, 0, 1],
    [1, 1, 0, 1, 0],
    [0, 1, 1, 0, 0],
    [1, 0, 1, 0, 0],
]

FIG2_ROWS = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    [1, 1, 0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 0],
    [0, 1, 1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0],
    [1, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0],
    [0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0],
]


def brute_force_ud(bits: np.ndarray) -> bool:
    # oracle: all 2^K subset sums pairwise distinct
    L, K = bits.shape
    xs = ((np.arange(1 << K)[:, None] >> np.arange(K - 1, -1, -1)) & 1).astype(np.int64)
    sums = xs @ bits.astype(np.int64).T
    return len({tuple(s) for s in sums}) == 1 << K


def test_gamma_known_values():
    for n, g in GAMMA_KNOWN.items():
        assert gamma(n) == g


def test_gamma_is_popcount_prefix_sum():
    for n in range(1, 40):
        assert gamma(n) == sum(bin(i).count("1") for i in range(n))


def test_kmax_binary_known_values():
    for L, k in KMAX_KNOWN.items():
        assert kmax_binary(L) == k
        assert kmax_binary(L) == gamma(L + 1)


def test_params_for_rejects_bad_length():
    with pytest.raises(ValueError):
        params_for(0)
    with pytest.raises(ValueError):
        params_for(-3)


def test_build_B_shapes_and_distinct_rows():
    # B_k is the pre-transpose block matrix: gamma(2^k) x (2^k - 1); its
    # rows become user codewords, so they must be pairwise distinct
    for k in range(1, 5):
        B = build_B(k)
        assert B.shape == (k * 2 ** (k - 1), 2**k - 1)
        assert len({tuple(r) for r in B}) == B.shape[0]


def test_build_C_shapes_L1_to_10():
    for L in range(1, 11):
        code = build_C(L)
        assert code.bits.shape == (L, kmax_binary(L))
        assert code.construction is not None
        assert code.row_map == tuple(range(L))


def test_build_C_is_ud_against_brute_force():
    for L in range(1, 9):
        code = build_C(L)
        assert brute_force_ud(code.bits), f"L={L} not UD"


def test_build_C_large_skips_sum_gate_but_has_shape():
    code = build_C(16)
    assert code.bits.shape == (16, 33)


def test_fixtures_match_frozen_rows():
    assert np.array_equal(fixture("fig1").bits, np.array(FIG1_ROWS, np.uint8))
    assert np.array_equal(fixture("fig2").bits, np.array(FIG2_ROWS, np.uint8))
    with pytest.raises(ValueError):
        fixture("fig9")


def test_fixtures_are_reversed_constructions():
    assert np.array_equal(fixture("fig1").bits, build_C(4).bits[::-1])
    assert np.array_equal(fixture("fig2").bits, build_C(8).bits[::-1])


def test_fixture_row_map_points_at_construction_rows():
    fig = fixture("fig2")
    con = build_C(8)
    for i, src in enumerate(fig.row_map):
        assert np.array_equal(fig.bits[i], con.bits[src])


def test_verify_ud_accepts_constructed_and_fixture_codes():
    for L in range(1, 11):
        ok, witness = verify_ud(build_C(L))
        assert ok and witness is None
    for name in ("fig1", "fig2"):
        ok, _ = verify_ud(fixture(name))
        assert ok


def test_verify_ud_duplicate_columns_witness():
    C = np.array([[1, 1], [0, 0], [1, 1]], np.uint8)
    ok, witness = verify_ud(C)
    assert not ok
    assert witness is not None
    assert set(np.unique(witness)) <= {-1, 0, 1}
    assert witness.any()
    assert not (C.astype(np.int64) @ witness).any()


def test_verify_ud_methods_agree_on_random_matrices():
    rng = np.random.default_rng(11)
    for _ in range(40):
        L = int(rng.integers(2, 5))
        K = int(rng.integers(2, 9))
        C = rng.integers(0, 2, (L, K)).astype(np.uint8)
        ok_s, w_s = verify_ud(C, method="sums")
        ok_n, w_n = verify_ud(C, method="null")
        assert ok_s == ok_n == brute_force_ud(C)
        for w in (w_s, w_n):
            if w is not None:
                assert not (C.astype(np.int64) @ w).any()


def test_verify_ud_capability_bounds():
    wide = np.ones((1, 26), np.uint8)
    with pytest.raises(CapabilityError):
        verify_ud(wide, method="sums")
    with pytest.raises(CapabilityError):
        verify_ud(wide)


def test_min_distance_is_one_with_valid_witness():
    for L in range(1, 9):
        code = build_C(L)
        d, (xi, xj) = min_distance(code)
        assert d == 1
        assert xi.shape == xj.shape == (code.K,)
        assert set(np.unique(xi)) <= {0, 1} and set(np.unique(xj)) <= {0, 1}
        assert not np.array_equal(xi, xj)
        diff = code.bits.astype(np.int64) @ (xi.astype(np.int64) - xj.astype(np.int64))
        assert int(np.abs(diff).sum()) == d


def test_min_distance_exhaustive_matches_fast():
    code = build_C(5)
    d_fast, _ = min_distance(code, method="fast")
    d_ex, pair = min_distance(code, method="exhaustive")
    assert d_fast == d_ex == 1
    xi, xj = pair
    diff = code.bits.astype(np.int64) @ (xi.astype(np.int64) - xj.astype(np.int64))
    assert int(np.abs(diff).sum()) == 1


def test_min_distance_sample_is_upper_bound():
    code = build_C(4)
    d, _ = min_distance(code, method="sample", samples=2000, seed=1)
    assert d >= 1


def test_canonicalize_constructed_code_prepends_ones_row():
    for L in (3, 4, 8):
        code = build_C(L)
        can, rec = canonicalize(code)
        assert can.is_canonical
        assert can.bits.shape == (L + 1, code.K)
        assert rec.synthetic
        assert np.array_equal(can.bits[1:], code.bits)
        assert can.construction == code.construction
        assert can.row_map == code.row_map
        assert brute_force_ud(can.bits)


def test_canonicalize_existing_ones_row_is_permutation():
    C = np.array([[0, 1, 0], [1, 1, 1], [0, 0, 1]], np.uint8)
    can, rec = canonicalize(C)
    assert can.is_canonical
    assert not rec.synthetic
    assert can.bits.shape == (3, 3)
    assert np.array_equal(rec.apply(C), can.bits)
    assert np.array_equal(rec.invert(can.bits), C)


def test_canonicalize_already_canonical_is_identity():
    can, _ = canonicalize(build_C(4))
    again, rec = canonicalize(can)
    assert again.bits is can.bits or np.array_equal(again.bits, can.bits)
    assert not rec.synthetic
    assert rec.row_perm == tuple(range(can.L))


def test_transform_record_round_trip():
    rng = np.random.default_rng(5)
    for L in (3, 4, 8):
        code = build_C(L)
        can, rec = canonicalize(code)
        assert np.array_equal(rec.apply(code.bits), can.bits)
        assert np.array_equal(rec.invert(can.bits), code.bits)


def test_equivalent_under_permutations_and_complements():
    rng = np.random.default_rng(3)
    code = build_C(5)
    bits = code.bits
    rp = rng.permutation(code.L)
    cp = rng.permutation(code.K)
    flip = rng.integers(0, 2, code.K).astype(bool)
    other = bits.copy()
    other[:, flip] ^= 1
    other = other[rp][:, cp]
    assert equivalent(code, CodeSet(other))
    assert equivalent(CodeSet(other), code)


def test_equivalent_rejects_different_codes():
    a = build_C(4)
    tweaked = a.bits.copy()
    tweaked[0, 0] ^= 1
    assert not equivalent(a, CodeSet(tweaked))


def test_equivalent_dimension_mismatch():
    with pytest.raises(ValueError):
        equivalent(build_C(3), build_C(4))


def test_matrix_file_round_trip(tmp_path):
    code = build_C(6)
    path = tmp_path / "c6.txt"
    save_matrix(path, code)
    back = load_matrix(path)
    assert np.array_equal(back.bits, code.bits)
    assert back.provenance[0] == "file"


def test_matrix_text_round_trip():
    code = fixture("fig1")
    assert np.array_equal(loads_matrix(dumps_matrix(code)).bits, code.bits)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2",
        "2 3 1 0 1 1 0",  # short body
        "2 2 1 0 1 2",  # non-binary entry
        "x 2 1 0 1 0",  # bad header
    ],
)
def test_loads_matrix_rejects_malformed(text):
    with pytest.raises(ValueError):
        loads_matrix(text)


def test_variant_duplicate_rows_detected():
    # the first-listed block layout collapses two rows at the k=2 step and
    # must be rejected by the distinct-rows gate
    with pytest.raises(ConstructionError):
        build_B(2, "printed")


def test_codeset_bits_read_only():
    code = build_C(4)
    with pytest.raises(ValueError):
        code.bits[0, 0] = 1
