"""Overloaded uniquely decodable binary spreading codes.

Construction of L x gamma(L+1) code sets, unique-decodability verification,
encoding, four decoders (exact peeling, fast constraint-propagation,
exhaustive ML, matched filter), and a deterministic parallel BER harness.
"""

from .channel import (
    ChannelConfig,
    add_awgn,
    bipolar_to_antipodal,
    encode_bipolar,
    encode_ook,
    snr_to_sigma,
)
from .codeset import (
    CapabilityError,
    CodeSet,
    ConstructionError,
    ConstructionParams,
    TransformRecord,
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
from .decoders import (
    DecodeResult,
    FdaDecoder,
    FdaState,
    LatticeError,
    backend_name,
    decode_fda,
    decode_lookup,
    decode_mf,
    decode_ml,
    decode_nda,
    have_kernels,
    pick_level,
    quantize,
)
from .sim import (
    BerPoint,
    RunReport,
    SimConfig,
    estimate_gap,
    run_ber,
    snr_at_ber,
    to_csv,
    to_gnuplot,
    to_json,
    wilson_ci,
)

__version__ = "0.1.0"

__all__ = [
    "BerPoint",
    "CapabilityError",
    "ChannelConfig",
    "CodeSet",
    "ConstructionError",
    "ConstructionParams",
    "DecodeResult",
    "FdaDecoder",
    "FdaState",
    "LatticeError",
    "RunReport",
    "SimConfig",
    "TransformRecord",
    "add_awgn",
    "backend_name",
    "bipolar_to_antipodal",
    "build_B",
    "build_C",
    "canonicalize",
    "decode_fda",
    "decode_lookup",
    "decode_mf",
    "decode_ml",
    "decode_nda",
    "dumps_matrix",
    "encode_bipolar",
    "encode_ook",
    "equivalent",
    "estimate_gap",
    "fixture",
    "gamma",
    "have_kernels",
    "kmax_binary",
    "load_matrix",
    "loads_matrix",
    "min_distance",
    "params_for",
    "pick_level",
    "quantize",
    "run_ber",
    "save_matrix",
    "snr_at_ber",
    "snr_to_sigma",
    "to_csv",
    "to_gnuplot",
    "to_json",
    "verify_ud",
    "wilson_ci",
]
