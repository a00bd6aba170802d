"""Decoders for superposed code observations.

decode_nda inverts exact integer superpositions of constructed codes by
peeling. decode_fda is the fast noisy decoder (canonical codes). decode_ml
scans all 2^K candidates, decode_lookup matches exact sums against a table,
and decode_mf is the single-user matched-filter baseline.
"""

from ._backend import backend_name, have_kernels, impl
from .fda import DecodeResult, FdaDecoder, FdaState, decode_fda
from .nda import LatticeError, decode_nda, solve_constructed
from .pure import pick_level, quantize
from .simple import decode_lookup, decode_mf, decode_mf_batch, decode_ml, decode_ml_batch

__all__ = [
    "DecodeResult",
    "FdaDecoder",
    "FdaState",
    "LatticeError",
    "backend_name",
    "decode_fda",
    "decode_lookup",
    "decode_mf",
    "decode_mf_batch",
    "decode_ml",
    "decode_ml_batch",
    "decode_nda",
    "have_kernels",
    "impl",
    "pick_level",
    "quantize",
    "solve_constructed",
]
