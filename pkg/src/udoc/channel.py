"""Synchronous multiuser transmission model: OOK/bipolar encoding and AWGN.

The received vector is y = A C x + n with n i.i.d. Gaussian per chip. Noise
is drawn from a counter-based generator keyed on (seed, trialIndex), so any
trial's noise can be regenerated independently of execution order; that is
what makes the Monte Carlo harness worker-count invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codeset import MatrixLike, _as_bits

__all__ = [
    "ChannelConfig",
    "add_awgn",
    "bipolar_to_antipodal",
    "encode_bipolar",
    "encode_ook",
    "snr_to_sigma",
]


@dataclass(frozen=True)
class ChannelConfig:
    amplitude: float = 1.0
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def _check_bits(C: np.ndarray, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (C.shape[1],):
        raise ValueError(f"expected {C.shape[1]} user bits, got shape {x.shape}")
    if not np.isin(x, (0, 1)).all():
        raise ValueError("user bits must be 0 or 1")
    return x.astype(np.int64)


def encode_ook(C: MatrixLike, x) -> np.ndarray:
    """Noiseless on-off superposition C x (integer chip counts)."""
    bits = _as_bits(C)
    return bits.astype(np.int64) @ _check_bits(bits, x)


def encode_bipolar(C: MatrixLike, x) -> np.ndarray:
    """Intensity pattern of the antipodal scheme: (C' x' + K 1)/2.

    C' = 2C - J and x' = 2x - 1. The sum C' x' has the parity of K, so the
    result is always integral.
    """
    bits = _as_bits(C)
    xb = _check_bits(bits, x)
    K = bits.shape[1]
    cp = 2 * bits.astype(np.int64) - 1
    return (cp @ (2 * xb - 1) + K) // 2


def bipolar_to_antipodal(y2, K: int) -> np.ndarray:
    """Recenter a bipolar observation: 2 y2 - K recovers C' x'."""
    return 2 * np.asarray(y2) - K


def snr_to_sigma(snr_db: float, A: float = 1.0) -> float:
    """Per-chip noise level for SNR_dB = 10 log10(A^2 / sigma^2)."""
    return A * 10.0 ** (-snr_db / 20.0)


def add_awgn(clean, cfg: ChannelConfig, trial_index: int = 0) -> np.ndarray:
    """A * clean + Gaussian noise, reproducible from (cfg.seed, trial_index)."""
    clean = np.asarray(clean, dtype=np.float64)
    out = cfg.amplitude * clean
    if cfg.sigma == 0.0:
        return out
    rng = np.random.Generator(np.random.Philox(key=_philox_key(cfg.seed, trial_index)))
    return out + rng.normal(0.0, cfg.sigma, size=clean.shape)


def _philox_key(seed: int, stream: int) -> np.ndarray:
    # two of the four 64-bit key words; distinct (seed, stream) pairs give
    # independent streams
    return np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
