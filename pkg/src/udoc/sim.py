"""Monte Carlo bit-error-rate harness.

Trials are generated in fixed batches of 1024, each batch from its own
counter-keyed generator, so results are bit-identical for any worker count:
parallelism changes who computes a batch, never what the batch contains.
Batches are issued in waves of 8; the stop rule is evaluated only at wave
boundaries, which keeps the trial count worker-independent too. All decoders
at a grid point share the same user bits and the same noise (paired trials).
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import _philox_key, snr_to_sigma
from .codeset import CapabilityError, CodeSet, canonicalize
from .decoders import FdaDecoder, _backend, decode_mf_batch, decode_ml_batch, decode_nda

BATCH = 1024
WAVE = 8
Z95 = 1.959963984540054

KNOWN_DECODERS = ("nda", "fda", "ml", "mf")


@dataclass(frozen=True)
class SimConfig:
    snr_db: tuple = ()
    decoders: tuple = ("fda", "ml", "mf")
    amplitude: float = 1.0
    seed: int = 0
    target_bit_errors: int = 200
    max_trials: int = 2_000_000
    n_c: int = 16
    workers: int = 1


@dataclass
class BerPoint:
    decoder: str
    snr_db: float
    trials: int
    bits: int
    bit_errors: int
    ber: float
    ci95_lo: float
    ci95_hi: float


@dataclass
class RunReport:
    fingerprint: str
    backend: str
    config: SimConfig
    points: list = field(default_factory=list)
    elapsed_s: float = 0.0

    def curve(self, decoder: str):
        """(snr_db, ber) pairs of one decoder, in grid order."""
        return [(p.snr_db, p.ber) for p in self.points if p.decoder == decoder]


def wilson_ci(errors: int, n: int, z: float = Z95):
    """95% score interval for a binomial rate; (0, 1) when n = 0."""
    if n <= 0:
        return 0.0, 1.0
    p = errors / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z * float(np.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))) / denom
    return max(0.0, center - half), min(1.0, center + half)


def fingerprint(code: CodeSet) -> str:
    h = hashlib.sha256()
    h.update(f"{code.L} {code.K}:".encode())
    h.update(code.bits.tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# worker side

_G: dict = {}


def _init_worker(can_code, raw_code, cfg: SimConfig, sigmas):
    _G["can"] = can_code
    _G["raw"] = raw_code
    _G["cfg"] = cfg
    _G["sigmas"] = sigmas
    _G["fda"] = (
        FdaDecoder(can_code, cfg.amplitude, cfg.n_c) if "fda" in cfg.decoders else None
    )


def _draw(seed: int, point: int, batch: int, K: int):
    stream = (point << 20) | batch
    rng = np.random.Generator(np.random.Philox(key=_philox_key(seed, stream)))
    X = rng.integers(0, 2, size=(BATCH, K), dtype=np.uint8)
    return rng, X


def _run_batch(task):
    point, batch = task
    cfg: SimConfig = _G["cfg"]
    can: CodeSet = _G["can"]
    sigma = _G["sigmas"][point]
    A = cfg.amplitude
    rng, X = _draw(cfg.seed, point, batch, can.K)

    counts = {}
    need_can = any(d in cfg.decoders for d in ("fda", "ml", "mf"))
    if need_can:
        clean = X.astype(np.int64) @ can.bits.T.astype(np.int64)
        Y = A * clean.astype(np.float64)
        if sigma > 0.0:
            Y = Y + rng.normal(0.0, sigma, size=Y.shape)
        if "fda" in cfg.decoders:
            dec: FdaDecoder = _G["fda"]
            errs = 0
            for i in range(BATCH):
                errs += int((dec.decode(Y[i]).xhat != X[i]).sum())
            counts["fda"] = errs
        if "ml" in cfg.decoders:
            xh = decode_ml_batch(can, Y, A)
            counts["ml"] = int((xh != X).sum())
        if "mf" in cfg.decoders:
            xh = decode_mf_batch(can, Y, A)
            counts["mf"] = int((xh != X).sum())
    if "nda" in cfg.decoders:
        raw: CodeSet = _G["raw"]
        Yr = X.astype(np.int64) @ raw.bits.T.astype(np.int64)
        errs = 0
        for i in range(BATCH):
            errs += int((decode_nda(raw, Yr[i]) != X[i]).sum())
        counts["nda"] = errs
    return point, counts


# ---------------------------------------------------------------------------
# driver

def _validate(code: CodeSet, cfg: SimConfig, sigmas):
    if not cfg.snr_db:
        raise ValueError("empty SNR grid")
    if not cfg.decoders:
        raise ValueError("no decoders selected")
    for d in cfg.decoders:
        if d not in KNOWN_DECODERS:
            raise ValueError(f"unknown decoder {d!r}, expected one of {KNOWN_DECODERS}")
    if len(set(cfg.decoders)) != len(cfg.decoders):
        raise ValueError("duplicate decoder names")
    if "nda" in cfg.decoders and any(s > 0.0 for s in sigmas):
        raise ValueError(
            "nda inverts exact sums only; every grid point must have zero noise"
        )
    if "nda" in cfg.decoders and code.construction is None:
        raise ValueError("nda needs a constructed code")
    if "ml" in cfg.decoders and code.K > 20:
        raise CapabilityError(f"ml enumerates 2^K candidates; K={code.K} exceeds 20")
    if cfg.target_bit_errors < 1:
        raise ValueError("target_bit_errors must be positive")
    if not 1 <= cfg.max_trials <= (1 << 20) * BATCH:
        raise ValueError(f"max_trials must be in [1, {(1 << 20) * BATCH}]")
    if cfg.amplitude <= 0:
        raise ValueError("amplitude must be positive")
    if cfg.workers < 1:
        raise ValueError("workers must be at least 1")


def run_ber(code: CodeSet, cfg: SimConfig) -> RunReport:
    """Simulate every decoder in cfg over the SNR grid; see module docstring
    for the determinism contract."""
    sigmas = [snr_to_sigma(s, cfg.amplitude) for s in cfg.snr_db]
    _validate(code, cfg, sigmas)
    can_code, _ = canonicalize(code) if any(
        d in cfg.decoders for d in ("fda", "ml", "mf")
    ) else (code, None)

    t0 = time.perf_counter()
    max_waves = max(1, cfg.max_trials // (BATCH * WAVE))
    per_point: list[dict] = []

    def run_point(point: int, submit) -> dict:
        totals = {d: 0 for d in cfg.decoders}
        waves = 0
        while waves < max_waves:
            tasks = [(point, waves * WAVE + i) for i in range(WAVE)]
            for _, counts in submit(tasks):
                for d, e in counts.items():
                    totals[d] += e
            waves += 1
            if all(totals[d] >= cfg.target_bit_errors for d in cfg.decoders):
                break
        return {"totals": totals, "trials": waves * WAVE * BATCH}

    if cfg.workers == 1:
        _init_worker(can_code, code, cfg, sigmas)
        for point in range(len(cfg.snr_db)):
            per_point.append(run_point(point, lambda ts: map(_run_batch, ts)))
    else:
        ctx = multiprocessing.get_context()
        with ctx.Pool(
            cfg.workers, initializer=_init_worker, initargs=(can_code, code, cfg, sigmas)
        ) as pool:
            for point in range(len(cfg.snr_db)):
                per_point.append(
                    run_point(point, lambda ts: pool.map(_run_batch, ts, chunksize=1))
                )

    report = RunReport(
        fingerprint=fingerprint(code),
        backend=_backend.backend_name(),
        config=cfg,
    )
    for d in cfg.decoders:
        for point, snr in enumerate(cfg.snr_db):
            res = per_point[point]
            trials = res["trials"]
            bits = trials * code.K
            errs = res["totals"][d]
            lo, hi = wilson_ci(errs, bits)
            report.points.append(
                BerPoint(d, float(snr), trials, bits, errs, errs / bits, lo, hi)
            )
    report.elapsed_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# output formats

CSV_HEADER = "decoder,snr_db,trials,bits,bit_errors,ber,ci95_lo,ci95_hi"


def to_csv(report: RunReport) -> str:
    lines = [CSV_HEADER]
    for p in report.points:
        lines.append(
            f"{p.decoder},{p.snr_db!r},{p.trials},{p.bits},{p.bit_errors},"
            f"{p.ber!r},{p.ci95_lo!r},{p.ci95_hi!r}"
        )
    return "\n".join(lines) + "\n"


def to_json(report: RunReport) -> str:
    doc = {
        "fingerprint": report.fingerprint,
        "backend": report.backend,
        "config": asdict(report.config),
        "points": [asdict(p) for p in report.points],
        "elapsed_s": report.elapsed_s,
    }
    return json.dumps(doc, indent=2) + "\n"


def to_gnuplot(report: RunReport) -> str:
    blocks = []
    for d in report.config.decoders:
        rows = [f"# decoder: {d}"]
        rows += [f"{p.snr_db!r} {p.ber!r}" for p in report.points if p.decoder == d]
        blocks.append("\n".join(rows))
    return "\n\n\n".join(blocks) + "\n"


def parse_csv(text: str) -> dict:
    """CSV text back into {decoder: [(snr_db, ber), ...]} in file order."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized CSV header")
    curves: dict = {}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 8:
            raise ValueError(f"malformed CSV row: {ln!r}")
        curves.setdefault(parts[0], []).append((float(parts[1]), float(parts[5])))
    return curves


# ---------------------------------------------------------------------------
# gap estimation

def snr_at_ber(curve: Sequence, target: float, name: str = "curve") -> float:
    """SNR where the curve crosses the target BER, by log-linear
    interpolation between the first bracketing pair of grid points. A grid
    point hitting the target exactly short-circuits; pairs with a zero BER
    cannot be interpolated on a log scale and are skipped."""
    if target <= 0:
        raise ValueError("target BER must be positive")
    pts = sorted((float(s), float(b)) for s, b in curve)
    for s, b in pts:
        if b == target:
            return s
    for (s1, b1), (s2, b2) in zip(pts, pts[1:]):
        if b1 <= 0.0 or b2 <= 0.0:
            continue
        if (b1 - target) * (b2 - target) < 0:
            l1, l2, lt = np.log10(b1), np.log10(b2), np.log10(target)
            return s1 + (s2 - s1) * (l1 - lt) / (l1 - l2)
    raise ValueError(
        f"curve {name!r} does not cross BER {target:g} within the sampled SNR range"
    )


def estimate_gap(curve_a, curve_b, target: float = 1e-3,
                 name_a: str = "a", name_b: str = "b") -> float:
    """SNR penalty of curve_a relative to curve_b at the target BER (dB)."""
    return snr_at_ber(curve_a, target, name_a) - snr_at_ber(curve_b, target, name_b)
