"""Command line front end.

Every subcommand writes machine-readable results to stdout and diagnostics
to stderr. Exit codes: 0 success, 1 usage error, 2 verification or decoding
failure, 3 I/O failure. The seed is taken from --seed, else a JSON config,
else the UDOC_SEED environment variable, else 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .codeset import (
    CapabilityError,
    CodeSet,
    build_C,
    canonicalize,
    dumps_matrix,
    fixture,
    gamma,
    loads_matrix,
    min_distance,
    verify_ud,
)
from .channel import encode_ook
from .decoders import decode_fda, decode_mf, decode_ml, decode_nda
from .sim import SimConfig, estimate_gap, parse_csv, run_ber, to_csv

CONSTRUCT_MAX_L = 64


class CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code
        self.message = message


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as f:
        return f.read()


def _load_code(path: str) -> CodeSet:
    return loads_matrix(_read_text(path), "<stdin>" if path == "-" else path)


def _write_out(text: str, out) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _parse_reals(s: str) -> np.ndarray:
    try:
        vals = [float(t) for t in s.split(",") if t.strip() != ""]
    except ValueError:
        raise CliError(1, f"expected comma-separated numbers, got {s!r}") from None
    if not vals:
        raise CliError(1, "empty vector")
    return np.array(vals, dtype=np.float64)


def _parse_bits(s: str) -> np.ndarray:
    s = s.strip().replace(",", "")
    if not s or any(c not in "01" for c in s):
        raise CliError(1, f"expected a 0/1 string, got {s!r}")
    return np.array([int(c) for c in s], dtype=np.uint8)


def _bitstring(x) -> str:
    return "".join(str(int(v)) for v in x)


def _recognize(code: CodeSet) -> CodeSet:
    """Attach construction metadata when the matrix equals a constructed
    code, a reference code, or the canonical form of either."""
    L, K = code.L, code.K

    def candidates():
        if L <= CONSTRUCT_MAX_L and K == gamma(L + 1):
            yield lambda: build_C(L)
        if L == 4:
            yield lambda: fixture("fig1")
        if L == 8:
            yield lambda: fixture("fig2")
        if L >= 2 and K == gamma(L) and L - 1 <= CONSTRUCT_MAX_L:
            yield lambda: canonicalize(build_C(L - 1))[0]
            if L - 1 == 4:
                yield lambda: canonicalize(fixture("fig1"))[0]
            if L - 1 == 8:
                yield lambda: canonicalize(fixture("fig2"))[0]

    for make in candidates():
        try:
            other = make()
        except ValueError:
            continue
        if other.bits.shape == code.bits.shape and np.array_equal(other.bits, code.bits):
            return other
    return code


def _resolve_seed(args, config: dict | None) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    if config and "seed" in config:
        return int(config["seed"])
    env = os.environ.get("UDOC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(1, f"UDOC_SEED must be an integer, got {env!r}") from None
    return 0


def _grid(start, stop, step) -> tuple:
    if start is None or stop is None:
        raise CliError(1, "--snr-start and --snr-stop are required")
    if step is None:
        step = 1.0
    if step <= 0:
        raise CliError(1, "--snr-step must be positive")
    if stop < start:
        raise CliError(1, "--snr-stop must be >= --snr-start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def _pick_code(args) -> CodeSet:
    length = getattr(args, "length", None)
    fix = getattr(args, "fixture", None)
    if (length is None) == (fix is None):
        raise CliError(1, "exactly one of --length and --fixture is required")
    if length is not None:
        if not 1 <= length <= CONSTRUCT_MAX_L:
            raise CliError(1, f"--length must be in 1..{CONSTRUCT_MAX_L}")
        return build_C(length)
    try:
        return fixture(fix)
    except ValueError as e:
        raise CliError(1, str(e)) from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_construct(args) -> int:
    if not 1 <= args.length <= CONSTRUCT_MAX_L:
        raise CliError(1, f"--length must be in 1..{CONSTRUCT_MAX_L}")
    code = build_C(args.length)
    _write_out(dumps_matrix(code), args.out)
    return 0


def cmd_verify(args) -> int:
    code = _load_code(args.infile)
    ok, witness = verify_ud(code)
    if ok:
        print("UD")
        return 0
    print("NOT-UD " + ",".join(str(int(v)) for v in witness))
    return 2


def cmd_distance(args) -> int:
    code = _load_code(args.infile)
    d, (xi, xj) = min_distance(code)
    print(f"{d} {_bitstring(xi)} {_bitstring(xj)}")
    return 0


def cmd_encode(args) -> int:
    code = _load_code(args.infile)
    x = _parse_bits(args.bits)
    if x.shape[0] != code.K:
        raise CliError(2, f"matrix has {code.K} users, got {x.shape[0]} bits")
    y = encode_ook(code, x)
    print(",".join(str(int(v)) for v in y))
    return 0


def cmd_decode(args) -> int:
    code = _load_code(args.infile)
    y = _parse_reals(args.y)
    if y.shape[0] != code.L:
        raise CliError(2, f"matrix has {code.L} chips, y has {y.shape[0]}")
    if args.decoder == "nda":
        code = _recognize(code)
        if code.construction is None:
            raise CliError(
                2, "matrix does not match any recognized construction; nda needs one"
            )
        x = decode_nda(code, y)
        print(f"{_bitstring(x)} exact")
        return 0
    if args.decoder == "fda":
        code = _recognize(code)
        if not code.is_canonical:
            raise CliError(2, "fda needs a canonical matrix (all-ones first row)")
        res = decode_fda(code, y, amplitude=args.amplitude, n_c=args.nc)
        print(f"{_bitstring(res.xhat)} {res.describe()}")
        return 0 if res.ok else 2
    if args.decoder == "ml":
        x = decode_ml(code, y, amplitude=args.amplitude)
    else:
        x = decode_mf(code, y, amplitude=args.amplitude)
    print(f"{_bitstring(x)} ok")
    return 0


def _merge_config(args, allowed) -> dict | None:
    if not getattr(args, "config", None):
        return None
    try:
        cfg = json.loads(_read_text(args.config))
    except json.JSONDecodeError as e:
        raise CliError(2, f"{args.config}: invalid JSON ({e})") from None
    if not isinstance(cfg, dict):
        raise CliError(2, f"{args.config}: expected a JSON object")
    for key, val in cfg.items():
        name = key.replace("-", "_")
        if name == "seed":
            continue
        if name not in allowed:
            raise CliError(1, f"unknown config key {key!r}")
        setattr(args, name, val)
    return cfg


_BER_KEYS = (
    "length", "fixture", "snr_start", "snr_stop", "snr_step", "decoders",
    "target_errors", "max_trials", "nc", "workers", "out",
)


def cmd_ber(args) -> int:
    config = _merge_config(args, _BER_KEYS)
    code = _pick_code(args)
    decs = args.decoders
    if isinstance(decs, str):
        decs = tuple(d.strip() for d in decs.split(",") if d.strip())
    cfg = SimConfig(
        snr_db=_grid(args.snr_start, args.snr_stop, args.snr_step),
        decoders=tuple(decs),
        amplitude=args.amplitude,
        seed=_resolve_seed(args, config),
        target_bit_errors=args.target_errors,
        max_trials=args.max_trials,
        n_c=args.nc,
        workers=args.workers,
    )
    try:
        report = run_ber(code, cfg)
    except ValueError as e:
        raise CliError(1, str(e)) from None
    _write_out(to_csv(report), args.out)
    if args.out:
        print(
            f"wrote {args.out}: {len(report.points)} rows, backend={report.backend}, "
            f"{report.elapsed_s:.1f}s",
            file=sys.stderr,
        )
    return 0


def cmd_gap(args) -> int:
    curves_a = parse_csv(_read_text(args.csv_a))
    curves_b = parse_csv(_read_text(args.csv_b))
    if args.decoder_a not in curves_a:
        raise CliError(2, f"no {args.decoder_a!r} rows in {args.csv_a}")
    if args.decoder_b not in curves_b:
        raise CliError(2, f"no {args.decoder_b!r} rows in {args.csv_b}")
    g = estimate_gap(
        curves_a[args.decoder_a], curves_b[args.decoder_b],
        args.target_ber, args.decoder_a, args.decoder_b,
    )
    print(repr(float(g)))
    return 0


def cmd_reproduce(args) -> int:
    fix = "fig1" if args.figure == 3 else "fig2"
    default_stop = 19.0 if args.figure == 3 else 18.0
    start = args.snr_start if args.snr_start is not None else 12.0
    stop = args.snr_stop if args.snr_stop is not None else default_stop
    step = args.snr_step if args.snr_step is not None else 1.0
    code = fixture(fix)
    cfg = SimConfig(
        snr_db=_grid(start, stop, step),
        decoders=("fda", "ml", "mf"),
        amplitude=1.0,
        seed=_resolve_seed(args, None),
        target_bit_errors=args.target_errors,
        max_trials=args.max_trials,
        n_c=args.nc,
        workers=args.workers,
    )
    try:
        report = run_ber(code, cfg)
    except ValueError as e:
        raise CliError(1, str(e)) from None
    out = args.out or f"fig{args.figure}.csv"
    _write_out(to_csv(report), out)
    print(
        f"wrote {out}: {len(report.points)} rows, backend={report.backend}, "
        f"{report.elapsed_s:.1f}s",
        file=sys.stderr,
    )
    try:
        g = repr(float(estimate_gap(report.curve("fda"), report.curve("ml"),
                                    args.target_ber, "fda", "ml")))
    except ValueError as e:
        print(f"gap not measurable: {e}", file=sys.stderr)
        g = "nan"
    print(g)
    return 0


# ---------------------------------------------------------------------------
# parser

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="udoc",
        description="Overloaded uniquely decodable code sets: construct, "
        "verify, encode, decode, and simulate.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="emit the L x gamma(L+1) matrix")
    c.add_argument("--length", type=int, required=True, metavar="L")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("verify", help="check unique decodability")
    c.add_argument("--in", dest="infile", default="-", metavar="FILE")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("distance", help="minimum distance and witness pair")
    c.add_argument("--in", dest="infile", default="-", metavar="FILE")
    c.set_defaults(func=cmd_distance)

    c = sub.add_parser("encode", help="superpose user bits into chip counts")
    c.add_argument("--in", dest="infile", default="-", metavar="FILE")
    c.add_argument("--bits", required=True, help="K-character 0/1 string")
    c.set_defaults(func=cmd_encode)

    c = sub.add_parser("decode", help="recover user bits from an observation")
    c.add_argument("--in", dest="infile", default="-", metavar="FILE")
    c.add_argument("--y", required=True, help="comma-separated chip values")
    c.add_argument("--decoder", choices=("nda", "fda", "ml", "mf"), default="nda")
    c.add_argument("--amplitude", type=float, default=1.0)
    c.add_argument("--nc", type=int, default=16, help="fda retry budget")
    c.set_defaults(func=cmd_decode)

    c = sub.add_parser("ber", help="Monte Carlo BER sweep, CSV out")
    c.add_argument("--config", default=None, help="JSON config; overrides flags except --seed")
    c.add_argument("--length", type=int, default=None)
    c.add_argument("--fixture", choices=("fig1", "fig2"), default=None)
    c.add_argument("--snr-start", type=float, default=None)
    c.add_argument("--snr-stop", type=float, default=None)
    c.add_argument("--snr-step", type=float, default=None)
    c.add_argument("--decoders", default="fda,ml,mf")
    c.add_argument("--amplitude", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--target-errors", type=int, default=200)
    c.add_argument("--max-trials", type=int, default=2_000_000)
    c.add_argument("--nc", type=int, default=16)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_ber)

    c = sub.add_parser("gap", help="SNR gap between two CSV curves at a target BER")
    c.add_argument("csv_a")
    c.add_argument("csv_b")
    c.add_argument("--decoder-a", default="fda")
    c.add_argument("--decoder-b", default="ml")
    c.add_argument("--target-ber", type=float, default=1e-3)
    c.set_defaults(func=cmd_gap)

    c = sub.add_parser("reproduce", help="run a reference figure end to end")
    c.add_argument("--figure", type=int, choices=(3, 4), required=True)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--workers", type=int, default=min(8, os.cpu_count() or 1))
    c.add_argument("--snr-start", type=float, default=None)
    c.add_argument("--snr-stop", type=float, default=None)
    c.add_argument("--snr-step", type=float, default=None)
    c.add_argument("--target-errors", type=int, default=200)
    c.add_argument("--max-trials", type=int, default=2_000_000)
    c.add_argument("--nc", type=int, default=16)
    c.add_argument("--target-ber", type=float, default=1e-3)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_reproduce)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return int(args.func(args) or 0)
    except CliError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
