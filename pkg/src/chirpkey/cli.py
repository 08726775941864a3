"""Command-line interface.

Verbs: ``simulate`` (seeded trials, aggregate CSV), ``sweep`` (paired
shuffle-on/off parameter sweep), ``captures`` (replay recorded IQ files),
``nist`` (randomness suite over an ASCII bit file), ``selftest`` (quick
end-to-end battery).  Flags mirror config-file fields and override them.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import CSV_HEADER, ExperimentConfig, load_config
from .errors import CaptureFormatError, ParameterError, PreambleNotFoundError
from .nist import run_suite
from .pipeline import (
    _aggregate,
    rows_to_csv,
    run_captures,
    run_sweep,
    run_trials,
)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI-style config file")
    p.add_argument("--sf", type=int)
    p.add_argument("--bw", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--preamble-len", type=int)
    p.add_argument("--fc", type=float)
    p.add_argument("--num-taps", type=int)
    p.add_argument("--decay-db", type=float)
    p.add_argument("--rho", type=float, help="reciprocity correlation")
    p.add_argument("--snr-db", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--block-size", type=int)
    p.add_argument("--shuffle", dest="shuffle", action="store_true", default=None)
    p.add_argument("--no-shuffle", dest="shuffle", action="store_false", default=None)
    p.add_argument("--encoding", choices=("plain", "d-gray"))
    p.add_argument("--spread", choices=("std-dev", "variance"))
    p.add_argument("--bin-policy", choices=("all-bins", "occupied-band"))
    p.add_argument("--qber", help="cascade QBER estimate or 'auto'")
    p.add_argument("--num-passes", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--out", help="write CSV here instead of stdout")


def _apply_flags(config: ExperimentConfig, args) -> ExperimentConfig:
    from .channel import ChannelModel, exponential_profile

    lora_kw = {}
    for flag, field_name in (("sf", "sf"), ("bw", "bw"), ("fs", "fs"),
                             ("preamble_len", "preamble_len"), ("fc", "fc")):
        val = getattr(args, flag, None)
        if val is not None:
            lora_kw[field_name] = val
    lora = replace(config.lora, **lora_kw) if lora_kw else config.lora

    channel = config.channel
    if any(getattr(args, f, None) is not None
           for f in ("num_taps", "decay_db", "rho", "snr_db")):
        num_taps = args.num_taps if args.num_taps is not None else channel.num_taps
        decay = args.decay_db if args.decay_db is not None else 3.0
        channel = ChannelModel(
            num_taps=num_taps,
            power_delay_profile=exponential_profile(num_taps, decay),
            reciprocity_rho=args.rho if args.rho is not None else channel.reciprocity_rho,
            snr_db=args.snr_db if args.snr_db is not None else channel.snr_db,
            eavesdropper_independent=channel.eavesdropper_independent,
        )

    quant_kw = {}
    if args.alpha is not None:
        quant_kw["alpha"] = args.alpha
    if args.block_size is not None:
        quant_kw["block_size"] = args.block_size
    if getattr(args, "shuffle", None) is not None:
        quant_kw["shuffle_enabled"] = args.shuffle
    if args.encoding is not None:
        quant_kw["encoding"] = args.encoding
    if args.spread is not None:
        quant_kw["spread"] = args.spread
    quantizer = replace(config.quantizer, **quant_kw) if quant_kw else config.quantizer

    cascade = config.cascade
    cascade_kw = {}
    if args.qber is not None:
        cascade_kw["qber_estimate"] = "auto" if args.qber == "auto" else float(args.qber)
    if args.num_passes is not None:
        cascade_kw["num_passes"] = args.num_passes
    if cascade_kw:
        cascade = replace(cascade, **cascade_kw)

    top_kw = {}
    if args.bin_policy is not None:
        top_kw["bin_policy"] = args.bin_policy
    if args.trials is not None:
        top_kw["trials"] = args.trials
    if args.master_seed is not None:
        top_kw["master_seed"] = args.master_seed
    return replace(config, lora=lora, channel=channel, quantizer=quantizer,
                   cascade=cascade, **top_kw)


def _load(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    return _apply_flags(config, args)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args) -> int:
    config = _load(args)
    results = run_trials(config)
    row = _aggregate(results, "none", 0.0, config.quantizer.shuffle_enabled,
                     config.master_seed)
    _emit(CSV_HEADER + "\n" + row.to_csv() + "\n", args.out)
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    if args.sweep_axis:
        values = tuple(float(tok) for tok in args.sweep_values.split(","))
        config = replace(config, sweep_axis=args.sweep_axis, sweep_values=values)
    if config.sweep_axis is None:
        print("error: no sweep axis configured", file=sys.stderr)
        return 2
    _emit(rows_to_csv(run_sweep(config)), args.out)
    return 0


def _cmd_captures(args) -> int:
    config = _load(args)
    config = replace(config, mode="captures", capture_a2g=args.a2g,
                     capture_g2a=args.g2a, capture_eve=args.eve)
    result = run_captures(config, trial_seed=args.trial_seed)
    lines = [
        f"key_bits={result.metrics.key_bits}",
        f"skdr={result.metrics.skdr:.6f}",
        f"l0={result.metrics.l0}",
        f"l1={result.metrics.l1}",
        f"qber_estimate={result.qber_estimate:.6f}",
        f"cascade_converged={str(result.reconciliation.converged).lower()}",
        f"parity_bits_leaked={result.reconciliation.parity_bits_leaked}",
        f"confirmed={str(result.confirmation.matched).lower()}",
        f"digest_a={result.confirmation.digest_a.hex}",
        f"digest_g={result.confirmation.digest_g.hex}",
    ]
    if result.eve_skdr is not None:
        lines.append(f"eve_skdr={result.eve_skdr:.6f}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_nist(args) -> int:
    with open(args.bits) as fh:
        text = fh.read()
    bits = np.array([int(c) for c in text if c in "01"], dtype=np.uint8)
    if any(c not in "01" and not c.isspace() for c in text):
        print(f"error: {args.bits}: bit files may contain only 0, 1, whitespace",
              file=sys.stderr)
        return 1
    report = run_suite(bits)
    verdict = "pass" if report.overall_pass else (
        "insufficient data" if report.insufficient_data else "fail")
    _emit(report.to_csv() + f"overall,{verdict}\n", args.out)
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return run_selftest()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chirpkey",
        description="Chirp-preamble physical-layer key generation testbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run seeded trials, print aggregate CSV")
    _add_common_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="paired shuffle-on/off parameter sweep")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--sweep-axis", choices=("alpha", "block_size", "snr"))
    p_sweep.add_argument("--sweep-values", help="comma-separated values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cap = sub.add_parser("captures", help="replay recorded IQ captures")
    _add_common_flags(p_cap)
    p_cap.add_argument("--a2g", required=True, help="capture of A's frame received at G")
    p_cap.add_argument("--g2a", required=True, help="capture of G's frame received at A")
    p_cap.add_argument("--eve", help="optional capture of G's frame at the eavesdropper")
    p_cap.add_argument("--trial-seed", type=int, default=0)
    p_cap.set_defaults(func=_cmd_captures)

    p_nist = sub.add_parser("nist", help="randomness suite over an ASCII bit file")
    p_nist.add_argument("--bits", required=True, help="file of 0/1 characters")
    p_nist.add_argument("--out")
    p_nist.set_defaults(func=_cmd_nist)

    p_self = sub.add_parser("selftest", help="quick end-to-end acceptance battery")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, PreambleNotFoundError, CaptureFormatError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
