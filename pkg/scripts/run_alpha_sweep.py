#!/usr/bin/env python3
"""Threshold-factor sweep with paired shuffle-on/off arms.

Reproduces the comparative experiment: without shuffling, SKDR and the
maximum run lengths fall as the threshold factor grows; with shuffling they
stay flat and low.  Writes the standard sweep CSV.
"""
import argparse

from chirpkey import ExperimentConfig, run_sweep
from chirpkey.pipeline import rows_to_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--master-seed", type=int, default=1)
    ap.add_argument("--values", default="0.1,0.3,0.5,0.7,0.9")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = ExperimentConfig(
        trials=args.trials,
        master_seed=args.master_seed,
        sweep_axis="alpha",
        sweep_values=tuple(float(v) for v in args.values.split(",")),
    )
    csv_text = rows_to_csv(run_sweep(cfg))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        print(csv_text, end="")


if __name__ == "__main__":
    main()
