#!/usr/bin/env python3
"""Quantizer block-size sweep with paired shuffle-on/off arms.

Without shuffling, larger blocks stretch the maximum runs of 0s and 1s;
with shuffling both stay short.  Writes the standard sweep CSV.
"""
import argparse

from chirpkey import ExperimentConfig, run_sweep
from chirpkey.pipeline import rows_to_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--master-seed", type=int, default=1)
    ap.add_argument("--values", default="16,32,64,128,256")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = ExperimentConfig(
        trials=args.trials,
        master_seed=args.master_seed,
        sweep_axis="block_size",
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
