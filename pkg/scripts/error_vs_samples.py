"""Median relative error of a static decomposition across sample sizes."""
import argparse

import numpy as np

from ctd import ctd_s, memory_usage, relative_error
from ctd.app.datasets import haggle_like


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 50, 100, 500, 1000])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--mode", type=int, default=1, help="1-based")
    p.add_argument("--data-seed", type=int, default=0)
    args = p.parse_args()

    X = haggle_like(args.data_seed)
    print("samples\tmedian_error\tmedian_memory_usage\tmedian_kept_fibers")
    for s in args.sizes:
        runs = [ctd_s(X, args.mode - 1, s, seed=seed) for seed in range(args.seeds)]
        err = np.median([relative_error(X, f) for f in runs])
        mem = np.median([memory_usage(X, f) for f in runs])
        kept = np.median([f.rank for f in runs])
        print(f"{s}\t{err:.6g}\t{mem:.6g}\t{kept:g}")


if __name__ == "__main__":
    main()
