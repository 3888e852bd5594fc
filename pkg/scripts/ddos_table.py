"""Detection recall, precision and F1 for several attack counts."""
import argparse

import numpy as np

from ctd.app.datasets import synthetic_traffic
from ctd.app.ddos import DetectionConfig, detection_trial


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--attacks", type=int, nargs="+", default=[1, 3, 5, 7])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.15)
    p.add_argument("--fraction", type=float, default=0.2)
    args = p.parse_args()

    print("attacks\trecall\tprecision\tf1\ttime_agreement")
    for n in args.attacks:
        reports = []
        for seed in range(args.seeds):
            cfg = DetectionConfig(n_attacks=n, fraction=args.fraction, d=args.d, epsilon=args.epsilon, seed=seed)
            reports.append(detection_trial(synthetic_traffic(seed=seed), cfg).report)
        row = [np.mean([getattr(r, k) for r in reports]) for k in ("recall", "precision", "f1", "time_agreement")]
        print(f"{n}\t" + "\t".join(f"{v:.3f}" for v in row))


if __name__ == "__main__":
    main()
