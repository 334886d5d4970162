#!/usr/bin/env python3
"""Final accuracy versus device count for the three channel scenarios.

Averages the final-round test accuracy over several seeds for each device
count and writes a wide-format ``accuracy_vs_k.csv``
(columns: k, awgn, fading_perfect_csi, fading_imperfect_csi), ready for
``airvote emit-plots --out <dir>``.
"""

import argparse
import math
import os

import numpy as np

from airvote.harness import RunConfig, run_feel


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--seeds", type=int, default=12)
    parser.add_argument("--rounds", type=int, default=150)
    parser.add_argument("--snr-db", type=float, default=10.0)
    parser.add_argument("--alpha", type=float, default=0.9)
    parser.add_argument("--sigma-delta", type=float, default=0.05)
    parser.add_argument(
        "--devices", type=int, nargs="+", default=[10, 20, 50, 100]
    )
    args = parser.parse_args()

    g_th = -math.log(args.alpha)
    modes = [
        ("awgn", {}),
        ("fading_perfect_csi", {"g_th": g_th}),
        ("fading_imperfect_csi", {"g_th": g_th, "sigma_delta": args.sigma_delta}),
    ]
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "accuracy_vs_k.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k," + ",".join(mode for mode, _ in modes) + "\n")
        for k in args.devices:
            means = []
            for mode, extra in modes:
                finals = []
                for seed in range(args.seeds):
                    cfg = RunConfig(
                        seed=seed,
                        k=k,
                        m=64,
                        n=args.rounds,
                        q=65,
                        snr_db=args.snr_db,
                        mode=mode,
                        landscape="logistic",
                        modulation="qam4",
                        gamma=1.0,
                        **extra,
                    )
                    records, _, _ = run_feel(cfg)
                    finals.append(records[-1].accuracy)
                means.append(float(np.mean(finals)))
            fh.write(f"{k}," + ",".join(format(m, ".17g") for m in means) + "\n")
            print(
                f"K={k}: "
                + "  ".join(f"{mode}={m:.4f}" for (mode, _), m in zip(modes, means))
            )
    print(f"wrote {path}; render with: airvote emit-plots --out {args.out}")


if __name__ == "__main__":
    main()
