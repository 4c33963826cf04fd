"""Watch the reproduction distribution of the uniform source collapse onto a few points.

For each grid size K the optimal marginal at the given distortion is
printed as the list of reproduction points carrying mass above a threshold.
"""

import argparse

from rdcba import StopCriterion, solve_rd, uniform_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=float, default=8.0)
    ap.add_argument("--K", type=int, nargs="+", default=[20, 40, 80])
    ap.add_argument("--tol", type=float, default=1e-13)
    ap.add_argument("--threshold", type=float, default=1e-6)
    args = ap.parse_args()
    for K in args.K:
        inst = uniform_instance(K=K)
        rep = solve_rd(inst, args.D, StopCriterion(args.tol))
        keep = rep.final_r > args.threshold
        pts = ", ".join(f"{y:+.2f}:{m:.3f}" for y, m in zip(inst.repro_labels[keep], rep.final_r[keep]))
        print(f"K={K:4d} R={rep.rate:.6f} iters={rep.iterations:7d} support={keep.sum():3d}  [{pts}]", flush=True)


if __name__ == "__main__":
    main()
