"""Recompute the Gaussian/Laplacian R(D) and D(R) tables and the uniform-source table.

Prints computed values next to the reference values and writes one CSV per
table into ``results/``. The uniform table at K=160 takes several minutes;
use ``--max-K`` to stop earlier.
"""

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

from rdcba import StopCriterion, gaussian_instance, laplacian_instance, solve_dr, solve_rd, uniform_instance


@dataclass(frozen=True)
class TableConfig:
    out_dir: Path = Path("results")
    tol: float = 1e-10
    uniform_tol: float = 1e-13
    max_K: int = 40


RD_REFERENCE = {
    "gaussian": [(0.1, 1.1513, 5.0000, 8), (0.3, 0.6020, 1.6667, 16), (0.5, 0.3466, 1.0000, 27),
                 (0.7, 0.1783, 0.7143, 52), (0.9, 0.0527, 0.5556, 164)],
    "laplacian": [(0.1, 2.1530, 7.8059, 43), (0.3, 1.1797, 3.1924, 649), (0.5, 0.6830, 1.9671, 2783),
                  (0.7, 0.3506, 1.4161, 6493), (0.9, 0.1010, 1.1047, 11437)],
}
DR_REFERENCE = {
    "gaussian": [(0.1, 0.8187, 0.6107, 96), (0.3, 0.5488, 0.9111, 34), (0.5, 0.3679, 1.3591, 20),
                 (0.7, 0.2466, 2.0276, 15), (0.9, 0.1653, 3.0248, 11)],
    "laplacian": [(0.1, 0.9009, 1.1036, 11085), (0.5, 0.6019, 1.6421, 3915), (0.9, 0.4006, 2.4338, 1243),
                  (1.3, 0.2644, 3.5822, 396), (1.7, 0.1714, 5.2095, 116)],
}
UNIFORM_REFERENCE = {  # (K, D) -> rate
    (20, 2): 1.0602, (20, 4): 0.7366, (20, 8): 0.4257, (20, 16): 0.1352,
    (40, 2): 1.0590, (40, 4): 0.7363, (40, 8): 0.4244, (40, 16): 0.1352,
    (80, 2): 1.0585, (80, 4): 0.7361, (80, 8): 0.4244, (80, 16): 0.1351,
    (160, 2): 1.0584, (160, 4): 0.7360, (160, 8): 0.4243, (160, 16): 0.1351,
}
SOURCES = {"gaussian": gaussian_instance, "laplacian": laplacian_instance}


def write(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def rd_table(cfg):
    rows = []
    print(f"{'source':10} {'D':>5} {'rate':>9} {'ref':>7} {'lambda':>8} {'ref':>7} {'iters':>6} {'ref':>6}")
    for name, refs in RD_REFERENCE.items():
        inst = SOURCES[name]()
        for D, rate, lam, iters in refs:
            rep = solve_rd(inst, D, StopCriterion(cfg.tol))
            print(f"{name:10} {D:5.1f} {rep.rate:9.5f} {rate:7.4f} {rep.lam:8.4f} {lam:7.4f} {rep.iterations:6d} {iters:6d}")
            rows.append([name, D, rep.rate, rate, rep.lam, lam, rep.iterations, iters, rep.wall_time])
    write(cfg.out_dir / "rd_table.csv",
          ["source", "D", "rate", "ref_rate", "lambda", "ref_lambda", "iterations", "ref_iterations", "time_s"], rows)


def dr_table(cfg):
    rows = []
    print(f"\n{'source':10} {'R':>5} {'D':>9} {'ref':>7} {'lambda':>8} {'ref':>7} {'iters':>6} {'ref':>6}")
    for name, refs in DR_REFERENCE.items():
        inst = SOURCES[name]()
        for R, D, lam, iters in refs:
            rep = solve_dr(inst, R, StopCriterion(cfg.tol))
            print(f"{name:10} {R:5.1f} {rep.distortion:9.5f} {D:7.4f} {rep.lam:8.4f} {lam:7.4f} {rep.iterations:6d} {iters:6d}")
            rows.append([name, R, rep.distortion, D, rep.lam, lam, rep.iterations, iters, rep.wall_time])
    write(cfg.out_dir / "dr_table.csv",
          ["source", "R", "distortion", "ref_distortion", "lambda", "ref_lambda", "iterations", "ref_iterations",
           "time_s"], rows)


def uniform_table(cfg):
    rows = []
    print(f"\n{'K':>4} {'D':>4} {'rate':>9} {'ref':>7} {'support':>7} {'iters':>7}")
    for (K, D), ref in UNIFORM_REFERENCE.items():
        if K > cfg.max_K:
            continue
        rep = solve_rd(uniform_instance(K=K), float(D), StopCriterion(cfg.uniform_tol))
        support = int((rep.final_r > 1e-6).sum())
        print(f"{K:4d} {D:4d} {rep.rate:9.5f} {ref:7.4f} {support:7d} {rep.iterations:7d}", flush=True)
        rows.append([K, D, rep.rate, ref, support, rep.iterations, rep.wall_time])
    write(cfg.out_dir / "uniform_table.csv", ["K", "D", "rate", "ref_rate", "support", "iterations", "time_s"], rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=TableConfig.out_dir)
    ap.add_argument("--max-K", type=int, default=TableConfig.max_K)
    ap.add_argument("--skip-uniform", action="store_true")
    args = ap.parse_args()
    cfg = TableConfig(out_dir=args.out_dir, max_K=args.max_K)
    rd_table(cfg)
    dr_table(cfg)
    if not args.skip_uniform:
        uniform_table(cfg)


if __name__ == "__main__":
    main()
