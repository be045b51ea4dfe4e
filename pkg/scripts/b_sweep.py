"""p-values against the number of bootstrap iterations B (mean +- sd over trials).

    python3 scripts/b_sweep.py --human h.csv --candidate c.csv --group-size 19 --out runs/sweep
"""

import argparse

from alphasub.cli import RunConfig, run_evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--human", required=True)
    ap.add_argument("--candidate", required=True)
    ap.add_argument("--scale", default="interval")
    ap.add_argument("--group-size", type=int, required=True)
    ap.add_argument("--min-items", type=int, default=1)
    ap.add_argument("--sweep", default="50,100,150,200,250,300,350,400,450,500")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    sweep = [int(b) for b in args.sweep.split(",")]
    cfg = RunConfig(
        human=args.human, candidate=args.candidate, scale=args.scale, group_size=args.group_size,
        min_items=args.min_items, B=sweep[-1], B_sweep=sweep, trials=args.trials, seed=args.seed,
        workers=args.workers, out=args.out,
    )
    cfg.validate()
    report, _ = run_evaluate(cfg)
    print(f"{'B':>5s} {'p1 mean':>10s} {'p1 sd':>10s} {'p2 mean':>10s} {'p2 sd':>10s}")
    for row in report["b_sweep"]:
        print(f"{row['B']:5d} {row['p1']['mean']:10.4g} {row['p1']['sd']:10.4g} {row['p2']['mean']:10.4g} {row['p2']['sd']:10.4g}")
    print(f"per-trial rows in {args.out}/b_sweep.csv")


if __name__ == "__main__":
    main()
