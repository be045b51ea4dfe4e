"""Mean |alpha change| against group size on a synthetic pool, with its L-method elbow.

    python3 scripts/group_size_elbow.py --population 40 --out runs/elbow
"""

import argparse
from pathlib import Path

import numpy as np

from alphasub.design import group_size_curve, l_method_elbow
from alphasub.synth import annotate, generate_task, make_population, population_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--population", type=int, default=40)
    ap.add_argument("--items", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    task = generate_task(args.items, 8, 5, seed=args.seed)
    pop = make_population(task, args.population + 1, weight_sd=0.5, noise_sd=1.5, seed=args.seed)
    m = population_matrix(task, pop[:-1])
    cand = annotate(task, pop[-1])
    sizes = list(range(2, args.population + 1))
    curve = group_size_curve(m, sizes, cand, seed=args.seed, repeats=args.repeats)
    res = l_method_elbow(curve)
    ys = np.array([y for _, y in curve])
    r = np.corrcoef(ys, 1 / np.array(sizes))[0, 1]
    for x, y in curve:
        print(f"{x:4d} {y:.5f}{'  <- elbow' if x == res.elbow_x else ''}")
    print(f"elbow at group size {res.elbow_x:g}; correlation with 1/i = {r:.3f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "curve.csv").write_text("x,y\n" + "".join(f"{x},{y}\n" for x, y in curve))


if __name__ == "__main__":
    main()
