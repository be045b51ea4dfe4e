"""Monte Carlo pass rates for same-distribution and orthogonal candidates.

This is how the synthetic design behind acceptance criterion 6 was picked.
Seeds start at 1000 so they never overlap the acceptance seeds 0..9.

    python3 scripts/same_distribution_mc.py --group 60 --weight-sd 0.5 --noise-sd 1.5 --seeds 60
"""

import argparse
import time
import warnings

import numpy as np

from alphasub.equivalence import DegenerateMarginWarning
from alphasub.model import GroupAssignment
from alphasub.pipeline import run_trial
from alphasub.synth import CueModelAnnotator, annotate, generate_task, make_population, orthogonal_to, population_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--group", type=int, default=60)
    ap.add_argument("--weight-sd", type=float, default=0.5)
    ap.add_argument("--noise-sd", type=float, default=1.5)
    ap.add_argument("--items", type=int, default=200)
    ap.add_argument("--B", type=int, default=2000)
    ap.add_argument("--N", type=int, default=80)
    ap.add_argument("--fraction", type=float, default=0.5)
    ap.add_argument("--seeds", type=int, default=60)
    ap.add_argument("--first-seed", type=int, default=1000)
    args = ap.parse_args()
    warnings.simplefilter("ignore", DegenerateMarginWarning)

    same = orth = 0
    start = time.time()
    for s in range(args.first_seed, args.first_seed + args.seeds):
        task = generate_task(args.items, 8, 5, seed=s)
        pop = make_population(task, 2 * args.group + 1, weight_sd=args.weight_sd, noise_sd=args.noise_sd, seed=s)
        m = population_matrix(task, pop[:-1])
        groups = GroupAssignment(m.annotators[: args.group], m.annotators[args.group :])
        cand = annotate(task, pop[-1])
        ortho = annotate(task, CueModelAnnotator(orthogonal_to(np.ones(8), s), args.noise_sd, 0, 10_000 + s, "orth"))
        kw = dict(B=args.B, N=args.N, fraction=args.fraction, sig_level=0.05, seed=s)
        same += run_trial(m, groups, cand, **kw).candidate.outcome.equivalent
        orth += run_trial(m, groups, ortho, **kw).candidate.outcome.equivalent
    n = args.seeds
    print(f"same-distribution pass rate {same / n:.2f}; orthogonal pass rate {orth / n:.2f} "
          f"({n} seeds, {(time.time() - start) / n:.2f}s per seed)")


if __name__ == "__main__":
    main()
