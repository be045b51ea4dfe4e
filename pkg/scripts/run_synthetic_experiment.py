"""Substitution test on a synthetic pool, printed as a mean +- sd table.

    python3 scripts/run_synthetic_experiment.py --group 19 --trials 10 --out runs/synth
"""

import argparse
import tempfile
from pathlib import Path

from alphasub.cli import RunConfig, run_evaluate
from alphasub.model import Scale
from alphasub.synth import CueModelAnnotator, annotate, generate_task, make_population, orthogonal_to, population_matrix

import numpy as np


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--items", type=int, default=100)
    ap.add_argument("--group", type=int, default=19, help="annotators per group")
    ap.add_argument("--weight-sd", type=float, default=0.5)
    ap.add_argument("--noise-sd", type=float, default=1.5)
    ap.add_argument("--candidate", choices=["same", "orthogonal"], default="same")
    ap.add_argument("--B", type=int, default=300)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--fraction", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    task = generate_task(args.items, 8, 5, seed=args.seed)
    pop = make_population(task, 2 * args.group + 1, weight_sd=args.weight_sd, noise_sd=args.noise_sd, seed=args.seed)
    m = population_matrix(task, pop[:-1], scale=Scale.INTERVAL)
    extra = pop[-1]
    if args.candidate == "orthogonal":
        extra = CueModelAnnotator(orthogonal_to(np.ones(8), args.seed), args.noise_sd, 0.0, extra.seed, "orth")
    cand = annotate(task, extra)

    out = Path(args.out or tempfile.mkdtemp(prefix="alphasub-"))
    out.mkdir(parents=True, exist_ok=True)
    (out / "human.csv").write_text(m.to_long_format())
    (out / "candidate.csv").write_text(cand.to_long_format())
    cfg = RunConfig(
        human=str(out / "human.csv"), candidate=str(out / "candidate.csv"), scale="interval",
        group_a=list(m.annotators[: args.group]), group_b=list(m.annotators[args.group :]),
        B=args.B, trials=args.trials, fraction=args.fraction, seed=args.seed, control=True, out=str(out),
    )
    cfg.validate()
    report, _ = run_evaluate(cfg)
    agg = report["aggregate"]

    def fmt(col):
        return f"{agg[col]['mean']:.3f} +- {agg[col]['sd']:.3f}"

    print(f"{'':12s}{'human alpha':>20s}{'candidate':>20s}{'random':>20s}")
    print(f"{'alpha':12s}{fmt('human_alpha'):>20s}{fmt('substituted_alpha'):>20s}{fmt('random_alpha'):>20s}")
    print(f"{'p1':12s}{'':>20s}{fmt('p1'):>20s}{fmt('random_p1'):>20s}")
    print(f"{'p2':12s}{'':>20s}{fmt('p2'):>20s}{fmt('random_p2'):>20s}")
    print(f"verdict: candidate {agg['verdict']} (p = {agg['headline_p']:.4f}); random {agg['random_verdict']}")
    print(f"files in {out}")


if __name__ == "__main__":
    main()
