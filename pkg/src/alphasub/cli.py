"""Command-line front end: evaluate, plan, elbow, alpha, synth, fetch.

Settings come from built-in defaults, then an optional INI config file,
then command-line flags (flags win).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .alpha import AlphaUndefined, krippendorff_alpha
from .bootstrap import default_sample_size, make_schedule
from .design import group_size_curve, l_method_elbow, predict_alpha_change, sample_size
from .model import DataError, GroupAssignment, Scale, filter_dataset, load_long_format
from .pipeline import CONTROL_SEED_OFFSET, mean_sd, run_trial, run_trials
from .substitution import CandidateAnnotations, random_candidate, substitute

log = logging.getLogger("alphasub")

EXIT_EQUIVALENT, EXIT_NOT_EQUIVALENT, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    """Bad flags or configuration (exit code 2)."""


class StageError(Exception):
    """A data problem tagged with the pipeline stage it came from (exit code 3)."""

    def __init__(self, stage: str, err: Exception):
        super().__init__(f"[{stage}] {err}")
        self.stage = stage


# -- configuration -------------------------------------------------------------

# (section, key, type); keys double as RunConfig field names
CONFIG_KEYS = {
    "human": ("data", str),
    "candidate": ("data", str),
    "candidate_tag": ("data", str),
    "scale": ("data", str),
    "alphabet": ("data", "list"),
    "group_a": ("groups", "list"),
    "group_b": ("groups", "list"),
    "group_size": ("groups", int),
    "min_items": ("groups", int),
    "min_coders": ("groups", int),
    "max_items": ("groups", int),
    "B": ("bootstrap", int),
    "N": ("bootstrap", str),
    "trials": ("bootstrap", int),
    "seed": ("bootstrap", int),
    "workers": ("bootstrap", int),
    "B_sweep": ("bootstrap", "intlist"),
    "fraction": ("equivalence", float),
    "sig_level": ("equivalence", float),
    "control": ("control", bool),
    "control_mode": ("control", str),
    "out": ("output", str),
}


@dataclass
class RunConfig:
    human: str | None = None
    candidate: str | None = None
    candidate_tag: str | None = None
    scale: str = "interval"
    alphabet: list[str] | None = None
    group_a: list[str] | None = None
    group_b: list[str] | None = None
    group_size: int | None = None
    min_items: int = 1
    min_coders: int = 2
    max_items: int | None = None
    B: int = 300
    N: str = "auto"
    trials: int = 10
    seed: int = 0
    workers: int = 1
    B_sweep: list[int] | None = None
    fraction: float = 0.5
    sig_level: float = 0.05
    control: bool = False
    control_mode: str = "uniform"
    out: str = "alphasub-out"

    def sample_size_for(self, n_items: int) -> int:
        if self.N == "auto":
            return default_sample_size(n_items)
        return int(self.N)

    def validate(self) -> None:
        if self.human is None or self.candidate is None:
            raise UsageError("evaluate needs --human and --candidate (flag or [data] section)")
        try:
            Scale.parse(self.scale)
        except ValueError as err:
            raise UsageError(str(err)) from None
        for name in ("B", "trials", "workers", "min_items", "min_coders"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.N != "auto":
            try:
                if int(self.N) < 1:
                    raise ValueError
            except ValueError:
                raise UsageError(f"N must be a positive integer or 'auto', got {self.N!r}") from None
        if not 0 < self.fraction <= 1:
            raise UsageError("fraction must lie in (0, 1]")
        if not 0 < self.sig_level < 1:
            raise UsageError("sig_level must lie in (0, 1)")
        if self.control_mode not in ("uniform", "empirical"):
            raise UsageError("control_mode must be 'uniform' or 'empirical'")
        if self.B_sweep is not None and any(b < 1 for b in self.B_sweep):
            raise UsageError("B_sweep entries must be positive")
        explicit = self.group_a is not None or self.group_b is not None
        if explicit and (self.group_a is None or self.group_b is None):
            raise UsageError("give both group_a and group_b, or neither")
        if not explicit and self.group_size is None:
            raise UsageError("give group_a/group_b or a group_size for automatic filtering")


def _convert(kind, raw: str):
    raw = raw.strip()
    if kind == "list":
        return [x.strip() for x in raw.split(",") if x.strip()]
    if kind == "intlist":
        return [int(x) for x in raw.split(",") if x.strip()]
    if kind is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return kind(raw)


def read_config(path: str | Path) -> dict:
    """Flatten a sectioned INI file into RunConfig field values."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep B and N upper case
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as err:
        raise UsageError(f"cannot read config {path}: {err}") from None
    known = {(sec, key) for key, (sec, _) in CONFIG_KEYS.items()}
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if (section, key) not in known:
                raise UsageError(f"unknown config key [{section}] {key}")
            try:
                values[key] = _convert(CONFIG_KEYS[key][1], raw)
            except ValueError as err:
                raise UsageError(f"config [{section}] {key}: {err}") from None
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# -- evaluate --------------------------------------------------------------------


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DataError, OSError) as err:
        raise StageError(name, err) from err


def _load_inputs(cfg: RunConfig):
    scale = Scale.parse(cfg.scale)
    with open(cfg.human, "rb") as fh:
        raw = load_long_format(fh, scale, cfg.alphabet)
    with open(cfg.candidate, "rb") as fh:
        candidate = CandidateAnnotations.from_long_format(fh, cfg.candidate_tag)
    return raw, candidate


def _select_groups(cfg: RunConfig, raw):
    if cfg.group_a is not None:
        groups = GroupAssignment(tuple(cfg.group_a), tuple(cfg.group_b))
        matrix = raw.restrict_annotators(groups.group_a + groups.group_b)
        return matrix, groups, False
    matrix, groups = filter_dataset(raw, cfg.group_size, cfg.min_items, cfg.min_coders, cfg.max_items)
    return matrix, groups, True


TRIAL_COLUMNS = (
    "trial", "seed", "margin", "human_alpha", "substituted_alpha", "p1", "p2", "p_value", "verdict",
    "random_alpha", "random_p1", "random_p2", "random_verdict",
)
NUMERIC_COLUMNS = ("margin", "human_alpha", "substituted_alpha", "p1", "p2", "p_value", "random_alpha", "random_p1", "random_p2")


def trial_record(t: int, result) -> dict:
    out = result.candidate.outcome
    rec = {
        "trial": t,
        "seed": result.seed,
        "margin": result.margin,
        "human_alpha": out.x2,
        "substituted_alpha": out.x1,
        "p1": out.p1,
        "p2": out.p2,
        "p_value": out.p_value,
        "verdict": "equivalent" if out.equivalent else "not equivalent",
        "random_alpha": None,
        "random_p1": None,
        "random_p2": None,
        "random_verdict": None,
        "skipped_iterations": result.candidate.skipped,
        "warnings": list(result.warnings),
    }
    if result.control is not None:
        ctl = result.control.outcome
        rec.update(
            random_alpha=ctl.x1,
            random_p1=ctl.p1,
            random_p2=ctl.p2,
            random_verdict="equivalent" if ctl.equivalent else "not equivalent",
        )
    return rec


def aggregate(records: Sequence[dict], sig_level: float) -> dict:
    """Mean and sd of every numeric column, plus the overall verdict.

    The verdict uses the mean one-sided p-values across trials; the headline
    p is max(mean p1, mean p2).
    """
    agg: dict = {}
    for col in NUMERIC_COLUMNS:
        vals = [r[col] for r in records if r[col] is not None]
        if vals:
            m, s = mean_sd(vals)
            agg[col] = {"mean": m, "sd": s}
    p1, p2 = agg["p1"]["mean"], agg["p2"]["mean"]
    agg["headline_p"] = max(p1, p2)
    agg["verdict"] = "equivalent" if p1 < sig_level and p2 < sig_level else "not equivalent"
    agg["equivalent_trials"] = sum(r["verdict"] == "equivalent" for r in records)
    if "random_p1" in agg:
        r1, r2 = agg["random_p1"]["mean"], agg["random_p2"]["mean"]
        agg["random_headline_p"] = max(r1, r2)
        agg["random_verdict"] = "equivalent" if r1 < sig_level and r2 < sig_level else "not equivalent"
    return agg


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else v for v in row])


def _label_distribution(matrix, groups, candidate, random_labels):
    base = matrix.restrict_annotators(groups.group_a)
    rows = []
    human = np.bincount(base.codes[base.present], minlength=len(base.alphabet))
    sources = [("human", dict(zip(base.alphabet, human.tolist())))]
    covered = [it for it, has in zip(base.items, base.present.any(axis=1)) if has]
    for name, cand in (("candidate", candidate), ("random", random_labels)):
        if cand is None:
            continue
        counts = {lab: 0 for lab in base.alphabet}
        for it in covered:
            lab = cand.labels.get(it)
            if lab in counts:
                counts[lab] += 1
        sources.append((name, counts))
    for name, counts in sources:
        total = sum(counts.values()) or 1
        rows.extend((name, lab, c, c / total) for lab, c in counts.items())
    return rows


def run_evaluate(cfg: RunConfig, stamp: str | None = None) -> tuple[dict, int]:
    """Full evaluation; writes the report and CSV sidecars under ``cfg.out``."""
    raw, candidate = _stage("load", _load_inputs, cfg)
    matrix, groups, filtered = _stage("groups", _select_groups, cfg, raw)
    N = cfg.sample_size_for(matrix.n_items)
    if N > matrix.n_items:
        raise StageError("bootstrap", DataError(f"N = {N} exceeds the {matrix.n_items} items"))
    kwargs = dict(
        B=cfg.B, N=N, fraction=cfg.fraction, sig_level=cfg.sig_level,
        control=cfg.control, control_mode=cfg.control_mode,
    )
    results = _stage(
        "evaluate", run_trials, matrix, groups, candidate, trials=cfg.trials, seed=cfg.seed, workers=cfg.workers, **kwargs
    )
    records = [trial_record(t, r) for t, r in enumerate(results)]
    agg = aggregate(records, cfg.sig_level)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "trials.csv", TRIAL_COLUMNS, ([r[c] for c in TRIAL_COLUMNS] for r in records))

    base = matrix.restrict_annotators(groups.group_a)
    changes = []
    for a in sorted(groups.group_a):
        g = _stage("per-annotator", substitute, base, a, candidate)
        try:
            est = predict_alpha_change(base, g)
            changes.append((a, est.exact_delta_alpha, est.delta_alpha))
        except AlphaUndefined:
            changes.append((a, None, None))
    _write_csv(out / "annotator_changes.csv", ("annotator", "delta_alpha", "predicted_delta_alpha"), changes)

    rnd = random_candidate(base, cfg.seed + CONTROL_SEED_OFFSET, cfg.control_mode) if cfg.control else None
    _write_csv(
        out / "label_distribution.csv",
        ("source", "label", "count", "proportion"),
        _label_distribution(matrix, groups, candidate, rnd),
    )

    sweep = None
    if cfg.B_sweep:
        sweep_rows, sweep = [], []
        for b in cfg.B_sweep:
            res = _stage(
                "b-sweep", run_trials, matrix, groups, candidate, trials=cfg.trials, seed=cfg.seed,
                workers=cfg.workers, **{**kwargs, "B": b, "control": False},
            )
            ps = [(r.candidate.outcome.p1, r.candidate.outcome.p2) for r in res]
            sweep_rows.extend((b, t, r.seed, p1, p2, max(p1, p2)) for t, (r, (p1, p2)) in enumerate(zip(res, ps)))
            m1, s1 = mean_sd(p[0] for p in ps)
            m2, s2 = mean_sd(p[1] for p in ps)
            sweep.append({"B": b, "p1": {"mean": m1, "sd": s1}, "p2": {"mean": m2, "sd": s2}})
        _write_csv(out / "b_sweep.csv", ("B", "trial", "seed", "p1", "p2", "p_value"), sweep_rows)

    report = {
        "tool": {"name": "alphasub", "version": __version__},
        "generated_at": stamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": asdict(cfg),
        "data": {
            "items": matrix.n_items,
            "annotators": matrix.n_annotators,
            "scale": matrix.scale.value,
            "alphabet": list(matrix.alphabet),
            "group_a": list(groups.group_a),
            "group_b": list(groups.group_b),
            "auto_filtered": filtered,
            "candidate_tag": candidate.source_tag,
            "full_alpha_group_a": _safe_alpha(base),
        },
        "schedules": [make_schedule(matrix.n_items, cfg.B, N, r.seed).to_dict() for r in results],
        "trials": records,
        "aggregate": agg,
        "b_sweep": sweep,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    code = EXIT_EQUIVALENT if agg["verdict"] == "equivalent" else EXIT_NOT_EQUIVALENT
    return report, code


def _safe_alpha(matrix):
    try:
        return krippendorff_alpha(matrix).alpha
    except AlphaUndefined:
        return None


def cmd_evaluate(args) -> int:
    cfg = build_config(args)
    report, code = run_evaluate(cfg)
    agg = report["aggregate"]
    print(
        f"human alpha {agg['human_alpha']['mean']:.4f} +- {agg['human_alpha']['sd']:.4f}; "
        f"substituted {agg['substituted_alpha']['mean']:.4f} +- {agg['substituted_alpha']['sd']:.4f}"
    )
    print(f"p1 {agg['p1']['mean']:.4g}  p2 {agg['p2']['mean']:.4g}  p {agg['headline_p']:.4g}  -> {agg['verdict']}")
    if "random_verdict" in agg:
        print(f"random control: alpha {agg['random_alpha']['mean']:.4f}, p {agg['random_headline_p']:.4g} -> {agg['random_verdict']}")
    print(f"report written to {Path(cfg.out) / 'report.json'}")
    return code


# -- other subcommands -----------------------------------------------------------


def cmd_plan(args) -> int:
    try:
        plan = sample_size(args.z, args.alpha_min, args.p_c)
    except ValueError as err:
        raise UsageError(str(err)) from None
    print(f"N_min = {plan.N_min}  (bootstrap sample size)")
    print(f"n_min = {plan.n_min}  (corpus size)")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "plan.json").write_text(json.dumps(asdict(plan), indent=2) + "\n", encoding="utf-8")
    return 0


def _read_curve(path) -> list[tuple[float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty curve file")
    start = 0
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        start = 1  # header
    try:
        return [(float(r[0]), float(r[1])) for r in rows[start:] if r]
    except (ValueError, IndexError) as err:
        raise DataError(f"{path}: curve rows must be x,y numbers ({err})") from None


def _parse_sizes(text: str) -> list[int]:
    if ":" in text:
        lo, hi, *step = (int(x) for x in text.split(":"))
        return list(range(lo, hi + 1, step[0] if step else 1))
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_elbow(args) -> int:
    if args.curve:
        curve = _stage("load", _read_curve, args.curve)
    else:
        if not (args.human and args.candidate):
            raise UsageError("elbow needs --curve, or --human with --candidate")
        with open(args.human, "rb") as fh:
            pop = _stage("load", load_long_format, fh, args.scale, args.alphabet)
        with open(args.candidate, "rb") as fh:
            cand = _stage("load", CandidateAnnotations.from_long_format, fh, args.candidate_tag)
        try:
            sizes = _parse_sizes(args.sizes) if args.sizes else list(range(2, pop.n_annotators + 1))
        except ValueError:
            raise UsageError(f"bad --sizes {args.sizes!r}") from None
        try:
            curve = group_size_curve(pop, sizes, cand, args.seed, args.repeats)
        except DataError as err:
            raise StageError("curve", err) from err
        except ValueError as err:
            raise UsageError(str(err)) from None
    try:
        res = l_method_elbow(curve)
    except ValueError as err:
        raise StageError("elbow", DataError(str(err))) from None
    print(f"elbow at position {res.elbow_index} (x = {res.elbow_x:g}){'  [degenerate: no knee]' if res.degenerate else ''}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "curve.csv", ("x", "y"), res.curve)
        _write_csv(out / "split_errors.csv", ("split", "error"), sorted(res.split_errors.items()))
        doc = {"elbow_index": res.elbow_index, "elbow_x": res.elbow_x, "degenerate": res.degenerate}
        (out / "elbow.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_alpha(args) -> int:
    with open(args.human, "rb") as fh:
        m = _stage("load", load_long_format, fh, args.scale, args.alphabet)
    try:
        res = krippendorff_alpha(m)
    except AlphaUndefined as err:
        raise StageError("alpha", err) from err
    print(json.dumps({"alpha": res.alpha, "d_observed": res.d_observed, "d_expected": res.d_expected,
                      "pairable_values": res.pairable_values, "items": m.n_items, "annotators": m.n_annotators}))
    return 0


def cmd_synth(args) -> int:
    from .synth import CueModelAnnotator, annotate, generate_task, make_population, orthogonal_to, population_matrix

    task = generate_task(args.items, args.cues, args.labels, args.seed)
    pop = make_population(task, args.annotators + 1, weight_sd=args.weight_sd, noise_sd=args.noise_sd, seed=args.seed)
    humans, extra = pop[:-1], pop[-1]
    m = population_matrix(task, humans, args.missing, args.scale)
    if args.candidate_kind == "orthogonal":
        w = orthogonal_to(np.ones(task.cue_dim), args.seed)
        extra = CueModelAnnotator(w, args.noise_sd, 0.0, extra.seed, extra.name)
    cand = CandidateAnnotations(annotate(task, extra).labels, "synthetic")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "human.csv").write_text(m.to_long_format(), encoding="utf-8")
    (out / "candidate.csv").write_text(cand.to_long_format(), encoding="utf-8")
    print(f"wrote {m.n_items} items x {m.n_annotators} annotators to {out / 'human.csv'} and a candidate to {out / 'candidate.csv'}")
    return 0


def cmd_fetch(args) -> int:
    from .remote import fetch_candidate

    try:
        template = Path(args.template).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read template: {err}") from None
    with open(args.items, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"item_id", "descriptor"} <= set(reader.fieldnames):
            raise StageError("load", DataError("items file needs item_id and descriptor columns"))
        items = [(r["item_id"], r["descriptor"]) for r in reader]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cand = _stage(
        "fetch", fetch_candidate, args.endpoint, template, items, batch_size=args.batch_size,
        alphabet=args.alphabet, source_tag=args.tag, audit_path=out / "fetch_audit.jsonl", timeout=args.timeout,
    )
    (out / "candidate.csv").write_text(cand.to_long_format(), encoding="utf-8")
    print(f"fetched {len(cand.labels)} labels into {out / 'candidate.csv'}")
    return 0


# -- parser ----------------------------------------------------------------------


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _n_value(text: str) -> str:
    if text == "auto":
        return text
    try:
        if int(text) >= 1:
            return str(int(text))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"N must be a positive integer or 'auto', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphasub", description="Annotator substitution tests on Krippendorff's alpha.")
    p.add_argument("--version", action="version", version=f"alphasub {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    scales = [s.value for s in Scale]

    ev = sub.add_parser("evaluate", help="run the substitution equivalence test")
    ev.add_argument("--config")
    ev.add_argument("--human")
    ev.add_argument("--candidate")
    ev.add_argument("--candidate-tag", dest="candidate_tag")
    ev.add_argument("--scale", choices=scales)
    ev.add_argument("--alphabet", type=_csv_list, help="ordered labels, comma separated")
    ev.add_argument("--group-a", dest="group_a", type=_csv_list)
    ev.add_argument("--group-b", dest="group_b", type=_csv_list)
    ev.add_argument("--group-size", dest="group_size", type=int)
    ev.add_argument("--min-items", dest="min_items", type=int)
    ev.add_argument("--min-coders", dest="min_coders", type=int)
    ev.add_argument("--max-items", dest="max_items", type=int)
    ev.add_argument("--B", dest="B", type=int)
    ev.add_argument("--N", dest="N", type=_n_value, help="items per bootstrap sample, or 'auto' (40%%)")
    ev.add_argument("--B-sweep", dest="B_sweep", type=_int_list)
    ev.add_argument("--fraction", type=float)
    ev.add_argument("--sig-level", dest="sig_level", type=float)
    ev.add_argument("--trials", type=int)
    ev.add_argument("--seed", type=int)
    ev.add_argument("--workers", type=int)
    ev.add_argument("--control", action=argparse.BooleanOptionalAction, default=None)
    ev.add_argument("--control-mode", dest="control_mode", choices=["uniform", "empirical"])
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_evaluate)

    pl = sub.add_parser("plan", help="minimum bootstrap sample and corpus size")
    pl.add_argument("--z", type=float, default=0.95)
    pl.add_argument("--alpha-min", dest="alpha_min", type=float, default=0.8)
    pl.add_argument("--p-c", dest="p_c", type=float, default=0.17)
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_plan)

    el = sub.add_parser("elbow", help="group-size curve and its L-method elbow")
    el.add_argument("--curve", help="CSV of x,y points")
    el.add_argument("--human")
    el.add_argument("--candidate")
    el.add_argument("--candidate-tag", dest="candidate_tag")
    el.add_argument("--scale", choices=scales, default="interval")
    el.add_argument("--alphabet", type=_csv_list)
    el.add_argument("--sizes", help="'lo:hi[:step]' or a comma list")
    el.add_argument("--repeats", type=int, default=1)
    el.add_argument("--seed", type=int, default=0)
    el.add_argument("--out")
    el.set_defaults(func=cmd_elbow)

    al = sub.add_parser("alpha", help="Krippendorff's alpha of one file")
    al.add_argument("--human", required=True)
    al.add_argument("--scale", choices=scales, default="interval")
    al.add_argument("--alphabet", type=_csv_list)
    al.set_defaults(func=cmd_alpha)

    sy = sub.add_parser("synth", help="write a synthetic dataset and candidate")
    sy.add_argument("--items", type=int, default=100)
    sy.add_argument("--cues", type=int, default=8)
    sy.add_argument("--labels", type=int, default=5)
    sy.add_argument("--annotators", type=int, default=20)
    sy.add_argument("--weight-sd", dest="weight_sd", type=float, default=0.5)
    sy.add_argument("--noise-sd", dest="noise_sd", type=float, default=1.0)
    sy.add_argument("--missing", type=float, default=0.0)
    sy.add_argument("--scale", choices=scales, default="interval")
    sy.add_argument("--candidate-kind", dest="candidate_kind", choices=["same", "orthogonal"], default="same")
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--out", required=True)
    sy.set_defaults(func=cmd_synth)

    fe = sub.add_parser("fetch", help="retrieve candidate labels from an HTTP endpoint")
    fe.add_argument("--endpoint", required=True)
    fe.add_argument("--template", required=True)
    fe.add_argument("--items", required=True, help="CSV with item_id,descriptor columns")
    fe.add_argument("--batch-size", dest="batch_size", type=int, default=100)
    fe.add_argument("--alphabet", type=_csv_list)
    fe.add_argument("--tag", default="remote")
    fe.add_argument("--timeout", type=float, default=60.0)
    fe.add_argument("--out", required=True)
    fe.set_defaults(func=cmd_fetch)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_USAGE if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except (DataError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
