"""Test whether a candidate annotator can stand in for humans, using Krippendorff's alpha."""

__version__ = "0.1.0"

from .alpha import AlphaResult, AlphaUndefined, NoPairableValues, NoVariation, krippendorff_alpha
from .bootstrap import ResamplingSchedule, bootstrap_alphas, make_schedule, paired_run
from .design import group_size_curve, l_method_elbow, predict_alpha_change, sample_size
from .equivalence import EquivalenceMargin, TostOutcome, estimate_margin, t_cdf, tost
from .model import (
    AnnotationMatrix,
    DataError,
    GroupAssignment,
    InfeasibleError,
    Scale,
    filter_dataset,
    load_long_format,
)
from .pipeline import run_trial, run_trials
from .substitution import CandidateAnnotations, random_candidate, substitute, substitution_sweep

__all__ = [
    "AlphaResult", "AlphaUndefined", "AnnotationMatrix", "CandidateAnnotations", "DataError",
    "EquivalenceMargin", "GroupAssignment", "InfeasibleError", "NoPairableValues", "NoVariation",
    "ResamplingSchedule", "Scale", "TostOutcome", "bootstrap_alphas", "estimate_margin", "filter_dataset",
    "group_size_curve", "krippendorff_alpha", "l_method_elbow", "load_long_format", "make_schedule",
    "paired_run", "predict_alpha_change", "random_candidate", "run_trial", "run_trials", "sample_size",
    "substitute", "substitution_sweep", "t_cdf", "tost",
]
