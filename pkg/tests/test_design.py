import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphasub.alpha import krippendorff_alpha
from alphasub.design import group_size_curve, l_method_elbow, predict_alpha_change, sample_size
from alphasub.substitution import CandidateAnnotations, substitute
from alphasub.synth import annotate, generate_task, make_population, population_matrix
from conftest import grid, random_matrix
from oracles import exhaustive_elbow


def test_sample_size_published_example():
    plan = sample_size(0.95, 0.8, 0.17)
    assert (plan.N_min, plan.n_min) == (32, 80)


def test_sample_size_hand_example():
    plan = sample_size(1.0, 0.0, 0.5)
    assert (plan.N_min, plan.n_min) == (3, 8)


@pytest.mark.parametrize("args", [(0, 0.5, 0.5), (1, 1.0, 0.5), (1, 0.5, 0.0), (1, 0.5, 1.0), (1, -0.1, 0.5)])
def test_sample_size_rejects_bad_input(args):
    with pytest.raises(ValueError):
        sample_size(*args)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 3), st.floats(0, 0.98), st.floats(0, 0.98), st.floats(0.01, 0.99))
def test_sample_size_monotone_in_alpha_min(z, a1, a2, p_c):
    lo, hi = sorted((a1, a2))
    small, large = sample_size(z, lo, p_c), sample_size(z, hi, p_c)
    assert small.N_min <= large.N_min
    assert large.n_min == int(np.ceil(2.5 * large.N_min))


def _population(seed, n=100, size=20, scale="interval"):
    task = generate_task(n, 6, 5, seed=seed)
    return population_matrix(task, make_population(task, size, weight_sd=0.5, noise_sd=1.5, seed=seed), scale=scale)


@pytest.mark.parametrize("scale", ["nominal", "ordinal", "interval"])
def test_self_substitution_predicts_zero(scale):
    m = _population(3, scale=scale)
    g = substitute(m, "h07", CandidateAnnotations.copy_of(m, "h07"))
    est = predict_alpha_change(m, g)
    assert est.delta_d_o == 0 and est.delta_d_e == 0
    assert est.delta_alpha == 0 and est.exact_delta_alpha == 0


@pytest.mark.parametrize("scale", ["nominal", "ordinal", "interval"])
def test_single_cell_change(scale):
    m = _population(4, scale=scale)
    labels = {m.items[k]: m.alphabet[c] for k, c in enumerate(m.codes[:, 0])}
    old = m.codes[17, 0]
    labels[m.items[17]] = m.alphabet[(old + 2) % 5]
    est = predict_alpha_change(m, substitute(m, m.annotators[0], CandidateAnnotations(labels)))
    assert est.exact_delta_alpha != 0
    assert abs(est.delta_alpha - est.exact_delta_alpha) <= 1e-3


def test_observed_term_is_exact_for_nominal_data(rng):
    # D_o is linear in one annotator's cells, so only D_e is approximated
    m = random_matrix(rng, 30, 5, 3, "nominal", missing=0.2)
    labels = {m.items[k]: m.alphabet[(c + 1) % 3] for k, c in enumerate(m.codes[:, 2]) if c >= 0}
    g = substitute(m, "a2", CandidateAnnotations(labels))
    est = predict_alpha_change(m, g)
    exact = krippendorff_alpha(g.result).d_observed - krippendorff_alpha(m).d_observed
    assert est.delta_d_o == pytest.approx(exact, abs=1e-14)


def coherent_pair(seed, scale, cells, n=200):
    """Errors for `cells` and `cells // 2` changes that all move one label up a step."""
    m = _population(seed, n=n, scale=scale)
    rng = np.random.default_rng(seed)
    c0 = int(rng.integers(0, len(m.alphabet) - 1))
    ks = rng.choice(np.flatnonzero(m.codes[:, 0] == c0), size=cells, replace=False)
    errs = []
    for count in (cells, cells // 2):
        labels = {m.items[k]: m.alphabet[c] for k, c in enumerate(m.codes[:, 0])}
        for k in ks[:count]:
            labels[m.items[k]] = m.alphabet[c0 + 1]
        est = predict_alpha_change(m, substitute(m, m.annotators[0], CandidateAnnotations(labels)))
        errs.append((abs(est.delta_alpha - est.exact_delta_alpha), est.exact_delta_alpha))
    return errs


def test_error_shrinks_quadratically():
    full, half = [], []
    for seed in range(20):
        (ef, _), (eh, _) = coherent_pair(seed, "nominal", 10)
        full.append(ef)
        half.append(eh)
    assert np.mean(half) <= 0.3 * np.mean(full)


def test_group_size_curve_unanimous_is_zero():
    m = grid([["A"] * 6, ["B"] * 6, ["A"] * 6])
    cand = CandidateAnnotations({"m0": "A", "m1": "B", "m2": "A"})
    curve = group_size_curve(m, [2, 3, 4, 5, 6], cand, seed=0)
    assert [x for x, _ in curve] == [2, 3, 4, 5, 6]
    assert all(y == 0 for _, y in curve)


def test_group_size_curve_validation():
    m = grid([["A", "B", "A"], ["B", "B", "A"]])
    cand = CandidateAnnotations({"m0": "A", "m1": "B"})
    with pytest.raises(ValueError):
        group_size_curve(m, [4], cand, seed=0)
    with pytest.raises(ValueError):
        group_size_curve(m, [1], cand, seed=0)


def test_group_size_curve_follows_inverse_size():
    task = generate_task(100, 6, 5, seed=8)
    pop = make_population(task, 41, weight_sd=0.5, noise_sd=1.5, seed=8)
    m = population_matrix(task, pop[:-1])
    cand = annotate(task, pop[-1])
    sizes = list(range(2, 41, 2))
    ys = np.mean([[y for _, y in group_size_curve(m, sizes, cand, seed=s)] for s in range(5)], axis=0)
    assert np.corrcoef(ys, 1 / np.array(sizes))[0, 1] >= 0.9
    assert ys[0] > ys[-1]


def _piecewise(k, b, left=(-3.0, 40.0), right=(-0.5, 10.3)):
    # generic pieces that do not meet, so only split k fits both halves exactly
    xs = np.arange(1, b + 1, dtype=float)
    ys = np.where(np.arange(b) < k, left[0] * xs + left[1], right[0] * xs + right[1])
    return list(zip(xs, ys))


@pytest.mark.parametrize("k", [2, 3, 5, 8, 12, 14])
def test_elbow_recovers_breakpoint(k):
    res = l_method_elbow(_piecewise(k, 16))
    assert res.elbow_index == k
    assert res.split_errors[k] == pytest.approx(0.0, abs=1e-9)
    assert not res.degenerate


def test_elbow_on_a_line_is_degenerate():
    res = l_method_elbow([(x, 2 * x + 1) for x in range(10)])
    assert res.degenerate
    assert res.elbow_index == 2


def test_elbow_input_checks():
    with pytest.raises(ValueError):
        l_method_elbow([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(ValueError):
        l_method_elbow([(1, 1), (3, 2), (2, 3), (4, 4)])


@pytest.mark.parametrize("seed", range(20))
def test_elbow_matches_exhaustive_oracle(seed):
    rng = np.random.default_rng(seed)
    xs = np.arange(2, 41, dtype=float)
    ys = 1 / xs + rng.normal(0, 0.005, len(xs))
    res = l_method_elbow(list(zip(xs, ys)))
    assert abs(res.elbow_index - exhaustive_elbow(xs, ys)[0]) <= 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100), st.floats(-100, 100))
def test_elbow_affine_invariance(seed, a, b):
    rng = np.random.default_rng(seed)
    xs = np.arange(2, 30, dtype=float)
    ys = 1 / xs + rng.normal(0, 0.01, len(xs))
    base = l_method_elbow(list(zip(xs, ys)))
    moved = l_method_elbow(list(zip(xs, a * ys + b)))
    assert moved.elbow_index == base.elbow_index
