import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphasub.alpha import krippendorff_alpha
from alphasub.model import MISSING
from alphasub.substitution import (
    CandidateAnnotations,
    SubstitutionError,
    random_candidate,
    substitute,
    substitution_sweep,
)
from conftest import grid, random_matrix


def test_blank_annotator_is_untouched():
    m = grid([["A", "B", None], ["B", "B", None]])
    g = substitute(m, "a2", CandidateAnnotations({}, "llm"))
    np.testing.assert_array_equal(g.result.codes, m.codes)


def test_self_substitution_is_identity(rng):
    m = random_matrix(rng, 10, 4, 3, "ordinal", missing=0.3)
    for a in m.annotators:
        g = substitute(m, a, CandidateAnnotations.copy_of(m, a))
        np.testing.assert_array_equal(g.result.codes, m.codes)
        assert krippendorff_alpha(g.result).alpha == krippendorff_alpha(m).alpha


def test_single_cell_difference():
    m = grid([["A", "B", "A"], ["B", "B", "A"], ["A", "A", "B"]])
    cand = CandidateAnnotations({"m0": "B", "m1": "B", "m2": "A"}, "llm")
    g = substitute(m, "a0", cand)
    assert int((g.result.codes != m.codes).sum()) == 1
    assert g.result.label("m0", "a0") == "B"


def test_candidate_must_cover_labelled_items():
    m = grid([["A", "B"], ["B", None], [None, "A"]])
    # a1 skipped m1, so the candidate needs m0 and m2 only
    substitute(m, "a1", CandidateAnnotations({"m0": "A", "m2": "B"}))
    with pytest.raises(SubstitutionError, match="m2"):
        substitute(m, "a1", CandidateAnnotations({"m0": "A"}))


def test_out_of_alphabet_label_is_an_error():
    m = grid([["A", "B"], ["B", "A"]])
    with pytest.raises(SubstitutionError, match="outside the alphabet"):
        substitute(m, "a0", CandidateAnnotations({"m0": "C", "m1": "A"}))


def test_sweep_order_and_size(rng):
    m = random_matrix(rng, 5, 19, 3, "nominal", missing=0.0)
    cand = random_candidate(m, seed=1)
    groups = substitution_sweep(m, reversed(m.annotators), cand)
    assert len(groups) == 19
    assert [g.replaced_annotator for g in groups] == sorted(m.annotators)
    assert len(substitution_sweep(m, ["a3"], cand)) == 1


def test_sweep_error_names_annotator():
    m = grid([["A", "B", "A"], [None, "B", "B"]])
    cand = CandidateAnnotations({"m0": "A"})
    with pytest.raises(SubstitutionError) as err:
        substitution_sweep(m, ["a0", "a1"], cand)
    assert err.value.annotator == "a1"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.6))
def test_missingness_and_other_columns_preserved(seed, missing):
    rng = np.random.default_rng(seed)
    m = random_matrix(rng, 8, 4, 3, "nominal", missing=missing)
    cand = random_candidate(m, seed=seed % 1000)
    for g in substitution_sweep(m, m.annotators, cand):
        np.testing.assert_array_equal(g.result.codes == MISSING, m.codes == MISSING)
        j = m.annotator_index(g.replaced_annotator)
        others = [c for c in range(m.n_annotators) if c != j]
        np.testing.assert_array_equal(g.result.codes[:, others], m.codes[:, others])


def test_random_candidate_deterministic(rng):
    m = random_matrix(rng, 20, 3, 4, "nominal")
    assert random_candidate(m, 5).labels == random_candidate(m, 5).labels
    assert random_candidate(m, 5).labels != random_candidate(m, 6).labels


def test_random_candidate_single_label():
    m = grid([["A", "A"], ["A", "A"]])
    assert set(random_candidate(m, 0).labels.values()) == {"A"}


def test_random_candidate_is_uniform():
    rows = [["1", "2"]] * 9999 + [["3", "4"]] + [["5", "5"]]
    m = grid(rows, scale="interval", alphabet=["1", "2", "3", "4", "5"])
    labels = list(random_candidate(m, seed=123).labels.values())
    assert len(labels) == 10001
    for lab in m.alphabet:
        assert abs(labels.count(lab) / len(labels) - 0.2) < 0.02


def test_random_candidate_empirical_mode():
    rows = [["1", "1"]] * 900 + [["2", "2"]] * 100
    m = grid(rows, scale="interval")
    labels = list(random_candidate(m, seed=3, mode="empirical").labels.values())
    assert abs(labels.count("1") / len(labels) - 0.9) < 0.03


def test_candidate_long_format_round_trip():
    cand = CandidateAnnotations({"m1": "3", "m2": "5"}, "gpt")
    back = CandidateAnnotations.from_long_format(cand.to_long_format())
    assert back == cand
    text = "annotator_id,item_id,label\nx,m1,1\ny,m1,2\n"
    with pytest.raises(Exception, match="several"):
        CandidateAnnotations.from_long_format(text)
    assert CandidateAnnotations.from_long_format(text, "y").labels == {"m1": "2"}
