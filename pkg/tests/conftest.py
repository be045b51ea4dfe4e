import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from alphasub.model import MISSING, AnnotationMatrix  # noqa: E402


def random_matrix(rng, n_items, n_annotators, size, scale, missing=0.2, values=None):
    """Random label grid with at least one pairable item."""
    while True:
        codes = rng.integers(0, size, size=(n_items, n_annotators))
        codes = np.where(rng.random(codes.shape) < missing, MISSING, codes)
        if np.any((codes != MISSING).sum(axis=1) >= 2):
            break
    if values is None:
        alphabet = tuple(str(k + 1) for k in range(size))
    else:
        alphabet = tuple(str(v) for v in values)
    return AnnotationMatrix(
        tuple(f"m{k}" for k in range(n_items)),
        tuple(f"a{j}" for j in range(n_annotators)),
        codes,
        scale,
        alphabet,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def grid(rows, scale="nominal", alphabet=None):
    """Matrix from a list of rows of labels (None for missing)."""
    labels = sorted({x for r in rows for x in r if x is not None}) if alphabet is None else list(alphabet)
    codes = [[MISSING if x is None else labels.index(x) for x in r] for r in rows]
    return AnnotationMatrix(
        tuple(f"m{k}" for k in range(len(rows))),
        tuple(f"a{j}" for j in range(len(rows[0]))),
        np.array(codes),
        scale,
        tuple(labels),
    )


# criterion number -> (passed, one-line detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
