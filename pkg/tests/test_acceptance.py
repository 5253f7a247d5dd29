"""Acceptance gate: one printed PASS/FAIL line per criterion.

The lines are also collected into ``RESULTS`` and repeated in the pytest
terminal summary, so they show up without ``-s``.
"""

import pytest

from hyperlane import acceptance as acc

RESULTS = {}

# tolerances pinned here so that a change in the package cannot loosen them
PINNED = {
    "DECAY_REL": 0.05,
    "SOLVE_SECONDS": 30.0,
    "ENERGY_SHRINK": 4.0,
    "REFINE": 10.0,
    "IDENTITY_REL": 1e-3,
    "DIAGONAL_REL": 1e-6,
    "ROUNDTRIP_REL": 1e-12,
    "QUADRATURE_REL": 1e-8,
    "SLOPE_REL": 1e-10,
    "PROPERTY_SAMPLES": 10_000,
}


def test_tolerances_are_pinned():
    for name, value in PINNED.items():
        assert getattr(acc, name) == value, name
    assert acc.FIXTURES == ((3, 3, 3), (4, 2, 2), (5, 2, 2), (3, 2, 4))
    assert (3, 5.0, 5.0) in acc.TRUTH_TABLE and len(acc.TRUTH_TABLE) == 8
    assert acc.TAIL_FRACTIONS == (0.1, 0.25, 0.5)


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    result = acc.CRITERIA[number - 1]()
    assert result.number == number
    RESULTS[number] = result.line()
    print()
    print(result.line())
    assert result.passed, result.line()
