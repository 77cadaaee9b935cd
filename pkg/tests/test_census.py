import numpy as np
import pytest

from bwlab.codes.census import (
    agl_order, census, clean_stabilizer_order, defect_agreement, printed_dirty_stabilizer_order, rm2_size,
    walsh_hadamard
)
from bwlab.errors import ResourceGuardError


def test_walsh_hadamard_squares_to_scaled_identity():
    values = np.array([[1, -1, -1, 1, 1, 1, -1, 1]])
    assert (walsh_hadamard(walsh_hadamard(values)) == 8 * values).all()


def test_census_d3():
    result = census(3)
    assert result.total == result.expected_total == 128
    assert result.sizes() == {
        "Short0": 1, "Short1": 28, "Long0": 1, "Long1": 28, "MidsetAffine": 14, "MidsetNonaffine1": 56
    }
    for row in result.rows:
        assert row.orbit_size * row.stabilizer_order == agl_order(3)
        if row.label.clean:
            assert row.formula_agrees


def test_census_modes_agree():
    for d in (2, 3, 4):
        assert census(d, mode="canonical").sizes() == census(d).sizes()


def test_census_d4_dirty_stabilizer():
    """The enumerated dirty stabilizer is four times the value obtained from the printed index"""
    result = census(4)
    assert result.total == 2048
    row = next(r for r in result.rows if r.label.key == "MidsetNonaffine1")
    assert row.orbit_size == 840
    assert row.stabilizer_order == 384
    assert row.printed_dirty_stabilizer_order == printed_dirty_stabilizer_order(4, 1) == 96
    assert row.formula_agrees is False
    assert clean_stabilizer_order(4, 1) == 2304


def test_census_d5_total():
    assert census(5).total == rm2_size(5) == 65536


def test_sampled_census():
    result = census(6, mode="sampled", samples=200, seed=42)
    assert sum(result.sample_counts.values()) == 200
    assert result.seed == 42
    again = census(6, mode="sampled", samples=200, seed=42)
    assert again.sample_counts == result.sample_counts


def test_resource_guards():
    with pytest.raises(ResourceGuardError):
        census(7)
    with pytest.raises(ResourceGuardError):
        census(6, mode="canonical")
    with pytest.raises(ValueError):
        census(3, mode="fast")


def test_defect_agreement():
    assert defect_agreement(4).mismatches == ()
    sampled = defect_agreement(7, samples=20, seed=3)
    assert sampled.checked == 20
    assert sampled.mismatches == ()


def test_census_d4_table():
    assert census(4).sizes() == {
        "Short0": 1, "Short1": 140, "Short2": 448, "Long0": 1, "Long1": 140, "Long2": 448,
        "MidsetAffine": 30, "MidsetNonaffine1": 840
    }


@pytest.mark.parametrize("d", [2, 3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_defect_agreement_on_every_dirty_word(d):
    dirty = sum(size for key, size in census(d).sizes().items() if key.startswith("Midset"))
    report = defect_agreement(d)
    assert report.checked == dirty
    assert report.mismatches == ()


@pytest.mark.parametrize("d", [6, 7, pytest.param(8, marks=pytest.mark.slow)])
def test_defect_agreement_sampled(d):
    report = defect_agreement(d, samples=25, seed=d)
    assert report.checked == 25
    assert report.mismatches == ()
    assert report.seed == d
