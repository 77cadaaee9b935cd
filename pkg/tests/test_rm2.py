import random

import pytest

from bwlab.codes.boolquad import BoolWord, Category, ClassLabel, random_affine_map, random_word, standard_representative
from bwlab.codes.census import coset_law, quad_from_mask
from bwlab.codes.rm2 import (
    AffineSubspace, classify_word, cleansing_hyperplanes, codeword_labels, conjugator, containment_profile, core,
    coset_report, cubi_decompose, cubi_sum, dirty_defect_by_procedure, noncleansing_reconciliation,
    random_cubi_sequence, unique_hyperplane_meet
)
from bwlab.errors import CategoryError


def test_affine_subspaces():
    line = AffineSubspace(3, ((0b010, 0), (0b100, 1)))
    assert line.dim == 1
    assert line.indicator().points() == [4, 5]
    assert line.contains(line.point())
    assert AffineSubspace.from_equations(3, [(0b001, 0), (0b001, 1)]) is None
    assert AffineSubspace.from_equations(3, [(0b011, 1), (0b001, 0), (0b010, 1)]).codim == 2
    assert len(AffineSubspace.hyperplanes(3)) == 14


def test_classify_word():
    clean = classify_word(BoolWord.from_hex(3, "88"))
    assert {key: clean[key] for key in ("d", "word", "weight", "defect", "category", "key", "clean")} == {
        "d": 3, "word": "88", "weight": 2, "defect": 1, "category": "Short", "key": "Short1", "clean": True
    }
    assert clean["core"] == [[0b001, 0], [0b010, 0]]
    assert len(clean["cubi"]) == 1
    assert clean["cleansing_count"] is None

    dirty = classify_word(BoolWord.from_hex(3, "78"))
    assert dirty["key"] == "MidsetNonaffine1"
    assert dirty["cleansing_count"] == 8
    assert dirty["core"] is None and dirty["cubi"] is None


def test_core_of_clean_words():
    w = BoolWord.from_hex(3, "88")
    c = core(w)
    assert c.dim == 1
    assert c.indicator().points() == [0, 4], "Translations by 0 and e_2 fix x_0 x_1"
    with pytest.raises(CategoryError):
        core(BoolWord.from_hex(3, "78"))


def test_cubi_decomposition():
    rng = random.Random(31)
    for d in range(2, 8):
        for k in range(1, d // 2 + 1):
            w = cubi_sum(random_cubi_sequence(d, k, rng))
            assert w.weight == (1 << (d - 1)) - (1 << (d - k - 1))
            subspaces = cubi_decompose(w, k)
            assert len(subspaces) == k
            assert all(s.codim == 2 for s in subspaces)
            assert cubi_sum(subspaces) == w
    with pytest.raises(CategoryError):
        cubi_decompose(BoolWord.from_hex(3, "77"))
    with pytest.raises(CategoryError):
        cubi_decompose(BoolWord.from_hex(3, "88"), 2)


def test_cleansing_hyperplanes():
    for d in range(3, 7):
        for k in range(0, (d - 1) // 2 + 1):
            category = Category.MIDSET_NONAFFINE if k else Category.MIDSET_AFFINE
            w = standard_representative(ClassLabel(category, k), d)
            found = cleansing_hyperplanes(w)
            assert len(found) == 1 << (2 * k + 1)
            assert all((w + h.indicator()).weight != 1 << (d - 1) for h in found)
            assert dirty_defect_by_procedure(w) == k


def test_noncleansing_reconciliation():
    """Hyperplanes meeting the common flat without containing it outnumber the noncleansing ones by two"""
    for d in range(3, 6):
        for k in range(0, (d - 1) // 2 + 1):
            category = Category.MIDSET_NONAFFINE if k else Category.MIDSET_AFFINE
            report = noncleansing_reconciliation(standard_representative(ClassLabel(category, k), d))
            assert report.cleansing == 1 << (2 * k + 1)
            assert report.cleansing + report.noncleansing == (1 << (d + 1)) - 2
            assert report.neither_contain_nor_avoid == (1 << (d + 1)) - (1 << (2 * k + 1))
            assert report.difference == 2


def test_coset_report():
    report = coset_report(quad_from_mask(3, 0b001))
    assert (report.defect, report.clean_count, report.dirty_count) == (1, 8, 8)
    assert coset_law(4) == {0: 1, 1: 35, 2: 28}


def test_unique_hyperplane_meet():
    b = BoolWord.from_hex(3, "78")
    a = AffineSubspace(3, ((0b010, 0), (0b100, 1)))
    assert unique_hyperplane_meet(b, a) == AffineSubspace.hyperplane(3, 0b010, 0)
    with pytest.raises(CategoryError):
        unique_hyperplane_meet(BoolWord.from_hex(3, "88"), a)


def test_containment_profile():
    profile = containment_profile(4)
    assert profile.violations == []
    assert profile.midset_cases.get("codim2<MidsetNonaffine1", 0) > 0
    assert all(k <= 2 and r <= 2 for k, r in profile.rows)


def test_conjugator():
    rng = random.Random(37)
    for d in range(2, 6):
        w = random_word(d, rng)
        image = random_affine_map(d, rng).pull(w)
        assert conjugator(w, image).pull(w) == image
    with pytest.raises(CategoryError):
        conjugator(BoolWord.from_hex(3, "88"), BoolWord.from_hex(3, "78"))


def _alternating_counts(d):
    """Number of d x d alternating matrices over F_2 of each rank 2k"""
    counts = {0: 1}
    for k in range(1, d // 2 + 1):
        i = k - 1
        n = d - 2 * i
        counts[k] = counts[k - 1] * 4 ** i * ((1 << n) - 1) * ((1 << (n - 1)) - 1) // ((1 << (2 * i + 2)) - 1)
    return counts


@pytest.mark.parametrize("d", [2, 3, 4, 5, pytest.param(6, marks=pytest.mark.slow)])
def test_coset_law(d):
    counts = _alternating_counts(d)
    assert sum(counts.values()) == 1 << (d * (d - 1) // 2)
    assert coset_law(d) == counts


@pytest.mark.parametrize("d", [3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_cleansing_counts_on_every_dirty_word(d):
    for table, label in codeword_labels(d).items():
        if label.clean:
            continue
        w = BoolWord(d, table)
        assert len(cleansing_hyperplanes(w)) == 1 << (2 * label.defect + 1)
        assert dirty_defect_by_procedure(w) == label.defect


@pytest.mark.parametrize("d", [2, 3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_cubi_decomposition_of_every_short_word(d):
    for table, label in codeword_labels(d).items():
        if label.category != Category.SHORT or label.defect == 0:
            continue
        w = BoolWord(d, table)
        subspaces = cubi_decompose(w)
        assert len(subspaces) == label.defect
        assert cubi_sum(subspaces) == w
