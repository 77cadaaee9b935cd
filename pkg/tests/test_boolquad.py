import random

import pytest

from bwlab.codes.boolquad import (
    AffineMap, Anf, BoolWord, Category, ClassLabel, bilinear_form, canonical_form, defect, degree, derivative, mobius,
    random_affine_map, random_word, standard_representative, to_anf, from_anf, translate
)
from bwlab.codes.gf2 import Gf2Mat, Gf2Vec, parity, vecmat
from bwlab.codes.rm2 import codeword_labels
from bwlab.errors import HexParseError, NotACodewordError


def test_hex_convention():
    """Bit x of the table is the value at the point Σ x_i 2^i"""
    w = BoolWord.from_hex(3, "88")
    assert w.points() == [3, 7], "x_0 x_1 holds on the points 3 and 7"
    assert w.hex() == "88"
    assert BoolWord.from_hex(3, "0X88") == w
    assert BoolWord.from_hex(1, "2").points() == [1]
    assert BoolWord.from_hex(4, "8888").weight == 4


@pytest.mark.parametrize("d,text", [(2, "08"), (2, "g"), (3, "8"), (1, "4"), (3, "")])
def test_hex_errors(d, text):
    with pytest.raises(HexParseError):
        BoolWord.from_hex(d, text)


def test_mobius_is_an_involution():
    rng = random.Random(3)
    for d in range(1, 7):
        table = rng.getrandbits(1 << d)
        assert mobius(mobius(table, d), d) == table


def test_degree_and_anf():
    assert degree(BoolWord.zero(3)) == -1
    assert degree(BoolWord.full(3)) == 0
    assert degree(BoolWord.from_hex(3, "88")) == 2
    with pytest.raises(NotACodewordError) as error:
        to_anf(BoolWord(3, 0b10000000))
    assert error.value.degree == 3

    rng = random.Random(11)
    for d in range(1, 7):
        w = random_word(d, rng)
        assert from_anf(to_anf(w)) == w


def test_translate():
    w = BoolWord.from_hex(3, "88")
    assert translate(w, 0b100) == w, "x_2 does not appear in x_0 x_1"
    assert translate(w, 0b001).points() == [2, 6]


def test_affine_maps_compose():
    rng = random.Random(17)
    for d in range(1, 6):
        g, h = random_affine_map(d, rng), random_affine_map(d, rng)
        w = random_word(d, rng)
        assert all(g.then(h).apply(x) == h.apply(g.apply(x)) for x in range(1 << d))
        assert g.then(h).pull(w) == g.pull(h.pull(w))
        assert g.then(g.inverse()) == AffineMap.identity(d)


def test_labels():
    assert ClassLabel(Category.SHORT, 2).key == "Short2"
    assert ClassLabel(Category.MIDSET_AFFINE, 0).key == "MidsetAffine"
    assert str(ClassLabel(Category.LONG, 1)) == "Long(1)"
    for key in ("Short0", "Long3", "MidsetAffine", "MidsetNonaffine2", "Short1/0", "Long2/1"):
        assert ClassLabel.from_key(key).key == key
    with pytest.raises(HexParseError):
        ClassLabel.from_key("Medium1")


def test_standard_representatives():
    for d in range(1, 7):
        for k in range(0, d // 2 + 1):
            for category in (Category.SHORT, Category.LONG, Category.MIDSET_NONAFFINE):
                if category == Category.MIDSET_NONAFFINE and (k == 0 or 2 * k >= d):
                    continue
                label = ClassLabel(category, k)
                w = standard_representative(label, d)
                assert w.weight == label.expected_weight(d)
                assert defect(w) == k
                assert canonical_form(w)[0] == label
        midset = standard_representative(ClassLabel(Category.MIDSET_AFFINE, 0), d)
        assert midset.weight == 1 << (d - 1)


def test_canonical_form_of_random_words():
    """The witness is checked inside canonical_form, the label must match weight and defect"""
    rng = random.Random(23)
    for d in range(1, 8):
        for _ in range(40):
            w = random_word(d, rng)
            label, witness = canonical_form(w)
            assert witness.pull(standard_representative(label, d)) == w
            assert w.weight == label.expected_weight(d)
            assert label.defect == defect(w)


def test_canonical_form_is_an_orbit_invariant():
    rng = random.Random(29)
    for d in range(2, 7):
        for _ in range(20):
            w = random_word(d, rng)
            g = random_affine_map(d, rng)
            assert canonical_form(g.pull(w))[0] == canonical_form(w)[0]


def test_derivative_and_bilinear_form():
    w = BoolWord.from_hex(3, "88")
    assert derivative(w, Gf2Vec.unit(0, 3)).points() == [2, 3, 6, 7]
    assert derivative(w, Gf2Vec.unit(2, 3)) == BoolWord.zero(3)
    assert bilinear_form(w) == Gf2Mat((0b010, 0b001, 0b000), 3)
    rng = random.Random(5)
    for _ in range(20):
        w = random_word(4, rng)
        form = bilinear_form(w)
        for a in range(16):
            for b in range(16):
                twice = derivative(derivative(w, Gf2Vec(a, 4)), Gf2Vec(b, 4))
                assert twice.table in (0, (1 << 16) - 1)
                assert (twice.table & 1) == parity(vecmat(a, form.rows) & b)


@pytest.mark.parametrize("d", [2, 3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_weight_trichotomy(d):
    """Every word of RM(2,d) has weight 2^{d-1} or 2^{d-1} ± 2^{d-k-1}, k being its defect"""
    half = 1 << (d - 1)
    for table, label in codeword_labels(d).items():
        w = BoolWord(d, table)
        k = defect(w)
        assert k == label.defect
        assert w.weight in (half, half - (1 << (d - k - 1)), half + (1 << (d - k - 1)))
        assert w.weight == label.expected_weight(d)


@pytest.mark.parametrize("d", [2, 4])
def test_no_midset_of_full_defect(d):
    labels = codeword_labels(d).values()
    assert not any(label.is_midset and 2 * label.defect == d for label in labels)
    assert sum(1 for label in labels if 2 * label.defect == d) > 0


def test_no_midset_of_full_defect_d6():
    """Every full rank quadratic part is equivalent to the standard one, so its affine shifts cover the case"""
    d = 6
    quad = to_anf(standard_representative(ClassLabel(Category.SHORT, 3), d)).quad
    for linear in range(1 << d):
        for const in (0, 1):
            w = from_anf(Anf(d, const, linear, quad))
            assert w.weight in (28, 36)
            assert defect(w) == 3
