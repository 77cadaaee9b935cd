import itertools
import random

import pytest

from bwlab.codes.boolquad import AffineMap, BoolWord
from bwlab.codes.gf2 import Gf2Mat, Gf2Vec, QuadraticForm
from bwlab.errors import HexParseError, InvalidInvolutionError, NotACodewordError
from bwlab.groups.pauli import (
    LowerElement, MonomialMap, av, build_eta, build_upper_clean, centralizer_lower, classify_involution,
    clean_coset_members, commutator_map, commutator_singularities, coset_involutions, dickson_invariant,
    dirty_partners, eps, lower_group, lower_involutions, orthogonal_transvection, parse_involution,
    random_brw_monomial, sv, ul_count, ul_factorizations, ul_printed_count, y_orbit_counts
)
from bwlab.lattices.bw import build
from bwlab.lattices.zlat import preserves


def test_monomial_maps_compose_left_to_right():
    rng = random.Random(41)
    for d in (1, 2, 3):
        g, h = random_brw_monomial(d, rng), random_brw_monomial(d, rng)
        vector = [rng.randint(-5, 5) for _ in range(1 << d)]
        assert (g * h).apply(vector) == h.apply(g.apply(vector))
        assert (g * g.inverse()).is_identity
        assert (-g).trace == -g.trace


def test_order():
    assert MonomialMap.identity(2).order == 1
    assert (-MonomialMap.identity(2)).order == 2
    x0z0 = LowerElement.from_packed(0b0101, 2).to_map()
    assert x0z0.order == 4, "X_aZ_l squares to −1 when l(a) = 1"


def test_lower_group_multiplication():
    rng = random.Random(43)
    d = 3
    elements = list(lower_group(d))
    assert len(elements) == 2 ** (1 + 2 * d)
    for _ in range(50):
        x, y = rng.choice(elements), rng.choice(elements)
        assert (x * y).to_map() == x.to_map() * y.to_map()
        assert LowerElement.from_map(x.to_map()) == x
        assert x.commutes_with(y) == x.to_map().commutes_with(y.to_map())
    assert LowerElement.from_map(eps(BoolWord.from_hex(3, "88"))) is None


def test_lower_involutions():
    for d in (1, 2, 3):
        assert sum(1 for _ in lower_involutions(d)) == (1 << (2 * d)) + (1 << d) - 1


def test_eps_requires_a_codeword():
    with pytest.raises(NotACodewordError):
        eps(BoolWord(3, 0b10000000))


@pytest.mark.parametrize("d,descriptor,key,trace", [
    (2, "eps:8", "clean1+/0", 2),
    (2, "upper", "clean1+/1", 2),
    (2, "eta:2:+", "nonsplit1", 0),
    (2, "lower:1:0:0", "dirty0", 0),
    (3, "eps:88", "clean1+", 4),
    (3, "eps:78", "dirty1", 0),
    (3, "eta:2:+", "nonsplit1", 0),
    (3, "eta:2:-", "nonsplit1", 0),
    (4, "eps:8888", "clean1+", 8),
    (4, "eps:7888", "clean2+/0", 4),
    (4, "eta:4:+", "nonsplit2", 0),
    (5, "eta:4:-", "nonsplit2", 0),
    (6, "eps:8777788878887888", "clean3+/0", 8),
])
def test_classify_involution(d, descriptor, key, trace):
    report = classify_involution(parse_involution(d, descriptor))
    assert report.label.key == key
    assert report.trace == trace


CONJUGATION_CASES = [
    (2, "eps:8"), (2, "upper"), (2, "eta:2:+"), (2, "lower:1:2:0"),
    (3, "eps:88"), (3, "eps:78"), (3, "eps:e8"), (3, "eta:2:-"), (3, "lower:3:4:1"),
    (4, "eps:8888"), (4, "eps:7888"), (4, "upper"), (4, "eta:2:+"), (4, "eta:4:+"), (4, "lower:5:a:0"),
]


@pytest.mark.parametrize("d,descriptor", CONJUGATION_CASES)
def test_classification_is_conjugation_invariant(d, descriptor):
    rng = random.Random(47 + d)
    t = parse_involution(d, descriptor)
    label = classify_involution(t).label
    for _ in range(6):
        g = random_brw_monomial(d, rng)
        conjugate = classify_involution(g.inverse() * t * g).label
        assert conjugate == label
        assert conjugate.frame_class == label.frame_class


def _eta_cases(max_d):
    return [
        (d, k, sign) for d in range(2, max_d + 1) for k in range(1, d // 2 + 1) for sign in (1, -1)
        if sign > 0 or 2 * k < d
    ]


@pytest.mark.parametrize("d,k,sign", _eta_cases(5))
def test_eta_preserves_bw(d, k, sign):
    t = build_eta(d, k, sign)
    assert preserves(build(d).lattice, t)
    assert t.is_involution and t.trace == 0


@pytest.mark.parametrize("d,k,sign", _eta_cases(5))
def test_nonsplit_labels_survive_conjugation(d, k, sign):
    rng = random.Random(59 + 7 * d + k)
    t = build_eta(d, k, sign)
    for _ in range(8):
        g = random_brw_monomial(d, rng)
        assert classify_involution(g.inverse() * t * g).label.key == f"nonsplit{k}"


def _quadratic_word(d, pairs):
    table = 0
    for x in range(1 << d):
        if sum((x >> i) & (x >> j) & 1 for i, j in pairs) % 2:
            table |= 1 << x
    return BoolWord(d, table)


def test_both_eta_variants_are_conjugate():
    """A monomial element maps η_{3,2,+} into the R-class of η_{3,2,−}: the sign is not a class invariant"""
    d = 3
    plus, minus = build_eta(d, 1, 1), build_eta(d, 1, -1)
    r_class = {r.to_map().inverse() * minus * r.to_map() for r in lower_group(d)}
    pairs = [(0, 1), (0, 2), (1, 2)]
    found = None
    for rows in itertools.product(range(1 << d), repeat=d):
        matrix = Gf2Mat(rows, d)
        if not matrix.is_invertible():
            continue
        for mask in range(1 << len(pairs)):
            word = _quadratic_word(d, [p for i, p in enumerate(pairs) if mask >> i & 1])
            g = MonomialMap.from_affine(AffineMap(matrix, Gf2Vec.zero(d))) * eps(word)
            if g.inverse() * plus * g in r_class:
                found = g
                break
        if found is not None:
            break
    assert found is not None
    assert preserves(build(d).lattice, found)
    assert classify_involution(plus).label == classify_involution(minus).label


def test_negation_flips_the_clean_sign():
    t = parse_involution(3, "eps:88")
    assert classify_involution(-t).label.key == "clean1-"


def test_parse_errors():
    for descriptor in ("eta:3:+", "eta:2", "lower:1:0", "lower:10:0:0", "spin", "upper:1"):
        with pytest.raises(HexParseError):
            parse_involution(3, descriptor)
    with pytest.raises(InvalidInvolutionError):
        parse_involution(2, "eta:2:-")
    with pytest.raises(InvalidInvolutionError):
        parse_involution(3, "upper")


def test_commutator_map():
    cmap = commutator_map(eps(BoolWord.from_hex(4, "8888")))
    assert cmap.defect == 1
    assert cmap.split
    assert len(cmap.centre) == 2
    assert commutator_map(build_eta(3, 1)).exponent == 4


def test_dickson_invariant():
    q = QuadraticForm.standard_plus(2)
    transvection = orthogonal_transvection(0b0101, q)
    assert dickson_invariant(transvection, q) == 1
    assert dickson_invariant(transvection * transvection, q) == 0
    with pytest.raises(InvalidInvolutionError):
        orthogonal_transvection(0b0001, q)
    with pytest.raises(InvalidInvolutionError):
        dickson_invariant(Gf2Mat((0b0011, 0b0010, 0b0100, 0b1000), 4), q)


def test_upper_clean_is_in_the_other_frame_class():
    for d in (2, 4):
        report = classify_involution(build_upper_clean(d))
        assert report.label.frame_class == 1
        assert report.defect == d // 2


def test_coset_involutions():
    counts = coset_involutions(parse_involution(4, "eps:8888"))
    assert sum(v for k, v in counts.items() if k.startswith("clean")) == 8
    assert sum(v for k, v in counts.items() if k.startswith("dirty")) == 72
    assert counts["clean1+"] == counts["clean1-"] == 4


def test_clean_coset_members():
    report = clean_coset_members(parse_involution(3, "eps:88"))
    assert report.agrees
    assert report.clean_involutions == 8


def test_centralizer():
    t = parse_involution(3, "eps:88")
    members = centralizer_lower(t)
    assert len(members) == 2 ** (1 + 4), "The radical of x_0 x_1 has dimension 1"
    assert all(m.to_map().commutes_with(t) for m in members)


def test_y_orbit_counts():
    for d, descriptor in (
            (3, "eps:88"), (4, "eps:8888"), (4, "eps:7888"), (5, "eps:78887888"), (6, "eps:8777788878887888")
    ):
        counts = y_orbit_counts(parse_involution(d, descriptor))
        assert all(enumerated == predicted for enumerated, predicted in counts.values())
    with pytest.raises(InvalidInvolutionError):
        y_orbit_counts(parse_involution(3, "eta:2:+"))


def test_commutator_singularities():
    counts = commutator_singularities(parse_involution(3, "eps:88"))
    assert set(counts) <= {0, 1}
    assert sum(counts.values()) == 2 ** (1 + 2 * 3) - len(centralizer_lower(parse_involution(3, "eps:88")))


def test_ul_factorizations():
    t = parse_involution(3, "eps:78")
    pairs = ul_factorizations(t)
    assert len(pairs) == ul_count(1) == 8
    assert all(u.trace != 0 and u * ell.to_map() == t for u, ell in pairs)
    u = next(u for u, _ in pairs if u.trace > 0)
    assert dirty_partners(u) == ul_printed_count(3, 1) == 24
    with pytest.raises(InvalidInvolutionError):
        ul_factorizations(parse_involution(3, "eps:88"))


def _minus_form(m):
    rows = [1 << (m + i) for i in range(m)] + [0] * m
    rows[m - 1] |= 1 << (m - 1)
    rows[2 * m - 1] = 1 << (2 * m - 1)
    return QuadraticForm(Gf2Mat(tuple(rows), 2 * m))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_singular_and_nonsingular_counts(m):
    for nu, q in ((1, QuadraticForm.standard_plus(m)), (-1, _minus_form(m))):
        singular = sum(1 for v in range(1, 1 << (2 * m)) if q.value(v) == 0)
        assert singular == sv(m, nu)
        assert (1 << (2 * m)) - 1 - singular == av(m, nu)
