import pytest

from bwlab.errors import ResourceGuardError
from bwlab.lattices.bw import (
    build, build_recursive, flat_generators, h_table, normalization_exponent, ssbw_entry, ssbw_fingerprint,
    verify_invariance
)
from bwlab.lattices.zlat import canonicalize, det, fingerprint, min_norm


def test_small_bases():
    assert build(0).lattice.basis == ((1,),)
    assert build(1).lattice.basis == ((1, 0), (0, 1))
    assert build(2).lattice.basis == ((1, 0, 0, 1), (0, 1, 0, 1), (0, 0, 1, 1), (0, 0, 0, 2))


@pytest.mark.parametrize("d,core", [
    (1, (2, 1, 1, 4)),
    (2, (4, 4, 2, 24)),
    (3, (8, 256, 4, 240)),
    (4, (16, 2 ** 24, 8, 4320)),
])
def test_fingerprints(d, core):
    assert fingerprint(build(d).lattice).core == core


def test_determinant_follows_the_monomial_rows():
    for d in range(1, 6):
        exponent = sum(bin(s).count("1") // 2 for s in range(1 << d))
        assert det(build(d).lattice) == 4 ** exponent


def test_d3_is_the_first_order_code_plus_2z8():
    rows = [[2 * int(i == j) for j in range(8)] for i in range(8)]
    rows += [[1] * 8] + [[int(x >> i & 1) for x in range(8)] for i in range(3)]
    assert build(3).lattice == canonicalize(rows)


def test_flat_generators_span_the_same_lattice():
    for d in range(1, 5):
        assert canonicalize(flat_generators(d), 1 << d) == build(d).lattice


def test_recursive_construction():
    assert build_recursive(2).lattice == build(2).lattice
    with pytest.raises(ValueError):
        build_recursive(0)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_recursive_fingerprints(d):
    assert fingerprint(build_recursive(d).lattice).core == fingerprint(build(d).lattice).core


@pytest.mark.slow
def test_recursive_d5():
    recursive, direct = build_recursive(5).lattice, build(5).lattice
    assert det(recursive) == det(direct) == 4 ** 32
    assert min_norm(recursive) == min_norm(direct) == 16


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_invariance(d):
    report = verify_invariance(build(d), threads=1)
    assert report.ok, report.json()
    assert any(name == "shift" for name, _ in report.checks) == (d >= 2)


def test_normalization():
    assert [normalization_exponent(d) for d in range(7)] == [0, 0, 0, 1, 1, 2, 2]
    for d in range(1, 5):
        assert min_norm(build(d).lattice) == 1 << (d - 1)
        assert build(d).scale_exponent == normalization_exponent(d)


def test_h_table():
    assert [h_table(4, k) for k in range(5)] == [2, 1, 1, 0, 0]
    assert h_table(5, 2) == 2
    assert h_table(5, 3) == 1
    with pytest.raises(ValueError):
        h_table(3, 4)


def test_scaled_entries():
    assert ssbw_fingerprint(2, 1).core == (4, 64, 4, 24)
    assert ssbw_entry(3, 1).core == (2, 16, 4, 4)
    assert ssbw_entry(4, 2).core == (4, 1024, 8, 24)
    with pytest.raises(ValueError):
        ssbw_fingerprint(2, -1)


def test_resource_guards():
    with pytest.raises(ResourceGuardError):
        build(7)
    with pytest.raises(ResourceGuardError):
        flat_generators(6)
    with pytest.raises(ValueError):
        build(-1)
    assert build(6).lattice.rank == 64


@pytest.mark.slow
def test_d5():
    lattice = build(5).lattice
    assert verify_invariance(build(5), threads=1).ok
    assert min_norm(lattice) == 16
