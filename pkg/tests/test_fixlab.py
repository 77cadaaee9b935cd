import random

import pytest

from bwlab.errors import InvalidInvolutionError, NotSublatticeError, ResourceGuardError
from bwlab.groups.pauli import (
    InvolutionKind, MonomialMap, build_eta, classify_involution, parse_involution, random_brw_monomial
)
from bwlab.lattices.bw import build, ssbw_entry
from bwlab.lattices.fixlab import (
    annihilator, fix_report, reflection_fixture, rssd_orbit_label, rssd_test, ssd_test, trace_table
)
from bwlab.lattices.zlat import canonicalize, eigenlattice

D4 = canonicalize([[1, 1, 0, 0], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]])
A2 = canonicalize([[1, -1, 0, 0], [0, 1, -1, 0]])


@pytest.mark.parametrize("d,descriptor,key,ranks", [
    (3, "eps:88", "clean1+", (6, 2)),
    (3, "eps:78", "dirty1", (4, 4)),
    (4, "eps:8888", "clean1+", (12, 4)),
])
def test_split_fixed_lattices(d, descriptor, key, ranks):
    report = fix_report(d, parse_involution(d, descriptor), threads=1)
    assert report.label.key == key
    assert (report.plus.rank, report.minus.rank) == ranks
    assert report.passed, [c.json() for c in report.checks if not c.passed]
    assert report.summands == {}


def test_small_fixed_lattice_is_scaled_bw():
    report = fix_report(3, parse_involution(3, "eps:88"), threads=1)
    assert report.minus == ssbw_entry(3, 1)
    assert any(c.name == "small_is_ssbw1" and c.passed for c in report.checks)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_nonsplit_fixed_lattices(d):
    report = fix_report(d, parse_involution(d, "eta:2:+"), threads=1)
    assert report.label.key == "nonsplit1"
    assert report.plus.rank == report.minus.rank == 1 << (d - 1)
    assert set(report.summands) == {"+", "-"}
    assert report.passed, [c.json() for c in report.checks if not c.passed]
    if d == 3:
        assert len(report.summands["+"]) == 4


def test_fix_report_json():
    document = fix_report(3, parse_involution(3, "eps:78"), threads=1).json()
    assert document["passed"] is True
    assert document["trace"] == 0
    assert "certification" in document


def test_fix_report_errors():
    with pytest.raises(InvalidInvolutionError):
        fix_report(3, parse_involution(2, "eps:8"))
    with pytest.raises(ResourceGuardError):
        fix_report(6, MonomialMap.identity(6))


def test_annihilator():
    ann = annihilator(D4, A2)
    assert ann.rank == 2
    assert [1, 1, 1, 1] in ann
    assert [0, 0, 0, 2] in ann
    assert annihilator(D4, canonicalize([[0, 0, 0, 0]])) == D4


def test_rssd_of_a_fixed_lattice():
    lattice = build(3).lattice
    t = parse_involution(3, "eps:88")
    minus = eigenlattice(lattice, t, -1)
    found = rssd_test(lattice, minus)
    assert found is not None
    assert found.annihilator == eigenlattice(lattice, t, 1)
    assert found.involution.as_monomial() == t
    assert rssd_orbit_label(lattice, minus, threads=1) == classify_involution(t).label


def test_rssd_rejections():
    assert rssd_test(D4, A2) is None
    assert ssd_test(D4)
    assert not ssd_test(A2)
    with pytest.raises(NotSublatticeError):
        rssd_test(D4, canonicalize([[1, 0, 0, 0]]))
    with pytest.raises(InvalidInvolutionError):
        rssd_orbit_label(D4, A2)


@pytest.mark.parametrize("count", [1, 2, 3])
def test_reflection_fixtures(count):
    """Reflections in orthogonal minimal vectors give RSSD sublattices which are not SSD"""
    lattice = build(3).lattice
    involution, minus = reflection_fixture(3, count)
    assert minus == canonicalize([[2 * int(i == j) for j in range(8)] for i in range(count)], 8)
    found = rssd_test(lattice, minus)
    assert found is not None
    assert found.involution.as_monomial().trace == 8 - 2 * count
    assert not ssd_test(minus)


def test_trace_table_clean():
    table = trace_table(3, parse_involution(3, "eps:88"))
    assert table.label.key == "clean1+"
    assert table.rows
    assert table.passed, table.json()


def test_trace_table_dirty():
    table = trace_table(3, parse_involution(3, "eps:78"))
    assert table.counts["ul_enumerated"] == 8
    assert table.counts["dirty_partners"] == table.counts["ul_printed"] == 24
    assert table.ell_traces == (2, -2)
    assert len(table.joint) == 4
    assert table.passed, table.json()


def test_trace_table_errors():
    with pytest.raises(InvalidInvolutionError):
        trace_table(3, parse_involution(3, "eta:2:+"))
    with pytest.raises(InvalidInvolutionError):
        trace_table(3, -MonomialMap.identity(3))
    with pytest.raises(ResourceGuardError):
        trace_table(6, MonomialMap.identity(6))


@pytest.mark.slow
def test_d5_clean():
    report = fix_report(5, parse_involution(5, "eps:88888888"), threads=1)
    assert report.label.key == "clean1+"
    assert report.passed


@pytest.mark.parametrize("d,descriptor,key,ranks", [
    (3, "eps:88", "clean1-", (2, 6)),
    (4, "eps:8888", "clean1-", (4, 12)),
])
def test_negative_trace_fixed_lattices(d, descriptor, key, ranks):
    t = -parse_involution(d, descriptor)
    report = fix_report(d, t, threads=1)
    assert report.label.key == key
    assert report.trace == -(1 << (d - 1))
    assert (report.plus.rank, report.minus.rank) == ranks
    assert report.plus == ssbw_entry(d, d - 2)
    assert report.passed, [c.json() for c in report.checks if not c.passed]


def test_upper_clean_fixed_lattices():
    report = fix_report(4, parse_involution(4, "upper"), threads=1)
    assert report.label.kind == InvolutionKind.CLEAN
    assert (report.label.defect, report.label.frame_class) == (2, 1)
    assert sorted((report.plus.rank, report.minus.rank)) == [6, 10]
    assert report.passed, [c.json() for c in report.checks if not c.passed]


def test_nonsplit_variants_share_fixed_lattices():
    plus = fix_report(4, parse_involution(4, "eta:2:+"), threads=1)
    minus = fix_report(4, parse_involution(4, "eta:2:-"), threads=1)
    assert minus.label == plus.label
    assert minus.passed, [c.json() for c in minus.checks if not c.passed]
    assert (minus.plus.core, minus.minus.core) == (plus.plus.core, plus.minus.core)


def test_nonsplit_summands_d3():
    report = fix_report(3, parse_involution(3, "eta:2:+"), threads=1)
    assert report.plus.core == report.minus.core == (4, 256, 4, 8)
    assert [p.core for p in report.summands["-"]] == [(1, 4, 4, 2)] * 4


@pytest.mark.slow
def test_d5_nonsplit():
    report = fix_report(5, parse_involution(5, "eta:2:+"), threads=1)
    assert report.label.key == "nonsplit1"
    assert report.plus.rank == report.minus.rank == 16
    assert report.passed, [c.json() for c in report.checks if not c.passed]


@pytest.mark.parametrize("d,k,sign", [
    (3, 1, 1), (3, 1, -1), (4, 1, 1), (4, 1, -1), (4, 2, 1),
    pytest.param(5, 2, -1, marks=pytest.mark.slow),
])
def test_rssd_orbit_label_is_a_conjugation_invariant(d, k, sign):
    lattice = build(d).lattice
    rng = random.Random(100 * d + 10 * k + sign)
    expected = classify_involution(build_eta(d, k, sign)).label
    assert expected.key == f"nonsplit{k}"
    for _ in range(2):
        g = random_brw_monomial(d, rng)
        t = g.inverse() * build_eta(d, k, sign) * g
        minus = eigenlattice(lattice, t, -1)
        assert rssd_orbit_label(lattice, minus, threads=1) == expected


@pytest.mark.parametrize("d,descriptor", [
    (4, "eps:8888"), (4, "eps:7888"), pytest.param(5, "eps:78887888", marks=pytest.mark.slow),
])
def test_trace_table_clean_beyond_d3(d, descriptor):
    table = trace_table(d, parse_involution(d, descriptor))
    assert table.rows
    assert all(abs(r.plus_trace) == 1 << (d - table.label.defect - 1) for r in table.rows)
    assert table.passed, table.json()


@pytest.mark.parametrize("d,descriptor", [(4, "eps:7878"), pytest.param(5, "eps:78787878", marks=pytest.mark.slow)])
def test_trace_table_dirty_beyond_d3(d, descriptor):
    table = trace_table(d, parse_involution(d, descriptor))
    assert table.label.key == "dirty1"
    assert table.ell_traces == (1 << (d - 2), -(1 << (d - 2)))
    assert len(table.joint) == 4
    assert table.passed, table.json()
