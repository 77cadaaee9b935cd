import random

import pytest

from bwlab.codes.boolquad import random_invertible
from bwlab.codes.gf2 import (
    Gf2Mat, Gf2Vec, QuadraticForm, commutator_image, complete_to_hyperbolic, hyperbolic_basis_for_involution,
    is_alternating, is_totally_isotropic, nullspace, random_alternating, rank, solve, symplectic_basis, vecmat
)
from bwlab.errors import InvalidInvolutionError, NotAlternatingError
from bwlab.groups.pauli import build_eta, commutator_map, parse_involution


def test_solve_and_nullspace():
    m = Gf2Mat((0b01, 0b01, 0b10), 2)
    assert rank(m) == 2
    x = solve(m, Gf2Vec(0b11, 2))
    assert vecmat(x.bits, m.rows) == 0b11
    kernel = nullspace(m)
    assert kernel.nrows == 1
    assert all(vecmat(row, m.rows) == 0 for row in kernel.rows)

    assert solve(Gf2Mat((0b01, 0b01), 2), Gf2Vec(0b10, 2)) is None, "Second column is never reached"


def test_inverse():
    rng = random.Random(5)
    for d in range(1, 7):
        m = random_invertible(d, rng)
        assert m * m.inverse() == Gf2Mat.identity(d)
        assert m.inverse() * m == Gf2Mat.identity(d)


def test_symplectic_basis():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 8)
        b = random_alternating(n, rng)
        assert is_alternating(b)
        pairs, radical = symplectic_basis(b)
        assert 2 * len(pairs) == rank(b)
        assert len(pairs) * 2 + radical.nrows == n
        for i, (a, c) in enumerate(pairs):
            assert b.form(a.bits, c.bits) == 1
            for j, (a2, c2) in enumerate(pairs):
                if i != j:
                    assert b.form(a.bits, a2.bits) == b.form(a.bits, c2.bits) == 0
        for r in radical.rows:
            assert all(b.form(r, 1 << i) == 0 for i in range(n))


def test_symplectic_basis_rejects():
    with pytest.raises(NotAlternatingError):
        symplectic_basis(Gf2Mat.identity(3))
    with pytest.raises(NotAlternatingError):
        symplectic_basis(Gf2Mat.from_lists([[0, 1], [0, 0]]))


def test_quadratic_form_of_plus_type():
    q = QuadraticForm.standard_plus(3)
    assert q.n == 6
    assert rank(q.polar()) == 6
    singular = sum(1 for v in range(1, 64) if q.value(v) == 0)
    assert singular == (8 - 1) * (4 + 1), "Singular nonzero vectors of a plus type space of dimension 6"
    assert q.is_preserved_by(Gf2Mat.identity(6))


def test_hyperbolic_basis_for_nonsplit_involution():
    for d in (2, 3, 4):
        u = commutator_map(build_eta(d, 1)).matrix
        q = QuadraticForm.standard_plus(d)
        basis = hyperbolic_basis_for_involution(u, q)
        assert basis.swapped == 2
        assert len(basis.xs) == len(basis.ys) == d


def test_hyperbolic_basis_rejects_split():
    q = QuadraticForm.standard_plus(2)
    with pytest.raises(InvalidInvolutionError):
        hyperbolic_basis_for_involution(Gf2Mat.identity(4), q)


def test_hyperbolic_basis_rejects_a_single_swap():
    q = QuadraticForm.standard_plus(2)
    swap = Gf2Mat((0b0100, 0b0010, 0b0001, 0b1000), 4)
    assert q.is_preserved_by(swap)
    assert len(commutator_image(swap)) == 1
    with pytest.raises(InvalidInvolutionError):
        hyperbolic_basis_for_involution(swap, q)


@pytest.mark.parametrize("d,descriptor", [
    (2, "eta:2:+"), (2, "upper"), (3, "eps:88"), (3, "eps:78"), (3, "eta:2:-"), (4, "eps:7888"), (4, "eta:4:+"),
    (4, "upper"),
])
def test_commutator_image_is_totally_isotropic(d, descriptor):
    cmap = commutator_map(parse_involution(d, descriptor))
    polar = QuadraticForm.standard_plus(d).polar()
    image = commutator_image(cmap.matrix)
    assert len(image) == 2 * cmap.defect
    assert is_totally_isotropic(image, polar)
    assert not is_totally_isotropic([1, 1 << d], polar)


def test_complete_to_hyperbolic():
    d = 3
    q = QuadraticForm.standard_plus(d)
    polar = q.polar()
    ws = [1 << i for i in range(d)]
    partners = complete_to_hyperbolic(ws, q)
    for i, w in enumerate(ws):
        for j, v in enumerate(partners):
            assert polar.form(w, v) == int(i == j)
    assert all(q.value(v) == 0 for v in partners)
    assert all(polar.form(v, v2) == 0 for v in partners for v2 in partners)
