""" Bit-packed linear algebra over F_2.

Vectors are Python integers (bit i = coordinate i). Matrices are tuples of
row integers and act on the right: x·M is the XOR of the rows selected by x.
"""
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from bwlab.config import settings
from bwlab.errors import NotAlternatingError, InvalidInvolutionError, ResourceGuardError, VerificationError


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def vecmat(x: int, rows: Sequence[int]) -> int:
    """ Computes x·M for a packed row vector x

    >>> vecmat(0b101, (0b01, 0b10, 0b11))
    2
    """
    acc, i = 0, 0
    while x:
        if x & 1:
            acc ^= rows[i]
        x >>= 1
        i += 1
    return acc


@dataclass(frozen=True)
class Gf2Vec:
    bits: int
    n: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"Vector {self.bits:#x} does not fit in {self.n} bits")

    @classmethod
    def zero(cls, n: int) -> "Gf2Vec":
        return cls(0, n)

    @classmethod
    def unit(cls, i: int, n: int) -> "Gf2Vec":
        return cls(1 << i, n)

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "Gf2Vec":
        return cls(sum((v & 1) << i for i, v in enumerate(values)), len(values))

    def to_list(self) -> List[int]:
        return [(self.bits >> i) & 1 for i in range(self.n)]

    def __getitem__(self, i: int) -> int:
        return (self.bits >> i) & 1

    def __add__(self, other: "Gf2Vec") -> "Gf2Vec":
        if other.n != self.n:
            raise ValueError("Vector lengths differ")
        return Gf2Vec(self.bits ^ other.bits, self.n)

    def dot(self, other: "Gf2Vec") -> int:
        return parity(self.bits & other.bits)

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")

    def __bool__(self):
        return self.bits != 0


@dataclass(frozen=True)
class Gf2Mat:
    rows: Tuple[int, ...]
    ncols: int

    def __post_init__(self):
        for row in self.rows:
            if row < 0 or row >> self.ncols:
                raise ValueError(f"Row {row:#x} does not fit in {self.ncols} columns")

    @classmethod
    def zero(cls, nrows: int, ncols: Optional[int] = None) -> "Gf2Mat":
        return cls(tuple([0] * nrows), nrows if ncols is None else ncols)

    @classmethod
    def identity(cls, n: int) -> "Gf2Mat":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_lists(cls, values: Sequence[Sequence[int]]) -> "Gf2Mat":
        ncols = len(values[0]) if values else 0
        return cls(tuple(Gf2Vec.from_list(row).bits for row in values), ncols)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Gf2Vec], ncols: Optional[int] = None) -> "Gf2Mat":
        if ncols is None:
            ncols = vectors[0].n if vectors else 0
        return cls(tuple(v.bits for v in vectors), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def to_lists(self) -> List[List[int]]:
        return [[(row >> j) & 1 for j in range(self.ncols)] for row in self.rows]

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> Gf2Vec:
        return Gf2Vec(self.rows[i], self.ncols)

    def transpose(self) -> "Gf2Mat":
        cols = [0] * self.ncols
        for i, row in enumerate(self.rows):
            j = 0
            while row:
                if row & 1:
                    cols[j] |= 1 << i
                row >>= 1
                j += 1
        return Gf2Mat(tuple(cols), self.nrows)

    def vecmul(self, x: Gf2Vec) -> Gf2Vec:
        """ x·M """
        if x.n != self.nrows:
            raise ValueError("Vector length does not match row count")
        return Gf2Vec(vecmat(x.bits, self.rows), self.ncols)

    def __mul__(self, other: "Gf2Mat") -> "Gf2Mat":
        if self.ncols != other.nrows:
            raise ValueError("Incompatible shapes")
        return Gf2Mat(tuple(vecmat(row, other.rows) for row in self.rows), other.ncols)

    def __add__(self, other: "Gf2Mat") -> "Gf2Mat":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("Incompatible shapes")
        return Gf2Mat(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def form(self, x: int, y: int) -> int:
        """ Bilinear evaluation x·M·yᵀ on packed vectors """
        return parity(vecmat(x, self.rows) & y)

    def inverse(self) -> "Gf2Mat":
        if not self.is_square:
            raise ValueError("Only square matrices can be inverted")
        rows = []
        for j in range(self.ncols):
            x = solve(self, Gf2Vec.unit(j, self.ncols))
            if x is None:
                raise ValueError("Matrix is singular")
            rows.append(x.bits)
        return Gf2Mat(tuple(rows), self.nrows)

    def is_invertible(self) -> bool:
        return self.is_square and rank(self) == self.nrows


def echelon(rows: Sequence[int], ncols: int) -> Tuple[List[int], List[int], List[int]]:
    """ Reduced row echelon form with first-nonzero pivot, scanning columns left to right.

    :param rows: Packed rows
    :param ncols: Number of columns
    :return: (reduced rows, pivot columns, combinations) where combinations[i] records which input rows
        were added to produce reduced row i. Rows at index >= len(pivots) are zero.
    """
    reduced = list(rows)
    combos = [1 << i for i in range(len(reduced))]
    pivots = []
    for col in range(ncols):
        bit = 1 << col
        found = None
        for i in range(len(pivots), len(reduced)):
            if reduced[i] & bit:
                found = i
                break
        if found is None:
            continue
        top = len(pivots)
        reduced[top], reduced[found] = reduced[found], reduced[top]
        combos[top], combos[found] = combos[found], combos[top]
        for i in range(len(reduced)):
            if i != top and reduced[i] & bit:
                reduced[i] ^= reduced[top]
                combos[i] ^= combos[top]
        pivots.append(col)
    return reduced, pivots, combos


def rank(m: Gf2Mat) -> int:
    """ Row rank over F_2

    >>> rank(Gf2Mat.identity(4))
    4
    >>> rank(Gf2Mat.zero(3))
    0
    """
    return len(echelon(m.rows, m.ncols)[1])


def solve(m: Gf2Mat, b: Gf2Vec) -> Optional[Gf2Vec]:
    """ Finds some x with x·m = b

    :param m: Matrix
    :param b: Right hand side, of length m.ncols
    :return: A solution, or None when the system is inconsistent
    """
    if b.n != m.ncols:
        raise ValueError("Right hand side length does not match column count")
    reduced, pivots, combos = echelon(m.rows, m.ncols)
    rest, x = b.bits, 0
    for i, col in enumerate(pivots):
        if (rest >> col) & 1:
            rest ^= reduced[i]
            x ^= combos[i]
    if rest:
        return None
    return Gf2Vec(x, m.nrows)


def nullspace(m: Gf2Mat) -> Gf2Mat:
    """ Basis of the left kernel {x : x·m = 0}, of dimension rows − rank """
    _, pivots, combos = echelon(m.rows, m.ncols)
    return Gf2Mat(tuple(combos[len(pivots):]), m.nrows)


def span_basis(vectors: Sequence[int], ncols: int) -> List[int]:
    """ Reduced echelon basis of the span of packed vectors """
    reduced, pivots, _ = echelon(vectors, ncols)
    return reduced[:len(pivots)]


def in_span(vector: int, basis: Sequence[int], ncols: int) -> bool:
    return solve(Gf2Mat(tuple(basis), ncols), Gf2Vec(vector, ncols)) is not None if basis else vector == 0


def span_elements(basis: Sequence[int]):
    """ Iterates over all 2^k elements of a span in the order of their coordinates """
    for coords in range(1 << len(basis)):
        yield vecmat(coords, basis)


def is_alternating(b: Gf2Mat) -> bool:
    if not b.is_square:
        return False
    if any(b.entry(i, i) for i in range(b.nrows)):
        return False
    return b == b.transpose()


def random_alternating(n: int, rng: random.Random) -> Gf2Mat:
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.getrandbits(1):
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return Gf2Mat(tuple(rows), n)


def symplectic_basis(b: Gf2Mat) -> Tuple[List[Tuple[Gf2Vec, Gf2Vec]], Gf2Mat]:
    """ Splits an alternating form into hyperbolic pairs and a radical.

    Pairs are found greedily: the first remaining vector is paired with the first later vector it is not
    orthogonal to, and the remaining vectors are projected onto the orthogonal of the new pair.

    :param b: Alternating square matrix
    :return: (pairs, radical) with b(a_i, b_j) = δ_ij and the radical spanning the kernel of the form

    >>> pairs, radical = symplectic_basis(Gf2Mat.from_lists([[0, 1, 0], [1, 0, 0], [0, 0, 0]]))
    >>> [(a.bits, c.bits) for a, c in pairs], radical.rows
    ([(1, 2)], (4,))
    """
    if not is_alternating(b):
        raise NotAlternatingError("The form is not alternating (square, symmetric, zero diagonal)")
    n = b.nrows
    remaining = [1 << i for i in range(n)]
    pairs, radical = [], []
    while remaining:
        a = remaining.pop(0)
        partner = next((i for i, v in enumerate(remaining) if b.form(a, v)), None)
        if partner is None:
            radical.append(a)
            continue
        c = remaining.pop(partner)
        remaining = [
            v ^ (a if b.form(v, c) else 0) ^ (c if b.form(v, a) else 0)
            for v in remaining
        ]
        pairs.append((Gf2Vec(a, n), Gf2Vec(c, n)))
    return pairs, Gf2Mat(tuple(radical), n)


def is_totally_isotropic(vectors: Sequence[int], b: Gf2Mat) -> bool:
    return all(b.form(x, y) == 0 for x in vectors for y in vectors)


def commutator_image(u: Gf2Mat) -> List[int]:
    """ Basis of Im(u + 1) """
    return span_basis((u + Gf2Mat.identity(u.nrows)).rows, u.ncols)


@dataclass(frozen=True)
class QuadraticForm:
    """ q(x) = Σ_{i≤j} Q_ij x_i x_j with Q upper triangular, diagonal included """
    matrix: Gf2Mat

    @classmethod
    def standard_plus(cls, d: int) -> "QuadraticForm":
        """ q(a, l) = l(a) on coordinates (a_0..a_{d-1}, l_0..l_{d-1})

        >>> QuadraticForm.standard_plus(1).value(0b11)
        1
        """
        rows = [1 << (d + i) for i in range(d)] + [0] * d
        return cls(Gf2Mat(tuple(rows), 2 * d))

    @property
    def n(self) -> int:
        return self.matrix.nrows

    def value(self, x: int) -> int:
        total, i, rest = 0, 0, x
        while rest:
            if rest & 1:
                total ^= parity(self.matrix.rows[i] & x)
            rest >>= 1
            i += 1
        return total

    def polar(self) -> Gf2Mat:
        return self.matrix + self.matrix.transpose()

    def is_preserved_by(self, g: Gf2Mat) -> bool:
        polar = self.polar()
        for i in range(self.n):
            image = g.rows[i]
            if self.value(image) != self.value(1 << i):
                return False
            for j in range(i + 1, self.n):
                if polar.form(image, g.rows[j]) != polar.form(1 << i, 1 << j):
                    return False
        return True


@dataclass(frozen=True)
class HyperbolicBasis:
    xs: Tuple[Gf2Vec, ...]
    ys: Tuple[Gf2Vec, ...]
    swapped: int

    def as_matrix(self) -> Gf2Mat:
        n = self.xs[0].n
        return Gf2Mat(tuple(v.bits for v in self.xs + self.ys), n)


def _project_out(vectors: Sequence[int], x: int, y: int, polar: Gf2Mat) -> List[int]:
    """ Projects onto ⟨x, y⟩^⊥ for a hyperbolic pair x, y """
    projected = [
        v ^ (x if polar.form(v, y) else 0) ^ (y if polar.form(v, x) else 0)
        for v in vectors
    ]
    return span_basis(projected, polar.ncols)


def _search(basis: Sequence[int], predicate):
    if len(basis) > settings().max_search_dim:
        raise ResourceGuardError(f"Subspace of dimension {len(basis)} is too large to search")
    for v in span_elements(basis):
        if v and predicate(v):
            return v
    return None


def hyperbolic_basis_for_involution(u: Gf2Mat, q: QuadraticForm) -> HyperbolicBasis:
    """ Singular hyperbolic basis x_1..x_d, y_1..y_d in which u swaps x_i and y_i for i ≤ r and fixes the rest,
    r being the dimension of Im(u + 1).

    :param u: Involution preserving q
    :param q: Nondegenerate quadratic form of plus type
    :return: The basis, verified
    """
    n = q.n
    polar = q.polar()
    identity = Gf2Mat.identity(n)
    if rank(polar) != n or n % 2:
        raise InvalidInvolutionError("The quadratic form is degenerate")
    if u * u != identity or not q.is_preserved_by(u):
        raise InvalidInvolutionError("The map is not an isometric involution of the form")
    image = commutator_image(u)
    r = len(image)
    if r < 2:
        raise InvalidInvolutionError(f"The commutator space has dimension {r}, at least 2 is required")
    if all(q.value(w) == 0 for w in image):
        raise InvalidInvolutionError("The commutator space is totally singular")

    current = [1 << i for i in range(n)]
    xs, ys = [], []
    for stage in range(r):
        remaining = r - stage
        w_cur = span_basis([vecmat(v, (u + identity).rows) for v in current], n)

        def acceptable(x):
            if q.value(x) or not polar.form(x, vecmat(x, u.rows)):
                return False
            if remaining >= 2:
                return any(q.value(w) != polar.form(w, x) for w in w_cur)
            return True

        x = _search(current, acceptable)
        if x is None:
            raise VerificationError("No singular vector moved onto a hyperbolic partner was found")
        y = vecmat(x, u.rows)
        xs.append(x)
        ys.append(y)
        current = _project_out(current, x, y, polar)

    while current:
        x = _search(current, lambda v: q.value(v) == 0)
        v = next(v for v in current if polar.form(x, v))
        y = v ^ (x if q.value(v) else 0)
        xs.append(x)
        ys.append(y)
        current = _project_out(current, x, y, polar)

    basis = HyperbolicBasis(tuple(Gf2Vec(x, n) for x in xs), tuple(Gf2Vec(y, n) for y in ys), r)
    _verify_hyperbolic(basis, q, u)
    return basis


def _verify_hyperbolic(basis: HyperbolicBasis, q: QuadraticForm, u: Gf2Mat):
    polar = q.polar()
    xs = [v.bits for v in basis.xs]
    ys = [v.bits for v in basis.ys]
    for i in range(len(xs)):
        if q.value(xs[i]) or q.value(ys[i]):
            raise VerificationError("Basis vector is not singular")
        for j in range(len(xs)):
            if polar.form(xs[i], ys[j]) != (i == j) or (i != j and (polar.form(xs[i], xs[j]) or polar.form(ys[i], ys[j]))):
                raise VerificationError("Hyperbolic relations do not hold")
        moved = vecmat(xs[i], u.rows)
        if i < basis.swapped and moved != ys[i]:
            raise VerificationError("The involution does not swap the pair")
        if i >= basis.swapped and (moved != xs[i] or vecmat(ys[i], u.rows) != ys[i]):
            raise VerificationError("The involution does not fix the pair")


def complete_to_hyperbolic(totally_singular: Sequence[int], q: QuadraticForm) -> List[int]:
    """ Singular partners v_j with B(w_i, v_j) = δ_ij and ⟨v⟩ totally singular, for a maximal totally singular w

    :param totally_singular: Basis of a totally singular subspace of dimension n/2
    :param q: Nondegenerate quadratic form
    :return: The partner basis
    """
    polar = q.polar()
    m = len(totally_singular)
    n = q.n
    dual_rows = Gf2Mat(tuple(vecmat(w, polar.rows) for w in totally_singular), n).transpose()
    partners = []
    for j in range(m):
        v = solve(dual_rows, Gf2Vec.unit(j, m))
        if v is None:
            raise InvalidInvolutionError("The subspace is not independent")
        partners.append(v.bits)
    for j in range(m):
        for i in range(j):
            if polar.form(partners[i], partners[j]):
                partners[j] ^= totally_singular[i]
    for j in range(m):
        if q.value(partners[j]):
            partners[j] ^= totally_singular[j]
    return partners
