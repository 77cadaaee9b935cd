""" Exact integer lattices.

A lattice is stored by the Hermite normal form of its generators (upper echelon, positive pivots, entries
above a pivot reduced into [0, pivot)), so equal lattices have equal bases. Vectors are rows and maps act
on the right. Nothing here uses floating point: reduction runs on Fractions and enumeration bounds are
found with integer square roots.
"""
import logging
import math
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from bwlab.codes.gf2 import Gf2Mat, rank as rank_gf2
from bwlab.config import settings
from bwlab.errors import LatticeNotPreservedError, NotSublatticeError, ResourceGuardError, VerificationError

Number = Union[int, Fraction]
MAX_ENUMERATION_RANK = 32


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """ x, y, g with x·a + y·b = g = ±gcd(a, b)

    >>> _xgcd(12, 42)
    (-3, 1, 6)
    """
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def _dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum(a * b for a, b in zip(u, v))


def _first_nonzero(vec: Sequence[int], start: int = 0) -> Optional[int]:
    for c in range(start, len(vec)):
        if vec[c]:
            return c
    return None


def _absorb(basis: List[List[int]], pivots: List[int], vec: List[int]):
    """ Adds a vector to an echelon basis, keeping the basis echelon """
    j = _first_nonzero(vec)
    while j is not None:
        where = bisect_left(pivots, j)
        if where == len(pivots) or pivots[where] != j:
            basis.insert(where, vec)
            pivots.insert(where, j)
            return
        row = basis[where]
        a, b = row[j], vec[j]
        if b % a == 0:
            q = b // a
            vec = [v - q * r for v, r in zip(vec, row)]
        elif a % b == 0:
            q = a // b
            basis[where], vec = vec, [r - q * v for r, v in zip(row, vec)]
        else:
            x, y, g = _xgcd(a, b)
            basis[where] = [x * r + y * v for r, v in zip(row, vec)]
            vec = [(-b // g) * r + (a // g) * v for r, v in zip(row, vec)]
        j = _first_nonzero(vec, j + 1)


def hermite_rows(gens: Iterable[Sequence[int]], ncols: int) -> List[List[int]]:
    """ Hermite normal form of the row lattice spanned by integer generators

    >>> hermite_rows([[2, 4], [3, 5], [2, 4]], 2)
    [[1, 1], [0, 2]]
    """
    basis: List[List[int]] = []
    pivots: List[int] = []
    for gen in gens:
        vec = [int(x) for x in gen]
        if len(vec) != ncols:
            raise ValueError(f"Generator of length {len(vec)} in ambient dimension {ncols}")
        _absorb(basis, pivots, vec)
    for i, p in enumerate(pivots):
        if basis[i][p] < 0:
            basis[i] = [-x for x in basis[i]]
    for j, p in enumerate(pivots):
        pivot = basis[j][p]
        for i in range(j):
            q = basis[i][p] // pivot
            if q:
                basis[i] = [a - q * b for a, b in zip(basis[i], basis[j])]
    return basis


def _domain_matrix(rows: Sequence[Sequence[int]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), ncols), ZZ)


@dataclass(frozen=True)
class ExactLattice:
    """ Lattice spanned by the rows of basis / denominator in Q^ambient_dim """
    ambient_dim: int
    basis: Tuple[Tuple[int, ...], ...]
    denominator: int = 1

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> List[int]:
        return [_first_nonzero(row) for row in self.basis]

    @property
    def integral_coordinates(self) -> bool:
        return self.denominator == 1

    def rows(self) -> List[List[Number]]:
        if self.denominator == 1:
            return [list(row) for row in self.basis]
        return [[Fraction(x, self.denominator) for x in row] for row in self.basis]

    def gram(self) -> List[List[Number]]:
        scale = self.denominator ** 2
        return [
            [Fraction(_dot(u, v), scale) if scale > 1 else _dot(u, v) for v in self.basis]
            for u in self.basis
        ]

    def _integer_gram(self) -> List[List[int]]:
        return [[_dot(u, v) for v in self.basis] for u in self.basis]

    def coordinates(self, vector: Sequence[Number]) -> Optional[List[int]]:
        """ Integer coordinates over the basis, or None when the vector is not in the lattice """
        scaled = [Fraction(x) * self.denominator for x in vector]
        if len(scaled) != self.ambient_dim or any(x.denominator != 1 for x in scaled):
            return None
        vec = [int(x) for x in scaled]
        coords = []
        for row, p in zip(self.basis, self.pivots):
            a, b = row[p], vec[p]
            if b % a:
                return None
            q = b // a
            coords.append(q)
            if q:
                vec = [v - q * r for v, r in zip(vec, row)]
        if any(vec):
            return None
        return coords

    def __contains__(self, vector: Sequence[Number]) -> bool:
        return self.coordinates(vector) is not None

    def combine(self, coords: Sequence[int]) -> List[Number]:
        out = [0] * self.ambient_dim
        for c, row in zip(coords, self.basis):
            if c:
                out = [o + c * r for o, r in zip(out, row)]
        if self.denominator == 1:
            return out
        return [Fraction(x, self.denominator) for x in out]

    def scaled(self, factor: int) -> "ExactLattice":
        return canonicalize([[factor * x for x in row] for row in self.basis], self.ambient_dim, self.denominator)

    def is_sublattice_of(self, other: "ExactLattice") -> bool:
        return all(row in other for row in self.rows())

    def json(self):
        out = {"ambient_dim": self.ambient_dim, "basis": [list(row) for row in self.basis]}
        if self.denominator != 1:
            out["denominator"] = self.denominator
        return out

    @classmethod
    def from_json(cls, data: Dict) -> "ExactLattice":
        return canonicalize(data["basis"], data["ambient_dim"], data.get("denominator", 1))

    def __str__(self):
        return f"<ExactLattice rank={self.rank} ambient={self.ambient_dim}>"


def canonicalize(gens: Iterable[Sequence[int]], ambient_dim: Optional[int] = None, denominator: int = 1) -> ExactLattice:
    """ Canonical lattice spanned by integer generator rows (divided by denominator)

    >>> canonicalize([[1, 0], [0, 1], [1, 1]]).basis
    ((1, 0), (0, 1))
    """
    gens = [list(g) for g in gens]
    if ambient_dim is None:
        if not gens:
            raise ValueError("The ambient dimension of an empty generating set must be given")
        ambient_dim = len(gens[0])
    if denominator < 1:
        raise ValueError("Denominator must be positive")
    basis = hermite_rows(gens, ambient_dim)
    common = math.gcd(denominator, *[x for row in basis for x in row]) if basis else denominator
    if common > 1:
        basis = [[x // common for x in row] for row in basis]
        denominator //= common
    return ExactLattice(ambient_dim, tuple(tuple(row) for row in basis), denominator)


def det(lattice: ExactLattice) -> Number:
    """ Determinant of the Gram matrix

    >>> det(canonicalize([[1, 1, 0, 0], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]]))
    4
    """
    if not lattice.rank:
        return 1
    value = int(_domain_matrix(lattice._integer_gram(), lattice.rank).det())
    if lattice.denominator == 1:
        return value
    return Fraction(value, lattice.denominator ** (2 * lattice.rank))


def discriminant_group(lattice: ExactLattice) -> List[int]:
    """ Invariant factors of the dual quotient of an integral lattice, trivial factors omitted """
    if lattice.denominator != 1:
        raise ValueError("Only integral coordinates are supported")
    if not lattice.rank:
        return []
    factors = invariant_factors(_domain_matrix(lattice._integer_gram(), lattice.rank))
    return [abs(int(f)) for f in factors if abs(int(f)) != 1]


def dual(lattice: ExactLattice) -> ExactLattice:
    """ The dual lattice inside the rational span of the lattice """
    r, n = lattice.rank, lattice.ambient_dim
    if not r:
        return lattice
    gram = _domain_matrix(lattice._integer_gram(), r).convert_to(QQ)
    rows = (gram.inv() * _domain_matrix(lattice.basis, n).convert_to(QQ)).to_list()
    fractions = [[Fraction(int(x.numerator), int(x.denominator)) * lattice.denominator for x in row] for row in rows]
    common = math.lcm(*[x.denominator for row in fractions for x in row])
    return canonicalize([[int(x * common) for x in row] for row in fractions], n, common)


def index_in(lattice: ExactLattice, sub: ExactLattice) -> int:
    """ |L : M| for a sublattice of the same rank

    >>> z2 = canonicalize([[1, 0], [0, 1]])
    >>> index_in(z2, z2.scaled(2))
    4
    """
    if sub.rank != lattice.rank or not sub.is_sublattice_of(lattice):
        raise NotSublatticeError("The second lattice is not a full rank sublattice of the first")
    ratio = Fraction(det(sub)) / Fraction(det(lattice))
    if ratio.denominator != 1:
        raise VerificationError("Determinant ratio of a sublattice is not an integer")
    root = math.isqrt(ratio.numerator)
    if root * root != ratio.numerator:
        raise VerificationError("Determinant ratio of a sublattice is not a square")
    return root


def sum_lattice(*lattices: ExactLattice) -> ExactLattice:
    if not lattices:
        raise ValueError("At least one lattice is required")
    n = lattices[0].ambient_dim
    den = math.lcm(*[lat.denominator for lat in lattices])
    gens = [[x * (den // lat.denominator) for x in row] for lat in lattices for row in lat.basis]
    return canonicalize(gens, n, den)


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> List[List[int]]:
    """ Basis of {c ∈ Z^r : c·rows = 0}, from the Hermite form of [rows | I]

    >>> integer_kernel([[1, 2], [2, 4]], 2)
    [[2, -1]]
    """
    r = len(rows)
    augmented = [list(row) + [int(i == j) for j in range(r)] for i, row in enumerate(rows)]
    reduced = hermite_rows(augmented, ncols + r)
    return [row[ncols:] for row in reduced if not any(row[:ncols])]


def _images(lattice: ExactLattice, t) -> List[List[int]]:
    if lattice.denominator != 1:
        raise ValueError("Only integral coordinates are supported")
    return [t.apply(list(row)) for row in lattice.basis]


def preserves(lattice: ExactLattice, t) -> bool:
    """ Whether the map sends the lattice onto itself """
    return canonicalize(_images(lattice, t), lattice.ambient_dim) == lattice


def _require_preserved(lattice: ExactLattice, t) -> List[List[int]]:
    images = _images(lattice, t)
    if canonicalize(images, lattice.ambient_dim) != lattice:
        raise LatticeNotPreservedError("The map does not send the lattice onto itself")
    return images


def eigenlattice(lattice: ExactLattice, t, sign: int) -> ExactLattice:
    """ {x ∈ L : x·t = sign·x} for a map t with an ``apply`` method on row vectors """
    images = _require_preserved(lattice, t)
    shifted = [[a - sign * b for a, b in zip(image, row)] for image, row in zip(images, lattice.basis)]
    kernel = integer_kernel(shifted, lattice.ambient_dim)
    return canonicalize([lattice.combine(c) for c in kernel], lattice.ambient_dim)


def total_eigenlattice(lattice: ExactLattice, t) -> ExactLattice:
    """ L^+(t) ⊕ L^−(t) """
    return sum_lattice(eigenlattice(lattice, t, 1), eigenlattice(lattice, t, -1))


def action_matrix(lattice: ExactLattice, t) -> List[List[int]]:
    """ Matrix of t in basis coordinates: row i holds the coordinates of b_i·t """
    out = []
    for image in _require_preserved(lattice, t):
        coords = lattice.coordinates(image)
        if coords is None:
            raise LatticeNotPreservedError("Image of a basis vector left the lattice")
        out.append(coords)
    return out


def rank_mod2(lattice: ExactLattice, t) -> int:
    """ Rank of t − 1 on L/2L """
    matrix = action_matrix(lattice, t)
    rows = tuple(
        sum(((entry - int(i == j)) & 1) << j for j, entry in enumerate(row)) for i, row in enumerate(matrix)
    )
    return rank_gf2(Gf2Mat(rows, lattice.rank))


def trace_on(lattice: ExactLattice, t) -> int:
    """ Trace of a map preserving the lattice """
    return sum(row[i] for i, row in enumerate(action_matrix(lattice, t)))


def _gso(b: Sequence[Sequence[int]]) -> Tuple[List[List[Fraction]], List[Fraction]]:
    n = len(b)
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (Fraction(_dot(b[i], b[j])) - sum(mu[j][l] * mu[i][l] * norms[l] for l in range(j))) / norms[j]
        norms[i] = Fraction(_dot(b[i], b[i])) - sum(mu[i][l] ** 2 * norms[l] for l in range(i))
    return mu, norms


def lll_reduce(rows: Sequence[Sequence[int]], delta: Optional[Fraction] = None) -> List[List[int]]:
    """ LLL reduction in exact rational arithmetic

    >>> lll_reduce([[1, 0], [7, 1]])
    [[1, 0], [0, 1]]
    """
    delta = settings().lll_delta if delta is None else Fraction(delta)
    b = [list(row) for row in rows]
    n = len(b)
    if n < 2:
        return b
    mu, norms = _gso(b)
    k = 1
    while k < n:
        for j in reversed(range(k)):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                for l in range(j):
                    mu[k][l] -= q * mu[j][l]
                mu[k][j] -= q
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, norms = _gso(b)
            k = max(k - 1, 1)
    return b


def _interval(center: Fraction, radius_squared: Fraction) -> range:
    """ Integers v with (v − center)² ≤ radius_squared """
    root = math.isqrt(radius_squared.numerator // radius_squared.denominator) + 1
    lo, hi = math.floor(center) - root, math.ceil(center) + root
    values = [v for v in range(lo, hi + 1) if (v - center) ** 2 <= radius_squared]
    return range(values[0], values[-1] + 1) if values else range(0)


def _enumerate(mu, norms, bound: Fraction, top: Optional[int], guard: int) -> List[List[int]]:
    n = len(norms)
    x = [0] * n
    found: List[List[int]] = []
    nodes = 0

    def descend(i: int, remaining: Fraction):
        nonlocal nodes
        center = -sum((mu[j][i] * x[j] for j in range(i + 1, n)), Fraction(0))
        values = _interval(center, remaining / norms[i])
        if i == n - 1 and top is not None:
            values = [top] if top in values else []
        for v in values:
            spent = (v - center) ** 2 * norms[i]
            nodes += 1
            if nodes > guard:
                raise ResourceGuardError(f"Enumeration exceeded {guard} nodes")
            x[i] = v
            if i == 0:
                found.append(list(x))
            else:
                descend(i - 1, remaining - spent)
        x[i] = 0

    descend(n - 1, Fraction(bound))
    return found


def _enumerate_branch(args):
    mu, norms, bound, top, guard = args
    return _enumerate(mu, norms, bound, top, guard)


def short_vectors(lattice: ExactLattice, bound: Number, threads: Optional[int] = None) -> List[List[Number]]:
    """ Every nonzero vector of norm at most bound, by LLL reduction followed by Fincke–Pohst enumeration.
    Top level branches go to worker processes when several threads are allowed.

    >>> len(short_vectors(canonicalize([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 1))
    6
    """
    if lattice.rank > MAX_ENUMERATION_RANK:
        raise ResourceGuardError(f"Enumeration is limited to rank {MAX_ENUMERATION_RANK}")
    if not lattice.rank:
        return []
    config = settings()
    threads = config.threads if threads is None else threads
    reduced = lll_reduce(lattice.basis)
    mu, norms = _gso(reduced)
    scaled_bound = Fraction(bound) * lattice.denominator ** 2
    n = len(reduced)

    if threads > 1 and n >= 8:
        tops = list(_interval(Fraction(0), scaled_bound / norms[n - 1]))
        with ProcessPoolExecutor(max_workers=threads) as executor:
            chunks = list(executor.map(
                _enumerate_branch, [(mu, norms, scaled_bound, top, config.max_enum_nodes) for top in tops]
            ))
        coords = [c for chunk in chunks for c in chunk]
    else:
        coords = _enumerate(mu, norms, scaled_bound, None, config.max_enum_nodes)

    out = []
    for c in coords:
        if not any(c):
            continue
        vec = [0] * lattice.ambient_dim
        for ci, row in zip(c, reduced):
            if ci:
                vec = [v + ci * r for v, r in zip(vec, row)]
        out.append(vec if lattice.denominator == 1 else [Fraction(v, lattice.denominator) for v in vec])
    logging.debug(f"Enumerated {len(out)} vectors of norm at most {bound} in rank {n}")
    return out


def norm(vector: Sequence[Number]) -> Number:
    return _dot(vector, vector)


def _minimum_bound(lattice: ExactLattice) -> Number:
    scale = lattice.denominator ** 2
    best = min(_dot(row, row) for row in lll_reduce(lattice.basis))
    return best if scale == 1 else Fraction(best, scale)


def min_norm(lattice: ExactLattice) -> Number:
    """
    >>> min_norm(canonicalize([[1, 1, 0, 0], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]]))
    2
    """
    return min(norm(v) for v in short_vectors(lattice, _minimum_bound(lattice)))


def kissing(lattice: ExactLattice) -> int:
    vectors = short_vectors(lattice, _minimum_bound(lattice))
    minimum = min(norm(v) for v in vectors)
    return sum(1 for v in vectors if norm(v) == minimum)


@dataclass(frozen=True)
class Fingerprint:
    """ Isometry invariants. Equal fingerprints are necessary for isometry, not sufficient.

    theta_prefix holds (norm, count) for every nonzero shell with norm in [min_norm, min_norm + depth].
    Minimum and kissing number are left unset above the configured enumeration rank.
    """
    rank: int
    det: Number
    min_norm: Optional[Number] = None
    kissing: Optional[int] = None
    theta_prefix: Tuple[Tuple[Number, int], ...] = field(default_factory=tuple)

    def scaled(self, h: int) -> "Fingerprint":
        """ Fingerprint of the lattice with every norm multiplied by 2^h """
        factor = 1 << h
        return Fingerprint(
            self.rank,
            self.det * factor ** self.rank,
            None if self.min_norm is None else self.min_norm * factor,
            self.kissing,
            tuple((n * factor, count) for n, count in self.theta_prefix),
        )

    @property
    def core(self) -> Tuple:
        return self.rank, self.det, self.min_norm, self.kissing

    def json(self):
        return {
            "rank": self.rank,
            "det": str(self.det),
            "min_norm": None if self.min_norm is None else str(self.min_norm),
            "kissing": self.kissing,
            "theta_prefix": [[str(n), count] for n, count in self.theta_prefix],
        }


def fingerprint(lattice: ExactLattice, depth: int = 0, threads: Optional[int] = None) -> Fingerprint:
    """ Rank, determinant and, within the enumeration ceiling, the first shells of the theta series """
    value = det(lattice)
    if not lattice.rank or lattice.rank > settings().max_enum_rank:
        return Fingerprint(lattice.rank, value)
    start = _minimum_bound(lattice)
    vectors = short_vectors(lattice, start + depth, threads)
    minimum = min(norm(v) for v in vectors)
    shells: Dict[Number, int] = {}
    for v in vectors:
        value_norm = norm(v)
        if value_norm <= minimum + depth:
            shells[value_norm] = shells.get(value_norm, 0) + 1
    return Fingerprint(lattice.rank, value, minimum, shells[minimum], tuple(sorted(shells.items())))


def orthogonal_decomposition(lattice: ExactLattice, threads: Optional[int] = None) -> List[ExactLattice]:
    """ Orthogonal summands from the connected components of the inner product graph on the indecomposable
    vectors among the shortest shells that generate the lattice. A vector v is decomposable when v = x + y with
    x ⊥ y both nonzero; x then lies in the same shells and satisfies x·v = x·x. The indecomposable vectors still
    generate the lattice and their components are the unique indecomposable summands. The summands are checked
    to add up to the lattice.
    """
    if not lattice.rank:
        return []
    reduced = lll_reduce(lattice.basis)
    scale = lattice.denominator ** 2
    stops = sorted({Fraction(_dot(row, row), scale) for row in reduced})
    bound = min_norm(lattice)
    vectors = short_vectors(lattice, bound, threads)
    while canonicalize(
            [[x * lattice.denominator for x in v] for v in vectors], lattice.ambient_dim, lattice.denominator
    ) != lattice:
        bound = next(s for s in stops if s > bound)
        vectors = short_vectors(lattice, bound, threads)

    norms = [_dot(v, v) for v in vectors]
    shortest = min(norms)

    def indecomposable(i):
        return norms[i] == shortest or not any(
            0 < norms[j] < norms[i] and _dot(vectors[j], vectors[i]) == norms[j] for j in range(len(vectors))
        )

    halves = [v for i, v in enumerate(vectors) if v[_first_nonzero(v)] > 0 and indecomposable(i)]
    parent = list(range(len(halves)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(halves)):
        for j in range(i + 1, len(halves)):
            if _dot(halves[i], halves[j]):
                parent[find(i)] = find(j)

    components: Dict[int, List[List[Number]]] = {}
    for i, v in enumerate(halves):
        components.setdefault(find(i), []).append(v)
    summands = [
        canonicalize([[int(x * lattice.denominator) for x in v] for v in comp], lattice.ambient_dim, lattice.denominator)
        for comp in components.values()
    ]
    summands.sort(key=lambda s: (s.rank, s.basis))
    if sum(s.rank for s in summands) != lattice.rank or sum_lattice(*summands) != lattice:
        raise VerificationError("Orthogonal summands do not add up to the lattice")
    return summands


def doubly_even_check(lattice: ExactLattice, norm_scale: Number = 1) -> bool:
    """ Whether the Gram matrix divided by norm_scale is integral with diagonal ≡ 0 mod 4 and even off-diagonal

    >>> doubly_even_check(canonicalize([[2, 0], [0, 2]]))
    True
    """
    scale = Fraction(norm_scale)
    for i, row in enumerate(lattice.gram()):
        for j, entry in enumerate(row):
            value = Fraction(entry) / scale
            if value.denominator != 1:
                return False
            if (i == j and value.numerator % 4) or value.numerator % 2:
                return False
    return True
