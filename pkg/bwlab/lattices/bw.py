""" Barnes–Wall lattices in frame coordinates.

The lattice of dimension 2^d is spanned by 2^{⌊(d−j)/2⌋}·χ_U over the affine flats U of dimension j.
The monomial flats {x : x ⊇ S} already give a triangular basis, and the full flat set is kept as a check.
Norms are 2^{e(d)} times those of the usual normalization, where e(d) = max(0, ⌈d/2⌉ − 1), so the
minimum is 2^{d−1}.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

from bwlab.codes.boolquad import AffineMap, BoolWord
from bwlab.codes.gf2 import Gf2Mat, Gf2Vec
from bwlab.config import settings
from bwlab.errors import ResourceGuardError
from bwlab.groups.pauli import MonomialMap, eps
from bwlab.lattices.zlat import ExactLattice, Fingerprint, canonicalize, fingerprint, preserves

MAX_BUILD_D = 6
MAX_LATTICE_D = 5


@dataclass(frozen=True)
class BwLattice:
    d: int
    lattice: ExactLattice
    scale_exponent: int

    @property
    def dim(self) -> int:
        return 1 << self.d

    def json(self):
        return {"d": self.d, "scale_exponent": self.scale_exponent, "lattice": self.lattice.json()}


def normalization_exponent(d: int) -> int:
    """ e with Gram(build(d)) = 2^e · Gram of the unscaled lattice

    >>> [normalization_exponent(d) for d in range(6)]
    [0, 0, 0, 1, 1, 2]
    """
    return max(0, (d + 1) // 2 - 1)


def _check_d(d: int, ceiling: int = MAX_BUILD_D):
    if d < 0:
        raise ValueError("The dimension exponent must be nonnegative")
    if d > ceiling:
        raise ResourceGuardError(f"Barnes–Wall lattices are built up to d = {ceiling}")


def _superset_indicator(d: int, s: int) -> List[int]:
    return [int(x & s == s) for x in range(1 << d)]


@lru_cache(maxsize=None)
def build(d: int) -> BwLattice:
    """ Barnes–Wall lattice of rank 2^d from the monomial flats

    >>> build(2).lattice.basis
    ((1, 0, 0, 1), (0, 1, 0, 1), (0, 0, 1, 1), (0, 0, 0, 2))
    """
    _check_d(d)
    rows = [
        [(1 << (bin(s).count("1") // 2)) * c for c in _superset_indicator(d, s)]
        for s in range(1 << d)
    ]
    lattice = canonicalize(rows, 1 << d)
    logging.debug(f"Built the Barnes–Wall lattice for d = {d}")
    return BwLattice(d, lattice, normalization_exponent(d))


def _linear_subspaces(d: int) -> List[frozenset]:
    found = {frozenset([0])}
    frontier = list(found)
    while frontier:
        nxt = []
        for space in frontier:
            for v in range(1, 1 << d):
                if v in space:
                    continue
                bigger = frozenset(space | {x ^ v for x in space})
                if bigger not in found:
                    found.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def flat_generators(d: int) -> List[List[int]]:
    """ 2^{⌊(d−j)/2⌋}·χ_U for every affine flat U of dimension j """
    _check_d(d, MAX_LATTICE_D)
    out = []
    for space in _linear_subspaces(d):
        j = len(space).bit_length() - 1
        coefficient = 1 << ((d - j) // 2)
        cosets = set()
        for a in range(1 << d):
            coset = frozenset(a ^ x for x in space)
            if coset in cosets:
                continue
            cosets.add(coset)
            out.append([coefficient if x in coset else 0 for x in range(1 << d)])
    return out


def _fourvolution(vector: List[int]) -> List[int]:
    half = len(vector) // 2
    return vector[half:] + [-x for x in vector[:half]]


@lru_cache(maxsize=None)
def build_recursive(d: int) -> BwLattice:
    """ L_{d+1} = {(x, y) : x, y ∈ L_d, x − y ∈ (1 + f)L_d} from L_1 = Z², with f(x, y) = (y, −x)

    >>> build_recursive(2).lattice == build(2).lattice
    True
    """
    _check_d(d, MAX_LATTICE_D)
    if d < 1:
        raise ValueError("The doubling construction starts at d = 1")
    lattice = canonicalize([[1, 0], [0, 1]])
    for step in range(1, d):
        n = 1 << step
        gens = [list(row) + list(row) for row in lattice.basis]
        for row in lattice.basis:
            image = _fourvolution(list(row))
            gens.append([a + b for a, b in zip(row, image)] + [0] * n)
        lattice = canonicalize(gens, 2 * n)
    return BwLattice(d, lattice, normalization_exponent(d))


def h_table(d: int, k: int) -> int:
    """ Scale exponent of the BW_k pieces found inside BW_d

    >>> h_table(4, 2), h_table(5, 2), h_table(5, 3)
    (1, 2, 1)
    """
    if not 0 <= k <= d:
        raise ValueError("Expected 0 ≤ k ≤ d")
    gap = d - k
    if gap % 2 == 0:
        return gap // 2
    if d % 2 == 0:
        return (gap - 1) // 2
    return (gap - 1) // 2 + 1


@lru_cache(maxsize=None)
def _base_fingerprint(k: int) -> Fingerprint:
    return fingerprint(build(k).lattice)


def ssbw_fingerprint(k: int, h: int) -> Fingerprint:
    """ Fingerprint of build(k) with norms multiplied by 2^h

    >>> ssbw_fingerprint(2, 1).core
    (4, 64, 4, 24)
    """
    _check_d(k, MAX_LATTICE_D)
    if h < 0:
        raise ValueError("Scale exponents are nonnegative")
    return _base_fingerprint(k).scaled(h)


def ssbw_entry(d: int, k: int) -> Fingerprint:
    """ Fingerprint of the scaled BW_k expected inside build(d), in the normalization of build(d) """
    return ssbw_fingerprint(k, h_table(d, k) + normalization_exponent(d) - normalization_exponent(k))


def invariance_generators(d: int) -> List[Tuple[str, MonomialMap]]:
    """ Generators of the monomial part of the BRW group: ε of every monomial of degree at most 2,
    the translations, one transvection and the cyclic shift of coordinates
    """
    out = []
    for s in range(1 << d):
        if bin(s).count("1") <= 2:
            table = sum(1 << x for x in range(1 << d) if x & s == s)
            out.append((f"eps[{s:#x}]", eps(BoolWord(d, table))))
    for i in range(d):
        out.append((f"translate[{i}]", MonomialMap.from_affine(AffineMap.translation(Gf2Vec.unit(i, d)))))
    if d >= 2:
        rows = tuple(0b11 if i == 0 else 1 << i for i in range(d))
        out.append(("transvection", MonomialMap.from_affine(AffineMap(Gf2Mat(rows, d), Gf2Vec.zero(d)))))
        rows = tuple(1 << ((i + 1) % d) for i in range(d))
        out.append(("shift", MonomialMap.from_affine(AffineMap(Gf2Mat(rows, d), Gf2Vec.zero(d)))))
    return out


def _check_generator(args) -> Tuple[str, bool]:
    lattice, name, g = args
    return name, preserves(lattice, g)


@dataclass(frozen=True)
class InvarianceReport:
    d: int
    checks: Tuple[Tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def json(self):
        return {"d": self.d, "ok": self.ok, "checks": {name: passed for name, passed in self.checks}}


def verify_invariance(bwl: BwLattice, threads: Optional[int] = None) -> InvarianceReport:
    """ Checks by Hermite form equality that every generator maps the lattice onto itself """
    _check_d(bwl.d, MAX_LATTICE_D)
    threads = settings().threads if threads is None else threads
    jobs = [(bwl.lattice, name, g) for name, g in invariance_generators(bwl.d)]
    if threads > 1 and bwl.d >= 4:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            checks = list(executor.map(_check_generator, jobs))
    else:
        checks = [_check_generator(job) for job in jobs]
    for name, passed in checks:
        if not passed:
            logging.warning(f"Generator {name} does not preserve the lattice for d = {bwl.d}")
    return InvarianceReport(bwl.d, tuple(checks))
