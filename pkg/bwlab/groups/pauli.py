""" The lower group R ≅ 2^{1+2d} as signed coordinate permutations of Z^{2^d}.

A monomial map sends e_x to ±e_{perm[x]}. Maps compose left to right: ``g * h`` applies g first, which
matches the right action on row vectors used by the lattice code, and conjugation reads g^t = t^{-1} g t.

An element X_aZ_ℓ of R sends e_x to (−1)^{ℓ(x)} e_{x+a}. Its image in R/Z(R) is the packed vector
a | ℓ << d, on which q(a, ℓ) = ℓ(a) is the quadratic form of plus type.
"""
import logging
import math
import random
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from bwlab.codes.boolquad import BoolWord, AffineMap, hex_digits, random_affine_map, random_word, to_anf
from bwlab.codes.gf2 import (
    Gf2Mat, Gf2Vec, QuadraticForm, complete_to_hyperbolic, in_span, nullspace,
    parity, rank, span_basis, vecmat
)
from bwlab.errors import HexParseError, InvalidInvolutionError, NotNormalizingError, VerificationError


def _dimension(n_points: int) -> int:
    d = n_points.bit_length() - 1
    if n_points != 1 << d:
        raise ValueError(f"{n_points} is not a power of two")
    return d


@dataclass(frozen=True)
class MonomialMap:
    """ e_x ↦ (−1)^{signs_x} e_{perm[x]} """
    perm: Tuple[int, ...]
    signs: int

    def __post_init__(self):
        _dimension(len(self.perm))
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("The point map is not a permutation")
        if self.signs < 0 or self.signs >> len(self.perm):
            raise ValueError("Sign word is longer than the number of points")

    @classmethod
    def identity(cls, d: int) -> "MonomialMap":
        return cls(tuple(range(1 << d)), 0)

    @classmethod
    def diagonal(cls, signs: int, d: int) -> "MonomialMap":
        return cls(tuple(range(1 << d)), signs)

    @classmethod
    def from_affine(cls, g: AffineMap) -> "MonomialMap":
        return cls(g.permutation(), 0)

    @property
    def size(self) -> int:
        return len(self.perm)

    @property
    def d(self) -> int:
        return _dimension(len(self.perm))

    def sign(self, x: int) -> int:
        return (self.signs >> x) & 1

    def __mul__(self, other: "MonomialMap") -> "MonomialMap":
        """ Applies self, then other """
        if other.size != self.size:
            raise ValueError("Maps act on different dimensions")
        signs = 0
        for x, p in enumerate(self.perm):
            if ((self.signs >> x) ^ (other.signs >> p)) & 1:
                signs |= 1 << x
        return MonomialMap(tuple(other.perm[p] for p in self.perm), signs)

    def __neg__(self) -> "MonomialMap":
        return MonomialMap(self.perm, self.signs ^ ((1 << self.size) - 1))

    def inverse(self) -> "MonomialMap":
        perm = [0] * self.size
        signs = 0
        for x, p in enumerate(self.perm):
            perm[p] = x
            if (self.signs >> x) & 1:
                signs |= 1 << p
        return MonomialMap(tuple(perm), signs)

    def apply(self, vector: Sequence[int]) -> List[int]:
        """ Image of a row vector

        >>> MonomialMap((1, 0), 0b01).apply([3, 5])
        [5, -3]
        """
        if len(vector) != self.size:
            raise ValueError("Vector length does not match the number of points")
        out = [0] * self.size
        for x, p in enumerate(self.perm):
            out[p] = -vector[x] if (self.signs >> x) & 1 else vector[x]
        return out

    def matrix(self) -> List[List[int]]:
        """ Integer matrix whose row x is the image of e_x """
        return [self.apply([int(i == x) for i in range(self.size)]) for x in range(self.size)]

    @property
    def trace(self) -> int:
        return sum(-1 if (self.signs >> x) & 1 else 1 for x, p in enumerate(self.perm) if p == x)

    @property
    def is_identity(self) -> bool:
        return self.signs == 0 and all(p == x for x, p in enumerate(self.perm))

    @property
    def order(self) -> int:
        lengths, seen = [], set()
        for x in range(self.size):
            if x in seen:
                continue
            length, y = 0, x
            while y not in seen:
                seen.add(y)
                y = self.perm[y]
                length += 1
            lengths.append(length)
        base = math.lcm(*lengths)
        power = self
        for _ in range(base - 1):
            power = power * self
        return base if power.is_identity else 2 * base

    @property
    def is_involution(self) -> bool:
        return not self.is_identity and (self * self).is_identity

    def commutes_with(self, other: "MonomialMap") -> bool:
        return self * other == other * self

    def json(self):
        return {
            "d": self.d,
            "perm": list(self.perm),
            "signs": format(self.signs, f"0{hex_digits(self.d)}x")
        }


def trace(m: MonomialMap) -> int:
    """ Σ of ±1 over the fixed points of the underlying permutation

    >>> trace(MonomialMap.identity(3))
    8
    """
    return m.trace


@dataclass(frozen=True)
class LowerElement:
    """ X_aZ_ℓ up to the sign (−1)^sign, i.e. e_x ↦ (−1)^{ℓ(x) + sign} e_{x+a} """
    a: Gf2Vec
    l: Gf2Vec
    sign: int = 0

    def __post_init__(self):
        if self.a.n != self.l.n:
            raise ValueError("Translation and functional parts have different lengths")
        if self.sign not in (0, 1):
            raise ValueError("Sign must be a bit")

    @classmethod
    def from_packed(cls, v: int, d: int, sign: int = 0) -> "LowerElement":
        return cls(Gf2Vec(v & ((1 << d) - 1), d), Gf2Vec(v >> d, d), sign)

    @classmethod
    def identity(cls, d: int) -> "LowerElement":
        return cls.from_packed(0, d)

    @classmethod
    def minus_one(cls, d: int) -> "LowerElement":
        return cls.from_packed(0, d, 1)

    @property
    def d(self) -> int:
        return self.a.n

    @property
    def packed(self) -> int:
        return self.a.bits | (self.l.bits << self.d)

    @property
    def is_central(self) -> bool:
        return self.packed == 0

    @property
    def square_sign(self) -> int:
        """ (X_aZ_ℓ)² = (−1)^{ℓ(a)} """
        return self.l.dot(self.a)

    def __mul__(self, other: "LowerElement") -> "LowerElement":
        return LowerElement(self.a + other.a, self.l + other.l, self.sign ^ other.sign ^ other.l.dot(self.a))

    def __neg__(self) -> "LowerElement":
        return LowerElement(self.a, self.l, self.sign ^ 1)

    def inverse(self) -> "LowerElement":
        return LowerElement(self.a, self.l, self.sign ^ self.square_sign)

    def commutes_with(self, other: "LowerElement") -> bool:
        return self.l.dot(other.a) == other.l.dot(self.a)

    def to_map(self) -> MonomialMap:
        d, a, l = self.d, self.a.bits, self.l.bits
        signs = 0
        for x in range(1 << d):
            if parity(l & x) ^ self.sign:
                signs |= 1 << x
        return MonomialMap(tuple(x ^ a for x in range(1 << d)), signs)

    @classmethod
    def from_map(cls, m: MonomialMap) -> Optional["LowerElement"]:
        """ Decomposes a monomial map as X_aZ_ℓ, or None when it is not an element of R """
        d = m.d
        a = m.perm[0]
        if any(p != x ^ a for x, p in enumerate(m.perm)):
            return None
        s0 = m.sign(0)
        l = sum((m.sign(1 << i) ^ s0) << i for i in range(d))
        if any(m.sign(x) != parity(l & x) ^ s0 for x in range(1 << d)):
            return None
        return cls(Gf2Vec(a, d), Gf2Vec(l, d), s0)

    def __str__(self):
        return f"{'-' if self.sign else ''}X{self.a.bits:x}Z{self.l.bits:x}"

    def json(self):
        return {"a": self.a.bits, "l": self.l.bits, "sign": self.sign}


def lower_group(d: int) -> Iterator[LowerElement]:
    """ The 2^{1+2d} elements of R """
    for sign in (0, 1):
        for v in range(1 << (2 * d)):
            yield LowerElement.from_packed(v, d, sign)


def lower_involutions(d: int) -> Iterator[LowerElement]:
    """ Elements of R of order 2, −1 included

    >>> sum(1 for _ in lower_involutions(2))
    19
    """
    for element in lower_group(d):
        if element.square_sign == 0 and not (element.is_central and element.sign == 0):
            yield element


def eps(w: BoolWord) -> MonomialMap:
    """ The diagonal map which is −1 on the support of a codeword of RM(2,d)

    >>> eps(BoolWord(2, 0b1000)).trace
    2
    """
    to_anf(w)
    return MonomialMap.diagonal(w.table, w.d)


def random_brw_monomial(d: int, rng: random.Random) -> MonomialMap:
    """ Product of an affine point map, a diagonal ε of RM(2,d) and an element of R """
    lower = LowerElement.from_packed(rng.getrandbits(2 * d), d, rng.getrandbits(1))
    return MonomialMap.from_affine(random_affine_map(d, rng)) * eps(random_word(d, rng)) * lower.to_map()


def _conjugate_lower(v: int, t: MonomialMap, t_inv: MonomialMap, sign: int = 0) -> LowerElement:
    d = t.d
    image = LowerElement.from_map(t_inv * LowerElement.from_packed(v, d, sign).to_map() * t)
    if image is None:
        raise NotNormalizingError(f"The conjugate of {LowerElement.from_packed(v, d)} is not in the lower group")
    return image


def conjugation_matrix(t: MonomialMap) -> Gf2Mat:
    """ Action of x ↦ t^{-1} x t on R/Z(R), rows being the images of X_{e_i} then Z_{e_i} """
    d = t.d
    t_inv = t.inverse()
    return Gf2Mat(tuple(_conjugate_lower(1 << i, t, t_inv).packed for i in range(2 * d)), 2 * d)


def _sigma(t: MonomialMap, t_inv: MonomialMap, v: int) -> int:
    """ s with t^{-1} r t = (−1)^s r, for r a lift of a vector fixed by t """
    image = _conjugate_lower(v, t, t_inv)
    if image.packed != v:
        raise VerificationError(f"Vector {v:#x} is not fixed by the involution")
    return image.sign


def _radical(basis: Sequence[int], polar: Gf2Mat) -> List[int]:
    """ Basis of the radical of the polar form restricted to a span """
    gram = Gf2Mat(
        tuple(sum(polar.form(u, w) << j for j, w in enumerate(basis)) for u in basis), len(basis)
    )
    return span_basis([vecmat(c, basis) for c in nullspace(gram).rows], polar.ncols) if basis else []


@dataclass(frozen=True)
class CommutatorMap:
    """ Bookkeeping of an involution t on R/Z(R)

    :param matrix: Action C of t by conjugation
    :param image: Basis of W = Im(C + 1), the commutator space
    :param fixed: Basis of K = ker(C + 1)
    :param sigma: For each vector of ``fixed``, the sign picked up by its lifts under conjugation
    :param centralizer: Basis of C_R(t)/Z(R), the kernel of sigma on K
    :param centre: Basis of Z(C_R(t))/Z(R)
    """
    d: int
    matrix: Gf2Mat
    image: Tuple[int, ...]
    fixed: Tuple[int, ...]
    sigma: Tuple[int, ...]
    centralizer: Tuple[int, ...]
    centre: Tuple[int, ...]

    @property
    def defect(self) -> int:
        return len(self.image) // 2

    @property
    def split(self) -> bool:
        """ The lift of W is elementary abelian """
        q = QuadraticForm.standard_plus(self.d)
        return all(q.value(w) == 0 for w in self.image)

    @property
    def exponent(self) -> int:
        if not self.image:
            return 1
        return 2 if self.split else 4

    @property
    def image_basis(self) -> List[LowerElement]:
        return [LowerElement.from_packed(v, self.d) for v in self.image]

    @property
    def centralizer_basis(self) -> List[LowerElement]:
        return [LowerElement.from_packed(v, self.d) for v in self.centralizer]

    def json(self):
        return {
            "defect": self.defect,
            "split": self.split,
            "image": [str(x) for x in self.image_basis],
            "centralizer": [str(x) for x in self.centralizer_basis],
        }


def commutator_map(t: MonomialMap) -> CommutatorMap:
    """ Commutator space and centralizer of an involution normalizing R

    >>> commutator_map(MonomialMap.identity(2)).image
    ()
    """
    d = t.d
    n = 2 * d
    t_inv = t.inverse()
    c = conjugation_matrix(t)
    shifted = c + Gf2Mat.identity(n)
    image = tuple(span_basis(shifted.rows, n))
    if len(image) % 2:
        raise VerificationError(f"Commutator space has odd dimension {len(image)}")
    fixed = tuple(nullspace(shifted).rows)
    sigma = tuple(_sigma(t, t_inv, v) for v in fixed)

    moving = [i for i, s in enumerate(sigma) if s]
    centralizer = [v for v, s in zip(fixed, sigma) if not s]
    if moving:
        pivot = fixed[moving[0]]
        centralizer += [fixed[i] ^ pivot for i in moving[1:]]
    centralizer = span_basis(centralizer, n)
    centre = _radical(centralizer, QuadraticForm.standard_plus(d).polar())
    return CommutatorMap(d, c, image, fixed, sigma, tuple(centralizer), tuple(centre))


def build_eta(d: int, k: int, sign: int = 1) -> MonomialMap:
    """ Nonsplit involution of defect k: the k-fold tensor of the block e_0 ↦ −e_1, e_1 ↦ −e_0, e_2 ↦ −e_2,
    e_3 ↦ e_3 on the bit pairs (2j, 2j+1), times Z_{x_{2k}} when sign is −1

    The two signs give involutions conjugate under a monomial map preserving build(d).

    >>> build_eta(2, 1).trace
    0
    """
    if k < 1 or 2 * k > d:
        raise InvalidInvolutionError(f"η needs 1 ≤ k ≤ d/2, got k={k} with d={d}")
    if sign < 0 and 2 * k == d:
        raise InvalidInvolutionError("The minus variant of η needs 2k < d")
    perm, signs = [], 0
    for x in range(1 << d):
        y, flip = x, 0
        for j in range(k):
            lo, hi = (x >> (2 * j)) & 1, (x >> (2 * j + 1)) & 1
            if not hi:
                y ^= 1 << (2 * j)
            flip ^= 1 ^ (lo & hi)
        if sign < 0:
            flip ^= (x >> (2 * k)) & 1
        perm.append(y)
        signs |= flip << x
    return MonomialMap(tuple(perm), signs)


def build_upper_clean(d: int) -> MonomialMap:
    """ Clean involution of full defect d/2 whose commutator space lies in the other family of maximal
    totally singular subspaces than that of diagonal involutions: the swap x ↦ x + (1 + x_1)e_0 times
    ε_w with w = Σ_{i≥1} x_{2i}x_{2i+1}
    """
    if d % 2 or d < 2:
        raise InvalidInvolutionError(f"Full defect clean involutions of the second frame class need d even, got {d}")
    perm, signs = [], 0
    for x in range(1 << d):
        perm.append(x ^ (1 ^ ((x >> 1) & 1)))
        flip = 0
        for i in range(1, d // 2):
            flip ^= (x >> (2 * i)) & (x >> (2 * i + 1)) & 1
        signs |= flip << x
    return MonomialMap(tuple(perm), signs)


def dickson_invariant(g: Gf2Mat, q: Optional[QuadraticForm] = None) -> int:
    """ rank(g + 1) mod 2 for an isometry g of a nondegenerate quadratic form

    >>> dickson_invariant(Gf2Mat.identity(4))
    0
    """
    if q is not None and not q.is_preserved_by(g):
        raise InvalidInvolutionError("The map is not an isometry of the quadratic form")
    return rank(g + Gf2Mat.identity(g.nrows)) % 2


def orthogonal_transvection(v: int, q: QuadraticForm) -> Gf2Mat:
    """ x ↦ x + B(x, v) v for a nonsingular v """
    if q.value(v) != 1:
        raise InvalidInvolutionError(f"Transvection centre {v:#x} is singular")
    polar = q.polar()
    return Gf2Mat(tuple((1 << i) ^ (v if polar.form(1 << i, v) else 0) for i in range(q.n)), q.n)


def frame_class(cmap: CommutatorMap) -> Optional[int]:
    """ Family of the maximal totally singular commutator space of a split involution of defect d/2,
    relative to the diagonal subgroup. The Dickson invariant of an isometry carrying the diagonal part
    onto W is cross-checked against the parity of d − dim(W ∩ diagonal part).
    """
    d = cmap.d
    if d % 2 or 2 * cmap.defect != d or not cmap.split:
        return None
    q = QuadraticForm.standard_plus(d)
    ws = list(cmap.image)
    partners = complete_to_hyperbolic(ws, q)
    transporter = Gf2Mat(tuple(partners + ws), 2 * d)
    if not q.is_preserved_by(transporter):
        raise VerificationError("Transporter onto the commutator space is not an isometry")
    invariant = dickson_invariant(transporter)
    meet = len(ws) - len(span_basis([w & ((1 << d) - 1) for w in ws], d))
    if invariant != (d - meet) % 2:
        raise VerificationError("Dickson invariant disagrees with the intersection parity")
    return invariant


class InvolutionKind(str, Enum):
    CLEAN = "clean"
    DIRTY = "dirty"
    NONSPLIT = "nonsplit"


@dataclass(frozen=True)
class InvolutionLabel:
    kind: InvolutionKind
    defect: int
    sign: Optional[int] = None
    frame_class: Optional[int] = None

    @property
    def key(self) -> str:
        """ Identifier such as clean1+, dirty2 or nonsplit1 """
        out = f"{self.kind.value}{self.defect}"
        if self.sign is not None:
            out += "+" if self.sign > 0 else "-"
        if self.frame_class is not None:
            out += f"/{self.frame_class}"
        return out

    def __str__(self):
        return self.key

    def json(self):
        return {"kind": self.kind.value, "defect": self.defect, "sign": self.sign,
                "frame_class": self.frame_class, "key": self.key}


@dataclass(frozen=True)
class InvolutionReport:
    trace: int
    clean: bool
    defect: int
    split: bool
    label: InvolutionLabel
    z_basis: Tuple[LowerElement, ...]
    commutator: CommutatorMap

    def json(self):
        return {
            "trace": self.trace,
            "clean": self.clean,
            "defect": self.defect,
            "split": self.split,
            "label": self.label.json(),
            "z_basis": [str(z) for z in self.z_basis],
        }


def classify_involution(t: MonomialMap) -> InvolutionReport:
    """ Class label of an involution of the BRW group given as a monomial map

    :param t: Map with t² = 1 normalizing R
    :return: Report with trace, defect, splitting and label
    """
    if not (t * t).is_identity:
        raise InvalidInvolutionError("The map does not square to the identity")
    d = t.d
    cmap = commutator_map(t)
    if not QuadraticForm.standard_plus(d).is_preserved_by(cmap.matrix):
        raise VerificationError("Conjugation does not preserve the quadratic form of R/Z(R)")
    tr = t.trace
    k = cmap.defect
    clean = tr != 0
    if clean and abs(tr) != 1 << (d - k):
        raise VerificationError(f"Clean involution of defect {k} has trace {tr}")
    if cmap.split:
        kind = InvolutionKind.CLEAN if clean else InvolutionKind.DIRTY
        sign = (1 if tr > 0 else -1) if clean else None
        label = InvolutionLabel(kind, k, sign, frame_class(cmap))
    else:
        if clean:
            raise VerificationError("Nonsplit involution with nonzero trace")
        label = InvolutionLabel(InvolutionKind.NONSPLIT, k)
    z_basis = (LowerElement.minus_one(d),) + tuple(LowerElement.from_packed(v, d) for v in cmap.centre)
    logging.debug(f"Classified involution with trace {tr} as {label}")
    return InvolutionReport(tr, clean, k, cmap.split, label, z_basis, cmap)


def _clean_positive(t: MonomialMap) -> Tuple[MonomialMap, CommutatorMap]:
    cmap = commutator_map(t)
    tr = t.trace
    if tr == 0 or cmap.defect == 0:
        raise InvalidInvolutionError("A clean involution of positive defect is required")
    return (t if tr > 0 else -t), cmap


def _plus_trace(positive: MonomialMap, z: LowerElement) -> int:
    """ Trace of z on the +1 eigenspace of positive """
    zmap = z.to_map()
    return (zmap.trace + (zmap * positive).trace) // 2


def q_t_singularity(t: MonomialMap, z: LowerElement) -> int:
    """ 0 when z is singular for t, 1 otherwise. z is singular when its trace on L^+ of the positive
    trace member of ±t equals +2^{d−k−1}.
    """
    positive, cmap = _clean_positive(t)
    d = cmap.d
    if z.is_central:
        raise InvalidInvolutionError("z lies in Z(R)")
    if not in_span(z.packed, cmap.centre, 2 * d):
        raise InvalidInvolutionError(f"{z} is not in Z(C_R(t))")
    return _singularity(positive, cmap, z)


def sv(m: int, nu: int) -> int:
    """ Singular nonzero vectors of a nondegenerate quadratic space of dimension 2m and type nu

    >>> sv(1, 1), sv(2, -1)
    (2, 5)
    """
    return ((1 << m) - nu) * ((1 << (m - 1)) + nu)


def av(m: int, nu: int) -> int:
    return ((1 << m) - nu) * (1 << (m - 1))


def character_count(k: int, nu: int) -> int:
    """ Characters of Z nontrivial on −1 whose kernel has type nu """
    return (1 << (2 * k - 1)) + nu * (1 << (k - 1))


def z_elements(cmap: CommutatorMap) -> List[Tuple[int, int, LowerElement]]:
    """ Elements (−1)^s Π b_i^{c_i} of Z(C_R(t)) outside Z(R), b being the lifted centre basis

    :return: Triples (c, s, element)
    """
    d = cmap.d
    basis = [LowerElement.from_packed(v, d) for v in cmap.centre]
    out = []
    for coords in range(1, 1 << len(basis)):
        product = LowerElement.identity(d)
        for i, b in enumerate(basis):
            if (coords >> i) & 1:
                product = product * b
        out.append((coords, 0, product))
        out.append((coords, 1, -product))
    return out


def _singularity(positive: MonomialMap, cmap: CommutatorMap, z: LowerElement) -> int:
    value = _plus_trace(positive, z)
    expected = 1 << (cmap.d - cmap.defect - 1)
    if abs(value) != expected:
        raise VerificationError(f"Trace {value} of {z} on the fixed lattice is not ±{expected}")
    return 0 if value > 0 else 1


def y_orbit_counts(t: MonomialMap) -> Dict[Tuple[int, int, int], Tuple[int, int]]:
    """ Enumerated sizes of the sets of pairs (φ, z), with φ a character of Z nontrivial on −1 and z in Z
    outside Z(R), split by type of φ, singularity of z and φ(z); each paired with its closed form.

    :return: {(type, q_t(z), φ(z)): (enumerated, predicted)}
    """
    positive, cmap = _clean_positive(t)
    k = cmap.defect
    if not cmap.split:
        raise InvalidInvolutionError("Characters are counted on an elementary abelian Z only")
    elements = [(coords, flip, _singularity(positive, cmap, z)) for coords, flip, z in z_elements(cmap)]

    counts: Counter = Counter()
    for chi in range(1 << (2 * k)):
        values = [(parity(chi & coords) ^ flip, zeta) for coords, flip, zeta in elements]
        singular_in_kernel = sum(1 for eta, zeta in values if eta == 0 and zeta == 0)
        if singular_in_kernel == sv(k, 1):
            kind = 1
        elif singular_in_kernel == sv(k, -1):
            kind = -1
        else:
            raise VerificationError(f"Kernel of a character has {singular_in_kernel} singular elements")
        for eta, zeta in values:
            counts[(kind, zeta, eta)] += 1

    out = {}
    for kind in (1, -1):
        n = character_count(k, kind)
        predicted = {
            (0, 0): n * sv(k, kind), (0, 1): n * av(k, kind),
            (1, 0): n * av(k, kind), (1, 1): n * sv(k, kind),
        }
        for (zeta, eta), value in predicted.items():
            out[(kind, zeta, eta)] = (counts[(kind, zeta, eta)], value)
    return out


def commutator_singularities(t: MonomialMap) -> Counter:
    """ Singularity values q_t([x, t]) over x ∈ R outside C_R(t) """
    positive, cmap = _clean_positive(t)
    d = cmap.d
    out: Counter = Counter()
    t_inv = t.inverse()
    for x in lower_group(d):
        xmap = x.to_map()
        commutator = LowerElement.from_map(xmap.inverse() * t_inv * xmap * t)
        if commutator is None:
            raise NotNormalizingError("Commutator with the involution left the lower group")
        if commutator.is_central:
            continue
        if not in_span(commutator.packed, cmap.centre, 2 * d):
            raise VerificationError(f"Commutator {commutator} is not in Z(C_R(t))")
        out[_singularity(positive, cmap, commutator)] += 1
    return out


def _require_kind(t: MonomialMap, *kinds: InvolutionKind) -> InvolutionReport:
    report = classify_involution(t)
    if report.label.kind not in kinds:
        raise InvalidInvolutionError(f"Expected a {' or '.join(k.value for k in kinds)} involution, got {report.label}")
    return report


def ul_factorizations(t: MonomialMap) -> List[Tuple[MonomialMap, LowerElement]]:
    """ Pairs (u, ℓ) with ℓ a lower involution commuting with the dirty split involution t and u = tℓ clean """
    _require_kind(t, InvolutionKind.DIRTY)
    out = []
    for ell in lower_involutions(t.d):
        m = ell.to_map()
        if not m.commutes_with(t):
            continue
        u = t * m
        if u.trace != 0:
            out.append((u, ell))
    return out


def ul_count(k: int) -> int:
    return 1 << (2 * k + 1)


def ul_printed_count(d: int, k: int) -> int:
    """ The closed form 2^{1+2(d−2k)+2k} − 2^{1+2k} as it is usually stated for the factorization count """
    return (1 << (1 + 2 * (d - 2 * k) + 2 * k)) - (1 << (1 + 2 * k))


def dirty_partners(u: MonomialMap) -> int:
    """ Elements ℓ of C_R(u) for which uℓ is dirty, u being clean and split """
    _require_kind(u, InvolutionKind.CLEAN)
    count = 0
    for ell in lower_group(u.d):
        m = ell.to_map()
        if m.commutes_with(u) and (u * m).trace == 0:
            count += 1
    return count


def coset_involutions(t: MonomialMap) -> Counter:
    """ Labels of the involutions in the coset tR, with multiplicities """
    out: Counter = Counter()
    for r in lower_group(t.d):
        candidate = t * r.to_map()
        if candidate.is_involution:
            out[classify_involution(candidate).label.key] += 1
    return out


def centralizer_lower(t: MonomialMap) -> List[LowerElement]:
    """ Elements of R commuting with t, by exhaustion """
    return [r for r in lower_group(t.d) if r.to_map().commutes_with(t)]


@dataclass(frozen=True)
class CleanCosetReport:
    conjugates: int
    clean_involutions: int

    @property
    def agrees(self) -> bool:
        return self.conjugates == self.clean_involutions

    def json(self):
        return {"conjugates": self.conjugates, "clean_involutions": self.clean_involutions, "agrees": self.agrees}


def clean_coset_members(t: MonomialMap) -> CleanCosetReport:
    """ Compares the clean involutions of tR with the R-conjugates of t and −t """
    _require_kind(t, InvolutionKind.CLEAN)
    conjugates = set()
    for r in lower_group(t.d):
        m = r.to_map()
        image = m.inverse() * t * m
        conjugates.add(image)
        conjugates.add(-image)
    clean = set()
    for r in lower_group(t.d):
        candidate = t * r.to_map()
        if candidate.trace != 0 and candidate.is_involution:
            clean.add(candidate)
    if not conjugates <= clean:
        raise VerificationError("A conjugate of the involution left its coset")
    return CleanCosetReport(len(conjugates), len(clean))


_ETA = re.compile(r"^(\d+):([+-])$")
_LOWER = re.compile(r"^([0-9a-f]+):([0-9a-f]+):([01+-])$")


def parse_involution(d: int, text: str) -> MonomialMap:
    """ Builds a map from a descriptor ``eps:<hex>``, ``eta:<2k>:<+|->``, ``lower:<a-hex>:<l-hex>:<sign>``
    or ``upper``

    >>> parse_involution(2, "eps:8").trace
    2
    >>> parse_involution(2, "lower:1:0:-").trace
    0
    """
    kind, _, rest = text.strip().partition(":")
    if kind == "eps":
        return eps(BoolWord.from_hex(d, rest))
    if kind == "eta":
        match = _ETA.match(rest)
        if not match or int(match.group(1)) % 2:
            raise HexParseError(f"η descriptor `{text}` needs an even commutator dimension and a sign")
        return build_eta(d, int(match.group(1)) // 2, 1 if match.group(2) == "+" else -1)
    if kind == "lower":
        match = _LOWER.match(rest.lower())
        if not match:
            raise HexParseError(f"Lower element descriptor `{text}` is malformed")
        a, l = int(match.group(1), 16), int(match.group(2), 16)
        if a >> d or l >> d:
            raise HexParseError(f"Lower element descriptor `{text}` does not fit dimension {d}")
        sign = 1 if match.group(3) in ("1", "-") else 0
        return LowerElement(Gf2Vec(a, d), Gf2Vec(l, d), sign).to_map()
    if kind == "upper" and not rest:
        return build_upper_clean(d)
    raise HexParseError(f"Unknown involution descriptor `{text}`")
