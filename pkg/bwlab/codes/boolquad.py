""" Boolean functions of degree at most 2 on F_2^d.

A word is stored as the integer whose bit x is the value at the point x, points being indexed by
x ↦ Σ x_i 2^i. The affine canonical form reduces the quadratic part with a symplectic basis and absorbs
the linear part by completing the square.
"""
import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from bwlab.codes.gf2 import Gf2Mat, Gf2Vec, symplectic_basis, vecmat, rank
from bwlab.errors import HexParseError, NotACodewordError, VerificationError

_HEX = re.compile(r"^[0-9a-f]+$")


def _low_mask(d: int, i: int) -> int:
    """ Bits of the points whose i-th coordinate is 0 """
    s = 1 << i
    full = (1 << (1 << d)) - 1
    return ((1 << s) - 1) * (full // ((1 << (2 * s)) - 1))


def mobius(table: int, d: int) -> int:
    """ Binary Möbius transform, its own inverse

    >>> mobius(0b1000, 2)  # x_0 x_1
    8
    >>> mobius(0b1111, 2)  # constant 1
    1
    """
    for i in range(d):
        table ^= (table & _low_mask(d, i)) << (1 << i)
    return table


def hex_digits(d: int) -> int:
    return max(1, ((1 << d) + 3) // 4)


@dataclass(frozen=True)
class BoolWord:
    d: int
    table: int

    def __post_init__(self):
        if self.table < 0 or self.table >> (1 << self.d):
            raise ValueError(f"Table does not fit on 2^{self.d} points")

    @classmethod
    def zero(cls, d: int) -> "BoolWord":
        return cls(d, 0)

    @classmethod
    def full(cls, d: int) -> "BoolWord":
        return cls(d, (1 << (1 << d)) - 1)

    @classmethod
    def from_function(cls, d: int, fn) -> "BoolWord":
        return cls(d, sum((fn(x) & 1) << x for x in range(1 << d)))

    @classmethod
    def from_hex(cls, d: int, text: str) -> "BoolWord":
        """ Parses the lowercase hexadecimal form, bit i being point i

        >>> BoolWord.from_hex(2, "8").table
        8
        """
        text = text.strip().lower()
        if text.startswith("0x"):
            text = text[2:]
        if not _HEX.match(text) or len(text) != hex_digits(d):
            raise HexParseError(f"`{text}` is not a {hex_digits(d)}-digit hexadecimal word for d={d}")
        value = int(text, 16)
        if value >> (1 << d):
            raise HexParseError(f"`{text}` has bits beyond the 2^{d} points")
        return cls(d, value)

    def hex(self) -> str:
        return format(self.table, f"0{hex_digits(self.d)}x")

    @property
    def size(self) -> int:
        return 1 << self.d

    @property
    def weight(self) -> int:
        return bin(self.table).count("1")

    def __call__(self, x: int) -> int:
        return (self.table >> x) & 1

    def __add__(self, other: "BoolWord") -> "BoolWord":
        if other.d != self.d:
            raise ValueError("Words live on different spaces")
        return BoolWord(self.d, self.table ^ other.table)

    def __and__(self, other: "BoolWord") -> "BoolWord":
        return BoolWord(self.d, self.table & other.table)

    def complement(self) -> "BoolWord":
        return self + BoolWord.full(self.d)

    def points(self):
        return [x for x in range(self.size) if (self.table >> x) & 1]


@dataclass(frozen=True)
class Anf:
    d: int
    const: int
    linear: int
    quad: Gf2Mat

    @classmethod
    def from_monomials(cls, d: int, monomials: int) -> "Anf":
        rows = [0] * d
        for i in range(d):
            for j in range(i + 1, d):
                if (monomials >> ((1 << i) | (1 << j))) & 1:
                    rows[i] |= 1 << j
        linear = sum(((monomials >> (1 << i)) & 1) << i for i in range(d))
        return cls(d, monomials & 1, linear, Gf2Mat(tuple(rows), d))

    def monomials(self) -> int:
        out = self.const
        for i in range(self.d):
            if (self.linear >> i) & 1:
                out |= 1 << (1 << i)
            for j in range(i + 1, self.d):
                if self.quad.entry(i, j):
                    out |= 1 << ((1 << i) | (1 << j))
        return out


def degree(w: BoolWord) -> int:
    """ Algebraic degree, -1 for the zero word """
    monomials = mobius(w.table, w.d)
    if not monomials:
        return -1
    return max(bin(s).count("1") for s in range(w.size) if (monomials >> s) & 1)


def to_anf(w: BoolWord) -> Anf:
    """ Algebraic normal form of a word of RM(2,d)

    :param w: Word
    :return: Constant, linear and upper-triangular quadratic parts
    :raises NotACodewordError: when the degree exceeds 2
    """
    monomials = mobius(w.table, w.d)
    deg = max((bin(s).count("1") for s in range(w.size) if (monomials >> s) & 1), default=-1)
    if deg > 2:
        raise NotACodewordError(f"Word {w.hex()} has degree {deg}, it is not in RM(2,{w.d})", degree=deg)
    return Anf.from_monomials(w.d, monomials)


def from_anf(a: Anf) -> BoolWord:
    return BoolWord(a.d, mobius(a.monomials(), a.d))


def translate(w: BoolWord, a: int) -> BoolWord:
    """ The word x ↦ w(x + a) """
    table = w.table
    for i in range(w.d):
        if (a >> i) & 1:
            s = 1 << i
            low = _low_mask(w.d, i)
            table = ((table & low) << s) | ((table >> s) & low)
    return BoolWord(w.d, table)


def derivative(w: BoolWord, a: Gf2Vec) -> BoolWord:
    """ D_a w(x) = w(x + a) + w(x)

    >>> derivative(BoolWord(2, 0b1000), Gf2Vec(1, 2)).table  # x_0 x_1 along e_0 gives x_1
    12
    """
    return BoolWord(w.d, w.table ^ translate(w, a.bits).table)


def bilinear_form(w: BoolWord) -> Gf2Mat:
    """ The alternating form (a, b) ↦ D_a D_b w, equal to quad + quadᵀ """
    quad = to_anf(w).quad
    return quad + quad.transpose()


def defect(w: BoolWord) -> int:
    return rank(bilinear_form(w)) // 2


@dataclass(frozen=True)
class AffineMap:
    """ g(x) = x·matrix + shift """
    matrix: Gf2Mat
    shift: Gf2Vec

    def __post_init__(self):
        if not self.matrix.is_invertible():
            raise ValueError("Affine map matrix is not invertible")

    @classmethod
    def identity(cls, d: int) -> "AffineMap":
        return cls(Gf2Mat.identity(d), Gf2Vec.zero(d))

    @classmethod
    def translation(cls, a: Gf2Vec) -> "AffineMap":
        return cls(Gf2Mat.identity(a.n), a)

    @property
    def d(self) -> int:
        return self.matrix.nrows

    def apply(self, x: int) -> int:
        return vecmat(x, self.matrix.rows) ^ self.shift.bits

    def then(self, other: "AffineMap") -> "AffineMap":
        """ The map x ↦ other(self(x)) """
        return AffineMap(self.matrix * other.matrix, other.matrix.vecmul(self.shift) + other.shift)

    def inverse(self) -> "AffineMap":
        inv = self.matrix.inverse()
        return AffineMap(inv, inv.vecmul(self.shift))

    def pull(self, w: BoolWord) -> BoolWord:
        """ The word w∘g """
        return BoolWord(w.d, sum(((w.table >> self.apply(x)) & 1) << x for x in range(1 << w.d)))

    def permutation(self) -> Tuple[int, ...]:
        return tuple(self.apply(x) for x in range(1 << self.d))


def random_invertible(d: int, rng: random.Random) -> Gf2Mat:
    while True:
        m = Gf2Mat(tuple(rng.getrandbits(d) for _ in range(d)), d)
        if m.is_invertible():
            return m


def random_affine_map(d: int, rng: random.Random) -> AffineMap:
    return AffineMap(random_invertible(d, rng), Gf2Vec(rng.getrandbits(d), d))


def random_word(d: int, rng: random.Random, max_degree: int = 2) -> BoolWord:
    """ Uniform word of RM(max_degree, d) """
    monomials = 0
    for s in range(1 << d):
        if bin(s).count("1") <= max_degree and rng.getrandbits(1):
            monomials |= 1 << s
    return BoolWord(d, mobius(monomials, d))


class Category(str, Enum):
    SHORT = "Short"
    LONG = "Long"
    MIDSET_AFFINE = "MidsetAffine"
    MIDSET_NONAFFINE = "MidsetNonaffine"


@dataclass(frozen=True)
class ClassLabel:
    category: Category
    defect: int
    frame_class: Optional[int] = None

    @property
    def key(self) -> str:
        """ Short identifier such as Short2 or MidsetAffine """
        base = self.category.value if self.category == Category.MIDSET_AFFINE else f"{self.category.value}{self.defect}"
        if self.frame_class is not None:
            base += f"/{self.frame_class}"
        return base

    @property
    def clean(self) -> bool:
        return self.category in (Category.SHORT, Category.LONG)

    @property
    def is_midset(self) -> bool:
        return not self.clean

    def expected_weight(self, d: int) -> int:
        if self.category == Category.SHORT:
            return (1 << (d - 1)) - (1 << (d - self.defect - 1))
        elif self.category == Category.LONG:
            return (1 << (d - 1)) + (1 << (d - self.defect - 1))
        return 1 << (d - 1)

    def __str__(self):
        if self.category == Category.MIDSET_AFFINE:
            return self.category.value
        return f"{self.category.value}({self.defect})"

    def json(self):
        return {"category": self.category.value, "defect": self.defect, "frame_class": self.frame_class, "key": self.key}

    @classmethod
    def from_key(cls, key: str) -> "ClassLabel":
        body, _, frame = key.partition("/")
        frame_class = int(frame) if frame else None
        if body == Category.MIDSET_AFFINE.value:
            return cls(Category.MIDSET_AFFINE, 0, frame_class)
        for category in (Category.MIDSET_NONAFFINE, Category.SHORT, Category.LONG):
            if body.startswith(category.value) and body[len(category.value):].isdigit():
                return cls(category, int(body[len(category.value):]), frame_class)
        raise HexParseError(f"Unknown class key `{key}`")


def standard_representative(label: ClassLabel, d: int) -> BoolWord:
    """ Σ_{i<k} x_{2i} x_{2i+1}, plus x_{2k} for midsets, plus 1 for long words """
    k = label.defect
    rows = [0] * d
    for i in range(k):
        rows[2 * i] = 1 << (2 * i + 1)
    linear = 1 << (2 * k) if label.is_midset else 0
    const = 1 if label.category == Category.LONG else 0
    return from_anf(Anf(d, const, linear, Gf2Mat(tuple(rows), d)))


def canonical_form(w: BoolWord) -> Tuple[ClassLabel, AffineMap]:
    """ Orbit label of a word under AGL(d,2) together with a witness g such that w = std∘g.

    :param w: Word of RM(2,d)
    :return: (label, witness), the witness being checked on every point
    """
    d = w.d
    to_anf(w)
    c = w(0)
    f = BoolWord(d, w.table ^ (BoolWord.full(d).table if c else 0))
    pairs, radical = symplectic_basis(bilinear_form(w))
    k = len(pairs)

    radical_rows = list(radical.rows)
    gammas = [f(r) for r in radical_rows]
    if any(gammas):
        p = gammas.index(1)
        radical_rows.insert(0, radical_rows.pop(p))
        gammas.insert(0, gammas.pop(p))

    basis = []
    for a, b in pairs:
        basis.extend([a.bits, b.bits])
    basis.extend(radical_rows)
    change = Gf2Mat(tuple(basis), d)

    transform = [1 << i for i in range(d)]
    shift = 0
    constant = c
    for i, (a, b) in enumerate(pairs):
        alpha, beta = f(a.bits), f(b.bits)
        shift |= (beta << (2 * i)) | (alpha << (2 * i + 1))
        constant ^= alpha & beta

    if any(gammas):
        for j, gamma in enumerate(gammas):
            if j and gamma:
                transform[2 * k + j] |= 1 << (2 * k)
        shift |= constant << (2 * k)
        category = Category.MIDSET_NONAFFINE if k else Category.MIDSET_AFFINE
    else:
        category = Category.LONG if constant else Category.SHORT

    label = ClassLabel(category, k)
    witness = AffineMap(change.inverse() * Gf2Mat(tuple(transform), d), Gf2Vec(shift, d))
    if witness.pull(standard_representative(label, d)) != w:
        raise VerificationError(f"Canonical witness for {w.hex()} does not transport it onto {label}")
    return label, witness
