""" The code RM(2,d) as a searchable object: affine subspaces, cubi sums, cleansing hyperplanes,
coset counts and containments between codewords.
"""
import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from bwlab.codes.boolquad import (
    BoolWord, AffineMap, Anf, Category, ClassLabel, canonical_form, from_anf, standard_representative,
    bilinear_form, _low_mask
)
from bwlab.codes.gf2 import Gf2Mat, Gf2Vec, span_basis, nullspace, solve, rank, parity
from bwlab.errors import CategoryError, NotSublatticeError, VerificationError

__all__ = [
    "AffineSubspace", "ClassLabel", "CosetReport", "core", "cubi_decompose", "cubi_sum", "random_cubi_sequence",
    "cleansing_hyperplanes", "dirty_defect_by_procedure", "noncleansing_reconciliation", "coset_report",
    "containment_profile", "unique_hyperplane_meet", "conjugator", "codeword_labels", "classify_word"
]


def coordinate_word(d: int, i: int) -> int:
    """ Table of the coordinate function x ↦ x_i """
    return ((1 << (1 << d)) - 1) ^ _low_mask(d, i)


def linear_word(d: int, functional: int) -> int:
    table = 0
    for i in range(d):
        if (functional >> i) & 1:
            table ^= coordinate_word(d, i)
    return table


@dataclass(frozen=True)
class AffineSubspace:
    """ {x : φ(x) = v for every equation (φ, v)}, equations linearly independent """
    d: int
    equations: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        functionals = [phi for phi, _ in self.equations]
        if rank(Gf2Mat(tuple(functionals), self.d)) != len(functionals):
            raise ValueError("Equations of an affine subspace must be independent")

    @classmethod
    def from_equations(cls, d: int, equations: Sequence[Tuple[int, int]]) -> Optional["AffineSubspace"]:
        """ Reduces a system of equations, None when it is inconsistent """
        kept = []
        for phi, value in equations:
            functionals = Gf2Mat(tuple(p for p, _ in kept), d)
            combo = solve(functionals, Gf2Vec(phi, d)) if kept else (None if phi else Gf2Vec(0, 0))
            if combo is None:
                kept.append((phi, value & 1))
                continue
            implied = 0
            for i, (_, v) in enumerate(kept):
                if (combo.bits >> i) & 1:
                    implied ^= v
            if implied != (value & 1):
                return None
        return cls(d, tuple(kept))

    @classmethod
    def hyperplane(cls, d: int, functional: int, value: int) -> "AffineSubspace":
        return cls(d, ((functional, value),))

    @property
    def dim(self) -> int:
        return self.d - len(self.equations)

    @property
    def codim(self) -> int:
        return len(self.equations)

    def contains(self, x: int) -> bool:
        return all(parity(phi & x) == v for phi, v in self.equations)

    def indicator(self) -> BoolWord:
        table = (1 << (1 << self.d)) - 1
        for phi, value in self.equations:
            word = linear_word(self.d, phi)
            table &= word if value else ~word
        return BoolWord(self.d, table & ((1 << (1 << self.d)) - 1))

    def intersection(self, other: "AffineSubspace") -> Optional["AffineSubspace"]:
        return AffineSubspace.from_equations(self.d, self.equations + other.equations)

    def direction(self) -> List[int]:
        """ Basis of the linear subspace parallel to this one """
        if not self.equations:
            return [1 << i for i in range(self.d)]
        columns = Gf2Mat(tuple(phi for phi, _ in self.equations), self.d).transpose()
        return list(nullspace(columns).rows)

    def point(self) -> int:
        if not self.equations:
            return 0
        columns = Gf2Mat(tuple(phi for phi, _ in self.equations), self.d).transpose()
        values = sum(v << i for i, (_, v) in enumerate(self.equations))
        return solve(columns, Gf2Vec(values, len(self.equations))).bits

    def json(self):
        return {"dim": self.dim, "equations": [[phi, v] for phi, v in self.equations]}

    @classmethod
    def hyperplanes(cls, d: int) -> List["AffineSubspace"]:
        """ All 2(2^d − 1) affine hyperplanes """
        return [cls.hyperplane(d, phi, v) for phi in range(1, 1 << d) for v in (0, 1)]

    @classmethod
    def codim2_subspaces(cls, d: int) -> List["AffineSubspace"]:
        out = []
        for a in range(1, 1 << d):
            for b in range(a + 1, 1 << d):
                if a ^ b > b:
                    out.extend(cls(d, ((a, va), (b, vb))) for va in (0, 1) for vb in (0, 1))
        return out


def _require(w: BoolWord, *categories: Category) -> ClassLabel:
    label, _ = canonical_form(w)
    if label.category not in categories:
        raise CategoryError(f"Word {w.hex()} is {label}, expected one of {[c.value for c in categories]}")
    return label


def core(w: BoolWord) -> AffineSubspace:
    """ Translations fixing a clean word, the radical of its alternating form

    :param w: Clean word
    :return: Linear subspace of dimension d − 2k
    """
    _require(w, Category.SHORT, Category.LONG)
    form = bilinear_form(w)
    rows = span_basis(form.rows, w.d)
    return AffineSubspace(w.d, tuple((row, 0) for row in rows))


def cubi_sum(subspaces: Sequence[AffineSubspace]) -> BoolWord:
    table = 0
    for s in subspaces:
        table ^= s.indicator().table
    return BoolWord(subspaces[0].d, table)


def cubi_decompose(w: BoolWord, k: Optional[int] = None) -> List[AffineSubspace]:
    """ Writes a short clean word as a sum of k coindependent codimension 2 subspaces with a common point

    :param w: Short clean word of defect k ≥ 1
    :param k: Expected defect, checked when given
    :return: The k subspaces, read off the canonical witness
    """
    label, witness = canonical_form(w)
    if label.category != Category.SHORT or label.defect == 0:
        raise CategoryError(f"Word {w.hex()} is {label}, a short word of positive defect is required")
    if k is not None and k != label.defect:
        raise CategoryError(f"Word {w.hex()} has defect {label.defect}, not {k}")
    columns = witness.matrix.transpose().rows
    shift = witness.shift.bits
    subspaces = [
        AffineSubspace(w.d, (
            (columns[2 * i], 1 ^ ((shift >> (2 * i)) & 1)),
            (columns[2 * i + 1], 1 ^ ((shift >> (2 * i + 1)) & 1)),
        ))
        for i in range(label.defect)
    ]
    if cubi_sum(subspaces) != w:
        raise VerificationError(f"Cubi decomposition of {w.hex()} does not sum back to the word")
    common = AffineSubspace.from_equations(w.d, [eq for s in subspaces for eq in s.equations])
    if common is None or common.dim != w.d - 2 * label.defect:
        raise VerificationError("Cubi subspaces are not coindependent")
    return subspaces


def random_cubi_sequence(d: int, k: int, rng: random.Random) -> List[AffineSubspace]:
    """ k coindependent codimension 2 subspaces through a common point """
    if 2 * k > d:
        raise ValueError(f"A cubi sequence of length {k} does not fit in dimension {d}")
    while True:
        functionals = [rng.getrandbits(d) for _ in range(2 * k)]
        if rank(Gf2Mat(tuple(functionals), d)) == 2 * k:
            break
    values = [rng.getrandbits(1) for _ in range(2 * k)]
    return [
        AffineSubspace(d, ((functionals[2 * i], values[2 * i]), (functionals[2 * i + 1], values[2 * i + 1])))
        for i in range(k)
    ]


def _hyperplane_tables(d: int):
    full = (1 << (1 << d)) - 1
    for phi in range(1, 1 << d):
        word = linear_word(d, phi)
        # {φ = v} has indicator φ + v + 1
        yield phi, 1, word
        yield phi, 0, word ^ full


def cleansing_hyperplanes(w: BoolWord) -> List[AffineSubspace]:
    """ Hyperplanes h with w + h clean

    :param w: Dirty word (weight 2^{d-1})
    :return: The 2^{2k+1} cleansing hyperplanes, h ↦ w ∩ h being checked injective
    """
    label = _require(w, Category.MIDSET_AFFINE, Category.MIDSET_NONAFFINE)
    half = 1 << (w.d - 1)
    found, meets = [], set()
    for phi, value, table in _hyperplane_tables(w.d):
        if bin(w.table ^ table).count("1") != half:
            found.append(AffineSubspace.hyperplane(w.d, phi, value))
            meets.add(w.table & table)
    if len(found) != 1 << (2 * label.defect + 1):
        raise VerificationError(f"{len(found)} cleansing hyperplanes found for a defect {label.defect} word")
    if len(meets) != len(found):
        raise VerificationError("Intersections with cleansing hyperplanes are not distinct")
    return found


def dirty_defect_by_procedure(w: BoolWord) -> int:
    """ Defect of a dirty word read off the weights of its sums with all affine hyperplanes

    >>> dirty_defect_by_procedure(BoolWord(3, 0b11110000))
    0
    """
    d = w.d
    half = 1 << (d - 1)
    if w.weight != half:
        raise CategoryError(f"Word {w.hex()} is clean")
    defects = set()
    for _, _, table in _hyperplane_tables(d):
        gap = abs(bin(w.table ^ table).count("1") - half)
        if gap:
            defects.add(d - 1 - (gap.bit_length() - 1))
    if len(defects) != 1:
        raise VerificationError(f"Cleansing sums of {w.hex()} disagree on the defect: {sorted(defects)}")
    return defects.pop()


@dataclass(frozen=True)
class NoncleansingReport:
    defect: int
    cleansing: int
    noncleansing: int
    neither_contain_nor_avoid: int
    clean_to_dirty: int

    @property
    def difference(self) -> int:
        return self.neither_contain_nor_avoid - self.noncleansing

    def json(self):
        return {
            "defect": self.defect, "cleansing": self.cleansing, "noncleansing": self.noncleansing,
            "neither_contain_nor_avoid": self.neither_contain_nor_avoid, "clean_to_dirty": self.clean_to_dirty,
            "difference": self.difference
        }


def noncleansing_reconciliation(w: BoolWord) -> NoncleansingReport:
    """ Compares the noncleansing hyperplanes of a dirty word with the hyperplanes that neither contain nor
    avoid the common intersection of a short clean word of the same coset.
    """
    d = w.d
    cleansing = cleansing_hyperplanes(w)
    hyperplanes = AffineSubspace.hyperplanes(d)
    clean = w + cleansing[0].indicator()
    label, _ = canonical_form(clean)
    if label.category == Category.LONG:
        clean = clean.complement()
    subspaces = cubi_decompose(clean) if label.defect else []
    if subspaces:
        meet = AffineSubspace.from_equations(d, [eq for s in subspaces for eq in s.equations])
    else:
        meet = AffineSubspace(d, ())
    neither = 0
    for h in hyperplanes:
        inter = h.intersection(meet)
        if inter is not None and inter.dim < meet.dim:
            neither += 1
    half = 1 << (d - 1)
    clean_to_dirty = sum(1 for h in hyperplanes if (clean + h.indicator()).weight == half)
    return NoncleansingReport(
        defect=label.defect,
        cleansing=len(cleansing),
        noncleansing=len(hyperplanes) - len(cleansing),
        neither_contain_nor_avoid=neither,
        clean_to_dirty=clean_to_dirty
    )


@dataclass(frozen=True)
class CosetReport:
    d: int
    defect: int
    clean_count: int
    dirty_count: int
    clean_representative: BoolWord

    def __post_init__(self):
        if self.clean_count != 1 << (2 * self.defect + 1):
            raise VerificationError(f"Coset of defect {self.defect} has {self.clean_count} clean words")
        if self.clean_count + self.dirty_count != 1 << (self.d + 1):
            raise VerificationError("Coset size is not 2^{d+1}")

    def json(self):
        return {
            "d": self.d, "defect": self.defect, "clean_count": self.clean_count, "dirty_count": self.dirty_count,
            "clean_representative": self.clean_representative.hex()
        }


def coset_report(quad: Gf2Mat) -> CosetReport:
    """ Clean and dirty counts in the coset quad + RM(1,d)

    :param quad: Upper triangular quadratic part
    """
    d = quad.nrows
    base = from_anf(Anf(d, 0, 0, quad)).table
    full = (1 << (1 << d)) - 1
    half = 1 << (d - 1)
    coords = [coordinate_word(d, i) for i in range(d)]
    clean, representative = 0, None
    for functional in range(1 << d):
        table = base
        for i in range(d):
            if (functional >> i) & 1:
                table ^= coords[i]
        for candidate in (table, table ^ full):
            if bin(candidate).count("1") != half:
                clean += 1
                if representative is None:
                    representative = candidate
    k = rank(quad + quad.transpose()) // 2
    return CosetReport(d, k, clean, (1 << (d + 1)) - clean, BoolWord(d, representative))


def codeword_labels(d: int) -> Dict[int, ClassLabel]:
    """ Label of every codeword of RM(2,d) from its weight and the rank of its quadratic part """
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    coords = [coordinate_word(d, i) for i in range(d)]
    linear_tables = [0] * (1 << d)
    for functional in range(1, 1 << d):
        low = functional & -functional
        linear_tables[functional] = linear_tables[functional ^ low] ^ coords[low.bit_length() - 1]
    full = (1 << (1 << d)) - 1
    half = 1 << (d - 1)
    labels = {}
    for mask in range(1 << len(pairs)):
        rows = [0] * d
        for bit, (i, j) in enumerate(pairs):
            if (mask >> bit) & 1:
                rows[i] |= 1 << j
        quad = Gf2Mat(tuple(rows), d)
        k = rank(quad + quad.transpose()) // 2
        base = from_anf(Anf(d, 0, 0, quad)).table
        for linear in linear_tables:
            for table in (base ^ linear, base ^ linear ^ full):
                weight = bin(table).count("1")
                if weight < half:
                    labels[table] = ClassLabel(Category.SHORT, k)
                elif weight > half:
                    labels[table] = ClassLabel(Category.LONG, k)
                else:
                    labels[table] = ClassLabel(Category.MIDSET_NONAFFINE if k else Category.MIDSET_AFFINE, k)
    return labels


CONTAINMENT_ROWS = {
    (1, 1): lambda d: (1 << (d - 2), 3 << (d - 2), 1 << (d - 1)),
    (2, 1): lambda d: (3 << (d - 3), 3 << (d - 2), 3 << (d - 3)),
    (1, 2): lambda d: (1 << (d - 2), 5 << (d - 3), 3 << (d - 3)),
    (2, 2): lambda d: (3 << (d - 3), 5 << (d - 3), 1 << (d - 2)),
}


@dataclass
class ContainmentProfile:
    d: int
    midset_cases: Dict[str, int] = field(default_factory=dict)
    rows: Dict[Tuple[int, int], int] = field(default_factory=dict)
    violations: List[Tuple[str, str]] = field(default_factory=list)

    def json(self):
        return {
            "d": self.d,
            "midset_cases": self.midset_cases,
            "rows": [{"k": k, "r": r, "count": c} for (k, r), c in sorted(self.rows.items())],
            "violations": [list(v) for v in self.violations]
        }


def containment_profile(d: int) -> ContainmentProfile:
    """ Scans every codeword A contained in a representative B of each orbit, 0 ≠ A < B ≠ F_2^d, and sorts the
    pair into the midset case or one of the four (k, r) rows.
    """
    logging.info(f"Scanning containments of RM(2,{d})")
    labels = codeword_labels(d)
    full = (1 << (1 << d)) - 1
    profile = ContainmentProfile(d)
    representatives = {label.key: standard_representative(label, d) for label in set(labels.values())}
    for key, b_word in sorted(representatives.items()):
        b = b_word.table
        if b in (0, full):
            continue
        label_b = labels[b]
        for a, label_a in labels.items():
            if a == 0 or a == b or a & ~b:
                continue
            kind = _containment_kind(d, a, b, label_a, label_b, labels)
            if kind is None:
                profile.violations.append((label_a.key, label_b.key))
            elif isinstance(kind, str):
                profile.midset_cases[kind] = profile.midset_cases.get(kind, 0) + 1
            else:
                profile.rows[kind] = profile.rows.get(kind, 0) + 1
    return profile


def _containment_kind(d, a, b, label_a, label_b, labels):
    full = (1 << (1 << d)) - 1
    codim2 = ClassLabel(Category.SHORT, 1)
    if label_b.is_midset:
        if label_a != codim2 or label_b.defect > 1:
            return None
        return f"codim2<{label_b.key}"
    if label_a.is_midset:
        complement = labels[b ^ full]
        if complement != codim2 or label_a.defect > 1:
            return None
        return f"{label_a.key}<complement-codim2"
    if label_a.category == Category.LONG:
        a, b = b ^ full, a ^ full
        label_a, label_b = labels[a], labels[b]
    if label_a.category != Category.SHORT or label_b.category != Category.LONG:
        return None
    row = (label_a.defect, label_b.defect)
    if row not in CONTAINMENT_ROWS:
        return None
    if CONTAINMENT_ROWS[row](d) != (bin(a).count("1"), bin(b).count("1"), bin(a ^ b).count("1")):
        return None
    return row


def unique_hyperplane_meet(b: BoolWord, a: AffineSubspace) -> AffineSubspace:
    """ The unique hyperplane H with B ∩ H = A for a codimension 2 subspace A of a defect 1 midset B

    :param b: Midset of defect 1
    :param a: Codimension 2 affine subspace contained in b
    :return: H; the two other hyperplanes through A are checked to be cleansing for B
    """
    label, _ = canonical_form(b)
    if label != ClassLabel(Category.MIDSET_NONAFFINE, 1):
        raise CategoryError(f"Word {b.hex()} is {label}, a defect 1 midset is required")
    a_table = a.indicator().table
    if a.codim != 2 or a_table & ~b.table:
        raise NotSublatticeError("The subspace is not a codimension 2 subspace of the midset")
    (phi1, v1), (phi2, v2) = a.equations
    candidates = [
        AffineSubspace.hyperplane(b.d, phi1, v1),
        AffineSubspace.hyperplane(b.d, phi2, v2),
        AffineSubspace.hyperplane(b.d, phi1 ^ phi2, v1 ^ v2),
    ]
    meeting = [h for h in candidates if b.table & h.indicator().table == a_table]
    if len(meeting) != 1:
        raise VerificationError(f"{len(meeting)} hyperplanes meet the midset exactly in the subspace")
    half = 1 << (b.d - 1)
    for h in candidates:
        if h is not meeting[0] and (b + h.indicator()).weight == half:
            raise VerificationError("A hyperplane through the subspace is not cleansing")
    return meeting[0]


def conjugator(w1: BoolWord, w2: BoolWord) -> AffineMap:
    """ An affine map h with w1∘h = w2, for words of the same orbit """
    label1, g1 = canonical_form(w1)
    label2, g2 = canonical_form(w2)
    if label1 != label2:
        raise CategoryError(f"Words are in different orbits: {label1} and {label2}")
    h = g2.then(g1.inverse())
    if h.pull(w1) != w2:
        raise VerificationError("Composed witnesses do not conjugate the words")
    return h


def classify_word(w: BoolWord) -> Dict:
    """ Orbit label of a codeword with the structure attached to its category

    >>> classify_word(BoolWord(2, 0b1000))["key"]
    'Short1'
    """
    label, witness = canonical_form(w)
    out = {
        "d": w.d,
        "word": w.hex(),
        "weight": w.weight,
        "defect": label.defect,
        "category": label.category.value,
        "key": label.key,
        "clean": label.clean,
        "core": None,
        "cubi": None,
        "cleansing_count": None,
        "witness": {"matrix": list(witness.matrix.rows), "shift": witness.shift.bits},
    }
    if label.clean:
        out["core"] = [list(eq) for eq in core(w).equations]
        if label.category == Category.SHORT and label.defect:
            out["cubi"] = [[list(eq) for eq in s.equations] for s in cubi_decompose(w, label.defect)]
    else:
        out["cleansing_count"] = len(cleansing_hyperplanes(w))
    logging.debug(f"Classified {w.hex()} as {label}")
    return out
