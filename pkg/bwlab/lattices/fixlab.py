""" Fixed point sublattices of involutions of the Barnes–Wall lattices.

Eigenlattice reports with the structural checks that apply to each involution class, relatively
semiselfdual (RSSD) sublattices with their involutions, the orbit label of an RSSD sublattice found by
multiplying its involution through the lower group, and trace tables of lower elements on fixed lattices.

Isometry claims are certified by fingerprints and orthogonal decompositions only.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from bwlab.codes.gf2 import in_span
from bwlab.config import settings
from bwlab.errors import (
    InvalidInvolutionError, NotSublatticeError, ResourceGuardError, VerificationError
)
from bwlab.groups.pauli import (
    InvolutionKind, InvolutionLabel, LowerElement, MonomialMap, classify_involution, commutator_map,
    dirty_partners, q_t_singularity, ul_count, ul_factorizations,
    ul_printed_count, z_elements
)
from bwlab.lattices.bw import MAX_LATTICE_D, build, normalization_exponent, ssbw_entry
from bwlab.lattices.zlat import (
    ExactLattice, Fingerprint, canonicalize, doubly_even_check, dual, eigenlattice, fingerprint,
    integer_kernel, norm, orthogonal_decomposition, preserves, rank_mod2, short_vectors, sum_lattice,
    total_eigenlattice, trace_on
)

CERTIFICATION = "isometry types are certified by fingerprint and orthogonal decomposition only"


def _integral(vector: Sequence[Fraction]) -> List:
    return [int(x) if x.denominator == 1 else x for x in vector]


class ProjectionInvolution:
    """ The rational involution which is −1 on the span of a sublattice and +1 on its orthogonal complement """

    def __init__(self, sub: ExactLattice):
        if sub.denominator != 1:
            raise ValueError("Only integral coordinates are supported")
        self.sub = sub
        self.size = sub.ambient_dim
        if sub.rank:
            gram = DomainMatrix(
                [[QQ(sum(a * b for a, b in zip(u, v))) for v in sub.basis] for u in sub.basis],
                (sub.rank, sub.rank), QQ
            )
            self._inverse = [
                [Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in gram.inv().to_list()
            ]
        else:
            self._inverse = []

    def apply(self, vector: Sequence[int]) -> List:
        """ Image of a row vector; entries stay Fractions where the image is not integral """
        if len(vector) != self.size:
            raise ValueError("Vector length does not match the ambient dimension")
        products = [sum(a * b for a, b in zip(vector, row)) for row in self.sub.basis]
        coefficients = [sum(g * p for g, p in zip(inv, products)) for inv in self._inverse]
        out = [Fraction(x) for x in vector]
        for c, row in zip(coefficients, self.sub.basis):
            if c:
                out = [o - 2 * c * r for o, r in zip(out, row)]
        return _integral(out)

    def as_monomial(self) -> Optional[MonomialMap]:
        """ The same map as a signed permutation of coordinates, when it is one """
        perm, signs = [], 0
        for x in range(self.size):
            image = self.apply([int(i == x) for i in range(self.size)])
            support = [i for i, v in enumerate(image) if v]
            if len(support) != 1 or abs(image[support[0]]) != 1:
                return None
            perm.append(support[0])
            if image[support[0]] < 0:
                signs |= 1 << x
        if sorted(perm) != list(range(self.size)):
            return None
        return MonomialMap(tuple(perm), signs)


@dataclass(frozen=True)
class RssdSublattice:
    sub: ExactLattice
    annihilator: ExactLattice
    involution: ProjectionInvolution = field(compare=False)

    def json(self):
        monomial = self.involution.as_monomial()
        return {
            "sub": self.sub.json(),
            "annihilator": self.annihilator.json(),
            "involution": None if monomial is None else monomial.json(),
        }


def annihilator(lattice: ExactLattice, sub: ExactLattice) -> ExactLattice:
    """ {x ∈ L : x·m = 0 for every m in the sublattice} """
    if not sub.rank:
        return lattice
    pairing = [[sum(a * b for a, b in zip(u, m)) for m in sub.basis] for u in lattice.basis]
    kernel = integer_kernel(pairing, sub.rank)
    return canonicalize([lattice.combine(c) for c in kernel], lattice.ambient_dim)


def rssd_test(lattice: ExactLattice, sub: ExactLattice) -> Optional[RssdSublattice]:
    """ The sublattice with its annihilator and involution when 2L ⊆ M + Ann_L(M), else None

    >>> d4 = canonicalize([[1, 1, 0, 0], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]])
    >>> rssd_test(d4, d4).involution.as_monomial().trace
    -4
    """
    if lattice.denominator != 1 or sub.denominator != 1:
        raise ValueError("Only integral coordinates are supported")
    if not sub.is_sublattice_of(lattice):
        raise NotSublatticeError("The candidate is not contained in the lattice")
    ann = annihilator(lattice, sub)
    if sub.rank + ann.rank != lattice.rank:
        return None
    both = sum_lattice(sub, ann)
    if any([2 * x for x in row] not in both for row in lattice.basis):
        return None
    involution = ProjectionInvolution(sub)
    images = [involution.apply(list(row)) for row in lattice.basis]
    if any(isinstance(x, Fraction) for image in images for x in image):
        raise VerificationError("Involution of an RSSD sublattice is not integral on the lattice")
    if not preserves(lattice, involution):
        raise VerificationError("Involution of an RSSD sublattice does not preserve the lattice")
    return RssdSublattice(sub, ann, involution)


def ssd_test(sub: ExactLattice) -> bool:
    """ Whether 2·dual(M) ⊆ M

    >>> ssd_test(canonicalize([[1, 1, 0, 0], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]]))
    True
    """
    return dual(sub).scaled(2).is_sublattice_of(sub)


def _scan_products(args) -> List[Tuple[int, Optional[int]]]:
    t, sign, start, stop = args
    d = t.d
    out = []
    for v in range(start, stop):
        product = t * LowerElement.from_packed(v, d, sign).to_map()
        if product.trace != 0 and product.is_involution:
            label = classify_involution(product).label
            out.append((label.defect, label.frame_class))
    return out


def rssd_orbit_label(lattice: ExactLattice, sub: ExactLattice, threads: Optional[int] = None) -> InvolutionLabel:
    """ Class of the involution of an RSSD sublattice, found by multiplying it by every element of R.

    A clean involutive product shows that the involution splits and gives its defect. When there is
    none, the involution is nonsplit and its defect is half the dimension of [R, t]/Z(R).
    """
    rssd = rssd_test(lattice, sub)
    if rssd is None:
        raise InvalidInvolutionError("The sublattice is not relatively semiselfdual")
    t = rssd.involution.as_monomial()
    if t is None:
        raise InvalidInvolutionError("The involution of the sublattice is not monomial in frame coordinates")
    d = t.d
    if d > MAX_LATTICE_D:
        raise ResourceGuardError(f"Orbit labels are computed up to d = {MAX_LATTICE_D}")
    threads = settings().threads if threads is None else threads
    total = 1 << (2 * d)
    parts = max(1, threads)
    jobs = [
        (t, sign, total * i // parts, total * (i + 1) // parts) for sign in (0, 1) for i in range(parts)
    ]
    if threads > 1 and d >= 4:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            found = [hit for chunk in executor.map(_scan_products, jobs) for hit in chunk]
    else:
        found = [hit for job in jobs for hit in _scan_products(job)]

    if found:
        if len(set(found)) != 1:
            raise VerificationError(f"Clean products disagree on defect and frame: {sorted(set(found), key=str)}")
        k, frame = found[0]
        if t.trace:
            label = InvolutionLabel(InvolutionKind.CLEAN, k, 1 if t.trace > 0 else -1, frame)
        else:
            label = InvolutionLabel(InvolutionKind.DIRTY, k, None, frame)
    else:
        cmap = commutator_map(t)
        if cmap.split:
            raise VerificationError("Split involution without a clean product in its coset")
        label = InvolutionLabel(InvolutionKind.NONSPLIT, cmap.defect)
    logging.info(f"RSSD sublattice of rank {sub.rank} has orbit label {label} ({len(found)} clean products)")
    return label


@dataclass(frozen=True)
class StructureCheck:
    name: str
    expected: str
    observed: str
    passed: bool

    def json(self):
        return {"name": self.name, "expected": self.expected, "observed": self.observed, "passed": self.passed}


def _check(name: str, expected, observed, passed: Optional[bool] = None) -> StructureCheck:
    if passed is None:
        passed = expected == observed
    return StructureCheck(name, str(expected), str(observed), passed)


@dataclass(frozen=True)
class FixReport:
    d: int
    label: InvolutionLabel
    trace: int
    plus: Fingerprint
    minus: Fingerprint
    summands: Dict[str, Tuple[Fingerprint, ...]]
    checks: Tuple[StructureCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def json(self):
        return {
            "d": self.d,
            "label": self.label.json(),
            "trace": self.trace,
            "plus": self.plus.json(),
            "minus": self.minus.json(),
            "summands": {sign: [f.json() for f in fps] for sign, fps in self.summands.items()},
            "checks": [c.json() for c in self.checks],
            "passed": self.passed,
            "certification": CERTIFICATION,
        }


def _signed(sign: int) -> str:
    return "+" if sign > 0 else "-"


def fix_report(d: int, t: MonomialMap, decompose: Optional[bool] = None,
               threads: Optional[int] = None) -> FixReport:
    """ Eigenlattices of an involution on build(d) with the checks that apply to its class

    :param d: Dimension exponent, at most 5
    :param t: Involution preserving build(d)
    :param decompose: Split the eigenlattices into orthogonal summands; defaults to nonsplit involutions only
    """
    if d > MAX_LATTICE_D:
        raise ResourceGuardError(f"Fixed point analysis is limited to d ≤ {MAX_LATTICE_D}")
    if t.d != d:
        raise InvalidInvolutionError(f"The involution acts in dimension {t.size}, not {1 << d}")
    report = classify_involution(t)
    label, k = report.label, report.defect
    lattice = build(d).lattice
    eigen = {1: eigenlattice(lattice, t, 1), -1: eigenlattice(lattice, t, -1)}
    prints = {sign: fingerprint(eigen[sign], threads=threads) for sign in (1, -1)}
    if decompose is None:
        decompose = label.kind == InvolutionKind.NONSPLIT
    summands: Dict[str, Tuple[Fingerprint, ...]] = {}
    parts: Dict[int, List[ExactLattice]] = {}
    if decompose:
        for sign in (1, -1):
            parts[sign] = orthogonal_decomposition(eigen[sign], threads)
            summands[_signed(sign)] = tuple(fingerprint(s, threads=threads) for s in parts[sign])

    n = 1 << d
    checks = [
        _check("rank_sum", n, eigen[1].rank + eigen[-1].rank),
        _check("trace", report.trace, eigen[1].rank - eigen[-1].rank),
        _check("2L in L+ + L-", True, lattice.scaled(2).is_sublattice_of(total_eigenlattice(lattice, t))),
    ]
    if label.kind == InvolutionKind.DIRTY:
        checks.append(_check("dirty_ranks", (n // 2, n // 2), (eigen[1].rank, eigen[-1].rank)))
    if label.kind == InvolutionKind.CLEAN:
        big = 1 if report.trace > 0 else -1
        checks.append(_check("clean_ranks", (n // 2 + (n >> (k + 1)), n // 2 - (n >> (k + 1))),
                             (eigen[big].rank, eigen[-big].rank)))
        if k == 1 and d >= 3:
            checks.append(_check("large_rank", 3 * (n // 4), eigen[big].rank))
            checks.append(_check(f"small_is_ssbw{d - 2}", ssbw_entry(d, d - 2), prints[-big]))
    if label.kind == InvolutionKind.NONSPLIT and k == 1:
        checks.append(_check("rank_mod2", n // 2, rank_mod2(lattice, t)))
        if d >= 4:
            scale = 1 << normalization_exponent(d)
            for sign in (1, -1):
                checks.append(_check(f"doubly_even{_signed(sign)}", True, doubly_even_check(eigen[sign], scale)))
        if decompose:
            for sign in (1, -1):
                pieces = summands[_signed(sign)]
                if d == 2:
                    checks.append(_check(f"summands{_signed(sign)}", [2, 4], sorted(p.min_norm for p in pieces)))
                elif d == 3:
                    expected = [Fingerprint(1, 4, 4, 2, ((4, 2),))] * 4
                    checks.append(_check(f"summands{_signed(sign)}", expected, list(pieces)))
                else:
                    expected = [ssbw_entry(d, d - 2)] * 2
                    checks.append(_check(f"summands{_signed(sign)}", expected, list(pieces)))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        logging.warning(f"Fixed point checks failed for {label} in dimension {n}: {', '.join(failed)}")
    return FixReport(d, label, report.trace, prints[1], prints[-1], summands, tuple(checks))


def orthogonal_roots(lattice: ExactLattice, count: int) -> List[List[int]]:
    """ Greedy choice of pairwise orthogonal minimal vectors """
    vectors = short_vectors(lattice, min(norm(row) for row in lattice.rows()) if lattice.rank else 0)
    minimum = min(norm(v) for v in vectors)
    chosen: List[List[int]] = []
    for v in sorted(vectors):
        if norm(v) != minimum:
            continue
        if all(sum(a * b for a, b in zip(v, w)) == 0 for w in chosen):
            chosen.append(v)
            if len(chosen) == count:
                return chosen
    raise VerificationError(f"Only {len(chosen)} pairwise orthogonal minimal vectors were found")


def reflection_fixture(d: int, count: int) -> Tuple[ProjectionInvolution, ExactLattice]:
    """ Product of the reflections in pairwise orthogonal minimal vectors of build(d), with its −1 lattice """
    lattice = build(d).lattice
    roots = orthogonal_roots(lattice, count)
    involution = ProjectionInvolution(canonicalize(roots, lattice.ambient_dim))
    return involution, eigenlattice(lattice, involution, -1)


@dataclass(frozen=True)
class TraceRow:
    element: str
    plus_trace: int
    minus_trace: int
    expected_plus: Optional[int]
    in_clean_centre: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.expected_plus is None or self.plus_trace == self.expected_plus

    def json(self):
        return {
            "element": self.element, "plus_trace": self.plus_trace, "minus_trace": self.minus_trace,
            "expected_plus": self.expected_plus, "in_clean_centre": self.in_clean_centre, "passed": self.passed,
        }


@dataclass(frozen=True)
class JointRow:
    """ Rank of L(a, b) = {x : x·u = a·x, x·ℓ = b·x} and the multiplicities of ±1 for z on it """
    a: int
    b: int
    rank: int
    expected_rank: int
    plus: int
    expected_plus: int
    minus: int
    expected_minus: int

    @property
    def passed(self) -> bool:
        return (self.rank, self.plus, self.minus) == (self.expected_rank, self.expected_plus, self.expected_minus)

    def json(self):
        return {
            "a": self.a, "b": self.b, "rank": self.rank, "expected_rank": self.expected_rank,
            "plus": self.plus, "expected_plus": self.expected_plus,
            "minus": self.minus, "expected_minus": self.expected_minus, "passed": self.passed,
        }


@dataclass(frozen=True)
class TraceTable:
    d: int
    label: InvolutionLabel
    rows: Tuple[TraceRow, ...]
    factorization: Optional[Tuple[str, str]] = None
    ell_traces: Optional[Tuple[int, int]] = None
    joint: Tuple[JointRow, ...] = ()
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = all(r.passed for r in self.rows) and all(j.passed for j in self.joint)
        if self.ell_traces is not None:
            k = self.label.defect
            ok = ok and self.ell_traces == (1 << (self.d - k - 1), -(1 << (self.d - k - 1)))
        if "ul_enumerated" in self.counts:
            ok = ok and self.counts["ul_enumerated"] == self.counts["ul_expected"]
            ok = ok and self.counts["dirty_partners"] == self.counts["ul_printed"]
        return ok

    def json(self):
        return {
            "d": self.d,
            "label": self.label.json(),
            "rows": [r.json() for r in self.rows],
            "factorization": None if self.factorization is None else list(self.factorization),
            "ell_traces": None if self.ell_traces is None else list(self.ell_traces),
            "joint": [j.json() for j in self.joint],
            "counts": self.counts,
            "passed": self.passed,
        }


def _lattice_traces(plus: ExactLattice, minus: ExactLattice, z: MonomialMap) -> Tuple[int, int]:
    return trace_on(plus, z), trace_on(minus, z)


def _describe(m: MonomialMap) -> str:
    lower = LowerElement.from_map(m)
    if lower is not None:
        return str(lower)
    return f"diag[{m.signs:x}]" if all(p == x for x, p in enumerate(m.perm)) else f"monomial(trace={m.trace})"


def trace_table(d: int, t: MonomialMap) -> TraceTable:
    """ Traces of the elements of Z(C_R(t)) outside Z(R) on the eigenlattices of t, computed on lattice bases.

    For a clean t each element is compared with ±2^{d−k−1} on L^+ of the positive trace member of ±t, as
    its singularity dictates. For a dirty split t a factorization t = uℓ is chosen with u clean of positive
    trace; elements of Z(C_R(u)) must have trace 0, ℓ must have trace ±2^{d−k−1}, and the ranks of the joint
    eigenlattices of u and ℓ with the multiplicities of a singular z are compared with their trace formulas.
    """
    if d > MAX_LATTICE_D:
        raise ResourceGuardError(f"Trace tables are computed up to d = {MAX_LATTICE_D}")
    report = classify_involution(t)
    label, k = report.label, report.defect
    if k == 0:
        raise InvalidInvolutionError("The involution is central in the BRW group")
    lattice = build(d).lattice

    if label.kind == InvolutionKind.CLEAN:
        positive = t if report.trace > 0 else -t
        plus, minus = eigenlattice(lattice, positive, 1), eigenlattice(lattice, positive, -1)
        rows = []
        for _, _, z in z_elements(report.commutator):
            observed = _lattice_traces(plus, minus, z.to_map())
            expected = (1 if q_t_singularity(positive, z) == 0 else -1) * (1 << (d - k - 1))
            rows.append(TraceRow(str(z), observed[0], observed[1], expected))
        return TraceTable(d, label, tuple(rows))

    if label.kind != InvolutionKind.DIRTY:
        raise InvalidInvolutionError("Trace tables need a split involution")
    factorizations = ul_factorizations(t)
    u, ell = next((u, ell) for u, ell in factorizations if u.trace > 0)
    ell_map = ell.to_map()
    u_cmap = commutator_map(u)
    plus, minus = eigenlattice(lattice, t, 1), eigenlattice(lattice, t, -1)
    rows = []
    for _, _, z in z_elements(report.commutator):
        observed = _lattice_traces(plus, minus, z.to_map())
        in_centre = in_span(z.packed, u_cmap.centre, 2 * d)
        rows.append(TraceRow(str(z), observed[0], observed[1], 0 if in_centre else None, in_centre))
    ell_traces = _lattice_traces(plus, minus, ell_map)

    z = next(z for _, _, z in z_elements(u_cmap) if q_t_singularity(u, z) == 0)
    zmap = z.to_map()
    joint = []
    for a in (1, -1):
        part = eigenlattice(lattice, u, a)
        for b in (1, -1):
            piece = eigenlattice(part, ell_map, b)
            expected_rank = ((1 << d) + a * u.trace + b * ell_map.trace + a * b * t.trace) // 4
            z_trace = (zmap.trace + a * (zmap * u).trace + b * (zmap * ell_map).trace
                       + a * b * (zmap * t).trace) // 4
            observed = trace_on(piece, zmap) if piece.rank else 0
            joint.append(JointRow(
                a, b, piece.rank, expected_rank,
                (piece.rank + observed) // 2, (expected_rank + z_trace) // 2,
                (piece.rank - observed) // 2, (expected_rank - z_trace) // 2,
            ))
    counts = {
        "ul_enumerated": len(factorizations),
        "ul_expected": ul_count(k),
        "ul_printed": ul_printed_count(d, k),
        "dirty_partners": dirty_partners(u),
    }
    return TraceTable(d, label, tuple(rows), (_describe(u), str(ell)), ell_traces, tuple(joint), counts)