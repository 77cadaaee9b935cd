""" Orbit census of RM(2,d) under AGL(d,2).

Three modes:

- ``exhaustive``: every coset q + RM(1,d) is counted at once from the Walsh-Hadamard spectrum of (−1)^q;
- ``canonical``: every word goes through :func:`canonical_form` with its witness check;
- ``sampled``: seeded random words, for dimensions beyond exhaustive reach.
"""
import logging
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import tqdm

from bwlab.codes.boolquad import (
    Anf, BoolWord, Category, ClassLabel, canonical_form, from_anf, random_word, standard_representative, defect
)
from bwlab.codes.gf2 import Gf2Mat, rank
from bwlab.codes.rm2 import dirty_defect_by_procedure, coset_report, codeword_labels
from bwlab.config import settings
from bwlab.errors import ResourceGuardError

MODES = ("exhaustive", "canonical", "sampled")
MAX_EXHAUSTIVE_D = 6
MAX_CANONICAL_D = 5


def gl_order(n: int) -> int:
    """ |GL(n,2)|

    >>> gl_order(3)
    168
    """
    out = 1
    for i in range(n):
        out *= (1 << n) - (1 << i)
    return out


def sp_order(k: int) -> int:
    """ |Sp(2k,2)|

    >>> sp_order(1), sp_order(2)
    (6, 720)
    """
    out = 1 << (k * k)
    for i in range(1, k + 1):
        out *= (1 << (2 * i)) - 1
    return out


def agl_order(d: int) -> int:
    return (1 << d) * gl_order(d)


def rm2_size(d: int) -> int:
    return 1 << (1 + d + d * (d - 1) // 2)


def clean_stabilizer_order(d: int, k: int) -> int:
    """ Stabilizer order of a clean word of defect k, 2^{(1+2k)(d-2k)}·|Sp(2k,2)|·|GL(d-2k,2)| """
    return (1 << ((1 + 2 * k) * (d - 2 * k))) * sp_order(k) * gl_order(d - 2 * k)


def printed_dirty_stabilizer_order(d: int, k: int) -> Optional[int]:
    """ Clean stabilizer divided by the index 2^{d+1} − 2^{2k+1}, the value claimed for dirty words """
    index = (1 << (d + 1)) - (1 << (2 * k + 1))
    if index <= 0:
        return None
    order = clean_stabilizer_order(d, k)
    return order // index if order % index == 0 else None


def quad_from_mask(d: int, mask: int) -> Gf2Mat:
    rows = [0] * d
    bit = 0
    for i in range(d):
        for j in range(i + 1, d):
            if (mask >> bit) & 1:
                rows[i] |= 1 << j
            bit += 1
    return Gf2Mat(tuple(rows), d)


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """ Unnormalized Walsh-Hadamard transform along the last axis

    >>> walsh_hadamard(np.array([1, 1, 1, -1])).tolist()
    [2, 2, 2, -2]
    """
    out = np.array(values, dtype=np.int64)
    n = out.shape[-1]
    batch = out.reshape(-1, n)
    h = 1
    while h < n:
        view = batch.reshape(batch.shape[0], n // (2 * h), 2, h)
        x, y = view[:, :, 0, :].copy(), view[:, :, 1, :].copy()
        view[:, :, 0, :] = x + y
        view[:, :, 1, :] = x - y
        h *= 2
    return batch.reshape(out.shape)


def _signs(d: int, tables: List[int]) -> np.ndarray:
    n = 1 << d
    bits = np.array([[(t >> x) & 1 for x in range(n)] for t in tables], dtype=np.int64)
    return 1 - 2 * bits


def _exhaustive_chunk(d: int, masks: Iterable[int]) -> Counter:
    masks = list(masks)
    quads = [quad_from_mask(d, m) for m in masks]
    tables = [from_anf(Anf(d, 0, 0, q)).table for q in quads]
    spectrum = walsh_hadamard(_signs(d, tables))
    counts = Counter()
    for q, row in zip(quads, spectrum):
        k = rank(q + q.transpose()) // 2
        clean = int(np.count_nonzero(row))
        dirty = 2 * ((1 << d) - clean)
        counts[ClassLabel(Category.SHORT, k).key] += clean
        counts[ClassLabel(Category.LONG, k).key] += clean
        if dirty:
            category = Category.MIDSET_NONAFFINE if k else Category.MIDSET_AFFINE
            counts[ClassLabel(category, k).key] += dirty
    return counts


def _canonical_chunk(d: int, masks: Iterable[int]) -> Counter:
    counts = Counter()
    full = (1 << (1 << d)) - 1
    for mask in masks:
        base = from_anf(Anf(d, 0, 0, quad_from_mask(d, mask))).table
        for linear in range(1 << d):
            word = from_anf(Anf(d, 0, linear, Gf2Mat.zero(d))).table ^ base
            for table in (word, word ^ full):
                label, _ = canonical_form(BoolWord(d, table))
                counts[label.key] += 1
    return counts


@dataclass(frozen=True)
class CensusRow:
    label: ClassLabel
    orbit_size: int
    stabilizer_order: int
    representative: BoolWord
    formula_stabilizer_order: Optional[int] = None
    printed_dirty_stabilizer_order: Optional[int] = None

    @property
    def formula_agrees(self) -> Optional[bool]:
        if self.label.clean:
            return self.formula_stabilizer_order == self.stabilizer_order
        if self.printed_dirty_stabilizer_order is None:
            return None
        return self.printed_dirty_stabilizer_order == self.stabilizer_order

    def json(self):
        return {
            "category": self.label.category.value,
            "defect": self.label.defect,
            "key": self.label.key,
            "orbit_size": self.orbit_size,
            "stabilizer_order": self.stabilizer_order,
            "representative_hex": self.representative.hex(),
            "formula_stabilizer_order": self.formula_stabilizer_order,
            "printed_dirty_stabilizer_order": self.printed_dirty_stabilizer_order,
            "formula_agrees": self.formula_agrees,
        }


@dataclass
class CensusResult:
    d: int
    mode: str
    rows: List[CensusRow]
    seed: Optional[int] = None
    samples: Optional[int] = None
    sample_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(row.orbit_size for row in self.rows)

    @property
    def expected_total(self) -> int:
        return rm2_size(self.d)

    def sizes(self) -> Dict[str, int]:
        return {row.label.key: row.orbit_size for row in self.rows}

    def json(self):
        return {
            "d": self.d, "mode": self.mode, "seed": self.seed, "samples": self.samples,
            "total": self.total, "expected_total": self.expected_total,
            "rows": [row.json() for row in self.rows],
            "sample_counts": self.sample_counts,
        }


def _rows(d: int, counts: Counter) -> List[CensusRow]:
    rows = []
    for key in sorted(counts, key=_row_order):
        label = ClassLabel.from_key(key)
        orbit = counts[key]
        agl = agl_order(d)
        rows.append(CensusRow(
            label=label,
            orbit_size=orbit,
            stabilizer_order=agl // orbit,
            representative=standard_representative(label, d),
            formula_stabilizer_order=clean_stabilizer_order(d, label.defect) if label.clean else None,
            printed_dirty_stabilizer_order=None if label.clean else printed_dirty_stabilizer_order(d, label.defect),
        ))
    return rows


def _row_order(key: str) -> Tuple[int, int]:
    label = ClassLabel.from_key(key)
    order = [Category.SHORT, Category.LONG, Category.MIDSET_AFFINE, Category.MIDSET_NONAFFINE]
    return order.index(label.category), label.defect


def _chunks(d: int, size: int) -> List[range]:
    total = 1 << (d * (d - 1) // 2)
    return [range(start, min(start + size, total)) for start in range(0, total, size)]


def census(d: int, mode: str = "exhaustive", threads: Optional[int] = None, seed: Optional[int] = None,
           samples: int = 10000, progress: bool = False) -> CensusResult:
    """ Orbit sizes of RM(2,d) under AGL(d,2)

    :param d: Dimension
    :param mode: One of exhaustive, canonical or sampled
    :param threads: Worker processes, defaults to the configured count
    :param seed: Seed of the sampled mode, defaults to the configured seed
    :param samples: Number of sampled words
    :param progress: Show a tqdm progress bar
    """
    if mode not in MODES:
        raise ValueError(f"Unknown census mode {mode}")
    if mode == "exhaustive" and d > MAX_EXHAUSTIVE_D:
        raise ResourceGuardError(f"Exhaustive census is limited to d <= {MAX_EXHAUSTIVE_D}, use the sampled mode")
    if mode == "canonical" and d > MAX_CANONICAL_D:
        raise ResourceGuardError(f"Canonical census is limited to d <= {MAX_CANONICAL_D}, use the exhaustive mode")
    if d < 1:
        raise ValueError("Dimension must be positive")
    threads = threads or settings().threads
    logging.info(f"Running {mode} census of RM(2,{d}) on {threads} workers")

    if mode == "sampled":
        seed = settings().seed if seed is None else seed
        rng = random.Random(seed)
        counts = Counter(
            canonical_form(random_word(d, rng))[0].key
            for _ in tqdm.tqdm(range(samples), desc="Sampling words", disable=not progress)
        )
        scale = rm2_size(d)
        estimated = Counter({key: round(count * scale / samples) for key, count in counts.items()})
        result = CensusResult(d, mode, [], seed=seed, samples=samples, sample_counts=dict(counts))
        result.rows = [
            CensusRow(ClassLabel.from_key(key), estimated[key], agl_order(d) // max(estimated[key], 1),
                      standard_representative(ClassLabel.from_key(key), d))
            for key in sorted(estimated, key=_row_order)
        ]
        return result

    worker = _exhaustive_chunk if mode == "exhaustive" else _canonical_chunk
    chunks = _chunks(d, 4096 if mode == "exhaustive" else 16)
    counts = Counter()
    if threads == 1 or len(chunks) == 1:
        for chunk in tqdm.tqdm(chunks, desc="Counting cosets", disable=not progress):
            counts.update(worker(d, chunk))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(worker, d, chunk) for chunk in chunks]
            for future in tqdm.tqdm(as_completed(futures), total=len(futures), desc="Counting cosets",
                                    disable=not progress):
                counts.update(future.result())
    result = CensusResult(d, mode, _rows(d, counts))
    logging.info(f"Census of RM(2,{d}) found {len(result.rows)} orbits, {result.total} words")
    return result


@dataclass(frozen=True)
class AgreementReport:
    d: int
    checked: int
    mismatches: Tuple[str, ...]
    seed: Optional[int] = None

    def json(self):
        return {"d": self.d, "checked": self.checked, "mismatches": list(self.mismatches), "seed": self.seed}


def defect_agreement(d: int, samples: Optional[int] = None, seed: Optional[int] = None) -> AgreementReport:
    """ Rank-based defect against the hyperplane sweep, on every dirty word (or on sampled words)

    :param d: Dimension
    :param samples: When given, sample this many random dirty words instead of scanning RM(2,d)
    :param seed: Seed for the sampled mode
    """
    mismatches = []
    checked = 0
    if samples is None:
        if d > MAX_CANONICAL_D:
            raise ResourceGuardError(f"Exhaustive defect agreement is limited to d <= {MAX_CANONICAL_D}")
        for table, label in codeword_labels(d).items():
            if label.clean:
                continue
            checked += 1
            if dirty_defect_by_procedure(BoolWord(d, table)) != label.defect:
                mismatches.append(BoolWord(d, table).hex())
        return AgreementReport(d, checked, tuple(mismatches))
    seed = settings().seed if seed is None else seed
    rng = random.Random(seed)
    half = 1 << (d - 1)
    while checked < samples:
        w = random_word(d, rng)
        if w.weight != half:
            continue
        checked += 1
        if dirty_defect_by_procedure(w) != defect(w):
            mismatches.append(w.hex())
    return AgreementReport(d, checked, tuple(mismatches), seed=seed)


def coset_law(d: int) -> Dict[int, int]:
    """ Checks the clean count of every coset of RM(1,d) and returns the number of cosets per defect """
    if d > MAX_EXHAUSTIVE_D:
        raise ResourceGuardError(f"Coset scan is limited to d <= {MAX_EXHAUSTIVE_D}")
    per_defect = Counter()
    for mask in range(1 << (d * (d - 1) // 2)):
        report = coset_report(quad_from_mask(d, mask))
        per_defect[report.defect] += 1
    return dict(per_defect)
