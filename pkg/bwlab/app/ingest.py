import logging
from typing import Iterable, Optional

import tqdm

from bwlab.app.database import CensusEntry, FingerprintEntry, db
from bwlab.codes.census import census
from bwlab.lattices.bw import MAX_LATTICE_D, build, h_table, normalization_exponent, ssbw_entry
from bwlab.lattices.zlat import fingerprint


def store_census(d: int, mode: str = "exhaustive", threads: Optional[int] = None, progress: bool = False) -> int:
    """ Runs a census and replaces the cached rows for (d, mode)

    :return: Number of rows stored
    """
    result = census(d, mode=mode, threads=threads, progress=progress)
    CensusEntry.query.filter_by(d=d, mode=mode).delete()
    for row in result.rows:
        db.session.add(CensusEntry(
            d=d, mode=mode, key=row.label.key, orbit_size=row.orbit_size,
            stabilizer_order=row.stabilizer_order, row=row.json()
        ))
    db.session.commit()
    logging.info(f"Stored {len(result.rows)} census rows for d={d} ({mode})")
    return len(result.rows)


def store_fingerprint(d: int, k: Optional[int] = None, threads: Optional[int] = None) -> FingerprintEntry:
    """ Caches the fingerprint of build(d), or of the scaled build(k) found inside build(d) """
    same_k = FingerprintEntry.k.is_(None) if k is None else FingerprintEntry.k == k
    entry = FingerprintEntry.query.filter(FingerprintEntry.d == d, same_k).first()
    if entry is not None:
        return entry
    if k is None:
        fp, h = fingerprint(build(d).lattice, threads=threads), None
    else:
        fp = ssbw_entry(d, k)
        h = h_table(d, k) + normalization_exponent(d) - normalization_exponent(k)
    entry = FingerprintEntry(d=d, k=k, h=h, fingerprint=fp.json())
    db.session.add(entry)
    db.session.commit()
    return entry


def store_all(census_dims: Iterable[int] = (2, 3, 4, 5), lattice_dims: Iterable[int] = (2, 3, 4),
              threads: Optional[int] = None, progress: bool = True):
    for d in tqdm.tqdm(list(census_dims), desc="Storing census tables", disable=not progress):
        store_census(d, threads=threads)
    for d in tqdm.tqdm(list(lattice_dims), desc="Storing fingerprints", disable=not progress):
        if d > MAX_LATTICE_D:
            continue
        store_fingerprint(d, threads=threads)
        for k in range(d - 1):
            store_fingerprint(d, k, threads=threads)
