""" Command line entry point: ``bwlab <command>``. Every command prints one JSON document on stdout
(CSV is available for census tables). Failures print a ``{"message": ...}`` document on stderr and exit
with the code attached to the error kind.
"""
import csv
import io
import json
import logging
import os
import time
from dataclasses import dataclass
from typing import Any, Dict, Optional

import click

from bwlab.app.schemas import (
    SCHEMAS, CensusDocument, ClassifyDocument, ErrorDocument, FingerprintDocument, FixReportDocument,
    InvolutionDocument, LatticeDocument, RssdDocument, RunManifest, VerifyDocument, dump
)
from bwlab.codes.boolquad import BoolWord
from bwlab.codes.census import census as run_census
from bwlab.codes.rm2 import classify_word
from bwlab.config import settings
from bwlab.errors import BwlabError, VerificationError
from bwlab.groups.pauli import MonomialMap, classify_involution, parse_involution
from bwlab.lattices.bw import build, build_recursive, verify_invariance
from bwlab.lattices.fixlab import fix_report, rssd_orbit_label, rssd_test
from bwlab.lattices.zlat import ExactLattice, eigenlattice, fingerprint


@dataclass
class Run:
    threads: Optional[int]
    seed: Optional[int]
    quiet: bool
    timing: bool
    started: float

    def manifest(self, command: str, **parameters: Any) -> RunManifest:
        return RunManifest(
            command=command,
            parameters=parameters,
            seed=self.seed,
            wall_time=round(time.perf_counter() - self.started, 6) if self.timing else 0.0,
        )


class BwlabGroup(click.Group):
    """ Maps library errors to exit codes """

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except BwlabError as E:
            click.echo(dump(ErrorDocument(message=str(E))), err=True)
            ctx.exit(E.exit_code)
        except ValueError as E:
            click.echo(dump(ErrorDocument(message=str(E))), err=True)
            ctx.exit(1)


def _involution(d: int, descriptor: str, sign: str) -> MonomialMap:
    t = parse_involution(d, descriptor)
    return -t if sign == "-" else t


@click.group(cls=BwlabGroup)
@click.option("--threads", type=int, default=None, help="Worker processes, defaults to BWLAB_THREADS")
@click.option("--seed", type=int, default=None, help="Seed of sampled modes, defaults to BWLAB_SEED")
@click.option("--quiet", is_flag=True, default=False, help="Hide progress bars")
@click.option("--timing", is_flag=True, default=False, help="Report the wall time in the manifest")
@click.pass_context
def cli(ctx, threads, seed, quiet, timing):
    """ Reed–Muller codes, the BRW group and Barnes–Wall lattices """
    logging.basicConfig(level=settings().log_level)
    ctx.obj = Run(threads, seed, quiet, timing, time.perf_counter())


@cli.command("classify")
@click.option("--d", "d", type=int, required=True)
@click.argument("word")
@click.pass_obj
def classify_cmd(run: Run, d: int, word: str):
    """ Orbit of a codeword of RM(2,d) given in hex """
    payload = classify_word(BoolWord.from_hex(d, word))
    click.echo(dump(ClassifyDocument(manifest=run.manifest("classify", d=d, word=word), **payload)))


@cli.command("census")
@click.option("--d", "d", type=int, required=True)
@click.option("--mode", type=click.Choice(["exhaustive", "canonical", "sampled"]), default="exhaustive")
@click.option("--samples", type=int, default=10000, help="Words drawn in the sampled mode")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_obj
def census_cmd(run: Run, d: int, mode: str, samples: int, fmt: str):
    """ AGL(d,2) orbit table of RM(2,d) """
    result = run_census(d, mode=mode, threads=run.threads, seed=run.seed, samples=samples,
                        progress=not run.quiet)
    data = result.json()
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=list(data["rows"][0].keys()) if data["rows"] else ["key"])
        writer.writeheader()
        for row in data["rows"]:
            writer.writerow(row)
        click.echo(out.getvalue(), nl=False)
        return
    manifest = run.manifest("census", d=d, mode=mode, samples=samples if mode == "sampled" else None)
    click.echo(dump(CensusDocument(manifest=manifest, **data)))


@cli.command("bw")
@click.option("--d", "d", type=int, required=True)
@click.option("--emit", type=click.Choice(["basis", "gram", "fingerprint"]), default="fingerprint")
@click.option("--recursive", is_flag=True, default=False, help="Use the doubling construction")
@click.option("--verify", is_flag=True, default=False, help="Check invariance under the BRW generators")
@click.pass_obj
def bw_cmd(run: Run, d: int, emit: str, recursive: bool, verify: bool):
    """ The Barnes–Wall lattice of rank 2^d """
    bwl = build_recursive(d) if recursive else build(d)
    manifest = run.manifest("bw", d=d, emit=emit, recursive=recursive, verify=verify)
    if emit == "basis":
        click.echo(dump(LatticeDocument(manifest=manifest, **bwl.lattice.json())))
        return
    invariance = None
    if verify:
        report = verify_invariance(bwl, threads=run.threads)
        invariance = dict(report.checks)
        if not report.ok:
            raise VerificationError(f"The lattice for d = {d} is not invariant: {report.json()['checks']}")
    doc = FingerprintDocument(
        manifest=manifest,
        d=d,
        scale_exponent=bwl.scale_exponent,
        fingerprint=fingerprint(bwl.lattice, threads=run.threads).json(),
        gram=bwl.lattice.gram() if emit == "gram" else None,
        invariance=invariance,
    )
    click.echo(dump(doc))


@cli.command("involution")
@click.option("--d", "d", type=int, required=True)
@click.option("--involution", "descriptor", required=True,
              help="eps:<hex>, eta:<2k>:<+|->, lower:<a>:<l>:<sign> or upper")
@click.option("--sign", type=click.Choice(["+", "-"]), default="+", help="Use −t instead of t")
@click.pass_obj
def involution_cmd(run: Run, d: int, descriptor: str, sign: str):
    """ Class label of an involution of the BRW group """
    report = classify_involution(_involution(d, descriptor, sign))
    manifest = run.manifest("involution", d=d, involution=descriptor, sign=sign)
    click.echo(dump(InvolutionDocument(manifest=manifest, d=d, descriptor=descriptor, **report.json())))


@cli.command("fixlat")
@click.option("--d", "d", type=int, required=True)
@click.option("--involution", "descriptor", required=True)
@click.option("--sign", type=click.Choice(["+", "-"]), default="+", help="Use −t instead of t")
@click.option("--decompose/--no-decompose", default=None, help="Split eigenlattices into orthogonal summands")
@click.option("--eigenlattice", "which", type=click.Choice(["+", "-"]), default=None,
              help="Print this eigenlattice instead of the report")
@click.pass_obj
def fixlat_cmd(run: Run, d: int, descriptor: str, sign: str, decompose: Optional[bool], which: Optional[str]):
    """ Fixed point sublattices of an involution on the Barnes–Wall lattice """
    t = _involution(d, descriptor, sign)
    manifest = run.manifest("fixlat", d=d, involution=descriptor, sign=sign)
    if which is not None:
        sub = eigenlattice(build(d).lattice, t, 1 if which == "+" else -1)
        click.echo(dump(LatticeDocument(manifest=manifest, **sub.json())))
        return
    report = fix_report(d, t, decompose=decompose, threads=run.threads)
    click.echo(dump(FixReportDocument(manifest=manifest, **report.json())))
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        raise VerificationError(f"Fixed point checks failed: {', '.join(failed)}")


def _read_lattice(path: str) -> ExactLattice:
    with open(path) as f:
        data = json.load(f)
    return ExactLattice.from_json(data)


@cli.command("rssd")
@click.option("--lattice", "lattice_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--sub", "sub_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.pass_obj
def rssd_cmd(run: Run, lattice_path: str, sub_path: str):
    """ RSSD test and orbit label of a sublattice """
    lattice, sub = _read_lattice(lattice_path), _read_lattice(sub_path)
    manifest = run.manifest("rssd", lattice=os.path.basename(lattice_path), sub=os.path.basename(sub_path))
    found = rssd_test(lattice, sub)
    if found is None:
        click.echo(dump(RssdDocument(manifest=manifest, rssd=False, sub_rank=sub.rank)))
        return
    label = rssd_orbit_label(lattice, sub, threads=run.threads)
    click.echo(dump(RssdDocument(
        manifest=manifest, rssd=True, sub_rank=sub.rank, annihilator_rank=found.annihilator.rank,
        label=label.json()
    )))


def _verification_suite(max_d: int, threads: Optional[int]) -> Dict[str, bool]:
    expected_totals = {3: 128, 4: 2048, 5: 65536}
    expected_fingerprints = {2: (4, 4, 2, 24), 3: (8, 1 << 8, 4, 240), 4: (16, 1 << 24, 8, 4320)}
    checks: Dict[str, bool] = {}
    for d, total in expected_totals.items():
        if d <= max_d:
            result = run_census(d, threads=threads)
            checks[f"census_total[{d}]"] = result.total == total
            checks[f"census_formula[{d}]"] = all(row.formula_agrees is not False for row in result.rows
                                                 if row.label.clean)
    for d, core in expected_fingerprints.items():
        if d <= max_d:
            checks[f"bw_fingerprint[{d}]"] = fingerprint(build(d).lattice, threads=threads).core == core
            recursive = fingerprint(build_recursive(d).lattice, threads=threads).core
            checks[f"bw_recursive[{d}]"] = recursive == core
            checks[f"bw_invariance[{d}]"] = verify_invariance(build(d), threads=threads).ok
    for d in range(3, min(max_d, 4) + 1):
        for descriptor in ("eps:" + BoolWord(d, sum(1 << x for x in range(1 << d) if x & 3 == 3)).hex(), "eta:2:+"):
            t = parse_involution(d, descriptor)
            report = fix_report(d, t, threads=threads)
            checks[f"fixlat[{d},{descriptor}]"] = report.passed
            lattice = build(d).lattice
            label = rssd_orbit_label(lattice, eigenlattice(lattice, t, -1), threads=threads)
            checks[f"rssd_label[{d},{descriptor}]"] = label == report.label
    return checks


@cli.command("verify-all")
@click.option("--max-d", type=int, default=4, help="Largest dimension exponent checked")
@click.pass_obj
def verify_all_cmd(run: Run, max_d: int):
    """ Census totals, lattice fingerprints, invariance, fixed point checks and RSSD round trips """
    checks = _verification_suite(max_d, run.threads)
    passed = all(checks.values())
    click.echo(dump(VerifyDocument(manifest=run.manifest("verify-all", max_d=max_d), checks=checks, passed=passed)))
    if not passed:
        raise VerificationError(f"Failed checks: {', '.join(k for k, v in checks.items() if not v)}")


@cli.command("schemas")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def schemas_cmd(out_dir: str):
    """ Writes the JSON schema of every output document """
    os.makedirs(out_dir, exist_ok=True)
    for name, model in SCHEMAS.items():
        with open(os.path.join(out_dir, f"{name}.schema.json"), "w") as f:
            json.dump(model.model_json_schema(), f, indent=2, sort_keys=True)
    click.echo(json.dumps(sorted(SCHEMAS), indent=2))


def _flask_app(database_uri: Optional[str]):
    from flask import Flask
    from bwlab.app.app import create_app

    app = Flask("bwlab")
    app, db = create_app(app)
    app.config['SQLALCHEMY_DATABASE_URI'] = database_uri or settings().database_uri
    app.config['SQLALCHEMY_TRACK_MODIFICATIONS'] = False
    db.init_app(app)
    return app, db


@cli.command("ingest")
@click.option("--census-d", "census_dims", type=int, multiple=True, default=(2, 3, 4, 5))
@click.option("--lattice-d", "lattice_dims", type=int, multiple=True, default=(2, 3, 4))
@click.option("--database-uri", default=None)
@click.option("--drop", is_flag=True, default=False, help="Drop cached tables first")
@click.pass_obj
def ingest_cmd(run: Run, census_dims, lattice_dims, database_uri: Optional[str], drop: bool):
    """ Fills the results cache """
    from bwlab.app.ingest import store_all

    app, db = _flask_app(database_uri)
    with app.app_context():
        if drop:
            db.drop_all()
        db.create_all()
        store_all(census_dims, lattice_dims, threads=run.threads, progress=not run.quiet)
    click.echo(json.dumps({"census": list(census_dims), "fingerprints": list(lattice_dims)}))


@cli.command("serve")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--database-uri", default=None)
def serve_cmd(host: Optional[str], port: Optional[int], database_uri: Optional[str]):
    """ Serves cached results over HTTP """
    from bwlab.app.app import serve

    serve(host=host, port=port, database_uri=database_uri)


if __name__ == "__main__":
    cli()
