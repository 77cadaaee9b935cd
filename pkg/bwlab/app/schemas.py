""" Output documents of the command line and of the results service """
import json
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from bwlab import __version__


class RunManifest(BaseModel):
    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    version: str = __version__
    wall_time: float = 0.0


class FingerprintModel(BaseModel):
    rank: int
    det: str
    min_norm: Optional[str] = None
    kissing: Optional[int] = None
    theta_prefix: List[Tuple[str, int]] = Field(default_factory=list)


class InvolutionLabelModel(BaseModel):
    kind: str
    defect: int
    sign: Optional[int] = None
    frame_class: Optional[int] = None
    key: str


class ClassifyDocument(BaseModel):
    manifest: RunManifest
    d: int
    word: str
    weight: int
    defect: int
    category: str
    key: str
    clean: bool
    core: Optional[List[Tuple[int, int]]] = None
    cubi: Optional[List[List[Tuple[int, int]]]] = None
    cleansing_count: Optional[int] = None
    witness: Dict[str, Any]


class CensusRowModel(BaseModel):
    category: str
    defect: int
    key: str
    orbit_size: int
    stabilizer_order: int
    representative_hex: str
    formula_stabilizer_order: Optional[int] = None
    printed_dirty_stabilizer_order: Optional[int] = None
    formula_agrees: Optional[bool] = None


class CensusDocument(BaseModel):
    manifest: RunManifest
    d: int
    mode: str
    seed: Optional[int] = None
    samples: Optional[int] = None
    total: int
    expected_total: int
    rows: List[CensusRowModel]
    sample_counts: Dict[str, int] = Field(default_factory=dict)


class LatticeDocument(BaseModel):
    manifest: Optional[RunManifest] = None
    ambient_dim: int
    basis: List[List[int]]
    denominator: int = 1


class FingerprintDocument(BaseModel):
    manifest: RunManifest
    d: int
    scale_exponent: int
    fingerprint: FingerprintModel
    gram: Optional[List[List[int]]] = None
    invariance: Optional[Dict[str, bool]] = None


class InvolutionDocument(BaseModel):
    manifest: RunManifest
    d: int
    descriptor: str
    trace: int
    clean: bool
    defect: int
    split: bool
    label: InvolutionLabelModel
    z_basis: List[str]


class CheckModel(BaseModel):
    name: str
    expected: str
    observed: str
    passed: bool


class FixReportDocument(BaseModel):
    manifest: RunManifest
    d: int
    label: InvolutionLabelModel
    trace: int
    plus: FingerprintModel
    minus: FingerprintModel
    summands: Dict[str, List[FingerprintModel]] = Field(default_factory=dict)
    checks: List[CheckModel]
    passed: bool
    certification: str


class RssdDocument(BaseModel):
    manifest: RunManifest
    rssd: bool
    sub_rank: int
    annihilator_rank: Optional[int] = None
    label: Optional[InvolutionLabelModel] = None


class VerifyDocument(BaseModel):
    manifest: RunManifest
    checks: Dict[str, bool]
    passed: bool


class ErrorDocument(BaseModel):
    message: str


SCHEMAS = {
    "run_manifest": RunManifest,
    "classify": ClassifyDocument,
    "census": CensusDocument,
    "lattice": LatticeDocument,
    "fingerprint": FingerprintDocument,
    "involution": InvolutionDocument,
    "fix_report": FixReportDocument,
    "rssd": RssdDocument,
    "verify": VerifyDocument,
    "error": ErrorDocument,
}


def dump(document: BaseModel) -> str:
    """ Serializes with sorted keys so that equal runs print equal bytes """
    return json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False)
