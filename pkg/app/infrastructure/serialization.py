"""
JSON documents written and read by the CLI.

Floats are written with 17 significant digits, which reads back to the same
64-bit value; infinities are written as the JSON constants Infinity /
-Infinity.
"""
import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from app import SCHEMA_VERSIONS, __version__
from app.domain.ci_test.schemas import FiveNumberSummary, TestResult
from app.domain.errors import InputError
from app.domain.estimators.schemas import DistanceResult
from app.domain.families.schemas import FamilyKind, PsdFamily, TheoryConstants
from app.domain.mixtures.schemas import MixingDistribution, MixturePmf, TailBoundCheck
from app.domain.npmle.schemas import Certificate, FitOptions, FitResult, TraceEntry

PathLike = Union[str, Path]


class MixtureDocument(BaseModel):
    """{family, v?, d, support, weights}"""

    model_config = ConfigDict(extra="forbid")

    family: FamilyKind
    v: Optional[float] = None
    d: int
    support: List[List[float]]
    weights: List[float]

    @classmethod
    def from_model(cls, model: MixturePmf) -> "MixtureDocument":
        return cls(family=model.family.kind, v=model.family.v, d=model.d,
                   support=model.mixing.support, weights=model.mixing.weights)

    def to_model(self) -> MixturePmf:
        family = PsdFamily(kind=self.family, v=self.v)
        mixing = MixingDistribution(dim=self.d, support=self.support, weights=self.weights)
        return MixturePmf(family=family, mixing=mixing)


class FitDocument(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    schema_version: int = SCHEMA_VERSIONS["fit"]
    model: MixtureDocument
    loglik: float
    sup_gradient_normalized: float
    iterations: int
    converged: bool
    seed: int
    options: FitOptions
    trace: List[TraceEntry]

    @classmethod
    def from_result(cls, result: FitResult) -> "FitDocument":
        return cls(model=MixtureDocument.from_model(result.model), loglik=result.loglik,
                   sup_gradient_normalized=result.sup_gradient_normalized, iterations=result.outer_iters,
                   converged=result.converged, seed=result.seed, options=result.options, trace=result.trace)


class TestDocument(BaseModel):
    __test__ = False

    model_config = ConfigDict(ser_json_inf_nan="constants")

    schema_version: int = SCHEMA_VERSIONS["test"]
    observed: Dict[str, float]
    quantile: Dict[str, float]
    p_value: Dict[str, float]
    reject: Dict[str, bool]
    summary: Dict[str, FiveNumberSummary]
    B: int
    alpha: float
    seed: int
    fit_converged: bool
    n_nonconverged: int
    nonconverged: List[int]
    boot: Optional[Dict[str, List[float]]] = None

    @classmethod
    def from_result(cls, result: TestResult, include_boot: bool = True) -> "TestDocument":
        fields = result.model_dump()
        if not include_boot:
            fields["boot"] = None
        return cls(**fields)


class EvaluationDocument(BaseModel):
    """Diagnostics of a fitted mixture against data, a reference mixture and the theory constants."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    schema_version: int = SCHEMA_VERSIONS["evaluation"]
    d: int
    n: Optional[int] = None
    loglik: Optional[float] = None
    zero_probability_row: Optional[int] = None
    certificate: Optional[Certificate] = None
    k_tilde: Optional[int] = None
    tail_index_Kn: Optional[int] = None
    tau_n: Optional[float] = None
    zero_cell_bound: Optional[float] = None
    distances_to_data: List[DistanceResult] = []
    distances_to_reference: List[DistanceResult] = []
    constants: Optional[TheoryConstants] = None
    tail_bound: Optional[TailBoundCheck] = None
    monotone_check: Optional[bool] = None
    ratio_check: Optional[bool] = None


class ManifestDocument(BaseModel):
    """Replay record of a benchmark run."""

    schema_version: int = SCHEMA_VERSIONS["manifest"]
    package_version: str = __version__
    experiment: str
    spec: dict
    spec_hash: str


def _float_text(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, ".17g")
    return text if "." in text or "e" in text else text + ".0"


def _unserializable(value):
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dump(document: BaseModel) -> str:
    """Indented JSON of a document with every float at 17 significant digits."""
    encode = json.encoder._make_iterencode(
        {}, _unserializable, json.encoder.encode_basestring_ascii, "  ", _float_text, ": ", ",", False, False, True
    )
    return "".join(encode(document.model_dump(mode="json", exclude_none=True), 0)) + "\n"


def write_document(document: BaseModel, path: PathLike) -> None:
    Path(path).write_text(dump(document))


def read_mixture(path: PathLike) -> MixturePmf:
    """A mixture from either a bare mixture document or the `model` member of a fit document."""
    text = Path(path).read_text()
    try:
        return FitDocument.model_validate_json(text).model.to_model()
    except ValidationError:
        pass
    try:
        return MixtureDocument.model_validate_json(text).to_model()
    except ValidationError as error:
        first = error.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or None
        raise InputError(f"{path}: not a mixture document: {first['msg']}", column=location)
