"""shapekit: structural shape inference from sample documents, typed
accessor generation, and an executable relative-safety harness."""

from .data_model import (
    BoolVal,
    DataValue,
    FloatVal,
    IntVal,
    ListVal,
    NullVal,
    RecordVal,
    StringVal,
    canonical_text,
    data_equal,
)
from .shapes import Shape, csh, is_preferred, notation, tag_of
from .inference import InferenceConfig, infer_many, infer_one
from .ingest import IngestConfig, SourceFormat, parse_csv, parse_json, parse_xml
from .provider import Provided, normalize_names, provide, render_signatures
from .calculus import evaluate, has_shape, reduce_step, typecheck
from .harness import check_relative_safety, check_stability, generate_subshape_input, lub_oracle

__all__ = [
    "BoolVal", "DataValue", "FloatVal", "IntVal", "ListVal", "NullVal",
    "RecordVal", "StringVal", "canonical_text", "data_equal",
    "Shape", "csh", "is_preferred", "notation", "tag_of",
    "InferenceConfig", "infer_many", "infer_one",
    "IngestConfig", "SourceFormat", "parse_csv", "parse_json", "parse_xml",
    "Provided", "normalize_names", "provide", "render_signatures",
    "evaluate", "has_shape", "reduce_step", "typecheck",
    "check_relative_safety", "check_stability", "generate_subshape_input", "lub_oracle",
]
