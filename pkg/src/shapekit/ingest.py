"""Parsers turning JSON, XML and CSV source text into data values.

JSON keeps its own primitive types; CSV cells and XML attributes/content are
textual, so they go through :func:`infer_primitive_text` which recognises
missing-value tokens, numbers and booleans.  JSON *strings* are kept raw
here; their numeric reinterpretation happens at the shape level.
"""

from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from .data_model import (
    BODY_FIELD,
    JSON_RECORD_NAME,
    NULL,
    BoolVal,
    DataValue,
    FloatVal,
    IntVal,
    INT64_MAX,
    INT64_MIN,
    ListVal,
    RecordVal,
    StringVal,
)
from . import textforms
from .inference import InferenceConfig


class MalformedDocument(ValueError):
    def __init__(self, message: str, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class UnrepresentableNumber(MalformedDocument):
    """NaN or infinite numeric literals have no shape and are rejected."""


class EmptyInput(MalformedDocument):
    pass


class SourceFormat(Enum):
    JSON = "json"
    XML = "xml"
    CSV = "csv"


DEFAULT_MISSING_TOKENS = frozenset({"", "#N/A", "NA", "null"})


@dataclass(frozen=True)
class IngestConfig:
    missing_tokens: frozenset[str] = DEFAULT_MISSING_TOKENS
    date_formats: tuple[str, ...] = ("%Y-%m-%d",)
    parse_json_strings: bool = True
    bit_inference: bool = True


DEFAULT_CONFIG = IngestConfig()


def inference_config_for(
    fmt: SourceFormat,
    ingest: IngestConfig = DEFAULT_CONFIG,
    base: InferenceConfig | None = None,
) -> InferenceConfig:
    """Inference settings appropriate for a source format.

    Bit shapes come from textual sources: 0/1 integer *values* only count as
    bits for CSV columns, while 0/1 strings count everywhere.
    """
    base = base or InferenceConfig()
    return InferenceConfig(
        global_xml=base.global_xml,
        hetero_collections=base.hetero_collections,
        reinterpret_strings=ingest.parse_json_strings,
        bit_text=ingest.bit_inference,
        bit_ints=ingest.bit_inference and fmt is SourceFormat.CSV,
        max_record_depth=base.max_record_depth,
    )


def infer_primitive_text(cell: str, cfg: IngestConfig = DEFAULT_CONFIG) -> DataValue:
    """Classify a piece of source text as a primitive value.  Total."""
    if cell in cfg.missing_tokens:
        return NULL
    if textforms.is_int_text(cell):
        n = int(cell)
        if INT64_MIN <= n <= INT64_MAX:
            return IntVal(n)
        return FloatVal(float(n))
    if textforms.is_float_text(cell):
        return FloatVal(float(cell))
    b = textforms.bool_text_value(cell)
    if b is not None:
        return BoolVal(b)
    # Date-like text stays a string; there is no date shape.
    return StringVal(cell)


# --- JSON ---

def _reject_constant(name: str):
    raise UnrepresentableNumber(f"unrepresentable numeric literal {name!r}")


def _checked_pairs(pairs):
    seen = set()
    for k, _ in pairs:
        if k in seen:
            raise MalformedDocument(f"duplicate object key {k!r}")
        seen.add(k)
    return dict(pairs)


def _from_python(x) -> DataValue:
    if x is None:
        return NULL
    if isinstance(x, bool):
        return BoolVal(x)
    if isinstance(x, int):
        if INT64_MIN <= x <= INT64_MAX:
            return IntVal(x)
        return FloatVal(float(x))
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise UnrepresentableNumber(f"unrepresentable number {x!r}")
        return FloatVal(x)
    if isinstance(x, str):
        return StringVal(x)
    if isinstance(x, list):
        return ListVal(tuple(_from_python(i) for i in x))
    if isinstance(x, dict):
        if JSON_RECORD_NAME in x:
            raise MalformedDocument(f"reserved field name {JSON_RECORD_NAME!r}")
        return RecordVal(JSON_RECORD_NAME, tuple((k, _from_python(v)) for k, v in x.items()))
    raise MalformedDocument(f"unsupported JSON value {x!r}")


def parse_json(text: str, cfg: IngestConfig = DEFAULT_CONFIG) -> DataValue:
    try:
        raw = json.loads(
            text,
            object_pairs_hook=_checked_pairs,
            parse_constant=_reject_constant,
        )
    except json.JSONDecodeError as e:
        raise MalformedDocument(f"malformed JSON: {e.msg}", (e.lineno, e.colno)) from e
    return _from_python(raw)


# --- XML ---

def _element_to_value(el: ET.Element, cfg: IngestConfig) -> RecordVal:
    tag = el.tag
    if tag == JSON_RECORD_NAME:
        raise MalformedDocument(f"reserved element name {JSON_RECORD_NAME!r}")
    fields = [(name, infer_primitive_text(value, cfg)) for name, value in el.attrib.items()]
    children = list(el)
    if children:
        # Child elements win over interleaved text; mixed content is out of scope.
        fields.append((BODY_FIELD, ListVal(tuple(_element_to_value(c, cfg) for c in children))))
    else:
        text = (el.text or "").strip()
        if text:
            fields.append((BODY_FIELD, infer_primitive_text(text, cfg)))
    return RecordVal(tag, tuple(fields))


def parse_xml(text: str, cfg: IngestConfig = DEFAULT_CONFIG) -> DataValue:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise MalformedDocument(f"malformed XML: {e.msg if hasattr(e, 'msg') else e}", e.position) from e
    return _element_to_value(root, cfg)


# --- CSV ---

def parse_csv(text: str, cfg: IngestConfig = DEFAULT_CONFIG) -> DataValue:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise EmptyInput("CSV input has no header row")
    header = [h.strip() for h in rows[0]]
    if len(header) != len(set(header)):
        raise MalformedDocument("duplicate CSV column names")
    records = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedDocument(
                f"row has {len(row)} cells, header has {len(header)}", (i, len(row))
            )
        cells = tuple(
            (name, infer_primitive_text(cell.strip(), cfg))
            for name, cell in zip(header, row)
        )
        records.append(RecordVal(JSON_RECORD_NAME, cells))
    return ListVal(tuple(records))


_PARSERS = {
    SourceFormat.JSON: parse_json,
    SourceFormat.XML: parse_xml,
    SourceFormat.CSV: parse_csv,
}


def parse_source(text: str, fmt: SourceFormat, cfg: IngestConfig = DEFAULT_CONFIG) -> DataValue:
    return _PARSERS[fmt](text, cfg)
