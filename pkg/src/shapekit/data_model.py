"""Uniform first-order data values shared by the JSON, XML and CSV readers.

Every parsed document becomes a tree of immutable values: primitives,
``null``, lists, and named records.  Records coming from JSON and CSV all
use the distinguished name ``•``; XML elements keep their tag name and use a
``•`` field for their body content.  Record fields keep insertion order for
readability but compare as unordered maps.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Union

#: Record name used for JSON objects and CSV rows; also the field name that
#: holds XML element content.
JSON_RECORD_NAME = "•"
BODY_FIELD = "•"

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class DataError(ValueError):
    """Raised when a structurally invalid data value is constructed."""


@dataclass(frozen=True)
class IntVal:
    value: int

    def __post_init__(self):
        if type(self.value) is not int:
            raise DataError(f"IntVal needs an int, got {type(self.value).__name__}")
        if not (INT64_MIN <= self.value <= INT64_MAX):
            raise DataError(f"integer out of 64-bit range: {self.value}")


@dataclass(frozen=True)
class FloatVal:
    value: float

    def __post_init__(self):
        if type(self.value) is not float:
            raise DataError(f"FloatVal needs a float, got {type(self.value).__name__}")
        if math.isnan(self.value):
            raise DataError("NaN has no data representation")


@dataclass(frozen=True)
class StringVal:
    value: str


@dataclass(frozen=True)
class BoolVal:
    value: bool


@dataclass(frozen=True)
class NullVal:
    pass


@dataclass(frozen=True)
class ListVal:
    items: tuple["DataValue", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True, eq=False)
class RecordVal:
    """A named record.  Field order is preserved but irrelevant to equality."""

    name: str
    fields: tuple[tuple[str, "DataValue"], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple((n, v) for n, v in self.fields))
        if not self.name:
            raise DataError("record name must be nonempty")
        names = [n for n, _ in self.fields]
        if len(names) != len(set(names)):
            raise DataError(f"duplicate field names in record {self.name!r}")
        for n, _ in self.fields:
            if not n:
                raise DataError("field name must be nonempty")

    def field_map(self) -> dict[str, "DataValue"]:
        return dict(self.fields)

    def __eq__(self, other):
        if other.__class__ is not RecordVal:
            return NotImplemented
        return self.name == other.name and self.field_map() == other.field_map()

    def __hash__(self):
        return hash((self.name, frozenset(self.fields)))


DataValue = Union[IntVal, FloatVal, StringVal, BoolVal, NullVal, ListVal, RecordVal]

NULL = NullVal()


def data_equal(a: DataValue, b: DataValue) -> bool:
    """Structural equality: records compare as maps, lists stay ordered,
    and ``IntVal(5)`` is distinct from ``FloatVal(5.0)``."""
    return a == b


_BARE_NAME = re.compile(r"^[A-Za-z_•][A-Za-z0-9_.\-•]*$")
_BARE_CHAR = re.compile(r"[A-Za-z0-9_.\-•]")


def _name_token(name: str) -> str:
    if _BARE_NAME.match(name):
        return name
    return json.dumps(name, ensure_ascii=False)


def canonical_text(d: DataValue) -> str:
    """Deterministic single-line rendering of a data value.

    Lists render as ``[d1; d2]``, records as ``name { f ↦ d, … }`` with
    fields sorted by name.  The output round-trips through
    :func:`read_canonical`.
    """
    if isinstance(d, NullVal):
        return "null"
    if isinstance(d, BoolVal):
        return "true" if d.value else "false"
    if isinstance(d, IntVal):
        return str(d.value)
    if isinstance(d, FloatVal):
        return repr(d.value)
    if isinstance(d, StringVal):
        return json.dumps(d.value, ensure_ascii=False)
    if isinstance(d, ListVal):
        return "[" + "; ".join(canonical_text(x) for x in d.items) + "]"
    if isinstance(d, RecordVal):
        if not d.fields:
            return f"{_name_token(d.name)} {{}}"
        body = ", ".join(
            f"{_name_token(n)} ↦ {canonical_text(v)}"
            for n, v in sorted(d.fields, key=lambda f: f[0])
        )
        return f"{_name_token(d.name)} {{ {body} }}"
    raise DataError(f"not a data value: {d!r}")


class CanonicalSyntaxError(ValueError):
    pass


class _Reader:
    """Reader for the canonical notation.  Used by tests and tooling only;
    the document parsers live in :mod:`shapekit.ingest`."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise CanonicalSyntaxError(f"{msg} at offset {self.pos}")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def read_string_token(self) -> str:
        start = self.pos
        self.expect('"')
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated string")
            c = self.text[self.pos]
            if c == "\\":
                self.pos += 2
                continue
            self.pos += 1
            if c == '"':
                break
        return json.loads(self.text[start : self.pos])

    def read_bare_token(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and _BARE_CHAR.match(self.text[self.pos]):
            self.pos += 1
        if self.pos == start:
            self.error("expected a token")
        return self.text[start : self.pos]

    def read_name(self) -> str:
        if self.peek() == '"':
            return self.read_string_token()
        return self.read_bare_token()

    _NUMBER = re.compile(r"[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?")

    def read_value(self) -> DataValue:
        self.skip_ws()
        c = self.peek()
        if c == '"':
            token = self.read_string_token()
            self.skip_ws()
            if self.peek() == "{":
                return self.read_record(token)
            return StringVal(token)
        if c in "+-0123456789" or c == ".":
            m = self._NUMBER.match(self.text, self.pos)
            if m:
                token = m.group(0)
                self.pos = m.end()
                if any(ch in token for ch in ".eE"):
                    return FloatVal(float(token))
                return IntVal(int(token))
        if c == "[":
            self.pos += 1
            items = []
            self.skip_ws()
            if self.peek() == "]":
                self.pos += 1
                return ListVal(())
            while True:
                items.append(self.read_value())
                self.skip_ws()
                if self.peek() == ";":
                    self.pos += 1
                    continue
                self.expect("]")
                return ListVal(tuple(items))
        token = self.read_name()
        self.skip_ws()
        if self.peek() == "{":
            return self.read_record(token)
        if token == "null":
            return NULL
        if token == "true":
            return BoolVal(True)
        if token == "false":
            return BoolVal(False)
        self.error(f"unrecognised token {token!r}")

    def read_record(self, name: str) -> RecordVal:
        self.expect("{")
        fields = []
        self.skip_ws()
        if self.peek() == "}":
            self.pos += 1
            return RecordVal(name, ())
        while True:
            self.skip_ws()
            fname = self.read_name()
            self.skip_ws()
            if self.text.startswith("↦", self.pos):
                self.pos += 1
            else:
                self.error("expected ↦")
            fields.append((fname, self.read_value()))
            self.skip_ws()
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("}")
            return RecordVal(name, tuple(fields))


def read_canonical(text: str) -> DataValue:
    """Parse the canonical notation back into a data value."""
    reader = _Reader(text)
    value = reader.read_value()
    reader.skip_ws()
    if reader.pos != len(reader.text):
        reader.error("trailing input")
    return value
