"""Lexical classification of textual primitives (CSV cells, XML text,
JSON string content)."""

from __future__ import annotations

import math
import re
from datetime import datetime

_INT_RE = re.compile(r"^[+-]?[0-9]+$")
_FLOAT_RE = re.compile(r"^[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][+-]?[0-9]+)?$")


def is_int_text(s: str) -> bool:
    return bool(_INT_RE.match(s))


def is_float_text(s: str) -> bool:
    """True for decimal/exponent notation, including plain integers."""
    if not _FLOAT_RE.match(s):
        return False
    return math.isfinite(float(s))


def bool_text_value(s: str) -> bool | None:
    low = s.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    return None


def is_date_text(s: str, formats: tuple[str, ...]) -> bool:
    for fmt in formats:
        try:
            datetime.strptime(s, fmt)
            return True
        except ValueError:
            continue
    return False
