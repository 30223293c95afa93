"""Shape inference from sample data values.

``infer_one`` maps a single value to its most specific shape; ``infer_many``
folds the common-preferred-shape join over a sequence of samples, seeded
with bottom.  List shapes group element shapes by tag and track how often
each tag occurred (exactly once vs. repeatedly); cross-sample joins relax
one-sided tags to "zero or one".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from . import textforms
from .data_model import (
    BoolVal,
    DataValue,
    FloatVal,
    IntVal,
    INT64_MAX,
    INT64_MIN,
    ListVal,
    NullVal,
    RecordVal,
    StringVal,
)
from .shapes import (
    BIT,
    BOOL,
    BOT,
    EMPTY_COLLECTION,
    FLOAT,
    INT,
    NULL,
    TEXT,
    Any as AnyShape,
    Collection,
    Mult,
    Nullable,
    Record,
    Shape,
    csh,
    tag_of,
)


@dataclass(frozen=True)
class InferenceConfig:
    global_xml: bool = False
    hetero_collections: bool = True
    # Textual reinterpretation of string values ("35.14229" reads as float).
    reinterpret_strings: bool = True
    # 0/1 strings infer the bit shape.
    bit_text: bool = True
    # 0/1 integer values infer the bit shape (CSV columns only; a JSON
    # numeric literal 1 stays int).
    bit_ints: bool = False
    max_record_depth: int = 64


DEFAULT_CONFIG = InferenceConfig()


class DepthExceeded(Exception):
    """Global record unification would nest records beyond the limit."""


def _text_shape(s: str, cfg: InferenceConfig) -> Shape:
    if not cfg.reinterpret_strings:
        return TEXT
    if textforms.is_int_text(s):
        if cfg.bit_text and s in ("0", "1"):
            return BIT
        n = int(s)
        return INT if INT64_MIN <= n <= INT64_MAX else FLOAT
    if textforms.is_float_text(s):
        return FLOAT
    if textforms.bool_text_value(s) is not None:
        return BOOL
    return TEXT


def _list_shape(items: Sequence[DataValue], cfg: InferenceConfig) -> Shape:
    # Null elements are absorbed: collections are nullable and conversion
    # treats null as absence.
    shapes = [infer_one(x, cfg) for x in items if not isinstance(x, NullVal)]
    if not shapes:
        return EMPTY_COLLECTION
    if not cfg.hetero_collections:
        return Collection(((reduce(csh, shapes), Mult.MANY),))
    buckets: dict = {}
    order = []
    for s in shapes:
        t = tag_of(s)
        if t not in buckets:
            buckets[t] = [s, 1]
            order.append(t)
        else:
            buckets[t][0] = csh(buckets[t][0], s)
            buckets[t][1] += 1
    entries = tuple(
        (buckets[t][0], Mult.ONE if buckets[t][1] == 1 else Mult.MANY) for t in order
    )
    return Collection(entries)


def infer_one(d: DataValue, cfg: InferenceConfig = DEFAULT_CONFIG) -> Shape:
    """The most specific shape of a single data value."""
    if isinstance(d, IntVal):
        if cfg.bit_ints and d.value in (0, 1):
            return BIT
        return INT
    if isinstance(d, FloatVal):
        return FLOAT
    if isinstance(d, BoolVal):
        return BOOL
    if isinstance(d, NullVal):
        return NULL
    if isinstance(d, StringVal):
        return _text_shape(d.value, cfg)
    if isinstance(d, ListVal):
        return _list_shape(d.items, cfg)
    if isinstance(d, RecordVal):
        return Record(d.name, tuple((n, infer_one(v, cfg)) for n, v in d.fields))
    raise TypeError(f"not a data value: {d!r}")


def infer_many(ds: Iterable[DataValue], cfg: InferenceConfig = DEFAULT_CONFIG) -> Shape:
    """Join the shapes of several samples, seeded with bottom."""
    shape: Shape = BOT
    for d in ds:
        shape = csh(shape, infer_one(d, cfg))
    return shape


def _record_groups(s: Shape, groups: dict[str, Shape]):
    if isinstance(s, Record):
        if s.name in groups:
            groups[s.name] = csh(groups[s.name], s)
        else:
            groups[s.name] = s
        for _, f in s.fields:
            _record_groups(f, groups)
    elif isinstance(s, Nullable):
        _record_groups(s.inner, groups)
    elif isinstance(s, Collection):
        for e, _ in s.items:
            _record_groups(e, groups)
    elif isinstance(s, AnyShape):
        for l in s.labels:
            _record_groups(l, groups)


def _rewrite_records(s: Shape, joined: dict[str, Shape], depth: int, limit: int) -> Shape:
    if isinstance(s, Record):
        if depth >= limit:
            raise DepthExceeded(
                f"global inference nests records beyond depth {limit}"
            )
        j = joined[s.name]
        return Record(
            j.name,
            tuple((n, _rewrite_records(f, joined, depth + 1, limit)) for n, f in j.fields),
        )
    if isinstance(s, Nullable):
        return Nullable(_rewrite_records(s.inner, joined, depth, limit))
    if isinstance(s, Collection):
        return Collection(
            tuple((_rewrite_records(e, joined, depth, limit), m) for e, m in s.items)
        )
    if isinstance(s, AnyShape):
        return AnyShape(tuple(_rewrite_records(l, joined, depth, limit) for l in s.labels))
    return s


def unify_records_by_name(s: Shape, cfg: InferenceConfig = DEFAULT_CONFIG) -> Shape:
    """Fixed point replacing every record shape by the join of all records
    sharing its name anywhere in the shape."""
    current = s
    for _ in range(cfg.max_record_depth):
        groups: dict[str, Shape] = {}
        _record_groups(current, groups)
        rewritten = _rewrite_records(current, groups, 0, cfg.max_record_depth)
        if rewritten == current:
            return current
        current = rewritten
    raise DepthExceeded("global inference did not stabilise")


def infer_global_xml(d: DataValue, cfg: InferenceConfig = DEFAULT_CONFIG) -> Shape:
    """Shape of one XML document with same-name records unified globally."""
    return unify_records_by_name(infer_one(d, cfg), cfg)
