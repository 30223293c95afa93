"""The structural shape algebra: preference ordering and its join.

Shapes describe the structure of data inferred from samples.  The
*preferred* relation ``is_preferred(a, b)`` orders shapes from specific to
general (``int`` is preferred over ``float``, a record over its nullable
wrapper, everything over the top shape).  ``csh`` computes the least upper
bound used whenever two samples, two list elements, or two record fields
must be described by one shape.

Collections are stored in the heterogeneous form throughout: a sequence of
``(shape, multiplicity)`` entries keyed by shape tag.  The homogeneous
collection ``[s]`` is the single-entry case with multiplicity ``*``; the
empty collection ``[⊥]`` has no entries.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Optional, Union


class ShapeError(ValueError):
    """Raised when a structurally invalid shape is constructed."""


class UndefinedTag(ShapeError):
    """Tags exist only for labelable shapes; ⊥ and null have none."""


class Mult(Enum):
    ONE = "1"
    OPT = "1?"
    MANY = "*"


_MULT_RANK = {Mult.ONE: 0, Mult.OPT: 1, Mult.MANY: 2}


def mult_leq(a: Mult, b: Mult) -> bool:
    return _MULT_RANK[a] <= _MULT_RANK[b]


def mult_join(a: Mult, b: Mult) -> Mult:
    return a if _MULT_RANK[a] >= _MULT_RANK[b] else b


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Null:
    pass


@dataclass(frozen=True)
class Bit:
    pass


@dataclass(frozen=True)
class Int:
    pass


@dataclass(frozen=True)
class Float:
    pass


@dataclass(frozen=True)
class Bool:
    pass


@dataclass(frozen=True)
class Text:
    pass


@dataclass(frozen=True)
class Nullable:
    inner: "Shape"

    def __post_init__(self):
        if not is_nonnullable(self.inner):
            raise ShapeError(f"only primitives and records can be made nullable, got {self.inner!r}")


@dataclass(frozen=True)
class Any:
    labels: tuple["Shape", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        tags = []
        for lab in self.labels:
            if isinstance(lab, (Nullable, Null, Bot, Any)):
                raise ShapeError(f"invalid top-shape label: {lab!r}")
            tags.append(tag_of(lab))
        if len(tags) != len(set(tags)):
            raise ShapeError("top-shape labels must have pairwise distinct tags")


@dataclass(frozen=True)
class Collection:
    items: tuple[tuple["Shape", Mult], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((s, m) for s, m in self.items))
        tags = []
        for s, m in self.items:
            if isinstance(s, (Nullable, Null, Bot)):
                raise ShapeError(f"invalid collection entry shape: {s!r}")
            if not isinstance(m, Mult):
                raise ShapeError(f"invalid multiplicity: {m!r}")
            tags.append(tag_of(s))
        if len(tags) != len(set(tags)):
            raise ShapeError("collection entries must have pairwise distinct tags")


@dataclass(frozen=True)
class Record:
    name: str
    fields: tuple[tuple[str, "Shape"], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple((n, s) for n, s in self.fields))
        if not self.name:
            raise ShapeError("record shape name must be nonempty")
        names = [n for n, _ in self.fields]
        if len(names) != len(set(names)):
            raise ShapeError(f"duplicate fields in record shape {self.name!r}")

    def field_map(self) -> dict[str, "Shape"]:
        return dict(self.fields)


Shape = Union[Bot, Null, Bit, Int, Float, Bool, Text, Nullable, Any, Collection, Record]

BOT = Bot()
NULL = Null()
BIT = Bit()
INT = Int()
FLOAT = Float()
BOOL = Bool()
TEXT = Text()
ANY = Any(())
EMPTY_COLLECTION = Collection(())

_PRIMS = (Bit, Int, Float, Bool, Text)


def is_primitive(s: Shape) -> bool:
    return isinstance(s, _PRIMS)


def is_nonnullable(s: Shape) -> bool:
    """The σ̂ class: shapes whose values are never null (primitives, records)."""
    return is_primitive(s) or isinstance(s, Record)


def collection_of(item: Shape) -> Collection:
    """Homogeneous collection [item]; [⊥] is the empty-entry collection."""
    if isinstance(item, Bot):
        return EMPTY_COLLECTION
    return Collection(((item, Mult.MANY),))


@dataclass(frozen=True)
class ShapeTag:
    kind: str  # number | string | bool | collection | nullable | any | record
    record_name: Optional[str] = None

    def sort_key(self):
        return (self.kind, self.record_name or "")


TAG_NUMBER = ShapeTag("number")
TAG_STRING = ShapeTag("string")
TAG_BOOL = ShapeTag("bool")
TAG_COLLECTION = ShapeTag("collection")
TAG_NULLABLE = ShapeTag("nullable")
TAG_ANY = ShapeTag("any")


def tag_of(s: Shape) -> ShapeTag:
    """Coarse classifier used to group shapes when merging labels."""
    if isinstance(s, (Bit, Int, Float)):
        return TAG_NUMBER
    if isinstance(s, Text):
        return TAG_STRING
    if isinstance(s, Bool):
        return TAG_BOOL
    if isinstance(s, Record):
        return ShapeTag("record", s.name)
    if isinstance(s, Collection):
        return TAG_COLLECTION
    if isinstance(s, Nullable):
        return TAG_NULLABLE
    if isinstance(s, Any):
        return TAG_ANY
    raise UndefinedTag(f"no tag for {s!r}")


def add_nullable(s: Shape) -> Shape:
    """⟨s⟩?: wrap primitives and records; shapes that already admit null
    (nullable, null, collections, top, bottom) pass through, except that a
    collection's exactly-one entries relax to zero-or-one, since the
    position may now hold null, which reads as the empty collection."""
    if is_nonnullable(s):
        return Nullable(s)
    if isinstance(s, Collection):
        return Collection(
            tuple((e, Mult.OPT if m is Mult.ONE else m) for e, m in s.items)
        )
    return s


def drop_nullable(s: Shape) -> Shape:
    """⟨s⟩: strip one nullable wrapper, identity otherwise."""
    if isinstance(s, Nullable):
        return s.inner
    return s


# Primitive preference: bit below int and bool, int below float.
_PRIM_LEQ = {
    (Bit, Bit), (Bit, Int), (Bit, Bool), (Bit, Float),
    (Int, Int), (Int, Float),
    (Float, Float), (Bool, Bool), (Text, Text),
}


def admits_absent_field(s: Shape) -> bool:
    """An absent record field reads as null; the field shape must tolerate
    that (bottom fields are opaque and tolerate anything; collections do,
    unless an entry is required exactly once)."""
    if isinstance(s, Collection):
        return all(m is not Mult.ONE for _, m in s.items)
    return isinstance(s, (Null, Nullable, Any, Bot))


def is_preferred(a: Shape, b: Shape) -> bool:
    """Decide a ⊑ b: values structured like ``a`` can safely be read at
    shape ``b``.

    Note: due to the interplay of record width (extra fields may be
    dropped) and optional fields (absence reads as null), the relation is a
    preorder, not a partial order, and record chains through the empty
    record are deliberately not closed transitively.
    """
    if isinstance(b, Any):
        return True
    if isinstance(a, Bot):
        return True
    if isinstance(a, Null):
        if isinstance(b, Collection):
            # null reads as the empty collection, which cannot satisfy an
            # exactly-one entry
            return all(m is not Mult.ONE for _, m in b.items)
        return isinstance(b, (Null, Nullable))
    if isinstance(a, Any):
        return False
    if isinstance(a, Nullable):
        return isinstance(b, Nullable) and is_preferred(a.inner, b.inner)
    if isinstance(b, Nullable):
        return is_nonnullable(a) and is_preferred(a, b.inner)
    if isinstance(a, Collection):
        return isinstance(b, Collection) and _entries_preferred(a.items, b.items)
    if isinstance(b, Collection):
        return False
    if isinstance(a, Record):
        if not isinstance(b, Record) or a.name != b.name:
            return False
        amap = a.field_map()
        for fname, bshape in b.fields:
            if fname in amap:
                if not is_preferred(amap[fname], bshape):
                    return False
            elif not admits_absent_field(bshape):
                return False
        return True
    if isinstance(b, Record):
        return False
    return (type(a), type(b)) in _PRIM_LEQ


def _entries_preferred(a_items, b_items) -> bool:
    b_by_tag = {tag_of(s): i for i, (s, m) in enumerate(b_items)}
    targets: dict[int, list[Mult]] = {}
    for s, m in a_items:
        # canonical target shares the tag; bit entries may also match a
        # bool-tagged entry, and anything matches a top-shaped entry
        candidates = []
        t = tag_of(s)
        if t in b_by_tag:
            candidates.append(b_by_tag[t])
        candidates.extend(
            i for i, (bs, bm) in enumerate(b_items)
            if i not in candidates and is_preferred(s, bs)
        )
        if TAG_ANY in b_by_tag and b_by_tag[TAG_ANY] not in candidates:
            candidates.append(b_by_tag[TAG_ANY])
        matched = False
        for idx in candidates:
            bs, bm = b_items[idx]
            if is_preferred(s, bs) and mult_leq(m, bm):
                targets.setdefault(idx, []).append(m)
                matched = True
                break
        if not matched:
            return False
    for i, (bs, bm) in enumerate(b_items):
        got = targets.get(i, [])
        if bm is Mult.ONE and (len(got) != 1 or got[0] is not Mult.ONE):
            return False
        if bm is Mult.OPT and len(got) > 1:
            return False
    return True


def _join_primitives(a: Shape, b: Shape) -> Optional[Shape]:
    if not (is_primitive(a) and is_primitive(b)):
        return None
    numeric = {Bit: 0, Int: 1, Float: 2}
    ta, tb = type(a), type(b)
    if ta in numeric and tb in numeric:
        return max(a, b, key=lambda s: numeric[type(s)])
    if {ta, tb} == {Bit, Bool}:
        return BOOL
    return None


def _merge_entries(a: Collection, b: Collection) -> Collection:
    merged: list[tuple[Shape, Mult]] = []
    b_by_tag = {tag_of(s): (s, m) for s, m in b.items}
    a_tags = set()
    for s, m in a.items:
        t = tag_of(s)
        a_tags.add(t)
        if t in b_by_tag:
            s2, m2 = b_by_tag[t]
            merged.append((csh(s, s2), mult_join(m, m2)))
        else:
            merged.append((s, Mult.OPT if m is Mult.ONE else m))
    for s, m in b.items:
        if tag_of(s) not in a_tags:
            merged.append((s, Mult.OPT if m is Mult.ONE else m))
    return Collection(tuple(merged))


def _merge_labels(a: Any, b: Any) -> Any:
    merged: list[Shape] = []
    b_by_tag = {tag_of(lab): lab for lab in b.labels}
    a_tags = set()
    for lab in a.labels:
        t = tag_of(lab)
        a_tags.add(t)
        if t in b_by_tag:
            merged.append(drop_nullable(csh(lab, b_by_tag[t])))
        else:
            merged.append(lab)
    for lab in b.labels:
        if tag_of(lab) not in a_tags:
            merged.append(lab)
    return Any(tuple(merged))


def _csh_with_any(top: Any, other: Shape) -> Any:
    stripped = drop_nullable(other)
    t = tag_of(stripped)
    labels = list(top.labels)
    for i, lab in enumerate(labels):
        if tag_of(lab) == t:
            labels[i] = drop_nullable(csh(other, lab))
            return Any(tuple(labels))
    return Any(tuple(labels) + (stripped,))


def _merge_records(a: Record, b: Record) -> Record:
    # Fields on only one side become nullable: the ground realization of
    # row-variable flexibility.
    bmap = b.field_map()
    amap = a.field_map()
    fields: list[tuple[str, Shape]] = []
    for n, s in a.fields:
        if n in bmap:
            fields.append((n, csh(s, bmap[n])))
        else:
            fields.append((n, add_nullable(s)))
    for n, s in b.fields:
        if n not in amap:
            fields.append((n, add_nullable(s)))
    return Record(a.name, tuple(fields))


def csh(a: Shape, b: Shape) -> Shape:
    """Common preferred shape: the join of two ground shapes.

    Rules are tried in a fixed order, so the labelled top shape is only ever
    produced as the last resort.
    """
    if a == b:
        return a
    if isinstance(a, Collection) and isinstance(b, Collection):
        return _merge_entries(a, b)
    if isinstance(a, Bot):
        return b
    if isinstance(b, Bot):
        return a
    if isinstance(a, Null):
        return add_nullable(b)
    if isinstance(b, Null):
        return add_nullable(a)
    if isinstance(a, Any) and isinstance(b, Any):
        return _merge_labels(a, b)
    if isinstance(a, Any):
        return _csh_with_any(a, b)
    if isinstance(b, Any):
        return _csh_with_any(b, a)
    joined = _join_primitives(a, b)
    if joined is not None:
        return joined
    if isinstance(a, Nullable):
        return add_nullable(csh(a.inner, b))
    if isinstance(b, Nullable):
        return add_nullable(csh(b.inner, a))
    if isinstance(a, Record) and isinstance(b, Record) and a.name == b.name:
        return _merge_records(a, b)
    return Any((drop_nullable(a), drop_nullable(b)))


def erase_labels(s: Shape) -> Shape:
    """Strip top-shape labels and collapse heterogeneous collections to the
    homogeneous join of their entries (the core model view)."""
    if isinstance(s, Any):
        return ANY
    if isinstance(s, Nullable):
        return Nullable(erase_labels(s.inner))
    if isinstance(s, Record):
        return Record(s.name, tuple((n, erase_labels(f)) for n, f in s.fields))
    if isinstance(s, Collection):
        if not s.items:
            return EMPTY_COLLECTION
        joined = reduce(csh, (erase_labels(entry) for entry, _ in s.items))
        return collection_of(erase_labels(joined))
    return s


def normalize(s: Shape) -> Shape:
    """Canonical ordering: labels and collection entries sorted by tag,
    record fields by name.  Use for order-insensitive comparisons."""
    if isinstance(s, Any):
        labs = sorted((normalize(l) for l in s.labels), key=lambda l: tag_of(l).sort_key())
        return Any(tuple(labs))
    if isinstance(s, Nullable):
        return Nullable(normalize(s.inner))
    if isinstance(s, Collection):
        items = sorted(
            ((normalize(e), m) for e, m in s.items),
            key=lambda em: tag_of(em[0]).sort_key(),
        )
        return Collection(tuple(items))
    if isinstance(s, Record):
        return Record(s.name, tuple(sorted(((n, normalize(f)) for n, f in s.fields))))
    return s


def shapes_equivalent(a: Shape, b: Shape) -> bool:
    return normalize(a) == normalize(b)


_BARE_NAME = re.compile(r"^[A-Za-z0-9_.\-•]+$")


def _name_token(name: str) -> str:
    if _BARE_NAME.match(name):
        return name
    return json.dumps(name, ensure_ascii=False)


def notation(s: Shape) -> str:
    """Shape notation: ``nullable<int>``, ``[int]``, ``any<float, bool>``,
    ``ν { x: int }``, ``[σ, 1 | σ', *]``."""
    if isinstance(s, Bot):
        return "⊥"
    if isinstance(s, Null):
        return "null"
    if isinstance(s, Bit):
        return "bit"
    if isinstance(s, Int):
        return "int"
    if isinstance(s, Float):
        return "float"
    if isinstance(s, Bool):
        return "bool"
    if isinstance(s, Text):
        return "string"
    if isinstance(s, Nullable):
        return f"nullable<{notation(s.inner)}>"
    if isinstance(s, Any):
        if not s.labels:
            return "any"
        return "any<" + ", ".join(notation(l) for l in s.labels) + ">"
    if isinstance(s, Collection):
        if not s.items:
            return "[⊥]"
        if len(s.items) == 1 and s.items[0][1] is Mult.MANY:
            return f"[{notation(s.items[0][0])}]"
        return "[" + " | ".join(f"{notation(e)}, {m.value}" for e, m in s.items) + "]"
    if isinstance(s, Record):
        if not s.fields:
            return f"{_name_token(s.name)} {{}}"
        body = ", ".join(f"{_name_token(n)}: {notation(f)}" for n, f in s.fields)
        return f"{_name_token(s.name)} {{ {body} }}"
    raise ShapeError(f"not a shape: {s!r}")


def preference_failure(a: Shape, b: Shape, path: str = "") -> Optional[str]:
    """Path-localized explanation of the first reason a ⋢ b, or None."""
    if is_preferred(a, b):
        return None
    if isinstance(a, Record) and isinstance(b, Record) and a.name == b.name:
        amap = a.field_map()
        for fname, bshape in b.fields:
            seg = f"{path}.{fname}"
            if fname in amap:
                inner = preference_failure(amap[fname], bshape, seg)
                if inner is not None:
                    return inner
            elif not admits_absent_field(bshape):
                return f"{seg}: absent ⋢ {notation(bshape)}"
    if isinstance(a, Nullable) and isinstance(b, Nullable):
        return preference_failure(a.inner, b.inner, path)
    if isinstance(b, Nullable) and is_nonnullable(a):
        return preference_failure(a, b.inner, path)
    if isinstance(a, Collection) and isinstance(b, Collection):
        b_by_tag = {tag_of(s): (i, s, m) for i, (s, m) in enumerate(b.items)}
        for s, m in a.items:
            t = tag_of(s)
            hit = b_by_tag.get(t) or b_by_tag.get(TAG_ANY)
            seg = f"{path}[{t.record_name or t.kind}]"
            if hit is None:
                return f"{seg}: {notation(s)} has no matching entry in {notation(b)}"
            _, bs, bm = hit
            if not mult_leq(m, bm):
                return f"{seg}: multiplicity {m.value} ⋢ {bm.value}"
            inner = preference_failure(s, bs, seg)
            if inner is not None:
                return inner
        for bs, bm in b.items:
            if bm is Mult.ONE:
                t = tag_of(bs)
                if all(tag_of(s) != t for s, _ in a.items):
                    return f"{path}[{t.record_name or t.kind}]: required entry missing ({notation(bs)}, 1)"
    return f"{path or '.'}: {notation(a)} ⋢ {notation(b)}"


# --- tagged-tree serialization (the .shape file payload) ---

SHAPE_FORMAT_VERSION = 1


def shape_to_obj(s: Shape):
    if isinstance(s, Bot):
        return {"kind": "bot"}
    if isinstance(s, Null):
        return {"kind": "null"}
    if isinstance(s, Bit):
        return {"kind": "bit"}
    if isinstance(s, Int):
        return {"kind": "int"}
    if isinstance(s, Float):
        return {"kind": "float"}
    if isinstance(s, Bool):
        return {"kind": "bool"}
    if isinstance(s, Text):
        return {"kind": "string"}
    if isinstance(s, Nullable):
        return {"kind": "nullable", "inner": shape_to_obj(s.inner)}
    if isinstance(s, Any):
        return {"kind": "any", "labels": [shape_to_obj(l) for l in s.labels]}
    if isinstance(s, Collection):
        return {
            "kind": "collection",
            "items": [{"shape": shape_to_obj(e), "mult": m.value} for e, m in s.items],
        }
    if isinstance(s, Record):
        return {
            "kind": "record",
            "name": s.name,
            "fields": [{"name": n, "shape": shape_to_obj(f)} for n, f in s.fields],
        }
    raise ShapeError(f"not a shape: {s!r}")


_PRIM_KINDS = {
    "bot": BOT, "null": NULL, "bit": BIT, "int": INT,
    "float": FLOAT, "bool": BOOL, "string": TEXT,
}


def shape_from_obj(obj) -> Shape:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ShapeError(f"malformed shape node: {obj!r}")
    kind = obj["kind"]
    if kind in _PRIM_KINDS:
        return _PRIM_KINDS[kind]
    if kind == "nullable":
        return Nullable(shape_from_obj(obj["inner"]))
    if kind == "any":
        return Any(tuple(shape_from_obj(l) for l in obj.get("labels", ())))
    if kind == "collection":
        items = []
        for it in obj.get("items", ()):
            items.append((shape_from_obj(it["shape"]), Mult(it["mult"])))
        return Collection(tuple(items))
    if kind == "record":
        fields = [(f["name"], shape_from_obj(f["shape"])) for f in obj.get("fields", ())]
        return Record(obj["name"], tuple(fields))
    raise ShapeError(f"unknown shape kind: {kind!r}")


def dump_shape(s: Shape) -> str:
    return json.dumps(
        {"format_version": SHAPE_FORMAT_VERSION, "shape": shape_to_obj(s)},
        ensure_ascii=False,
        indent=2,
    )


def load_shape(text: str) -> Shape:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ShapeError(f"not a shape file: {e}") from e
    if not isinstance(doc, dict) or doc.get("format_version") != SHAPE_FORMAT_VERSION:
        raise ShapeError("missing or unsupported shape format version")
    return shape_from_obj(doc["shape"])
