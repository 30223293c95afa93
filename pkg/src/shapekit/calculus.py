"""A small simply-typed object calculus with dynamic data operations.

Generated accessor classes and their member bodies live in this language.
Expressions are immutable trees; reduction is substitution-based, eager and
left-to-right, so each closed non-value expression has exactly one redex.
The only way a well-typed program can fail to reach a value is a dynamic
data operation whose side conditions do not hold; that is reported as a
first-class ``Stuck`` outcome, not an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Union

from .data_model import (
    BoolVal,
    DataValue,
    FloatVal,
    IntVal,
    INT64_MAX,
    INT64_MIN,
    ListVal,
    NULL,
    NullVal,
    RecordVal,
    StringVal,
    canonical_text,
    data_equal,
)
from . import textforms
from .shapes import (
    Bit as BitShape,
    Bool as BoolShape,
    Float as FloatShape,
    Int as IntShape,
    Record as RecordShape,
    Shape,
    Text as TextShape,
    notation,
)
from . import shapes as _shapes


class FooTypeError(TypeError):
    pass


class FuelExhausted(RuntimeError):
    pass


# --- types ---

@dataclass(frozen=True)
class IntTy:
    pass


@dataclass(frozen=True)
class FloatTy:
    pass


@dataclass(frozen=True)
class BoolTy:
    pass


@dataclass(frozen=True)
class TextTy:
    pass


@dataclass(frozen=True)
class DataTy:
    pass


@dataclass(frozen=True)
class ClassTy:
    name: str


@dataclass(frozen=True)
class Arrow:
    arg: "FooType"
    res: "FooType"


@dataclass(frozen=True)
class ListTy:
    item: "FooType"


@dataclass(frozen=True)
class OptionTy:
    item: "FooType"


FooType = Union[IntTy, FloatTy, BoolTy, TextTy, DataTy, ClassTy, Arrow, ListTy, OptionTy]

INT_T = IntTy()
FLOAT_T = FloatTy()
BOOL_T = BoolTy()
TEXT_T = TextTy()
DATA_T = DataTy()


def type_text(t: FooType) -> str:
    if isinstance(t, IntTy):
        return "int"
    if isinstance(t, FloatTy):
        return "float"
    if isinstance(t, BoolTy):
        return "bool"
    if isinstance(t, TextTy):
        return "string"
    if isinstance(t, DataTy):
        return "Data"
    if isinstance(t, ClassTy):
        return t.name
    if isinstance(t, Arrow):
        return f"{type_text(t.arg)} -> {type_text(t.res)}"
    if isinstance(t, ListTy):
        return f"list<{type_text(t.item)}>"
    if isinstance(t, OptionTy):
        return f"option<{type_text(t.item)}>"
    raise FooTypeError(f"not a type: {t!r}")


def contains_arrow(t: FooType) -> bool:
    if isinstance(t, Arrow):
        return True
    if isinstance(t, (ListTy, OptionTy)):
        return contains_arrow(t.item)
    return False


# --- expressions ---

class OpKind(Enum):
    HAS_SHAPE = "hasShape"
    CONV_FLOAT = "convFloat"
    CONV_PRIM = "convPrim"
    CONV_FIELD = "convField"
    CONV_NULL = "convNull"
    CONV_ELEMENTS = "convElements"


@dataclass(frozen=True)
class DataLit:
    value: DataValue


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lambda:
    param: str
    param_ty: Optional[FooType]
    body: "FooExpr"


@dataclass(frozen=True)
class Apply:
    fn: "FooExpr"
    arg: "FooExpr"


@dataclass(frozen=True)
class MemberAccess:
    obj: "FooExpr"
    name: str


@dataclass(frozen=True)
class New:
    cls: str
    args: tuple["FooExpr", ...]


@dataclass(frozen=True)
class NoneLit:
    item_ty: Optional[FooType] = None


@dataclass(frozen=True)
class SomeOf:
    inner: "FooExpr"


@dataclass(frozen=True)
class MatchOption:
    scrutinee: "FooExpr"
    var: str
    some_body: "FooExpr"
    none_body: "FooExpr"


@dataclass(frozen=True)
class NilLit:
    item_ty: Optional[FooType] = None


@dataclass(frozen=True)
class Cons:
    head: "FooExpr"
    tail: "FooExpr"


@dataclass(frozen=True)
class MatchList:
    scrutinee: "FooExpr"
    head_var: str
    tail_var: str
    cons_body: "FooExpr"
    nil_body: "FooExpr"


@dataclass(frozen=True)
class Eq:
    left: "FooExpr"
    right: "FooExpr"


@dataclass(frozen=True)
class If:
    cond: "FooExpr"
    then: "FooExpr"
    els: "FooExpr"


@dataclass(frozen=True)
class DynOp:
    kind: OpKind
    shape: Optional[Shape] = None
    names: tuple[str, ...] = ()
    args: tuple["FooExpr", ...] = ()
    note: str = ""


@dataclass(frozen=True)
class ExnLit:
    pass


@dataclass(frozen=True)
class IntCoerce:
    inner: "FooExpr"


FooExpr = Union[
    DataLit, Var, Lambda, Apply, MemberAccess, New, NoneLit, SomeOf, MatchOption,
    NilLit, Cons, MatchList, Eq, If, DynOp, ExnLit, IntCoerce,
]

EXN = ExnLit()


# --- classes ---

@dataclass(frozen=True)
class MemberDef:
    name: str
    ty: FooType
    body: FooExpr
    synthetic: bool = False  # escape-hatch members hidden from signatures


@dataclass(frozen=True)
class ClassDef:
    name: str
    params: tuple[tuple[str, FooType], ...]
    members: tuple[MemberDef, ...]

    def __post_init__(self):
        names = [m.name for m in self.members]
        if len(names) != len(set(names)):
            raise FooTypeError(f"duplicate members in class {self.name}")

    def member(self, name: str) -> Optional[MemberDef]:
        for m in self.members:
            if m.name == name:
                return m
        return None

    def data_members(self) -> tuple[MemberDef, ...]:
        return tuple(m for m in self.members if not m.synthetic)


ClassSet = Mapping[str, ClassDef]


# --- dynamic shape test ---

def has_shape(s: Shape, d: DataValue) -> bool:
    """Runtime shape test bridging raw data and shapes.

    Record fields with nullable shapes are satisfied by absence or null;
    string values satisfy numeric/boolean shapes when lexically convertible
    (textual sources carry numbers as strings); null list elements are
    invisible, matching their treatment during inference.
    """
    if isinstance(s, _shapes.Any):
        return True
    if isinstance(s, _shapes.Bot):
        return False
    if isinstance(s, _shapes.Null):
        return isinstance(d, NullVal)
    if isinstance(s, _shapes.Nullable):
        return isinstance(d, NullVal) or has_shape(s.inner, d)
    if isinstance(s, RecordShape):
        if not isinstance(d, RecordVal) or d.name != s.name:
            return False
        dmap = d.field_map()
        for fname, fshape in s.fields:
            if fname in dmap:
                if not has_shape(fshape, dmap[fname]):
                    return False
            elif not _shapes.admits_absent_field(fshape):
                return False
        return True
    if isinstance(s, _shapes.Collection):
        if isinstance(d, NullVal):
            # null is the empty collection: fine unless an entry is required
            return all(m is not _shapes.Mult.ONE for _, m in s.items)
        if not isinstance(d, ListVal):
            return False
        elems = [x for x in d.items if not isinstance(x, NullVal)]
        # exactly the no-stuck precondition of the generated accessors:
        # required entries find an element, every element is accounted for
        for entry, mult in s.items:
            if mult is _shapes.Mult.ONE and not any(has_shape(entry, x) for x in elems):
                return False
        return all(any(has_shape(entry, x) for entry, _ in s.items) for x in elems)
    if isinstance(s, FloatShape):
        if isinstance(d, (IntVal, FloatVal)):
            return True
        return isinstance(d, StringVal) and textforms.is_float_text(d.value)
    if isinstance(s, IntShape):
        if isinstance(d, IntVal):
            return True
        return isinstance(d, StringVal) and textforms.is_int_text(d.value)
    if isinstance(s, BitShape):
        if isinstance(d, IntVal):
            return d.value in (0, 1)
        if isinstance(d, BoolVal):
            return True
        return isinstance(d, StringVal) and d.value.lower() in ("0", "1", "true", "false")
    if isinstance(s, BoolShape):
        if isinstance(d, BoolVal):
            return True
        if isinstance(d, IntVal):
            return d.value in (0, 1)
        return isinstance(d, StringVal) and d.value.lower() in ("true", "false", "0", "1")
    if isinstance(s, TextShape):
        return isinstance(d, StringVal)
    return False


# --- type checking ---

_PRIM_LIT_TYPES = {
    IntVal: INT_T,
    FloatVal: FLOAT_T,
    BoolVal: BOOL_T,
    StringVal: TEXT_T,
}


class _Checker:
    def __init__(self, classes: ClassSet, stability: bool = False):
        self.classes = classes
        self.stability = stability

    def fail(self, msg: str):
        raise FooTypeError(msg)

    def synth(self, env: dict, e: FooExpr) -> FooType:
        if isinstance(e, DataLit):
            return _PRIM_LIT_TYPES.get(type(e.value), DATA_T)
        if isinstance(e, Var):
            if e.name not in env:
                self.fail(f"unbound variable {e.name}")
            return env[e.name]
        if isinstance(e, Lambda):
            if e.param_ty is None:
                self.fail("cannot synthesize type of unannotated lambda")
            inner = dict(env)
            inner[e.param] = e.param_ty
            return Arrow(e.param_ty, self.synth(inner, e.body))
        if isinstance(e, Apply):
            fn_ty = self.synth(env, e.fn)
            if not isinstance(fn_ty, Arrow):
                self.fail(f"applying a non-function of type {type_text(fn_ty)}")
            self.check(env, e.arg, fn_ty.arg)
            return fn_ty.res
        if isinstance(e, MemberAccess):
            obj_ty = self.synth(env, e.obj)
            if not isinstance(obj_ty, ClassTy) or obj_ty.name not in self.classes:
                self.fail(f"member access on non-class type {type_text(obj_ty)}")
            member = self.classes[obj_ty.name].member(e.name)
            if member is None:
                self.fail(f"class {obj_ty.name} has no member {e.name}")
            return member.ty
        if isinstance(e, New):
            cdef = self.classes.get(e.cls)
            if cdef is None:
                self.fail(f"unknown class {e.cls}")
            if len(e.args) != len(cdef.params):
                self.fail(f"class {e.cls} expects {len(cdef.params)} argument(s)")
            for arg, (_, pty) in zip(e.args, cdef.params):
                self.check(env, arg, pty)
            return ClassTy(e.cls)
        if isinstance(e, NoneLit):
            if e.item_ty is None:
                self.fail("cannot synthesize type of bare None")
            return OptionTy(e.item_ty)
        if isinstance(e, SomeOf):
            return OptionTy(self.synth(env, e.inner))
        if isinstance(e, MatchOption):
            sc_ty = self.synth(env, e.scrutinee)
            if not isinstance(sc_ty, OptionTy):
                self.fail("option match on non-option")
            inner = dict(env)
            inner[e.var] = sc_ty.item
            out = self.synth(inner, e.some_body)
            self.check(env, e.none_body, out)
            return out
        if isinstance(e, NilLit):
            if e.item_ty is None:
                self.fail("cannot synthesize type of bare nil")
            return ListTy(e.item_ty)
        if isinstance(e, Cons):
            head_ty = self.synth(env, e.head)
            self.check(env, e.tail, ListTy(head_ty))
            return ListTy(head_ty)
        if isinstance(e, MatchList):
            sc_ty = self.synth(env, e.scrutinee)
            if not isinstance(sc_ty, ListTy):
                self.fail("list match on non-list")
            inner = dict(env)
            inner[e.head_var] = sc_ty.item
            inner[e.tail_var] = sc_ty
            out = self.synth(inner, e.cons_body)
            self.check(env, e.nil_body, out)
            return out
        if isinstance(e, Eq):
            lt = self.synth(env, e.left)
            if contains_arrow(lt):
                self.fail("functions cannot be compared")
            self.check(env, e.right, lt)
            return BOOL_T
        if isinstance(e, If):
            self.check(env, e.cond, BOOL_T)
            out = self.synth(env, e.then)
            self.check(env, e.els, out)
            return out
        if isinstance(e, DynOp):
            return self.synth_op(env, e)
        if isinstance(e, ExnLit):
            if not self.stability:
                self.fail("exn is only available in stability mode")
            self.fail("cannot synthesize type of exn")
        if isinstance(e, IntCoerce):
            if not self.stability:
                self.fail("int coercion is only available in stability mode")
            self.check(env, e.inner, FLOAT_T)
            return INT_T
        self.fail(f"not an expression: {e!r}")

    def synth_op(self, env: dict, e: DynOp) -> FooType:
        kind = e.kind
        if kind is OpKind.HAS_SHAPE:
            if e.shape is None or len(e.args) != 1:
                self.fail("hasShape takes a shape and one argument")
            self.check(env, e.args[0], DATA_T)
            return BOOL_T
        if kind is OpKind.CONV_FLOAT:
            if not isinstance(e.shape, (IntShape, FloatShape)) or len(e.args) != 1:
                self.fail("convFloat takes a numeric shape and one argument")
            self.check(env, e.args[0], DATA_T)
            return FLOAT_T
        if kind is OpKind.CONV_PRIM:
            prim_map = {IntShape: INT_T, BoolShape: BOOL_T, TextShape: TEXT_T}
            ty = prim_map.get(type(e.shape))
            if ty is None or len(e.args) != 1:
                self.fail("convPrim takes an int/bool/string shape and one argument")
            self.check(env, e.args[0], DATA_T)
            return ty
        if kind in (OpKind.CONV_NULL, OpKind.CONV_ELEMENTS):
            if len(e.args) != 2:
                self.fail(f"{kind.value} takes two arguments")
            self.check(env, e.args[0], DATA_T)
            fn_ty = self.synth(env, e.args[1])
            if not isinstance(fn_ty, Arrow) or fn_ty.arg != DATA_T:
                self.fail(f"{kind.value} needs a Data -> τ conversion function")
            return OptionTy(fn_ty.res) if kind is OpKind.CONV_NULL else ListTy(fn_ty.res)
        if kind is OpKind.CONV_FIELD:
            if len(e.names) != 2 or len(e.args) != 2:
                self.fail("convField takes two names and two arguments")
            self.check(env, e.args[0], DATA_T)
            fn_ty = self.synth(env, e.args[1])
            if not isinstance(fn_ty, Arrow) or fn_ty.arg != DATA_T:
                self.fail("convField needs a Data -> τ conversion function")
            return fn_ty.res
        self.fail(f"unknown operation {kind!r}")

    def check(self, env: dict, e: FooExpr, expected: FooType):
        if isinstance(e, DataLit):
            if isinstance(expected, DataTy):
                return
            lit_ty = _PRIM_LIT_TYPES.get(type(e.value))
            if lit_ty != expected:
                self.fail(
                    f"literal {canonical_text(e.value)} does not have type {type_text(expected)}"
                )
            return
        if isinstance(e, Lambda) and isinstance(expected, Arrow):
            if e.param_ty is not None and e.param_ty != expected.arg:
                self.fail("lambda parameter annotation mismatch")
            inner = dict(env)
            inner[e.param] = expected.arg
            self.check(inner, e.body, expected.res)
            return
        if isinstance(e, NoneLit):
            if not isinstance(expected, OptionTy):
                self.fail(f"None checked against {type_text(expected)}")
            if e.item_ty is not None and e.item_ty != expected.item:
                self.fail("annotated None does not match expected option type")
            return
        if isinstance(e, SomeOf) and isinstance(expected, OptionTy):
            self.check(env, e.inner, expected.item)
            return
        if isinstance(e, NilLit):
            if not isinstance(expected, ListTy):
                self.fail(f"nil checked against {type_text(expected)}")
            if e.item_ty is not None and e.item_ty != expected.item:
                self.fail("annotated nil does not match expected list type")
            return
        if isinstance(e, Cons) and isinstance(expected, ListTy):
            self.check(env, e.head, expected.item)
            self.check(env, e.tail, expected)
            return
        if isinstance(e, If):
            self.check(env, e.cond, BOOL_T)
            self.check(env, e.then, expected)
            self.check(env, e.els, expected)
            return
        if isinstance(e, MatchOption):
            sc_ty = self.synth(env, e.scrutinee)
            if not isinstance(sc_ty, OptionTy):
                self.fail("option match on non-option")
            inner = dict(env)
            inner[e.var] = sc_ty.item
            self.check(inner, e.some_body, expected)
            self.check(env, e.none_body, expected)
            return
        if isinstance(e, MatchList):
            sc_ty = self.synth(env, e.scrutinee)
            if not isinstance(sc_ty, ListTy):
                self.fail("list match on non-list")
            inner = dict(env)
            inner[e.head_var] = sc_ty.item
            inner[e.tail_var] = sc_ty
            self.check(inner, e.cons_body, expected)
            self.check(env, e.nil_body, expected)
            return
        if isinstance(e, ExnLit):
            if not self.stability:
                self.fail("exn is only available in stability mode")
            return
        got = self.synth(env, e)
        if got != expected:
            self.fail(f"expected {type_text(expected)}, found {type_text(got)}")


def typecheck(
    classes: ClassSet,
    env: Mapping[str, FooType],
    e: FooExpr,
    expected: Optional[FooType] = None,
    stability: bool = False,
) -> FooType:
    """Type of ``e`` in ``env``; with ``expected`` given, checks against it."""
    checker = _Checker(classes, stability)
    if expected is None:
        return checker.synth(dict(env), e)
    checker.check(dict(env), e, expected)
    return expected


def check_classes(classes: ClassSet, stability: bool = False):
    """Validate every member body against its declared type."""
    for cdef in classes.values():
        env = dict(cdef.params)
        for m in cdef.members:
            typecheck(classes, env, m.body, m.ty, stability=stability)


# --- values ---

@dataclass(frozen=True)
class NoneV:
    pass


@dataclass(frozen=True)
class SomeV:
    inner: "FooValue"


@dataclass(frozen=True)
class ObjV:
    cls: str
    args: tuple["FooValue", ...]


@dataclass(frozen=True)
class FooList:
    items: tuple["FooValue", ...]


@dataclass(frozen=True)
class ClosureV:
    param: str
    param_ty: Optional[FooType]
    body: FooExpr


@dataclass(frozen=True)
class ExnV:
    pass


FooValue = Union[DataValue, NoneV, SomeV, ObjV, FooList, ClosureV, ExnV]

NONE_V = NoneV()
EXN_V = ExnV()


def is_value(e: FooExpr) -> bool:
    if isinstance(e, (DataLit, Lambda, NoneLit, NilLit, ExnLit)):
        return True
    if isinstance(e, SomeOf):
        return is_value(e.inner)
    if isinstance(e, Cons):
        return is_value(e.head) and is_value(e.tail)
    if isinstance(e, New):
        return all(is_value(a) for a in e.args)
    return False


def _value_contains_exn(e: FooExpr) -> bool:
    if isinstance(e, ExnLit):
        return True
    if isinstance(e, SomeOf):
        return _value_contains_exn(e.inner)
    if isinstance(e, Cons):
        return _value_contains_exn(e.head) or _value_contains_exn(e.tail)
    if isinstance(e, New):
        return any(_value_contains_exn(a) for a in e.args)
    return False


def as_foo_value(e: FooExpr) -> FooValue:
    if isinstance(e, DataLit):
        return e.value
    if isinstance(e, Lambda):
        return ClosureV(e.param, e.param_ty, e.body)
    if isinstance(e, NoneLit):
        return NONE_V
    if isinstance(e, SomeOf):
        return SomeV(as_foo_value(e.inner))
    if isinstance(e, NilLit):
        return FooList(())
    if isinstance(e, Cons):
        items = []
        cur: FooExpr = e
        while isinstance(cur, Cons):
            items.append(as_foo_value(cur.head))
            cur = cur.tail
        if not isinstance(cur, NilLit):
            raise FooTypeError("improper list value")
        return FooList(tuple(items))
    if isinstance(e, New):
        return ObjV(e.cls, tuple(as_foo_value(a) for a in e.args))
    if isinstance(e, ExnLit):
        return EXN_V
    raise FooTypeError(f"not a value: {e!r}")


def value_to_expr(v: FooValue) -> FooExpr:
    if isinstance(v, NoneV):
        return NoneLit()
    if isinstance(v, SomeV):
        return SomeOf(value_to_expr(v.inner))
    if isinstance(v, ObjV):
        return New(v.cls, tuple(value_to_expr(a) for a in v.args))
    if isinstance(v, FooList):
        out: FooExpr = NilLit()
        for item in reversed(v.items):
            out = Cons(value_to_expr(item), out)
        return out
    if isinstance(v, ClosureV):
        return Lambda(v.param, v.param_ty, v.body)
    if isinstance(v, ExnV):
        return EXN
    return DataLit(v)


def foo_value_text(v: FooValue) -> str:
    if isinstance(v, NoneV):
        return "None"
    if isinstance(v, SomeV):
        return f"Some({foo_value_text(v.inner)})"
    if isinstance(v, ObjV):
        return f"{v.cls}(…)"
    if isinstance(v, FooList):
        return "[" + "; ".join(foo_value_text(x) for x in v.items) + "]"
    if isinstance(v, ClosureV):
        return "<fun>"
    if isinstance(v, ExnV):
        return "exn"
    return canonical_text(v)


# --- reduction ---

@dataclass(frozen=True)
class Stuck:
    op: OpKind
    value: Optional[DataValue]
    note: str = ""

    def describe(self) -> str:
        at = f" at {self.note}" if self.note else ""
        on = f" on {canonical_text(self.value)}" if self.value is not None else ""
        return f"stuck: {self.op.value}{at}{on}"


def substitute(e: FooExpr, mapping: Mapping[str, FooExpr]) -> FooExpr:
    if not mapping:
        return e
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, (DataLit, NoneLit, NilLit, ExnLit)):
        return e
    if isinstance(e, Lambda):
        inner = {k: v for k, v in mapping.items() if k != e.param}
        return Lambda(e.param, e.param_ty, substitute(e.body, inner))
    if isinstance(e, Apply):
        return Apply(substitute(e.fn, mapping), substitute(e.arg, mapping))
    if isinstance(e, MemberAccess):
        return MemberAccess(substitute(e.obj, mapping), e.name)
    if isinstance(e, New):
        return New(e.cls, tuple(substitute(a, mapping) for a in e.args))
    if isinstance(e, SomeOf):
        return SomeOf(substitute(e.inner, mapping))
    if isinstance(e, MatchOption):
        inner = {k: v for k, v in mapping.items() if k != e.var}
        return MatchOption(
            substitute(e.scrutinee, mapping),
            e.var,
            substitute(e.some_body, inner),
            substitute(e.none_body, mapping),
        )
    if isinstance(e, Cons):
        return Cons(substitute(e.head, mapping), substitute(e.tail, mapping))
    if isinstance(e, MatchList):
        inner = {k: v for k, v in mapping.items() if k not in (e.head_var, e.tail_var)}
        return MatchList(
            substitute(e.scrutinee, mapping),
            e.head_var,
            e.tail_var,
            substitute(e.cons_body, inner),
            substitute(e.nil_body, mapping),
        )
    if isinstance(e, Eq):
        return Eq(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, If):
        return If(substitute(e.cond, mapping), substitute(e.then, mapping), substitute(e.els, mapping))
    if isinstance(e, DynOp):
        return DynOp(e.kind, e.shape, e.names, tuple(substitute(a, mapping) for a in e.args), e.note)
    if isinstance(e, IntCoerce):
        return IntCoerce(substitute(e.inner, mapping))
    raise FooTypeError(f"not an expression: {e!r}")


def _values_equal(a: FooExpr, b: FooExpr) -> bool:
    va, vb = as_foo_value(a), as_foo_value(b)
    if isinstance(va, ClosureV) or isinstance(vb, ClosureV):
        raise FooTypeError("functions cannot be compared")
    return va == vb


class _StepEngine:
    def __init__(self, classes: ClassSet, stability: bool = False):
        self.classes = classes
        self.stability = stability

    def step(self, e: FooExpr) -> Union[FooExpr, Stuck]:
        """One reduction step of a closed, non-value expression."""
        if isinstance(e, Apply):
            return self._in_positions(e, ("fn", "arg"), self._apply)
        if isinstance(e, MemberAccess):
            return self._in_positions(e, ("obj",), self._member)
        if isinstance(e, New):
            return self._in_tuple(e, "args", lambda: e)  # all-values New is a value
        if isinstance(e, SomeOf):
            return self._in_positions(e, ("inner",), lambda ex: ex)
        if isinstance(e, Cons):
            return self._in_positions(e, ("head", "tail"), lambda ex: ex)
        if isinstance(e, MatchOption):
            return self._in_positions(e, ("scrutinee",), self._match_option)
        if isinstance(e, MatchList):
            return self._in_positions(e, ("scrutinee",), self._match_list)
        if isinstance(e, Eq):
            return self._in_positions(
                e, ("left", "right"),
                lambda ex: DataLit(BoolVal(_values_equal(ex.left, ex.right))),
            )
        if isinstance(e, If):
            return self._in_positions(e, ("cond",), self._if)
        if isinstance(e, DynOp):
            return self._in_tuple(e, "args", lambda: self._reduce_op(e))
        if isinstance(e, IntCoerce):
            return self._in_positions(e, ("inner",), self._coerce)
        raise FooTypeError(f"no reduction for {e!r}")

    def _in_positions(self, e, attrs, redex):
        for attr in attrs:
            sub = getattr(e, attr)
            if not is_value(sub):
                stepped = self.step(sub)
                if isinstance(stepped, Stuck):
                    return stepped
                return type(e)(**{**{f.name: getattr(e, f.name) for f in e.__dataclass_fields__.values()}, attr: stepped})
            if self.stability and isinstance(sub, ExnLit):
                return EXN
        return redex(e)

    def _in_tuple(self, e, attr, redex):
        items = getattr(e, attr)
        for i, sub in enumerate(items):
            if not is_value(sub):
                stepped = self.step(sub)
                if isinstance(stepped, Stuck):
                    return stepped
                new_items = items[:i] + (stepped,) + items[i + 1:]
                return type(e)(**{**{f.name: getattr(e, f.name) for f in e.__dataclass_fields__.values()}, attr: new_items})
            if self.stability and isinstance(sub, ExnLit):
                return EXN
        return redex()

    def _apply(self, e: Apply):
        if isinstance(e.fn, Lambda):
            return substitute(e.fn.body, {e.fn.param: e.arg})
        raise FooTypeError(f"applying a non-function: {e.fn!r}")

    def _member(self, e: MemberAccess):
        obj = e.obj
        if not isinstance(obj, New):
            raise FooTypeError(f"member access on non-object: {obj!r}")
        cdef = self.classes.get(obj.cls)
        if cdef is None:
            raise FooTypeError(f"unknown class {obj.cls}")
        member = cdef.member(e.name)
        if member is None:
            raise FooTypeError(f"class {obj.cls} has no member {e.name}")
        mapping = {pname: arg for (pname, _), arg in zip(cdef.params, obj.args)}
        return substitute(member.body, mapping)

    def _match_option(self, e: MatchOption):
        sc = e.scrutinee
        if isinstance(sc, NoneLit):
            return e.none_body
        if isinstance(sc, SomeOf):
            return substitute(e.some_body, {e.var: sc.inner})
        raise FooTypeError("option match on non-option value")

    def _match_list(self, e: MatchList):
        sc = e.scrutinee
        if isinstance(sc, NilLit):
            return e.nil_body
        if isinstance(sc, Cons):
            return substitute(e.cons_body, {e.head_var: sc.head, e.tail_var: sc.tail})
        raise FooTypeError("list match on non-list value")

    def _if(self, e: If):
        cond = e.cond
        if isinstance(cond, DataLit) and isinstance(cond.value, BoolVal):
            return e.then if cond.value.value else e.els
        raise FooTypeError("if condition is not a boolean")

    def _coerce(self, e: IntCoerce):
        inner = e.inner
        if isinstance(inner, DataLit) and isinstance(inner.value, FloatVal):
            return DataLit(IntVal(int(inner.value.value)))
        raise FooTypeError("int coercion on non-float")

    def _data_arg(self, e: DynOp, idx: int) -> DataValue:
        arg = e.args[idx]
        if not isinstance(arg, DataLit):
            raise FooTypeError(f"{e.kind.value} expects a data value argument")
        return arg.value

    def _conversion_result_ty(self, fn: FooExpr) -> Optional[FooType]:
        # annotate empty options/lists created by reduction, so stepped
        # expressions stay synthesizable
        try:
            fn_ty = typecheck(self.classes, {}, fn, stability=self.stability)
        except FooTypeError:
            return None
        return fn_ty.res if isinstance(fn_ty, Arrow) else None

    def _reduce_op(self, e: DynOp) -> Union[FooExpr, Stuck]:
        kind = e.kind
        if kind is OpKind.HAS_SHAPE:
            d = self._data_arg(e, 0)
            return DataLit(BoolVal(has_shape(e.shape, d)))
        if kind is OpKind.CONV_FLOAT:
            d = self._data_arg(e, 0)
            if isinstance(d, IntVal):
                return DataLit(FloatVal(float(d.value)))
            if isinstance(d, FloatVal):
                return DataLit(d)
            if isinstance(d, StringVal) and textforms.is_float_text(d.value):
                return DataLit(FloatVal(float(d.value)))
            return Stuck(kind, d, e.note)
        if kind is OpKind.CONV_PRIM:
            d = self._data_arg(e, 0)
            return self._conv_prim(e, d)
        if kind is OpKind.CONV_NULL:
            d = self._data_arg(e, 0)
            if isinstance(d, NullVal):
                return NoneLit(self._conversion_result_ty(e.args[1]))
            return SomeOf(Apply(e.args[1], DataLit(d)))
        if kind is OpKind.CONV_ELEMENTS:
            d = self._data_arg(e, 0)
            if isinstance(d, NullVal):
                return NilLit(self._conversion_result_ty(e.args[1]))
            if not isinstance(d, ListVal):
                return Stuck(kind, d, e.note)
            items = d.items
            if e.shape is not None:
                items = tuple(x for x in items if has_shape(e.shape, x))
            out: FooExpr = NilLit(self._conversion_result_ty(e.args[1]))
            for item in reversed(items):
                out = Cons(Apply(e.args[1], DataLit(item)), out)
            return out
        if kind is OpKind.CONV_FIELD:
            d = self._data_arg(e, 0)
            rec_name, field_name = e.names
            if not isinstance(d, RecordVal) or d.name != rec_name:
                return Stuck(kind, d, e.note or f"{rec_name}.{field_name}")
            value = d.field_map().get(field_name, NULL)
            return Apply(e.args[1], DataLit(value))
        raise FooTypeError(f"unknown operation {kind!r}")

    def _conv_prim(self, e: DynOp, d: DataValue) -> Union[FooExpr, Stuck]:
        target = e.shape
        if isinstance(target, IntShape):
            if isinstance(d, IntVal):
                return DataLit(d)
            if isinstance(d, StringVal) and textforms.is_int_text(d.value):
                n = int(d.value)
                if INT64_MIN <= n <= INT64_MAX:
                    return DataLit(IntVal(n))
        elif isinstance(target, BoolShape):
            if isinstance(d, BoolVal):
                return DataLit(d)
            if isinstance(d, IntVal) and d.value in (0, 1):
                return DataLit(BoolVal(d.value == 1))
            if isinstance(d, StringVal):
                low = d.value.lower()
                if low in ("true", "1"):
                    return DataLit(BoolVal(True))
                if low in ("false", "0"):
                    return DataLit(BoolVal(False))
        elif isinstance(target, TextShape):
            if isinstance(d, StringVal):
                return DataLit(d)
        return Stuck(e.kind, d, e.note)


def reduce_step(classes: ClassSet, e: FooExpr, stability: bool = False) -> Union[FooExpr, Stuck]:
    """One deterministic reduction step.  ``e`` must be closed and not a value."""
    return _StepEngine(classes, stability).step(e)


# --- evaluation outcomes ---

@dataclass(frozen=True)
class Value:
    value: FooValue


@dataclass(frozen=True)
class StuckOutcome:
    stuck: Stuck


@dataclass(frozen=True)
class ExnOutcome:
    pass


EvalOutcome = Union[Value, StuckOutcome, ExnOutcome]

DEFAULT_FUEL = 10**6


def evaluate(
    classes: ClassSet,
    e: FooExpr,
    fuel: int = DEFAULT_FUEL,
    stability: bool = False,
) -> EvalOutcome:
    """Iterate reduction to a value, a stuck state, or exn."""
    engine = _StepEngine(classes, stability)
    for _ in range(fuel):
        if isinstance(e, ExnLit):
            return ExnOutcome()
        if is_value(e):
            if stability and _value_contains_exn(e):
                return ExnOutcome()
            return Value(as_foo_value(e))
        stepped = engine.step(e)
        if isinstance(stepped, Stuck):
            return StuckOutcome(stepped)
        e = stepped
    raise FuelExhausted(f"no value after {fuel} steps")


# --- surface syntax (rendering only; golden tests and CLI trace output) ---

def expr_text(e: FooExpr) -> str:
    if isinstance(e, DataLit):
        return canonical_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lambda):
        return f"λ{e.param}. {expr_text(e.body)}"
    if isinstance(e, Apply):
        return f"({expr_text(e.fn)}) ({expr_text(e.arg)})"
    if isinstance(e, MemberAccess):
        return f"{expr_text(e.obj)}.{e.name}"
    if isinstance(e, New):
        return f"new {e.cls}({', '.join(expr_text(a) for a in e.args)})"
    if isinstance(e, NoneLit):
        return "None"
    if isinstance(e, SomeOf):
        return f"Some({expr_text(e.inner)})"
    if isinstance(e, MatchOption):
        return (
            f"match {expr_text(e.scrutinee)} with Some({e.var}) -> "
            f"{expr_text(e.some_body)} | None -> {expr_text(e.none_body)}"
        )
    if isinstance(e, NilLit):
        return "nil"
    if isinstance(e, Cons):
        return f"{expr_text(e.head)} :: {expr_text(e.tail)}"
    if isinstance(e, MatchList):
        return (
            f"match {expr_text(e.scrutinee)} with {e.head_var} :: {e.tail_var} -> "
            f"{expr_text(e.cons_body)} | nil -> {expr_text(e.nil_body)}"
        )
    if isinstance(e, Eq):
        return f"{expr_text(e.left)} = {expr_text(e.right)}"
    if isinstance(e, If):
        return f"if {expr_text(e.cond)} then {expr_text(e.then)} else {expr_text(e.els)}"
    if isinstance(e, DynOp):
        parts = []
        if e.shape is not None:
            parts.append(notation(e.shape))
        parts.extend(e.names)
        parts.extend(expr_text(a) for a in e.args)
        return f"{e.kind.value}({', '.join(parts)})"
    if isinstance(e, ExnLit):
        return "exn"
    if isinstance(e, IntCoerce):
        return f"int({expr_text(e.inner)})"
    raise FooTypeError(f"not an expression: {e!r}")


def class_text(cdef: ClassDef) -> str:
    params = ", ".join(f"{n} : {type_text(t)}" for n, t in cdef.params)
    lines = [f"type {cdef.name}({params}) ="]
    for m in cdef.members:
        lines.append(f"  member {m.name} : {type_text(m.ty)} = {expr_text(m.body)}")
    return "\n".join(lines)
