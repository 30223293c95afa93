"""Translation of inferred shapes into accessor classes.

``provide`` maps a shape to a root type, a conversion function
``Data -> root``, and the class definitions the conversion uses.  Records
become classes with one member per field; nullable shapes become options;
collections become lists, or classes with one member per element tag when
heterogeneous; labelled top shapes become classes of shape-guarded optional
members.  ``normalize_names`` then reshapes the raw classes into the
published surface: body-content members are lifted and collapsed, names are
PascalCased, collisions numbered.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .data_model import NULL as NULL_VALUE
from .shapes import (
    Any as AnyShape,
    Bit,
    Bool,
    Bot,
    Collection,
    Float,
    Int,
    Mult,
    Null as NullShape,
    Nullable,
    Record,
    Shape,
    Text,
    tag_of,
)
from .calculus import (
    Apply,
    Arrow,
    BOOL_T,
    ClassDef,
    ClassTy,
    Cons,
    DATA_T,
    DataLit,
    DynOp,
    Eq,
    FLOAT_T,
    FooExpr,
    FooType,
    INT_T,
    If,
    IntCoerce,
    Lambda,
    ListTy,
    MatchList,
    MatchOption,
    MemberAccess,
    MemberDef,
    New,
    NilLit,
    NoneLit,
    OpKind,
    OptionTy,
    SomeOf,
    TEXT_T,
    Var,
    class_text,
    substitute,
    type_text,
)

JSON_NAME = "•"

RAW_MEMBER = "Raw"


def pascal_case(name: str) -> str:
    """Split on non-alphanumerics and case boundaries, capitalize each
    token's first letter.  Idempotent."""
    tokens: list[str] = []
    for chunk in re.split(r"[^0-9A-Za-z]+", name):
        if not chunk:
            continue
        tokens.extend(re.findall(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+", chunk))
    return "".join(t[0].upper() + t[1:] for t in tokens)


class ClassNamer:
    """Deterministic class names: PascalCase of a hint when available, else
    C1, C2, ...; collisions get a numeric suffix."""

    def __init__(self):
        self.used: set[str] = set()
        self.anon = 0

    def fresh(self, hint: str | None = None) -> str:
        base = pascal_case(hint) if hint else ""
        if not base:
            self.anon += 1
            base = f"C{self.anon}"
        name = base
        n = 1
        while name in self.used:
            n += 1
            name = f"{base}{n}"
        self.used.add(name)
        return name


def fresh_class_namer() -> ClassNamer:
    return ClassNamer()


@dataclass
class Provided:
    root_type: FooType
    converter: FooExpr
    classes: dict[str, ClassDef]
    name_map: dict[str, dict[str, str]]


_PRIM_TABLE = {
    Bool: (BOOL_T, OpKind.CONV_PRIM, Bool()),
    Int: (INT_T, OpKind.CONV_PRIM, Int()),
    Float: (FLOAT_T, OpKind.CONV_FLOAT, Float()),
    Text: (TEXT_T, OpKind.CONV_PRIM, Text()),
    # bit surfaces as bool; the bool converter accepts 0/1 and boolean text
    Bit: (BOOL_T, OpKind.CONV_PRIM, Bool()),
}


def _member_token(s: Shape) -> str:
    """Member name for a labelled-top label or collection entry, from its tag."""
    t = tag_of(s)
    if t.kind == "record":
        return "Record" if t.record_name == JSON_NAME else t.record_name
    return {
        "number": "Number",
        "string": "String",
        "bool": "Bool",
        "collection": "Array",
        "any": "Any",
    }[t.kind]


def _entry_hint(entry: Shape, token: str) -> str | None:
    if isinstance(entry, Record):
        return token if entry.name == JSON_NAME else None
    if isinstance(entry, Collection):
        return "Item"
    return None


class _Builder:
    def __init__(self):
        self.namer = ClassNamer()
        self.classes: dict[str, ClassDef] = {}
        self.name_map: dict[str, dict[str, str]] = {}
        self._var = 0

    def fresh_var(self) -> str:
        self._var += 1
        return f"x{self._var}"

    def build(self, s: Shape, hint: str | None) -> tuple[FooType, FooExpr]:
        """Returns the provided type and a conversion lambda Data -> type."""
        if type(s) in _PRIM_TABLE:
            ty, op, shape_arg = _PRIM_TABLE[type(s)]
            x = self.fresh_var()
            return ty, Lambda(x, DATA_T, DynOp(op, shape=shape_arg, args=(Var(x),)))
        if isinstance(s, Nullable):
            ty, conv = self.build(s.inner, hint)
            x = self.fresh_var()
            return OptionTy(ty), Lambda(x, DATA_T, DynOp(OpKind.CONV_NULL, args=(Var(x), conv)))
        if isinstance(s, Record):
            return self._build_record(s, hint)
        if isinstance(s, Collection):
            return self._build_collection(s, hint)
        if isinstance(s, AnyShape):
            return self._build_any(s, hint)
        if isinstance(s, (Bot, NullShape)):
            return self._build_opaque(hint)
        raise TypeError(f"cannot provide for {s!r}")

    def _register(self, cdef: ClassDef, originals: dict[str, str]):
        self.classes[cdef.name] = cdef
        self.name_map[cdef.name] = originals

    def _raw_member(self, param: str) -> MemberDef:
        return MemberDef(RAW_MEMBER, DATA_T, Var(param), synthetic=True)

    def _ctor(self, cname: str) -> FooExpr:
        x = self.fresh_var()
        return Lambda(x, DATA_T, New(cname, (Var(x),)))

    def _build_opaque(self, hint: str | None) -> tuple[FooType, FooExpr]:
        cname = self.namer.fresh(hint)
        param = self.fresh_var()
        self._register(ClassDef(cname, ((param, DATA_T),), (self._raw_member(param),)), {})
        return ClassTy(cname), self._ctor(cname)

    def _build_record(self, s: Record, hint: str | None) -> tuple[FooType, FooExpr]:
        cname = self.namer.fresh(hint or (s.name if s.name != JSON_NAME else None))
        param = self.fresh_var()
        members = [self._raw_member(param)]
        originals = {}
        for fname, fshape in s.fields:
            fty, fconv = self.build(fshape, fname if fname != JSON_NAME else None)
            body = DynOp(
                OpKind.CONV_FIELD,
                names=(s.name, fname),
                args=(Var(param), fconv),
                note=f"{cname}.{fname}",
            )
            members.append(MemberDef(fname, fty, body))
            originals[fname] = fname
        self._register(ClassDef(cname, ((param, DATA_T),), tuple(members)), originals)
        return ClassTy(cname), self._ctor(cname)

    def _build_collection(self, s: Collection, hint: str | None) -> tuple[FooType, FooExpr]:
        if not s.items:
            ity, iconv = self._build_opaque(None)
            x = self.fresh_var()
            return ListTy(ity), Lambda(x, DATA_T, DynOp(OpKind.CONV_ELEMENTS, args=(Var(x), iconv)))
        if len(s.items) == 1 and s.items[0][1] is Mult.MANY:
            entry, _ = s.items[0]
            if isinstance(entry, Record) and entry.name != JSON_NAME:
                item_hint = None  # named records keep their own name
            else:
                item_hint = hint or "Item"
            ity, iconv = self.build(entry, item_hint)
            x = self.fresh_var()
            # filter by the element shape: stray nulls and foreign elements
            # are invisible, matching their treatment during inference
            body = DynOp(OpKind.CONV_ELEMENTS, shape=entry, args=(Var(x), iconv))
            return ListTy(ity), Lambda(x, DATA_T, body)
        cname = self.namer.fresh(hint)
        param = self.fresh_var()
        members = [self._raw_member(param)]
        originals = {}
        for entry, mult in s.items:
            token = _member_token(entry)
            ety, econv = self.build(entry, _entry_hint(entry, token))
            filtered = DynOp(
                OpKind.CONV_ELEMENTS,
                shape=entry,
                args=(Var(param), econv),
                note=f"{cname}.{token}",
            )
            if mult is Mult.MANY:
                members.append(MemberDef(token, ListTy(ety), filtered))
            elif mult is Mult.OPT:
                y = self.fresh_var()
                body = MatchList(filtered, y, self.fresh_var(), SomeOf(Var(y)), NoneLit(ety))
                members.append(MemberDef(token, OptionTy(ety), body))
            else:
                y = self.fresh_var()
                missing = DynOp(
                    OpKind.CONV_FIELD,
                    names=(token, token),
                    args=(DataLit(NULL_VALUE), econv),
                    note=f"{cname}.{token}: required element missing",
                )
                members.append(MemberDef(token, ety, MatchList(filtered, y, self.fresh_var(), Var(y), missing)))
            originals[token] = token
        self._register(ClassDef(cname, ((param, DATA_T),), tuple(members)), originals)
        return ClassTy(cname), self._ctor(cname)

    def _build_any(self, s: AnyShape, hint: str | None) -> tuple[FooType, FooExpr]:
        cname = self.namer.fresh(hint)
        param = self.fresh_var()
        members = [self._raw_member(param)]
        originals = {}
        for label in s.labels:
            token = _member_token(label)
            lty, lconv = self.build(label, _entry_hint(label, token))
            body = If(
                DynOp(OpKind.HAS_SHAPE, shape=label, args=(Var(param),), note=f"{cname}.{token}"),
                SomeOf(Apply(lconv, Var(param))),
                NoneLit(lty),
            )
            members.append(MemberDef(token, OptionTy(lty), body))
            originals[token] = token
        self._register(ClassDef(cname, ((param, DATA_T),), tuple(members)), originals)
        return ClassTy(cname), self._ctor(cname)


def _root_hint(s: Shape) -> str | None:
    if isinstance(s, Record):
        return s.name if s.name != JSON_NAME else "Root"
    if isinstance(s, Collection):
        hetero = s.items and not (len(s.items) == 1 and s.items[0][1] is Mult.MANY)
        return "Root" if hetero else None
    if isinstance(s, AnyShape):
        return "Root"
    return None


def provide(s: Shape) -> Provided:
    """Generate the provided type, converter, and classes for a shape."""
    builder = _Builder()
    root_ty, conv = builder.build(s, _root_hint(s))
    return Provided(root_ty, conv, builder.classes, builder.name_map)


# --- normalization of the published member surface ---


def _replace_new(e: FooExpr, cls: str, make) -> FooExpr:
    """Replace every construction ``new cls(arg)`` by ``make(arg)``."""
    if isinstance(e, New) and e.cls == cls:
        return make(_replace_new(e.args[0], cls, make))
    if isinstance(e, (DataLit, Var, NoneLit, NilLit)):
        return e
    if isinstance(e, Lambda):
        return Lambda(e.param, e.param_ty, _replace_new(e.body, cls, make))
    if isinstance(e, Apply):
        return Apply(_replace_new(e.fn, cls, make), _replace_new(e.arg, cls, make))
    if isinstance(e, MemberAccess):
        return MemberAccess(_replace_new(e.obj, cls, make), e.name)
    if isinstance(e, New):
        return New(e.cls, tuple(_replace_new(a, cls, make) for a in e.args))
    if isinstance(e, SomeOf):
        return SomeOf(_replace_new(e.inner, cls, make))
    if isinstance(e, MatchOption):
        return MatchOption(
            _replace_new(e.scrutinee, cls, make),
            e.var,
            _replace_new(e.some_body, cls, make),
            _replace_new(e.none_body, cls, make),
        )
    if isinstance(e, Cons):
        return Cons(_replace_new(e.head, cls, make), _replace_new(e.tail, cls, make))
    if isinstance(e, MatchList):
        return MatchList(
            _replace_new(e.scrutinee, cls, make),
            e.head_var,
            e.tail_var,
            _replace_new(e.cons_body, cls, make),
            _replace_new(e.nil_body, cls, make),
        )
    if isinstance(e, Eq):
        return Eq(_replace_new(e.left, cls, make), _replace_new(e.right, cls, make))
    if isinstance(e, If):
        return If(
            _replace_new(e.cond, cls, make),
            _replace_new(e.then, cls, make),
            _replace_new(e.els, cls, make),
        )
    if isinstance(e, DynOp):
        return DynOp(e.kind, e.shape, e.names, tuple(_replace_new(a, cls, make) for a in e.args), e.note)
    if isinstance(e, IntCoerce):
        return IntCoerce(_replace_new(e.inner, cls, make))
    return e


def _replace_class_ty(t: FooType, cls: str, new_ty: FooType) -> FooType:
    if isinstance(t, ClassTy) and t.name == cls:
        return new_ty
    if isinstance(t, ListTy):
        return ListTy(_replace_class_ty(t.item, cls, new_ty))
    if isinstance(t, OptionTy):
        return OptionTy(_replace_class_ty(t.item, cls, new_ty))
    if isinstance(t, Arrow):
        return Arrow(_replace_class_ty(t.arg, cls, new_ty), _replace_class_ty(t.res, cls, new_ty))
    return t


@dataclass
class _MutMember:
    name: str
    ty: FooType
    body: FooExpr
    original: str
    synthetic: bool = False


@dataclass
class _MutClass:
    name: str
    param: str
    members: list[_MutMember]


def _to_mutable(p: Provided) -> dict[str, _MutClass]:
    out = {}
    for cname, cdef in p.classes.items():
        originals = p.name_map.get(cname, {})
        members = [
            _MutMember(m.name, m.ty, m.body, originals.get(m.name, m.name), m.synthetic)
            for m in cdef.members
        ]
        out[cname] = _MutClass(cname, cdef.params[0][0], members)
    return out


def _lift_body_members(classes: dict[str, _MutClass]) -> bool:
    """Hoist the members of a class-typed ``•`` member into its parent."""
    for mc in classes.values():
        for i, m in enumerate(mc.members):
            if m.synthetic or m.name != JSON_NAME or not isinstance(m.ty, ClassTy):
                continue
            inner = classes.get(m.ty.name)
            if inner is None or not any(not im.synthetic for im in inner.members):
                continue
            body = m.body
            # the member reads the • field and wraps it: compose each inner
            # member through the same field access instead
            if not (
                isinstance(body, DynOp)
                and body.kind is OpKind.CONV_FIELD
                and isinstance(body.args[1], Lambda)
                and isinstance(body.args[1].body, New)
                and body.args[1].body.cls == inner.name
            ):
                continue
            conv = body.args[1]
            lifted = []
            for im in inner.members:
                if im.synthetic:
                    continue
                inner_body = substitute(im.body, {inner.param: Var(conv.param)})
                new_body = DynOp(
                    body.kind,
                    body.shape,
                    body.names,
                    (body.args[0], Lambda(conv.param, conv.param_ty, inner_body)),
                    body.note,
                )
                lifted.append(_MutMember(im.name, im.ty, new_body, im.original, im.synthetic))
            mc.members[i : i + 1] = lifted
            return True
    return False


def _collapse_single_body_classes(classes, root_type, converter):
    """A class whose only member is ``•`` stands for that member's value;
    replace the class by the member type everywhere."""
    for cname, mc in list(classes.items()):
        data_members = [m for m in mc.members if not m.synthetic]
        if len(data_members) != 1 or data_members[0].name != JSON_NAME:
            continue
        if isinstance(root_type, ClassTy) and root_type.name == cname:
            continue
        inner = data_members[0]

        def make(arg, _body=inner.body, _param=mc.param):
            return substitute(_body, {_param: arg})

        for other in classes.values():
            if other.name == cname:
                continue
            for m in other.members:
                m.body = _replace_new(m.body, cname, make)
                m.ty = _replace_class_ty(m.ty, cname, inner.ty)
        converter = _replace_new(converter, cname, make)
        root_type = _replace_class_ty(root_type, cname, inner.ty)
        del classes[cname]
        return True, root_type, converter
    return False, root_type, converter


def _collect_news(e: FooExpr, acc: set[str]):
    if isinstance(e, New):
        acc.add(e.cls)
        for a in e.args:
            _collect_news(a, acc)
        return
    if isinstance(e, Lambda):
        _collect_news(e.body, acc)
    elif isinstance(e, Apply):
        _collect_news(e.fn, acc)
        _collect_news(e.arg, acc)
    elif isinstance(e, MemberAccess):
        _collect_news(e.obj, acc)
    elif isinstance(e, SomeOf):
        _collect_news(e.inner, acc)
    elif isinstance(e, MatchOption):
        for sub in (e.scrutinee, e.some_body, e.none_body):
            _collect_news(sub, acc)
    elif isinstance(e, Cons):
        _collect_news(e.head, acc)
        _collect_news(e.tail, acc)
    elif isinstance(e, MatchList):
        for sub in (e.scrutinee, e.cons_body, e.nil_body):
            _collect_news(sub, acc)
    elif isinstance(e, Eq):
        _collect_news(e.left, acc)
        _collect_news(e.right, acc)
    elif isinstance(e, If):
        for sub in (e.cond, e.then, e.els):
            _collect_news(sub, acc)
    elif isinstance(e, DynOp):
        for a in e.args:
            _collect_news(a, acc)
    elif isinstance(e, IntCoerce):
        _collect_news(e.inner, acc)


def _collect_types(t: FooType, acc: set[str]):
    if isinstance(t, ClassTy):
        acc.add(t.name)
    elif isinstance(t, (ListTy, OptionTy)):
        _collect_types(t.item, acc)
    elif isinstance(t, Arrow):
        _collect_types(t.arg, acc)
        _collect_types(t.res, acc)


def _referenced_classes(classes, root_type, converter) -> set[str]:
    frontier: set[str] = set()
    _collect_types(root_type, frontier)
    _collect_news(converter, frontier)
    keep: set[str] = set()
    while frontier:
        name = frontier.pop()
        if name in keep or name not in classes:
            continue
        keep.add(name)
        for m in classes[name].members:
            _collect_types(m.ty, frontier)
            _collect_news(m.body, frontier)
    return keep


def _unique(base: str, taken: set[str]) -> str:
    name = base
    n = 1
    while name in taken:
        n += 1
        name = f"{base}{n}"
    taken.add(name)
    return name


def normalize_names(p: Provided) -> Provided:
    """Produce the published member surface: lift ``•`` class members,
    collapse classes that are only a ``•`` wrapper, rename remaining ``•``
    members to Value, PascalCase everything and number collisions."""
    classes = _to_mutable(p)
    root_type, converter = p.root_type, p.converter
    for _ in range(4 * len(classes) + 8):
        if _lift_body_members(classes):
            continue
        collapsed, root_type, converter = _collapse_single_body_classes(classes, root_type, converter)
        if not collapsed:
            break
    for mc in classes.values():
        taken: set[str] = set()
        for m in mc.members:
            if m.synthetic:
                m.name = _unique(m.name, taken)
                continue
            base = "Value" if m.name == JSON_NAME else pascal_case(m.name)
            m.name = _unique(base or "Member", taken)
    keep = _referenced_classes(classes, root_type, converter)
    final_classes: dict[str, ClassDef] = {}
    name_map: dict[str, dict[str, str]] = {}
    for cname, mc in classes.items():
        if cname not in keep:
            continue
        members = tuple(MemberDef(m.name, m.ty, m.body, m.synthetic) for m in mc.members)
        final_classes[cname] = ClassDef(cname, ((mc.param, DATA_T),), members)
        name_map[cname] = {m.name: m.original for m in mc.members if not m.synthetic}
    return Provided(root_type, converter, final_classes, name_map)


# --- rendering ---


def _reachable_order(p: Provided) -> list[str]:
    order: list[str] = []

    def visit_type(t: FooType):
        if isinstance(t, ClassTy) and t.name in p.classes and t.name not in order:
            order.append(t.name)
            for m in p.classes[t.name].members:
                if not m.synthetic:
                    visit_type(m.ty)
        elif isinstance(t, (ListTy, OptionTy)):
            visit_type(t.item)
        elif isinstance(t, Arrow):
            visit_type(t.arg)
            visit_type(t.res)

    visit_type(p.root_type)
    return order


def render_signatures(p: Provided) -> str:
    """Listing of the provided types, one class per line."""
    lines = []
    for cname in _reachable_order(p):
        cdef = p.classes[cname]
        data = [m for m in cdef.members if not m.synthetic]
        if not data:
            lines.append(f"type {cname} = (opaque)")
        else:
            sig = ", ".join(f"member {m.name} : {type_text(m.ty)}" for m in data)
            lines.append(f"type {cname} = {sig}")
    if not lines:
        return f"(root type: {type_text(p.root_type)})"
    return "\n".join(lines)


def render_classes(p: Provided) -> str:
    """The full class set in surface syntax, accessor bodies included."""
    blocks = [class_text(p.classes[c]) for c in sorted(p.classes)]
    return "\n\n".join(blocks)
