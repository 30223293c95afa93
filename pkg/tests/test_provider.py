import random
from pathlib import Path

from shapekit.data_model import IntVal, ListVal, RecordVal, StringVal
from shapekit.shapes import (
    ANY,
    BIT,
    BOOL,
    BOT,
    FLOAT,
    INT,
    NULL,
    TEXT,
    Any,
    Collection,
    Mult,
    Nullable,
    Record,
    collection_of,
)
from shapekit.calculus import (
    Apply,
    Arrow,
    ClassTy,
    DATA_T,
    DataLit,
    DynOp,
    ListTy,
    MemberAccess,
    OpKind,
    OptionTy,
    Value,
    check_classes,
    evaluate,
    typecheck,
    value_to_expr,
)
from shapekit.inference import InferenceConfig, infer_many, infer_one
from shapekit.ingest import parse_json, parse_xml
from shapekit.provider import (
    ClassNamer,
    normalize_names,
    pascal_case,
    provide,
    render_classes,
    render_signatures,
)

FIXTURES = Path(__file__).parent / "fixtures"


def rec(_name="•", **fields):
    return Record(_name, tuple(fields.items()))


def drec(_name="•", **fields):
    return RecordVal(_name, tuple(fields.items()))


# --- naming ---

def test_pascal_case():
    assert pascal_case("temp_min") == "TempMin"
    assert pascal_case("name") == "Name"
    assert pascal_case("a b") == "AB"
    assert pascal_case("a_b") == "AB"
    assert pascal_case("PascalCase2") == "PascalCase2"
    assert pascal_case("XMLFile") == "XMLFile"
    # idempotent on its own output
    for raw in ("temp_min", "AB2", "heading", "x1", "weird-name"):
        once = pascal_case(raw)
        assert pascal_case(once) == once


def test_class_namer():
    namer = ClassNamer()
    assert namer.fresh("person") == "Person"
    assert namer.fresh(None) == "C1"
    assert namer.fresh(None) == "C2"
    assert namer.fresh(None) == "C3"
    assert namer.fresh("person") == "Person2"


# --- the provider mapping itself ---

def test_provide_person_record():
    shape = rec("Person", Age=Nullable(INT), Name=TEXT)
    p = provide(shape)
    assert p.root_type == ClassTy("Person")
    assert typecheck(p.classes, {}, p.converter) == Arrow(DATA_T, p.root_type)
    person = p.classes["Person"]
    age = person.member("Age")
    assert age.ty == OptionTy(INT_T())
    assert isinstance(age.body, DynOp) and age.body.kind is OpKind.CONV_FIELD
    assert age.body.names == ("Person", "Age")
    inner = age.body.args[1].body
    assert isinstance(inner, DynOp) and inner.kind is OpKind.CONV_NULL
    name = person.member("Name")
    assert isinstance(name.body, DynOp) and name.body.kind is OpKind.CONV_FIELD
    # evaluation mirrors the worked example
    obj = evaluate(p.classes, Apply(p.converter, DataLit(drec("Person", Name=StringVal("Tomas")))))
    assert isinstance(obj, Value)
    out = evaluate(p.classes, MemberAccess(value_to_expr(obj.value), "Name"))
    assert out == Value(StringVal("Tomas"))
    out = evaluate(p.classes, MemberAccess(value_to_expr(obj.value), "Age"))
    assert out.value.__class__.__name__ == "NoneV"


def INT_T():
    from shapekit.calculus import INT_T as t

    return t


def test_provide_collection_of_labelled_top():
    shape = collection_of(Any((rec("Person", Name=TEXT), TEXT)))
    p = provide(shape)
    assert isinstance(p.root_type, ListTy)
    item_cls = p.classes[p.root_type.item.name]
    names = [m.name for m in item_cls.members if not m.synthetic]
    assert names == ["Person", "String"]
    for m in item_cls.members:
        if m.synthetic:
            continue
        assert isinstance(m.ty, OptionTy)
    check_classes(p.classes)


def test_provide_bot_is_opaque():
    p = provide(BOT)
    assert render_signatures(p) == "type C1 = (opaque)"


def test_provide_worldbank_shape():
    doc = parse_json((FIXTURES / "worldbank.json").read_text())
    shape = infer_many([doc])
    p = normalize_names(provide(shape))
    sigs = render_signatures(p)
    assert "member Record : Record" in sigs
    assert "member Array : list<Item>" in sigs
    assert "member Date : int" in sigs
    assert "member Indicator : string" in sigs
    assert "member Value : option<float>" in sigs
    check_classes(p.classes)


def test_provide_bit_as_bool():
    p = provide(rec(flag=BIT))
    member = p.classes[p.root_type.name].member("flag")
    from shapekit.calculus import BOOL_T

    assert member.ty == BOOL_T


# --- normalization ---

def test_normalize_xml_root_example():
    doc = parse_xml((FIXTURES / "root.xml").read_text())
    shape = infer_one(doc)
    p = normalize_names(provide(shape))
    assert render_signatures(p) == "type Root = member Id : int, member Item : string"
    obj = evaluate(p.classes, Apply(p.converter, DataLit(doc)))
    item = evaluate(p.classes, MemberAccess(value_to_expr(obj.value), "Item"))
    assert item == Value(StringVal("Hello!"))
    ident = evaluate(p.classes, MemberAccess(value_to_expr(obj.value), "Id"))
    assert ident == Value(IntVal(1))


def test_normalize_value_member():
    doc = parse_xml("<point x=\"1\">7</point>")
    p = normalize_names(provide(infer_one(doc)))
    sigs = render_signatures(p)
    assert "member Value : int" in sigs
    assert "member X : int" in sigs


def test_normalize_collision_numbering():
    shape = rec(**{"a b": INT, "a_b": TEXT})
    p = normalize_names(provide(shape))
    cls = p.classes[p.root_type.name]
    names = [m.name for m in cls.members if not m.synthetic]
    assert names == ["AB", "AB2"]
    assert p.name_map[cls.name]["AB"] == "a b"
    assert p.name_map[cls.name]["AB2"] == "a_b"


def test_normalize_temp_min():
    shape = rec(temp_min=INT)
    p = normalize_names(provide(shape))
    cls = p.classes[p.root_type.name]
    assert cls.member("TempMin") is not None
    assert p.name_map[cls.name]["TempMin"] == "temp_min"


def test_normalize_idempotent():
    doc = parse_xml((FIXTURES / "doc.xml").read_text())
    p = normalize_names(provide(infer_many([doc])))
    again = normalize_names(p)
    assert render_signatures(again) == render_signatures(p)
    assert set(again.classes) == set(p.classes)


def test_name_map_injective_per_class():
    doc = parse_json((FIXTURES / "weather.json").read_text())
    p = normalize_names(provide(infer_many([doc])))
    for cname, mapping in p.name_map.items():
        values = list(mapping.values())
        assert len(values) == len(set(values)), cname


def test_normalized_classes_still_typecheck():
    for fixture in ("weather.json", "worldbank.json", "people.json"):
        doc = parse_json((FIXTURES / fixture).read_text())
        p = normalize_names(provide(infer_many([doc])))
        assert typecheck(p.classes, {}, p.converter) == Arrow(DATA_T, p.root_type)
        check_classes(p.classes)


def test_converter_type_invariant_randomized():
    from shapekit.harness import random_samples

    rng = random.Random(21)
    for _ in range(60):
        samples = random_samples(rng)
        p = normalize_names(provide(infer_many(samples)))
        assert typecheck(p.classes, {}, p.converter) == Arrow(DATA_T, p.root_type)
        check_classes(p.classes)


def test_self_application_never_stuck():
    # every sample used for inference evaluates cleanly through its own
    # provided type, members included
    from shapekit.harness import check_relative_safety, random_samples

    rng = random.Random(31)
    for _ in range(80):
        samples = random_samples(rng)
        for d in samples:
            verdict = check_relative_safety(samples, d)
            assert verdict.safe, (samples, d, verdict.stuck)


def test_render_signatures_people():
    doc = parse_json((FIXTURES / "people.json").read_text())
    p = normalize_names(provide(infer_many([doc])))
    sigs = render_signatures(p)
    assert "member Age : option<float>" in sigs
    assert "member Name : string" in sigs


def test_render_classes_surface_syntax():
    p = normalize_names(provide(rec("Person", Age=Nullable(INT), Name=TEXT)))
    listing = render_classes(p)
    assert "type Person(" in listing
    assert "convField(Person, Age" in listing
    assert "convNull(" in listing
    assert "convPrim(int" in listing
