from pathlib import Path

import pytest

from shapekit.data_model import (
    BoolVal,
    FloatVal,
    IntVal,
    ListVal,
    NULL,
    RecordVal,
    StringVal,
    canonical_text,
    read_canonical,
)
from shapekit.ingest import (
    EmptyInput,
    IngestConfig,
    MalformedDocument,
    SourceFormat,
    UnrepresentableNumber,
    infer_primitive_text,
    parse_csv,
    parse_json,
    parse_xml,
)

FIXTURES = Path(__file__).parent / "fixtures"


def rec(_name="•", **fields):
    return RecordVal(_name, tuple(fields.items()))


# --- JSON ---

def test_parse_json_object():
    value = parse_json('{"name":"Jan","age":25}')
    assert value == rec(name=StringVal("Jan"), age=IntVal(25))


def test_parse_json_number_kinds():
    assert parse_json("3.5") == FloatVal(3.5)
    assert parse_json("25") == IntVal(25)
    assert parse_json("1e3") == FloatVal(1000.0)


def test_parse_json_empty_array():
    assert parse_json("[]") == ListVal(())


def test_parse_json_atoms():
    assert parse_json("null") == NULL
    assert parse_json("true") == BoolVal(True)


def test_parse_json_strings_stay_raw():
    assert parse_json('"35.14229"') == StringVal("35.14229")


def test_parse_json_overflow_to_float():
    v = parse_json(str(2**66))
    assert isinstance(v, FloatVal)


def test_parse_json_rejects_nan_literals():
    with pytest.raises(UnrepresentableNumber):
        parse_json("NaN")
    with pytest.raises(UnrepresentableNumber):
        parse_json("[1, Infinity]")
    with pytest.raises(UnrepresentableNumber):
        parse_json("1e999")


def test_parse_json_syntax_error_position():
    with pytest.raises(MalformedDocument) as e:
        parse_json('{"a": }')
    assert e.value.position is not None


def test_parse_json_duplicate_keys():
    with pytest.raises(MalformedDocument):
        parse_json('{"a":1, "a":2}')


# --- XML ---

def test_parse_xml_root_example():
    value = parse_xml("<root id=\"1\">\n  <item>Hello!</item>\n</root>")
    expected = rec(
        "root",
        id=IntVal(1),
        **{"•": ListVal((rec("item", **{"•": StringVal("Hello!")}),))},
    )
    assert value == expected
    assert canonical_text(value) == 'root { id ↦ 1, • ↦ [item { • ↦ "Hello!" }] }'


def test_parse_xml_attribute_only():
    assert parse_xml('<image source="xml.png" />') == rec("image", source=StringVal("xml.png"))


def test_parse_xml_empty_element():
    assert parse_xml("<a></a>") == rec("a")


def test_parse_xml_mixed_content_drops_text():
    value = parse_xml("<a>loose <b>kept</b> text</a>")
    assert value == rec("a", **{"•": ListVal((rec("b", **{"•": StringVal("kept")}),))})


def test_parse_xml_malformed():
    with pytest.raises(MalformedDocument):
        parse_xml("<a><b></a>")


def test_parse_xml_round_trips_through_canonical():
    text = (FIXTURES / "doc.xml").read_text()
    value = parse_xml(text)
    assert read_canonical(canonical_text(value)) == value


# --- CSV ---

def test_parse_csv_sample():
    value = parse_csv((FIXTURES / "air.csv").read_text())
    assert isinstance(value, ListVal) and len(value.items) == 4
    rows = value.items
    assert rows[0] == rec(
        Ozone=IntVal(41), Temp=IntVal(67), Date=StringVal("2012-05-01"), Autofilled=IntVal(0)
    )
    assert rows[1].field_map()["Ozone"] == FloatVal(36.3)
    assert rows[2].field_map()["Date"] == StringVal("3 kveten")
    assert rows[3].field_map()["Temp"] == NULL  # "#N/A" reads as missing


def test_parse_csv_header_only():
    assert parse_csv("a,b,c\n") == ListVal(())


def test_parse_csv_empty():
    with pytest.raises(EmptyInput):
        parse_csv("")


def test_parse_csv_ragged_row():
    with pytest.raises(MalformedDocument) as e:
        parse_csv("a,b\n1,2\n3\n")
    assert e.value.position == (3, 1)


def test_parse_csv_rows_share_field_names():
    value = parse_csv("a,b\n1,2\n3,4\n")
    names = [tuple(n for n, _ in row.fields) for row in value.items]
    assert names[0] == names[1] == ("a", "b")


# --- primitive text inference ---

def test_infer_primitive_text_missing_tokens():
    assert infer_primitive_text("#N/A") == NULL
    assert infer_primitive_text("") == NULL
    assert infer_primitive_text("NA") == NULL


def test_infer_primitive_text_numbers():
    assert infer_primitive_text("36.3") == FloatVal(36.3)
    assert infer_primitive_text("2012") == IntVal(2012)
    assert infer_primitive_text("1") == IntVal(1)  # bit shows up at shape level
    assert infer_primitive_text(str(2**70)) == FloatVal(float(2**70))


def test_infer_primitive_text_bools_and_dates():
    assert infer_primitive_text("true") == BoolVal(True)
    assert infer_primitive_text("FALSE") == BoolVal(False)
    assert infer_primitive_text("2012-05-01") == StringVal("2012-05-01")
    assert infer_primitive_text("3 kveten") == StringVal("3 kveten")


def test_infer_primitive_text_custom_missing():
    cfg = IngestConfig(missing_tokens=frozenset({"-"}))
    assert infer_primitive_text("-", cfg) == NULL
    assert infer_primitive_text("#N/A", cfg) == StringVal("#N/A")
