import pytest
from hypothesis import given, settings, strategies as st

from shapekit.data_model import (
    BoolVal,
    DataError,
    FloatVal,
    IntVal,
    ListVal,
    NULL,
    NullVal,
    RecordVal,
    StringVal,
    canonical_text,
    data_equal,
    read_canonical,
)


def rec(name, **fields):
    return RecordVal(name, tuple(fields.items()))


def test_record_equality_ignores_field_order():
    a = RecordVal("•", (("x", IntVal(1)), ("y", IntVal(2))))
    b = RecordVal("•", (("y", IntVal(2)), ("x", IntVal(1))))
    assert data_equal(a, b)
    assert hash(a) == hash(b)


def test_int_and_float_are_distinct():
    assert not data_equal(IntVal(5), FloatVal(5.0))


def test_lists_are_ordered():
    assert not data_equal(ListVal((IntVal(1), IntVal(2))), ListVal((IntVal(2), IntVal(1))))


def test_bools_are_not_ints():
    assert not data_equal(BoolVal(True), IntVal(1))
    with pytest.raises(DataError):
        IntVal(True)


def test_nan_rejected():
    with pytest.raises(DataError):
        FloatVal(float("nan"))


def test_int_range_enforced():
    with pytest.raises(DataError):
        IntVal(2**63)


def test_duplicate_fields_rejected():
    with pytest.raises(DataError):
        RecordVal("•", (("x", IntVal(1)), ("x", IntVal(2))))


def test_canonical_null_and_empty_list():
    assert canonical_text(NULL) == "null"
    assert canonical_text(ListVal(())) == "[]"


def test_canonical_xml_root_example():
    value = rec(
        "root",
        id=IntVal(1),
        **{"•": ListVal((rec("item", **{"•": StringVal("Hello!")}),))},
    )
    assert canonical_text(value) == 'root { id ↦ 1, • ↦ [item { • ↦ "Hello!" }] }'


def test_canonical_sorts_fields():
    value = RecordVal("•", (("b", IntVal(2)), ("a", IntVal(1))))
    assert canonical_text(value) == "• { a ↦ 1, b ↦ 2 }"


def test_reader_handles_quoted_names():
    value = RecordVal("a b", (("weird name", StringVal("x")),))
    assert read_canonical(canonical_text(value)) == value


def test_reader_record_named_like_keyword():
    value = RecordVal("null", ())
    assert read_canonical(canonical_text(value)) == value


# random generation for the round-trip and equivalence properties

names = st.text(alphabet="abxyz_• ", min_size=1, max_size=6).filter(lambda s: s.strip())


def data_values(depth=3):
    base = st.one_of(
        st.integers(min_value=-(2**63), max_value=2**63 - 1).map(IntVal),
        st.floats(allow_nan=False, allow_infinity=False).map(FloatVal),
        st.text(max_size=8).map(StringVal),
        st.booleans().map(BoolVal),
        st.just(NULL),
    )
    return st.recursive(
        base,
        lambda children: st.one_of(
            st.lists(children, max_size=3).map(lambda xs: ListVal(tuple(xs))),
            st.dictionaries(names, children, max_size=3).map(
                lambda d: RecordVal("•", tuple(d.items()))
            ),
        ),
        max_leaves=8,
    )


@given(data_values())
@settings(max_examples=200)
def test_canonical_round_trip(value):
    assert read_canonical(canonical_text(value)) == value


@given(data_values(), data_values())
@settings(max_examples=100)
def test_data_equal_symmetric(a, b):
    assert data_equal(a, a)
    assert data_equal(a, b) == data_equal(b, a)
