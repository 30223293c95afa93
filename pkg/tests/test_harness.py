import random
from pathlib import Path

import pytest

from shapekit.data_model import (
    FloatVal,
    IntVal,
    ListVal,
    NULL,
    RecordVal,
    StringVal,
)
from shapekit.inference import InferenceConfig, infer_many, infer_one
from shapekit.ingest import parse_json, parse_xml
from shapekit.shapes import (
    ANY,
    BIT,
    BOOL,
    BOT,
    FLOAT,
    INT,
    TEXT,
    Nullable,
    collection_of,
    is_preferred,
)
from shapekit.harness import (
    PremiseViolated,
    RewriteNotFound,
    StabilityRewrite,
    check_relative_safety,
    check_stability,
    enumerate_erased_universe,
    generate_subshape_input,
    lub_oracle,
    random_samples,
    run_lub_suite,
    run_preservation_suite,
    run_safety_suite,
    run_stability_suite,
)

FIXTURES = Path(__file__).parent / "fixtures"


def drec(_name="•", **fields):
    return RecordVal(_name, tuple(fields.items()))


# --- the least-upper-bound oracle ---

def test_lub_oracle_primitives():
    universe = [BIT, INT, FLOAT, BOOL, TEXT, ANY, BOT]
    assert lub_oracle(INT, FLOAT, universe) == (FLOAT,)
    assert lub_oracle(TEXT, BOOL, universe) == (ANY,)
    assert lub_oracle(BIT, FLOAT, universe) == (FLOAT,)


def test_lub_oracle_bot_identity():
    universe = enumerate_erased_universe()[:40]
    for s in universe:
        least = lub_oracle(BOT, s, universe)
        assert least, s
        assert any(is_preferred(c, s) and is_preferred(s, c) for c in least)


def test_lub_oracle_no_bound_on_gapped_universe():
    # a universe without any upper bound for the pair
    universe = [INT, TEXT]
    assert lub_oracle(INT, TEXT, universe) == ()


def test_universe_size_and_contents():
    universe = enumerate_erased_universe()
    assert len(universe) == len({repr(s) for s in universe})
    assert 400 < len(universe) < 2000


def test_lub_suite_small_smoke():
    # full run happens in acceptance; here just assert the machinery works
    result = run_lub_suite()
    assert result.trials == len(enumerate_erased_universe()) ** 2
    assert result.passed, result.failures[:3]


# --- relative safety ---

def test_safety_people_field_drop():
    samples = list(parse_json((FIXTURES / "people.json").read_text()).items)
    verdict = check_relative_safety(samples, drec(name=StringVal("Eva")))
    assert verdict.safe


def test_safety_premise_violated():
    samples = list(parse_json((FIXTURES / "people.json").read_text()).items)
    with pytest.raises(PremiseViolated):
        check_relative_safety(samples, drec(name=IntVal(1)))


def test_safety_open_world_xml():
    doc = parse_xml((FIXTURES / "doc.xml").read_text())
    table_doc = parse_xml((FIXTURES / "doc_with_table.xml").read_text())
    cfg = InferenceConfig(hetero_collections=False)
    verdict = check_relative_safety([doc], table_doc, cfg)
    assert verdict.safe


def test_generate_subshape_input_always_satisfies_premise():
    rng = random.Random(77)
    for t in range(150):
        samples = random_samples(rng)
        shape = infer_many(samples)
        value = generate_subshape_input(samples, seed=1000 + t)
        assert is_preferred(infer_one(value), shape)


def test_generate_subshape_input_deterministic():
    samples = list(parse_json((FIXTURES / "people.json").read_text()).items)
    a = generate_subshape_input(samples, seed=5)
    b = generate_subshape_input(samples, seed=5)
    assert a == b


def test_safety_suite_smoke():
    result = run_safety_suite(trials=60, seed=3)
    assert result.passed, result.failures[:3]


# --- preservation / progress ---

def test_preservation_suite_smoke():
    result = run_preservation_suite(trials=150, seed=2)
    assert result.passed, result.failures[:3]


# --- stability ---

def test_stability_field_becomes_optional():
    samples = [drec(x=IntVal(1))]
    verdict = check_stability(samples, drec(), ("X",), drec(x=IntVal(1)))
    assert verdict.stable
    assert StabilityRewrite.WRAP_OPTION_MATCH in verdict.rewrites
    assert verdict.new_value == IntVal(1)


def test_stability_int_becomes_float():
    samples = [drec(x=IntVal(1))]
    verdict = check_stability(samples, drec(x=FloatVal(2.5)), ("X",), drec(x=IntVal(1)))
    assert verdict.stable
    assert StabilityRewrite.COERCE_INT_OF_FLOAT in verdict.rewrites
    assert verdict.new_value == IntVal(1)


def test_stability_field_becomes_labelled_top():
    samples = [drec(x=IntVal(1))]
    verdict = check_stability(samples, drec(x=StringVal("s")), ("X",), drec(x=IntVal(1)))
    assert verdict.stable
    assert any(r.startswith(StabilityRewrite.PROJECT_ANY_LABEL) for r in verdict.rewrites)
    assert verdict.new_value == IntVal(1)


def test_stability_suite_smoke():
    result = run_stability_suite(trials=60, seed=4)
    assert result.passed, result.failures[:3]
