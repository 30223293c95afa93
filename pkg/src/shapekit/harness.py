"""Executable checks of the library's safety story.

Four randomized/exhaustive suites back the headline guarantees:

* lub          — the shape join equals a brute-force least-upper-bound scan
                 on an enumerated label-erased universe (every ordered pair);
* safety       — accessors generated from random samples never get stuck on
                 inputs whose inferred shape is preferred over the samples';
* preservation — random well-typed expressions keep their type at every
                 reduction step and finish within fuel;
* stability    — adding a sample never strands user code: a bounded rewrite
                 search (option unwrap, label projection, int coercion)
                 reproduces the old value.

Each trial derives its own seed, so any failure replays from the report.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

import numpy as np

from .data_model import (
    BoolVal,
    DataValue,
    FloatVal,
    IntVal,
    ListVal,
    NULL,
    NullVal,
    RecordVal,
    StringVal,
    canonical_text,
)
from .shapes import (
    ANY,
    BIT,
    BOOL,
    BOT,
    EMPTY_COLLECTION,
    FLOAT,
    INT,
    NULL as NULL_SHAPE,
    TEXT,
    Collection,
    Mult,
    Nullable,
    Record,
    Shape,
    collection_of,
    csh,
    erase_labels,
    is_preferred,
    normalize,
    notation,
)
from .inference import InferenceConfig, infer_many, infer_one
from .provider import Provided, normalize_names, pascal_case, provide
from .calculus import (
    Apply,
    BoolTy,
    ClassTy,
    Cons,
    DATA_T,
    DataLit,
    DataTy,
    EXN,
    ExnOutcome,
    FloatTy,
    FooList,
    INT_T,
    IntCoerce,
    IntTy,
    Lambda,
    ListTy,
    MatchList,
    MatchOption,
    MemberAccess,
    NilLit,
    NoneLit,
    NoneV,
    ObjV,
    OptionTy,
    SomeOf,
    SomeV,
    Stuck,
    StuckOutcome,
    TextTy,
    Value,
    Var,
    evaluate,
    is_value,
    reduce_step,
    typecheck,
    value_to_expr,
)


class PremiseViolated(Exception):
    """The input's inferred shape is not preferred over the samples'."""


class RewriteNotFound(Exception):
    """No bounded rewrite sequence reproduced the old probe value."""


class SubshapeMutation:
    DROP_OPTIONAL_FIELD = "DropOptionalField"
    ADD_EXTRA_FIELD = "AddExtraField"
    INT_WHERE_FLOAT = "IntWhereFloat"
    NULL_WHERE_NULLABLE = "NullWhereNullable"
    SWAP_ANY_LABEL_VALUE = "SwapAnyLabelValue"
    SHRINK_MANY_COLLECTION = "ShrinkManyCollection"

    ALL = (
        DROP_OPTIONAL_FIELD,
        ADD_EXTRA_FIELD,
        INT_WHERE_FLOAT,
        NULL_WHERE_NULLABLE,
        SWAP_ANY_LABEL_VALUE,
        SHRINK_MANY_COLLECTION,
    )


class StabilityRewrite:
    WRAP_OPTION_MATCH = "WrapOptionMatch"
    PROJECT_ANY_LABEL = "ProjectAnyLabel"
    COERCE_INT_OF_FLOAT = "CoerceIntOfFloat"


# --- least-upper-bound oracle ---


def lub_oracle(a: Shape, b: Shape, universe: Sequence[Shape]) -> tuple[Shape, ...]:
    """Brute-force scan for least upper bounds of ``a`` and ``b``.

    The preference relation is a preorder, so the least bound is unique only
    up to mutual preference; the full equivalence clique is returned, empty
    when no bound exists or the minimal bounds are not mutually preferred.
    """
    bounds = [c for c in universe if is_preferred(a, c) and is_preferred(b, c)]
    least = tuple(c for c in bounds if all(is_preferred(c, o) for o in bounds))
    return least


def enumerate_erased_universe() -> list[Shape]:
    """Ground, label-erased shapes: five primitives, records over two field
    names, their nullable wrappers, and homogeneous collections."""
    prims = [BIT, INT, FLOAT, BOOL, TEXT]
    base: list[Shape] = [BOT, NULL_SHAPE, ANY] + prims
    field_shapes: list[Shape] = base + [Nullable(p) for p in prims]
    records: list[Shape] = [Record("•", ())]
    records += [Record("•", (("x", s),)) for s in field_shapes]
    records += [Record("•", (("y", s),)) for s in field_shapes]
    records += [
        Record("•", (("x", sx), ("y", sy)))
        for sx in field_shapes
        for sy in field_shapes
    ]
    nullable_records = [Nullable(r) for r in records]
    coll_items: list[Shape] = prims + [ANY] + records
    collections: list[Shape] = [EMPTY_COLLECTION] + [collection_of(i) for i in coll_items]
    return base + [Nullable(p) for p in prims] + records + nullable_records + collections


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: list[dict] = dc_field(default_factory=list)
    duration_s: float = 0.0
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_obj(self) -> dict:
        return {
            "suite": self.name,
            "trials": self.trials,
            "failures": self.failures[:50],
            "failure_count": len(self.failures),
            "duration_s": round(self.duration_s, 3),
            "seed": self.seed,
            "passed": self.passed,
        }


def run_lub_suite(max_failures: int = 20) -> SuiteResult:
    """Exhaustively compare the join against the least-bound oracle on every
    ordered pair of the erased universe."""
    start = time.monotonic()
    universe = enumerate_erased_universe()
    n = len(universe)
    index = {normalize(s): i for i, s in enumerate(universe)}
    leq = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(universe):
        for j, b in enumerate(universe):
            leq[i, j] = is_preferred(a, b)
    failures: list[dict] = []
    for i, a in enumerate(universe):
        row_i = leq[i]
        for j, b in enumerate(universe):
            joined = normalize(erase_labels(csh(a, b)))
            k = index.get(joined)
            pair = {"a": notation(a), "b": notation(b), "csh": notation(joined)}
            if k is None:
                failures.append({**pair, "reason": "join left the universe"})
            else:
                bounds = row_i & leq[j]
                if not bounds[k]:
                    failures.append({**pair, "reason": "join is not an upper bound"})
                elif not np.all(leq[k] | ~bounds):
                    failures.append({**pair, "reason": "join is not least"})
            if len(failures) >= max_failures:
                return SuiteResult("lub", n * n, failures, time.monotonic() - start)
    return SuiteResult("lub", n * n, failures, time.monotonic() - start)


# --- relative-safety fuzzing ---


@dataclass
class SafetyVerdict:
    safe: bool
    stuck: Optional[Stuck] = None
    members_checked: int = 0


def _walk_all_members(classes, root_value) -> tuple[Optional[Stuck], int]:
    checked = 0
    stack = [root_value]
    while stack:
        v = stack.pop()
        if isinstance(v, ObjV):
            cdef = classes[v.cls]
            for m in cdef.members:
                out = evaluate(classes, MemberAccess(value_to_expr(v), m.name))
                if isinstance(out, StuckOutcome):
                    return out.stuck, checked
                checked += 1
                if not m.synthetic and isinstance(out, Value):
                    stack.append(out.value)
        elif isinstance(v, SomeV):
            stack.append(v.inner)
        elif isinstance(v, FooList):
            stack.extend(v.items)
    return None, checked


def check_relative_safety(
    samples: Sequence[DataValue],
    input_value: DataValue,
    cfg: InferenceConfig = InferenceConfig(),
) -> SafetyVerdict:
    """Build the provided type from the samples, run its converter on the
    input, and evaluate every member of every reachable object."""
    shape = infer_many(samples, cfg)
    in_shape = infer_one(input_value, cfg)
    if not is_preferred(in_shape, shape):
        raise PremiseViolated(
            f"{notation(in_shape)} is not preferred over {notation(shape)}"
        )
    p = normalize_names(provide(shape))
    out = evaluate(p.classes, Apply(p.converter, DataLit(input_value)))
    if isinstance(out, StuckOutcome):
        return SafetyVerdict(False, out.stuck)
    stuck, checked = _walk_all_members(p.classes, out.value)
    if stuck is not None:
        return SafetyVerdict(False, stuck, checked)
    return SafetyVerdict(True, None, checked)


# --- random data generation ---

_FIELD_NAMES = ("alpha", "beta", "gamma", "delta", "extra")
_STRINGS = ("hello", "world", "2012", "35.5", "x-1", "true")
_XML_NAMES = ("item", "row")


def _random_prim(rng: random.Random) -> DataValue:
    roll = rng.random()
    if roll < 0.3:
        return IntVal(rng.randint(-5, 99))
    if roll < 0.5:
        return FloatVal(round(rng.uniform(-3.0, 9.0), 3))
    if roll < 0.7:
        return StringVal(rng.choice(_STRINGS))
    if roll < 0.85:
        return BoolVal(rng.random() < 0.5)
    return NULL


def random_data(rng: random.Random, depth: int = 0) -> DataValue:
    if depth >= 3 or rng.random() < 0.35:
        return _random_prim(rng)
    if rng.random() < 0.6:
        name = "•" if rng.random() < 0.8 else rng.choice(_XML_NAMES)
        k = rng.randint(1, 3)
        names = rng.sample(_FIELD_NAMES, k)
        return RecordVal(name, tuple((n, random_data(rng, depth + 1)) for n in names))
    return ListVal(tuple(random_data(rng, depth + 1) for _ in range(rng.randint(0, 3))))


def _jitter(d: DataValue, rng: random.Random, depth: int = 0) -> DataValue:
    """A structural variation of a value: drops/adds fields, renumbers
    primitives, occasionally changes a node's kind entirely."""
    if rng.random() < 0.12:
        return random_data(rng, depth + 1)
    if isinstance(d, IntVal):
        return FloatVal(float(d.value) + 0.5) if rng.random() < 0.25 else IntVal(rng.randint(-5, 99))
    if isinstance(d, FloatVal):
        return FloatVal(round(rng.uniform(-3.0, 9.0), 3))
    if isinstance(d, StringVal):
        return StringVal(rng.choice(_STRINGS))
    if isinstance(d, BoolVal):
        return BoolVal(not d.value)
    if isinstance(d, NullVal):
        return NULL if rng.random() < 0.5 else _random_prim(rng)
    if isinstance(d, ListVal):
        items = [_jitter(x, rng, depth + 1) for x in d.items]
        if items and rng.random() < 0.3:
            items.pop(rng.randrange(len(items)))
        if rng.random() < 0.3:
            items.append(random_data(rng, depth + 1))
        return ListVal(tuple(items))
    if isinstance(d, RecordVal):
        fields = [(n, _jitter(v, rng, depth + 1)) for n, v in d.fields]
        if fields and rng.random() < 0.25:
            fields.pop(rng.randrange(len(fields)))
        if rng.random() < 0.25:
            pool = [n for n in _FIELD_NAMES if n not in {f for f, _ in fields}]
            if pool:
                fields.append((rng.choice(pool), _random_prim(rng)))
        if rng.random() < 0.2 and fields:
            i = rng.randrange(len(fields))
            fields[i] = (fields[i][0], NULL)
        return RecordVal(d.name, tuple(fields))
    return d


def random_samples(rng: random.Random) -> list[DataValue]:
    base = random_data(rng)
    return [base] + [_jitter(base, rng) for _ in range(rng.randint(0, 2))]


# --- premise-preserving input mutation ---


def _positions(d: DataValue, path=()):
    yield path, d
    if isinstance(d, ListVal):
        for i, x in enumerate(d.items):
            yield from _positions(x, path + (i,))
    elif isinstance(d, RecordVal):
        for n, v in d.fields:
            yield from _positions(v, path + (n,))


def _replace_at(d: DataValue, path, new: DataValue) -> DataValue:
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(d, ListVal):
        items = list(d.items)
        items[head] = _replace_at(items[head], rest, new)
        return ListVal(tuple(items))
    if isinstance(d, RecordVal):
        fields = [
            (n, _replace_at(v, rest, new) if n == head else v) for n, v in d.fields
        ]
        return RecordVal(d.name, tuple(fields))
    raise ValueError("bad path")


def _apply_mutation(d: DataValue, kind: str, rng: random.Random) -> Optional[DataValue]:
    nodes = list(_positions(d))
    if kind == SubshapeMutation.DROP_OPTIONAL_FIELD:
        recs = [(p, n) for p, n in nodes if isinstance(n, RecordVal) and n.fields]
        if not recs:
            return None
        path, rec = rng.choice(recs)
        i = rng.randrange(len(rec.fields))
        return _replace_at(d, path, RecordVal(rec.name, rec.fields[:i] + rec.fields[i + 1:]))
    if kind == SubshapeMutation.ADD_EXTRA_FIELD:
        recs = [(p, n) for p, n in nodes if isinstance(n, RecordVal)]
        if not recs:
            return None
        path, rec = rng.choice(recs)
        name = f"added{rng.randint(0, 999)}"
        if any(n == name for n, _ in rec.fields):
            return None
        return _replace_at(d, path, RecordVal(rec.name, rec.fields + ((name, _random_prim(rng)),)))
    if kind == SubshapeMutation.INT_WHERE_FLOAT:
        floats = [(p, n) for p, n in nodes if isinstance(n, FloatVal)]
        if not floats:
            return None
        path, f = rng.choice(floats)
        return _replace_at(d, path, IntVal(int(f.value)))
    if kind == SubshapeMutation.NULL_WHERE_NULLABLE:
        recs = [(p, n) for p, n in nodes if isinstance(n, RecordVal) and n.fields]
        if not recs:
            return None
        path, rec = rng.choice(recs)
        i = rng.randrange(len(rec.fields))
        fields = list(rec.fields)
        fields[i] = (fields[i][0], NULL)
        return _replace_at(d, path, RecordVal(rec.name, tuple(fields)))
    if kind == SubshapeMutation.SWAP_ANY_LABEL_VALUE:
        if not nodes:
            return None
        path, _ = rng.choice(nodes)
        return _replace_at(d, path, random_data(rng, depth=2))
    if kind == SubshapeMutation.SHRINK_MANY_COLLECTION:
        lists = [(p, n) for p, n in nodes if isinstance(n, ListVal) and n.items]
        if not lists:
            return None
        path, lst = rng.choice(lists)
        items = list(lst.items)
        items.pop(rng.randrange(len(items)))
        return _replace_at(d, path, ListVal(tuple(items)))
    return None


def generate_subshape_input(
    samples: Sequence[DataValue],
    seed: int,
    cfg: InferenceConfig = InferenceConfig(),
) -> DataValue:
    """Pick a sample and apply up to five random shape-preserving mutations;
    every intermediate is premise-checked, so the result provably satisfies
    the safety precondition."""
    rng = random.Random(seed)
    shape = infer_many(samples, cfg)
    current = rng.choice(list(samples))
    for _ in range(rng.randint(0, 5)):
        kind = rng.choice(SubshapeMutation.ALL)
        candidate = _apply_mutation(current, kind, rng)
        if candidate is None:
            continue
        if is_preferred(infer_one(candidate, cfg), shape):
            current = candidate
    assert is_preferred(infer_one(current, cfg), shape)
    return current


def run_safety_suite(trials: int = 1000, seed: int = 0) -> SuiteResult:
    start = time.monotonic()
    failures = []
    cfg = InferenceConfig()
    for t in range(trials):
        trial_seed = seed * 1_000_003 + t
        rng = random.Random(trial_seed)
        samples = random_samples(rng)
        input_value = generate_subshape_input(samples, trial_seed + 1, cfg)
        try:
            verdict = check_relative_safety(samples, input_value, cfg)
        except PremiseViolated as e:  # generator bug; report it
            failures.append({"seed": trial_seed, "reason": f"premise: {e}"})
            continue
        if not verdict.safe:
            failures.append(
                {
                    "seed": trial_seed,
                    "reason": verdict.stuck.describe(),
                    "samples": [canonical_text(s) for s in samples],
                    "input": canonical_text(input_value),
                }
            )
    return SuiteResult("safety", trials, failures, time.monotonic() - start, seed)


# --- preservation / progress fuzzing ---

def _default_expr(ty):
    if isinstance(ty, IntTy):
        return DataLit(IntVal(0))
    if isinstance(ty, FloatTy):
        return DataLit(FloatVal(0.0))
    if isinstance(ty, BoolTy):
        return DataLit(BoolVal(False))
    if isinstance(ty, TextTy):
        return DataLit(StringVal(""))
    if isinstance(ty, ListTy):
        return NilLit(ty.item)
    if isinstance(ty, OptionTy):
        return NoneLit(ty.item)
    return None


def _wrap_user_code(rng: random.Random, p: Provided, expr, ty, fresh):
    """Layer op-free user code over a provided expression."""
    for _ in range(rng.randint(0, 3)):
        if isinstance(ty, ClassTy):
            members = [m for m in p.classes[ty.name].members if not m.synthetic]
            if not members:
                break
            m = rng.choice(members)
            expr, ty = MemberAccess(expr, m.name), m.ty
        elif isinstance(ty, OptionTy):
            v = fresh()
            dflt = _default_expr(ty.item)
            if dflt is not None and rng.random() < 0.7:
                expr, ty = MatchOption(expr, v, Var(v), dflt), ty.item
            else:
                expr = MatchOption(expr, v, SomeOf(Var(v)), NoneLit(ty.item))
        elif isinstance(ty, ListTy):
            h, tl = fresh(), fresh()
            dflt = _default_expr(ty.item)
            if dflt is not None and rng.random() < 0.7:
                expr, ty = MatchList(expr, h, tl, Var(h), dflt), ty.item
            else:
                expr = MatchList(expr, h, tl, Cons(Var(h), Var(tl)), NilLit(ty.item))
        elif not isinstance(ty, DataTy):
            z = fresh()
            expr = Apply(Lambda(z, ty, Var(z)), expr)
        else:
            break
    return expr, ty


def run_preservation_suite(trials: int = 10000, seed: int = 0, fuel: int = 200_000) -> SuiteResult:
    """For random well-typed expressions: the synthesized type checks after
    every reduction step, and evaluation reaches a value within fuel."""
    start = time.monotonic()
    failures = []
    cfg = InferenceConfig()
    scenario = None
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"u{counter[0]}"

    for t in range(trials):
        trial_seed = seed * 7_000_003 + t
        rng = random.Random(trial_seed)
        if scenario is None or t % 10 == 0:
            samples = random_samples(rng)
            shape = infer_many(samples, cfg)
            p = normalize_names(provide(shape))
            scenario = (samples, p)
        samples, p = scenario
        input_value = generate_subshape_input(samples, trial_seed + 1, cfg)
        expr = Apply(p.converter, DataLit(input_value))
        expr, _ = _wrap_user_code(rng, p, expr, p.root_type, fresh)
        try:
            ty = typecheck(p.classes, {}, expr)
        except Exception as e:
            failures.append({"seed": trial_seed, "reason": f"generated ill-typed code: {e}"})
            continue
        steps = 0
        current = expr
        while not is_value(current):
            stepped = reduce_step(p.classes, current)
            if isinstance(stepped, Stuck):
                failures.append({"seed": trial_seed, "reason": stepped.describe()})
                break
            current = stepped
            steps += 1
            if steps > fuel:
                failures.append({"seed": trial_seed, "reason": "fuel exhausted"})
                break
            try:
                typecheck(p.classes, {}, current, expected=ty)
            except Exception as e:
                failures.append({"seed": trial_seed, "reason": f"type not preserved: {e}"})
                break
    return SuiteResult("preservation", trials, failures, time.monotonic() - start, seed)


# --- stability of inference под sample extension ---


@dataclass
class StabilityVerdict:
    stable: bool
    rewrites: tuple[str, ...] = ()
    old_value: object = None
    new_value: object = None


def _eval_probe_strict(p: Provided, probe: Sequence[str], d: DataValue):
    expr = Apply(p.converter, DataLit(d))
    ty = p.root_type
    for name in probe:
        if not isinstance(ty, ClassTy):
            raise ValueError(f"probe step {name} walks a non-class type")
        member = p.classes[ty.name].member(name)
        if member is None:
            raise ValueError(f"no member {name} on {ty.name}")
        expr, ty = MemberAccess(expr, name), member.ty
    out = evaluate(p.classes, expr)
    if not isinstance(out, Value):
        raise ValueError("probe did not evaluate to a value on the old type")
    return out.value, ty


def _adapt_states(p: Provided, expr, ty, rewrites, budget):
    """One-step adaptations of an expression toward a usable type."""
    if budget <= 0:
        return
    if isinstance(ty, OptionTy):
        v = f"s{len(rewrites)}_{id(expr) % 9973}"
        yield (
            MatchOption(expr, v, Var(v), EXN),
            ty.item,
            rewrites + (StabilityRewrite.WRAP_OPTION_MATCH,),
        )
    if isinstance(ty, ClassTy) and ty.name in p.classes:
        for m in p.classes[ty.name].members:
            if m.synthetic:
                continue
            yield (
                MemberAccess(expr, m.name),
                m.ty,
                rewrites + (f"{StabilityRewrite.PROJECT_ANY_LABEL}({m.name})",),
            )
    if isinstance(ty, FloatTy):
        yield (
            IntCoerce(expr),
            INT_T,
            rewrites + (StabilityRewrite.COERCE_INT_OF_FLOAT,),
        )


def check_stability(
    samples: Sequence[DataValue],
    new_sample: DataValue,
    probe: Sequence[str],
    input_value: DataValue,
    cfg: InferenceConfig = InferenceConfig(),
    max_rewrites: int = 4,
) -> StabilityVerdict:
    """Re-infer with the new sample and search for a rewrite of the probe
    that reproduces the old value on the same input."""
    p1 = normalize_names(provide(infer_many(samples, cfg)))
    old_value, old_ty = _eval_probe_strict(p1, probe, input_value)

    p2 = normalize_names(provide(infer_many(list(samples) + [new_sample], cfg)))
    start_expr = Apply(p2.converter, DataLit(input_value))
    frontier = [(start_expr, p2.root_type, ())]
    segments = list(probe)
    for step_i, name in enumerate(segments):
        next_frontier = []
        seen = set()
        queue = list(frontier)
        while queue:
            expr, ty, rewrites = queue.pop(0)
            if isinstance(ty, ClassTy) and ty.name in p2.classes:
                member = p2.classes[ty.name].member(name)
                if member is not None:
                    next_frontier.append((MemberAccess(expr, name), member.ty, rewrites))
            for state in _adapt_states(p2, expr, ty, rewrites, max_rewrites - len(rewrites)):
                key = (repr(state[1]), len(state[2]))
                if len(state[2]) <= max_rewrites and key not in seen:
                    seen.add(key)
                    queue.append(state)
        if not next_frontier:
            raise RewriteNotFound(f"no rewrite reaches member {name}")
        frontier = sorted(next_frontier, key=lambda s: len(s[2]))[:8]
    # final adaptation toward the old member type, then compare values
    candidates = list(frontier)
    tried = 0
    while candidates and tried < 64:
        expr, ty, rewrites = candidates.pop(0)
        tried += 1
        if ty == old_ty:
            out = evaluate(p2.classes, expr, stability=True)
            if isinstance(out, Value) and out.value == old_value:
                return StabilityVerdict(True, rewrites, old_value, out.value)
            if isinstance(out, Value):
                continue
        for state in _adapt_states(p2, expr, ty, rewrites, max_rewrites - len(rewrites)):
            candidates.append(state)
        candidates.sort(key=lambda s: len(s[2]))
    raise RewriteNotFound(
        f"no rewrite within {max_rewrites} reproduces {probe} : {old_ty}"
    )


def _stability_trial(rng: random.Random, cfg: InferenceConfig):
    """Samples sharing a flat record schema, a probe into one field, and a
    new sample that perturbs that field."""
    n_fields = rng.randint(1, 3)
    names = rng.sample(("pressure", "label", "count", "ratio"), n_fields)
    makers = {
        "int": lambda: IntVal(rng.randint(0, 40)),
        "float": lambda: FloatVal(round(rng.uniform(0, 9), 2)),
        "string": lambda: StringVal(rng.choice(("aa", "bb", "zz"))),
        "bool": lambda: BoolVal(rng.random() < 0.5),
    }
    kinds = {n: rng.choice(list(makers)) for n in names}
    def sample():
        return RecordVal("•", tuple((n, makers[kinds[n]]()) for n in names))
    samples = [sample() for _ in range(rng.randint(1, 2))]
    target = rng.choice(names)
    mode = rng.choice(("drop", "null", "widen", "retag"))
    if mode == "drop":
        new_fields = tuple((n, makers[kinds[n]]()) for n in names if n != target)
    elif mode == "null":
        new_fields = tuple(
            (n, NULL if n == target else makers[kinds[n]]()) for n in names
        )
    elif mode == "widen" and kinds[target] == "int":
        new_fields = tuple(
            (n, FloatVal(1.5) if n == target else makers[kinds[n]]()) for n in names
        )
    else:
        other = {"int": StringVal("zz"), "float": StringVal("zz"),
                 "string": IntVal(7), "bool": StringVal("zz")}[kinds[target]]
        new_fields = tuple(
            (n, other if n == target else makers[kinds[n]]()) for n in names
        )
    new_sample = RecordVal("•", new_fields)
    probe = (pascal_case(target),)
    return samples, new_sample, probe, samples[0]


def run_stability_suite(trials: int = 500, seed: int = 0) -> SuiteResult:
    start = time.monotonic()
    failures = []
    cfg = InferenceConfig()
    for t in range(trials):
        trial_seed = seed * 11_000_027 + t
        rng = random.Random(trial_seed)
        samples, new_sample, probe, input_value = _stability_trial(rng, cfg)
        try:
            verdict = check_stability(samples, new_sample, probe, input_value, cfg)
            if not verdict.stable:
                failures.append({"seed": trial_seed, "reason": "value changed"})
        except RewriteNotFound as e:
            failures.append({"seed": trial_seed, "reason": str(e)})
        except Exception as e:
            failures.append({"seed": trial_seed, "reason": f"error: {e}"})
    return SuiteResult("stability", trials, failures, time.monotonic() - start, seed)


ALL_SUITES = ("lub", "safety", "preservation", "stability")


def run_suites(
    suites: Iterable[str] = ALL_SUITES,
    seed: int = 0,
    safety_trials: int = 1000,
    preservation_trials: int = 10000,
    stability_trials: int = 500,
) -> list[SuiteResult]:
    results = []
    for s in suites:
        if s == "lub":
            results.append(run_lub_suite())
        elif s == "safety":
            results.append(run_safety_suite(safety_trials, seed))
        elif s == "preservation":
            results.append(run_preservation_suite(preservation_trials, seed))
        elif s == "stability":
            results.append(run_stability_suite(stability_trials, seed))
        else:
            raise ValueError(f"unknown suite {s!r}")
    return results
