"""Command-line front end: infer, codegen, validate, eval, check.

Exit codes: 0 success, 1 domain failure (not a subshape, a failing suite,
a stuck access), 2 I/O or parse errors.
"""

from __future__ import annotations

import hashlib
import re
import sys
import urllib.request
from pathlib import Path

import click

from .data_model import DataValue
from .ingest import (
    EmptyInput,
    IngestConfig,
    MalformedDocument,
    SourceFormat,
    inference_config_for,
    parse_source,
)
from .inference import DepthExceeded, InferenceConfig, infer_one, unify_records_by_name
from .shapes import (
    BOT,
    Shape,
    ShapeError,
    csh,
    dump_shape,
    is_preferred,
    load_shape,
    notation,
    preference_failure,
)
from .provider import normalize_names, provide, render_classes, render_signatures
from .calculus import (
    Apply,
    ClassTy,
    DataLit,
    StuckOutcome,
    Value,
    evaluate,
    foo_value_text,
    FooList,
    MemberAccess,
    NoneV,
    ObjV,
    SomeV,
    value_to_expr,
)


class FetchError(Exception):
    pass


_EXTENSIONS = {".json": SourceFormat.JSON, ".xml": SourceFormat.XML, ".csv": SourceFormat.CSV}


def _detect_format(path: str, explicit: str | None) -> SourceFormat:
    if explicit:
        return SourceFormat(explicit)
    suffix = Path(path.split("?")[0]).suffix.lower()
    fmt = _EXTENSIONS.get(suffix)
    if fmt is None:
        raise click.UsageError(f"cannot infer format of {path!r}; pass --format")
    return fmt


def _read_source(path: str, cache_dir: str | None) -> str:
    if re.match(r"^https?://", path):
        cache = Path(cache_dir) if cache_dir else Path(".shapekit_cache")
        cache.mkdir(parents=True, exist_ok=True)
        key = hashlib.sha256(path.encode()).hexdigest()[:24]
        cached = cache / key
        if cached.exists():
            return cached.read_text()
        try:
            with urllib.request.urlopen(path, timeout=30) as resp:
                text = resp.read().decode("utf-8")
        except Exception as e:
            raise FetchError(f"cannot fetch {path}: {e}") from e
        cached.write_text(text)
        return text
    try:
        return Path(path).read_text()
    except OSError as e:
        raise FetchError(f"cannot read {path}: {e}") from e


def _ingest_config(missing_tokens, no_bit) -> IngestConfig:
    cfg = IngestConfig()
    if missing_tokens:
        cfg = IngestConfig(
            missing_tokens=frozenset(missing_tokens),
            date_formats=cfg.date_formats,
            parse_json_strings=cfg.parse_json_strings,
            bit_inference=not no_bit,
        )
    elif no_bit:
        cfg = IngestConfig(bit_inference=False)
    return cfg


@click.group()
def main():
    """Infer structural shapes from sample documents, generate typed
    accessors, and validate inputs against them."""


_common = [
    click.option("--format", "fmt", type=click.Choice(["json", "xml", "csv"]), default=None),
    click.option("--missing-token", "missing_tokens", multiple=True,
                 help="Token treated as a missing value (repeatable)."),
    click.option("--no-bit", is_flag=True, help="Disable 0/1 bit-shape inference."),
    click.option("--cache-dir", default=None, help="Cache directory for fetched URLs."),
]


def _with_options(opts):
    def wrap(f):
        for opt in reversed(opts):
            f = opt(f)
        return f
    return wrap


def _load_samples(samples, fmt, missing_tokens, no_bit, cache_dir, global_xml, no_hetero):
    """Returns (values, inference config) or raises."""
    icfg = _ingest_config(missing_tokens, no_bit)
    values = []
    inf_cfg = None
    for path in samples:
        sfmt = _detect_format(path, fmt)
        text = _read_source(path, cache_dir)
        try:
            values.append((path, parse_source(text, sfmt, icfg)))
        except (MalformedDocument, EmptyInput) as e:
            raise MalformedDocument(f"{path}: {e}") from e
        base = InferenceConfig(global_xml=global_xml, hetero_collections=not no_hetero)
        cfg = inference_config_for(sfmt, icfg, base)
        if inf_cfg is None or cfg.bit_ints:
            inf_cfg = cfg
    return values, inf_cfg


@main.command()
@click.argument("samples", nargs=-1)
@_with_options(_common)
@click.option("--global-xml", is_flag=True, help="Unify same-named records globally.")
@click.option("--no-hetero", is_flag=True, help="Homogeneous collections only.")
@click.option("--out", "out_path", default=None, help="Write the .shape file here.")
def infer(samples, fmt, missing_tokens, no_bit, cache_dir, global_xml, no_hetero, out_path):
    """Infer a shape from one or more sample documents."""
    if not samples:
        raise click.UsageError("at least one sample is required")
    try:
        values, cfg = _load_samples(samples, fmt, missing_tokens, no_bit, cache_dir,
                                    global_xml, no_hetero)
        shape: Shape = BOT
        for _, v in values:
            shape = csh(shape, infer_one(v, cfg))
        if global_xml:
            shape = unify_records_by_name(shape, cfg)
    except (MalformedDocument, FetchError, ShapeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    except DepthExceeded as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)
    click.echo(notation(shape))
    if out_path:
        Path(out_path).write_text(dump_shape(shape))
        click.echo(f"wrote {out_path}", err=True)


@main.command()
@click.argument("shape_file")
@click.option("--signatures-only", is_flag=True, help="Skip the class listing.")
def codegen(shape_file, signatures_only):
    """Generate accessor classes for a stored shape."""
    try:
        shape = load_shape(Path(shape_file).read_text())
    except (OSError, ShapeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    provided = normalize_names(provide(shape))
    click.echo(render_signatures(provided))
    if not signatures_only:
        click.echo()
        click.echo(render_classes(provided))


@main.command()
@click.argument("shape_file")
@click.argument("input_path")
@_with_options(_common)
def validate(shape_file, input_path, fmt, missing_tokens, no_bit, cache_dir):
    """Check that an input document is a subshape of a stored shape."""
    try:
        shape = load_shape(Path(shape_file).read_text())
        sfmt = _detect_format(input_path, fmt)
        icfg = _ingest_config(missing_tokens, no_bit)
        value = parse_source(_read_source(input_path, cache_dir), sfmt, icfg)
        cfg = inference_config_for(sfmt, icfg)
    except (OSError, ShapeError, MalformedDocument, EmptyInput, FetchError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    in_shape = infer_one(value, cfg)
    if is_preferred(in_shape, shape):
        click.echo("subshape")
        sys.exit(0)
    click.echo(preference_failure(in_shape, shape))
    sys.exit(1)


_PATH_SEGMENT = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)|\[(\d+)\]")


def _parse_access_path(path: str):
    segments = []
    pos = 0
    while pos < len(path):
        if path[pos] == ".":
            pos += 1
            continue
        m = _PATH_SEGMENT.match(path, pos)
        if not m:
            raise click.UsageError(f"bad access path at {path[pos:]!r}")
        segments.append(m.group(1) if m.group(1) else int(m.group(2)))
        pos = m.end()
    if not segments:
        raise click.UsageError("access path is empty")
    return segments


@main.command(name="eval")
@click.argument("samples", nargs=-1)
@_with_options(_common)
@click.option("--global-xml", is_flag=True)
@click.option("--no-hetero", is_flag=True)
@click.option("--input", "-i", "input_path", required=True)
@click.option("--path", "-p", "access_path", required=True,
              help="Dotted member path, list indices as [i].")
@click.option("--fuel", default=10**6, show_default=True)
def eval_cmd(samples, fmt, missing_tokens, no_bit, cache_dir, global_xml, no_hetero,
             input_path, access_path, fuel):
    """Infer from samples, convert an input, and walk an access path."""
    if not samples:
        raise click.UsageError("at least one sample is required")
    segments = _parse_access_path(access_path)
    try:
        values, cfg = _load_samples(samples, fmt, missing_tokens, no_bit, cache_dir,
                                    global_xml, no_hetero)
        shape: Shape = BOT
        for _, v in values:
            shape = csh(shape, infer_one(v, cfg))
        if global_xml:
            shape = unify_records_by_name(shape, cfg)
        sfmt = _detect_format(input_path, fmt)
        icfg = _ingest_config(missing_tokens, no_bit)
        input_value = parse_source(_read_source(input_path, cache_dir), sfmt, icfg)
    except (MalformedDocument, EmptyInput, FetchError, ShapeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    provided = normalize_names(provide(shape))
    out = evaluate(provided.classes, Apply(provided.converter, DataLit(input_value)), fuel=fuel)
    if isinstance(out, StuckOutcome):
        click.echo(out.stuck.describe())
        sys.exit(1)
    current = out.value
    for seg in segments:
        if isinstance(current, SomeV):
            current = current.inner
        if isinstance(current, NoneV):
            click.echo("None")
            sys.exit(0)
        if isinstance(seg, int):
            if not isinstance(current, FooList):
                click.echo(f"error: [{seg}] indexes a non-list value", err=True)
                sys.exit(1)
            if seg >= len(current.items):
                click.echo(f"error: index {seg} out of range ({len(current.items)} items)", err=True)
                sys.exit(1)
            current = current.items[seg]
            continue
        if not isinstance(current, ObjV):
            click.echo(f"error: .{seg} on a non-object value", err=True)
            sys.exit(1)
        cdef = provided.classes[current.cls]
        member = cdef.member(seg)
        if member is None:
            import difflib

            names = [m.name for m in cdef.members]
            hint = difflib.get_close_matches(seg, names, n=3)
            click.echo(f"error: unknown member {seg}; members: {', '.join(names)}"
                       + (f" (did you mean {', '.join(hint)}?)" if hint else ""), err=True)
            sys.exit(1)
        result = evaluate(provided.classes, MemberAccess(value_to_expr(current), seg), fuel=fuel)
        if isinstance(result, StuckOutcome):
            click.echo(result.stuck.describe())
            sys.exit(1)
        current = result.value
    click.echo(foo_value_text(current))


@main.command()
@click.option("--suite", "suites", multiple=True,
              type=click.Choice(["lub", "safety", "preservation", "stability"]),
              help="Run only these suites (repeatable).")
@click.option("--seed", default=0, show_default=True)
@click.option("--trials", default=1000, show_default=True, help="Safety suite trials.")
@click.option("--preservation-trials", default=10000, show_default=True)
@click.option("--stability-trials", default=500, show_default=True)
@click.option("--report-dir", default=None, help="Write report.json/csv/png here.")
def check(suites, seed, trials, preservation_trials, stability_trials, report_dir):
    """Run the property suites and write the harness report."""
    from .harness import ALL_SUITES, run_suites

    selected = suites or ALL_SUITES
    results = run_suites(
        selected,
        seed=seed,
        safety_trials=trials,
        preservation_trials=preservation_trials,
        stability_trials=stability_trials,
    )
    for r in results:
        status = "pass" if r.passed else "FAIL"
        click.echo(f"{r.name}: {status} ({r.trials} trials, "
                   f"{len(r.failures)} failures, {r.duration_s:.1f}s)")
        for f in r.failures[:5]:
            click.echo(f"  seed={f.get('seed')}: {f.get('reason')}")
    if report_dir:
        from .report import write_report_files

        paths = write_report_files(results, report_dir)
        click.echo(f"report: {paths['json']}", err=True)
    sys.exit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":
    main()
