"""Command-line pipeline: prepare, detect, report, serve, agree."""

from __future__ import annotations

import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__, analytics
from .analytics import AnnotationRecord, build_report, render_report_text
from .corpus import Granularity, parse_corpus, read_unit_table, write_unit_table
from .detector import (
    Cohort,
    OverlapPolicy,
    ScanConfig,
    Statistic,
    candidate_from_row,
    read_candidates_jsonl,
    scan,
    select,
    standardize,
    write_candidates_jsonl,
)
from .embeddings import build_band, load_embeddings
from .errors import ChiasmosError

_GRANULARITY = click.Choice([g.value for g in Granularity])


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


def parse_lengths(spec: str) -> tuple[int, ...]:
    """Parse a window-length flag: '4..8' (inclusive range) or '4,6,8'."""
    spec = spec.strip()
    try:
        if ".." in spec:
            lo_s, hi_s = spec.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ValueError("range upper bound below lower bound")
            return tuple(range(lo, hi + 1))
        return tuple(int(part) for part in spec.split(","))
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse lengths {spec!r}: {exc}") from None


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat(timespec="seconds")
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@click.group()
@click.version_option(version=__version__, prog_name="chiasmos")
def main():
    """Detect and review chiastic structures in versified corpora."""


@main.command()
@click.argument("corpus_tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("--granularity", type=_GRANULARITY, default="verse", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Unit table to write.")
def prepare(corpus_tsv, granularity, out):
    """Parse and normalize a corpus TSV into a unit table."""
    try:
        with open(corpus_tsv, encoding="utf-8") as src:
            corpus = parse_corpus(src, granularity)
    except ChiasmosError as exc:
        raise _fail(exc)
    with open(out, "w", encoding="utf-8") as dst:
        write_unit_table(corpus, dst)
    click.echo(f"wrote {len(corpus)} units to {out}")


def _read_translations(path: str) -> list[str]:
    table: dict[int, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise click.ClickException(f"{path}: line {line_no}: expected unit_id<TAB>text")
            table[int(fields[0])] = fields[1]
    size = max(table) + 1 if table else 0
    return [table.get(i, "") for i in range(size)]


@main.command()
@click.argument("unit_table", type=click.Path(exists=True, dir_okay=False))
@click.argument("embeddings", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Candidates JSONL to write.")
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False), default=None,
              help="Run manifest path (default: <out>.manifest.json).")
@click.option("--lengths", default="4..8", show_default=True, help="Window lengths, e.g. 4..8 or 4,6.")
@click.option("--z-threshold", type=float, default=3.0, show_default=True)
@click.option("--cohort", type=click.Choice([c.value for c in Cohort]), default="per-length", show_default=True)
@click.option("--overlap", type=click.Choice([o.value for o in OverlapPolicy]), default="keep", show_default=True)
@click.option("--statistic", type=click.Choice([s.value for s in Statistic]), default="final", show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--translations", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Optional unit_id<TAB>translation TSV carried along for display.")
def detect(unit_table, embeddings, out, manifest_path, lengths, z_threshold, cohort, overlap, statistic, threads, translations):
    """Scan a unit table + embeddings and write ranked candidates."""
    try:
        config = ScanConfig(lengths=parse_lengths(lengths), z_threshold=z_threshold,
                            overlap_policy=OverlapPolicy(overlap))
        with open(unit_table, encoding="utf-8") as src:
            corpus = read_unit_table(src)
        with open(embeddings, encoding="utf-8") as src:
            store = load_embeddings(src, expected_units=len(corpus))
        band = build_band(corpus, store, config.bandwidth)
        candidates = scan(corpus, band, config, threads=threads)
        candidates = standardize(candidates, Cohort(cohort), Statistic(statistic))
        ranked = select(candidates, config)
    except (ChiasmosError, ValueError) as exc:
        raise _fail(exc)

    unit_texts = [u.normalized_text for u in corpus.units]
    unit_translations = _read_translations(translations) if translations else None
    with open(out, "w", encoding="utf-8") as dst:
        write_candidates_jsonl(ranked, dst, unit_texts=unit_texts, unit_translations=unit_translations)

    manifest = {
        "format": "chiasmos-manifest-v1",
        "tool": "chiasmos",
        "version": __version__,
        "created": _timestamp(),
        "granularity": corpus.granularity.value,
        "lengths": list(config.lengths),
        "z_threshold": z_threshold,
        "cohort": cohort,
        "overlap": overlap,
        "statistic": statistic,
        "threads": threads,
        "unit_table": str(unit_table),
        "unit_table_sha256": _sha256(unit_table),
        "embeddings": str(embeddings),
        "embeddings_sha256": _sha256(embeddings),
        "model_id": store.model_id,
        "dim": store.dim,
        "n_units": len(corpus),
        "n_windows": len(candidates),
        "n_selected": len(ranked),
        "candidates": str(out),
    }
    manifest_path = manifest_path or f"{out}.manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as dst:
        json.dump(manifest, dst, indent=2, sort_keys=True)
        dst.write("\n")
    click.echo(f"kept {len(ranked)} of {len(candidates)} windows; manifest at {manifest_path}")


def _load_annotation_files(paths) -> list[AnnotationRecord]:
    records: list[AnnotationRecord] = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        try:
            found, partial = analytics.read_annotations(text)
        except ChiasmosError as exc:
            raise click.ClickException(f"{path}: {exc}")
        if partial is not None:
            click.echo(f"warning: {path}: ignoring interrupted final line", err=True)
        records.extend(found)
    return records


@main.command()
@click.argument("candidates", type=click.Path(exists=True, dir_okay=False))
@click.option("--annotations", "annotation_paths", type=click.Path(exists=True, dir_okay=False), multiple=True,
              help="Annotation JSONL file(s) covering the top-k (repeatable).")
@click.option("--top-k", type=int, default=50, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report JSON path (default: stdout).")
@click.option("--text", "text_path", type=click.Path(dir_okay=False), default=None, help="Also write the text table here.")
def report(candidates, annotation_paths, top_k, out, text_path):
    """Summarize a candidates file; add precision@k and kappa if annotated."""
    try:
        with open(candidates, encoding="utf-8") as src:
            rows = read_candidates_jsonl(src)
        parsed = [candidate_from_row(row, i) for i, row in enumerate(rows)]
        ranked_ids = [str(row["id"]) for row in rows]
        records = _load_annotation_files(annotation_paths) if annotation_paths else None
        manifest_path = f"{candidates}.manifest.json"
        document = build_report(
            parsed,
            ranked_ids=ranked_ids,
            records=records,
            k=top_k,
            manifest_path=manifest_path if os.path.exists(manifest_path) else None,
        )
    except (ChiasmosError, ValueError) as exc:
        raise _fail(exc)

    payload = json.dumps(document, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(payload, encoding="utf-8")
        click.echo(render_report_text(document), nl=False)
    else:
        click.echo(payload, nl=False)
    if text_path:
        Path(text_path).write_text(render_report_text(document), encoding="utf-8")


@main.command()
@click.argument("candidates", type=click.Path(exists=True, dir_okay=False))
@click.option("--annotations", "annotations_path", type=click.Path(dir_okay=False), required=True,
              help="Append-only label store (created if missing).")
@click.option("--bind", default="127.0.0.1:8080", show_default=True, help="host:port to listen on.")
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Static UI bundle directory (default: bundled UI if present).")
def serve(candidates, annotations_path, bind, ui_dir):
    """Serve the annotation API and review UI."""
    import uvicorn

    from .server import create_app

    host, _, port_s = bind.rpartition(":")
    if not host or not port_s.isdigit():
        raise click.BadParameter(f"--bind must be host:port, got {bind!r}")
    try:
        app = create_app(candidates, annotations_path, ui_dir=ui_dir)
    except (ChiasmosError, ValueError, OSError) as exc:
        raise _fail(exc)
    uvicorn.run(app, host=host, port=int(port_s))


@main.command()
@click.argument("file_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("file_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--candidates", "candidates_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Ranked candidates file; enables top-k precision.")
@click.option("--top-k", type=int, default=50, show_default=True)
def agree(file_a, file_b, candidates_path, top_k):
    """Inter-annotator agreement between two annotation files."""
    records_a = _load_annotation_files([file_a])
    records_b = _load_annotation_files([file_b])
    for path, records in ((file_a, records_a), (file_b, records_b)):
        names = {r.annotator for r in records}
        if len(names) != 1:
            raise click.ClickException(f"{path}: expected one annotator per file, found {sorted(names)}")
    name_a = records_a[0].annotator
    name_b = records_b[0].annotator
    if name_a == name_b:
        raise click.ClickException(f"both files belong to annotator {name_a!r}")

    try:
        if candidates_path:
            with open(candidates_path, encoding="utf-8") as src:
                ranked_ids = [str(row["id"]) for row in read_candidates_jsonl(src)]
            summary = analytics.agreement_summary(ranked_ids, records_a + records_b, top_k)
        else:
            latest = analytics.latest_labels(records_a + records_b)
            joint = sorted(set(latest[name_a]) & set(latest[name_b]))
            if not joint:
                raise click.ClickException("no candidates labeled in both files")
            summary = analytics.agreement_summary(joint, records_a + records_b, len(joint))
    except (ChiasmosError, ValueError) as exc:
        raise _fail(exc)
    click.echo(json.dumps(summary.to_json(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
