"""HTTP service for the annotation workflow.

Serves ranked candidates, accepts three-class labels from concurrent
annotators (append-only persistence behind a single writer lock), and
reports live agreement. All metric values come from the analytics module
so browser clients never compute their own numbers.
"""

from __future__ import annotations

import os
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import analytics
from .analytics import AnnotationRecord, Label
from .detector import CandidateId, read_candidates_jsonl
from .errors import AnnotationError


class CandidateIdIn(BaseModel):
    granularity: str
    book: str
    start_ref: str
    n_units: int


class LabelIn(BaseModel):
    candidate_id: CandidateIdIn
    annotator: str = Field(min_length=1)
    label: Literal["chiastic", "non_chiastic", "none"]
    ts: str | None = None


class AnnotationLog:
    """Append-only annotation store shared by concurrent annotators.

    On load, a newline-terminated malformed line means real corruption and
    raises; a partial final line without a newline is residue of an
    interrupted write and gets truncated away.
    """

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self.records: list[AnnotationRecord] = []
        if os.path.exists(path):
            text = Path(path).read_text(encoding="utf-8")
            self.records, partial = analytics.read_annotations(text)
            if partial is not None:
                with open(path, "w", encoding="utf-8") as out:
                    for record in self.records:
                        out.write(_record_line(record))

    def append(self, record: AnnotationRecord) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as out:
                out.write(_record_line(record))
                out.flush()
                os.fsync(out.fileno())
            self.records.append(record)

    def latest_for(self, annotator: str) -> list[AnnotationRecord]:
        latest: dict[str, AnnotationRecord] = {}
        for record in self.records:
            if record.annotator == annotator:
                latest[record.candidate_id.key()] = record
        return list(latest.values())


def _record_line(record: AnnotationRecord) -> str:
    import json

    return json.dumps(record.to_json(), ensure_ascii=False) + "\n"


_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>chiasmos</title></head>
<body><h1>chiasmos annotation API</h1>
<p>No UI bundle is installed. The API is live under <code>/api/</code>:
candidates, labels, agreement.</p></body></html>
"""


def create_app(candidates_path: str, annotations_path: str, ui_dir: str | None = None) -> FastAPI:
    """Build the service around one candidates file and one label file.

    Candidate rows keep their file order, which is the ranking order.
    Raises on an unreadable candidates file or a corrupt annotations file
    so a bad state refuses to serve at all.
    """
    with open(candidates_path, encoding="utf-8") as handle:
        rows = read_candidates_jsonl(handle)
    index: dict[str, dict] = {}
    for rank, row in enumerate(rows, start=1):
        row["rank"] = rank
        index[str(row["id"])] = row

    log = AnnotationLog(annotations_path)
    app = FastAPI(title="chiasmos annotation service")

    @app.get("/api/candidates")
    def list_candidates(granularity: str | None = None, limit: int = Query(default=50)):
        matched = [r for r in rows if granularity is None or r["granularity"] == granularity]
        out = matched if limit <= 0 else matched[:limit]
        return {"total": len(matched), "candidates": out}

    @app.get("/api/candidates/{candidate_id:path}")
    def get_candidate(candidate_id: str):
        row = index.get(candidate_id)
        if row is None:
            raise HTTPException(status_code=404, detail=f"unknown candidate id {candidate_id!r}")
        return row

    @app.post("/api/labels", status_code=201)
    def post_label(body: LabelIn):
        cid = CandidateId(
            granularity=body.candidate_id.granularity,
            book=body.candidate_id.book,
            start_ref=body.candidate_id.start_ref,
            n_units=body.candidate_id.n_units,
        )
        if cid.key() not in index:
            raise HTTPException(status_code=404, detail=f"unknown candidate {cid.key()!r}")
        ts = body.ts or datetime.now(timezone.utc).isoformat(timespec="seconds")
        record = AnnotationRecord(cid, body.annotator, Label(body.label), ts)
        log.append(record)
        return {"record": record.to_json()}

    @app.get("/api/labels")
    def get_labels(annotator: str = Query(min_length=1)):
        return {"labels": [r.to_json() for r in log.latest_for(annotator)]}

    @app.get("/api/agreement")
    def get_agreement(k: int = 50, granularity: str | None = None):
        if k < 1:
            raise HTTPException(status_code=422, detail="k must be >= 1")
        ranked = [str(r["id"]) for r in rows if granularity is None or r["granularity"] == granularity]
        return analytics.agreement_summary(ranked, log.records, k).to_json()

    if ui_dir is None:
        packaged = Path(__file__).parent / "ui"
        if (packaged / "index.html").exists():
            ui_dir = str(packaged)
    if ui_dir is not None and (Path(ui_dir) / "index.html").exists():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def home():
            return _FALLBACK_PAGE

    return app
