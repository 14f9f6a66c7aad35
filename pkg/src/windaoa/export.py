"""Deterministic CSV/JSON writers shared by the report commands."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__

MANIFEST_SCHEMA = "windaoa.manifest/1"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ReportWriter:
    """Writes artifacts under ``outdir`` and records them for the manifest.

    All writes go through one instance, after the analysis tasks finished,
    so file contents never depend on task scheduling.
    """

    def __init__(self, outdir, formats=("csv", "json")):
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.formats = tuple(formats)
        self.artifacts: list[str] = []

    def _path(self, name: str) -> Path:
        p = self.outdir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def _record(self, name: str):
        if name not in self.artifacts:
            self.artifacts.append(name)

    def write_text(self, name: str, text: str) -> Path:
        p = self._path(name)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        self._record(name)
        return p

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, dumps(obj))

    def write_table(self, stem: str, rows: list[dict], columns: list[str], meta: dict | None = None):
        """Write ``rows`` as ``stem.csv`` and/or ``stem.json`` per the formats."""
        if "csv" in self.formats:
            lines = []
            if meta:
                lines.append("# " + json.dumps(_jsonable(meta), sort_keys=True))
            lines.append(",".join(columns))
            for row in rows:
                lines.append(",".join(fmt(row.get(c)) for c in columns))
            self.write_text(stem + ".csv", "\n".join(lines) + "\n")
        if "json" in self.formats:
            payload = {"columns": columns, "rows": [{c: row.get(c) for c in columns} for row in rows]}
            if meta:
                payload["meta"] = meta
            self.write_json(stem + ".json", payload)

    def write_histogram(self, stem: str, hist, meta: dict | None = None):
        rows = [{"bin_center": c, "density": d} for c, d in zip(hist.centers.tolist(), hist.density.tolist())]
        meta = dict(meta or {})
        meta.setdefault("bin_width", float(hist.widths[0]))
        self.write_table(stem, rows, ["bin_center", "density"], meta)

    def manifest(self, command: str, config: dict, input_hash: str, extra: dict | None = None) -> Path:
        entries = []
        for name in self.artifacts:
            entries.append({"path": name, "sha256": sha256_file(self.outdir / name)})
        doc = {
            "schema": MANIFEST_SCHEMA,
            "software": {"name": "windaoa", "version": __version__},
            "command": command,
            "config": config,
            "input_sha256": input_hash,
            "artifacts": entries,
        }
        if extra:
            doc.update(extra)
        p = self.outdir / "manifest.json"
        p.write_text(dumps(doc), encoding="utf-8")
        return p


def tau_tag(tau: float) -> str:
    return f"tau{tau:g}s"
