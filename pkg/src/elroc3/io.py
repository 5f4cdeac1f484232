"""Dataset ingestion and result serialisation.

Datasets are long-format CSV files with one ``class,value`` row per subject
and an optional ``class,value`` header. Results are written as JSON objects
mirroring the result dataclasses field for field, or as CSV grids whose
leading ``#`` lines carry the metadata needed to rebuild the object.

Floats are written with ``repr``, the shortest string that parses back to
the same double, so every file re-reads to an identical value.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .empirical import ThreeClassSample
from .errors import InputError
from .regions import ConfidenceInterval, Region2D, Region3D

HEADER = ("class", "value")
LABELS = ("1", "2", "3")


def parse_dataset(text: str, source: str = "<string>") -> ThreeClassSample:
    """Parse ``class,value`` CSV text into a :class:`ThreeClassSample`."""
    groups: dict[str, list[float]] = {lab: [] for lab in LABELS}
    reader = csv.reader(io.StringIO(text))
    seen_data = False
    for lineno, row in enumerate(reader, start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        if not seen_data and tuple(c.lower() for c in cells) == HEADER:
            seen_data = True
            continue
        seen_data = True
        if len(cells) != 2:
            raise InputError(f"{source}:{lineno}: expected 2 fields, got {len(cells)}", line=lineno)
        label, raw = cells
        if label not in groups:
            raise InputError(f"{source}:{lineno}: class label {label!r} is not 1, 2 or 3", line=lineno)
        try:
            value = float(raw)
        except ValueError:
            raise InputError(f"{source}:{lineno}: cannot parse value {raw!r}", line=lineno) from None
        if not math.isfinite(value):
            raise InputError(f"{source}:{lineno}: value must be finite, got {raw!r}", line=lineno)
        groups[label].append(value)
    missing = [lab for lab in LABELS if not groups[lab]]
    if missing:
        raise InputError(f"{source}: no observations for class {', '.join(missing)}", missing=missing)
    return ThreeClassSample.from_arrays(*(groups[lab] for lab in LABELS))


def load_dataset(path: str | Path) -> ThreeClassSample:
    """Read a ``class,value`` CSV file (UTF-8, optional header)."""
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise InputError(f"cannot read dataset: {exc}", path=str(path)) from exc
    return parse_dataset(text, str(path))


def dataset_summary(x: ThreeClassSample) -> dict[str, Any]:
    """Per-class sizes and means, and whether the means are increasing."""
    return {
        "sizes": list(x.sizes),
        "means": [c.mean for c in x.classes],
        "means_ordered": x.means_ordered(),
    }


def write_dataset(x: ThreeClassSample, path: str | Path | None = None) -> str:
    """Serialise a sample in the ``class,value`` format; write to ``path`` if given."""
    lines = ["class,value"]
    for lab, c in zip(LABELS, x.classes):
        lines.extend(f"{lab},{v!r}" for v in c.values.tolist())
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# -- JSON -------------------------------------------------------------------

_KINDS = {"interval": ConfidenceInterval, "region3d": Region3D, "region2d": Region2D}


def _kind(result) -> str:
    for k, cls in _KINDS.items():
        if isinstance(result, cls):
            return k
    raise TypeError(f"cannot serialise {type(result).__name__}")


def result_to_json(result, config: dict[str, Any] | None = None) -> str:
    """JSON document ``{"kind", "config", "result"}`` for an interval or region."""
    doc = {"kind": _kind(result), "config": config or {}, "result": result.to_dict()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def result_from_json(text: str):
    """Inverse of :func:`result_to_json`; returns ``(result, config)``."""
    try:
        doc = json.loads(text)
        cls = _KINDS[doc["kind"]]
        return cls.from_dict(doc["result"]), doc.get("config", {})
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"not a result document: {exc}") from exc


# -- CSV grids --------------------------------------------------------------


def _meta_lines(meta: dict[str, Any]) -> list[str]:
    return [f"# {json.dumps(meta, sort_keys=True)}"]


def region_to_csv(region: Region3D | Region2D, config: dict[str, Any] | None = None) -> str:
    """Long-format membership grid.

    Region3D rows are ``theta1,theta2,theta3,member``; Region2D rows are
    ``theta2,theta3,member``. The first line is a ``#`` comment holding the
    remaining fields and the run configuration as JSON.
    """
    d = region.to_dict()
    d.pop("grid")
    d.pop("membership")
    meta = {"kind": _kind(region), "config": config or {}, "fields": d}
    g = [repr(v) for v in region.grid.tolist()]
    m = region.membership
    out = _meta_lines(meta)
    if isinstance(region, Region3D):
        out.append("theta1,theta2,theta3,member")
        for (i, j, k), v in np.ndenumerate(m):
            out.append(f"{g[i]},{g[j]},{g[k]},{int(v)}")
    else:
        out.append("theta2,theta3,member")
        for (i, j), v in np.ndenumerate(m):
            out.append(f"{g[i]},{g[j]},{int(v)}")
    return "\n".join(out) + "\n"


def region_from_csv(text: str):
    """Inverse of :func:`region_to_csv`; returns ``(region, config)``."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise InputError("region CSV lacks its metadata line")
    try:
        meta = json.loads(lines[0][2:])
        kind = meta["kind"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"bad region metadata: {exc}") from exc
    dims = 3 if kind == "region3d" else 2
    rows = list(csv.reader(lines[2:]))
    if any(len(r) != dims + 1 for r in rows):
        raise InputError("region CSV rows have the wrong number of fields")
    grid = sorted({float(r[0]) for r in rows})
    n = len(grid)
    if len(rows) != n**dims:
        raise InputError(f"expected {n ** dims} grid rows, got {len(rows)}")
    member = np.array([r[-1] == "1" for r in rows], dtype=int).reshape((n,) * dims)
    d = dict(meta["fields"])
    d["grid"] = grid
    d["membership"] = {"shape": [n] * dims, "flat": member.ravel().tolist()}
    return _KINDS[kind].from_dict(d), meta.get("config", {})


def interval_to_text(ci: ConfidenceInterval, config: dict[str, Any] | None = None) -> str:
    """Short human-readable rendering; not intended to be parsed back."""
    lines = [f"# config: {json.dumps(config or {}, sort_keys=True)}"]
    lines.append(f"method      {ci.method_tag}")
    lines.append(f"level       {ci.level!r}")
    lines.append(f"estimate    {ci.point_estimate!r}")
    if ci.empty:
        lines.append(f"interval    empty ({ci.diagnostic})")
    else:
        lines.append(f"interval    [{ci.lower!r}, {ci.upper!r}]")
    lines.append(f"w_hat       {ci.w_hat!r}")
    lines.append(f"cutoff      {ci.cutoff!r}")
    return "\n".join(lines) + "\n"
