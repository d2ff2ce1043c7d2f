"""Reading polygons and writing deterministic text artifacts (JSON, CSV, SVG)."""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .geometry import ConvexPolygon

VERSION = "0.1.0"


def load_polygon(path) -> ConvexPolygon:
    """Read ``{"vertices": [[x, y], ...]}`` or a bare vertex list.

    Clockwise input is reversed with a warning.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"polygon file not found: {path}") from None
    verts = data["vertices"] if isinstance(data, dict) else data
    return ConvexPolygon.from_points(verts)


def polygon_to_json(P: ConvexPolygon, **meta) -> str:
    return dumps({"vertices": P.to_list(), **meta})


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, ConvexPolygon):
        return obj.to_list()
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def header_lines(config: dict) -> list[str]:
    return [f"# convexpoincare {VERSION}",
            "# config " + json.dumps(_clean(config), sort_keys=True)]


def csv_text(rows: list[dict], config: dict, columns: list[str] | None = None) -> str:
    """CSV with ``#`` comment lines carrying version and config."""
    buf = _io.StringIO()
    for line in header_lines(config):
        buf.write(line + "\n")
    if rows:
        cols = columns or list(rows[0].keys())
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k)) for k in cols})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(_clean(v), sort_keys=True)
    return v


def read_csv(path) -> list[dict]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def svg_plot(series: list[tuple], config: dict, xlabel: str, ylabel: str,
             title: str = "", logx: bool = False, hline: float | None = None) -> str:
    """Line plot as SVG text; ``series`` holds ``(label, x, y)`` triples."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "convexpoincare"
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, x, y in series:
        ax.plot(x, y, marker="o", label=label)
    if hline is not None:
        ax.axhline(hline, color="k", ls="--", lw=0.8, label="upper bound")
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend()
    return _svg(fig, config)


def svg_polygons(polys: list[tuple], config: dict, title: str = "") -> str:
    """Outline plot of ``(label, ConvexPolygon)`` pairs, each centred."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "convexpoincare"
    fig, ax = plt.subplots(figsize=(5, 5))
    for label, P in polys:
        v = P.vertices - P.centroid
        v = np.vstack([v, v[:1]])
        ax.plot(v[:, 0], v[:, 1], label=label)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    ax.legend()
    return _svg(fig, config)


def _svg(fig, config) -> str:
    import matplotlib.pyplot as plt

    buf = _io.StringIO()
    meta = {"Date": None, "Creator": f"convexpoincare {VERSION}",
            "Description": json.dumps(_clean(config), sort_keys=True)}
    fig.savefig(buf, format="svg", metadata=meta)
    plt.close(fig)
    return buf.getvalue()
