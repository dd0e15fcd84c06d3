"""Report serialization and figure rendering.

JSON output is canonical (sorted keys, fixed 17-significant-digit float
formatting) so identical analyses produce byte-identical files, which the
regression comparator and golden tests rely on. The figure is an SVG grid
of up to six network cells, each a 2x2 TG/BG matrix: grayscale for cosine
similarity, a blue-to-red gradient over log10 for the Mahalanobis measure.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from decafbench.errors import InputError
from decafbench.metrics import (
    CELL_BGBG,
    CELL_TGBG,
    CELL_TGTG,
    COSINE,
    MAHALANOBIS_SQ,
    MetaclassMatrix,
    MetricConfig,
)

_CELL_ORDER = (CELL_TGTG, CELL_TGBG, CELL_BGBG)
_METRIC_ORDER = (COSINE, MAHALANOBIS_SQ)

DISPLAY_FLOOR = 1e-12  # log-display floor for nonpositive / tiny distances


@dataclass
class NetworkResult:
    network_name: str
    cosine: MetaclassMatrix
    mahalanobis_sq: MetaclassMatrix


@dataclass
class AnalysisReport:
    dataset_name: str
    plan_description: str
    networks: list[NetworkResult]
    config: MetricConfig
    seeds: dict


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise InputError(f"non-finite value {value!r} cannot be serialized")
    return format(value, ".17g")


def canonical_json(value, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, .17g floats, 2-space indentation."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f'{inner}{json.dumps(str(k), ensure_ascii=False)}: '
            f"{canonical_json(value[k], indent + 1)}"
            for k in sorted(value, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{canonical_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    raise InputError(f"cannot serialize value of type {type(value).__name__}")


def _matrix_to_dict(matrix: MetaclassMatrix) -> dict:
    doc = {
        "cells": dict(matrix.cells),
        "pair_counts": dict(matrix.pair_counts),
    }
    if matrix.per_pair_values is not None:
        doc["per_pair_values"] = {k: list(v) for k, v in matrix.per_pair_values.items()}
    return doc


def _validate(report: AnalysisReport) -> None:
    if not report.networks:
        raise InputError("report has no networks")
    names = [n.network_name for n in report.networks]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate network names in report: {names}")


def report_to_dict(report: AnalysisReport) -> dict:
    _validate(report)
    return {
        "dataset": report.dataset_name,
        "plan": report.plan_description,
        "config": {
            "epsilon": report.config.epsilon,
            "pooling": report.config.pooling_mode,
            "variance": report.config.variance_mode,
            "seeds": dict(report.seeds),
        },
        "networks": [
            {
                "name": n.network_name,
                "metrics": {
                    COSINE: _matrix_to_dict(n.cosine),
                    MAHALANOBIS_SQ: _matrix_to_dict(n.mahalanobis_sq),
                },
            }
            for n in report.networks
        ],
    }


def emit_report_json(report: AnalysisReport, path: Path | str) -> None:
    text = canonical_json(report_to_dict(report)) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def read_report(path: Path | str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if not isinstance(doc, dict) or "networks" not in doc:
        raise InputError(f"{path}: not a report file")
    return doc


def emit_report_csv(report: AnalysisReport, path: Path | str) -> None:
    """One row per (network, metric, cell); RFC-4180 via the csv module."""
    emit_csv_from_dict(report_to_dict(report), path)


def emit_csv_from_dict(doc: dict, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["network", "dataset", "plan", "metric", "cell", "value",
                         "n_pairs"])
        for network in doc["networks"]:
            for metric in _METRIC_ORDER:
                matrix = network["metrics"][metric]
                for cell in _CELL_ORDER:
                    writer.writerow([
                        network["name"],
                        doc["dataset"],
                        doc["plan"],
                        metric,
                        cell,
                        _format_float(matrix["cells"][cell]),
                        matrix["pair_counts"][cell],
                    ])


def cosine_gray(value: float, invert: bool = False) -> int:
    """Grayscale luminance: similarity 1.0 -> 0 (black), -1.0 -> 255."""
    level = round(255 * (1 - (value + 1) / 2))
    level = min(255, max(0, level))
    return 255 - level if invert else level


def log_display(value: float) -> float:
    return math.log10(max(value, DISPLAY_FLOOR))


def distance_color(display: float, lo: float, hi: float) -> tuple[int, int, int]:
    """Blue (low) to red (high), linear over the displayed log10 range."""
    t = 0.5 if hi <= lo else (display - lo) / (hi - lo)
    t = min(1.0, max(0.0, t))
    return (round(255 * t), 0, round(255 * (1 - t)))


_CELL_W = 230
_CELL_H = 210
_SQUARE = 80
_MARGIN = 30
_GRID_COLS = 3
_GRID_ROWS = 2


def _svg_text(x: int, y: int, text: str, size: int = 12, fill: str = "#000000",
              anchor: str = "middle", weight: str = "normal") -> str:
    return (f'<text x="{x}" y="{y}" font-family="monospace" font-size="{size}" '
            f'font-weight="{weight}" fill="{fill}" '
            f'text-anchor="{anchor}">{escape(text)}</text>')


def render_heatmap_grid(report: AnalysisReport | dict, metric: str, path: Path | str,
                        invert: bool = False) -> None:
    """Write the 2x3 grid of per-network 2x2 metaclass matrices as SVG."""
    doc = report if isinstance(report, dict) else report_to_dict(report)
    metric_key = {  # CLI spelling -> report key
        "cosine": COSINE,
        COSINE: COSINE,
        "mahalanobis": MAHALANOBIS_SQ,
        MAHALANOBIS_SQ: MAHALANOBIS_SQ,
    }.get(metric)
    if metric_key is None:
        raise InputError(f"unknown metric {metric!r}")
    networks = doc["networks"]
    if not networks:
        raise InputError("report has no networks")
    if len(networks) > _GRID_COLS * _GRID_ROWS:
        raise InputError(f"grid renders at most 6 networks, got {len(networks)}")
    for network in networks:
        if metric_key not in network["metrics"]:
            raise InputError(f"metric {metric_key} absent from report")

    if metric_key == MAHALANOBIS_SQ:
        displayed = [
            log_display(network["metrics"][metric_key]["cells"][cell])
            for network in networks for cell in _CELL_ORDER
        ]
        lo, hi = min(displayed), max(displayed)
    else:
        lo = hi = 0.0

    width = _MARGIN * 2 + _GRID_COLS * _CELL_W
    height = _MARGIN * 2 + _GRID_ROWS * _CELL_H + 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        _svg_text(width // 2, _MARGIN,
                  f"{doc['dataset']} [{doc['plan']}] {metric_key}", size=15,
                  weight="bold"),
    ]

    for slot, network in enumerate(networks):
        col, row = slot % _GRID_COLS, slot // _GRID_COLS
        ox = _MARGIN + col * _CELL_W
        oy = _MARGIN + 20 + row * _CELL_H
        cells = network["metrics"][metric_key]["cells"]
        parts.append(_svg_text(ox + _CELL_W // 2, oy + 14, network["name"], size=13,
                               weight="bold"))
        # 2x2 layout: rows/cols are (TG, BG); off-diagonal shares TG-BG.
        grid = [[cells[CELL_TGTG], cells[CELL_TGBG]],
                [cells[CELL_TGBG], cells[CELL_BGBG]]]
        mx = ox + (_CELL_W - 2 * _SQUARE) // 2
        my = oy + 30
        for r in range(2):
            for c in range(2):
                value = grid[r][c]
                x = mx + c * _SQUARE
                y = my + r * _SQUARE
                if metric_key == COSINE:
                    level = cosine_gray(value, invert)
                    fill = f"rgb({level},{level},{level})"
                    text_fill = "#ffffff" if level < 128 else "#000000"
                else:
                    red, green, blue = distance_color(log_display(value), lo, hi)
                    fill = f"rgb({red},{green},{blue})"
                    text_fill = "#ffffff"
                parts.append(f'<rect x="{x}" y="{y}" width="{_SQUARE}" '
                             f'height="{_SQUARE}" fill="{fill}" stroke="#000000"/>')
                parts.append(_svg_text(x + _SQUARE // 2, y + _SQUARE // 2 + 4,
                                       format(value, ".4g"), fill=text_fill))
        for i, label in enumerate(("TG", "BG")):
            parts.append(_svg_text(mx + i * _SQUARE + _SQUARE // 2, my - 6, label,
                                   size=11))
            parts.append(_svg_text(mx - 14, my + i * _SQUARE + _SQUARE // 2 + 4,
                                   label, size=11))
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(parts) + "\n")


def compare_reports(a_path: Path | str, b_path: Path | str,
                    tolerance: float) -> dict:
    """Per-cell relative differences between two report files."""
    a = read_report(a_path)
    b = read_report(b_path)
    structural: list[str] = []
    diffs: list[dict] = []
    max_rel = 0.0

    a_nets = {n["name"]: n for n in a["networks"]}
    b_nets = {n["name"]: n for n in b["networks"]}
    if sorted(a_nets) != sorted(b_nets):
        structural.append(f"network sets differ: {sorted(a_nets)} vs {sorted(b_nets)}")
    for name in sorted(set(a_nets) & set(b_nets)):
        a_metrics, b_metrics = a_nets[name]["metrics"], b_nets[name]["metrics"]
        if sorted(a_metrics) != sorted(b_metrics):
            structural.append(f"{name}: metric sets differ")
        for metric in sorted(set(a_metrics) & set(b_metrics)):
            a_cells = a_metrics[metric]["cells"]
            b_cells = b_metrics[metric]["cells"]
            if sorted(a_cells) != sorted(b_cells):
                structural.append(f"{name}/{metric}: cell sets differ")
            for cell in sorted(set(a_cells) & set(b_cells)):
                va, vb = float(a_cells[cell]), float(b_cells[cell])
                scale = max(abs(va), abs(vb))
                rel = 0.0 if scale == 0 else abs(va - vb) / scale
                max_rel = max(max_rel, rel)
                if rel > tolerance:
                    diffs.append({"network": name, "metric": metric, "cell": cell,
                                  "a": va, "b": vb, "rel_diff": rel})
    return {
        "passed": not structural and not diffs,
        "max_rel_diff": max_rel,
        "tolerance": tolerance,
        "structural_errors": structural,
        "diffs": diffs,
    }
