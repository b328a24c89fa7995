"""Scatter-plot rendering to SVG.

Hand-rolled SVG 1.1 so the figures stay dependency-free and diffable.
Two coloring modes mirror the reference figures: cyan markers for points
whose weight vector has a negative entry (black otherwise), or a
yellow-to-red ramp over the rank ordering of the l2 norms.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .stratify import StratificationReport

_SVG_NS = "http://www.w3.org/2000/svg"

CYAN = "#00c8c8"
BLACK = "#000000"


def _ramp_yellow_red(t: float) -> str:
    """t in [0, 1]: 0 -> yellow, 1 -> red."""
    g = int(round(255 * (1.0 - t)))
    return f"#ff{g:02x}00"


def render_scatter(coords: np.ndarray, report: StratificationReport,
                   color_by: str = "negativity",
                   width: int = 640, height: int = 640,
                   margin: int = 30, radius: float = 3.0) -> str:
    """Render one circle per point; returns the SVG document as a string."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape[1] != 2:
        raise ValueError("render_scatter needs 2-D coordinates; project first")
    if color_by not in ("negativity", "norm-rank"):
        raise ValueError(f"unknown color mode {color_by!r}")
    p = coords.shape[0]

    lo = coords.min(axis=0)
    rng = coords.max(axis=0) - lo
    rng[rng == 0] = 1.0
    span = (width - 2 * margin, height - 2 * margin)

    ET.register_namespace("", _SVG_NS)
    root = ET.Element(f"{{{_SVG_NS}}}svg", {
        "width": str(width), "height": str(height),
        "viewBox": f"0 0 {width} {height}", "version": "1.1",
    })
    ET.SubElement(root, f"{{{_SVG_NS}}}rect", {
        "x": "0", "y": "0", "width": str(width), "height": str(height),
        "fill": "#ffffff",
    })

    rank_of = {r.index: r.rank for r in report.records}
    for rec in report.records:
        x, y = coords[rec.index]
        cx = margin + (x - lo[0]) / rng[0] * span[0]
        cy = height - margin - (y - lo[1]) / rng[1] * span[1]  # y up
        if color_by == "negativity":
            fill = CYAN if rec.has_negative else BLACK
        else:
            # rank 0 is the largest norm -> red
            t = 1.0 - rank_of[rec.index] / max(1, p - 1)
            fill = _ramp_yellow_red(t)
        ET.SubElement(root, f"{{{_SVG_NS}}}circle", {
            "cx": f"{cx:.3f}", "cy": f"{cy:.3f}", "r": str(radius),
            "fill": fill,
        })
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


def write_scatter(path: str, coords: np.ndarray,
                  report: StratificationReport, **kwargs) -> None:
    with open(path, "w") as f:
        f.write(render_scatter(coords, report, **kwargs))
