"""Tracking metrics: overlap score, success curves, AUC and plot emission.

Success at threshold t counts frames whose overlap is strictly greater
than t, evaluated on a fixed ascending threshold grid (21 points from 0
to 1 by default).  All functions are pure.
"""

import csv
from dataclasses import dataclass

import numpy as np

DEFAULT_THRESHOLDS = tuple(round(0.05 * i, 2) for i in range(21))

_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    @property
    def area(self):
        return self.w * self.h


def as_box(b):
    if isinstance(b, Box):
        return b
    return Box(*b)


def overlap(rt, rg):
    """Intersection-over-union of two positive-area boxes, in [0, 1]."""
    rt, rg = as_box(rt), as_box(rg)
    if rt.area <= 0 or rg.area <= 0:
        raise ValueError("overlap requires positive-area boxes")
    ix = min(rt.x + rt.w, rg.x + rg.w) - max(rt.x, rg.x)
    iy = min(rt.y + rt.h, rg.y + rg.h) - max(rt.y, rg.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (rt.area + rg.area - inter)


def _boxes_of(record):
    return record.boxes if hasattr(record, "boxes") else list(record)


def per_frame_overlaps(record, gt):
    boxes = _boxes_of(record)
    gt = list(gt)
    if len(boxes) != len(gt):
        raise ValueError(f"record has {len(boxes)} frames but ground truth has {len(gt)}")
    if not boxes:
        raise ValueError("empty record")
    return np.array([overlap(b, g) for b, g in zip(boxes, gt)])


def average_overlap(record, gt):
    """Arithmetic mean of per-frame overlap scores."""
    return float(per_frame_overlaps(record, gt).mean())


@dataclass(frozen=True)
class SuccessCurve:
    thresholds: tuple
    values: tuple
    auc: float


def auc_of(thresholds, values):
    """Trapezoidal integral of the curve, normalized by the grid span."""
    thresholds = np.asarray(thresholds, dtype=float)
    values = np.asarray(values, dtype=float)
    if thresholds.size < 2:
        raise ValueError("AUC needs at least two curve points")
    span = thresholds[-1] - thresholds[0]
    return float(np.trapezoid(values, thresholds) / span)


def auc(curve):
    return auc_of(curve.thresholds, curve.values)


def success_curve(record, gt, thresholds=DEFAULT_THRESHOLDS):
    """Fraction of frames with overlap strictly greater than each threshold."""
    thresholds = tuple(float(t) for t in thresholds)
    if any(t2 <= t1 for t1, t2 in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly ascending")
    if thresholds[0] < 0 or thresholds[-1] > 1:
        raise ValueError("thresholds must lie in [0, 1]")
    ov = per_frame_overlaps(record, gt)
    values = tuple(float(np.mean(ov > t)) for t in thresholds)
    return SuccessCurve(thresholds=thresholds, values=values,
                        auc=auc_of(thresholds, values))


def write_curve_csv(curves, path):
    """One threshold column plus one success column per named curve."""
    names = list(curves)
    grids = {curves[n].thresholds for n in names}
    if len(grids) != 1:
        raise ValueError("curves must share one threshold grid to share a CSV")
    thresholds = next(iter(grids))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold"] + names)
        for i, t in enumerate(thresholds):
            writer.writerow([repr(float(t))] + [repr(float(curves[n].values[i])) for n in names])


def read_curve_csv(path):
    """Inverse of write_curve_csv; returns {name: SuccessCurve}."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "threshold":
        raise ValueError(f"{path}: not a success-curve CSV")
    names = rows[0][1:]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    thresholds = tuple(data[:, 0])
    out = {}
    for j, name in enumerate(names):
        values = tuple(data[:, j + 1])
        out[name] = SuccessCurve(thresholds, values, auc_of(thresholds, values))
    return out


def _svg_plot(curves, width=640, height=480):
    ml, mr, mt, mb = 60, 20, 30, 50
    pw, ph = width - ml - mr, height - mt - mb

    def px(t):
        return ml + t * pw

    def py(v):
        return mt + (1.0 - v) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(11):
        t = i / 10.0
        parts.append(f'<line x1="{px(t):.1f}" y1="{mt}" x2="{px(t):.1f}" y2="{mt + ph}" '
                     f'stroke="#dddddd"/>')
        parts.append(f'<line x1="{ml}" y1="{py(t):.1f}" x2="{ml + pw}" y2="{py(t):.1f}" '
                     f'stroke="#dddddd"/>')
        parts.append(f'<text x="{px(t):.1f}" y="{mt + ph + 18}" font-size="11" '
                     f'text-anchor="middle">{t:.1f}</text>')
        parts.append(f'<text x="{ml - 8}" y="{py(t) + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{t:.1f}</text>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" font-size="13" '
                 f'text-anchor="middle">overlap threshold</text>')
    parts.append(f'<text x="16" y="{mt + ph / 2:.1f}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 16 {mt + ph / 2:.1f})">success rate</text>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{mt - 10}" font-size="14" '
                 f'text-anchor="middle">success plot</text>')

    ranked = sorted(curves.items(), key=lambda kv: -kv[1].auc)
    for i, (name, curve) in enumerate(ranked):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(t):.2f},{py(v):.2f}" for t, v in zip(curve.thresholds, curve.values))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = mt + 16 + 16 * i
        parts.append(f'<line x1="{ml + pw - 150}" y1="{ly - 4}" x2="{ml + pw - 125}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{ml + pw - 120}" y="{ly}" font-size="12">'
                     f'{name} ({curve.auc:.3f})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(curves, prefix):
    """Write <prefix>.csv and a self-contained <prefix>.svg success plot.

    curves: mapping name -> SuccessCurve (all on one threshold grid).
    Legend entries read "name (auc)" and are sorted by AUC descending.
    Returns the two paths written.
    """
    if not curves:
        raise ValueError("no curves to plot")
    csv_path = f"{prefix}.csv"
    svg_path = f"{prefix}.svg"
    write_curve_csv(curves, csv_path)
    with open(svg_path, "w") as fh:
        fh.write(_svg_plot(curves))
    return csv_path, svg_path
