"""Deterministic SVG rendering of flat presentations and cylinder
decompositions.

The longest bounding-box side maps to 800 units; the shading palette is
fixed.  Polygons whose natural positions overlap (triangle fans, origami
stacks) are laid out in a row instead, so every figure is readable.
"""

from __future__ import annotations

from .flow import Decomposition
from .surface import TranslationSurface

SCALE_TARGET = 800.0
PADDING = 24.0
PALETTE = ["#d9d9d9", "#a6bddb", "#fdbb84", "#a1d99b", "#bcbddc",
           "#fc9272", "#9ecae1", "#fee391", "#c994c7", "#99d8c9"]


def _float_vertices(surface: TranslationSurface):
    out = {}
    for pid in sorted(surface.polygons):
        out[pid] = [v.to_float() for v in surface.polygons[pid].vertices]
    return out


def _bbox(points):
    xs = [p.real for p in points]
    ys = [p.imag for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def _layout(verts: dict):
    """Offsets per polygon: natural placement, or a row when bboxes overlap."""
    pids = sorted(verts)
    boxes = {pid: _bbox(verts[pid]) for pid in pids}

    def overlap(b1, b2):
        return not (b1[2] <= b2[0] or b2[2] <= b1[0]
                    or b1[3] <= b2[1] or b2[3] <= b1[1])

    clash = any(overlap(boxes[a], boxes[b])
                for i, a in enumerate(pids) for b in pids[i + 1:])
    offsets = {}
    if not clash:
        for pid in pids:
            offsets[pid] = 0j
        return offsets
    cursor = 0.0
    for pid in pids:
        x0, y0, _x1, _y1 = boxes[pid]
        offsets[pid] = complex(cursor - x0, -y0)
        cursor += (boxes[pid][2] - boxes[pid][0]) + 0.2 * max(
            1e-9, boxes[pid][2] - boxes[pid][0])
    return offsets


def render_surface_svg(surface: TranslationSurface,
                       decomposition: Decomposition | None = None) -> str:
    """SVG text: polygons to scale, cylinders shaded by index, cone points
    marked; deterministic layout and palette."""
    surface.ensure_valid()
    verts = _float_vertices(surface)
    offsets = _layout(verts)

    shapes = []  # (fill, points)
    if decomposition is not None and decomposition.status == "ok":
        for ci, cyl in enumerate(decomposition.cylinders):
            fill = PALETTE[ci % len(PALETTE)]
            for band in getattr(cyl, "panes", []):
                pts = [z.to_float() + offsets[band["pid"]] for z in band["pane"]]
                shapes.append((fill, pts))
    for pid in sorted(surface.polygons):
        pts = [z + offsets[pid] for z in verts[pid]]
        shapes.append((None, pts))

    all_pts = [p for _fill, pts in shapes for p in pts]
    x0, y0, x1, y1 = _bbox(all_pts)
    span = max(x1 - x0, y1 - y0, 1e-9)
    scale = SCALE_TARGET / span

    def tx(p):
        return ((p.real - x0) * scale + PADDING,
                (y1 - p.imag) * scale + PADDING)

    width = (x1 - x0) * scale + 2 * PADDING
    height = (y1 - y0) * scale + 2 * PADDING
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" '
        f'height="{height:.1f}" viewBox="0 0 {width:.1f} {height:.1f}">'
    ]
    for fill, pts in shapes:
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in (tx(p) for p in pts))
        if fill is None:
            lines.append(f'<polygon points="{coords}" fill="none" '
                         f'stroke="#222222" stroke-width="1.5"/>')
        else:
            lines.append(f'<polygon points="{coords}" fill="{fill}" '
                         f'stroke="none" opacity="0.85"/>')
    # cone points, colored by vertex class
    for cls in surface.cone_classes:
        color = PALETTE[cls.id % len(PALETTE)]
        seen = set()
        for (pid, i) in cls.corners:
            p = verts[pid][i] + offsets[pid]
            key = (round(p.real, 9), round(p.imag, 9))
            if key in seen:
                continue
            seen.add(key)
            x, y = tx(p)
            lines.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="5" '
                         f'fill="{color}" stroke="#000" stroke-width="0.8"/>')
    lines.append("</svg>")
    return "\n".join(lines)
