"""Minimal static SVG writers: trail plots and a table heatmap.

Hand-assembled markup keeps exports byte-deterministic (no renderer
metadata) and needs no display stack. Coordinates are rounded to two
decimals; that is a rendering choice, not a data export.
"""

from __future__ import annotations

import numpy as np

# categorical palette for up to 10 classes (cycles beyond that)
CLASS_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

# sequential colormap anchors, dark (0) to light (1)
_HEAT_STOPS = (
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
)


def heat_color(v: float) -> str:
    """Map a value in [0, 1] to a hex color; NaN renders grey."""
    if not np.isfinite(v):
        return "#cccccc"
    v = min(max(float(v), 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(_HEAT_STOPS, _HEAT_STOPS[1:]):
        if v <= x1:
            f = 0.0 if x1 == x0 else (v - x0) / (x1 - x0)
            rgb = tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#fde725"


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def trails_svg(
    frames: tuple[np.ndarray, ...] | list[np.ndarray],
    labels: np.ndarray,
    size: int = 600,
    margin: int = 20,
) -> str:
    """One polyline per point through its positions in all frames, colored by
    class; coordinates normalized to the cell's own bounding box."""
    stacked = np.vstack(frames)
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    inner = size - 2 * margin

    def to_px(p):
        x = margin + (p[0] - lo[0]) / span[0] * inner
        y = margin + (1.0 - (p[1] - lo[1]) / span[1]) * inner  # flip y for SVG
        return x, y

    n = frames[0].shape[0]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for i in range(n):
        color = CLASS_COLORS[int(labels[i]) % len(CLASS_COLORS)]
        pts = " ".join(
            "{},{}".format(*(map(_fmt, to_px(frame[i])))) for frame in frames
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1" stroke-opacity="0.55"/>'
        )
    # mark final positions
    for i in range(n):
        color = CLASS_COLORS[int(labels[i]) % len(CLASS_COLORS)]
        x, y = to_px(frames[-1][i])
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2" fill="{color}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap_svg(
    matrix: np.ndarray,
    row_labels: list[str],
    col_labels: list[str],
    cell: int = 26,
    label_width: int = 220,
) -> str:
    """Grid heatmap of values in [0, 1] with row/column labels."""
    matrix = np.asarray(matrix, dtype=np.float64)
    rows, cols = matrix.shape
    header = 90
    width = label_width + cols * cell + 10
    height = header + rows * cell + 10
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for j, name in enumerate(col_labels):
        x = label_width + j * cell + cell / 2
        parts.append(
            f'<text x="{_fmt(x)}" y="{header - 6}" text-anchor="start" '
            f'transform="rotate(-45 {_fmt(x)} {header - 6})">{name}</text>'
        )
    for i, name in enumerate(row_labels):
        y = header + i * cell + cell * 0.7
        parts.append(f'<text x="4" y="{_fmt(y)}">{name}</text>')
        for j in range(cols):
            x = label_width + j * cell
            parts.append(
                f'<rect x="{x}" y="{header + i * cell}" width="{cell - 1}" '
                f'height="{cell - 1}" fill="{heat_color(matrix[i, j])}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter_svg(
    coords: np.ndarray,
    color_keys: list[str],
    marker_keys: list[str] | None = None,
    size: int = 600,
    margin: int = 30,
) -> str:
    """Scatterplot with categorical colors (and optional text markers),
    used for the projection-of-projections map."""
    coords = np.asarray(coords, dtype=np.float64)
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    inner = size - 2 * margin
    palette = {k: CLASS_COLORS[i % len(CLASS_COLORS)]
               for i, k in enumerate(dict.fromkeys(color_keys))}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="9">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for i, key in enumerate(color_keys):
        x = margin + (coords[i, 0] - lo[0]) / span[0] * inner
        y = margin + (1.0 - (coords[i, 1] - lo[1]) / span[1]) * inner
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="5" fill="{palette[key]}" '
            f'fill-opacity="0.8"/>'
        )
        if marker_keys is not None:
            parts.append(
                f'<text x="{_fmt(x + 6)}" y="{_fmt(y + 3)}">{marker_keys[i]}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
