"""Joint-space comparison plot emitted as plain SVG text.

Renders the (q1, q2) plane of a 2-DoF model with the geodesic (solid) and
the straight joint interpolation (dashed), plus metric ellipses on a
regular grid: axes along the eigenvectors of G with radii proportional to
the eigenvalues, so the ellipse area scales with det(G). No plotting
library involved; output is deterministic and diffable.
"""

from __future__ import annotations

import numpy as np

from .model import Configuration, RobotModel, mass_matrix

_WIDTH = 640
_HEIGHT = 640
_MARGIN_L = 70
_MARGIN_R = 24
_MARGIN_T = 24
_MARGIN_B = 58


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _decimate(arr, cap=400):
    if arr.shape[0] <= cap:
        return arr
    stride = int(np.ceil(arr.shape[0] / cap))
    picked = arr[::stride]
    if not np.array_equal(picked[-1], arr[-1]):
        picked = np.vstack([picked, arr[-1]])
    return picked


def compare_svg(model: RobotModel, geodesic_q, straight_q, grid: int = 7) -> str:
    """SVG document comparing two joint-space paths on a 2-DoF model."""
    geo = np.asarray(geodesic_q, dtype=float)
    lin = np.asarray(straight_q, dtype=float)
    both = np.vstack([geo, lin])
    lo = both.min(axis=0)
    hi = both.max(axis=0)
    span = np.maximum(hi - lo, 1e-6)
    lo = lo - 0.18 * span
    hi = hi + 0.18 * span
    span = hi - lo

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B
    scale = min(plot_w / span[0], plot_h / span[1])
    # center the square-scaled window inside the plot area
    off_x = _MARGIN_L + 0.5 * (plot_w - scale * span[0])
    off_y = _MARGIN_T + 0.5 * (plot_h - scale * span[1])

    def to_px(qa, qb):
        return off_x + (qa - lo[0]) * scale, off_y + (hi[1] - qb) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]

    # metric ellipses on a grid; one global radius scale keeps areas comparable
    centers = []
    eigs = []
    for gi in range(grid):
        for gj in range(grid):
            qa = lo[0] + (gi + 0.5) * span[0] / grid
            qb = lo[1] + (gj + 0.5) * span[1] / grid
            g = mass_matrix(model, Configuration([qa, qb]))
            w, v = np.linalg.eigh(g)
            centers.append((qa, qb))
            eigs.append((w, v))
    max_eig = max(float(w[-1]) for w, _ in eigs)
    cell_px = scale * min(span[0], span[1]) / grid
    radius_scale = 0.42 * cell_px / max_eig
    for (qa, qb), (w, v) in zip(centers, eigs):
        cx, cy = to_px(qa, qb)
        rx = radius_scale * float(w[1])
        ry = radius_scale * float(w[0])
        # eigenvector of the larger eigenvalue sets the major-axis direction;
        # flip the angle because pixel y points down
        angle = -np.degrees(np.arctan2(float(v[1, 1]), float(v[0, 1])))
        parts.append(
            f'<ellipse cx="{_fmt(cx)}" cy="{_fmt(cy)}" rx="{_fmt(rx)}" ry="{_fmt(ry)}" '
            f'transform="rotate({_fmt(angle)} {_fmt(cx)} {_fmt(cy)})" '
            'fill="#9aa5b1" fill-opacity="0.30" stroke="#6b7683" stroke-width="0.6"/>'
        )

    def polyline(qpath, color, dash):
        pts = " ".join(
            f"{_fmt(px)},{_fmt(py)}" for px, py in (to_px(p[0], p[1]) for p in _decimate(qpath))
        )
        dash_attr = ' stroke-dasharray="7,5"' if dash else ""
        return (
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2.2"{dash_attr}/>'
        )

    parts.append(polyline(lin, "#c0392b", dash=True))
    parts.append(polyline(geo, "#1f77b4", dash=False))

    # endpoint markers
    for p, color in ((geo[0], "#1f2d3d"), (geo[-1], "#1f2d3d")):
        px, py = to_px(p[0], p[1])
        parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="4" fill="{color}"/>')

    # frame and ticks
    x0, y0 = off_x, off_y
    x1, y1 = off_x + scale * span[0], off_y + scale * span[1]
    parts.append(
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}" '
        'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for k in range(5):
        qa = lo[0] + k * span[0] / 4
        qb = lo[1] + k * span[1] / 4
        px, _ = to_px(qa, lo[1])
        _, py = to_px(lo[0], qb)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_fmt(y1)}" x2="{_fmt(px)}" y2="{_fmt(y1 + 6)}" stroke="#333"/>')
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(y1 + 22)}" font-size="12" text-anchor="middle" '
            f'fill="#333" font-family="sans-serif">{_fmt(qa)}</text>'
        )
        parts.append(f'<line x1="{_fmt(x0 - 6)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" y2="{_fmt(py)}" stroke="#333"/>')
        parts.append(
            f'<text x="{_fmt(x0 - 10)}" y="{_fmt(py + 4)}" font-size="12" text-anchor="end" '
            f'fill="#333" font-family="sans-serif">{_fmt(qb)}</text>'
        )
    parts.append(
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(y1 + 42)}" font-size="14" text-anchor="middle" '
        'fill="#111" font-family="sans-serif">q1 [rad]</text>'
    )
    parts.append(
        f'<text x="{_fmt(x0 - 48)}" y="{_fmt((y0 + y1) / 2)}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 {_fmt(x0 - 48)} {_fmt((y0 + y1) / 2)})" fill="#111" '
        'font-family="sans-serif">q2 [rad]</text>'
    )
    # legend
    lx, ly = x0 + 12, y0 + 18
    parts.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly)}" x2="{_fmt(lx + 30)}" y2="{_fmt(ly)}" stroke="#1f77b4" stroke-width="2.2"/>')
    parts.append(
        f'<text x="{_fmt(lx + 36)}" y="{_fmt(ly + 4)}" font-size="12" fill="#111" font-family="sans-serif">geodesic</text>'
    )
    parts.append(
        f'<line x1="{_fmt(lx)}" y1="{_fmt(ly + 18)}" x2="{_fmt(lx + 30)}" y2="{_fmt(ly + 18)}" '
        'stroke="#c0392b" stroke-width="2.2" stroke-dasharray="7,5"/>'
    )
    parts.append(
        f'<text x="{_fmt(lx + 36)}" y="{_fmt(ly + 22)}" font-size="12" fill="#111" font-family="sans-serif">straight path</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
