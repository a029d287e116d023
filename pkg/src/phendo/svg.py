"""Plain-text SVG figures: the branching centre foliation and a leaf atlas.

Both figures use a fixed 800 x 800 canvas with y increasing downward, so the
circle y = 0 is drawn at the top.
"""
import numpy as np

from . import __version__
from .incoherent import DEFAULT_DEPTH, sigma_curve

SIZE = 800
MARGIN = 60


def _fmt(v):
    return f"{v:.3f}"


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f"<!-- phendo {__version__} -->",
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]


def contact_samples(n_far=120, n_near=120, closest=1e-6):
    """Heights in [0, 1/2] ending exactly at 1/2, clustered geometrically near it."""
    far = np.linspace(0.0, 0.5 - 1e-2, n_far, endpoint=False)
    near = 0.5 - np.geomspace(1e-2, closest, n_near)
    return np.concatenate([far, near, [0.5]])


def figure1_curves(n_per_side=8, depth=DEFAULT_DEPTH, psi=None):
    """Sigma-curves from x = k/n on y = 0 (downward) and y = 1 (upward) to y = 1/2."""
    ts = contact_samples()
    out = []
    for k in range(n_per_side):
        x0 = k / n_per_side
        out.append({"side": "top", "x0": x0,
                    "curve": sigma_curve(np.array([x0, 0.0]), depth=depth, psi=psi, ts=ts)})
        out.append({"side": "bottom", "x0": x0,
                    "curve": sigma_curve(np.array([x0, 1.0]), depth=depth, psi=psi, ts=-ts)})
    return out


def contact_angle(curve):
    """Angle from horizontal of the last segment before the curve reaches y = 1/2."""
    d = curve[-2] - curve[-3]
    return float(np.arctan2(abs(d[1]), abs(d[0])))


def wrap_pieces(curve):
    """Split a cover polyline into torus pieces, cutting at x = 0 / x = 1."""
    pieces, cur = [], []
    prev = None
    for x, y in curve:
        cell = np.floor(x)
        if prev is not None and cell != prev[2]:
            # linear interpolation to the vertical boundary between the cells
            edge = max(cell, prev[2])
            lam = (edge - prev[0]) / (x - prev[0])
            yb = prev[1] + lam * (y - prev[1])
            cur.append((edge - prev[2], yb))
            pieces.append(cur)
            cur = [(edge - cell, yb)]
        cur.append((x - cell, y))
        prev = (x, y, cell)
    pieces.append(cur)
    return [p for p in pieces if len(p) > 1]


def _px(x, y, box):
    (x0, y0), (x1, y1) = box
    scale = (SIZE - 2 * MARGIN) / max(x1 - x0, y1 - y0)
    return MARGIN + (x - x0) * scale, MARGIN + (y - y0) * scale


def _path(points, box):
    pts = [_px(x, y, box) for x, y in points]
    return "M " + " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in pts)


def figure1_svg(curves):
    """The branching foliation on one fundamental domain with its three circles."""
    box = ((0.0, 0.0), (1.0, 1.0))
    lines = _header("Centre branching foliation of the incoherent example")
    lines.append('<g id="circles" stroke="black" stroke-width="2">')
    for label, y in (("y = 0", 0.0), ("y = 1/2", 0.5), ("y = 1", 1.0)):
        (a, b), (c, _) = _px(0.0, y, box), _px(1.0, y, box)
        lines.append(f'<line class="circle" data-y="{y}" x1="{_fmt(a)}" y1="{_fmt(b)}" x2="{_fmt(c)}" y2="{_fmt(b)}"/>')
        lines.append(f'<text class="circle-label" x="{_fmt(c + 8)}" y="{_fmt(b + 5)}" '
                     f'font-size="14" stroke="none">{label}</text>')
    lines.append("</g>")
    lines.append('<g id="sigma-curves" fill="none" stroke="steelblue" stroke-width="1.2">')
    for c in curves:
        d = " ".join(_path(piece, box) for piece in wrap_pieces(c["curve"]))
        lines.append(f'<path class="sigma-curve" data-side="{c["side"]}" data-x0="{c["x0"]}" d="{d}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def atlas_svg(centers, unstables=()):
    """Centre (blue) and unstable (red) leaves drawn on the cover."""
    allv = np.concatenate([l.vertices for l in list(centers) + list(unstables)])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    box = (tuple(lo), tuple(hi))
    lines = _header("Centre and unstable leaf atlas")
    for cls, colour, leaves in (("center-leaf", "steelblue", centers), ("unstable-leaf", "firebrick", unstables)):
        lines.append(f'<g fill="none" stroke="{colour}" stroke-width="1">')
        for i, leaf in enumerate(leaves):
            lines.append(f'<path class="{cls}" data-id="{i}" d="{_path(leaf.vertices, box)}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
