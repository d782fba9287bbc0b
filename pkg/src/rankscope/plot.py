"""SVG heatmap of a sweep grid.

``log10 kappa`` is clipped to the finite range of the grid and mapped onto a
256-entry ramp obtained by piecewise-linear interpolation between five anchor
colors (dark purple, blue, teal, green, yellow), each channel rounded to an
integer. Infinite cells take the last ramp color, nan cells are gray. Cells
where Y is not a local minimizer are outlined in white.
"""
import math

import numpy as np

ANCHORS = np.array(
    [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ],
    dtype=float,
)
NAN_COLOR = "#808080"


def color_ramp(steps=256):
    x = np.linspace(0.0, 1.0, steps)
    knots = np.linspace(0.0, 1.0, len(ANCHORS))
    rgb = np.column_stack([np.interp(x, knots, ANCHORS[:, c]) for c in range(3)])
    return [f"#{int(round(r)):02x}{int(round(g)):02x}{int(round(b)):02x}" for r, g, b in rgb]


def render_svg(cells, cell_size=12, margin=48):
    ramp = color_ramp()
    ts = sorted({c.t for c in cells})
    phis = sorted({c.phi for c in cells})
    finite = [c.kappa_log10 for c in cells if math.isfinite(c.kappa_log10)]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    span = hi - lo or 1.0
    width = margin + cell_size * len(phis) + 16
    height = margin + cell_size * len(ts) + 16
    col = {p: k for k, p in enumerate(phis)}
    row = {t: k for k, t in enumerate(reversed(ts))}  # t increases upward

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>log10 condition number, range [{lo:.3g}, {hi:.3g}]</title>",
        f'<text x="{margin}" y="{margin - 28}" font-size="11" font-family="sans-serif">'
        f"log10 kappa in [{lo:.3g}, {hi:.3g}]; x: phi {phis[0]:.3g}..{phis[-1]:.3g}, "
        f"y: t {ts[0]:.3g}..{ts[-1]:.3g}</text>",
    ]
    for c in cells:
        k = c.kappa_log10
        if math.isnan(k):
            fill = NAN_COLOR
        elif math.isinf(k):
            fill = ramp[-1]
        else:
            fill = ramp[min(255, int((k - lo) / span * 255 + 0.5))]
        x = margin + col[c.phi] * cell_size
        y = margin - 16 + row[c.t] * cell_size
        stroke = "" if c.local_min else ' stroke="#ffffff" stroke-width="0.5"'
        out.append(f'<rect x="{x}" y="{y}" width="{cell_size}" height="{cell_size}" fill="{fill}"{stroke}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(cells, path, **kwargs):
    with open(path, "w") as fh:
        fh.write(render_svg(cells, **kwargs))
