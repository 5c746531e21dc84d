"""SVG rendering of piecewise functions: shaded cells, stroked jump set,
normal ticks.  Stroke width and color encode the jump magnitude on a log
scale above 1e-12."""

from __future__ import annotations

import numpy as np

from .functions import PiecewiseAffine

_CELL_COLORS = (
    "#dbeafe", "#dcfce7", "#fef9c3", "#fde2e2", "#ede9fe",
    "#cffafe", "#fce7f3", "#ecfccb", "#fef3c7", "#e2e8f0",
)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render_svg(
    u: PiecewiseAffine, width: int = 640, jump_floor: float = 1e-12,
    style: str = "default",
) -> str:
    """Standalone SVG drawing of the partition and the jump set of u.

    style "default" shades cells; "plain" draws outlines only.
    """
    if style not in ("default", "plain"):
        raise ValueError(f"unknown style {style!r}")
    dom = u.partition.domain
    lo, hi = dom.bbox
    span = hi - lo
    pad = 0.05 * float(max(span))
    lo = lo - pad
    hi = hi + pad
    span = hi - lo
    height = int(width * span[1] / span[0])
    scale = width / span[0]

    def pt(p):
        # svg y-axis points down
        return f"{_fmt((p[0] - lo[0]) * scale)},{_fmt((hi[1] - p[1]) * scale)}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for k, cell in enumerate(u.partition.cells):
        pts = " ".join(pt(v) for v in cell.vertices)
        fill = "none" if style == "plain" else _CELL_COLORS[k % len(_CELL_COLORS)]
        parts.append(
            f'<polygon points="{pts}" fill="{fill}" stroke="#94a3b8" stroke-width="0.5"/>'
        )

    segs = u.jump_segments()
    mags = []
    for s in segs:
        t = np.linspace(0.0, s.length, 5)
        mags.append(float(np.max(np.linalg.norm(s.jump(t), axis=-1))))
    top = max([m for m in mags if m > jump_floor], default=1.0)
    for s, m in zip(segs, mags):
        if m <= jump_floor:
            continue
        # log-scaled width between 1 and 4 px
        w = 1.0 + 3.0 * (np.log10(m / jump_floor) / np.log10(max(top / jump_floor, 10)))
        w = float(np.clip(w, 0.75, 4.0))
        shade = int(200 - 140 * min(m / top, 1.0))
        color = f"rgb(200,{shade // 2},{shade // 2})"
        parts.append(
            f'<line x1="{pt(s.a).split(",")[0]}" y1="{pt(s.a).split(",")[1]}" '
            f'x2="{pt(s.b).split(",")[0]}" y2="{pt(s.b).split(",")[1]}" '
            f'stroke="{color}" stroke-width="{_fmt(w)}"/>'
        )
        # normal tick at the midpoint
        mid = 0.5 * (s.a + s.b)
        tick = mid + 0.12 * s.normal * float(max(span)) * 0.1
        parts.append(
            f'<line x1="{pt(mid).split(",")[0]}" y1="{pt(mid).split(",")[1]}" '
            f'x2="{pt(tick).split(",")[0]}" y2="{pt(tick).split(",")[1]}" '
            f'stroke="#1d4ed8" stroke-width="0.8"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
