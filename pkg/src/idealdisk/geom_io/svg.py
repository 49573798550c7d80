"""SVG rendering of developed layouts in the Poincare disk."""

from __future__ import annotations

from dataclasses import dataclass

from .layout import DevelopedLayout, circumcircle

_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
    'width="{size}" height="{size}" viewBox="-1.05 -1.05 2.1 2.1">\n'
)


@dataclass
class RenderOptions:
    circles: bool = False
    size: int = 600
    digits: int = 6
    edge_color: str = "#1f3a93"
    circle_color: str = "#c0392b"
    stroke_width: float = 0.004


def _fmt(v: float, digits: int) -> str:
    s = f"{v:.{digits}f}"
    # avoid "-0.000000"
    return s[1:] if s.startswith("-") and float(s) == 0 else s


def _pt(z: complex, digits: int) -> str:
    # screen y grows downward
    return f"{_fmt(z.real, digits)} {_fmt(-z.imag, digits)}"


def geodesic_path(z1: complex, z2: complex, digits: int = 6) -> str:
    """SVG path data for the disk geodesic from ``z1`` to ``z2``."""
    cross = (z1.conjugate() * z2).imag
    start = f"M {_pt(z1, digits)}"
    if abs(cross) < 1e-12:
        return f"{start} L {_pt(z2, digits)}"
    # the geodesic circle also passes through the inversion of z1 in the unit circle

    center, radius = circumcircle(z1, z2, 1.0 / z1.conjugate() if z1 != 0 else 1.0 / z2.conjugate())
    # orientation in screen coordinates decides the sweep flag
    a = complex(z1.real - center.real, -(z1.imag - center.imag))
    b = complex(z2.real - center.real, -(z2.imag - center.imag))
    sweep = 1 if (a.conjugate() * b).imag > 0 else 0
    r = _fmt(radius, digits)
    return f"{start} A {r} {r} 0 0 {sweep} {_pt(z2, digits)}"


def render_svg(layout: DevelopedLayout | None, options: RenderOptions | None = None) -> str:
    """Disk outline, geodesic triangle sides and optional circumcircles.

    Output is deterministic: triangles are emitted in index order and each
    side once per triangle.
    """
    opt = options or RenderOptions()
    d = opt.digits
    out = [_HEADER.format(size=opt.size)]
    out.append(
        f'  <circle cx="0" cy="0" r="1" fill="none" stroke="black" '
        f'stroke-width="{_fmt(opt.stroke_width, d)}"/>\n'
    )
    if layout is not None:
        out.append(
            f'  <g id="edges" fill="none" stroke="{opt.edge_color}" '
            f'stroke-width="{_fmt(opt.stroke_width, d)}">\n'
        )
        for t in sorted(layout.positions):
            z = layout.positions[t]
            for i in range(3):
                path = geodesic_path(z[(i + 1) % 3], z[(i + 2) % 3], d)
                out.append(f'    <path data-triangle="{t}" data-side="{i}" d="{path}"/>\n')
        out.append("  </g>\n")
        if opt.circles:
            out.append(
                f'  <g id="circles" fill="none" stroke="{opt.circle_color}" '
                f'stroke-width="{_fmt(opt.stroke_width / 2, d)}" stroke-dasharray="0.02 0.01">\n'
            )
            for t in sorted(layout.circles):
                circ = layout.circles[t]
                if circ is None:
                    continue
                c, r = circ
                out.append(
                    f'    <circle data-triangle="{t}" cx="{_fmt(c.real, d)}" '
                    f'cy="{_fmt(-c.imag, d)}" r="{_fmt(r, d)}"/>\n'
                )
            out.append("  </g>\n")
    out.append("</svg>\n")
    return "".join(out)
