"""Orthographic SVG of a net: northern hemisphere left, southern right."""

from __future__ import annotations

import colorsys

import numpy as np

from .net import Net

_SAMPLES = 48


def _color(k: int) -> str:
    r, g, b = colorsys.hls_to_rgb((0.61803398875 * k) % 1.0, 0.62, 0.55)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _polylines(net: Net) -> list[tuple[np.ndarray, int, int]]:
    out = []
    for e in net.edges:
        pts = net.edge_geometry(e.id).sample(_SAMPLES)
        if e.is_loop:
            pts = np.vstack([pts, pts[:1]])
        out.append((pts, e.left_region, e.right_region))
    return out


def classify(net: Net, q: np.ndarray) -> np.ndarray:
    """Region id of each query point, from the side of its nearest edge segment."""
    a, b, left, right = [], [], [], []
    for pts, lr, rr in _polylines(net):
        a.append(pts[:-1])
        b.append(pts[1:])
        left += [lr] * (len(pts) - 1)
        right += [rr] * (len(pts) - 1)
    a, b = np.vstack(a), np.vstack(b)
    mid = a + b
    mid /= np.linalg.norm(mid, axis=1)[:, None]
    nearest = np.argmax(q @ mid.T, axis=1)
    side = np.einsum("ij,ij->i", q, np.cross(a[nearest], b[nearest]))
    return np.where(side >= 0, np.array(left)[nearest], np.array(right)[nearest])


def render_svg(net: Net, size: int = 320, cells: int = 64) -> tuple[str, dict]:
    r = size / 2
    pad = 10
    width, height = 2 * size + 3 * pad, size + 2 * pad
    step = size / cells
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']

    # (view sign, x offset): the southern view is seen from below, so x is mirrored
    views = ((1.0, pad), (-1.0, 2 * pad + size))
    for zs, ox in views:
        c = (np.arange(cells) + 0.5) / cells * 2 - 1
        gx, gy = np.meshgrid(c, -c)
        inside = gx ** 2 + gy ** 2 < 1
        x, y = gx[inside], gy[inside]
        q = np.stack([zs * x, y, zs * np.sqrt(1 - x ** 2 - y ** 2)], axis=1)
        regions = classify(net, q)
        ii, jj = np.nonzero(inside)
        for i, j, reg in zip(ii, jj, regions):
            parts.append(f'<rect x="{ox + j * step:.2f}" y="{pad + i * step:.2f}" '
                         f'width="{step + 0.3:.2f}" height="{step + 0.3:.2f}" fill="{_color(int(reg))}"/>')
        parts.append(f'<circle cx="{ox + r:.2f}" cy="{pad + r:.2f}" r="{r:.2f}" '
                     f'fill="none" stroke="#444" stroke-width="1"/>')
        for pts, _, _ in _polylines(net):
            visible = zs * pts[:, 2] >= 0
            run: list[str] = []
            for p, vis in zip(pts, visible):
                if vis:
                    run.append(f"{ox + r + zs * p[0] * r:.2f},{pad + r - p[1] * r:.2f}")
                elif run:
                    parts.append(_path(run))
                    run = []
            if run:
                parts.append(_path(run))
    parts.append("</svg>")
    return "\n".join(parts) + "\n", {"regions": len(net.regions), "width": width, "height": height}


def _path(run: list[str]) -> str:
    return f'<polyline points="{" ".join(run)}" fill="none" stroke="black" stroke-width="2"/>'
