"""Minimal SVG rendering for loops, decompositions and explorations."""

from __future__ import annotations

from .exploration import Exploration
from .lattice import DiscreteDisc, DiscreteLoop
from .loopdecomp import LoopDecomposition

LEVEL_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _scale(v, n: int, size: float):
    return v[0] / (2 * n) * size, (1 - v[1] / (2 * n)) * size


def _loop_path(loop: DiscreteLoop, n: int, size: float) -> str:
    pts = [_scale(v, n, size) for v in loop.closed()]
    d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in pts) + " Z"
    return d


def render_decomposition(dec: LoopDecomposition, disc: DiscreteDisc, size: float = 400.0) -> str:
    n = disc.geometry.n
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" '
             f'viewBox="0 0 {size:.0f} {size:.0f}">']
    parts.append(f'<path d="{_loop_path(disc.boundary_loop, n, size)}" fill="none" '
                 f'stroke="#cccccc" stroke-width="1"/>')
    for ll in dec.loops:
        color = LEVEL_COLORS[(ll.level - 1) % len(LEVEL_COLORS)]
        parts.append(f'<path d="{_loop_path(ll.loop, n, size)}" fill="none" '
                     f'stroke="{color}" stroke-width="2"><title>level {ll.level}'
                     f' ({ll.orientation.value})</title></path>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_config(cfg, n: int, size: float = 400.0) -> str:
    """Raw open-edge rendering (works for sourced configurations too)."""
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" '
             f'viewBox="0 0 {size:.0f} {size:.0f}">']
    for e in sorted(cfg.open_edges):
        (x0, y0), (x1, y1) = (_scale(e[0], n, size), _scale(e[1], n, size))
        parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                     f'stroke="#1f77b4" stroke-width="2" stroke-linecap="round"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_exploration(x: Exploration, disc: DiscreteDisc, size: float = 400.0) -> str:
    n = disc.geometry.n
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" '
             f'viewBox="0 0 {size:.0f} {size:.0f}">']
    for e in sorted(x.region.edges):
        (x0, y0), (x1, y1) = (_scale(e[0], n, size), _scale(e[1], n, size))
        parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                     f'stroke="#dddddd" stroke-width="4" stroke-linecap="round"/>')
    for e in sorted(x.state.open_edges):
        (x0, y0), (x1, y1) = (_scale(e[0], n, size), _scale(e[1], n, size))
        parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                     f'stroke="#d62728" stroke-width="2"/>')
    parts.append(f'<path d="{_loop_path(x.gamma, n, size)}" fill="none" '
                 f'stroke="#000000" stroke-width="2"/>')
    parts.append("</svg>")
    return "\n".join(parts)
