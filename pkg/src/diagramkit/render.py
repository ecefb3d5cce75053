"""Vector rendering of diagram plans.

Objects become icons or rounded placeholder rectangles, text labels are
drawn explicitly as fitted text (never left to a raster backend), arrows
and lines run between the nearest edge-midpoint anchors of their boxes.
Output is plain SVG 1.1 built as a string, so identical inputs produce
byte-identical documents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, runtime_checkable

from .model import (
    DiagramPlan,
    EntityKind,
    GridBox,
    PixelRect,
    RelationKind,
    anchor_pair,
    require_valid,
    to_pixels,
)

MIN_FONT_SIZE = 6.0
AVG_ADVANCE = 0.6  # estimated glyph width as a fraction of the font size
ARROW_PULLBACK = 2.0

PLACEHOLDER_FILL = "#eef2f7"
PLACEHOLDER_STROKE = "#4a5568"
CONNECTOR_STROKE = "#1a202c"
TEXT_FILL = "#1a202c"
MARKER_ID = "arrow-head"


class RenderStyle(str, Enum):
    PLACEHOLDER = "placeholder"
    ICONS = "icons"


@runtime_checkable
class IconSource(Protocol):
    def search(self, query: str): ...


@dataclass(frozen=True)
class RenderOptions:
    canvas_side: float = 512.0
    style: RenderStyle = RenderStyle.PLACEHOLDER
    font_family: str = "sans-serif"
    stroke_width: float = 2.0
    arrow_head_size: float = 10.0
    background: str = "#ffffff"

    def __post_init__(self) -> None:
        if self.canvas_side < 64:
            raise ValueError("canvas side must be at least 64 pixels")


@dataclass(frozen=True)
class SvgDocument:
    text: str
    warnings: tuple[str, ...] = ()


def _fmt(value: float) -> str:
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(text: str) -> str:
    return _escape_text(text).replace('"', "&quot;")


def _fit_bounds(label: str, box: PixelRect) -> float:
    height_bound = 0.8 * box.h
    width_bound = 0.95 * box.w / (AVG_ADVANCE * len(label))
    return min(height_bound, width_bound)


def fit_text(label: str, box: PixelRect) -> float:
    """Largest font size that keeps the label inside the box, floored at
    6px below which text stops being readable at all."""
    if not label:
        raise ValueError("cannot fit an empty label")
    if box.w <= 0 or box.h <= 0:
        raise ValueError("cannot fit text into an empty box")
    return max(MIN_FONT_SIZE, _fit_bounds(label, box))


def draw_arrow(
    a: GridBox, b: GridBox, options: RenderOptions = RenderOptions()
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Pixel-space segment between the closest anchors of two boxes, each
    end pulled back 2px from its box edge (skipped for very short runs)."""
    k = options.canvas_side / 100.0
    (ax, ay), (bx, by) = anchor_pair(a, b)
    start = (ax * k, ay * k)
    end = (bx * k, by * k)
    length = math.hypot(end[0] - start[0], end[1] - start[1])
    if length > 2 * ARROW_PULLBACK:
        ux = (end[0] - start[0]) / length
        uy = (end[1] - start[1]) / length
        start = (start[0] + ux * ARROW_PULLBACK, start[1] + uy * ARROW_PULLBACK)
        end = (end[0] - ux * ARROW_PULLBACK, end[1] - uy * ARROW_PULLBACK)
    return start, end


def _marker_defs(options: RenderOptions) -> str:
    size = _fmt(options.arrow_head_size)
    return (
        "<defs>\n"
        f'<marker id="{MARKER_ID}" viewBox="0 0 10 10" refX="9" refY="5" '
        f'markerWidth="{size}" markerHeight="{size}" '
        'markerUnits="userSpaceOnUse" orient="auto">\n'
        f'<polygon points="0,0 10,5 0,10" fill="{CONNECTOR_STROKE}"/>\n'
        "</marker>\n"
        "</defs>"
    )


def _placeholder_rect(rect: PixelRect, options: RenderOptions) -> str:
    radius = min(6.0, rect.w / 4, rect.h / 4)
    return (
        f'<rect x="{_fmt(rect.x)}" y="{_fmt(rect.y)}" '
        f'width="{_fmt(rect.w)}" height="{_fmt(rect.h)}" rx="{_fmt(radius)}" '
        f'fill="{PLACEHOLDER_FILL}" stroke="{PLACEHOLDER_STROKE}" '
        f'stroke-width="{_fmt(options.stroke_width)}"/>'
    )


def _object_group(
    entity_id: str,
    description: str,
    rect: PixelRect,
    options: RenderOptions,
    icons: IconSource | None,
    warnings: list[str],
) -> str:
    body = None
    if options.style is RenderStyle.ICONS and icons is not None:
        try:
            asset = icons.search(description)
            body = (
                f'<image x="{_fmt(rect.x)}" y="{_fmt(rect.y)}" '
                f'width="{_fmt(rect.w)}" height="{_fmt(rect.h)}" '
                f'href="{_escape_attr(str(asset.path))}" '
                'preserveAspectRatio="xMidYMid meet"/>'
            )
        except Exception as exc:  # icon trouble must never fail the render
            warnings.append(f"icon lookup failed for {entity_id} ({exc}); using placeholder")
    if body is None:
        body = _placeholder_rect(rect, options)
    title = _escape_text(description)
    return f'<g id="{_escape_attr(entity_id)}"><title>{title}</title>{body}</g>'


def _label_group(
    entity_id: str,
    label: str,
    rect: PixelRect,
    options: RenderOptions,
    warnings: list[str],
) -> str:
    size = fit_text(label, rect)
    if _fit_bounds(label, rect) < MIN_FONT_SIZE:
        warnings.append(f"tiny text: label {entity_id} does not fit its box above {MIN_FONT_SIZE:g}px")
    cx = rect.x + rect.w / 2
    cy = rect.y + rect.h / 2
    return (
        f'<g id="{_escape_attr(entity_id)}">'
        f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" '
        f'font-family="{_escape_attr(options.font_family)}" '
        f'font-size="{_fmt(size)}" fill="{TEXT_FILL}" '
        'text-anchor="middle" dominant-baseline="central">'
        f"{_escape_text(label)}</text></g>"
    )


def render_svg(
    plan: DiagramPlan,
    options: RenderOptions = RenderOptions(),
    icons: IconSource | None = None,
) -> SvgDocument:
    """Render a structurally valid plan to an SVG document.

    Emits one group per entity (group id = entity id) and one path per
    arrow or line; labels relationships draw nothing, the label's own box
    already carries its placement.
    """
    require_valid(plan)
    warnings: list[str] = []
    side = _fmt(options.canvas_side)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" '
        f'viewBox="0 0 {side} {side}">',
        f'<rect width="{side}" height="{side}" fill="{options.background}"/>',
    ]
    if any(rel.kind is RelationKind.ARROW for rel in plan.relationships):
        lines.append(_marker_defs(options))

    for entity in plan.entities:
        rect = to_pixels(plan.layouts[entity.id], options.canvas_side)
        if entity.kind is EntityKind.OBJECT:
            lines.append(
                _object_group(entity.id, entity.description, rect, options, icons, warnings)
            )
        else:
            lines.append(_label_group(entity.id, entity.description, rect, options, warnings))

    for rel in plan.relationships:
        if rel.kind is RelationKind.LABELS:
            continue
        start, end = draw_arrow(
            plan.layouts[rel.source], plan.layouts[rel.target], options
        )
        marker = f' marker-end="url(#{MARKER_ID})"' if rel.kind is RelationKind.ARROW else ""
        lines.append(
            f'<path d="M {_fmt(start[0])} {_fmt(start[1])} L {_fmt(end[0])} {_fmt(end[1])}" '
            f'stroke="{CONNECTOR_STROKE}" stroke-width="{_fmt(options.stroke_width)}" '
            f'fill="none"{marker}/>'
        )

    lines.append("</svg>")
    return SvgDocument("\n".join(lines) + "\n", tuple(warnings))
