"""Script generation from plans to editable vector platforms.

Two dialects are emitted: an Office automation module (VBA, paste-and-run
in PowerPoint) and a Simple Inkscape Scripting file. Scripts are plain
text, never executed here, and deterministic byte-for-byte so golden-file
fixtures stay stable. Both dialects reuse the renderer's coordinate
mapping, so an export at the same canvas side agrees with the SVG output
pixel for pixel.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import DiagramPlan, RelationKind, require_valid, to_pixels
from .render import (
    CONNECTOR_STROKE,
    PLACEHOLDER_FILL,
    PLACEHOLDER_STROKE,
    IconSource,
    RenderOptions,
    RenderStyle,
    _fmt,
    draw_arrow,
    fit_text,
)

OFFICE_SLIDE_HEIGHT = 540.0  # points; the short side of a 10 x 7.5 inch slide


class Dialect(str, Enum):
    OFFICE_AUTOMATION = "office"
    INKSCAPE_SCRIPTING = "inkscape"


@dataclass(frozen=True)
class ExportScript:
    dialect: Dialect
    text: str
    assets: dict[str, str]

    def to_dict(self) -> dict:
        return {"dialect": self.dialect.value, "text": self.text, "assets": dict(self.assets)}


def _collect_assets(
    plan: DiagramPlan, options: RenderOptions, icons: IconSource | None
) -> dict[str, str]:
    if options.style is not RenderStyle.ICONS or icons is None:
        return {}
    assets: dict[str, str] = {}
    for entity in plan.objects:
        try:
            assets[entity.id] = str(icons.search(entity.description).path)
        except Exception:
            continue  # missing icon falls back to the native rectangle
    return assets


def _vba_str(text: str) -> str:
    return '"' + text.replace('"', '""') + '"'


def export_office_script(
    plan: DiagramPlan,
    options: RenderOptions | None = None,
    icons: IconSource | None = None,
) -> ExportScript:
    """Emit a VBA module that rebuilds the plan on one PowerPoint slide:
    a picture or rectangle per object, a connector per arrow/line, a text
    box per text label, in that order."""
    if options is None:
        options = RenderOptions(canvas_side=OFFICE_SLIDE_HEIGHT)
    require_valid(plan)
    assets = _collect_assets(plan, options, icons)

    lines = [
        "' Diagram export: rebuilds the plan on a new PowerPoint slide.",
        "' Paste into the VBA editor (Alt+F11) and run DrawDiagram.",
        "Option Explicit",
        "",
        "Sub DrawDiagram()",
        "    Dim sld As Slide",
        "    Set sld = Application.ActivePresentation.Slides.Add("
        "Application.ActivePresentation.Slides.Count + 1, ppLayoutBlank)",
        "    Dim shp As Shape",
        "",
        "    ' Objects",
    ]
    for entity in plan.objects:
        rect = to_pixels(plan.layouts[entity.id], options.canvas_side)
        coords = f"{_fmt(rect.x)}, {_fmt(rect.y)}, {_fmt(rect.w)}, {_fmt(rect.h)}"
        if entity.id in assets:
            lines.append(
                f"    Set shp = sld.Shapes.AddPicture({_vba_str(assets[entity.id])}, "
                f"msoFalse, msoTrue, {coords})"
            )
        else:
            lines.append(
                f"    Set shp = sld.Shapes.AddShape(msoShapeRoundedRectangle, {coords})"
            )
            lines.append(f"    shp.TextFrame.TextRange.Text = {_vba_str(entity.description)}")
        lines.append(f"    shp.Name = {_vba_str(entity.id)}")

    lines.extend(["", "    ' Connectors"])
    for rel in plan.relationships:
        if rel.kind is RelationKind.LABELS:
            continue
        start, end = draw_arrow(plan.layouts[rel.source], plan.layouts[rel.target], options)
        lines.append(
            "    Set shp = sld.Shapes.AddConnector(msoConnectorStraight, "
            f"{_fmt(start[0])}, {_fmt(start[1])}, {_fmt(end[0])}, {_fmt(end[1])})"
        )
        if rel.kind is RelationKind.ARROW:
            lines.append("    shp.Line.EndArrowheadStyle = msoArrowheadTriangle")
        lines.append(f"    shp.Name = {_vba_str(rel.source + '-' + rel.target)}")

    lines.extend(["", "    ' Text labels"])
    for entity in plan.text_labels:
        rect = to_pixels(plan.layouts[entity.id], options.canvas_side)
        lines.append(
            "    Set shp = sld.Shapes.AddTextbox(msoTextOrientationHorizontal, "
            f"{_fmt(rect.x)}, {_fmt(rect.y)}, {_fmt(rect.w)}, {_fmt(rect.h)})"
        )
        lines.append(f"    shp.Name = {_vba_str(entity.id)}")
        lines.append(f"    shp.TextFrame.TextRange.Text = {_vba_str(entity.description)}")
        lines.append(
            f"    shp.TextFrame.TextRange.Font.Size = {_fmt(fit_text(entity.description, rect))}"
        )

    lines.extend(["End Sub", ""])
    return ExportScript(Dialect.OFFICE_AUTOMATION, "\n".join(lines), assets)


def export_inkscape_script(
    plan: DiagramPlan,
    options: RenderOptions | None = None,
    icons: IconSource | None = None,
) -> ExportScript:
    """Emit a Simple Inkscape Scripting file: an image or rect per object,
    a (marker-ended) line per arrow/line, a text call per text label."""
    if options is None:
        options = RenderOptions()
    require_valid(plan)
    assets = _collect_assets(plan, options, icons)
    side = _fmt(options.canvas_side)
    stroke = _fmt(options.stroke_width)

    lines = [
        "# Diagram export for Inkscape's Simple Inkscape Scripting extension.",
        "# Run via Extensions > Render > Simple Inkscape Scripting.",
        "",
        f"canvas.true_width = {side}",
        f"canvas.true_height = {side}",
    ]
    if any(rel.kind is RelationKind.ARROW for rel in plan.relationships):
        lines.append(
            "arrow_head = marker(polygon([(0, 0), (10, 5), (0, 10)], "
            f"fill={CONNECTOR_STROKE!r}, stroke=None), ref=(9, 5))"
        )

    lines.extend(["", "# Objects"])
    for entity in plan.objects:
        rect = to_pixels(plan.layouts[entity.id], options.canvas_side)
        if entity.id in assets:
            lines.append(
                f"image({assets[entity.id]!r}, ({_fmt(rect.x)}, {_fmt(rect.y)}), "
                f"embed=False)  # {entity.id}: {entity.description}"
            )
        else:
            lines.append(
                f"rect(({_fmt(rect.x)}, {_fmt(rect.y)}), "
                f"({_fmt(rect.x + rect.w)}, {_fmt(rect.y + rect.h)}), round=6, "
                f"fill={PLACEHOLDER_FILL!r}, stroke={PLACEHOLDER_STROKE!r}, "
                f"stroke_width={stroke})  # {entity.id}: {entity.description}"
            )

    lines.extend(["", "# Connectors"])
    for rel in plan.relationships:
        if rel.kind is RelationKind.LABELS:
            continue
        start, end = draw_arrow(plan.layouts[rel.source], plan.layouts[rel.target], options)
        marker = ", marker_end=arrow_head" if rel.kind is RelationKind.ARROW else ""
        lines.append(
            f"line(({_fmt(start[0])}, {_fmt(start[1])}), ({_fmt(end[0])}, {_fmt(end[1])}), "
            f"stroke={CONNECTOR_STROKE!r}, stroke_width={stroke}{marker})"
            f"  # {rel.source} -> {rel.target}"
        )

    lines.extend(["", "# Text labels"])
    for entity in plan.text_labels:
        rect = to_pixels(plan.layouts[entity.id], options.canvas_side)
        size = fit_text(entity.description, rect)
        cx = rect.x + rect.w / 2
        baseline = rect.y + rect.h / 2 + 0.35 * size
        lines.append(
            f"text({entity.description!r}, ({_fmt(cx)}, {_fmt(baseline)}), "
            f"font_size={_fmt(size) + 'px'!r}, font_family={options.font_family!r}, "
            f"text_anchor='middle')  # {entity.id}"
        )

    lines.append("")
    return ExportScript(Dialect.INKSCAPE_SCRIPTING, "\n".join(lines), assets)
