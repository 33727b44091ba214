"""Self-contained HTML rendering of a validation report.

The page embeds the report as a JSON data island, shows only the source
rows that carry at least one finding, and wraps faulty content in spans the
viewer script can highlight. Everything (style, data, script) is inlined:
the file works from disk with no network access.

DOM contract consumed by the viewer script:
  - ``script#report-data``: JSON ``{"errors": [{"id": "e0", ...}]}`` where
    each entry carries the six report keys plus the assigned id;
  - one ``button.err-marker[data-eid]`` per error;
  - one ``span.err-span[data-eid]`` per (row, field) cell in the error's
    position (nested spans when errors overlap in a cell);
  - ``div#banner`` for degraded-mode notices.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field

from .errors import ValidationReport
from .table import (
    AGENT_FIELDS,
    AGENT_ITEM_DELIMITER,
    ID_FIELDS,
    ID_ITEM_DELIMITER,
    VENUE_FIELD,
    Cell,
    TableDocument,
)


class PositionResolutionError(ValueError):
    """A report position does not exist in the source document."""


_CSS = """
body { font-family: system-ui, sans-serif; margin: 1.5rem; color: #1c1c1c; }
h1 { font-size: 1.3rem; }
#stats { color: #444; }
#banner { background: #fff3cd; border: 1px solid #e0c36b; padding: .5rem .75rem;
          margin: .75rem 0; border-radius: 4px; }
table#report-table { border-collapse: collapse; margin-top: 1rem; width: 100%; }
#report-table th, #report-table td { border: 1px solid #ccc; padding: .35rem .5rem;
          vertical-align: top; text-align: left; font-size: .85rem; }
#report-table th.rownum, #report-table td.rownum { background: #f2f2f2;
          text-align: right; width: 3rem; }
.err-span { border-bottom: 2px solid #c0392b; padding-bottom: 1px; }
.err-span.sev-warning { border-bottom-color: #e67e22; }
.err-span.err-empty::after { content: "\\2205"; color: #999; padding: 0 .2em; }
.err-span.active { background: #ffe08a; }
.err-marker { display: inline-block; border: none; background: none; cursor: pointer;
          color: #c0392b; padding: 0 .15rem; font-size: .8em; vertical-align: super; }
.err-marker.sev-warning { color: #e67e22; }
.err-tooltip { position: absolute; max-width: 28rem; background: #2d2d2d; color: #fff;
          padding: .4rem .6rem; border-radius: 4px; font-size: .8rem; z-index: 10; }
""".strip()


def _island_json(report: ValidationReport) -> str:
    errors = []
    for index, error in enumerate(report.errors):
        entry = {"id": f"e{index}"}
        entry.update(error.to_dict())
        errors.append(entry)
    # "</" would terminate the script element early.
    return json.dumps({"errors": errors}, ensure_ascii=False).replace("</", "<\\/")


def _delimiter_for(field_name: str) -> str:
    if field_name in ID_FIELDS:
        return ID_ITEM_DELIMITER
    if field_name in AGENT_FIELDS or field_name == VENUE_FIELD:
        return AGENT_ITEM_DELIMITER
    return " "


@dataclass
class _SpanNode:
    eid: str
    severity: str
    t0: int  # token-space bounds; tokens alternate item, delimiter, item, ...
    t1: int
    children: list = field(default_factory=list)


def _resolve_overlaps(nodes: list[_SpanNode]) -> list[_SpanNode]:
    """Widen partially overlapping spans until every pair nests or is disjoint."""
    changed = True
    while changed:
        changed = False
        for a in nodes:
            for b in nodes:
                if a is b:
                    continue
                if a.t0 < b.t0 <= a.t1 < b.t1:
                    b.t0 = a.t0
                    changed = True
    return nodes


def _build_forest(nodes: list[_SpanNode]) -> list[_SpanNode]:
    roots: list[_SpanNode] = []
    stack: list[_SpanNode] = []
    for node in sorted(nodes, key=lambda n: (n.t0, -n.t1, n.eid)):
        while stack and not (stack[-1].t0 <= node.t0 and node.t1 <= stack[-1].t1):
            stack.pop()
        (stack[-1].children if stack else roots).append(node)
        stack.append(node)
    return roots


def _render_nodes(tokens: list[str], nodes: list[_SpanNode], t0: int, t1: int,
                  markers: dict[str, str]) -> str:
    parts = []
    position = t0
    for node in nodes:
        parts.append("".join(tokens[position:node.t0]))
        parts.append(f'<span class="err-span sev-{node.severity}" data-eid="{node.eid}">')
        parts.append(_render_nodes(tokens, node.children, node.t0, node.t1 + 1, markers))
        parts.append("</span>")
        if node.eid in markers:
            parts.append(markers.pop(node.eid))
        position = node.t1 + 1
    parts.append("".join(tokens[position:t1]))
    return "".join(parts)


def _marker_html(eid: str, severity: str, label: str) -> str:
    return (
        f'<button type="button" class="err-marker sev-{severity}" data-eid="{eid}" '
        f'aria-label="{html.escape(label, quote=True)}">&#9632;</button>'
    )


def _render_cell(cell: Cell, cell_errors: list[tuple[str, str, str, list[int]]],
                 marker_here: dict[str, tuple[str, str]]) -> str:
    """Render one cell; cell_errors holds (eid, severity, label, items)."""
    delimiter = html.escape(_delimiter_for(cell.field_name))
    texts = [html.escape(item.raw) for item in cell.items]
    tokens = []
    for index, text in enumerate(texts):
        if index:
            tokens.append(delimiter)
        tokens.append(text)

    parts = []
    spans = []
    for eid, severity, label, items in cell_errors:
        if items:
            spans.append(_SpanNode(eid, severity, 2 * items[0], 2 * items[-1]))
        else:
            parts.append(f'<span class="err-span err-empty sev-{severity}" '
                         f'data-eid="{eid}"></span>')
            if eid in marker_here:
                parts.append(_marker_html(eid, severity, marker_here.pop(eid)[1]))

    markers = {
        eid: _marker_html(eid, severity, label)
        for eid, (severity, label) in marker_here.items()
    }
    forest = _build_forest(_resolve_overlaps(spans))
    parts.append(_render_nodes(tokens, forest, 0, len(tokens), markers))
    return "".join(parts)


def _collect_positions(report: ValidationReport, source: TableDocument):
    """Index errors by cell; verify every position resolves in the source."""
    by_cell: dict[tuple[int, str], list[tuple[str, str, str, list[int]]]] = {}
    first_pair: dict[str, tuple[int, str]] = {}
    for index, error in enumerate(report.errors):
        eid = f"e{index}"
        severity = error.error_type.value
        pairs = []
        for row_key, fields in error.position.table.items():
            row_index = int(row_key)
            if not 0 <= row_index < len(source.rows):
                raise PositionResolutionError(f"row {row_key} not in source document")
            for field_name, items in fields.items():
                if field_name not in source.header:
                    raise PositionResolutionError(f"field {field_name!r} not in header")
                cell = source.rows[row_index][field_name]
                if any(i >= len(cell.items) for i in items):
                    raise PositionResolutionError(
                        f"item index out of range in row {row_key}, field {field_name!r}")
                pairs.append((row_index, field_name))
                by_cell.setdefault((row_index, field_name), []).append(
                    (eid, severity, error.error_label, sorted(items)))
        first_pair[eid] = min(pairs, key=lambda p: (p[0], source.header.index(p[1])))
    return by_cell, first_pair


def emit_html(report: ValidationReport, source: TableDocument,
              viewer_asset: bytes) -> bytes:
    """Build the single-file interactive report page."""
    by_cell, first_pair = _collect_positions(report, source)
    error_rows = sorted({row_index for row_index, _ in by_cell})

    body: list[str] = []
    body.append("<h1>Validation report</h1>")
    body.append(
        f'<p id="stats">{report.error_count} error(s), {report.warning_count} '
        f"warning(s) in {len(error_rows)} of {len(source.rows)} row(s)</p>"
    )
    body.append('<div id="banner" hidden></div>')
    body.append(f'<script type="application/json" id="report-data">'
                f"{_island_json(report)}</script>")

    if not report.errors:
        body.append('<p id="no-errors">No errors detected.</p>')
    else:
        head_cells = "".join(f"<th>{html.escape(name)}</th>" for name in source.header)
        body.append('<table id="report-table">')
        body.append(f'<thead><tr><th class="rownum">row</th>{head_cells}</tr></thead>')
        body.append("<tbody>")
        for row_index in error_rows:
            row = source.rows[row_index]
            cells = [f'<td class="rownum">{row_index}</td>']
            for field_name in source.header:
                cell_errors = by_cell.get((row_index, field_name), [])
                marker_here = {
                    eid: (severity, label)
                    for eid, severity, label, _ in cell_errors
                    if first_pair[eid] == (row_index, field_name)
                }
                content = _render_cell(row[field_name], cell_errors, marker_here)
                cells.append(f'<td data-field="{html.escape(field_name, quote=True)}">'
                             f"{content}</td>")
            body.append(f'<tr data-row="{row_index}">' + "".join(cells) + "</tr>")
        body.append("</tbody></table>")

    page = (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        "<title>Validation report</title>\n"
        f"<style>\n{_CSS}\n</style>\n</head>\n<body>\n"
        + "\n".join(body)
        + f"\n<script>\n{viewer_asset.decode('utf-8')}\n</script>\n</body>\n</html>\n"
    )
    return page.encode("utf-8")


STUB_VIEWER = b"/* viewer script unavailable: static report only */"
