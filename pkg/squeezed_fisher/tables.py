"""
Rendering of command results as CSV panels or JSON documents.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__

TOOL_NAME = "squeezed-fisher"
SIGNIFICANT_DIGITS = 12


def format_value(value) -> str:
    """
    Text form of one CSV cell: integers as-is, floats to 12 significant digits
    """
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def jsonable(value):
    """
    Convert numpy values and non-finite floats into something json.dumps accepts
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return format_value(value)
    return value


def header_line(command: str, parameters: dict) -> str:
    params = json.dumps(jsonable(parameters), sort_keys=True)
    return f"# {TOOL_NAME} {__version__} {command} {params}"


@dataclass
class Panel:
    name: str
    columns: list
    rows: list


@dataclass
class PanelDocument:
    """
    Named tables produced by one command run, in the order they were added
    """

    command: str
    parameters: dict
    panels: list = field(default_factory=list)

    def add_panel(self, name: str, columns, rows):
        rows = [list(r) for r in rows]
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(
                    f"panel {name}: row has {len(row)} values for {len(columns)} columns"
                )
        self.panels.append(Panel(name=name, columns=list(columns), rows=rows))

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(header_line(self.command, self.parameters) + "\n")
        writer = csv.writer(out, lineterminator="\n")
        for panel in self.panels:
            out.write(f"# panel:{panel.name}\n")
            writer.writerow(panel.columns)
            for row in panel.rows:
                writer.writerow([format_value(v) for v in row])
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "command": self.command,
            "parameters": jsonable(self.parameters),
            "panels": {
                p.name: {"columns": p.columns, "rows": jsonable(p.rows)}
                for p in self.panels
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def record_to_json(command: str, parameters: dict, record: dict) -> str:
    """
    JSON document for a single result record, such as a Monte Carlo summary
    """
    document = {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "parameters": jsonable(parameters),
        "result": jsonable(record),
    }
    return json.dumps(document, sort_keys=True) + "\n"


def read_csv_panels(text: str) -> dict:
    """
    Parse CSV written by PanelDocument.to_csv back into
    {panel: (columns, rows of strings)}
    """
    panels = {}
    current = None
    lines = text.splitlines()
    for line in lines:
        if line.startswith("# panel:"):
            current = line[len("# panel:") :]
            panels[current] = None
        elif line.startswith("#") or not line:
            continue
        elif current is not None:
            row = next(csv.reader([line]))
            if panels[current] is None:
                panels[current] = (row, [])
            else:
                panels[current][1].append(row)
    return panels
