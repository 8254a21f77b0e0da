"""Structure-definition files.

The container is a JSON document with named sections; every expression
inside is a string in the FormExpr grammar:

    {
      "chart":      {"base": [...], "fiber": [...]},
      "functions":  {"H": ["x1", "y1", "p1_1"]},          (optional)
      "sn":         ["<n-form expr>", ...],
      "sharp_n":    ["<vector expr>", ...],               (parallel to sn)
      "hamiltonian": "<n-form expr>",                     (optional)
      "generators": [["label", "<(n-1)-form expr>"], ...] (optional)
      "extension":  [["<form expr>", "<mvform expr>"], ...] (optional)
      "scenario":   {"name": ..., params...}              (optional, metadata)
    }

Extension tables also round-trip through a line-oriented text block
`extend <form> => <mvform>` via dump_extension/parse_extension.
"""

from __future__ import annotations

import json

from .chart import Chart
from .errors import ParseError
from .extensions import ExtensionTable
from .parser import parse_expression, parse_form, parse_multivector
from .render import render, render_form, render_mv, render_mvform
from .forms import Form, MultiVector, MvForm
from .structure import Structure

__all__ = ["load_structure_file", "dump_scenario", "StructureFile",
           "dump_extension", "parse_extension"]


class StructureFile:
    def __init__(self, chart, structure, hamiltonian=None, generators=None,
                 extension=None, meta=None):
        self.chart = chart
        self.structure = structure
        self.hamiltonian = hamiltonian
        self.generators = generators or []
        self.extension = extension
        self.meta = meta or {}


def load_structure_file(path_or_dict):
    if isinstance(path_or_dict, dict):
        doc = path_or_dict
    else:
        with open(path_or_dict) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"not a JSON document: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("structure file must be a JSON object")
    try:
        chart_doc = doc["chart"]
        chart = Chart(base=chart_doc["base"], fiber=chart_doc.get("fiber", []))
    except KeyError as exc:
        raise ParseError(f"missing chart section: {exc}") from None
    for fname, args in doc.get("functions", {}).items():
        chart.declare_function(fname, args)
    n = chart.n
    sn = doc.get("sn", [])
    sharp_n = doc.get("sharp_n", [])
    if len(sn) != len(sharp_n):
        raise ParseError("sn and sharp_n sections differ in length")
    gens = [parse_form(text, chart, degree=n) for text in sn]
    values = [parse_multivector(text, chart, degree=1) for text in sharp_n]
    structure = Structure(chart, gens, values)
    hamiltonian = None
    if doc.get("hamiltonian"):
        hamiltonian = parse_form(doc["hamiltonian"], chart, degree=n)
    generators = []
    for label, text in doc.get("generators", []):
        generators.append((label, parse_form(text, chart, degree=n - 1)))
    extension = None
    if doc.get("extension"):
        entries = []
        for ftext, wtext in doc["extension"]:
            theta = parse_form(ftext, chart)
            value = parse_expression(wtext, chart)
            if isinstance(value, MultiVector):
                value = MvForm.tensor(Form.scalar_form(chart, 1), value)
            if not isinstance(value, MvForm):
                raise ParseError("extension values must be multivector valued forms")
            entries.append((theta, value))
        j = n + 1 - entries[0][1].vec_degree
        extension = ExtensionTable(structure, j, entries)
    return StructureFile(chart, structure, hamiltonian, generators, extension,
                         meta=doc.get("scenario", {}))


def dump_scenario(scn, extension=None):
    """Serialize a Scenario into the JSON container."""
    chart = scn.chart
    doc = {
        "chart": {"base": list(chart.base_coords), "fiber": list(chart.fiber_coords)},
        "functions": {k: list(v) for k, v in chart.functions.items()
                      if "__" not in k},
        "sn": [render_form(g) for g in scn.structure.generators(scn.structure.n)],
        "sharp_n": [render_mv(v) for v in scn.structure.sharp_values(scn.structure.n)],
        "scenario": {"name": scn.name, **{k: (list(v) if isinstance(v, tuple) else v)
                                          for k, v in scn.params.items()}},
    }
    if scn.hamiltonian_form is not None:
        doc["hamiltonian"] = render_form(scn.hamiltonian_form)
    if scn.hamiltonian_generators:
        doc["generators"] = [
            [label, render_form(f)] for label, f in scn.hamiltonian_generators
        ]
    if extension is not None:
        doc["extension"] = [
            [render_form(theta), render_mvform(value)]
            for theta, value in extension.entries
        ]
    return doc


def dump_extension(table):
    """Line-oriented `extend <form> => <mvform>` text block."""
    lines = []
    for theta, value in table.entries:
        lines.append(f"extend {render_form(theta)} => {render_mvform(value)}")
    return "\n".join(lines)


def parse_extension(text, structure):
    """Parse a text block produced by dump_extension."""
    entries = []
    chart = structure.chart
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("extend ") or "=>" not in line:
            raise ParseError("expected `extend <form> => <mvform>`", lineno, 1)
        body = line[len("extend "):]
        ftext, wtext = body.split("=>", 1)
        theta = parse_form(ftext.strip(), chart)
        value = parse_expression(wtext.strip(), chart)
        if isinstance(value, MultiVector):
            value = MvForm.tensor(Form.scalar_form(chart, 1), value)
        entries.append((theta, value))
    j = structure.n + 1 - entries[0][1].vec_degree
    return ExtensionTable(structure, j, entries)
