"""Queryable summary tables: dimension bounds by fixed configuration and
group type, their footnotes, and the unital summaries of 8- and
16-dimensional planes.

The tables live as tab-separated files in ``planelab/data``. Empty cells are
absent bounds (``None``), never zeros.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import NotFoundError, ParameterError

BOUNDS_FILE = "fixed_configuration_bounds.tsv"
FOOTNOTES_FILE = "footnotes.tsv"
UNITALS_FILE = "unital_summary.tsv"

BOUND_NAMES = ("b", "b_prime", "b_double_prime", "b_star", "c", "d", "g")
BOUND_MEANING = {
    "b": "dim >= b: the plane is known",
    "b_prime": "dim >= b': translation plane",
    "b_double_prime": "dim >= b'': Cartesian plane",
    "b_star": "dim >= b*: Hughes plane",
    "c": "dim >= c: classical plane",
    "d": "dim <= d",
    "g": "dim >= g: the group is known",
}

CONFIGURATIONS = ("empty", "line", "flag", "point-line", "two-points", "three-points", "double-flag", "triangle", "arbitrary")
GROUP_CLASSES = ("semisimple", "normal-torus", "normal-vector", "arbitrary")

_ALIASES = {
    "∅": "empty",
    "none": "empty",
    "{}": "empty",
    "{w}": "line",
    "w": "line",
    "{o,w}": "point-line",
    "ow": "point-line",
    "<u,v>": "two-points",
    "⟨u,v⟩": "two-points",
    "uv": "two-points",
    "<u,v,w>": "three-points",
    "⟨u,v,w⟩": "three-points",
    "uvw": "three-points",
    "<u,v,ov>": "double-flag",
    "⟨u,v,ov⟩": "double-flag",
    "<o,u,v>": "triangle",
    "⟨o,u,v⟩": "triangle",
    "semi-simple": "semisimple",
    "s-s": "semisimple",
    "torus": "normal-torus",
    "vector": "normal-vector",
}


def _read(name):
    return resources.files("planelab").joinpath("data").joinpath(name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class FactRow:
    fixed_configuration: str
    group_class: str
    bounds: dict = field(default_factory=dict)
    footnotes: tuple = ()
    citation: str = ""

    def bound(self, name):
        return self.bounds.get(name)

    def to_dict(self):
        return {
            "fixed_configuration": self.fixed_configuration,
            "group_class": self.group_class,
            "bounds": dict(self.bounds),
            "footnotes": list(self.footnotes),
            "citation": self.citation,
        }


def _parse_rows(text):
    rows = []
    for rec in csv.DictReader(io.StringIO(text), delimiter="\t"):
        bounds = {k: int(rec[k]) for k in BOUND_NAMES if rec[k].strip()}
        if any(v < 0 for v in bounds.values()):
            raise ParameterError(f"negative bound in row {rec}")
        if not rec["citation"].strip():
            raise ParameterError(f"row without citation: {rec}")
        notes = tuple(int(v) for v in rec["footnotes"].split(",") if v.strip())
        rows.append(FactRow(rec["fixed_configuration"], rec["group_class"], bounds, notes, rec["citation"]))
    return rows


_ROWS = None


def rows():
    global _ROWS
    if _ROWS is None:
        _ROWS = _parse_rows(_read(BOUNDS_FILE))
    return list(_ROWS)


def footnotes():
    """{footnote id: (statement, citation)}."""
    out = {}
    for rec in csv.DictReader(io.StringIO(_read(FOOTNOTES_FILE)), delimiter="\t"):
        out[int(rec["footnote"])] = (rec["statement"], rec["citation"])
    return out


def normalize(value, allowed):
    key = value.strip().lower().replace(" ", "")
    key = _ALIASES.get(key, key)
    if key not in allowed:
        raise ParameterError(f"unknown value {value!r}; choose from {allowed}")
    return key


def lookup(fixed_configuration, group_class):
    fc = normalize(fixed_configuration, CONFIGURATIONS)
    gc = normalize(group_class, GROUP_CLASSES)
    for row in rows():
        if row.fixed_configuration == fc and row.group_class == gc:
            return row
    raise NotFoundError(f"no row for ({fc}, {gc})")


def query(fixed_configuration=None, group_class=None):
    """All rows matching the given filters (None matches everything)."""
    fc = normalize(fixed_configuration, CONFIGURATIONS) if fixed_configuration else None
    gc = normalize(group_class, GROUP_CLASSES) if group_class else None
    out = [r for r in rows() if (fc is None or r.fixed_configuration == fc) and (gc is None or r.group_class == gc)]
    if not out:
        raise NotFoundError(f"no rows for ({fixed_configuration}, {group_class})")
    return out


def serialize_table(table=None):
    """The bounds table in its checked-in TSV form."""
    table = rows() if table is None else table
    buf = io.StringIO()
    cols = ("fixed_configuration", "group_class") + BOUND_NAMES + ("footnotes", "citation")
    buf.write("\t".join(cols) + "\n")
    for r in table:
        cells = [r.fixed_configuration, r.group_class]
        cells += ["" if r.bounds.get(k) is None else str(r.bounds[k]) for k in BOUND_NAMES]
        cells += [",".join(str(f) for f in r.footnotes), r.citation]
        buf.write("\t".join(cells) + "\n")
    return buf.getvalue()


def checked_in_table():
    return _read(BOUNDS_FILE)


@dataclass(frozen=True)
class UnitalSummary:
    plane_dimension: int
    planes: str
    classes: int
    unitals: str
    motion_group_dimensions: str


def unital_summary(plane_dimension=None, planes=None):
    out = []
    for rec in csv.DictReader(io.StringIO(_read(UNITALS_FILE)), delimiter="\t"):
        row = UnitalSummary(int(rec["plane_dimension"]), rec["planes"], int(rec["classes"]), rec["unitals"], rec["motion_group_dimensions"])
        if plane_dimension is not None and row.plane_dimension != int(plane_dimension):
            continue
        if planes is not None and row.planes != planes:
            continue
        out.append(row)
    if not out:
        raise NotFoundError(f"no unital summary for ({plane_dimension}, {planes})")
    return out


def format_rows(table, fmt="text"):
    """Aligned text or JSON for the CLI."""
    if fmt == "json":
        return json.dumps([r.to_dict() for r in table], indent=2)
    head = ["configuration", "group", *BOUND_NAMES, "notes", "citation"]
    body = [
        [r.fixed_configuration, r.group_class, *("" if r.bounds.get(k) is None else str(r.bounds[k]) for k in BOUND_NAMES), ",".join(map(str, r.footnotes)), r.citation]
        for r in table
    ]
    widths = [max(len(str(x)) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [head, *body]]
    return "\n".join(lines)
