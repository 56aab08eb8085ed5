"""Reading workbooks: CSV cell grids split into classified table blocks.

A workbook is plain RFC-4180 CSV.  Tables are separated by fully blank
lines.  The first row of a table holds its name and (for decision and
constraint tables) its hit policy, the second row holds the column headers
with a ``||`` cell between the input and output columns, and the remaining
rows are the body.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass, field

from .errors import (AmbiguousTitle, BlankColumn, EmptyModel, InvalidEncoding,
                     MalformedTable, MissingSeparator, UnbalancedQuote,
                     UnknownHitPolicy)

SEPARATOR = "||"
HIT_POLICIES = ("U", "A", "F", "E*", "C+", "C<", "C>", "C#")


class Kind(str, enum.Enum):
    GLOSSARY_TYPE = "GlossaryType"
    GLOSSARY_FUNCTION = "GlossaryFunction"
    GLOSSARY_CONSTANT = "GlossaryConstant"
    GLOSSARY_RELATION = "GlossaryRelation"
    GLOSSARY_BOOLEAN = "GlossaryBoolean"
    DECISION = "Decision"
    CONSTRAINT = "Constraint"
    DATA = "Data"
    GOAL = "Goal"

    @property
    def is_glossary(self):
        return self.value.startswith("Glossary")


_GLOSSARY_KINDS = {
    "type": Kind.GLOSSARY_TYPE,
    "function": Kind.GLOSSARY_FUNCTION,
    "constant": Kind.GLOSSARY_CONSTANT,
    "relation": Kind.GLOSSARY_RELATION,
    "boolean": Kind.GLOSSARY_BOOLEAN,
}
_GLOSSARY_RE = re.compile(
    r"^glossary\b[\s:\-]*(type|function|constant|relation|boolean)s?\s*$", re.I)


@dataclass(frozen=True)
class RawGrid:
    rows: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class TableBlock:
    name: str
    kind: Kind
    hit_policy: str | None
    header_row: tuple[str, ...]
    body: tuple[tuple[str, ...], ...]
    n_inputs: int
    n_outputs: int
    default: str | None = None
    # index of the title row in the source grid (0-based)
    origin: int = field(default=0, compare=False)

    def source_row(self, body_index: int) -> int:
        """1-based file row of a body row."""
        return self.origin + 3 + body_index

    @property
    def header_source_row(self) -> int:
        return self.origin + 2


def load_grid(source) -> RawGrid:
    """Read a workbook from bytes or a binary stream into a raw cell grid."""
    data = source.read() if hasattr(source, "read") else source
    if isinstance(data, str):
        text = data
    else:
        try:
            text = bytes(data).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise InvalidEncoding(f"workbook is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    rows = []
    try:
        for row in reader:
            rows.append(tuple(row))
    except csv.Error as exc:
        raise UnbalancedQuote(f"malformed CSV near line {reader.line_num}: {exc}",
                              row=reader.line_num) from None
    return RawGrid(tuple(rows))


def _is_blank(row) -> bool:
    return all(not cell.strip() for cell in row)


def _policy_token(cell: str) -> str | None:
    cell = cell.strip()
    if not cell or cell.lower().startswith("default="):
        return None
    return cell.upper()


def classify_block(title_row) -> tuple[Kind, str | None]:
    """Decide the kind of a table from its title row."""
    cells = [c.strip() for c in title_row]
    if not cells or not cells[0]:
        raise MalformedTable("table has no name in its top-left cell")
    name = cells[0]
    token = _policy_token(cells[1]) if len(cells) > 1 else None

    m = _GLOSSARY_RE.match(name)
    if m:
        return _GLOSSARY_KINDS[m.group(1).lower()], None
    if name.lower() == "goal":
        return Kind.GOAL, None
    if "data table" in name.lower():
        if token is not None:
            raise AmbiguousTitle(
                f"table {name!r} is named as a data table but also has hit policy {token!r}")
        return Kind.DATA, None
    if token is None:
        raise UnknownHitPolicy("no hit policy in the title row", table=name)
    if token == "C":
        raise UnknownHitPolicy(
            "the C (collect) hit policy is not supported; use a relation instead",
            table=name)
    if token not in HIT_POLICIES:
        raise UnknownHitPolicy(f"unknown hit policy {cells[1]!r}", table=name)
    if token == "E*":
        return Kind.CONSTRAINT, token
    return Kind.DECISION, token


def _split_separator(header, body, name, origin, required):
    idx = [i for i, cell in enumerate(header) if cell == SEPARATOR]
    if len(idx) > 1:
        raise MalformedTable("more than one '||' separator in the header row",
                             table=name, row=origin + 2)
    if not idx:
        if required:
            raise MissingSeparator(
                "header row needs a '||' cell between input and output columns",
                table=name, row=origin + 2)
        return header, body, 0
    sep = idx[0]
    new_body = []
    for i, row in enumerate(body):
        if row[sep] not in ("", SEPARATOR):
            raise MalformedTable("cell under the '||' separator must be empty",
                                 table=name, row=origin + 3 + i, column=sep + 1)
        new_body.append(row[:sep] + row[sep + 1:])
    return header[:sep] + header[sep + 1:], tuple(new_body), sep


def _make_block(rows, origin) -> TableBlock:
    width = max(len(r) for r in rows)
    cells = [tuple(c.strip() for c in r) + ("",) * (width - len(r)) for r in rows]
    # drop columns that are empty everywhere at the right edge (CSV padding)
    while width > 1 and all(not r[width - 1] for r in cells):
        width -= 1
    cells = [r[:width] for r in cells]
    title = cells[0]
    name = title[0]
    # the title row may be wider or narrower than the table proper
    inner = max((j + 1 for r in cells[1:] for j, c in enumerate(r) if c), default=0)
    for col in range(inner):
        if all(not r[col] for r in cells[1:]):
            raise BlankColumn("blank column inside a table", table=name or None,
                              row=origin + 2, column=col + 1)
    cells = [title] + [r[:inner] for r in cells[1:]]
    try:
        kind, policy = classify_block(title)
    except (UnknownHitPolicy, AmbiguousTitle, MalformedTable) as exc:
        raise exc.locate(table=name or None, row=origin + 1)

    default = None
    for cell in title[1:]:
        if cell.lower().startswith("default="):
            default = cell[len("default="):].strip()
    if len(cells) < 2:
        raise MalformedTable("table has no header row", table=name, row=origin + 1)

    header = cells[1]
    body = tuple(cells[2:])
    required = kind in (Kind.DECISION, Kind.CONSTRAINT, Kind.DATA)
    header, body, n_in = _split_separator(header, body, name, origin, required)
    # trim again: glossary/goal headers may be narrower than the title row
    if not required:
        keep = len(header)
        while keep > 1 and not header[keep - 1] and all(not r[keep - 1] for r in body):
            keep -= 1
        header = header[:keep]
        body = tuple(r[:keep] for r in body)
    n_out = len(header) - n_in
    if required and n_out < 1:
        raise MalformedTable("table needs at least one output column",
                             table=name, row=origin + 2)
    if kind is Kind.GOAL and len(body) != 1:
        raise MalformedTable("a goal table has exactly one body row",
                             table=name, row=origin + 1)
    return TableBlock(name=name, kind=kind, hit_policy=policy, header_row=header,
                      body=body, n_inputs=n_in, n_outputs=n_out, default=default,
                      origin=origin)


def segment_blocks(grid: RawGrid) -> list[TableBlock]:
    """Split a grid into blocks at blank rows and classify each block."""
    blocks = []
    run: list = []
    start = 0
    for i, row in enumerate(grid.rows + ((),)):
        if _is_blank(row):
            if run:
                blocks.append(_make_block(run, start))
                run = []
        else:
            if not run:
                start = i
            run.append(row)
    if not blocks:
        raise EmptyModel("workbook contains no tables")
    return blocks


def render_block(block: TableBlock) -> str:
    """Serialize a block back to workbook CSV (no trailing blank line)."""
    title = [block.name]
    if block.hit_policy:
        title.append(block.hit_policy)
    if block.default is not None:
        if not block.hit_policy:
            title.append("")
        title.append(f"default={block.default}")
    separated = block.kind in (Kind.DECISION, Kind.CONSTRAINT, Kind.DATA)
    header = list(block.header_row)
    rows = [list(r) for r in block.body]
    if separated:
        header.insert(block.n_inputs, SEPARATOR)
        for r in rows:
            r.insert(block.n_inputs, "")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(title)
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def read_workbook(source) -> list[TableBlock]:
    return segment_blocks(load_grid(source))
