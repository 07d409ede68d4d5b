"""Text formats: `.bell` functional files, correlation-matrix CSV, table CSV.

The functional grammar is line oriented, with ``#`` comments and optional
blank lines (LF or CRLF; LF is emitted):

    scenario A:<v0>,<v1>,... B:<v0>,...
    const <signed-real>
    <signed-real> P(<a> <b>|<x> <y>)
    <signed-real> PA(<a>|<x>)
    <signed-real> PB(<b>|<y>)

Reals are decimals (scientific notation accepted) or exact rationals ``p/q``;
rationals are stored as their floating value, with the original text retained
on the parsed document.  Duplicate terms are summed.  Serialization is
canonical: scenario, constant, marginals, then joint terms sorted by
(x, y, a, b), with zero coefficients omitted.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidTableError,
    MissingScenarioError,
    NonNumericError,
    ParseError,
    RaggedRowsError,
    TermIndexError,
)
from .scenario import BellFunctional, BellScenario, ProbabilityTable

_REAL = r"[+-]?(?:\d+\s*/\s*\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
_SCENARIO_RE = re.compile(
    r"^scenario\s+A\s*:\s*(\d+(?:\s*,\s*\d+)*)\s+B\s*:\s*(\d+(?:\s*,\s*\d+)*)$"
)
_CONST_RE = re.compile(rf"^const\s+({_REAL})$")
_JOINT_RE = re.compile(rf"^({_REAL})\s*P\s*\(\s*(\d+)\s+(\d+)\s*\|\s*(\d+)\s+(\d+)\s*\)$")
_MARG_A_RE = re.compile(rf"^({_REAL})\s*PA\s*\(\s*(\d+)\s*\|\s*(\d+)\s*\)$")
_MARG_B_RE = re.compile(rf"^({_REAL})\s*PB\s*\(\s*(\d+)\s*\|\s*(\d+)\s*\)$")
_REAL_PREFIX_RE = re.compile(rf"^({_REAL})")


@dataclass(frozen=True)
class Term:
    """One signed term of a functional document.

    ``kind`` is "joint", "marginal_a", "marginal_b", or "const"; ``indices``
    is (x, y, a, b), (x, a), (y, b), or () respectively.  ``text`` keeps the
    coefficient exactly as written (e.g. "1/3") for document round-trips.
    """

    kind: str
    indices: tuple[int, ...]
    value: float
    text: str
    line: int = 0


@dataclass(frozen=True)
class FunctionalDocument:
    """Parsed form of a `.bell` file: scenario plus the term list in file order."""

    scenario: BellScenario
    terms: tuple[Term, ...]


def _parse_real(text: str) -> float:
    if "/" in text:
        num, den = text.split("/")
        return float(int(num)) / float(int(den))
    return float(text)


def format_real(value: float) -> str:
    """Signed canonical coefficient text: integers render bare, everything
    else with 17 significant digits so parsing returns the exact float."""
    if value == int(value) and abs(value) < 1e15:
        return f"{int(value):+d}"
    return f"{value:+.17g}"


def parse_document(text: str) -> FunctionalDocument:
    """Parse functional text into a document, preserving term order and text."""
    scenario = None
    terms: list[Term] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("scenario"):
            if scenario is not None:
                raise ParseError("duplicate scenario declaration", line=lineno, column=1)
            m = _SCENARIO_RE.match(line)
            if m is None:
                raise ParseError("malformed scenario declaration", line=lineno, column=1)
            outcomes_a = tuple(int(v) for v in re.split(r"\s*,\s*", m.group(1)))
            outcomes_b = tuple(int(v) for v in re.split(r"\s*,\s*", m.group(2)))
            try:
                scenario = BellScenario(outcomes_a, outcomes_b)
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno, column=1) from exc
            continue
        if scenario is None:
            raise MissingScenarioError(
                "terms appear before any scenario declaration", line=lineno, column=1
            )
        m = _CONST_RE.match(line)
        if m is not None:
            terms.append(Term("const", (), _parse_real(m.group(1)), m.group(1), lineno))
            continue
        m = _MARG_A_RE.match(line)
        if m is not None:
            a, x = int(m.group(2)), int(m.group(3))
            terms.append(Term("marginal_a", (x, a), _parse_real(m.group(1)), m.group(1), lineno))
            continue
        m = _MARG_B_RE.match(line)
        if m is not None:
            b, y = int(m.group(2)), int(m.group(3))
            terms.append(Term("marginal_b", (y, b), _parse_real(m.group(1)), m.group(1), lineno))
            continue
        m = _JOINT_RE.match(line)
        if m is not None:
            a, b, x, y = (int(m.group(i)) for i in range(2, 6))
            terms.append(Term("joint", (x, y, a, b), _parse_real(m.group(1)), m.group(1), lineno))
            continue
        prefix = _REAL_PREFIX_RE.match(line)
        column = (prefix.end() + 1) if prefix else 1
        raise ParseError(f"unrecognized term syntax: {line!r}", line=lineno, column=column)
    if scenario is None:
        raise MissingScenarioError("no scenario declaration found", line=None, column=None)
    return FunctionalDocument(scenario, tuple(terms))


def document_to_functional(doc: FunctionalDocument) -> BellFunctional:
    """Accumulate a document's terms into coefficient arrays (duplicates sum)."""
    sc = doc.scenario
    joint = [[np.zeros((va, vb)) for vb in sc.outcomes_b] for va in sc.outcomes_a]
    marg_a = [np.zeros(v) for v in sc.outcomes_a]
    marg_b = [np.zeros(v) for v in sc.outcomes_b]
    constant = 0.0
    for t in doc.terms:
        if t.kind == "const":
            constant += t.value
        elif t.kind == "marginal_a":
            x, a = t.indices
            if not (0 <= x < sc.settings_a and 0 <= a < sc.outcomes_a[x]):
                raise TermIndexError(f"PA({a}|{x}) is outside the scenario", line=t.line)
            marg_a[x][a] += t.value
        elif t.kind == "marginal_b":
            y, b = t.indices
            if not (0 <= y < sc.settings_b and 0 <= b < sc.outcomes_b[y]):
                raise TermIndexError(f"PB({b}|{y}) is outside the scenario", line=t.line)
            marg_b[y][b] += t.value
        else:
            x, y, a, b = t.indices
            if not (
                0 <= x < sc.settings_a
                and 0 <= y < sc.settings_b
                and 0 <= a < sc.outcomes_a[x]
                and 0 <= b < sc.outcomes_b[y]
            ):
                raise TermIndexError(
                    f"P({a} {b}|{x} {y}) is outside the scenario", line=t.line
                )
            joint[x][y][a, b] += t.value
    return BellFunctional(sc, joint, marg_a, marg_b, constant)


def parse_functional(text: str) -> BellFunctional:
    """Parse `.bell` text directly into a functional."""
    return document_to_functional(parse_document(text))


def _scenario_line(sc: BellScenario) -> str:
    return (
        "scenario A:" + ",".join(str(v) for v in sc.outcomes_a)
        + " B:" + ",".join(str(v) for v in sc.outcomes_b)
    )


def serialize_functional(f: BellFunctional) -> str:
    """Canonical text for a functional; ``parse_functional`` inverts it exactly."""
    sc = f.scenario
    lines = [_scenario_line(sc)]
    if f.constant != 0.0:
        lines.append(f"const {format_real(f.constant)}")
    for x in range(sc.settings_a):
        for a in range(sc.outcomes_a[x]):
            v = f.marginal_a[x][a]
            if v != 0.0:
                lines.append(f"{format_real(v)} PA({a}|{x})")
    for y in range(sc.settings_b):
        for b in range(sc.outcomes_b[y]):
            v = f.marginal_b[y][b]
            if v != 0.0:
                lines.append(f"{format_real(v)} PB({b}|{y})")
    for x in range(sc.settings_a):
        for y in range(sc.settings_b):
            blk = f.joint[x][y]
            for a in range(sc.outcomes_a[x]):
                for b in range(sc.outcomes_b[y]):
                    if blk[a, b] != 0.0:
                        lines.append(f"{format_real(blk[a, b])} P({a} {b}|{x} {y})")
    return "\n".join(lines) + "\n"


def serialize_document(doc: FunctionalDocument) -> str:
    """Document text preserving term order and original coefficient spellings."""
    lines = [_scenario_line(doc.scenario)]
    for t in doc.terms:
        if t.kind == "const":
            lines.append(f"const {t.text}")
        elif t.kind == "marginal_a":
            x, a = t.indices
            lines.append(f"{t.text} PA({a}|{x})")
        elif t.kind == "marginal_b":
            y, b = t.indices
            lines.append(f"{t.text} PB({b}|{y})")
        else:
            x, y, a, b = t.indices
            lines.append(f"{t.text} P({a} {b}|{x} {y})")
    return "\n".join(lines) + "\n"


def parse_correlation_matrix(text: str):
    """Parse an m x m comma-separated real matrix into a correlation functional.

    The matrix is stored as given; normalization is a separate, explicit step.
    """
    from .grothendieck import CorrelationFunctional

    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        values = []
        for col, cell in enumerate(cells, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise NonNumericError(
                    f"non-numeric cell {cell!r}", line=lineno, column=col
                ) from None
        rows.append((lineno, values))
    if not rows:
        raise RaggedRowsError("empty correlation matrix", line=1, column=1)
    width = len(rows[0][1])
    for lineno, values in rows:
        if len(values) != width:
            raise RaggedRowsError(
                f"row has {len(values)} cells, expected {width}", line=lineno, column=1
            )
    if len(rows) != width:
        raise RaggedRowsError(
            f"matrix has {len(rows)} rows but {width} columns", line=rows[-1][0], column=1
        )
    return CorrelationFunctional(np.array([v for _, v in rows]))


def serialize_correlation_matrix(matrix) -> str:
    """CSV text for a correlation matrix; exact float round-trip."""
    m = np.asarray(matrix, dtype=float)
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in m) + "\n"


TABLE_HEADER = ["x", "y", "a", "b", "p"]


def parse_table_csv(text: str, renormalize: bool = False) -> ProbabilityTable:
    """Read a probability table from CSV with header ``x,y,a,b,p``.

    Every (x, y, a, b) combination must appear exactly once; the scenario's
    outcome counts are inferred from the indices present.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty table file", line=1, column=1) from None
    if [h.strip() for h in header] != TABLE_HEADER:
        raise ParseError(
            f"expected header {','.join(TABLE_HEADER)!r}", line=1, column=1
        )
    entries: dict[tuple[int, int, int, int], float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 cells, got {len(row)}", line=lineno, column=1)
        try:
            x, y, a, b = (int(v) for v in row[:4])
            p = float(row[4])
        except ValueError:
            raise ParseError(f"malformed row {row!r}", line=lineno, column=1) from None
        key = (x, y, a, b)
        if key in entries:
            raise ParseError(f"duplicate row for (x,y,a,b)={key}", line=lineno, column=1)
        entries[key] = p
    if not entries:
        raise ParseError("table has no rows", line=2, column=1)
    settings_a = max(k[0] for k in entries) + 1
    settings_b = max(k[1] for k in entries) + 1
    outcomes_a = [0] * settings_a
    outcomes_b = [0] * settings_b
    for x, y, a, b in entries:
        outcomes_a[x] = max(outcomes_a[x], a + 1)
        outcomes_b[y] = max(outcomes_b[y], b + 1)
    try:
        scenario = BellScenario(tuple(outcomes_a), tuple(outcomes_b))
    except ValueError as exc:
        raise InvalidTableError(f"inferred scenario is invalid: {exc}") from exc
    blocks = []
    for x in range(settings_a):
        row_blocks = []
        for y in range(settings_b):
            blk = np.empty((outcomes_a[x], outcomes_b[y]))
            for a in range(outcomes_a[x]):
                for b in range(outcomes_b[y]):
                    key = (x, y, a, b)
                    if key not in entries:
                        raise InvalidTableError(f"missing row for (x,y,a,b)={key}")
                    blk[a, b] = entries[key]
            row_blocks.append(blk)
        blocks.append(row_blocks)
    return ProbabilityTable(scenario, blocks, renormalize=renormalize)


def serialize_table_csv(table: ProbabilityTable) -> str:
    """CSV text for a probability table, rows sorted by (x, y, a, b)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    sc = table.scenario
    for x in range(sc.settings_a):
        for y in range(sc.settings_b):
            for a in range(sc.outcomes_a[x]):
                for b in range(sc.outcomes_b[y]):
                    writer.writerow([x, y, a, b, f"{table.p[x][y][a, b]:.17g}"])
    return out.getvalue()
