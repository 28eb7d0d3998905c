"""
Verification reports and their csv / json / human renderings.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from rich import box
from rich.console import Console
from rich.table import Table

from .utils import fraction_approx, fraction_text

Exact = Union[int, Fraction]
Row = Dict[str, Any]

REPORT_SCHEMA_VERSION = 1
OUTPUT_FORMATS = ("csv", "json", "human")


@dataclass(frozen=True)
class InequalityCheck:
    """One inequality ``lhs <relation> rhs`` between exact numbers."""

    label: str
    lhs: Exact
    rhs: Exact
    relation: str = "<="

    def __post_init__(self):
        if self.relation not in ("<=", "=="):
            raise ValueError(f"Unsupported relation: {self.relation}")

    @property
    def holds(self) -> bool:
        if self.relation == "==":
            return self.lhs == self.rhs
        return self.lhs <= self.rhs

    @property
    def slack(self) -> Fraction:
        return Fraction(self.rhs) - Fraction(self.lhs)


@dataclass(frozen=True)
class VerificationReport:
    """One lemma or theorem instance with all of its checked inequalities."""

    subject: str
    params: Mapping[str, Any] = field(default_factory=dict)
    checks: Tuple[InequalityCheck, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(check.holds for check in self.checks)

    @property
    def failures(self) -> List[InequalityCheck]:
        return [check for check in self.checks if not check.holds]

    @property
    def min_slack(self) -> Optional[Fraction]:
        if not self.checks:
            return None
        return min(check.slack for check in self.checks)

    def extend(self, checks: Iterable[InequalityCheck]) -> "VerificationReport":
        return VerificationReport(
            self.subject, self.params, self.checks + tuple(checks), self.notes
        )

    def to_rows(self) -> List[Row]:
        params = ";".join(f"{key}={value}" for key, value in self.params.items())
        return [
            {
                "subject": self.subject,
                "params": params,
                "check": check.label,
                "lhs": Fraction(check.lhs),
                "relation": check.relation,
                "rhs": Fraction(check.rhs),
                "slack": check.slack,
                "holds": check.holds,
            }
            for check in self.checks
        ]


def merge_reports(subject: str, reports: Sequence[VerificationReport], **params):
    """Concatenate the checks of several reports under one subject."""
    checks: Tuple[InequalityCheck, ...] = ()
    notes: Tuple[str, ...] = ()
    for report in reports:
        checks += report.checks
        notes += report.notes
    return VerificationReport(subject, params, checks, notes)


def flatten_row(row: Mapping[str, Any]) -> Row:
    """
    Flatten one row for output.

    Every rational becomes two columns: ``name`` holding ``num/den`` and
    ``name_approx`` holding a float approximation.
    """
    flat: Row = {}
    for key, value in row.items():
        if isinstance(value, Fraction):
            flat[key] = fraction_text(value)
            flat[f"{key}_approx"] = fraction_approx(value)
        elif isinstance(value, bool):
            flat[key] = "true" if value else "false"
        elif isinstance(value, float):
            flat[key] = fraction_approx(value)
        elif value is None:
            flat[key] = ""
        else:
            flat[key] = value
    return flat


def _columns(rows: Sequence[Row]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def stringify_rows(rows: Sequence[Mapping[str, Any]]) -> List[Dict[str, str]]:
    """Rows exactly as they read back from the CSV rendering."""
    flat = [flatten_row(row) for row in rows]
    columns = _columns(flat)
    return [{column: str(row.get(column, "")) for column in columns} for row in flat]


def read_csv_rows(text: str) -> List[Dict[str, str]]:
    """Parse CSV produced by :class:`ReportWriter` back into string rows."""
    return [dict(row) for row in csv.DictReader(io.StringIO(text))]


class ReportWriter:
    """Renders report rows as csv, json or a rich table."""

    def __init__(self, output_format: str = "human", console: Optional[Console] = None):
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(
                f"Unknown output format: {output_format} "
                f"(expected one of {', '.join(OUTPUT_FORMATS)})"
            )
        self.output_format = output_format
        self.console = console or Console()

    def render(self, command: str, rows: Sequence[Mapping[str, Any]], passed: bool) -> str:
        if self.output_format == "csv":
            return self.render_csv(rows)
        if self.output_format == "json":
            return self.render_json(command, rows, passed)
        buffer = io.StringIO()
        Console(file=buffer, width=160, no_color=True).print(
            self.build_table(command, rows, passed)
        )
        return buffer.getvalue()

    def render_csv(self, rows: Sequence[Mapping[str, Any]]) -> str:
        flat = [flatten_row(row) for row in rows]
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=_columns(flat), lineterminator="\n")
        writer.writeheader()
        for row in flat:
            writer.writerow(row)
        return buffer.getvalue()

    def render_json(
        self, command: str, rows: Sequence[Mapping[str, Any]], passed: bool
    ) -> str:
        document = {
            "schema": REPORT_SCHEMA_VERSION,
            "command": command,
            "passed": passed,
            "rows": [flatten_row(row) for row in rows],
        }
        return json.dumps(document, indent=2) + "\n"

    def build_table(
        self, command: str, rows: Sequence[Mapping[str, Any]], passed: bool
    ) -> Table:
        verdict = "[green]PASS[/green]" if passed else "[red]FAIL[/red]"
        table = Table(title=f"{command} ({verdict})", box=box.ROUNDED)
        flat = [flatten_row(row) for row in rows]
        columns = [c for c in _columns(flat) if not c.endswith("_approx")]
        for column in columns:
            table.add_column(column, style="cyan" if column == columns[0] else "white")
        for row in flat:
            cells = []
            for column in columns:
                cell = str(row.get(column, ""))
                if column in ("holds", "verdict", "passed"):
                    cell = "[green]✓[/green]" if cell == "true" else "[red]✗[/red]"
                elif f"{column}_approx" in row:
                    # integers print as such, other rationals as their float
                    if cell.endswith("/1"):
                        cell = cell[:-2]
                    else:
                        cell = str(row[f"{column}_approx"])
                cells.append(cell)
            table.add_row(*cells)
        return table

    def emit(
        self,
        command: str,
        rows: Sequence[Mapping[str, Any]],
        passed: bool,
        out: Optional[str] = None,
    ) -> str:
        """Render, then print to the console or write to ``out``."""
        text = self.render(command, rows, passed)
        if out:
            with open(out, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        elif self.output_format == "human":
            self.console.print(self.build_table(command, rows, passed))
        else:
            self.console.file.write(text)
            self.console.file.flush()
        return text
