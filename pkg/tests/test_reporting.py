"""Tests for verification reports and their renderings."""

import io
import json
from fractions import Fraction

import jsonschema
import pytest
from rich.console import Console

from linniksieve.reporting import (
    InequalityCheck,
    ReportWriter,
    VerificationReport,
    flatten_row,
    merge_reports,
    read_csv_rows,
    stringify_rows,
)
from linniksieve.schema import get_report_schema
from linniksieve.utils import (
    as_fraction,
    ceil_power,
    compare_power,
    floor_power,
    fraction_text,
    integer_log,
    iroot,
)

ROWS = [
    {"N": 10, "ratio": Fraction(1, 3), "holds": True, "bound": 2.5, "note": None},
    {"N": 20, "ratio": Fraction(4), "holds": False, "bound": "vacuous", "note": "x"},
]


class TestInequalityCheck:
    def test_holds_and_slack(self):
        """Test verdict and slack of a <= check."""
        check = InequalityCheck("a <= b", 1, Fraction(3, 2))
        assert check.holds
        assert check.slack == Fraction(1, 2)

    def test_equality_relation(self):
        """Test the == relation."""
        assert InequalityCheck("eq", 2, 2, "==").holds
        assert not InequalityCheck("eq", 2, 3, "==").holds

    def test_rejects_unknown_relation(self):
        """Test rejection of an unknown relation."""
        with pytest.raises(ValueError):
            InequalityCheck("bad", 1, 2, "<")


class TestVerificationReport:
    def setup_method(self):
        self.report = VerificationReport(
            "demo",
            {"n": 5},
            (InequalityCheck("ok", 1, 2), InequalityCheck("broken", 3, 2)),
            ("note",),
        )

    def test_passed_and_failures(self):
        """Test the verdict and failures of a report."""
        assert not self.report.passed
        assert [c.label for c in self.report.failures] == ["broken"]
        assert self.report.min_slack == -1

    def test_empty_report_passes(self):
        """Test that a report without checks passes."""
        report = VerificationReport("empty")
        assert report.passed
        assert report.min_slack is None

    def test_extend_is_immutable(self):
        """Test that extend returns a new report."""
        extended = self.report.extend([InequalityCheck("more", 0, 0)])
        assert len(extended.checks) == 3
        assert len(self.report.checks) == 2

    def test_rows(self):
        """Test one row per check."""
        rows = self.report.to_rows()
        assert rows[0]["params"] == "n=5"
        assert rows[1]["holds"] is False
        assert rows[1]["slack"] == -1

    def test_merge(self):
        """Test merging reports."""
        merged = merge_reports("both", [self.report, VerificationReport("x", {}, (), ("y",))], N=3)
        assert merged.params == {"N": 3}
        assert len(merged.checks) == 2
        assert merged.notes == ("note", "y")


class TestFlatten:
    def test_fraction_columns(self):
        """Test the num/den and approx columns."""
        flat = flatten_row(ROWS[0])
        assert flat["ratio"] == "1/3"
        assert flat["ratio_approx"] == "0.333333333333"
        assert flat["holds"] == "true"
        assert flat["bound"] == "2.5"
        assert flat["note"] == ""
        assert flat["N"] == 10

    def test_integers_keep_denominator(self):
        """Test integer-valued fractions as n/1."""
        assert flatten_row({"x": Fraction(4)})["x"] == "4/1"


class TestReportWriter:
    def setup_method(self):
        self.buffer = io.StringIO()
        self.console = Console(file=self.buffer, width=160, no_color=True)

    def test_csv_round_trip(self):
        """Test CSV rendering read back."""
        writer = ReportWriter("csv", self.console)
        text = writer.render("demo", ROWS, False)
        assert text.splitlines()[0] == "N,ratio,ratio_approx,holds,bound,note"
        assert read_csv_rows(text) == stringify_rows(ROWS)

    def test_json_matches_schema(self):
        """Test JSON against the report schema."""
        writer = ReportWriter("json", self.console)
        document = json.loads(writer.render("demo", ROWS, False))
        jsonschema.validate(document, get_report_schema())
        assert document["schema"] == 1
        assert document["passed"] is False
        assert document["rows"][1]["ratio"] == "4/1"

    def test_human_table(self):
        """Test the rich table rendering."""
        writer = ReportWriter("human", self.console)
        text = writer.render("demo", ROWS, True)
        assert "demo" in text
        assert "PASS" in text
        # integers drop the /1, other rationals print approximately
        assert "0.333333333333" in text
        assert "ratio_approx" not in text

    def test_emit_writes_file(self, tmp_path):
        """Test writing a report to a file."""
        out = tmp_path / "report.csv"
        writer = ReportWriter("csv", self.console)
        writer.emit("demo", ROWS, True, str(out))
        assert read_csv_rows(out.read_text()) == stringify_rows(ROWS)
        assert self.buffer.getvalue() == ""

    def test_emit_to_console(self):
        """Test writing a report to the console."""
        ReportWriter("json", self.console).emit("demo", ROWS, True)
        assert json.loads(self.buffer.getvalue())["command"] == "demo"

    def test_unknown_format(self):
        """Test rejection of an unknown format."""
        with pytest.raises(ValueError, match="Unknown output format"):
            ReportWriter("xml")


class TestExactHelpers:
    @pytest.mark.parametrize("value,expected", [(0.5, Fraction(1, 2)), (0.37, Fraction(37, 100)), ("3/4", Fraction(3, 4)), (7, Fraction(7))])
    def test_as_fraction(self, value, expected):
        """Test exact conversion of user input."""
        assert as_fraction(value) == expected

    def test_as_fraction_rejects_infinity(self):
        """Test rejection of non-finite floats."""
        with pytest.raises(ValueError):
            as_fraction(float("inf"))

    def test_iroot(self):
        """Test integer roots."""
        assert iroot(10**18, 3) == 10**6
        assert iroot(10**18 - 1, 3) == 10**6 - 1
        assert iroot(2**100, 5) == 2**20
        assert iroot(1, 7) == 1
        with pytest.raises(ValueError):
            iroot(-1, 2)

    def test_floor_and_ceil_power(self):
        """Test exact floors and ceilings of powers."""
        assert floor_power(100, "1/2") == 10
        assert ceil_power(100, "1/2") == 10
        assert floor_power(20, "9/10") == 14
        assert ceil_power(20, "9/10") == 15
        assert floor_power(10**4, "2/5") == 39
        assert floor_power("201/2", "1/2") == 10

    def test_compare_power(self):
        """Test exact power comparison."""
        assert compare_power(10, 100, "1/2") == 0
        assert compare_power(11, 100, "1/2") == 1
        assert compare_power(Fraction(1, 101), 10, -2) == -1
        assert compare_power(Fraction(1, 100), 10, -2) == 0
        with pytest.raises(ValueError):
            compare_power(-1, 2, 1)

    def test_integer_log_and_text(self):
        """Test integer logs and fraction text."""
        assert integer_log(100, 3) == 4
        assert integer_log(1, 2) == 0
        assert fraction_text(3) == "3/1"
        assert fraction_text(Fraction(-2, 6)) == "-1/3"
