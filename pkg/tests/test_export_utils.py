"""
Tests for export utilities module.

Tests report assembly, validation, and JSON/Markdown rendering.

Author: Harsh
"""

import json
import pytest
from currentkit import __version__
from currentkit.export_utils import (
    SCHEMA_VERSION,
    build_report,
    validate_report,
    stable_view,
    export_to_json,
    export_to_markdown,
    save_export_file
)


@pytest.fixture
def sample_report():
    """Provide a small intersect report."""
    return build_report(
        "intersect",
        {"surface": "punctured_torus", "radius": 6},
        {
            "value": 1.0,
            "stabilized": True,
            "per_atom": [{"atom": "a", "weight": 1.0, "contribution": 1.0}],
        },
        0.1234567891,
    )


@pytest.mark.unit
class TestBuildReport:
    """Test report assembly."""

    def test_metadata_fields(self, sample_report):
        """Test that every metadata field is filled in."""
        metadata = sample_report["report_metadata"]

        assert metadata["schema_version"] == SCHEMA_VERSION
        assert metadata["command"] == "intersect"
        assert metadata["package_version"] == __version__
        assert metadata["wall_time_seconds"] == pytest.approx(0.123457)

    def test_explicit_package_version(self):
        """Test that an explicit package version is kept."""
        report = build_report("enumerate", {}, {}, 0.0, package_version="9.9.9")

        assert report["report_metadata"]["package_version"] == "9.9.9"

    def test_config_and_result_echoed(self, sample_report):
        """Test that config and result are carried verbatim."""
        assert sample_report["config"] == {"surface": "punctured_torus", "radius": 6}
        assert sample_report["result"]["value"] == 1.0


@pytest.mark.unit
class TestValidateReport:
    """Test report validation."""

    def test_valid_report(self, sample_report):
        """Test that a built report has no problems."""
        assert validate_report(sample_report) == []

    def test_missing_sections(self):
        """Test that missing top-level sections are reported."""
        problems = validate_report({"result": {}})

        assert "missing or non-object field: report_metadata" in problems
        assert "missing or non-object field: config" in problems

    def test_missing_metadata_key(self, sample_report):
        """Test that a missing metadata key is reported."""
        del sample_report["report_metadata"]["package_version"]

        assert validate_report(sample_report) == ["missing report_metadata.package_version"]

    def test_unsupported_schema_version(self, sample_report):
        """Test that a foreign schema version is rejected."""
        sample_report["report_metadata"]["schema_version"] = "0.1"

        assert any("unsupported schema_version" in p for p in validate_report(sample_report))


@pytest.mark.unit
class TestRendering:
    """Test JSON and Markdown rendering."""

    def test_stable_view_drops_wall_time(self, sample_report):
        """Test that timing is removed and the original is untouched."""
        view = stable_view(sample_report)

        assert "wall_time_seconds" not in view["report_metadata"]
        assert "wall_time_seconds" in sample_report["report_metadata"]

    def test_stable_view_equal_for_reruns(self):
        """Test that two runs differing only in timing compare equal."""
        first = build_report("enumerate", {"r": 1}, {"count": 3}, 0.5)
        second = build_report("enumerate", {"r": 1}, {"count": 3}, 2.5)

        assert stable_view(first) == stable_view(second)

    def test_export_to_json_sorted(self, sample_report):
        """Test that JSON output has sorted keys and round-trips."""
        text = export_to_json(sample_report)

        assert json.loads(text) == sample_report
        assert text.index('"config"') < text.index('"report_metadata"') < text.index('"result"')

    def test_export_to_markdown(self, sample_report):
        """Test the Markdown view of a report."""
        markdown = export_to_markdown(sample_report)

        assert markdown.startswith("# CurrentKit report: intersect")
        assert "## Metadata" in markdown
        assert "| value | 1 |" in markdown
        assert "## per_atom" in markdown
        assert "| atom | weight | contribution |" in markdown


@pytest.mark.unit
class TestSaveExportFile:
    """Test writing rendered reports."""

    def test_save_to_explicit_path(self, sample_report, tmp_path):
        """Test saving JSON to a given path."""
        target = tmp_path / "report.json"
        path = save_export_file(export_to_json(sample_report), str(target))

        assert path == str(target)
        assert json.loads(target.read_text(encoding="utf-8")) == sample_report

    def test_default_name(self, sample_report, tmp_path, monkeypatch):
        """Test the timestamped default file name."""
        monkeypatch.chdir(tmp_path)
        path = save_export_file(export_to_markdown(sample_report), format_type="table")

        assert path.startswith("currentkit_report_")
        assert path.endswith(".md")
        assert (tmp_path / path).read_text(encoding="utf-8").endswith("\n")


@pytest.mark.unit
class TestStableViewConfig:
    """Test that run settings without effect on results are ignored."""

    def test_thread_count_dropped(self):
        """Test that reports differing only in threads compare equal."""
        first = build_report("systole", {"radius": 3, "threads": 1}, {"systole": 1.0}, 0.5)
        second = build_report("systole", {"radius": 3, "threads": 8}, {"systole": 1.0}, 0.7)

        assert stable_view(first) == stable_view(second)
        assert "threads" not in stable_view(first)["config"]
        assert first["config"]["threads"] == 1
