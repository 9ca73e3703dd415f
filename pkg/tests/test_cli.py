"""
Tests for the command-line interface.

Tests argument handling, report layout, exit codes and output formats.

Author: Harsh
"""

import io
import json
import pytest
import yaml
import cli
from currentkit.export_utils import export_to_json, stable_view


def run_cli(*argv):
    """Run the CLI and return (exit status, parsed JSON report)."""
    stream = io.StringIO()
    status = cli.main(list(argv), stream=stream)
    return status, json.loads(stream.getvalue())


@pytest.fixture
def config_args(config_yaml_file):
    """Point the CLI at the temporary test configuration."""
    return ["--config", str(config_yaml_file)]


@pytest.mark.unit
class TestIntersectCommand:
    """Test the intersect command."""

    def test_generators_meet_once(self, config_args):
        """Test i(delta_a, b) = 1 through the CLI."""
        status, report = run_cli(
            "intersect", "--surface", "punctured_torus", "--current", '[["a", 1]]', "--class", "b",
            "--radius", "6", *config_args
        )

        assert status == 0
        assert report["result"]["value"] == pytest.approx(1.0)
        assert report["report_metadata"]["command"] == "intersect"
        assert report["report_metadata"]["schema_version"] == "1.0"

    def test_config_echo(self, config_args):
        """Test that the resolved configuration is echoed."""
        _, report = run_cli(
            "intersect", "--current", '[["a", 1]]', "--class", "b", *config_args
        )

        assert report["config"]["surface"] == "punctured_torus"
        assert report["config"]["radius"] == 5
        assert report["config"]["counting"]["element_cap"] == 200000
        assert report["result"]["value"] == pytest.approx(1.0)

    def test_slope_argument(self, config_args):
        """Test the slope shorthand for torus curves."""
        status, report = run_cli(
            "intersect", "--current", '[["a", 1]]', "--class", "slope:1/2", "--radius", "6", *config_args
        )

        assert status == 0
        assert report["result"]["value"] == pytest.approx(2.0)

    def test_unknown_surface(self, config_args):
        """Test exit status 2 for an unknown surface."""
        status, report = run_cli(
            "intersect", "--surface", "klein_bottle", "--current", '[["a", 1]]', "--class", "b", *config_args
        )

        assert status == 2
        assert report["result"]["error"]["type"] == "UnknownSurface"

    def test_invalid_current(self, config_args):
        """Test exit status 2 for a peripheral atom."""
        status, report = run_cli(
            "intersect", "--current", '[["abAB", 1]]', "--class", "b", *config_args
        )

        assert status == 2
        assert report["result"]["error"]["type"] == "InvalidCurrent"

    def test_element_cap(self, config_args, monkeypatch):
        """Test exit status 3 when the ball exceeds the cap."""
        monkeypatch.setenv("CURRENTKIT_ELEMENT_CAP", "10")
        status, report = run_cli(
            "intersect", "--current", '[["a", 1]]', "--class", "b", "--radius", "4", *config_args
        )

        assert status == 3
        assert report["result"]["error"]["type"] == "ResourceLimit"


@pytest.mark.unit
class TestOtherCommands:
    """Test the remaining subcommands on the punctured torus."""

    def test_selfint(self, config_args):
        """Test the double-point count of abaB."""
        status, report = run_cli("selfint", "--class", "abaB", "--radius", "6", *config_args)

        assert status == 0
        assert report["result"]["self_intersection"] == 1

    def test_pairing(self, config_args):
        """Test the pairing command with the symmetry check."""
        status, report = run_cli(
            "pairing", "--current", '[["a", 1]]', "--other-current", '[["b", 2]]', "--check-symmetry",
            "--radius", "6", *config_args
        )

        assert status == 0
        assert report["result"]["value"] == pytest.approx(2.0)

    def test_enumerate(self, config_args):
        """Test listing classes of length at most two."""
        status, report = run_cli("enumerate", "--max-len", "2", *config_args)

        assert status == 0
        assert report["result"]["count"] == 6
        assert report["result"]["classes"][0]["class"] == "a"

    def test_liouville_check(self, config_args):
        """Test that i(L, c) matches hyperbolic length."""
        status, report = run_cli(
            "liouville-check", "--surface", "sphere3", "--max-len", "3", "--tolerance", "1e-7", *config_args
        )

        assert status == 0
        assert report["result"]["passed"] is True
        assert report["result"]["classes_checked"] > 0

    def test_somewhat_short_by_class(self, config_args):
        """Test the crossing certificate for the axis of b."""
        status, report = run_cli(
            "somewhat-short", "--current", '[["a", 1]]', "--class", "b", "--radius", "3", *config_args
        )

        assert status == 0
        assert report["result"]["verdict"] == "crossing_found"

    def test_somewhat_short_bad_endpoints(self, config_args):
        """Test exit status 2 for malformed endpoints."""
        status, report = run_cli(
            "somewhat-short", "--current", '[["a", 1]]', "--endpoints", "one,two", *config_args
        )

        assert status == 2
        assert report["result"]["error"]["type"] == "InputError"

    def test_simplify(self, config_args):
        """Test simplification of abaB."""
        status, report = run_cli(
            "simplify", "--current", '[["a", 1], ["b", 1]]', "--class", "abaB", "--radius", "6", *config_args
        )

        assert status == 0
        assert report["result"]["initial_self_intersection"] == 1
        assert report["result"]["intersection_after"] <= report["result"]["intersection_before"]

    def test_surgery_on_simple_curve(self, config_args):
        """Test exit status 2 when there is no double point."""
        status, report = run_cli(
            "surgery", "--current", '[["a", 1]]', "--class", "ab", "--radius", "6", *config_args
        )

        assert status == 2
        assert report["result"]["error"]["type"] == "NoCrossing"

    def test_lengths(self, config_args):
        """Test the normalized Hitchin length table."""
        status, report = run_cli("lengths", "--rep", "sym_power", "--dimension", "3", "--max-len", "2", *config_args)

        assert status == 0
        assert report["result"]["family"] == ["a", "b", "ab"]
        entries = dict((word, value) for word, value in report["result"]["entries"])
        assert entries["a"] + entries["b"] + entries["ab"] == pytest.approx(1.0)

    def test_trichotomy_from_table(self, config_args, tmp_path):
        """Test the trichotomy of a length table read from a file."""
        table_file = tmp_path / "table.json"
        table_file.write_text(json.dumps([["a", 0.0], ["b", 1.0], ["ab", 1.0], ["aB", 1.0]]))
        status, report = run_cli(
            "trichotomy", "--table-file", str(table_file), "--count-radius", "6", *config_args
        )

        assert status == 0
        assert report["result"]["special_curves"] == ["a"]

    def test_decompose(self, config_args):
        """Test decomposition of delta_a + delta_b with reconstruction."""
        status, report = run_cli(
            "decompose", "--current", '[["a", 1], ["b", 1]]', "--radius", "2", "--count-radius", "6",
            "--check-reconstruction", *config_args
        )

        assert status == 0
        assert report["result"]["special_curves"] == []
        assert report["result"]["mass_conserved"] is True
        assert report["result"]["reconstruction_gap"] == pytest.approx(0.0)
        assert report["result"]["zero_detector"]["verdict"] == "none_up_to_radius"


@pytest.mark.unit
class TestOutputAndConfig:
    """Test output formats and configuration handling."""

    def test_table_format(self, config_args):
        """Test the Markdown view."""
        stream = io.StringIO()
        status = cli.main(["enumerate", "--max-len", "1", "--format", "table", *config_args], stream=stream)

        assert status == 0
        assert stream.getvalue().startswith("# CurrentKit report: enumerate")

    def test_output_file(self, config_args, tmp_path):
        """Test writing the report to a file."""
        target = tmp_path / "report.json"
        stream = io.StringIO()
        status = cli.main(["enumerate", "--max-len", "1", "--output", str(target), *config_args], stream=stream)

        assert status == 0
        assert stream.getvalue() == ""
        assert json.loads(target.read_text())["result"]["count"] == 2

    def test_missing_explicit_config(self, tmp_path):
        """Test exit status 2 for a missing --config file."""
        status, report = run_cli("enumerate", "--max-len", "1", "--config", str(tmp_path / "absent.yaml"))

        assert status == 2
        assert report["result"]["error"]["type"] == "InputError"

    def test_defaults_without_config(self, tmp_path, monkeypatch):
        """Test that built-in defaults apply when config.yaml is absent."""
        monkeypatch.chdir(tmp_path)
        status, report = run_cli("enumerate", "--max-len", "1")

        assert status == 0
        assert report["config"]["radius"] == 6

    def test_missing_required_argument(self):
        """Test that argparse rejects a missing --current."""
        with pytest.raises(SystemExit) as exc_info:
            cli.main(["intersect", "--class", "b"])

        assert exc_info.value.code == 2


@pytest.mark.unit
class TestDeterminismAndErrors:
    """Test thread independence of reports and the mapping of bad input."""

    def test_thread_count_does_not_change_report(self, config_args):
        """Test that 1 and 8 threads give the same report apart from timing."""
        command = ["systole", "--current", '[["a", 1], ["b", 1]]', "--radius", "3", "--count-radius", "6"]
        _, single = run_cli(*command, "--threads", "1", *config_args)
        _, pooled = run_cli(*command, "--threads", "8", *config_args)

        assert "threads" not in single["config"]
        assert stable_view(single) == stable_view(pooled)
        assert export_to_json(single["result"]) == export_to_json(pooled["result"])

    def test_invalid_yaml_config(self, invalid_yaml_file):
        """Test exit status 2 for a config that is not YAML."""
        status, report = run_cli("enumerate", "--max-len", "1", "--config", str(invalid_yaml_file))

        assert status == 2
        assert "error" in report["result"]

    def test_non_numeric_setting(self, sample_config, tmp_path):
        """Test exit status 2 for a tolerance that is not a number."""
        sample_config["geometry"]["tol_pt"] = "tiny"
        config_file = tmp_path / "bad_value.yaml"
        config_file.write_text(yaml.dump(sample_config))

        status, report = run_cli("enumerate", "--max-len", "1", "--config", str(config_file))

        assert status == 2
        assert report["result"]["error"]["type"] == "ValueError"

    def test_tolerances_echoed(self, config_args):
        """Test that the counting tolerances appear in the config echo."""
        _, report = run_cli("enumerate", "--max-len", "1", *config_args)

        assert report["config"]["counting"]["tol_pt"] == pytest.approx(1e-9)
        assert report["config"]["counting"]["tol_class"] == pytest.approx(1e-9)
