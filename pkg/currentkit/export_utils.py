"""
Export Utilities for CurrentKit

Builds the versioned JSON report every command emits, validates it against
the published layout, and renders a Markdown table view derived from it.

Author: Harsh
"""

import json
from datetime import datetime
from typing import Any, Dict, List, Mapping, Optional

SCHEMA_VERSION = "1.0"
REQUIRED_METADATA = ("schema_version", "command", "package_version", "wall_time_seconds")
VOLATILE_FIELDS = ("wall_time_seconds",)
# run settings that must not change a result
VOLATILE_CONFIG = ("threads",)


def build_report(
    command: str,
    config: Mapping[str, Any],
    result: Mapping[str, Any],
    wall_time: float,
    package_version: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Assemble the report of one command.

    Args:
        command: CLI subcommand name
        config: fully resolved job configuration (echoed for reproducibility)
        result: command result
        wall_time: elapsed seconds
        package_version: defaults to the installed currentkit version

    Returns:
        Report dictionary with report_metadata, config and result

    Example:
        >>> report = build_report("intersect", {"surface": "punctured_torus"}, {"value": 1.0}, 0.01)
        >>> report["report_metadata"]["schema_version"]
        '1.0'
    """
    if package_version is None:
        from . import __version__ as package_version
    return {
        "report_metadata": {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "package_version": package_version,
            "wall_time_seconds": round(float(wall_time), 6),
        },
        "config": dict(config),
        "result": dict(result),
    }


def validate_report(report: Mapping[str, Any]) -> List[str]:
    """
    Check a report against the published layout.

    Returns:
        List of problems; empty when the report is valid
    """
    problems = []
    for key in ("report_metadata", "config", "result"):
        if not isinstance(report.get(key), Mapping):
            problems.append(f"missing or non-object field: {key}")
    metadata = report.get("report_metadata")
    if isinstance(metadata, Mapping):
        for key in REQUIRED_METADATA:
            if key not in metadata:
                problems.append(f"missing report_metadata.{key}")
        if metadata.get("schema_version") not in (None, SCHEMA_VERSION):
            problems.append(f"unsupported schema_version {metadata.get('schema_version')!r}")
    return problems


def stable_view(report: Mapping[str, Any]) -> Dict[str, Any]:
    """Report without timing fields or the thread count, for determinism comparisons."""
    view = json.loads(json.dumps(report))
    for key in VOLATILE_FIELDS:
        view.get("report_metadata", {}).pop(key, None)
    for key in VOLATILE_CONFIG:
        view.get("config", {}).pop(key, None)
    return view


def export_to_json(report: Mapping[str, Any]) -> str:
    """Serialize a report with sorted keys and two-space indentation."""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def _table(rows: List[Mapping[str, Any]]) -> List[str]:
    headers = list(rows[0].keys())
    lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
    for row in rows:
        lines.append("| " + " | ".join(_cell(row.get(h, "")) for h in headers) + " |")
    return lines


def export_to_markdown(report: Mapping[str, Any]) -> str:
    """
    Render a report as Markdown.

    Scalars of the result become a key/value table; every list of objects
    becomes its own table. The JSON stays the source of truth.
    """
    metadata = report.get("report_metadata", {})
    lines = [f"# CurrentKit report: {metadata.get('command', 'unknown')}", ""]
    lines.append("## Metadata")
    for key in REQUIRED_METADATA:
        lines.append(f"- **{key}**: {metadata.get(key)}")
    lines.append("")

    result = report.get("result", {})
    scalars = {k: v for k, v in result.items() if not isinstance(v, (list, dict))}
    if scalars:
        lines.append("## Result")
        lines.extend(_table([{"field": k, "value": v} for k, v in scalars.items()]))
        lines.append("")
    for key, value in result.items():
        if isinstance(value, list) and value and all(isinstance(v, Mapping) for v in value):
            lines.append(f"## {key}")
            lines.extend(_table(value))
            lines.append("")
        elif isinstance(value, (list, dict)):
            lines.append(f"## {key}")
            lines.append(f"`{json.dumps(value, sort_keys=True)}`")
            lines.append("")
    return "\n".join(lines)


def save_export_file(content: str, path: Optional[str] = None, format_type: str = "json") -> str:
    """
    Write rendered content to a file.

    Args:
        content: JSON or Markdown text
        path: target path; a timestamped name is used when omitted
        format_type: "json" or "table"

    Returns:
        The path written

    Raises:
        IOError: If file cannot be written
    """
    if path is None:
        timestamp = datetime.now().strftime("%Y-%m-%d_%H%M%S")
        extension = "json" if format_type == "json" else "md"
        path = f"currentkit_report_{timestamp}.{extension}"
    with open(path, "w", encoding="utf-8") as f:
        f.write(content)
        if not content.endswith("\n"):
            f.write("\n")
    return path
