"""Command-line driver for the headless add-on checks.

Exit code 0 iff the add-on registered, its panel was found, and no
operator finished with an exception status.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import hostcheck, runner


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaffold-harness",
        description="Install a generated add-on headlessly, smoke its operators, and report.",
    )
    parser.add_argument("--addon", required=True, help="generated add-on file")
    parser.add_argument("--manifest", required=True, help="generated manifest JSON")
    parser.add_argument("--report", required=True, help="where to write the report JSON")
    parser.add_argument("--script", help="optional event script to replay")
    parser.add_argument(
        "--mode",
        choices=("auto", "blender", "stub"),
        default="auto",
        help="auto uses Blender when available, else the in-process stand-in",
    )
    parser.add_argument("--blender", help="path to the Blender executable")
    parser.add_argument("--events-out", help="also write the captured event log here")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    report = runner.run(
        addon_path=args.addon,
        manifest_path=args.manifest,
        report_path=args.report,
        script_path=args.script,
        mode=args.mode,
        blender=args.blender,
    )
    if args.events_out and report.get("events") is not None:
        Path(args.events_out).write_text(
            json.dumps(report["events"], ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    status = hostcheck.report_exit_code(report)
    summary = "ok" if status == 0 else "failed"
    print(
        f"harness {summary}: backend={report.get('backend')} registered={report['registered']} "
        f"panel_found={report['panel_found']} operators={len(report['operators'])}"
    )
    return status


if __name__ == "__main__":
    sys.exit(main())
