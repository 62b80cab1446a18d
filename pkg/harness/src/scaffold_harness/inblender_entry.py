"""Entry script executed by Blender in background mode.

Usage:
    blender --background --factory-startup --python inblender_entry.py -- \
        --addon ADDON.py --manifest MANIFEST.json --report REPORT.json \
        [--script EVENTS.json]

Adds the harness source tree to sys.path (for scaffold_panel_runtime and
scaffold_harness), runs the host checks, and writes the report JSON.  The
outer runner derives the exit code from the report.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

SRC_DIR = Path(__file__).resolve().parent.parent


def main() -> None:
    if str(SRC_DIR) not in sys.path:
        sys.path.insert(0, str(SRC_DIR))

    argv = sys.argv
    args = argv[argv.index("--") + 1 :] if "--" in argv else argv[1:]
    parser = argparse.ArgumentParser()
    parser.add_argument("--addon", required=True)
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--report", required=True)
    parser.add_argument("--script")
    options = parser.parse_args(args)

    from scaffold_harness import hostcheck

    report = hostcheck.run_harness(options.addon, options.manifest, options.script)
    report_path = Path(options.report)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(
        json.dumps(report, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    print(f"harness report written to {report_path}")


if __name__ == "__main__":
    main()
