#!/usr/bin/env python3
"""Run the bundled theorem-check battery through the library API.

The same battery backs `dimlab check`; reports are plain JSON/CSV and the
digest (timings and output paths excluded) is byte-stable for a fixed
config and seed.
"""

import json
import tempfile
from pathlib import Path

from dimlab import cli

cfg = cli.default_config()
print("sets:", ", ".join(cfg["sets"]))
print("checks:", ", ".join(entry["check"] for entry in cfg["checks"]))

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "battery"
    report, exit_code = cli.run_battery(dict(cfg, out_dir=str(out)), out)
    print(f"\nexit code {exit_code}, digest {report['digest'][:16]}")
    for v in report["verdicts"]:
        state = "n/a " if not v["applicable"] else ("PASS" if v["passed"] else "FAIL")
        print(f"  [{state}] {v['name']:<24} lhs={v['lhs']:.4f} rhs={v['rhs']:.4f} "
              f"slack={v['slack']}")

    # every check's raw samples land in a CSV next to the report
    files = sorted(p.name for p in out.iterdir())
    print("\nreport files:", ", ".join(files))
