#!/usr/bin/env python3
"""Regenerate the committed golden margins for the replication experiment.

Usage: python3 scripts/regen_golden.py
Writes tests/golden/sbm_replication.json from a fresh deterministic run.
"""

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from acceptance_support import run_sbm_replication  # noqa: E402


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        result = run_sbm_replication(Path(tmp))
    out = ROOT / "tests" / "golden" / "sbm_replication.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(result, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    print(
        "final margins: v_opt-random="
        f"{result['margin_vopt_minus_random'][-1]:.6f} "
        f"v_opt-mig={result['final_margin_vopt_minus_mig']:.6f}"
    )


if __name__ == "__main__":
    main()
