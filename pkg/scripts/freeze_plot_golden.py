"""Regenerate the golden plot hash used by the acceptance suite.

Run after any deliberate change to the SVG output format, then paste the
printed digest into GOLDEN_PLOT_SHA256 in tests/test_acceptance.py. The
scenario and script are the acceptance suite's own, imported from the test
module so the two can never drift apart.
"""

import hashlib
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from drivesim.analysis import render_plot
from drivesim.telemetry import LoopConfig, constant_input, run
from drivesim.world import load_scenario


def main():
    from test_acceptance import PLOT_DOC

    scenario = load_scenario(PLOT_DOC)
    log = run(scenario, LoopConfig(duration=12.0), constant_input())
    svg = render_plot(log, scenario)
    digest = hashlib.sha256(svg.encode()).hexdigest()
    out = Path(__file__).parent / "golden_plot.svg"
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out} ({len(svg)} bytes)")
    print(f'GOLDEN_PLOT_SHA256 = "{digest}"')


if __name__ == "__main__":
    main()
