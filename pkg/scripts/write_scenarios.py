#!/usr/bin/env python3
"""Regenerate the bundled scenario and pattern files under scenarios/.

The checked-in JSON must stay in sync with the builders in
hmlbn.scenarios / hmlbn.sequences; tests compare them.
"""

import json
from pathlib import Path

from hmlbn.scenarios import BUNDLED_SCENARIOS
from hmlbn.sequences import BUNDLED_PATTERNS

ROOT = Path(__file__).resolve().parent.parent


def main():
    scenario_dir = ROOT / "scenarios"
    pattern_dir = scenario_dir / "patterns"
    pattern_dir.mkdir(parents=True, exist_ok=True)
    for name, builder in BUNDLED_SCENARIOS.items():
        path = scenario_dir / f"{name}.json"
        path.write_text(json.dumps(builder(), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"wrote {path}")
    for name, builder in BUNDLED_PATTERNS.items():
        path = pattern_dir / f"{name}.json"
        doc = {"name": name, "items": builder()}
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
