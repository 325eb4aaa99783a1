"""End-to-end pipeline: config -> CSV trajectories -> summary -> panels.

Drives the experiment runner exactly as the command line would (a shrunk
copy of a bundled preset), then renders regret/cost panels when the
comex-plots package is installed.
"""

import copy
import json
import subprocess
import sys
from pathlib import Path

from comex.cli import PRESETS, main

out_dir = Path("demo_results")
cfg = copy.deepcopy(PRESETS["paper-fig2b"])
cfg.update({"runs": 5, "out_dir": str(out_dir)})  # shrunk for a quick demo
cfg_path = out_dir / "fig2b_small.json"
out_dir.mkdir(exist_ok=True)
cfg_path.write_text(json.dumps(cfg, indent=2))

print(f"running: comex run {cfg_path}")
rc = main(["run", str(cfg_path)])
assert rc == 0

summary = json.loads((out_dir / "fig2b_summary.json").read_text())
for name, entry in summary["results"].items():
    final = entry["checkpoints"]["500"]
    print(f"{name:<18} R(500)={final['regret_mean']:8.1f}  L(500)={final['comm_mean']:10.1f}")

plot = subprocess.run(
    [
        "comex-plot", "--metric", "cost", "--log", "--self-test",
        "--out", str(out_dir / "fig2b_cost.png"),
        f"ComEx={out_dir / 'fig2b_comex_mpucb.csv'}",
        f"Full={out_dir / 'fig2b_full_mpucb.csv'}",
    ],
    capture_output=True, text=True,
)
if plot.returncode == 0:
    print(plot.stdout.strip())
else:
    print("comex-plot not installed; skipping panel rendering", file=sys.stderr)
