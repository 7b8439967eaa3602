"""A magnetic field at g != 2 makes the packet drift along B, and only at
g = 2 does a freely precessing OAM stay locked to the momentum.

Run:  python demos/03_drift_and_helicity.py [output_dir]
"""
import sys
import warnings
from pathlib import Path

from vortexpacket import svg
from vortexpacket.scenarios import run_helicity_watch, run_magnetic_drift

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

print(" g   l   measured drift   e hbar l (1-g/2) B/(m p)")
for l in (1, 2, 5):
    for row in run_magnetic_drift((0.0, 1.0, 2.0), l=l, periods=10):
        print(f"{row.g:3.1f} {l:3d} {row.measured:16.10f} {row.predicted:16.10f}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    rows = run_helicity_watch((2.0, 1.0, 0.0), periods=5)
for r in rows:
    note = f"validity warning at t = {r.warn_time:.4f}" if r.warned else "no warning"
    print(f"g = {r.g:.0f}: max |helicity - l| = {r.max_deviation:.3e}, {note}")
svg.save(svg.line_plot([(f"g={r.g:g}", r.trajectory.t, r.trajectory.helicity) for r in rows],
                       "helicity of a precessing OAM", "t", "l.p/|p|"), out / "helicity.svg")
print(f"plot in {out}/helicity.svg")
