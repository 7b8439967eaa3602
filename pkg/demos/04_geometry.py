"""Momentum-space geometry: the Berry phase of a loop is -l times its solid
angle, and the same curvature deforms the Poisson brackets.

Run:  python demos/04_geometry.py
"""
import numpy as np

from vortexpacket.berry import MomentumPath, berry_phase_loop
from vortexpacket.scenarios import run_berry_loop
from vortexpacket.symplectic import COORD_NAMES, build_frame, jacobi_residual
from vortexpacket.units import make_uniform_B

# A cone of opening angle alpha encloses 2 pi (1 - cos alpha).
for alpha in (0.3, 1.0, np.pi / 2, 2.5):
    t = np.linspace(0, 2 * np.pi, 2001)
    pts = np.stack([np.sin(alpha) * np.cos(t), np.sin(alpha) * np.sin(t), np.full_like(t, np.cos(alpha))], 1)
    pts[-1] = pts[0]
    res = berry_phase_loop(MomentumPath(pts), 1)
    cap = 2 * np.pi * (1 - np.cos(alpha))
    print(f"alpha = {alpha:.3f}: phase {res.phase:+.6f}, line integral {res.line_integral:+.6f}, "
          f"-cap {-cap:+.6f} (mod 2pi)")

# In a magnetic field the momentum itself traces such a cone once per period.
loop = run_berry_loop(l=1, tilt=0.3)
print(f"\none cyclotron turn: integrated Berry phase {loop.theta_berry:.10f}, cone value {loop.cone_phase:.10f}")

# Brackets at a generic point: positions no longer commute, and D = sqrt(det omega).
cfg = make_uniform_B([0.0, 0.3, 1.0])
p = [1.2, 0.5, 1.5]
frame = build_frame(np.zeros(3), p, 1, cfg)
print("\nbracket table {X_i, X_j}:")
print("      " + "".join(f"{n:>10}" for n in COORD_NAMES))
for i, n in enumerate(COORD_NAMES):
    print(f"{n:>6}" + "".join(f"{v:10.4f}" for v in frame.brackets[i]))
print(f"D = {frame.D:.12f}, sqrt(det omega) = {np.sqrt(np.linalg.det(frame.omega)):.12f}")
print(f"Jacobi residual {jacobi_residual(np.zeros(3), p, 1, cfg):.2e}")
