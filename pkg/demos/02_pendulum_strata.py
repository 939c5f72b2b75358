"""Pendulum strata, elliptic coordinates, and loss of equiregularity.

The vertical subsystem on the Engel and Cartan groups is a mathematical
pendulum.  This demo classifies covectors into the strata C1..C7, evaluates
the closed-form elliptic solutions against RK4, and locates the times where
the geodesic growth vector jumps.
"""
import math

import numpy as np

from carnotcurv import (Covector, build_group, classify_pendulum,
                        elliptic_coords, engel_h_from_chart,
                        equiregularity_loss_times, integrate_flow,
                        pendulum_closed_form)

engel = build_group("goursat:4")

print("=" * 70)
print("Stratum classification on the unit cylinder (Engel group)")
print("=" * 70)
samples = [
    ("oscillation", engel_h_from_chart(0.3, 0.8, 1.0)),
    ("rotation", engel_h_from_chart(0.3, 2.5, 1.0)),
    ("separatrix", engel_h_from_chart(0.4, math.sqrt(2 + 2 * math.cos(0.4)), 1.0)),
    ("stable equilibrium", engel_h_from_chart(0.0, 0.0, 1.0)),
    ("unstable equilibrium", engel_h_from_chart(math.pi, 0.0, 1.0)),
    ("circular", engel_h_from_chart(0.7, 1.2, 0.0)),
    ("rest", engel_h_from_chart(0.7, 0.0, 0.0)),
]
for label, h in samples:
    ch = classify_pendulum(engel, Covector.from_h(engel, h))
    print(f"  {label:>22}: {ch.stratum_label:4}  E = {ch.E:+.4f}  "
          f"abnormal = {ch.abnormal}")

print()
print("=" * 70)
print("Closed-form elliptic solution vs RK4 (stratum C₁)")
print("=" * 70)
cov = Covector.from_h(engel, engel_h_from_chart(0.3, 0.8, 1.0))
chart = elliptic_coords(engel, cov)
print(f"chart: k = {chart.k:.12f}, phi = {chart.phi:.12f}, "
      f"alpha = {chart.alpha}, K = {chart.K:.12f}")
traj = integrate_flow(engel, cov, 5.0, 1e-3)
hs = traj.h_series()
sup = 0.0
for i in range(0, len(traj.ts), 20):
    hc = pendulum_closed_form(chart, float(traj.ts[i]))
    sup = max(sup, max(abs(a - b) for a, b in zip(hc, hs[i])))
print(f"sup |closed form - RK4| over [0, 5]: {sup:.3e}")

print()
print("=" * 70)
print("Times of loss of equiregularity (zeros of the pole coordinate)")
print("=" * 70)
for label, h, T in [
        ("Engel C1 (periodic)", engel_h_from_chart(0.3, 0.8, 1.0), 12.0),
        ("Engel C6 (spacing pi/c)", engel_h_from_chart(0.4, 1.0, 0.0), 10.0)]:
    times = equiregularity_loss_times(engel, Covector.from_h(engel, h), T)
    gaps = np.diff(times)
    print(f"  {label}: {[round(t, 6) for t in times]}")
    if len(gaps):
        print(f"      spacing: {gaps[0]:.6f} (max deviation "
              f"{np.max(np.abs(gaps - gaps[0])):.2e})")

cartan = build_group("cartan")
from carnotcurv import cartan_h_from_chart
for label, pt in [("Cartan C1 (periodic)", (0.3, 0.8, 1.0, 0.7)),
                  ("Cartan C2 (never)", (0.3, 2.5, 1.0, 0.7))]:
    cov = Covector.from_h(cartan, cartan_h_from_chart(*pt))
    times = equiregularity_loss_times(cartan, cov, 12.0)
    print(f"  {label}: {[round(t, 6) for t in times]}")
