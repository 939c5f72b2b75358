"""Closed-form curvature invariants and the pendulum-energy bounds.

For ample equiregular unit-speed geodesics the cost-Hessian family expands
as I/t^2 + R/3 + O(t) with I = diag(n_a^2, 1); the single nontrivial scalar
R11 has a closed form whose pole sits exactly at the loss of equiregularity.
"""
import math
from fractions import Fraction

from carnotcurv import (Covector, build_group, cartan_h_from_chart,
                        curvature_operator, energy_bound,
                        engel_h_from_chart, r11)

print("=" * 70)
print("Curvature reports (exact rational arithmetic)")
print("=" * 70)
for spec, h in [("goursat:3", (1, 0, 2)),
                ("goursat:4", (1, 0, 1, 0)),
                ("goursat:5", (Fraction(3, 5), Fraction(4, 5), 1, 1, 1)),
                ("cartan", (1, 0, 1, 0, 0))]:
    m = build_group(spec)
    rep = curvature_operator(m, Covector.from_h(m, h))
    print(f"\n{spec}, h = {h}:")
    print(f"  diagram {rep.young_diagram}, I = {rep.I}, trace I = {rep.trace_I}")
    print(f"  R11 = {rep.r11}, R = {rep.R}")
    if rep.bound is not None:
        print(f"  energy bound: R11 <= {rep.bound}")

print()
print("=" * 70)
print("Engel bound R11 <= 4E: slack is exactly 6 c^2 / sin(theta)^2")
print("=" * 70)
engel = build_group("goursat:4")
print(f"{'theta':>8} {'c':>6} {'alpha':>6} {'R11':>12} {'4E':>10} {'slack':>12}")
for th in (0.4, 0.9, 1.4):
    for c in (0.5, 1.5):
        cov = Covector.from_h(engel, engel_h_from_chart(th, c, 1.0))
        r = r11(engel, cov)
        b = energy_bound(engel, cov)
        print(f"{th:8.2f} {c:6.2f} {1.0:6.2f} {r:12.5f} {b:10.5f} {b - r:12.5f}")

print()
print("Cartan bound R11 <= 6E: slack is 8 (alpha^2/c^2) sin^2(theta - beta)")
cartan = build_group("cartan")
for th in (0.4, 1.2):
    cov = Covector.from_h(cartan, cartan_h_from_chart(th, 0.9, 0.7, -0.2))
    r = r11(cartan, cov)
    b = energy_bound(cartan, cov)
    want = 8 * (0.7 ** 2 / 0.9 ** 2) * math.sin(th + 0.2) ** 2
    print(f"  theta = {th}: slack = {b - r:.10f}  (formula {want:.10f})")
