"""Build the group models and integrate normal geodesics.

Walks through: frame fields and their exact bracket table, covectors in
canonical and frame-fiber coordinates, and a conservation check along the
Hamiltonian flow.
"""
import numpy as np

from carnotcurv import (Covector, build_group, conserved_quantities,
                        fiber_transform, integrate_flow)

print("=" * 70)
print("Group models")
print("=" * 70)
for spec in ("goursat:3", "goursat:4", "goursat:6", "cartan"):
    m = build_group(spec)
    print(f"{spec:>10}: dim {m.dim}, strata {m.strata}, step {m.step}, "
          f"Young diagram {m.young}")

cartan = build_group("cartan")
print("\nCartan frame fields (validated against the bracket table):")
for i in range(1, 6):
    print(f"  X{i}:", cartan.frame_field(i).dumps(cartan.base_names).replace("\n", ",  "))

print("\nFrame matrix A(base) at base = (1, 0, 0, 0) for the Engel group:")
engel = build_group("goursat:4")
A, _ = fiber_transform(engel, (1, 0, 0, 0))
for row in A:
    print("  ", [str(v) for v in row])

print("\n" + "=" * 70)
print("Normal geodesic flow (Cartan group, T = 10)")
print("=" * 70)
cov = Covector.from_h(cartan, (1.0, 0.0, 1.0, 0.0, 0.0))
print("initial covector h =", cov.h, " conserved:", conserved_quantities(cartan, cov))
traj = integrate_flow(cartan, cov, 10.0, 1e-3)
E = traj.E_series()
print(f"samples: {len(traj)}")
print(f"max |H(t) - H(0)|           = {traj.conservation_drift():.3e}")
print(f"max |E(t) - E(0)|           = {np.max(np.abs(E - E[0])):.3e}")
print(f"max drift of h4, h5         = {traj.invariant_fiber_drift():.3e}")

trj = integrate_flow(cartan, cov, 5.0, 1e-3, with_variational=True, store_every=100)
print(f"variational matrix symplectic defect over [0,5]: "
      f"{trj.symplectic_defect():.3e}")
