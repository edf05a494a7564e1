"""Squared-mean-curvature descent and the constant-angle rigidity probe.

Once the descent drives max|H| to zero on a compact surface, a constant
contact angle forces vanishing Gaussian curvature, which pins the surface
to the flat minimal torus.  The demo shows the 1-parameter product-torus
descent recovering r = pi/4, and the full normal-displacement descent
pulling a bumped flat torus back to minimality with the implication chain
checked on the result.
"""

import numpy as np

from contactgeom import (FlowConfig, clifford, descend, descend_r_family,
                         perturb, theorem_probe, willmore_energy)

print("1-parameter family: E(r) has its unique zero at r = pi/4")
report, _ = descend_r_family(np.pi / 4 + 0.1, n=32)
print(f"  start r = {np.pi/4 + 0.1:.6f} -> r* = {report.r_final:.12f}"
      f"  (pi/4 = {np.pi/4:.12f}),  E* = {report.energy[-1]:.2e}\n")

print("full descent from a (1,2)-mode normal bump, amplitude 0.05, 32x32:")
grid = perturb(clifford(), (1, 2), 0.05).sample(n=32)
print(f"  initial energy  = {willmore_energy(grid):.6e}")
report, final = descend(grid, FlowConfig(step=1.0, max_iter=500, tol=1e-3))
for (it, E, maxH, dev) in report.trace:
    print(f"  iter {it:3d}  E = {E:.3e}  max|H| = {maxH:.3e}  "
          f"beta spread = {dev:.3e}")
print(f"  converged = {report.converged} after {report.iterations} accepted steps")

probe = theorem_probe(report, final)
print("\nrigidity probe on the final surface:")
print(f"  beta spread = {probe['beta_spread']:.3e} (constant at tolerance)"
      f"  |K|_inf = {probe['K_inf']:.3e}  ->  {probe['status']}")
