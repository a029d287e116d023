"""The semiconjugacy H from a perturbed hyperbolic endomorphism to its linear part.

Run:  python3 demos/03_semiconjugacy.py
"""
import numpy as np

from phendo.foliation import unstable_leaves
from phendo.models import PerturbedLinearModel
from phendo.semiconjugacy import (SemiconjugacyApprox, analytic_displacement_bound, deck_defect,
                                  displacement_bound, semiconjugacy_residual)

rng = np.random.default_rng(1)
model = PerturbedLinearModel([[3, 1], [1, 1]], 0.05)
approx = SemiconjugacyApprox(model, depth=30)
lin = approx.lin
print(f"A = [[3,1],[1,1]]  lambda_s = {lin.lambda_s:.6f}  lambda_u = {lin.lambda_u:.6f}  det = 2")

pts = rng.random((1000, 2))
print(f"max |A H(p) - H(f p)|       : {semiconjugacy_residual(approx, pts).max():.2e}"
      f"   (tail {approx.tail_norm():.1e})")
print(f"sup |H - id| (grid)         : {displacement_bound(approx):.4f}"
      f"   analytic bound {analytic_displacement_bound(approx):.4f}")

# H_u uses only forward orbits on the torus and commutes with deck translations.
# H_s uses backward orbits on the cover, and f^{-k}(p + v) = f^{-k}(p) + A^{-k} v
# is not a lattice translate when det A = 2, so the full H does not commute.
v = rng.integers(-2, 3, (1000, 2))
print(f"deck defect of H_u           : {deck_defect(approx, pts, v, 'u').max():.1e}")
print(f"deck defect of H             : {deck_defect(approx, pts, v).max():.3f}")

# Unstable leaves collapse onto unstable lines of A: H_s is constant on them.
for leaf in unstable_leaves(model, rng.random((3, 2)), 0.6):
    hs = approx.H_s(leaf.vertices)
    print(f"unstable leaf: spread of H_s = {np.ptp(hs):.1e},  H_u range = {np.ptp(approx.H_u(leaf.vertices)):.3f}")
