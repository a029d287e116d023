"""Building the centre foliation by pulling back a linear foliation.

Writes atlas.svg to the current directory.

Run:  python3 demos/04_centre_foliation.py
"""
from pathlib import Path

import numpy as np

from phendo import foliation as fol
from phendo import svg
from phendo.models import PerturbedLinearModel, cone_invariance_check

rng = np.random.default_rng(2)
model = PerturbedLinearModel([[3, 1], [1, 1]], 0.05)
lin = model.linearisation()

cone = fol.default_cone(model, 0.3)
print("unstable cone check:", {k: v for k, v in cone_invariance_check(model, cone, 64).items()
                               if k in ("worst_margin_angle", "worst_expansion", "passed")})
seed = fol.seed_foliation(model, cone)
print("seed lines have slope", seed.slope)

# F_n(p) = f^{-n}(seed line through f^n p).  The tangent converges to E^c
# geometrically and the leaves themselves converge in the sup distance.
p = np.array([0.3, 0.6])
tc = fol.tangent_convergence(model, p, seed=seed)
print("tangent error by n:", np.array2string(np.array(tc["errors"]), precision=2), " ratio", round(tc["mean_ratio"], 3))
leaf = fol.center_leaf(model, p, 1.0, 1e-4, seed)
print(f"centre leaf converged at n = {leaf.meta['n']} (gap {leaf.meta['gap']:.1e}), {len(leaf)} vertices")
print(f"f-invariance gap: {fol.invariance_gap(model, leaf, 1.0, 1e-4, seed):.1e}")

leaves = fol.center_leaves(model, rng.random((60, 2)), 1.0, 1e-4, seed)
print("60 centre leaves, crossings:", fol.no_crossing_check(leaves, model, seed)["crossings"])

base = rng.random(2)
C = np.array([base + i * 0.1 * lin.v_u + 0.45 * lin.v_s for i in range(10)])
U = np.array([base + 0.45 * lin.v_u + j * 0.1 * lin.v_s for j in range(10)])
cl = fol.center_leaves(model, C, 0.8, 1e-4, seed)
ul = fol.unstable_leaves(model, U, 0.8)
ps = fol.product_structure_check(cl, ul)
print("10 x 10 product structure: counts in", [ps["min_count"], ps["max_count"]])

g = fol.growth_diagnostics(model, cl, ul, n_max=10)
print(f"C = {g.C_estimate:.4f}  D = {g.D_estimate:.4f}  K = {g.K_estimate:.3f}  "
      f"R = {g.R_estimate:.4f} <= K0/(1-alpha) = {g.R_bound:.4f}")
Path("atlas.svg").write_text(svg.atlas_svg(cl, ul), encoding="utf-8")
print("wrote atlas.svg")
