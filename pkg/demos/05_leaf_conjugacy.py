"""Leaf conjugacy by averaging pi_s along centre leaves.

Run:  python3 demos/05_leaf_conjugacy.py
"""
import numpy as np

from phendo import conjugacy as cj
from phendo import foliation as fol
from phendo.models import PerturbedLinearModel
from phendo.semiconjugacy import SemiconjugacyApprox

rng = np.random.default_rng(3)
pts = rng.random((8, 2))

for eps in (0.0, 0.05):
    model = PerturbedLinearModel([[3, 1], [1, 1]], eps)
    approx = SemiconjugacyApprox(model, 30)
    tol = 1e-12 if eps == 0 else 1e-5
    leaves = [cj.ArclengthLeaf(L, approx.projections, i)
              for i, L in enumerate(fol.center_leaves(model, pts, 2.5, tol))]

    # T: any centre segment of length T has endpoints more than 1 apart in pi_s.
    est = cj.estimate_T(leaves)
    print(f"eps = {eps}:  threshold {est.threshold:.4f}, T = {est.T:.4f}")

    samples = cj.conjugacy_samples(approx, leaves, est.T, 25)
    checks = cj.conjugacy_checks(approx, leaves, samples)
    for name in ("leaf_to_leaf", "equivariance", "monotonicity", "injectivity"):
        c = checks[name]
        val = next(v for k, v in c.items() if k not in ("passed", "tolerance", "bound", "worst_sample"))
        print(f"   {name:13s} {'ok ' if c['passed'] else 'BAD'}  {val:.3g}")

    # In the linear case h slides every point T/2 along its stable line.
    if eps == 0:
        L = leaves[0]
        p = L.leaf.base_point
        h = cj.average_along_leaf(approx, L, p, est.T)
        print(f"   |h(p) - p| = {np.hypot(*(h - p)):.6f}  vs  T/2 = {est.T / 2:.6f}")
