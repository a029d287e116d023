"""Dynamical incoherence: two centre curves through one point of y = 1/2.

Writes figure1.svg to the current directory.

Run:  python3 demos/02_incoherent_branching.py
"""
from pathlib import Path

import numpy as np

from phendo import incoherent as inc
from phendo import svg
from phendo.models import IncoherentModel

model = IncoherentModel()

# The model preserves both circles y = 0 and y = 1/2.  On them the splitting
# is explicit, and the contraction/expansion rates read off the Jacobian.
rep = inc.ph_inequality_report(model, grid_n=128)
for name, c in rep["circles"].items():
    print(f"{name:6s}  |Df|E^u| = {c['unstable_stretch']:.6f}   ratio = {c['ratio']:.6f}")
print("grid 128^2: min unstable stretch", rep["min_unstable_stretch"], " max ratio", round(rep["max_ratio"], 4))
print("E^u and E^c transverse with margin", round(inc.transversality_margin(128), 4), "rad")

# The circle y = 1/2 is tangent to E^c.  So is the sigma-curve
# x = gamma(y) + const that touches it: two integral curves, one point.
cert = inc.branching_certificate()
print("branching at", cert.touch_point, " separation", cert.separation,
      " tangency error", f"{cert.max_tangency_error:.1e}")

# Away from the circle the field is C^1 and integral curves are unique.
u = inc.uniqueness_check(300)
print(f"RK4 continuation vs closed form at {u['n_points']} points: {u['max_error']:.1e}")

curves = svg.figure1_curves()
print("contact angles (rad):", np.round([svg.contact_angle(c["curve"]) for c in curves[:4]], 5), "...")
Path("figure1.svg").write_text(svg.figure1_svg(curves), encoding="utf-8")
print("wrote figure1.svg")
