"""The Moebius circle map and the series that define the invariant bundles.

Run:  python3 demos/01_circle_map_and_series.py
"""
import numpy as np

from phendo.incoherent import beta_series, cohomology_residual, gamma, gamma_prime, gamma_series
from phendo.models import MobiusCircleMap

psi = MobiusCircleMap(0.6)

# Psi fixes 0 (attracting, multiplier 1/4) and 1/2 (repelling, multiplier 4).
print("Psi(0), Psi(1/2)      :", psi.apply(0.0), psi.apply(0.5))
print("Psi'(0), Psi'(1/2)    :", psi.derivative(0.0), psi.derivative(0.5))

# In the coordinate tan(pi y) the map is multiplication by 1/4, so iterates
# come in closed form.  Compare with brute-force composition.
y = np.linspace(0, 1, 7, endpoint=False)
naive = y.copy()
for _ in range(6):
    naive = psi.apply(naive)
print("closed form vs composition, 6 steps:", np.max(np.abs(psi.iterate(y, 6) - naive)))

# gamma solves u(Psi y) - 2 u(y) = cos(2 pi y) + 1 with a geometric tail.
g = gamma_series(0.0, 40)
print(f"gamma(0) = {g.value:.15f}  (tail bound {g.tail_bound:.1e})")
ys = np.random.default_rng(0).random(10_000)
r, b = cohomology_residual("gamma", ys)
print(f"gamma residual over 1e4 points: {r.max():.2e} <= budget {b.max():.2e} + 1e-9")

# beta solves the same equation with a forward sum; its tail is tiny
# once Psi^k y has been pushed towards 0.
b3 = beta_series(0.3, 40)
print(f"beta(0.3) = {b3.value:.12f}  (tail bound {b3.tail_bound:.1e})")

# gamma' blows up at the repelling circle, which is what makes E^c horizontal there.
for j in range(1, 7):
    d = 10.0 ** -j
    print(f"  |gamma'(1/2 - 1e-{j})| = {abs(gamma_prime(0.5 - d, delta=0.0)):10.2f}")
print("gamma(1/2) =", gamma(0.5))
