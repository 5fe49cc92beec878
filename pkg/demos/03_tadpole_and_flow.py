"""Tadpole per slice and the scale-by-scale chemical-potential counter-term.

||T^j|| tracks |lam| j gamma^{-j}; its curvature in the external momentum
grows by gamma per slice.  The counter-term cancels the tadpole slice by slice,
so the partial sums telescope and vanish at the infrared end.
"""

import numpy as np

from honeyrg.cutoffs import SliceConfig
from honeyrg.perturbation import counterterm_flow, tadpole_curvature, tadpole_scan

lam, g = 0.01, 14.0
res = tadpole_scan(lam, range(5, 12))
print(" j   ||T^j||     ratio to |lam| j g^-j")
for j, v, q in zip(res.j, res.per_j, res.ratio_to_claim()):
    print(f"{j:2d}  {v:.3e}  {q:.3f}")
c = np.array([tadpole_curvature(j, lam) for j in range(5, 9)])
print("curvature ratios", np.round(c[1:] / c[:-1], 3).tolist())

for T in (0.05, 0.02, 0.01):
    fl = counterterm_flow(lam, SliceConfig(gamma=g, T=T))
    print(f"T={T}: rmax={fl.rmax}  K={fl.K:.4f}  telescoping error {fl.telescoping_error():.1e}  endpoint {fl.endpoint}")
