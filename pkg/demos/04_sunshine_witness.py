"""Sunshine self-energy: the second momentum derivative grows scale by scale.

At the probe (pi T, k+ = 1, k- = 0) the scale-r sunshine contribution has a
second derivative along k+ that grows by about gamma per scale, while the
first derivative vanishes by symmetry.  gamma = 4 keeps the box small enough
for a desk run (a few seconds at T = 0.01; pass --deep for T = 0.0025, L = 512,
about two minutes).  r = 1 still contains the ultraviolet slice and sits
outside the scaling regime, so the scans start at r = 2.
"""

import sys

import numpy as np

from honeyrg.cutoffs import SliceConfig
from honeyrg.perturbation import sunshine_self_energy_scan

deep = "--deep" in sys.argv
T, L, rs = (0.0025, 512, [2, 3, 4]) if deep else (0.01, 256, [2, 3])
scan = sunshine_self_energy_scan(0.01, rs, SliceConfig(gamma=4, T=T), L=L, moments=True)
print(" r   |Sigma^r|    |d1|        |d2|        int|Sigma^r|")
for r, s, a, b, l1 in zip(scan.r, scan.sigma, scan.d1, scan.d2, scan.l1):
    print(f"{r:2d}  {abs(s):.3e}  {abs(a):.3e}  {abs(b):.3e}  {l1:.3e}")
print("d2 ratios", np.round(scan.ratios("d2"), 3).tolist(), "window [gamma/4, 4 gamma] = [1, 16]")
