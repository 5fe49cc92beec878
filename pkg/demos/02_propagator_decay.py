"""Sector propagator: momentum sup norm, direct-space L1 norm and Gevrey decay.

The sector (j, ceil(j/2), ceil(j/2)) of slice j has sup norm ~ gamma^j in momentum space
and decays like exp(-c d^alpha) in imaginary time with alpha near 1/2 for the
Gevrey-2 cutoff.  Each slice takes about half a minute.
"""

import sys

from honeyrg.cutoffs import ScaleSector, SliceConfig
from honeyrg.propagator import SectorMesh, norm_report

g = 14.0
js = [int(x) for x in sys.argv[1:]] or [4, 5]
print(" j   sup/g^j   L1/g^j    c       alpha")
for j in js:
    rep = norm_report(ScaleSector(j, (j + 1) // 2, (j + 1) // 2), SectorMesh(N=1024), SliceConfig())
    print(f"{j:2d}  {rep.sup_norm / g ** j:7.3f}  {rep.l1_norm / g ** j:7.3f}  {rep.decay_c:6.3f}  {rep.alpha_fit:6.3f}")
