"""Fermi surface at half filling and the geometry of nearby level sets.

At mu = 1 the zero set of the band energy is a union of straight lines that
bound two triangles.  Slightly off the surface the level sets round the
corners; their curvature radius R and width w obey l^2 = w R.
"""

import numpy as np

from honeyrg.lattice import (FERMI_POINTS, band_energy, curvature_asymptotic, curve_geometry, fermi_surface_lines,
                             fermi_triangles, trace_level_set, width_asymptotic)

lines = fermi_surface_lines(1.0)
t = np.linspace(0, 1, 1000)
err = max(np.max(np.abs(band_energy(*ln.sample(t), 1.0))) for ln in lines)
print(f"{len(lines)} Fermi lines, max |e| on samples {err:.1e}")
for tri, kf in zip(fermi_triangles(), FERMI_POINTS):
    print("triangle vertices", np.round(tri, 4).tolist(), "around", np.round(kf, 4).tolist())

g, h = 14.0, 4
print(f"\nlevel-set geometry at depth h = {h}")
print("   k1        R/R_asym   w/w_asym   l")
for k1 in np.geomspace(g ** (-h / 2), 0.3, 6):
    c = curve_geometry(k1, h, g)
    print(f"{k1:9.2e}  {c.R / curvature_asymptotic(k1, h, g):8.3f}  {c.w / width_asymptotic(k1, h, g):8.3f}  {c.l:.3e}")

pts = trace_level_set(0.5, 0.0, 64, center=FERMI_POINTS[0])
print(f"\nmu = 0.5: closed convex curve with {len(pts)} traced points around the first Fermi point")
