"""Multiscale renormalization-group toolkit for the half-filled honeycomb Hubbard model.

Modules
-------
lattice       dispersion, Fermi triangles, level sets and curve geometry
cutoffs       Gevrey cutoffs, slices, sectors and the support law
propagator    sliced propagators, direct-space kernels and norms
sectors       exhaustive sector sums behind the power counting
forests       forest formula, GN trees, multi-arch expansion, rings
perturbation  tadpole, counter-term flow, sunshine self-energy scan
cli           command-line drivers
"""

__version__ = "0.1.0"
