"""Honeycomb lattice geometry, dispersion and Fermi-surface tools.

Momenta are handled either in Cartesian Brillouin-zone coordinates
``(k1, k2)`` or in the skewed coordinates ``(kplus, kminus)`` with
``k1 = pi/3 (k+ - k-)`` and ``k2 = pi/sqrt(3) (k+ + k-)``.  In skewed
coordinates the reciprocal lattice is ``2 Z x 2 Z``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

SQ3 = np.sqrt(3.0)


@dataclass(frozen=True)
class LatticeConstants:
    """Triangular basis, nearest-neighbour shifts and dual basis."""

    l1: np.ndarray = field(default_factory=lambda: 0.5 * np.array([3.0, SQ3]))
    l2: np.ndarray = field(default_factory=lambda: 0.5 * np.array([3.0, -SQ3]))
    d1: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    d2: np.ndarray = field(default_factory=lambda: 0.5 * np.array([-1.0, SQ3]))
    d3: np.ndarray = field(default_factory=lambda: 0.5 * np.array([-1.0, -SQ3]))
    G1: np.ndarray = field(default_factory=lambda: 2 * np.pi / 3 * np.array([1.0, SQ3]))
    G2: np.ndarray = field(default_factory=lambda: 2 * np.pi / 3 * np.array([1.0, -SQ3]))

    def reciprocity(self):
        """Matrix ``G_i . l_j`` (should be ``2 pi I``)."""
        G = np.stack([self.G1, self.G2])
        L = np.stack([self.l1, self.l2])
        return G @ L.T


LATTICE = LatticeConstants()

# Fermi points annihilate Omega
FERMI_POINTS = (
    np.array([2 * np.pi / 3, 2 * np.pi / (3 * SQ3)]),
    np.array([2 * np.pi / 3, -2 * np.pi / (3 * SQ3)]),
)


def pm_coords(k1, k2):
    """Cartesian ``(k1, k2)`` -> skewed ``(k+, k-)``."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    a = 3 * k1 / np.pi
    b = SQ3 * k2 / np.pi
    return 0.5 * (a + b), 0.5 * (b - a)


def from_pm(kp, km):
    """Skewed ``(k+, k-)`` -> Cartesian ``(k1, k2)``."""
    kp = np.asarray(kp, dtype=float)
    km = np.asarray(km, dtype=float)
    return np.pi / 3 * (kp - km), np.pi / SQ3 * (kp + km)


def q_reduce(k):
    """Signed distance of ``k`` to the nearest odd integer, in ``[-1, 1)``.

    With this reduction ``|cos(pi k / 2)| = |sin(pi q / 2)|``.
    """
    k = np.asarray(k, dtype=float)
    return np.mod(k, 2.0) - 1.0


@dataclass(frozen=True)
class MomentumPoint:
    """A Matsubara frequency together with a Brillouin-zone momentum."""

    k0: float
    k1: float
    k2: float

    @classmethod
    def matsubara(cls, n, T, k1, k2):
        return cls(2 * np.pi * T * (n + 0.5), k1, k2)

    @classmethod
    def from_pm(cls, k0, kp, km):
        k1, k2 = from_pm(kp, km)
        return cls(k0, float(k1), float(k2))

    @property
    def kplus(self):
        return float(pm_coords(self.k1, self.k2)[0])

    @property
    def kminus(self):
        return float(pm_coords(self.k1, self.k2)[1])

    @property
    def qplus(self):
        return float(q_reduce(self.kplus))

    @property
    def qminus(self):
        return float(q_reduce(self.kminus))


def dispersion_omega(k1, k2):
    """Complex dispersion ``1 + 2 exp(-3i k1 / 2) cos(sqrt(3) k2 / 2)``."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    return 1.0 + 2.0 * np.exp(-1.5j * k1) * np.cos(0.5 * SQ3 * k2)


def band_energy(k1, k2, mu=1.0):
    """Expanded band energy ``|Omega|^2 - mu^2``."""
    c1 = np.cos(1.5 * np.asarray(k1, dtype=float))
    c2 = np.cos(0.5 * SQ3 * np.asarray(k2, dtype=float))
    return 4 * c1 * c2 + 4 * c2 ** 2 + 1.0 - mu ** 2


def band_energy_pm(kp, km):
    """Band energy at ``mu = 1`` written in skewed coordinates."""
    kp = np.asarray(kp, dtype=float)
    km = np.asarray(km, dtype=float)
    return 8 * np.cos(0.5 * np.pi * (kp + km)) * np.cos(0.5 * np.pi * kp) * np.cos(0.5 * np.pi * km)


@dataclass(frozen=True)
class FermiLine:
    """A straight Fermi-surface segment at ``mu = 1``.

    ``family`` is ``'k2'`` for ``k2 = sign (2n+1) pi / sqrt 3`` and
    ``'diag+'``/``'diag-'`` for ``k2 = +-sqrt3 k1 -+ (4n+2) pi / sqrt3``.
    """

    family: str
    sign: int
    n: int
    p0: tuple
    p1: tuple

    def sample(self, t):
        t = np.asarray(t, dtype=float)
        p0 = np.asarray(self.p0)
        p1 = np.asarray(self.p1)
        pts = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
        return pts[:, 0], pts[:, 1]


def _cart(kp, km):
    k1, k2 = from_pm(kp, km)
    return (float(k1), float(k2))


def fermi_triangles():
    """Vertices (Cartesian) of the two Fermi triangles in the fundamental cell."""
    lower = [(-1, -1), (-1, 0), (0, -1)]
    upper = [(1, 1), (1, 0), (0, 1)]
    return [np.array([_cart(*v) for v in tri]) for tri in (lower, upper)]


def fermi_surface_lines(mu=1.0):
    """Edges of the Fermi triangles in the fundamental cell ``[-1, 1]^2`` of (k+, k-).

    Raises
    ------
    ValueError
        If ``mu != 1``; the surface is only polygonal at half filling.
    """
    if mu != 1.0:
        raise ValueError("Fermi lines are straight only for mu = 1")
    lines = []
    # k+ + k- = +-1  <->  k2 = +-pi/sqrt3
    lines.append(FermiLine("k2", -1, 0, _cart(-1, 0), _cart(0, -1)))
    lines.append(FermiLine("k2", 1, 0, _cart(1, 0), _cart(0, 1)))
    # k- = +-1  <->  k2 = sqrt3 k1 +- 2pi/sqrt3
    lines.append(FermiLine("diag+", -1, 0, _cart(-1, -1), _cart(0, -1)))
    lines.append(FermiLine("diag+", 1, 0, _cart(0, 1), _cart(1, 1)))
    # k+ = +-1  <->  k2 = -sqrt3 k1 +- 2pi/sqrt3
    lines.append(FermiLine("diag-", -1, 0, _cart(-1, -1), _cart(-1, 0)))
    lines.append(FermiLine("diag-", 1, 0, _cart(1, 0), _cart(1, 1)))
    return lines


def line_distance(k1, k2):
    """Euclidean distance from ``(k1, k2)`` to the nearest Fermi line (any cell)."""
    kp, km = pm_coords(k1, k2)
    # each family: kp odd, km odd, kp + km odd; normals in Cartesian
    d = []
    for u, grad in ((kp, np.array([3, SQ3]) / (2 * np.pi)),
                    (km, np.array([-3, SQ3]) / (2 * np.pi)),
                    (kp + km, np.array([0, SQ3]) / np.pi)):
        d.append(np.abs(q_reduce(u)) / np.linalg.norm(grad))
    return np.min(np.stack(d), axis=0)


def _fermi_centre(center):
    if center is None:
        return FERMI_POINTS[0]
    return np.asarray(center, dtype=float)


def trace_level_set(mu, level, resolution, center=None, rmax=None):
    """Trace ``e(k, mu) = level`` by radial bisection from a Fermi point.

    Parameters
    ----------
    mu : float
        Chemical potential.
    level : float
        Target value of the band energy.
    resolution : int
        Number of rays (>= 16).
    center : array_like, optional
        Enclosed point; defaults to the first Fermi point.
    rmax : float, optional
        Maximal ray length.

    Returns
    -------
    list of MomentumPoint
        Points ordered by polar angle; empty when no ray meets the level.
    """
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    c = _fermi_centre(center)
    if rmax is None:
        rmax = 1.5 * 4 * np.pi / (3 * SQ3)
    f = lambda r, th: band_energy(c[0] + r * np.cos(th), c[1] + r * np.sin(th), mu) - level
    radii = np.linspace(0.0, rmax, 4001)
    out = []
    for th in np.linspace(0, 2 * np.pi, resolution, endpoint=False):
        vals = f(radii, th)
        idx = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
        if idx.size == 0:
            continue
        i = idx[0]
        r = brentq(f, radii[i], radii[i + 1], args=(th,), xtol=1e-15, rtol=1e-15)
        out.append(MomentumPoint(0.0, c[0] + r * np.cos(th), c[1] + r * np.sin(th)))
    return out


@dataclass(frozen=True)
class CurveGeometry:
    """Curvature radius, band width and anisotropic length at one point."""

    k1: float
    h: int
    R: float
    w: float
    l: float
    point: tuple


# corner of the Fermi triangle where the lines k2 = pi/sqrt3 and
# k2 = sqrt3 k1 - 2 pi/sqrt3 meet
CORNER = np.array([np.pi, np.pi / SQ3])


def partial_curve(k1, k2):
    """Two-factor height function near the corner of the first Fermi triangle."""
    return np.cos(0.5 * SQ3 * k2) * np.cos(0.25 * (3 * k1 - SQ3 * k2))


def _partial_derivatives(k1, k2):
    a = 0.5 * SQ3 * k2
    b = 0.25 * (3 * k1 - SQ3 * k2)
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    # d a = sqrt3/2 dk2 ; d b = 3/4 dk1 - sqrt3/4 dk2
    a2, b1, b2 = 0.5 * SQ3, 0.75, -0.25 * SQ3
    F1 = -ca * sb * b1
    F2 = -sa * cb * a2 - ca * sb * b2
    F11 = -ca * cb * b1 * b1
    F12 = sa * sb * a2 * b1 - ca * cb * b1 * b2
    F22 = -ca * cb * a2 * a2 + 2 * sa * sb * a2 * b2 - ca * cb * b2 * b2
    return F1, F2, F11, F12, F22


def curvature_radius(k1, k2):
    """Curvature radius of the level line of :func:`partial_curve` through a point."""
    F1, F2, F11, F12, F22 = _partial_derivatives(k1, k2)
    den = -F2 ** 2 * F11 + 2 * F1 * F2 * F12 - F1 ** 2 * F22
    if abs(den) < 1e-300:
        raise ZeroDivisionError("curvature denominator vanishes")
    return (F1 ** 2 + F2 ** 2) ** 1.5 / abs(den)


def _curve_point(x, level):
    # oblique coordinates: u = depth below k2 = pi/sqrt3, x = horizontal
    # distance to the second line at that depth
    def point(u):
        return CORNER[0] - x - u / SQ3, CORNER[1] - u

    g = lambda u: partial_curve(*point(u)) - level
    umax = min(0.5, 2 * SQ3 * x)
    if g(0.0) * g(umax) > 0:
        raise ValueError("level set not reached at this parameter")
    u = brentq(g, 0.0, umax, xtol=1e-16, rtol=1e-15)
    return u, point(u)


def curve_geometry(k1, h, gamma):
    """Geometry of the near-corner level curve at shifted coordinate ``k1``.

    The curve is ``partial_curve = gamma^{-h} / 8`` (equivalently
    ``|e| ~ gamma^{-h}`` near the corner).  ``k1`` is the horizontal distance
    from the second line, so the level set is reached for every ``k1 > 0``.
    ``w`` is the vertical thickness of the band between the level and twice
    the level.
    """
    level = gamma ** (-h) / 8.0
    u1, p = _curve_point(k1, level)
    u2, _ = _curve_point(k1, 2 * level)
    R = curvature_radius(*p)
    w = abs(u2 - u1)
    return CurveGeometry(float(k1), int(h), float(R), float(w), float(np.sqrt(w * R)), tuple(map(float, p)))


def curvature_asymptotic(k1, h, gamma):
    return ((1.5 * k1) ** 3 + gamma ** (-1.5 * h)) / gamma ** (-h)


def width_asymptotic(k1, h, gamma):
    return gamma ** (-h) / (gamma ** (-0.5 * h) + 1.5 * k1)
