"""Gevrey cutoffs, scale and sector partitions of unity, and support tests."""

import math
from dataclasses import dataclass

import numpy as np

from .lattice import MomentumPoint, band_energy_pm, q_reduce


def _h(u, order):
    # exp(-u^{-1/(s-1)}) is Gevrey of order s
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-u[pos] ** (-1.0 / (order - 1.0)))
    return out


def base_cutoff(t, order=2.0):
    """Even cutoff equal to 1 on ``|t| <= 1``, 0 on ``|t| >= 2``, smooth between.

    Parameters
    ----------
    t : array_like
    order : float
        Gevrey order ``s > 1``.
    """
    t = np.asarray(t, dtype=float)
    a = np.abs(np.atleast_1d(t))
    out = np.where(a <= 1.0, 1.0, 0.0)
    mid = (a > 1.0) & (a < 2.0)
    p = _h(2.0 - a[mid], order)
    q = _h(a[mid] - 1.0, order)
    out[mid] = p / (p + q)
    return out.reshape(t.shape) if t.ndim else float(out[0])


@dataclass(frozen=True)
class SliceConfig:
    """Scale ratio, temperature and derived slice bounds."""

    gamma: float = 14.0
    T: float = 0.01
    order: float = 2.0
    j0: int = 5

    def __post_init__(self):
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if self.T <= 0:
            raise ValueError("temperature must be positive")
        if self.order <= 1:
            raise ValueError("Gevrey order must exceed 1")

    @property
    def beta(self):
        return 1.0 / self.T

    @property
    def jmax(self):
        return int(math.floor(1 + math.log(1.0 / (math.sqrt(2) * math.pi * self.T), self.gamma)))

    @property
    def rmax(self):
        return int(math.floor(1 + 1.5 * self.jmax))

    def chi(self, t):
        return base_cutoff(t, self.order)

    def slice_function(self, j, t):
        return slice_function(j, t, self.gamma, self.order)

    def sector_function(self, s, j, t):
        return sector_function(s, j, t, self.gamma, self.order)


def slice_function(j, t, gamma=14.0, order=2.0):
    """Scale-``j`` member of the telescoping partition in ``t``.

    ``chi_0 = 1 - chi(t)`` and ``chi_j(t) = chi(gamma^{2j-2} t) - chi(gamma^{2j} t)``,
    supported on ``gamma^{-2j} < |t| < 2 gamma^{-2j+2}``.
    """
    t = np.asarray(t, dtype=float)
    if j == 0:
        return 1.0 - base_cutoff(t, order)
    return base_cutoff(gamma ** (2 * j - 2) * t, order) - base_cutoff(gamma ** (2 * j) * t, order)


def sector_function(s, j, t, gamma=14.0, order=2.0):
    """Sector partition ``v_s`` over ``0 <= s <= j`` (``t`` is a squared cosine)."""
    if not 0 <= s <= j:
        raise ValueError("sector index out of range")
    t = np.asarray(t, dtype=float)
    if s == j:
        return base_cutoff(gamma ** (2 * j) * t, order)
    if s == 0:
        return 1.0 - base_cutoff(gamma ** 2 * t, order)
    return slice_function(s + 1, t, gamma, order)


@dataclass(frozen=True)
class ScaleSector:
    """Slice index ``j`` with sector indices ``(s+, s-)``."""

    j: int
    splus: int
    sminus: int

    @property
    def depth(self):
        return self.splus + self.sminus - self.j + 2

    @property
    def two_r(self):
        # 2r = j + s+ + s- + 2
        return self.j + self.splus + self.sminus + 2

    @property
    def r(self):
        return self.two_r / 2

    @property
    def admissible(self):
        return (0 <= self.splus <= self.j and 0 <= self.sminus <= self.j
                and self.splus + self.sminus >= self.j - 2)

    def check(self):
        if not self.admissible:
            raise ValueError(f"inadmissible sector {self}")
        return self


def admissible_sectors(j):
    """All ``(s+, s-)`` sectors allowed at slice ``j``."""
    return [ScaleSector(j, a, b) for a in range(j + 1) for b in range(j + 1) if a + b >= j - 2]


def cos_window(s, j, gamma):
    """Closed window ``(lo, hi)`` for ``|cos(pi k / 2)|`` in sector ``s`` of slice ``j``."""
    if s == 0:
        return 1.0 / gamma, 1.0
    if s == j:
        return 0.0, math.sqrt(2) * gamma ** (-j)
    return gamma ** (-s - 1), math.sqrt(2) * gamma ** (-s)


def q_window(s, j, gamma):
    """Window ``(lo, hi)`` for the reduced coordinate ``|q|``."""
    if s == 0:
        return 2.0 / (math.pi * gamma), 1.0
    if s == j:
        return 0.0, math.sqrt(2) * gamma ** (-j)
    return 2.0 * gamma ** (-s - 1) / math.pi, math.sqrt(2) * gamma ** (-s)


def slice_window(j, gamma):
    return gamma ** (-2 * j), 2.0 * gamma ** (-2 * j + 2)


def _in(x, win):
    return (x >= win[0]) & (x <= win[1])


def support_predicate(k, sector, gamma=14.0, third=True):
    """Whether ``k`` lies in the closed support of the sectorized slice.

    Parameters
    ----------
    k : MomentumPoint
    sector : ScaleSector
    gamma : float
    third : bool
        Also require the third factor ``|cos(pi (k+ + k-) / 2)|`` to sit in its
        ``s_0 = 0`` window.  The two-index sectors describe only the region where
        that factor is of order one.
    """
    return bool(support_mask(k.k0, k.kplus, k.kminus, sector, gamma, third))


def support_mask(k0, kp, km, sector, gamma=14.0, third=True):
    """Vectorised :func:`support_predicate` on skewed coordinates."""
    k0 = np.asarray(k0, dtype=float)
    e = band_energy_pm(kp, km)
    ok = _in(4 * k0 ** 2 + e ** 2, slice_window(sector.j, gamma))
    ok = ok & _in(np.abs(np.cos(0.5 * np.pi * np.asarray(kp))), cos_window(sector.splus, sector.j, gamma))
    ok = ok & _in(np.abs(np.cos(0.5 * np.pi * np.asarray(km))), cos_window(sector.sminus, sector.j, gamma))
    if third:
        ok = ok & (np.abs(np.cos(0.5 * np.pi * (np.asarray(kp) + np.asarray(km)))) >= 1.0 / gamma)
    return ok


def q_windows_hold(kp, km, sector, gamma=14.0):
    """Whether the reduced coordinates satisfy the ``|q|`` windows of ``sector``."""
    qp = np.abs(q_reduce(kp))
    qm = np.abs(q_reduce(km))
    return _in(qp, q_window(sector.splus, sector.j, gamma)) & _in(qm, q_window(sector.sminus, sector.j, gamma))


def sum_cos_lower_bound(gamma, both_small=False):
    """Lower bound for ``|cos(pi (k+ + k-) / 2)|`` when one sector index is >= 2."""
    return 1 - 3 * gamma ** (-4) if both_small else gamma ** (-1) * (1 - 2 * gamma ** (-1))


def _direction_ok(svals, jvals):
    order = sorted(range(4), key=lambda i: (svals[i], jvals[i]))
    a, b = order[0], order[1]
    if svals[b] - svals[a] <= 1:
        return True
    # try each index carrying the smallest value
    smin = svals[a]
    for i in range(4):
        if svals[i] != smin:
            continue
        others = [jvals[m] for m in range(4) if m != i]
        if svals[i] == jvals[i] and all(jvals[i] < o for o in others):
            return True
    return False


def conservation_predicate(sectors, parity_m=(0, 0)):
    """Momentum-conservation constraint on the four sectors at a vertex.

    Parameters
    ----------
    sectors : sequence of ScaleSector
        The four sectors meeting at the vertex.
    parity_m : (int, int)
        Umklapp integers ``(m+, m-)`` of the conservation law.  A non-zero
        value needs at least two of the corresponding indices to be 0.
    """
    if len(sectors) != 4:
        raise ValueError("a bare vertex has four fields")
    js = [s.j for s in sectors]
    for name, m in (("splus", parity_m[0]), ("sminus", parity_m[1])):
        svals = [getattr(s, name) for s in sectors]
        if m != 0 and sum(v == 0 for v in svals) < 2:
            return False
        if not _direction_ok(svals, js):
            return False
    return True


def direction_constraint(svals, jvals):
    """One-direction version of :func:`conservation_predicate`."""
    return _direction_ok(list(svals), list(jvals))
