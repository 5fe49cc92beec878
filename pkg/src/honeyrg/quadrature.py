"""Scale-adapted quadrature on the Brillouin-zone torus.

The band energy factorises as ``e = 8 c+ c- c0`` with ``c+ = cos(pi k+/2)``,
``c- = cos(pi k-/2)`` and ``c0 = cos(pi (k+ + k-)/2)``.  The torus is split
into three regions according to which of the three cosines is largest in
modulus.  In the region where ``c_X`` dominates, the two other line
coordinates are stored as reduced offsets ``(p, q)`` from the Fermi lines, so
momenta within ``1e-18`` of a line are still represented exactly.  Meshes are
geometrically graded toward the lines.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cutoffs import sector_function

# chart name -> (family of p, family of q)
CHARTS = {"0": ("+", "-"), "-": ("+", "0"), "+": ("-", "0")}


@lru_cache(maxsize=None)
def gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def composite_rule(breaks, n):
    """Gauss-Legendre nodes and weights on consecutive pieces of ``breaks``."""
    b = np.unique(np.asarray(breaks, dtype=float))
    if b.size < 2:
        return np.zeros(0), np.zeros(0)
    x, w = gauss_legendre(n)
    a, c = b[:-1], b[1:]
    h = 0.5 * (c - a)
    nodes = (0.5 * (a + c))[:, None] + h[:, None] * x[None, :]
    weights = h[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def graded_breaks(lo, hi, smallest, ratio=0.5):
    """Breakpoints on ``[lo, hi]`` graded geometrically toward 0."""
    nlev = int(np.ceil(np.log(smallest) / np.log(ratio))) + 1
    mags = ratio ** np.arange(nlev)
    pts = np.concatenate([[0.0], mags, -mags, [lo, hi]])
    return pts[(pts >= lo) & (pts <= hi)]


def sector_q_support(s, j, gamma):
    """Closed support ``[qlo, qhi]`` of ``|q|`` for sector ``s`` and the transition points."""
    # thresholds in t = cos^2
    if j == 0:
        return 0.0, 1.0, np.array([])
    if s == 0:
        tl, th, thr = gamma ** -2.0, 1.0, [gamma ** -2.0, 2 * gamma ** -2.0]
    elif s == j:
        tl, th, thr = 0.0, 2 * gamma ** (-2.0 * j), [gamma ** (-2.0 * j), 2 * gamma ** (-2.0 * j)]
    else:
        tl, th = gamma ** (-2.0 * s - 2), 2 * gamma ** (-2.0 * s)
        thr = [tl, 2 * tl, gamma ** (-2.0 * s), th]
    to_q = lambda t: 2 / np.pi * np.arcsin(np.sqrt(np.minimum(t, 1.0)))
    return to_q(tl), to_q(th), to_q(np.array(thr))


@dataclass
class ChartNodes:
    """Quadrature nodes of one chart.

    ``cp, cm, c0`` are the three cosines, ``kp, km`` the absolute skewed
    coordinates (accurate to rounding only) and ``w`` the weights of the
    normalised measure ``dk+ dk- / 4``.
    """

    chart: str
    cp: np.ndarray
    cm: np.ndarray
    c0: np.ndarray
    kp: np.ndarray
    km: np.ndarray
    w: np.ndarray
    sp: np.ndarray = None
    sm: np.ndarray = None
    s0: np.ndarray = None

    def de_dkplus(self):
        """First and second derivative of ``e`` along ``k+``."""
        d1 = -4 * np.pi * self.cm * (self.sp * self.c0 + self.cp * self.s0)
        d2 = 4 * np.pi ** 2 * self.cm * (self.sp * self.s0 - self.cp * self.c0)
        return d1, d2

    @property
    def e(self):
        return 8.0 * self.cp * self.cm * self.c0


def _cosines(chart, p, q, sines=False):
    # line variables u_a = 1 + p, u_b = 1 + q
    ca = -np.sin(0.5 * np.pi * p)
    cb = -np.sin(0.5 * np.pi * q)
    sa = np.cos(0.5 * np.pi * p)
    sb = np.cos(0.5 * np.pi * q)
    if chart == "0":
        cp, cm, sp, sm = ca, cb, sa, sb
        c0 = -np.cos(0.5 * np.pi * (p + q))
        s0 = -np.sin(0.5 * np.pi * (p + q))
        kp, km = 1 + p, 1 + q
    else:
        # u_a = k_a, u_b = k+ + k- ; remaining family via difference
        cx = np.cos(0.5 * np.pi * (q - p))
        sx = np.sin(0.5 * np.pi * (q - p))
        c0, s0 = cb, sb
        if chart == "-":
            cp, cm, sp, sm = ca, cx, sa, sx
            kp, km = 1 + p, q - p
        else:
            cm, cp, sm, sp = ca, cx, sa, sx
            km, kp = 1 + p, q - p
    kp = np.mod(kp + 1.0, 2.0) - 1.0
    km = np.mod(km + 1.0, 2.0) - 1.0
    if sines:
        return cp, cm, c0, kp, km, sp, sm, s0
    return cp, cm, c0, kp, km


def _region_breaks(chart, p):
    if chart == "0":
        cand = np.stack([1 - 2 * p, (1 - p) / 2, (1 - p) / 2 - 1])
    else:
        cand = np.stack([2 * p - 1, (1 + p) / 2, (1 + p) / 2 - 1])
    return np.mod(cand + 1.0, 2.0) - 1.0


def _in_region(chart, cp, cm, c0):
    a = np.abs(np.stack([cp, cm, c0]))
    idx = {"+": 0, "-": 1, "0": 2}[chart]
    return a[idx] >= a.max(axis=0)


def _axis_breaks(fam, sector_idx, j, gamma, smallest):
    """Breakpoints for one chart variable and whether the variable is confined."""
    if fam == "0" or sector_idx is None:
        return graded_breaks(-1.0, 1.0, smallest)
    qlo, qhi, thr = sector_q_support(sector_idx, j, gamma)
    g = graded_breaks(-qhi, qhi, max(smallest, qhi * 1e-3) if qlo == 0 else smallest)
    g = g[np.abs(g) >= qlo]
    return np.concatenate([g, thr, -thr, [qlo, -qlo, qhi, -qhi]])


def chart_nodes(chart, j, gamma, sector=None, n=6, depth=None, n_outer=None):
    """Nodes for one chart, restricted to the support of ``sector`` if given.

    Parameters
    ----------
    chart : {'0', '+', '-'}
        Family whose cosine dominates in the region.
    j : int
        Slice index; sets the grading depth ``gamma^{-j-3}``.
    sector : (int, int), optional
        ``(s+, s-)``; variables are confined to the sector windows.
    n : int
        Gauss-Legendre nodes per piece.
    n_outer : int, optional
        Nodes per piece in the outer variable ``p`` (default ``n``).
    """
    fa, fb = CHARTS[chart]
    smallest = gamma ** (-(j + 3 if depth is None else depth))
    sidx = {"+": None, "-": None, "0": None}
    if sector is not None:
        sidx["+"], sidx["-"] = sector
        # the dominating cosine is at least 1/2 in modulus
        if chart in "+-":
            s_dom = sidx[chart]
            if s_dom is not None and s_dom > 0 and sector_q_support(s_dom, j, gamma)[1] < 1 / 3:
                return None
    # region boundaries in q cross each other at p = +-1/3
    pb = np.concatenate([_axis_breaks(fa, sidx[fa], j, gamma, smallest), [-1 / 3, 1 / 3]])
    pb = pb[(pb >= -1) & (pb <= 1)]
    p, wp = composite_rule(pb, n if n_outer is None else n_outer)
    qbase = _axis_breaks(fb, sidx[fb], j, gamma, smallest)
    qbase = qbase[(qbase >= -1) & (qbase <= 1)]
    xg, wg = gauss_legendre(n)
    Ps, Qs, Ws = [], [], []
    # group outer nodes: pieces in q depend on p through region boundaries
    rb = _region_breaks(chart, p)
    for i in range(p.size):
        b = np.unique(np.concatenate([qbase, rb[:, i]]))
        a, c = b[:-1], b[1:]
        mid = 0.5 * (a + c)
        cp, cm, c0, _, _ = _cosines(chart, np.full(mid.shape, p[i]), mid)
        keep = _in_region(chart, cp, cm, c0)
        a, c = a[keep], c[keep]
        if a.size == 0:
            continue
        h = 0.5 * (c - a)
        qn = (0.5 * (a + c))[:, None] + h[:, None] * xg[None, :]
        Qs.append(qn.ravel())
        Ws.append((wp[i] * h[:, None] * wg[None, :]).ravel())
        Ps.append(np.full(qn.size, p[i]))
    if not Ps:
        return None
    P, Q, W = np.concatenate(Ps), np.concatenate(Qs), np.concatenate(Ws)
    cp, cm, c0, kp, km, sp, sm, s0 = _cosines(chart, P, Q, sines=True)
    return ChartNodes(chart, cp, cm, c0, kp, km, 0.25 * W, sp, sm, s0)


def torus_nodes(j, gamma, sector=None, n=6, depth=None, n_outer=None):
    """Nodes of all three charts (list of :class:`ChartNodes`)."""
    out = []
    for ch in CHARTS:
        nodes = chart_nodes(ch, j, gamma, sector, n, depth, n_outer)
        if nodes is not None:
            out.append(nodes)
    return out


def sector_weight(nodes, sector, j, gamma, order=2.0):
    """Product of the two sector cutoffs at the nodes."""
    sp, sm = sector
    return (sector_function(sp, j, nodes.cp ** 2, gamma, order)
            * sector_function(sm, j, nodes.cm ** 2, gamma, order))
