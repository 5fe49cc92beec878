"""Exhaustive sector sums behind the logarithmic power counting.

Fields hooked to a vertex carry a slice index ``j`` and sector indices
``(s+, s-)``.  At a fixed generalized index ``r = (j + s+ + s-)/2 + 1`` the
admissible tuples satisfy ``s+ + s- >= r - 2`` and ``0 <= s+- <= j``, and a field
contributes ``gamma^{-l/4}`` with depth ``l = s+ + s- - j + 2``.  Momentum
conservation at a vertex is the collapse-or-minimal-slice rule applied in both
directions.

Chains are path topologies: consecutive vertices share a tree line, every
internal vertex carries one loop line whose two ends (the root field and the
field contracted with it) have the same sector, and the external sectors are
fixed.  Sums along a chain are exact transfer-matrix products over the sector
set at index ``r``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .cutoffs import ScaleSector

MAX_CHAIN = 6


def sectors_at_index(r):
    """All admissible ``(j, s+, s-)`` with ``j + s+ + s- = 2r - 2`` as an ``(N, 3)`` array."""
    if r < 1:
        raise ValueError("generalized index must be at least 1")
    out = []
    for j in range(2 * r - 1):
        s = 2 * r - 2 - j
        for sp in range(max(0, s - j), min(j, s) + 1):
            sm = s - sp
            if sp + sm >= j - 2:
                out.append((j, sp, sm))
    return np.array(out, dtype=np.int64)


def field_depth(S):
    S = np.asarray(S)
    return S[..., 1] + S[..., 2] - S[..., 0] + 2


def field_weight(S, gamma):
    """``gamma^{-l/4}`` for one field end."""
    return gamma ** (-field_depth(S) / 4.0)


def _direction_mask(s, j):
    s = np.broadcast_arrays(*s)
    j = np.broadcast_arrays(*j)
    a, b, c, d = s
    m1, M1 = np.minimum(a, b), np.maximum(a, b)
    m2, M2 = np.minimum(c, d), np.maximum(c, d)
    u1 = np.minimum(m1, m2)
    u2 = np.minimum(np.maximum(m1, m2), np.minimum(M1, M2))
    ok = (u2 - u1) <= 1
    jmin = np.minimum(np.minimum(j[0], j[1]), np.minimum(j[2], j[3]))
    count = sum((ji == jmin).astype(np.int8) for ji in j)
    minimal = np.zeros(ok.shape, dtype=bool)
    for si, ji in zip(s, j):
        minimal |= (ji == jmin) & (si == ji) & (si == u1)
    return ok | (minimal & (count == 1))


def conservation_mask(f1, f2, f3, f4):
    """Vectorised vertex constraint on four ``(j, s+, s-)`` fields (broadcasting)."""
    fs = [tuple(np.asarray(x) for x in f) for f in (f1, f2, f3, f4)]
    js = [f[0] for f in fs]
    return _direction_mask([f[1] for f in fs], js) & _direction_mask([f[2] for f in fs], js)


def _cols(S, axis=None):
    j, sp, sm = S.T
    if axis == 0:
        return j[:, None], sp[:, None], sm[:, None]
    if axis == 1:
        return j[None, :], sp[None, :], sm[None, :]
    return j, sp, sm


def _tuple(sector):
    if isinstance(sector, ScaleSector):
        return (sector.j, sector.splus, sector.sminus)
    return tuple(int(x) for x in sector)


def default_external(r):
    """External sector used by default: ``s+ = s- = j = r + 1`` (index above ``r``)."""
    return (r + 1, r + 1, r + 1)


def bare_vertex_sector_sum(r, sigma4=None, gamma=14.0, constraint=True):
    """Sum over three fields at index ``r`` for a fixed fourth sector.

    Parameters
    ----------
    r : int
        Common generalized index of the three summed fields.
    sigma4 : (j, s+, s-) or ScaleSector, optional
        Fixed root field; defaults to :func:`default_external`.
    constraint : bool
        Apply the conservation constraint (``False`` is the control run).
    """
    sigma4 = _tuple(default_external(r) if sigma4 is None else sigma4)
    S = sectors_at_index(r)
    w = field_weight(S, gamma)
    if not constraint:
        return float(w.sum() ** 3)
    A, B = _cols(S, 0), _cols(S, 1)
    j, sp, sm = S.T
    parts = []
    for i in range(S.shape[0]):
        c = conservation_mask((j[i], sp[i], sm[i]), A, B, sigma4)
        parts.append(w[i] * float(np.sum(c * w[:, None] * w[None, :])))
    return math.fsum(parts)


def root_pair_kernel(r, gamma=14.0):
    """Transfer matrix ``M[in, out] = sum_rho chi(in, out, rho, rho) gamma^{-l_rho/2}``."""
    S = sectors_at_index(r)
    w2 = field_weight(S, gamma) ** 2
    A, B = _cols(S, 0), _cols(S, 1)
    j, sp, sm = S.T
    M = np.zeros((S.shape[0], S.shape[0]))
    for k in range(S.shape[0]):
        rho = (j[k], sp[k], sm[k])
        M += w2[k] * conservation_mask(A, B, rho, rho)
    return S, M


def chain_sector_sum(kind, n_vertices, r, gamma=14.0, externals=None, kernel=None):
    """Exact sector sum over a chain of ``n_vertices`` bare vertices.

    Parameters
    ----------
    kind : {'biped', 'quadruped'}
        Biped chains have one external field at each end with identical
        sectors.  Quadruped chains have two externals at each end and one loop
        line joining the two end vertices.
    n_vertices : int
        Chain length, at most ``MAX_CHAIN``.
    r : int
        Generalized index of all internal lines.
    externals : sequence of sectors, optional
        One sector (biped) or four (quadruped); default :func:`default_external`.
    kernel : (S, M), optional
        Precomputed :func:`root_pair_kernel` at this ``r``.
    """
    if kind not in ("biped", "quadruped"):
        raise ValueError(f"unknown chain kind {kind!r}")
    if not 1 <= n_vertices <= MAX_CHAIN:
        raise ValueError(f"chain length must be in [1, {MAX_CHAIN}]")
    nx = 1 if kind == "biped" else 4
    if externals is None:
        externals = [default_external(r)] * nx
    externals = [_tuple(e) for e in externals]
    if len(externals) != nx:
        raise ValueError(f"{kind} chains take {nx} external sectors")
    S, M = kernel if kernel is not None else root_pair_kernel(r, gamma)
    w2 = field_weight(S, gamma) ** 2
    F = _cols(S)
    if kind == "biped":
        e = externals[0]
        R = _cols(S, 0)
        if n_vertices == 1:
            return float(np.sum(w2 * conservation_mask(e, e, F, F)))
        # end vertices: (e, tau, rho, rho) summed over rho
        end = np.sum(w2[:, None] * conservation_mask(e, _cols(S, 1), R, R), axis=0)
        v = end * w2
        for _ in range(n_vertices - 2):
            v = (v @ M) * w2
        return float(v @ end)
    e1, e2, e3, e4 = externals
    if n_vertices == 1:
        return float(conservation_mask(e1, e2, e3, e4))
    parts = []
    for L in range(S.shape[0]):
        lam = (S[L, 0], S[L, 1], S[L, 2])
        v = conservation_mask(e1, e2, F, lam) * w2
        for _ in range(n_vertices - 2):
            v = (v @ M) * w2
        parts.append(w2[L] * float(v @ conservation_mask(F, lam, e3, e4)))
    return math.fsum(parts)


def tadpole_sector_sum(j, gamma=14.0):
    """``sum gamma^{-s+ - s-}`` over ``0 <= s+- <= j``, ``s+ + s- >= j - 2`` by enumeration."""
    return math.fsum(gamma ** (-a - b) for a in range(j + 1) for b in range(j + 1) if a + b >= j - 2)


def tadpole_sector_closed(j, gamma=14.0):
    """Closed form of :func:`tadpole_sector_sum` (geometric sums)."""
    x = 1.0 / gamma
    tail = lambda lo: (x ** lo - x ** (j + 1)) / (1 - x)
    if j < 2:
        return tail(0) ** 2
    s1 = ((j - 1) * x ** (j - 2) - x ** (j + 1) * (1 - x ** (j - 1)) / (1 - x)) / (1 - x)
    s2 = (x ** (j - 1) + x ** j) * tail(0)
    return s1 + s2


@dataclass
class SectorScanRow:
    kind: str
    n: int
    r: int
    value: float
    growth: float

    @property
    def normalised(self):
        return self.value / self.growth


def sector_scan(kind, n, r_list, gamma=14.0):
    """Rows ``(kind, n, r, sum, sum / claimed growth)``.

    ``kind`` is 'bare' (growth ``r``), 'bare-off' (constraint off, growth ``r``),
    'biped' or 'quadruped' (growth ``r^{n-1}``).
    """
    rows = []
    for r in r_list:
        if kind == "bare":
            v, g = bare_vertex_sector_sum(r, gamma=gamma), r
        elif kind == "bare-off":
            v, g = bare_vertex_sector_sum(r, gamma=gamma, constraint=False), r
        else:
            v, g = chain_sector_sum(kind, n, r, gamma), float(r) ** (n - 1)
        rows.append(SectorScanRow(kind, n, r, v, g))
    return rows


def write_scan_csv(rows, path, header=()):
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        wr = csv.writer(fh)
        wr.writerow(["kind", "n", "r", "sum", "sum_over_claimed_growth"])
        for row in rows:
            wr.writerow([row.kind, row.n, row.r, repr(row.value), repr(row.normalised)])
