"""Low-order amplitudes: tadpoles, counter-term flow, sunshine scan and Gram bounds.

Tadpole norms integrate ``|chi_j Ct|`` over Matsubara frequencies and the
torus with the three-chart quadrature.  The sunshine graph is evaluated in
direct space: on an ``L x L`` momentum grid (equivalently an ``L``-periodic box
in ``x``) and a uniform imaginary-time grid the amplitude is
``Sigma(tau, x) = C(tau, x)^2 C(-tau, -x)``; one Fourier transform gives the
self-energy near the probe momentum.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cutoffs import SliceConfig, admissible_sectors, base_cutoff, sector_function, slice_function
from .propagator import (K0Table, ResolutionError, config_hash, k0_abs_table, k0_derivative_tables,
                         matsubara_count, reduced_propagator, slice_argument, slice_thresholds)
from .quadrature import gauss_legendre, sector_weight, torus_nodes

# temperature whose Matsubara spacing is far below every slice used at gamma = 14
CONTINUUM_T = 1e-30
SPIN_FACTOR = 2.0


def tadpole_config(gamma=14.0, T=CONTINUUM_T):
    return SliceConfig(gamma=gamma, T=T)


def _check_grid(j, cfg, n, depth):
    if n < 3:
        raise ResolutionError("need at least 3 Gauss points per piece")
    if depth is not None and depth < j + 2:
        raise ResolutionError(f"grading depth {depth} does not reach slice {j}")


def _ir_remainder(j, cfg):
    """Whether slice ``j`` is the last one at this temperature (absorbs the infrared)."""
    return j >= cfg.jmax and cfg.T > 1e-20


def _remainder_k0_abs(e, j, cfg):
    """``T sum_k0 chi(gamma^{2j-2} t) |Ct|`` over Matsubara frequencies."""
    kmax = math.sqrt(2.0) * cfg.gamma ** (1 - j) / 2
    nf = int(kmax / (2 * np.pi * cfg.T)) + 2
    k0 = 2 * np.pi * cfg.T * (np.arange(-nf, nf) + 0.5)
    out = np.zeros(e.shape)
    for a in range(0, k0.size, 64):
        kk = k0[None, a:a + 64]
        t = slice_argument(kk, e[:, None])
        chi = base_cutoff(cfg.gamma ** (2 * j - 2) * t, cfg.order) if j > 0 else np.ones(t.shape)
        out += cfg.T * np.sum(chi * np.abs(reduced_propagator(kk, e[:, None])), axis=1)
    return out


def tadpole_slice(j, lam, cfg=None, n=6, depth=None, npts=600):
    """``||T^j|| = |lam| int dk T sum_k0 |chi_j Ct|``.

    At a finite temperature the slice ``j = cfg.jmax`` is the infrared
    remainder ``chi(gamma^{2j-2} t)``.

    Raises
    ------
    ResolutionError
        If the quadrature does not reach slice ``j``.
    """
    cfg = cfg or tadpole_config()
    _check_grid(j, cfg, n, depth)
    if lam == 0:
        return 0.0
    nodes = torus_nodes(j, cfg.gamma, n=n, depth=depth)
    if _ir_remainder(j, cfg):
        vals = [np.sum(nd.w * _remainder_k0_abs(nd.e, j, cfg)) for nd in nodes]
    else:
        A = k0_abs_table(j, cfg, npts)
        vals = [np.sum(nd.w * A(nd.e)) for nd in nodes]
    return abs(lam) * math.fsum(vals)


def tadpole_slice_signed(j, lam, cfg=None, n=6, npts=600):
    """``|lam| sum_sigma |int chi_j v_sigma Ct|`` (signed integral per sector)."""
    cfg = cfg or tadpole_config()
    H = K0Table(j, cfg, npts)
    total = []
    for ss in admissible_sectors(j):
        sec = (ss.splus, ss.sminus)
        acc = 0.0
        for nd in torus_nodes(j, cfg.gamma, sector=sec, n=n):
            acc += np.sum(nd.w * sector_weight(nd, sec, j, cfg.gamma, cfg.order) * H(nd.e))
        total.append(abs(acc))
    return abs(lam) * math.fsum(total)


def tadpole_curvature(j, lam, cfg=None, n=6, npts=600):
    """``|lam| int |d^2/dp^2 T^j|``: external momentum shifts the loop along ``k+``.

    The integrand is ``H1 e'' + H2 (e')^2`` with ``H1 = T sum chi_j dCt/de``,
    ``H2 = T sum chi_j d^2 Ct/de^2`` and derivatives of ``e`` along ``k+``.
    """
    cfg = cfg or tadpole_config()
    h1, h2 = k0_derivative_tables(j, cfg, npts)
    vals = []
    for nd in torus_nodes(j, cfg.gamma, n=n):
        d1, d2 = nd.de_dkplus()
        vals.append(np.sum(nd.w * np.abs(h1(nd.e) * d2 + h2(nd.e) * d1 ** 2)))
    return abs(lam) * math.fsum(vals)


def generalized_tadpole(j, lam, insertion, cfg=None, n=6, npts=600):
    """Tadpole with one local biped ``insertion`` on its loop line.

    ``|lam| |m| int dk T sum_k0 chi_j^2 |Ct|^2``; the factor gained over
    :func:`tadpole_slice` is bounded by ``O(1) |m| gamma^j``.
    """
    cfg = cfg or tadpole_config()
    _check_grid(j, cfg, n, None)
    if lam == 0 or insertion == 0:
        return 0.0
    g, order = cfg.gamma, cfg.order

    def f(k0, e):
        return np.abs(reduced_propagator(k0, e)) ** 2 * slice_function(j, slice_argument(k0, e), g, order)

    A = K0Table(j, cfg, npts, func=f)
    return abs(lam) * abs(insertion) * math.fsum(np.sum(nd.w * A(nd.e)) for nd in torus_nodes(j, g, n=n))


@dataclass
class TadpoleResult:
    lam: float
    j: np.ndarray
    per_j: np.ndarray
    gamma: float
    T: float

    @property
    def total(self):
        return math.fsum(self.per_j)

    def ratio_to_claim(self):
        """``||T^j|| / (|lam| j gamma^{-j})`` for ``j >= 1``."""
        j = self.j.astype(float)
        with np.errstate(divide="ignore"):
            return self.per_j / (abs(self.lam) * j * self.gamma ** (-j))


def tadpole_scan(lam, j_list, cfg=None, **kw):
    cfg = cfg or tadpole_config()
    j_list = np.asarray(list(j_list), dtype=int)
    vals = np.array([tadpole_slice(int(j), lam, cfg, **kw) for j in j_list])
    return TadpoleResult(lam, j_list, vals, cfg.gamma, cfg.T)


def tadpole_total(lam, cfg=None, jtop=None, **kw):
    """All slices ``0..jtop`` (default ``cfg.jmax``, at most 20 in the continuum)."""
    cfg = cfg or tadpole_config()
    jtop = min(cfg.jmax, 20) if jtop is None else jtop
    return tadpole_scan(lam, range(jtop + 1), cfg, **kw)


def tadpole_table_csv(res, path, header=()):
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        wr = csv.writer(fh)
        wr.writerow(["j", "tadpole", "bound_lo", "bound_hi"])
        for j, v in zip(res.j, res.per_j):
            claim = float(abs(res.lam) * j * res.gamma ** (-float(j)))
            wr.writerow([int(j), repr(float(v)), repr(0.5 * claim), repr(2.0 * claim)])


# ----------------------------------------------------------------------------
# counter-term flow

@dataclass
class CounterTermFlow:
    """``delta_mu[r]`` for ``r = 0..rmax`` and partial sums ``partial[r] = sum_{r' > r}``."""

    lam: float
    delta_mu: np.ndarray
    partial: np.ndarray
    T: float
    gamma: float

    @property
    def rmax(self):
        return self.delta_mu.size - 1

    @property
    def endpoint(self):
        return float(self.partial[-1])

    @property
    def bare(self):
        """Bare counter-term: the sum over every scale."""
        return float(self.partial[0] + self.delta_mu[0])

    def telescoping_error(self):
        return float(np.max(np.abs(self.delta_mu[1:] + self.partial[1:] - self.partial[:-1]), initial=0.0))

    @property
    def K(self):
        return abs(self.bare) / abs(self.lam)


def counterterm_flow(lam, cfg=None, tadpoles=None, local_sunshine=None, **kw):
    """Scale-by-scale cancellation ``delta_mu^r = -(||T^r|| + |tau Sigma^r|)``.

    Parameters
    ----------
    tadpoles : sequence, optional
        Precomputed ``||T^r||`` for ``r = 0..rmax``; computed from ``cfg``
        (slices ``0..cfg.jmax``) otherwise.
    local_sunshine : mapping r -> complex, optional
        Localized second-order part; absent scales count as zero.
    """
    cfg = cfg or SliceConfig()
    if tadpoles is None:
        tadpoles = tadpole_total(lam, cfg, **kw).per_j
    dm = -np.asarray(tadpoles, dtype=float)
    if local_sunshine:
        rtop = max(max(local_sunshine), dm.size - 1)
        dm = np.concatenate([dm, np.zeros(rtop + 1 - dm.size)])
        for r, v in local_sunshine.items():
            dm[r] -= abs(v)
    partial = np.zeros(dm.size)
    for r in range(dm.size - 1, 0, -1):
        partial[r - 1] = partial[r] + dm[r]
    return CounterTermFlow(lam, dm, partial, cfg.T, cfg.gamma)


# ----------------------------------------------------------------------------
# localization

@dataclass
class SampledKernel:
    """Biped kernel ``K(z - y)`` on a product grid.

    ``values[i, a, b]`` sits at ``x0[i]`` and spatial offsets
    ``(a - N+ // 2) * spacing[0]``, ``(b - N- // 2) * spacing[1]``; ``cell`` is
    the volume element.
    """

    x0: np.ndarray
    spacing: tuple
    values: np.ndarray
    cell: float = 1.0
    meta: dict = field(default_factory=dict)

    def coords(self):
        _, na, nb = self.values.shape
        xp = (np.arange(na) - na // 2) * self.spacing[0]
        xm = (np.arange(nb) - nb // 2) * self.spacing[1]
        return np.meshgrid(np.asarray(self.x0, dtype=float), xp, xm, indexing="ij")


@dataclass
class LocalizationReport:
    local: complex
    first_order: tuple
    l1: float
    moment0: float
    moment_pm: float

    @property
    def gain0(self):
        """``int |z0 - y0| |K| / int |K|``."""
        return self.moment0 / self.l1 if self.l1 else 0.0

    @property
    def gain_pm(self):
        return self.moment_pm / self.l1 if self.l1 else 0.0

    @property
    def remainder_bound(self):
        return self.moment0 + self.moment_pm


def localization_split(kernel, external_scale=None):
    """Local part ``int dz K`` and moment factors controlling the remainder.

    Accepts :class:`SampledKernel` or any object with ``x0``, ``spacing``
    and ``values`` laid out the same way (e.g. a direct-space propagator).
    """
    K = kernel if isinstance(kernel, SampledKernel) else SampledKernel(
        np.asarray(kernel.x0), tuple(kernel.spacing), np.asarray(kernel.values),
        float(np.prod(kernel.spacing)) * (float(kernel.x0[1] - kernel.x0[0]) if len(kernel.x0) > 1 else 1.0))
    d0, dp, dm = K.coords()
    v = K.values * K.cell
    a = np.abs(v)
    local = complex(np.sum(v))
    first = (complex(np.sum(d0 * v)), complex(np.sum(dp * v)), complex(np.sum(dm * v)))
    return LocalizationReport(local, first, float(a.sum()), float(np.sum(np.abs(d0) * a)),
                              float(np.sum(np.abs(dp) * np.abs(dm) * a)))


# ----------------------------------------------------------------------------
# sunshine

def sector_r_index(j, splus, sminus):
    """Integer scale label ``ceil((j + s+ + s-) / 2) + 1`` of a sector."""
    return (j + splus + sminus + 1) // 2 + 1


@dataclass
class SelfEnergyScan:
    """Sunshine self-energy per scale at the probe ``(pi T, 1, 0)``.

    ``sigma[r]`` is the amplitude at overall scale ``r``; ``d1``/``d2`` are
    central differences along ``k+`` with one grid spacing ``h``.
    """

    lam: float
    T: float
    gamma: float
    L: int
    kmax: float
    r: np.ndarray
    sigma: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d2_wide: np.ndarray
    h: float
    l1: np.ndarray = None
    moment0: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def ratios(self, which="d2"):
        v = np.abs(getattr(self, which))
        return v[1:] / v[:-1]

    def rows(self):
        out = []
        prev = None
        for r, s, a, b in zip(self.r, self.sigma, self.d1, self.d2):
            out.append((int(r), abs(s), abs(a), abs(b), None if prev is None else abs(b) / prev))
            prev = abs(b)
        return out


def _sector_weights(cfg, cp2, cm2, rtop):
    """``V[(j, r)] = sum_{sectors of slice j with scale label r} v_{s+} v_{s-}``."""
    V = {}
    for j in range(cfg.jmax + 1):
        va = [sector_function(a, j, cp2, cfg.gamma, cfg.order) for a in range(j + 1)]
        vb = [sector_function(b, j, cm2, cfg.gamma, cfg.order) for b in range(j + 1)]
        for a in range(j + 1):
            for b in range(j + 1):
                r = min(sector_r_index(j, a, b), cfg.rmax)
                if r <= rtop:
                    V[(j, r)] = V.get((j, r), 0.0) + va[a] * vb[b]
    return V


def sunshine_guard(r_list, cfg, L):
    """Grid guards: power-of-two ``L >= 8 gamma^{r-1}`` and ``r <= rmax``."""
    if L & (L - 1) or L < 16:
        raise ResolutionError("L must be a power of two, at least 16")
    rtop = max(r_list)
    if rtop > cfg.rmax:
        raise ResolutionError(f"scale {rtop} above rmax = {cfg.rmax} at this temperature")
    if L < 8 * cfg.gamma ** (rtop - 1):
        raise ResolutionError(f"L = {L} does not hold scale {rtop} (need 8 gamma^(r-1))")


def sunshine_self_energy_scan(lam, r_list, cfg, L=512, kmax=1.5, tchunk=32, fchunk=16,
                              moments=False, keep_kernel=None, check=True):
    """Sunshine self-energy at overall scale ``r`` and its ``k+`` differences.

    ``Sigma^r`` uses ``C_{<=r}`` (all sectors with label at most ``r``; the
    last slice is the infrared remainder at ``cfg.T``) minus the same with
    ``C_{<=r-1}``.  Matsubara frequencies are kept up to ``|k0| <= kmax``.

    Parameters
    ----------
    lam : float
    r_list : sequence of int
        Scales to report (every scale from 1 to ``max(r_list)`` is computed).
    cfg : SliceConfig
    L : int
        Momentum grid size per direction (power of two).
    moments : bool
        Also return ``int |Sigma^r|`` and ``int |tau| |Sigma^r|``; doubles the cost.
    keep_kernel : int, optional
        Return the full direct-space kernel of this scale as a :class:`SampledKernel`.

    Raises
    ------
    ResolutionError
        Via :func:`sunshine_guard`.
    """
    r_list = sorted(set(int(r) for r in r_list))
    if check:
        sunshine_guard(r_list, cfg, L)
    rtop = max(r_list)
    g, T = cfg.gamma, cfg.T
    kp = 2.0 * np.arange(L) / L
    KP, KM = np.meshgrid(kp, -kp, indexing="ij")
    cp, cm, c0 = np.cos(np.pi * KP / 2), np.cos(np.pi * KM / 2), np.cos(np.pi * (KP + KM) / 2)
    ef = (8 * cp * cm * c0).ravel()
    V = _sector_weights(cfg, cp ** 2, cm ** 2, rtop)
    n0 = int(kmax / (2 * np.pi * T)) + 1
    k0 = 2 * np.pi * T * (np.arange(n0) + 0.5)
    beta = 1.0 / T
    mt = 6 * n0 + 2
    tau = np.arange(mt) * beta / mt
    ph = np.exp(1j * np.pi * T * tau)
    tdist = np.minimum(tau, beta - tau)
    pref = SPIN_FACTOR * lam ** 2
    Cr, Ci = np.zeros((n0, L * L)), np.zeros((n0, L * L))
    prev = None
    probes, l1s, m0s = {}, {}, {}
    kernel = None
    u = L // 2

    def cx(Ar, Ai, tc):
        c, s = np.cos(np.outer(tc, k0)), np.sin(np.outer(tc, k0))
        X, Y = c @ Ar, s @ Ai
        # C(tau, k) = 2T Re sum_{k0 > 0} exp(-i k0 tau) C(k0, k), real and even in k
        cp_ = np.fft.ifft2((2 * T * (X + Y)).reshape(-1, L, L), axes=(1, 2)).real
        cm_ = np.fft.ifft2((2 * T * (X - Y)).reshape(-1, L, L), axes=(1, 2)).real
        return cp_ * cp_ * cm_

    for r in range(1, rtop + 1):
        js = [j for j in range(cfg.jmax + 1) if (j, r) in V]
        for a in range(0, n0, fchunk):
            kk = k0[a:a + fchunk, None]
            tt = slice_argument(kk, ef[None, :])
            Ct = reduced_propagator(kk, ef[None, :])
            for j in js:
                if j < cfg.jmax:
                    chi = slice_function(j, tt, g, cfg.order)
                else:
                    chi = base_cutoff(g ** (2 * j - 2) * tt, cfg.order) if j > 0 else np.ones(tt.shape)
                w = chi * V[(j, r)].ravel()[None, :]
                Cr[a:a + fchunk] += w * Ct.real
                Ci[a:a + fchunk] += w * Ct.imag
        A = np.zeros((L, L), dtype=complex)
        l1 = m0 = 0.0
        full = [] if keep_kernel == r else None
        for b in range(0, mt, tchunk):
            tc = tau[b:b + tchunk]
            P = cx(Cr, Ci, tc)
            A += np.tensordot(ph[b:b + tchunk], P, axes=(0, 0))
            if moments or full is not None:
                D = P - cx(*prev, tc) if prev is not None else P
                if moments:
                    ad = np.abs(D).sum(axis=(1, 2))
                    l1 += float(ad.sum())
                    m0 += float(np.dot(tdist[b:b + tchunk], ad))
                if full is not None:
                    full.append(D)
        A *= beta / mt
        S = np.fft.fft2(A)
        probes[r] = pref * np.array([S[u + d, 0] for d in (-2, -1, 0, 1, 2)])
        if moments:
            cell = beta / mt
            l1s[r], m0s[r] = pref * l1 * cell, pref * m0 * cell
        if full is not None:
            D = np.concatenate(full) * pref
            order = np.argsort(np.where(tau < beta / 2, tau, tau - beta))
            vals = np.fft.fftshift(D[order], axes=(1, 2))
            x0 = np.where(tau < beta / 2, tau, tau - beta)[order]
            kernel = SampledKernel(x0, (1.0, 1.0), vals, beta / mt, dict(r=r))
        if moments or keep_kernel is not None:
            prev = (Cr.copy(), Ci.copy())
    h = 2.0 / L
    rs = np.array(r_list)
    sig, d1, d2, d2w = [], [], [], []
    for r in r_list:
        d = probes[r] - probes.get(r - 1, 0.0)
        sig.append(d[2])
        d1.append((d[3] - d[1]) / (2 * h))
        d2.append((d[3] - 2 * d[2] + d[1]) / h ** 2)
        d2w.append((d[4] - 2 * d[2] + d[0]) / (2 * h) ** 2)
    scan = SelfEnergyScan(lam, T, g, L, kmax, rs, np.array(sig), np.array(d1), np.array(d2), np.array(d2w), h,
                          np.array([l1s[r] for r in r_list]) if moments else None,
                          np.array([m0s[r] for r in r_list]) if moments else None,
                          dict(jmax=cfg.jmax, rmax=cfg.rmax, n_freq=n0, n_tau=mt))
    if keep_kernel is not None:
        scan.meta["kernel"] = kernel
    return scan


def write_selfenergy_csv(scan, path, header=()):
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        wr = csv.writer(fh)
        wr.writerow(["r", "sigma_value", "d1", "d2", "ratio_to_prev"])
        for r, s, a, b, q in scan.rows():
            wr.writerow([int(r), repr(float(s)), repr(float(a)), repr(float(b)), "" if q is None else repr(float(q))])


# ----------------------------------------------------------------------------
# Gram-Hadamard

@dataclass
class GramField:
    """Field (or anti-field) at ``(x0, n+, n-)`` carrying a sector ``(j, s+, s-)``."""

    x0: float
    npl: int
    nmi: int
    sector: tuple


def _sector_measure(sector, gamma, n=4, nk0=24):
    j, sp, sm = sector
    nodes = torus_nodes(j, gamma, sector=(sp, sm), n=n)
    kmax = math.sqrt(slice_thresholds(j, gamma)[-1]) / 2 if j > 0 else 6.0
    x, w = gauss_legendre(nk0)
    k0 = kmax * x
    wk = kmax * w / (2 * np.pi)
    out = []
    for nd in nodes:
        v = sector_weight(nd, (sp, sm), j, gamma)
        keep = v > 0
        if not keep.any():
            continue
        e = nd.e[keep]
        K0 = k0[:, None]
        c = slice_function(j, slice_argument(K0, e[None, :]), gamma) * reduced_propagator(K0, e[None, :])
        c = c * v[keep][None, :]
        wt = wk[:, None] * nd.w[keep][None, :]
        out.append((np.broadcast_to(K0, c.shape).ravel(), np.broadcast_to(nd.kp[keep], c.shape).ravel(),
                    np.broadcast_to(nd.km[keep], c.shape).ravel(), (wt * c).ravel()))
    return [np.concatenate(z) for z in zip(*out)]


def gram_bound_check(fields, antifields, gamma=14.0, n=4, nk0=24):
    """``|det C(f_i - g_j)| <= prod ||A_f|| ||B_g||`` for sectorised propagators.

    Entries are ``int dk e^{ik(x_f - y_g)} v_sigma C_t(k)`` when ``f`` and ``g``
    carry the same sector ``sigma`` and 0 otherwise, i.e. inner products of
    ``A_f = e^{i k x_f} |v C_t|^{1/2}`` and ``B_g = e^{-i k y_g} |v C_t|^{1/2} e^{i arg C_t}``
    supported on the quadrature nodes of each sector (all fields of one slice).

    Returns
    -------
    (det_value, gram_bound, ok, norms)
    """
    if len(fields) != len(antifields) or len(fields) > 8:
        raise ValueError("need equal numbers of fields and anti-fields, at most 8")
    meas = {}
    for f in list(fields) + list(antifields):
        if f.sector not in meas:
            meas[f.sector] = _sector_measure(f.sector, gamma, n, nk0)
    js = {s[0] for s in meas}
    if len(js) != 1:
        raise ValueError("all fields must share one slice")
    # one block of quadrature nodes per sector
    secs = sorted(meas)
    K0 = np.concatenate([meas[s][0] for s in secs])
    KP = np.concatenate([meas[s][1] for s in secs])
    KM = np.concatenate([meas[s][2] for s in secs])
    Wc = np.concatenate([meas[s][3] for s in secs])
    owner = np.concatenate([np.full(meas[s][0].size, i) for i, s in enumerate(secs)])
    amp = np.sqrt(np.abs(Wc))
    phase = np.exp(1j * np.angle(Wc))

    def vec(f, sign):
        sel = owner == secs.index(f.sector)
        ph = np.exp(sign * 1j * (K0 * f.x0 + np.pi * (KP * f.npl + KM * f.nmi)))
        return np.where(sel, ph * amp, 0.0)

    A = np.array([vec(f, 1) for f in fields])
    B = np.array([vec(g, -1) * phase for g in antifields])
    M = A @ B.T
    det = complex(np.linalg.det(M))
    normsA = np.linalg.norm(A, axis=1)
    normsB = np.linalg.norm(B, axis=1)
    bound = float(np.prod(normsA) * np.prod(normsB))
    return det, bound, abs(det) <= bound * (1 + 1e-12), (normsA, normsB)


def summary_json(path, **values):
    with open(path, "w") as fh:
        json.dump({k: (float(v) if isinstance(v, (np.floating, float)) else v) for k, v in values.items()},
                  fh, indent=1, sort_keys=True, default=str)


__all__ = [
    "CONTINUUM_T", "TadpoleResult", "CounterTermFlow", "SelfEnergyScan", "SampledKernel",
    "tadpole_slice", "tadpole_slice_signed", "generalized_tadpole", "tadpole_curvature", "tadpole_scan", "tadpole_total",
    "counterterm_flow", "localization_split", "sunshine_self_energy_scan", "gram_bound_check",
    "config_hash",
]
