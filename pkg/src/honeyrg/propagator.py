"""Free propagator, its slice and sector pieces, and direct-space kernels.

Conventions: ``C(k) = Ct(k) A(k)`` with the scalar part
``Ct = 1 / (k0^2 + e - 2 i k0)`` and
``A = [[i k0 + 1, -conj(Omega)], [-Omega, i k0 + 1]]`` at ``mu = 1``.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .cutoffs import SliceConfig, ScaleSector, slice_function, sector_function
from .lattice import MomentumPoint, band_energy, band_energy_pm, dispersion_omega, from_pm, pm_coords
from .quadrature import composite_rule, gauss_legendre, sector_weight, torus_nodes


class SingularPropagator(ArithmeticError):
    pass


class ResolutionError(RuntimeError):
    """Raised when a grid cannot resolve the requested scale."""


def defining_matrix(k0, omega, mu=1.0):
    """Matrix whose inverse is the free propagator."""
    return np.array([[-1j * k0 - mu, -np.conj(omega)], [-omega, -1j * k0 - mu]])


def free_propagator(k, mu=1.0):
    """Closed-form free propagator at a :class:`MomentumPoint`.

    Raises
    ------
    SingularPropagator
        If the denominator is below ``1e-14`` in modulus.
    """
    om = complex(dispersion_omega(k.k1, k.k2))
    den = k.k0 ** 2 + abs(om) ** 2 - mu ** 2 - 2j * mu * k.k0
    if abs(den) < 1e-14:
        raise SingularPropagator("propagator denominator vanishes")
    a = 1j * k.k0 + mu
    return np.array([[a, -np.conj(om)], [-om, a]]) / den


def reduced_propagator(k0, e):
    """Scalar part ``1 / (k0^2 + e - 2 i k0)`` (at ``mu = 1``)."""
    return 1.0 / (np.asarray(k0) ** 2 + np.asarray(e) - 2j * np.asarray(k0))


def a_matrix(k0, omega):
    return np.array([[1j * k0 + 1, -np.conj(omega)], [-omega, 1j * k0 + 1]])


def slice_argument(k0, e):
    return 4 * np.asarray(k0) ** 2 + np.asarray(e) ** 2


def sliced_propagator(k, j, cfg=SliceConfig()):
    e = float(band_energy(k.k1, k.k2))
    return free_propagator(k) * float(slice_function(j, slice_argument(k.k0, e), cfg.gamma, cfg.order))


def sector_factor(kp, km, sector, cfg=SliceConfig()):
    cp = np.cos(0.5 * np.pi * np.asarray(kp))
    cm = np.cos(0.5 * np.pi * np.asarray(km))
    return (sector_function(sector.splus, sector.j, cp ** 2, cfg.gamma, cfg.order)
            * sector_function(sector.sminus, sector.j, cm ** 2, cfg.gamma, cfg.order))


def sliced_sector_propagator(k, sector, cfg=SliceConfig()):
    """``C(k) chi_j(4 k0^2 + e^2) v_{s+}(cos^2 pi k+/2) v_{s-}(cos^2 pi k-/2)``."""
    return sliced_propagator(k, sector.j, cfg) * float(sector_factor(k.kplus, k.kminus, sector, cfg))


# ---------------------------------------------------------------- k0 sums


def slice_thresholds(j, gamma):
    """Values of ``4 k0^2 + e^2`` where the slice cutoff changes regime."""
    if j == 0:
        return np.array([1.0, 2.0])
    return np.array([1.0, 2.0, gamma ** 2, 2 * gamma ** 2]) * gamma ** (-2.0 * j)


def matsubara_count(j, cfg):
    """Number of positive Matsubara frequencies inside slice ``j``."""
    kmax = math.sqrt(slice_thresholds(j, cfg.gamma)[-1]) / 2
    return int(kmax / (2 * math.pi * cfg.T) + 0.5)


def k0_slice_sum(e, j, cfg, weight=None, max_freq=200000, n=24, func=None):
    """``T sum_{k0} chi_j(4 k0^2 + e^2) Ct(k0, e) weight(k0)`` at each ``e``.

    When slice ``j`` holds more than ``max_freq`` positive frequencies the
    sum is replaced by ``(1/2pi) int dk0``; for a smooth compactly supported
    summand the difference is smaller than any power of the spacing.

    Parameters
    ----------
    e : array_like
        Band energies.
    weight : callable, optional
        Extra factor ``weight(k0)`` (e.g. a phase); default 1.
    """
    e = np.atleast_1d(np.asarray(e, dtype=float))
    g, order = cfg.gamma, cfg.order
    func = reduced_propagator if func is None else func
    nf = matsubara_count(j, cfg) if j > 0 else None
    if nf is not None and nf <= max_freq:
        k0 = 2 * np.pi * cfg.T * (np.arange(-nf - 2, nf + 2) + 0.5)
        K, E = np.meshgrid(k0, e, sparse=True)
        f = slice_function(j, slice_argument(K, E), g, order) * func(K, E)
        if weight is not None:
            f = f * weight(K)
        return cfg.T * f.sum(axis=1)
    thr = slice_thresholds(j, g)
    x, w = gauss_legendre(n)
    out = np.zeros(e.shape, dtype=complex)
    # breakpoints in k0 >= 0 where 4 k0^2 + e^2 crosses a threshold
    bk = np.sqrt(np.clip(thr[None, :] - e[:, None] ** 2, 0, None)) / 2
    top = bk[:, -1] if j > 0 else None
    edges = np.concatenate([np.zeros((e.size, 1)), bk], axis=1)
    for i in range(edges.shape[1] - 1):
        a, b = edges[:, i:i + 1], edges[:, i + 1:i + 2]
        h = 0.5 * (b - a)
        K = 0.5 * (a + b) + h * x[None, :]
        for s in (1.0, -1.0):
            f = slice_function(j, slice_argument(K, e[:, None]), g, order) * func(s * K, e[:, None])
            if weight is not None:
                f = f * weight(s * K)
            out += (h * w[None, :] * f).sum(axis=1)
    if j == 0:
        # tail beyond the last threshold, k0 = b / u
        b = edges[:, -1:]
        b = np.where(b > 0, b, 1.0)
        xs, ws = gauss_legendre(64)
        u = 0.5 * (xs + 1)
        K = b / u[None, :]
        jac = b / u[None, :] ** 2 * 0.5 * ws[None, :]
        for s in (1.0, -1.0):
            f = slice_function(0, slice_argument(K, e[:, None]), g, order) * func(s * K, e[:, None])
            if weight is not None:
                f = f * weight(s * K)
            out += (jac * f).sum(axis=1)
    return out / (2 * np.pi)


class K0Table:
    """Interpolation table of :func:`k0_slice_sum` (real part) in ``e``."""

    def __init__(self, j, cfg, npts=600, func=None, part="real"):
        emax = math.sqrt(slice_thresholds(j, cfg.gamma)[-1]) if j > 0 else 9.0
        br = np.sqrt(slice_thresholds(j, cfg.gamma))
        br = np.unique(np.concatenate([[-emax, 0.0, emax], br[br < emax], -br[br < emax]]))
        if j == 0:
            br = np.unique(np.concatenate([br, [-1.0, 8.0]]))
        self.emax = emax
        self.j = j
        self.pieces = []
        for a, b in zip(br[:-1], br[1:]):
            xs = np.linspace(a, b, npts)
            self.pieces.append((a, b, CubicSpline(xs, getattr(k0_slice_sum(xs, j, cfg, func=func), part))))

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        out = np.zeros(e.shape)
        for a, b, sp in self.pieces:
            m = (e >= a) & (e <= b)
            out[m] = sp(e[m])
        return out


def abs_reduced_propagator(k0, e):
    return np.abs(reduced_propagator(k0, e))


def k0_abs_table(j, cfg, npts=600):
    """Table of ``T sum_{k0} chi_j |Ct|`` as a function of ``e``."""
    return K0Table(j, cfg, npts, func=abs_reduced_propagator)


def k0_derivative_tables(j, cfg, npts=600):
    """Tables of ``T sum chi_j d Ct/de`` and ``T sum chi_j d^2 Ct/de^2``."""
    h1 = K0Table(j, cfg, npts, func=lambda K, E: -reduced_propagator(K, E) ** 2)
    h2 = K0Table(j, cfg, npts, func=lambda K, E: 2 * reduced_propagator(K, E) ** 3)
    return h1, h2


# ---------------------------------------------------------------- grids


@dataclass(frozen=True)
class MomentumGrid:
    """Matsubara frequencies times an ``L x L`` grid of the Brillouin zone.

    Points are ``k = (2 pi T (n + 1/2), (n1/L) G1 + (n2/L) G2)`` with
    ``n`` in ``[-N0, N0 - 1]``.  In skewed coordinates ``k+ = 2 n1/L`` and
    ``k- = -2 n2/L``.
    """

    T: float
    L: int
    N0: int

    def __post_init__(self):
        if self.T <= 0 or self.L < 2 or self.N0 < 1:
            raise ValueError("invalid momentum grid")

    @property
    def beta(self):
        return 1.0 / self.T

    def k0(self):
        return 2 * np.pi * self.T * (np.arange(-self.N0, self.N0) + 0.5)

    def kpm(self):
        n = np.arange(self.L)
        kp = 2.0 * n / self.L
        km = -2.0 * n / self.L
        return np.meshgrid(kp, km, indexing="ij")

    def k1k2(self):
        kp, km = self.kpm()
        return from_pm(kp, km)

    def check_resolves(self, sector, gamma):
        """Guards for slice ``sector.j`` on this grid.

        The frequency range must cover the slice support, at least eight
        frequencies must fall inside it, and ``L >= 4 gamma^{s}`` in
        both skewed directions.
        """
        kmax = math.sqrt(slice_thresholds(sector.j, gamma)[-1]) / 2 if sector.j > 0 else 3.0
        if 2 * np.pi * self.T * self.N0 < kmax:
            raise ResolutionError(f"N0={self.N0} does not cover slice {sector.j}")
        if sector.j > 0 and 2 * np.pi * self.T > kmax / 8:
            raise ResolutionError(f"Matsubara spacing too coarse for slice {sector.j}")
        if self.L < 4 * gamma ** max(sector.splus, sector.sminus):
            raise ResolutionError(f"L={self.L} does not resolve sector {sector}")


def grid_values(sector, grid, cfg=SliceConfig()):
    """Scalar sectorised propagator on every point of ``grid``, shape ``(2 N0, L, L)``."""
    kp, km = grid.kpm()
    e = band_energy_pm(kp, km)
    k0 = grid.k0()[:, None, None]
    vs = sector_factor(kp, km, sector, cfg)[None]
    return slice_function(sector.j, slice_argument(k0, e[None]), cfg.gamma, cfg.order) * vs * reduced_propagator(k0, e[None])


def grid_transform(sector, grid, x0, cfg=SliceConfig(), check=True):
    """Direct-space scalar kernel on the grid lattice at imaginary times ``x0``.

    Returns an array ``(len(x0), L, L)`` indexed by ``(x0, n+, n-)`` with
    ``n+-`` modulo ``L``.
    """
    if check:
        grid.check_resolves(sector, cfg.gamma)
    vals = grid_values(sector, grid, cfg)
    k0 = grid.k0()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f = np.tensordot(np.exp(1j * np.outer(x0, k0)), vals, axes=(1, 0))
    # exp(i pi (k+ n+ + k- n-)) = exp(2 pi i (n1 n+ - n2 n-) / L)
    out = np.fft.ifft(np.fft.fft(f, axis=2), axis=1) * grid.L
    return out / (grid.beta * grid.L ** 2)


# ---------------------------------------------------------------- sector meshes


@dataclass(frozen=True)
class SectorMesh:
    """Uniform skewed-momentum mesh on a box around the vertex ``(1, 1)``.

    The box has side ``pad * 2 sqrt(2) gamma^{-s}`` in each direction (the
    whole period for ``s = 0``) and ``N`` points per side.  Imaginary time is
    treated by a Matsubara sum at the effective temperature
    ``gamma^{-j} / (2 pi ref)``, whose period exceeds every ``x0`` used.
    """

    N: int = 1024
    pad: int = 2
    ref: int = 16

    def side(self, s, gamma):
        return min(2.0, self.pad * 2 * math.sqrt(2) * gamma ** (-s))

    def axis(self, s, gamma):
        b = self.side(s, gamma)
        return -b / 2 + b / self.N * np.arange(self.N), b

    def temperature(self, j, gamma, ref=None):
        return gamma ** (-j) / (2 * np.pi * (self.ref if ref is None else ref))

    def check_resolves(self, sector, gamma):
        """At least three mesh points across the narrowest cutoff transition."""
        j, sp, sm = sector.j, sector.splus, sector.sminus
        for s, other in ((sp, sm), (sm, sp)):
            step = self.side(s, gamma) / self.N
            finest = [0.26 * gamma ** (-s - 1)] if 0 < s < j else [0.26 * gamma ** (-j)]
            # width of the slice transition along this axis
            finest.append(0.023 * gamma ** (-j + other))
            if step > min(finest) / 3:
                raise ResolutionError(f"mesh N={self.N} too coarse for sector {sector}")
        if self.N & (self.N - 1):
            raise ResolutionError("mesh size must be a power of two")

    def support(self, sector, cfg=SliceConfig()):
        """Mesh points inside the sector support.

        Returns
        -------
        mask, e, v, w, (side+, side-)
            Support mask on the ``N x N`` mesh, energies, sector cutoff values
            and quadrature weights (``v`` times the cell of ``dk+ dk- / 4``)
            at the support points.
        """
        g = cfg.gamma
        qp, bp = self.axis(sector.splus, g)
        qm, bm = self.axis(sector.sminus, g)
        QP, QM = np.meshgrid(qp, qm, indexing="ij")
        cp = -np.sin(0.5 * np.pi * QP)
        cm = -np.sin(0.5 * np.pi * QM)
        c0 = -np.cos(0.5 * np.pi * (QP + QM))
        v = (sector_function(sector.splus, sector.j, cp ** 2, g, cfg.order)
             * sector_function(sector.sminus, sector.j, cm ** 2, g, cfg.order))
        mask = v > 0
        e = 8.0 * cp * cm * c0
        w = v * (bp / self.N) * (bm / self.N) / 4
        return mask, e[mask], v[mask], w[mask], (bp, bm)


def _slice_k0(j, T, gamma, positive=False):
    kmax = math.sqrt(slice_thresholds(j, gamma)[-1]) / 2
    nf = int(kmax / (2 * np.pi * T)) + 2
    n = np.arange(0 if positive else -nf, nf)
    return 2 * np.pi * T * (n + 0.5)


@dataclass
class DirectSpaceKernel:
    """Scalar sectorised kernel sampled on the mesh lattice.

    ``values[i, a, b]`` is the kernel at ``x0[i]`` and ``(n+, n-) =
    (a - keep, b - keep) * spacing``; ``l1`` and ``sup`` are taken over the
    full (unwindowed) lattice.
    """

    sector: ScaleSector
    x0: np.ndarray
    spacing: tuple
    values: np.ndarray
    l1: float
    sup: float
    origin: complex
    meta: dict = field(default_factory=dict)


def direct_space_transform(sector, mesh=SectorMesh(), cfg=SliceConfig(), x0_max=40.0, x0_step=0.25,
                           keep=16, chunk=4096):
    """Fourier transform of the scalar sectorised slice propagator.

    ``x0`` runs over ``[-x0_max, x0_max] gamma^j`` with step
    ``x0_step gamma^j``; the spatial lattice spacing is ``2 / side`` in
    units of lattice translations.  The integral over ``x`` in ``l1`` treats
    the lattice sum as a Riemann sum on the mesh lattice.

    Raises
    ------
    ResolutionError
        If the mesh violates :meth:`SectorMesh.check_resolves` or the
        Matsubara period is shorter than the ``x0`` window.
    """
    sector.check()
    g, j = cfg.gamma, sector.j
    mesh.check_resolves(sector, g)
    T = mesh.temperature(j, g)
    if 1.0 / T < 2.2 * x0_max * g ** j:
        raise ResolutionError("Matsubara period shorter than the x0 window")
    mask, e, _, w, (bp, bm) = mesh.support(sector, cfg)
    k0 = _slice_k0(j, T, g)
    x0 = np.arange(-x0_max, x0_max + 1e-9, x0_step) * g ** j
    # G[p, i] = T sum_k0 chi_j Ct exp(i k0 x0_i) at each support point
    ph = np.exp(1j * np.outer(k0, x0))
    G = np.empty((e.size, x0.size), dtype=complex)
    for a in range(0, e.size, chunk):
        ee = e[a:a + chunk, None]
        H = slice_function(j, slice_argument(k0[None, :], ee), g, cfg.order) * reduced_propagator(k0[None, :], ee)
        G[a:a + chunk] = T * (H @ ph)
    dn = (2.0 / bp, 2.0 / bm)
    f = np.zeros((mesh.N, mesh.N), dtype=complex)
    l1, sup = 0.0, 0.0
    vals = np.empty((x0.size, 2 * keep + 1, 2 * keep + 1), dtype=complex)
    idx = np.arange(-keep, keep + 1) % mesh.N
    for i in range(x0.size):
        f[mask] = w * G[:, i]
        C = np.fft.fft2(f)
        a = np.abs(C)
        l1 += a.sum()
        sup = max(sup, a.max())
        vals[i] = C[np.ix_(idx, idx)]
    l1 *= dn[0] * dn[1] * x0_step * g ** j
    origin = complex(np.sum(w * k0_direct(e, j, T, g, cfg.order)))
    meta = dict(gamma=g, T_eff=T, N=mesh.N, pad=mesh.pad, ref=mesh.ref)
    return DirectSpaceKernel(sector, x0, dn, vals, float(l1), float(sup), origin, meta)


def k0_direct(e, j, T, gamma, order=2.0):
    """Explicit ``T sum_{k0} chi_j Ct`` over the Matsubara frequencies at ``T``."""
    k0 = _slice_k0(j, T, gamma)
    return T * np.sum(slice_function(j, slice_argument(k0[None, :], e[:, None]), gamma, order)
                      * reduced_propagator(k0[None, :], e[:, None]), axis=1)


def decay_profile(sector, mesh=SectorMesh(), cfg=SliceConfig(), dmax=500.0, ref=256, per_unit=8, chunk=4000):
    """``|C_{j,sigma}(x0, 0, 0)|`` as a function of ``d = gamma^{-j} |x0|``.

    Uses the mesh at a finer effective temperature so that the Matsubara
    period exceeds ``2 dmax gamma^j``.
    """
    g, j = cfg.gamma, sector.j
    mesh.check_resolves(sector, g)
    T = mesh.temperature(j, g, ref)
    if 1.0 / T < 2 * dmax * g ** j:
        raise ResolutionError("Matsubara period shorter than the decay window")
    _, e, _, w, _ = mesh.support(sector, cfg)
    k0 = _slice_k0(j, T, g, positive=True)
    F = np.zeros(k0.size, dtype=complex)
    for a in range(0, e.size, chunk):
        ee = e[a:a + chunk, None]
        F += T * (w[a:a + chunk] @ (slice_function(j, slice_argument(k0[None, :], ee), g, cfg.order)
                                   * reduced_propagator(k0[None, :], ee)))
    d = np.linspace(0.5, dmax, int(dmax * per_unit))
    ph = np.exp(1j * np.outer(d * g ** j, k0))
    # negative frequencies carry the conjugate summand
    return d, np.abs(ph @ F + np.conj(ph) @ np.conj(F))


def fit_stretched_exponential(d, values, dmin=2.0, nbins=30, floor=1e-12):
    """Fit ``log A - c d^alpha`` to the decreasing envelope of ``values``.

    The envelope is the running maximum from the tail, sampled at
    ``nbins`` log-spaced distances; points below ``floor * max`` are
    dropped as round-off.

    Returns
    -------
    (A, c, alpha)
    """
    from scipy.optimize import curve_fit
    d = np.asarray(d, dtype=float)
    env = np.maximum.accumulate(np.asarray(values)[::-1])[::-1]
    ok = env > floor * env.max()
    dl = np.geomspace(dmin, d[ok].max(), nbins)
    el = np.interp(dl, d, env)
    scale = el[0]
    fn = lambda x, la, c, al: la - c * x ** al
    p, _ = curve_fit(fn, dl, np.log(el / scale), p0=(0.0, 1.0, 0.5),
                     bounds=([-50, 0, 0.05], [50, 50, 2]))
    return float(scale * np.exp(p[0])), float(p[1]), float(p[2])


def momentum_sup(sector, mesh=SectorMesh(), cfg=SliceConfig(), nk0=400):
    """``sup |chi_j v_sigma Ct|`` over the mesh support and a dense ``k0`` scan."""
    _, e, v, _, _ = mesh.support(sector, cfg)
    g, j = cfg.gamma, sector.j
    kmax = math.sqrt(slice_thresholds(j, g)[-1]) / 2
    k0 = np.linspace(0, kmax, nk0)
    best = 0.0
    for a in range(0, e.size, 4000):
        ee = e[a:a + 4000, None]
        f = np.abs(slice_function(j, slice_argument(k0[None, :], ee), g, cfg.order)
                   * reduced_propagator(k0[None, :], ee)) * v[a:a + 4000, None]
        best = max(best, float(f.max()))
    return best


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class NormReport:
    j: int
    splus: int
    sminus: int
    sup_norm: float
    l1_norm: float
    decay_c: float
    alpha_fit: float
    decay_prefactor: float


def norm_report(sector, mesh=SectorMesh(), cfg=SliceConfig(), kernel=None, dmax=500.0):
    """Momentum sup norm, direct-space L1 norm and stretched-exponential fit.

    ``decay_prefactor`` is the fitted amplitude ``A`` in units of
    ``gamma^{-j-l}``.
    """
    if kernel is None:
        kernel = direct_space_transform(sector, mesh, cfg)
    d, prof = decay_profile(sector, mesh, cfg, dmax=dmax)
    A, c, alpha = fit_stretched_exponential(d, prof)
    l = sector.depth
    return NormReport(sector.j, sector.splus, sector.sminus, momentum_sup(sector, mesh, cfg),
                      kernel.l1, c, alpha, A * cfg.gamma ** (sector.j + l))


NORM_FIELDS = ("j", "splus", "sminus", "sup_norm", "l1_norm", "decay_c", "alpha_fit")


def config_hash(obj):
    """Short stable hash of a JSON-serialisable configuration."""
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def write_norm_csv(reports, path, header=None):
    with open(path, "w") as fh:
        for line in (header or []):
            fh.write(f"# {line}\n")
        fh.write(",".join(NORM_FIELDS) + "\n")
        for r in reports:
            fh.write(",".join(repr(getattr(r, k)) for k in NORM_FIELDS) + "\n")


def kernel_cache_path(directory, sector, mesh, cfg, **kw):
    """Cache file name keyed by ``(gamma, T, sector, mesh)`` with a content hash."""
    import os
    key = dict(gamma=cfg.gamma, T=cfg.T, order=cfg.order, sector=(sector.j, sector.splus, sector.sminus),
               N=mesh.N, pad=mesh.pad, ref=mesh.ref, **kw)
    return os.path.join(directory, f"kernel_{sector.j}_{sector.splus}_{sector.sminus}_{config_hash(key)}.npz")


def cached_transform(directory, sector, mesh=SectorMesh(), cfg=SliceConfig(), **kw):
    """:func:`direct_space_transform` with an ``.npz`` cache in ``directory``."""
    import os
    path = kernel_cache_path(directory, sector, mesh, cfg, **kw)
    if os.path.exists(path):
        z = np.load(path)
        return DirectSpaceKernel(sector, z["x0"], tuple(z["spacing"]), z["values"], float(z["l1"]),
                                 float(z["sup"]), complex(z["origin"]), json.loads(str(z["meta"])))
    k = direct_space_transform(sector, mesh, cfg, **kw)
    os.makedirs(directory, exist_ok=True)
    np.savez(path, x0=k.x0, spacing=np.array(k.spacing), values=k.values, l1=k.l1, sup=k.sup,
             origin=k.origin, meta=json.dumps(k.meta))
    return k
