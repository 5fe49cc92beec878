"""Acceptance criteria 1-12 at their stated tolerances and desk-scale runtimes.

Each test prints a one-line verdict; the terminal summary repeats them as
``PASS``/``FAIL`` lines.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from honeyrg import forests as F
from honeyrg.cutoffs import (ScaleSector, SliceConfig, q_windows_hold, sector_function, slice_function, support_mask)
from honeyrg.lattice import (FERMI_POINTS, MomentumPoint, band_energy, band_energy_pm, dispersion_omega,
                             fermi_surface_lines, pm_coords)
from honeyrg.perturbation import counterterm_flow, tadpole_curvature, tadpole_scan, tadpole_total
from honeyrg.propagator import SectorMesh, free_propagator, norm_report, sliced_propagator, sliced_sector_propagator
from honeyrg.sectors import bare_vertex_sector_sum, chain_sector_sum

G = 14.0
RS = (10, 20, 40)


@contextmanager
def budget(seconds):
    t = time.perf_counter()
    yield
    dt = time.perf_counter() - t
    print(f"  runtime {dt:.1f}s (budget {seconds}s)")
    assert dt < seconds


def verdict(cid, ok, detail):
    print(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_c01_dispersion_identity():
    with budget(1):
        rng = np.random.default_rng(101)
        k1, k2 = rng.uniform(-2 * np.pi, 2 * np.pi, (2, 10 ** 4))
        lhs = np.abs(dispersion_omega(k1, k2)) ** 2 - 1.0
        err = max(np.max(np.abs(lhs - band_energy(k1, k2, 1.0))),
                  np.max(np.abs(lhs - band_energy_pm(*pm_coords(k1, k2)))))
        zero = max(abs(dispersion_omega(*kf)) for kf in FERMI_POINTS)
    verdict(1, err < 1e-12 and zero < 1e-12, f"max identity error {err:.2e}, |Omega(kF)| {zero:.2e}")


def test_c02_fermi_triangles():
    with budget(1):
        rng = np.random.default_rng(102)
        lines = fermi_surface_lines(1.0)
        pts = [lines[i].sample(rng.random(1)) for i in rng.integers(len(lines), size=1000)]
        e = np.array([band_energy(*p, 1.0) for p in pts]).ravel()
    verdict(2, e.size == 1000 and np.max(np.abs(e)) < 1e-10, f"max |e| on 1000 line points {np.max(np.abs(e)):.2e}")


def test_c03_partitions_of_unity():
    with budget(10):
        # 25 slices cover t > 2 gamma^{-48}; sectors partition [0, 1]
        t = np.concatenate([np.geomspace(1e-20, 5, 4000), np.linspace(1e-9, 5, 4000)])
        err_slice = np.max(np.abs(sum(slice_function(j, t, G) for j in range(25)) - 1))
        err_sec = max(np.max(np.abs(sum(sector_function(s, j, np.append(t[t <= 1], 0.0), G) for s in range(j + 1)) - 1))
                      for j in range(1, 10))
        rng = np.random.default_rng(103)
        cfg = SliceConfig()
        err_res = 0.0
        for _ in range(100):
            k = MomentumPoint(rng.uniform(1e-3, 1), *rng.uniform(-np.pi, np.pi, 2))
            s = sum(sliced_propagator(k, j, cfg) for j in range(13))
            err_res = max(err_res, np.max(np.abs(s - free_propagator(k))))
        j = 4
        for _ in range(100):
            k = MomentumPoint.from_pm(G ** (-j) * rng.uniform(0.2, 1), 1 + rng.choice([-1, 1]) * 10 ** rng.uniform(-5, 0),
                                      rng.uniform(-1, 1))
            s = sum(sliced_sector_propagator(k, ScaleSector(j, a, b), cfg) for a in range(j + 1) for b in range(j + 1))
            ref = sliced_propagator(k, j, cfg)
            err_res = max(err_res, np.max(np.abs(s - ref)) / max(1, np.abs(ref).max()))
    verdict(3, err_slice < 1e-12 and err_sec < 1e-12 and err_res < 1e-10,
            f"slice sum {err_slice:.1e}, sector sum {err_sec:.1e}, resummation {err_res:.1e}")


def test_c04_support_law():
    with budget(30):
        rng = np.random.default_rng(104)
        accepted = violations = 0
        for j in range(3, 9):
            N = 200000
            u = lambda: 10 ** rng.uniform(-j - 1, 0, N) * rng.choice([-1, 1], N)
            kp = np.where(rng.random(N) < 0.6, 1 + u(), rng.uniform(-1, 1, N))
            km = np.where(rng.random(N) < 0.6, 1 + u(), rng.uniform(-1, 1, N))
            k0 = 10 ** rng.uniform(-j - 1, -j + 1, N)
            for a in range(j + 1):
                for b in range(j + 1):
                    sec = ScaleSector(j, a, b)
                    m = support_mask(k0, kp, km, sec, G)
                    accepted += int(m.sum())
                    violations += int(m.sum()) if a + b < j - 2 else 0
                    violations += int((m & ~q_windows_hold(kp, km, sec, G)).sum())
    verdict(4, accepted >= 10 ** 5 and violations == 0, f"{accepted} accepted samples, {violations} violations")


def test_c05_decay_bound():
    with budget(300):
        mesh, cfg = SectorMesh(N=1024), SliceConfig()
        bad = []
        for j in range(4, 9):
            rep = norm_report(ScaleSector(j, (j + 1) // 2, (j + 1) // 2), mesh, cfg)
            s, l1 = rep.sup_norm / G ** j, rep.l1_norm / G ** j
            print(f"  j={j}: sup/g^j={s:.3f} l1/g^j={l1:.3f} c={rep.decay_c:.3f} alpha={rep.alpha_fit:.3f}")
            if not (0.3 <= s <= 30 and 0.1 <= l1 <= 100 and rep.decay_c > 0.05 and 0.35 <= rep.alpha_fit <= 0.65):
                bad.append(j)
    verdict(5, not bad, f"failing slices {bad}")


def test_c06_bkar_identity():
    with budget(60):
        rng = np.random.default_rng(106)
        err = 0.0
        for i in range(20):
            n = 2 + i % 3
            f = F.random_polynomial(len(F.pairs(n)), 5, rng)
            rhs, lhs = F.bkar_evaluate(f, n)
            err = max(err, abs(rhs - lhs) / max(1, abs(lhs)))
        forests = F.enumerate_forests(4)
        emin = np.inf
        for _ in range(1000):
            fo = forests[int(rng.integers(len(forests)))]
            emin = min(emin, np.linalg.eigvalsh(F.weakening_matrix(fo, rng.uniform(size=len(fo.edges)))).min())
    verdict(6, err <= 1e-10 and emin >= -1e-10, f"max BKAR error {err:.1e}, min eigenvalue {emin:.2e}")


def test_c07_gn_tree_identities():
    with budget(30):
        rng = np.random.default_rng(107)
        bad = 0
        for i in range(500):
            n = int(rng.integers(1, 6))
            t = F.random_gn_tree(n, int(rng.integers(1, 7)), rng, n_counter=int(rng.integers(0, n)))
            a, b, c, d = F.power_counting_identity_check(t)
            bad += (a != b) or (c != d)
        for i in range(500):
            t = F.random_gn_tree(int(rng.integers(2, 6)), int(rng.integers(2, 7)), rng, quadruped=True)
            lhs, rhs = F.quadruped_recursion_check(t)
            bad += lhs != rhs
    verdict(7, bad == 0, f"{bad} mismatches over 500 GN trees and 500 quadruped trees")


def test_c08_multi_arch():
    with budget(120):
        rng = np.random.default_rng(108)
        err = 0.0
        shapes = [(6,), (3, 3), (2, 4), (4, 2), (1, 5), (2, 2, 2), (1, 2, 3), (3, 2, 1), (1, 1, 4), (2, 3, 1)]
        for sizes in shapes * 2:
            M, packet = F.gram_packet_matrix(sizes, rng)
            lhs, rhs, e = F.arch_determinant_oracle(M, packet)
            err = max(err, e / max(1, abs(lhs)))
        werr = max(abs(F.interpolation_weight(a) - F.numeric_interpolation_weight(a))
                   for p in range(2, 5) for a in F.enumerate_arch_systems(p))
        M, packet = F.gram_packet_matrix((2, 2, 2), rng)
        control = F.arch_determinant_oracle(M, packet, monotone=False)[2]
    verdict(8, err <= 1e-9 and werr <= 1e-12 and control > 1e-6,
            f"determinant error {err:.1e}, weight error {werr:.1e}, negative control {control:.1e}")


def test_c09_sector_counting():
    with budget(300):
        bare = np.array([bare_vertex_sector_sum(r, gamma=G) for r in RS]) / np.array(RS)
        biped = np.array([chain_sector_sum("biped", 3, r, G) for r in RS]) / np.array(RS, float) ** 2
        off = np.array([bare_vertex_sector_sum(r, gamma=G, constraint=False) for r in RS]) / np.array(RS)
        q = lambda v: v.max() / v.min()
    verdict(9, q(bare) <= 4 and q(biped) <= 4 and np.all(np.diff(off) > 0) and off[-1] / off[0] > 4,
            f"bare/r max/min {q(bare):.2f}, biped/r^2 max/min {q(biped):.2f}, off-control growth {off[-1] / off[0]:.1f}")


def test_c10_tadpole():
    with budget(300):
        res = tadpole_scan(1e-2, range(5, 16))
        q = res.ratio_to_claim()
        # across couplings and across the ultraviolet truncation of the slice sum
        tot = [tadpole_total(lam).total / lam for lam in (1e-3, 1e-2)]
        tot += [tadpole_total(1e-2, jtop=jt).total / 1e-2 for jt in (10, 15)]
        curv = np.array([tadpole_curvature(j, 1e-2) for j in range(5, 16)])
        cr = curv[1:] / curv[:-1]
    ok = q.max() / q.min() <= 10 and max(tot) / min(tot) <= 3 and np.all((G / 2 <= cr) & (cr <= 2 * G))
    verdict(10, ok, f"window max/min {q.max() / q.min():.3f}, total/|lam| {tot[0]:.4f}, "
                    f"curvature ratios [{cr.min():.2f}, {cr.max():.2f}]")


def test_c11_counterterm_flow():
    with budget(300):
        lam = 1e-2
        flows = [counterterm_flow(lam, SliceConfig(gamma=G, T=T)) for T in (0.05, 0.02, 0.01)]
        K = [f.K for f in flows]
        Kfit = max(K)
        tele = max(f.telescoping_error() for f in flows)
        ends = max(abs(f.endpoint) for f in flows)
        dom = max(np.max(np.abs(f.delta_mu)) / lam for f in flows)
    ok = tele <= 1e-12 and ends <= 1e-12 and dom <= Kfit and Kfit / min(K) <= 3
    verdict(11, ok, f"K per T {[round(k, 4) for k in K]}, telescoping {tele:.1e}, endpoint {ends:.1e}")


def test_c12_non_fermi_liquid_witness(deep_scan):
    s = deep_scan
    q = s.ratios("d2")
    d1 = np.abs(s.d1) / np.abs(s.d2)
    ok = np.all((s.gamma / 4 <= q) & (q <= 4 * s.gamma)) and np.all(d1 <= 1e-8) and s.meta["elapsed"] < 600
    print(f"  runtime {s.meta['elapsed']:.1f}s (budget 600s)")
    verdict(12, ok, f"d2 ratios {np.round(q, 3).tolist()} vs [gamma/4, 4 gamma] = [1, 16], max |d1|/|d2| {d1.max():.1e}")
