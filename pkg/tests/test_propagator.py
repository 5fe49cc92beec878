import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from honeyrg.cutoffs import ScaleSector, SliceConfig, admissible_sectors, slice_function
from honeyrg.lattice import MomentumPoint, band_energy, dispersion_omega
from honeyrg.propagator import (MomentumGrid, NormReport, ResolutionError, SectorMesh, SingularPropagator, a_matrix,
                                cached_transform, config_hash, defining_matrix, direct_space_transform,
                                fit_stretched_exponential, free_propagator, grid_transform, grid_values, k0_slice_sum,
                                momentum_sup, reduced_propagator, slice_argument, sliced_propagator,
                                sliced_sector_propagator, write_norm_csv)

G = 14.0


def test_free_propagator_entry():
    T = 0.1
    k0 = np.pi * T
    C = free_propagator(MomentumPoint(k0, 0.0, 0.0))
    assert C[0, 0] == pytest.approx((1j * k0 + 1) / (k0 ** 2 + 8 - 2j * k0), abs=1e-14)


def test_free_propagator_inverse_and_factorisation():
    rng = np.random.default_rng(3)
    for _ in range(10 ** 4 // 10):
        n = int(rng.integers(-50, 50))
        k = MomentumPoint.matsubara(n, 0.05, *rng.uniform(-np.pi, np.pi, 2))
        om = complex(dispersion_omega(k.k1, k.k2))
        C = free_propagator(k)
        assert np.allclose(C @ defining_matrix(k.k0, om), np.eye(2), atol=1e-10)
        e = float(band_energy(k.k1, k.k2))
        assert np.allclose(C, reduced_propagator(k.k0, e) * a_matrix(k.k0, om), atol=1e-12)


def test_singular_propagator():
    kf = (2 * np.pi / 3, 2 * np.pi / (3 * np.sqrt(3)))
    with pytest.raises(SingularPropagator):
        free_propagator(MomentumPoint(0.0, *kf), mu=0.0)


def test_a_matrix_bounds_on_slices():
    rng = np.random.default_rng(4)
    k1, k2 = rng.uniform(-np.pi, np.pi, (2, 200000))
    e = band_energy(k1, k2)
    om = dispersion_omega(k1, k2)
    for j in range(2, 9):
        k0 = rng.uniform(0, G ** (-j + 1), e.size)
        on = slice_function(j, slice_argument(k0, e), G) > 0
        if not on.any():
            continue
        for a in (np.abs(1j * k0[on] + 1), np.abs(om[on])):
            assert np.all((a > 0.5) & (a < 10))


def test_slice_resummation():
    rng = np.random.default_rng(5)
    cfg = SliceConfig()
    J = 12
    for _ in range(200):
        k = MomentumPoint(rng.uniform(1e-3, 1), *rng.uniform(-np.pi, np.pi, 2))
        assert slice_argument(k.k0, band_energy(k.k1, k.k2)) > G ** (-2 * J)
        s = sum(sliced_propagator(k, j, cfg) for j in range(J + 1))
        assert np.allclose(s, free_propagator(k), atol=1e-10)


def test_sector_resummation():
    rng = np.random.default_rng(6)
    cfg = SliceConfig()
    for j in (2, 4, 6):
        for _ in range(50):
            kp = 1 + rng.choice([-1, 1]) * 10 ** rng.uniform(-j - 1, 0)
            km = rng.uniform(-1, 1)
            k = MomentumPoint.from_pm(G ** (-j) * rng.uniform(0.2, 1), kp, km)
            # sectors outside the admissible set do not contribute on the support
            s = sum(sliced_sector_propagator(k, ScaleSector(j, a, b), cfg) for a in range(j + 1) for b in range(j + 1))
            assert np.allclose(s, sliced_propagator(k, j, cfg), atol=1e-10 * max(1, np.abs(s).max()))


def test_scalar_slice_sup_window():
    # sup |chi_j Ct| gamma^{-j} over a dense (k0, e) scan
    for j in range(3, 13):
        k0 = np.linspace(0, G ** (-j + 1), 801)[1:, None]
        e = np.linspace(-1.5, 1.5, 801)[None, :] * G ** (-j + 1)
        v = np.abs(slice_function(j, slice_argument(k0, e), G) * reduced_propagator(k0, e))
        assert 0.3 <= v.max() * G ** (-j) <= 30


def test_sector_momentum_sup():
    v = momentum_sup(ScaleSector(4, 2, 2), SectorMesh(N=1024), SliceConfig())
    assert 0.3 <= v * G ** -4 <= 30


def test_grid_points_and_guards():
    g = MomentumGrid(T=0.1, L=8, N0=4)
    assert np.allclose(g.k0(), 2 * np.pi * 0.1 * (np.arange(-4, 4) + 0.5))
    kp, km = g.kpm()
    assert kp[3, 0] == pytest.approx(0.75) and km[0, 3] == pytest.approx(-0.75)
    with pytest.raises(ResolutionError):
        MomentumGrid(T=0.1, L=8, N0=4).check_resolves(ScaleSector(1, 1, 1), G)
    with pytest.raises(ValueError):
        MomentumGrid(T=-1, L=8, N0=4)


def test_grid_transform_origin():
    grid = MomentumGrid(T=0.01, L=64, N0=16)
    sec = ScaleSector(1, 0, 1)
    out = grid_transform(sec, grid, [0.0, 1.0])
    direct = grid_values(sec, grid).sum() / (grid.beta * grid.L ** 2)
    assert abs(out[0, 0, 0] - direct) < 1e-12 * max(1, abs(direct))
    # bit-reproducible for a fixed grid; batching only reorders round-off
    assert np.array_equal(grid_transform(sec, grid, [0.0, 1.0]), out)
    assert np.allclose(grid_transform(sec, grid, [1.0])[0], out[1], rtol=0, atol=1e-15)


def test_k0_sum_matches_integral():
    # the Matsubara sum and the k0 integral agree on a smooth slice
    cfg_fine = SliceConfig(T=1e-5)
    e = np.linspace(-0.05, 0.05, 7)
    a = k0_slice_sum(e, 2, cfg_fine)
    b = k0_slice_sum(e, 2, cfg_fine, max_freq=0)
    assert np.allclose(a, b, rtol=1e-6, atol=1e-9)


def test_direct_space_kernel_origin_and_cache(tmp_path):
    sec = ScaleSector(2, 1, 1)
    mesh = SectorMesh(N=1024)
    k = cached_transform(str(tmp_path), sec, mesh, SliceConfig(), x0_max=4.0, x0_step=0.5, keep=4)
    i0 = int(np.argmin(np.abs(k.x0)))
    assert abs(k.values[i0, 4, 4] - k.origin) <= 1e-12 * abs(k.origin)
    assert k.l1 > 0 and k.sup <= k.l1
    again = cached_transform(str(tmp_path), sec, mesh, SliceConfig(), x0_max=4.0, x0_step=0.5, keep=4)
    assert np.array_equal(again.values, k.values) and again.l1 == k.l1


def test_direct_space_resolution_guard():
    with pytest.raises(ResolutionError):
        direct_space_transform(ScaleSector(8, 8, 0), SectorMesh(N=1024), SliceConfig())
    with pytest.raises(ResolutionError):
        SectorMesh(N=1000).check_resolves(ScaleSector(1, 0, 0), G)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 5), st.floats(0.1, 2), st.floats(0.3, 0.8))
def test_stretched_fit_recovers(A, c, alpha):
    d = np.linspace(0.5, 200, 4000)
    v = A * np.exp(-c * d ** alpha)
    A2, c2, a2 = fit_stretched_exponential(d, v, floor=1e-300)
    assert abs(a2 - alpha) < 1e-3 and abs(c2 - c) < 1e-2 * c


def test_norm_csv_deterministic(tmp_path):
    r = NormReport(4, 2, 2, 1.0, 2.0, 0.5, 0.4, 3.0)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_norm_csv([r], p1, ["h"])
    write_norm_csv([r], p2, ["h"])
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().splitlines()[:2] == ["# h", "j,splus,sminus,sup_norm,l1_norm,decay_c,alpha_fit"]
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
