import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from honeyrg.lattice import (FERMI_POINTS, LATTICE, MomentumPoint, band_energy, band_energy_pm, curvature_asymptotic,
                             curve_geometry, dispersion_omega, fermi_surface_lines, fermi_triangles, from_pm,
                             line_distance, pm_coords, q_reduce, trace_level_set, width_asymptotic)

finite = st.floats(-20, 20, allow_nan=False)


def test_reciprocity_and_unit_shifts():
    assert np.allclose(LATTICE.reciprocity(), 2 * np.pi * np.eye(2), atol=1e-12)
    for d in (LATTICE.d1, LATTICE.d2, LATTICE.d3):
        assert abs(np.linalg.norm(d) - 1) < 1e-12


def test_omega_values():
    assert dispersion_omega(0.0, 0.0) == pytest.approx(3.0)
    for kf in FERMI_POINTS:
        assert abs(dispersion_omega(*kf)) < 1e-12


def test_band_energy_examples():
    assert band_energy(0.0, 0.0, 1.0) == pytest.approx(8.0)
    k1 = np.linspace(-3, 3, 11)
    assert np.max(np.abs(band_energy(k1, np.pi / np.sqrt(3), 1.0))) < 1e-12


def test_dispersion_identity_dense():
    rng = np.random.default_rng(1)
    k1, k2 = rng.uniform(-2 * np.pi, 2 * np.pi, (2, 10 ** 4))
    for mu in (1.0, 0.5):
        assert np.max(np.abs(np.abs(dispersion_omega(k1, k2)) ** 2 - mu ** 2 - band_energy(k1, k2, mu))) < 1e-12
    kp, km = pm_coords(k1, k2)
    assert np.max(np.abs(band_energy_pm(kp, km) - band_energy(k1, k2, 1.0))) < 1e-12


def test_pm_examples():
    assert np.allclose(from_pm(1.0, 0.0), (np.pi / 3, np.pi / np.sqrt(3)))
    assert np.allclose(from_pm(0.0, 0.0), (0.0, 0.0))


@given(finite, finite)
def test_pm_round_trip(k1, k2):
    a, b = from_pm(*pm_coords(k1, k2))
    assert abs(a - k1) < 1e-12 and abs(b - k2) < 1e-12


@given(st.floats(-50, 50, allow_nan=False))
def test_q_reduce_range(k):
    q = q_reduce(k)
    # 1 is reached only by rounding at the period edge
    assert -1 <= q <= 1
    # k - q is an odd integer
    assert abs((k - q - 1) / 2 - round((k - q - 1) / 2)) < 1e-9


def test_matsubara_point():
    p = MomentumPoint.matsubara(3, 0.1, 0.2, 0.3)
    assert p.k0 == pytest.approx(2 * np.pi * 0.1 * 3.5)
    kp1 = MomentumPoint.from_pm(0.0, 1.5, 0.2)
    assert kp1.qplus == pytest.approx(0.5) and kp1.qminus == pytest.approx(-0.8)


def test_fermi_lines_on_surface():
    lines = fermi_surface_lines(1.0)
    t = np.linspace(0, 1, 200)
    for ln in lines:
        assert np.max(np.abs(band_energy(*ln.sample(t), 1.0))) < 1e-10
    assert any(ln.family == "k2" and ln.n == 0 and abs(ln.p0[1] - np.pi / np.sqrt(3)) < 1e-12 for ln in lines)
    with pytest.raises(ValueError):
        fermi_surface_lines(0.9)


def test_triangles_surround_fermi_points():
    # equal modulo the period 2Z x 2Z in skewed coordinates
    for tri, kf in zip(fermi_triangles(), FERMI_POINTS):
        d = np.subtract(pm_coords(*tri.mean(axis=0)), pm_coords(*kf))
        assert np.allclose(d / 2, np.round(d / 2), atol=1e-12)


def test_level_set_mu1_on_lines():
    pts = trace_level_set(1.0, 0.0, 64)
    k = np.array([(p.k1, p.k2) for p in pts])
    assert len(pts) == 64
    assert np.max(np.abs(band_energy(k[:, 0], k[:, 1], 1.0))) < 1e-8
    assert np.max(line_distance(k[:, 0], k[:, 1])) < 1e-6


def test_level_set_shifted_closed():
    level = 14.0 ** -8
    pts = trace_level_set(1.0, level, 128)
    k = np.array([(p.k1, p.k2) for p in pts])
    assert len(pts) == 128
    assert np.max(np.abs(band_energy(k[:, 0], k[:, 1], 1.0) - level)) < 1e-8
    assert np.max(line_distance(k[:, 0], k[:, 1])) < 0.05


def test_level_set_mu_half_convex():
    for kf in FERMI_POINTS:
        pts = trace_level_set(0.5, 0.0, 64, center=kf)
        k = np.array([(p.k1, p.k2) for p in pts]) - kf
        assert len(pts) == 64
        # ordered by angle and convex: every cross product of consecutive edges has one sign
        e = np.roll(k, -1, axis=0) - k
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        assert np.all(cross > 0)


def test_level_set_empty_and_guard():
    assert trace_level_set(1.0, 100.0, 16) == []
    with pytest.raises(ValueError):
        trace_level_set(1.0, 0.0, 8)


@pytest.mark.parametrize("h", [3, 4, 5])
def test_curve_geometry_windows(h):
    g = 14.0
    ls = []
    for k1 in np.geomspace(g ** (-h / 2), 0.3, 8):
        c = curve_geometry(k1, h, g)
        assert c.R > 0 and c.w > 0
        assert abs(c.l ** 2 - c.w * c.R) <= 1e-10 * c.w * c.R
        assert 1 / 8 <= c.R / curvature_asymptotic(k1, h, g) <= 8
        assert 1 / 8 <= c.w / width_asymptotic(k1, h, g) <= 8
        ls.append(c.l)
    assert 1 / 8 <= ls[0] / g ** (-h / 2) <= 8
    assert 0.1 <= ls[-1] <= 1
