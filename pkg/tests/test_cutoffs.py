import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import curve_fit

from honeyrg.cutoffs import (ScaleSector, SliceConfig, admissible_sectors, base_cutoff, conservation_predicate,
                             direction_constraint, q_windows_hold, sector_function, slice_function, sum_cos_lower_bound,
                             support_mask, support_predicate)
from honeyrg.lattice import MomentumPoint

G = 14.0


def test_base_cutoff_branches():
    assert base_cutoff(0.5) == 1.0
    assert base_cutoff(2.5) == 0.0
    assert 0 < base_cutoff(1.5) < 1
    t = np.linspace(-3, 3, 601)
    assert np.array_equal(base_cutoff(t), base_cutoff(-t))
    assert np.all(base_cutoff(t[np.abs(t) <= 1]) == 1) and np.all(base_cutoff(t[np.abs(t) >= 2]) == 0)


def test_base_cutoff_smooth():
    h = 1e-2
    t = np.arange(-3, 3, h)
    f = base_cutoff(t)
    for k in range(1, 5):
        d = np.diff(f, k) / h ** k
        assert np.all(np.isfinite(d)) and np.max(np.abs(d)) < 10 ** (2 * k)


def test_base_cutoff_fourier_decay():
    # exp(-c n^{1/s}) Fourier decay of the Gevrey-2 cutoff on a periodised window
    N = 2 ** 18
    t = np.linspace(-3, 3, N, endpoint=False)
    c = np.abs(np.fft.rfft(base_cutoff(t))) / N
    ns = np.unique(np.geomspace(10, 400, 40).astype(int))
    env = np.array([c[m:int(m * 1.1) + 2].max() for m in ns])
    p, _ = curve_fit(lambda x, a, b, al: a - b * x ** al, ns, np.log(env), p0=(0, 1, 0.5))
    assert abs(p[2] - 0.5) <= 0.2 * 0.5


def test_slice_config_bounds():
    cfg = SliceConfig(gamma=14, T=0.01)
    assert cfg.jmax == int(np.floor(1 + np.log(1 / (np.sqrt(2) * np.pi * 0.01)) / np.log(14)))
    assert cfg.rmax == int(np.floor(1 + 1.5 * cfg.jmax))
    assert (SliceConfig(gamma=4, T=0.01).jmax, SliceConfig(gamma=4, T=0.01).rmax) == (3, 5)
    assert cfg.beta == pytest.approx(100)
    with pytest.raises(ValueError):
        SliceConfig(T=0)


def test_slice_partition_telescopes():
    J = 8
    assert sum(slice_function(j, 0.37) for j in range(J + 1)) == pytest.approx(1.0, abs=1e-12)
    t = np.geomspace(1e-12, 5, 2000)
    s = sum(slice_function(j, t) for j in range(20))
    assert np.max(np.abs(s - 1)) < 1e-12
    assert np.all(slice_function(0, np.linspace(0, 1, 50)) == 0)


def test_slice_support():
    j = 3
    t = np.geomspace(1e-10, 10, 5000)
    v = slice_function(j, t, G)
    outside = (t >= 2 * G ** (-2 * j + 2)) | (t <= G ** (-2 * j))
    assert np.all(v[outside] == 0)
    inner = (t >= 1.05 * G ** (-2 * j)) & (t <= 1.95 * G ** (-2 * j + 2))
    assert np.all(v[inner] > 0)


def test_sector_partition():
    j = 5
    assert sum(sector_function(s, j, 0.2) for s in range(j + 1)) == pytest.approx(1.0, abs=1e-12)
    t = np.linspace(0, 1, 3001)
    assert np.max(np.abs(sum(sector_function(s, j, t) for s in range(j + 1)) - 1)) < 1e-12
    assert np.all(sector_function(j, j, t[t <= G ** (-2 * j)]) == 1)
    assert np.all(sector_function(0, j, t[t <= G ** -2]) == 0)
    with pytest.raises(ValueError):
        sector_function(6, 5, 0.1)


@given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))
def test_scale_sector_indices(j, a, b):
    s = ScaleSector(j, a, b)
    assert s.two_r == j + a + b + 2
    assert s.admissible == (a <= j and b <= j and a + b >= j - 2)
    if s.admissible:
        assert s.depth >= 0


def test_admissible_sectors_enumeration():
    for j in range(8):
        got = {(s.splus, s.sminus) for s in admissible_sectors(j)}
        want = {(a, b) for a in range(j + 1) for b in range(j + 1) if a + b >= j - 2}
        assert got == want


def _near_fermi(rng, j, N):
    u = lambda: 10 ** rng.uniform(-j - 1, 0, N) * rng.choice([-1, 1], N)
    kp = np.where(rng.random(N) < 0.6, 1 + u(), rng.uniform(-1, 1, N))
    km = np.where(rng.random(N) < 0.6, 1 + u(), rng.uniform(-1, 1, N))
    return 10 ** rng.uniform(-j - 1, -j + 1, N), kp, km


def test_support_law_rejection_sampling():
    rng = np.random.default_rng(0)
    for j in (3, 5, 7):
        k0, kp, km = _near_fermi(rng, j, 30000)
        for a in range(j + 1):
            for b in range(j + 1):
                sec = ScaleSector(j, a, b)
                m = support_mask(k0, kp, km, sec, G)
                if a + b < j - 2:
                    assert not m.any()
                assert not (m & ~q_windows_hold(kp, km, sec, G)).any()


def test_support_law_control_without_third_window():
    rng = np.random.default_rng(1)
    j, N = 5, 50000
    kp = rng.uniform(-1, 1, N)
    km = 1 - kp + 10 ** rng.uniform(-j - 1, 0, N) * rng.choice([-1, 1], N)
    k0 = 10 ** rng.uniform(-j - 1, -j + 1, N)
    bad = sum(support_mask(k0, kp, km, ScaleSector(j, a, b), G, third=False).sum()
              for a in range(j + 1) for b in range(j + 1) if a + b < j - 2)
    assert bad > 0


def test_sum_cos_bound_on_support():
    rng = np.random.default_rng(2)
    j = 6
    k0, kp, km = _near_fermi(rng, j, 50000)
    c0 = np.abs(np.cos(0.5 * np.pi * (kp + km)))
    for a in range(2, j + 1):
        for b in range(j + 1):
            m = support_mask(k0, kp, km, ScaleSector(j, a, b), G)
            assert np.all(c0[m] >= sum_cos_lower_bound(G))


@pytest.mark.parametrize("T", [0.05, 0.01, 1e-4])
def test_support_predicate_temperature(T):
    # the lowest Matsubara frequency lies above every slice beyond jmax
    cfg = SliceConfig(gamma=G, T=T)
    k = MomentumPoint.from_pm(np.pi * T, 1.0, 1.0)
    assert not any(support_predicate(k, s, G) for j in range(cfg.jmax + 1, cfg.jmax + 4) for s in admissible_sectors(j))


def test_conservation_examples():
    sec = lambda sp, j: ScaleSector(j, sp, j)
    assert direction_constraint((3, 3, 7, 9), (9, 9, 9, 9))
    assert direction_constraint((2, 6, 7, 9), (2, 6, 7, 9))
    assert not direction_constraint((2, 6, 7, 9), (9, 9, 9, 9))
    assert conservation_predicate([sec(3, 9), sec(3, 9), sec(7, 9), sec(9, 9)])
    # Umklapp needs two zero indices
    four = [ScaleSector(4, 0, 2)] * 2 + [ScaleSector(4, 1, 2)] * 2
    assert conservation_predicate(four, parity_m=(1, 0))
    assert not conservation_predicate(four, parity_m=(0, 1))


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)), min_size=4, max_size=4))
def test_conservation_permutation_invariant(raw):
    secs = [ScaleSector(max(j, a, b), a, b) for j, a, b in raw]
    ref = conservation_predicate(secs)
    assert all(conservation_predicate(list(p)) == ref for p in itertools.permutations(secs))
