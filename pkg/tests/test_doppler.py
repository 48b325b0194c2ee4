import dataclasses
import time

import numpy as np
import pytest

from atomcoherence.doppler import (DopplerConfig, chi3_averaged, chi3_velocity,
                                   closed_form_average, numeric_average, raman_limit,
                                   tilde_widths, velocity_poles)
from atomcoherence.errors import DegenerateGeometry, QuadratureNotConverged, ValidationError
from atomcoherence.scheme import LevelScheme
from atomcoherence.spectra import find_peaks_quadratic


@pytest.fixture
def radiative():
    # Spontaneous widths satisfy Γ_ml = Γ_ln + Γ_gm - Γ_ng.
    return LevelScheme.spontaneous(decay_l=1, decay_g=1, decay_n=1, decay_m=1)


def _cfg(ku, **kw):
    return DopplerConfig(u=ku, k1=1.0, k2=0.9, k3=1.1, **kw)


def _closed_form_error(scheme, ku):
    o1 = np.linspace(-10, 10, 81)
    r = chi3_averaged(scheme, (o1, 0.0, 0.0), _cfg(ku))
    return np.max(np.abs(r.numeric - r.closed_form)) / np.max(np.abs(r.numeric))


def test_config_validation():
    with pytest.raises(ValidationError):
        DopplerConfig(u=1.0, k1=0.0, k2=1.0, k3=1.0)
    with pytest.raises(ValidationError):
        DopplerConfig(u=1.0, k1=1.0, k2=1.0, k3=1.0, span=4.0)
    with pytest.raises(ValidationError):
        DopplerConfig(u=1.0, k1=1.0, k2=1.0, k3=1.0, scheme="triangle")


def test_stationary_resonant_scaling(radiative):
    cfg = _cfg(1.0)
    base = chi3_velocity(radiative, (0.0, 0.0, 0.0), 0.0, cfg)
    wide = LevelScheme.spontaneous(decay_l=3, decay_g=3, decay_n=3, decay_m=3)
    assert chi3_velocity(wide, (0.0, 0.0, 0.0), 0.0, cfg) == pytest.approx(base / 27, rel=1e-13)


def test_only_ground_difference_keeps_two_terms(radiative):
    s = LevelScheme(decay_l=1, decay_g=1, decay_n=1, decay_m=1, width_lg=0.7, width_ng=1.1,
                    width_nm=1.3, width_lm=0.9, width_ln=0.4, width_gm=0.6)
    cfg = DopplerConfig(u=1.0, k1=1.0, k2=0.8, k3=1.2, n_g=1.0, n_n=0.0, n_l=1.0, n_m=0.0)
    o1, o2, o3, v = 0.3, -0.4, 0.8, 0.25
    a, b, c = o1 - v, o2 - 0.8 * v, o3 - 1.2 * v
    e = 1 / (s.width_ng - 1j * b)
    ref = 1j * e * (1 / (s.width_gm + 1j * (c - b)) + 1 / (s.width_ln + 1j * (a - b)))
    ref /= s.width_lm + 1j * (a - b + c)
    assert chi3_velocity(s, (o1, o2, o3), v, cfg) == pytest.approx(ref, rel=1e-14)


def test_pole_half_planes(radiative):
    poles = velocity_poles(radiative, (0.3, 0.2, 0.1), _cfg(100.0))
    ground = [p for k, p in poles.items() if "n_g-n_n" in k]
    assert {np.sign(p.imag) for p in ground} == {1.0, -1.0}
    for label in ("n_m-n_n", "n_g-n_l"):
        signs = {np.sign(p.imag) for k, p in poles.items() if label in k or k.startswith("ml")}
        assert len(signs) == 1


def test_closed_form_within_five_percent(radiative):
    assert _closed_form_error(radiative, 100.0) < 0.05


def test_closed_form_approaches_monotonically(radiative):
    errs = [_closed_form_error(radiative, ku) for ku in (10, 30, 100, 300)]
    assert np.all(np.diff(errs) < 0)


def test_sum_scheme_suppressed(radiative):
    o1 = np.linspace(-10, 10, 81)
    diff = chi3_averaged(radiative, (o1, 0.0, 0.0), _cfg(100.0)).numeric
    summ = chi3_averaged(radiative, (o1, 0.0, 0.0), _cfg(100.0, scheme="sum"))
    assert summ.closed_form is None
    assert np.abs(diff).max() >= 10 * np.abs(summ.numeric).max()


def test_suppression_grows_as_square(radiative):
    o1 = np.linspace(-10, 10, 41)
    ratio = []
    for ku in (30.0, 100.0, 300.0):
        d = np.abs(chi3_averaged(radiative, (o1, 0.0, 0.0), _cfg(ku)).numeric).max()
        s = np.abs(chi3_averaged(radiative, (o1, 0.0, 0.0), _cfg(ku, scheme="sum")).numeric).max()
        ratio.append(d / s)
    slope = np.polyfit(np.log([30, 100, 300]), np.log(ratio), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_quadrature_rules_agree(radiative):
    grid = (np.linspace(-5, 5, 11), 0.0, 0.0)
    h = numeric_average(radiative, grid, _cfg(3.0, method="hermite"))
    t = numeric_average(radiative, grid, _cfg(3.0, method="trapezoid"))
    assert (h[2], t[2]) == ("hermite", "trapezoid")
    assert np.abs(h[0] - t[0]).max() < 1e-4 * np.abs(h[0]).max()


def test_converged_under_doubling(radiative):
    cfg = _cfg(100.0)
    grid = (np.linspace(-10, 10, 21), 0.0, 0.0)
    values, nodes, _ = numeric_average(radiative, grid, cfg)
    finer, _, _ = numeric_average(radiative, grid, dataclasses.replace(cfg, points=2 * nodes))
    assert np.abs(values - finer).max() <= 1e-4 * np.abs(finer).max()


def test_hermite_gives_up_on_narrow_lines(radiative):
    with pytest.raises(QuadratureNotConverged):
        numeric_average(radiative, (np.linspace(-5, 5, 11), 0.0, 0.0),
                        _cfg(1000.0, method="hermite"))


def test_peak_follows_wavenumber_ratio(radiative):
    o1 = np.linspace(-20, 40, 2401)
    step = o1[1] - o1[0]
    cfg = _cfg(100.0)
    for o2 in (0.0, 9.0, 18.0):
        r = chi3_averaged(radiative, (o1, o2, o2 * 1.1 / 0.9), cfg).numeric
        (peak,) = find_peaks_quadratic(o1, np.abs(r), min_height=0.5 * np.abs(r).max())
        assert abs(peak - o2 / 0.9) < step


def test_equal_wavenumbers_give_bare_width(radiative):
    cfg = DopplerConfig(u=10.0, k1=1.0, k2=1.0, k3=1.0)
    assert tilde_widths(radiative, cfg) == (radiative.width_ln, radiative.width_gm)


def test_raman_factor_at_two_photon_resonance():
    cfg = DopplerConfig(u=10.0, k1=1.0, k2=0.5, k3=1.0)
    raman, _ = raman_limit((100.0, 100.0, 50.0), cfg)
    assert raman == pytest.approx(1 / (100.0 * 50.0))


def test_raman_shape_matches_average():
    s = LevelScheme.spontaneous(decay_l=1, decay_g=1, decay_n=1, decay_m=1, width_ln=0.05)
    cfg = DopplerConfig(u=10.0, k1=1.0, k2=0.5, k3=1.0, n_g=0.0, n_l=1.0)
    d = np.linspace(-30, 30, 121)
    o1 = 2000.0
    avg = chi3_averaged(s, (o1, o1 - d, 1500.0), cfg).numeric
    raman, _ = raman_limit((o1, o1 - d, 1500.0), cfg)
    assert np.corrcoef(avg.imag, raman)[0, 1] > 0.99


def test_raman_width_collapses():
    widths = []
    for k2 in (0.5, 0.9, 0.99):
        cfg = DopplerConfig(u=10.0, k1=1.0, k2=k2, k3=1.0)
        d = np.linspace(-20, 20, 4001)
        r, _ = raman_limit((1000.0, 1000.0 - d, 500.0), cfg)
        widths.append(np.ptp(d[r > 0.5 * r.max()]))
    assert np.all(np.diff(widths) < 0)
    with pytest.raises(DegenerateGeometry):
        raman_limit((1.0, 1.0, 1.0), DopplerConfig(u=1.0, k1=1.0, k2=1.0, k3=1.0))


def test_profile_hook_matches_default(radiative):
    cfg = _cfg(3.0, n_g=1.0, n_n=0.2, n_l=0.4, n_m=0.1)
    hooked = dataclasses.replace(cfg, population_profile=lambda v: cfg.pops)
    grid = (np.linspace(-5, 5, 11), 0.5, 0.0)
    a = chi3_averaged(radiative, grid, cfg)
    b = chi3_averaged(radiative, grid, hooked)
    assert b.closed_form is None
    assert np.allclose(a.numeric, b.numeric, rtol=1e-12)


def test_threads_do_not_change_result(radiative):
    grid = (np.linspace(-10, 10, 64), 0.0, 0.0)
    a = numeric_average(radiative, grid, _cfg(30.0))[0]
    b = numeric_average(radiative, grid, _cfg(30.0), threads=4)[0]
    assert np.array_equal(a, b)


def test_closed_form_scan_is_fast(radiative):
    t = time.perf_counter()
    chi3_averaged(radiative, (np.linspace(-10, 10, 201), 0.0, 0.0), _cfg(100.0))
    assert time.perf_counter() - t < 10
    assert closed_form_average(radiative, (0.0, 0.0, 0.0), _cfg(100.0)).shape == (1,)
