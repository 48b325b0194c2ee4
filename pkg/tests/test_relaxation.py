import numpy as np
import pytest

from atomcoherence.relaxation import (DoubletConfig, doublet_coherence, interference_bracket,
                                      resonance_contrast)


def test_radiative_widths_cancel_resonance(rng):
    for _ in range(200):
        gn, gn2 = rng.uniform(0.01, 10, 2)
        o1, o2, om = rng.uniform(-20, 20, 3)
        cfg = DoubletConfig.spontaneous(decay_n=gn, decay_n2=gn2, omega1=o1, omega2=o2, omega=om)
        assert resonance_contrast(cfg) < 1e-12
        assert abs(interference_bracket(cfg) - 1) < 1e-12


def test_unstable_ground_state_restores_resonance():
    cfg = DoubletConfig.spontaneous(decay_n=1.0, decay_n2=1.0, decay_g=0.4)
    assert cfg.mismatch == pytest.approx(-0.4)
    assert resonance_contrast(cfg) == pytest.approx(0.4 / 1.0)


def test_doubled_width_gives_half_contrast():
    cfg = DoubletConfig.spontaneous(decay_n=1.3, decay_n2=0.7, collisional=1.0)
    assert cfg.width_nn2 == 2.0
    assert abs(resonance_contrast(cfg) - 0.5) < 1e-9


def test_collision_induced_lorentzian():
    dg = 0.6
    cfg = DoubletConfig.spontaneous(decay_n=1.0, decay_n2=2.0, collisional=dg,
                                    omega=np.linspace(-50, 50, 100001))
    b = interference_bracket(cfg) - 1
    w = cfg.width_nn2
    assert np.allclose(b, -1j * dg / (cfg.omega + 1j * w), rtol=1e-13)
    assert abs(b[50000]) == pytest.approx(dg / w, rel=1e-12)
    half = cfg.omega[np.abs(b) >= abs(b[50000]) / np.sqrt(2)]
    assert half[-1] == pytest.approx(w, abs=2e-3)


def test_far_wing_bracket_is_one():
    cfg = DoubletConfig.spontaneous(decay_n=1.0, decay_n2=1.0, collisional=5.0, omega=1e9)
    assert abs(interference_bracket(cfg) - 1) < 1e-8


def test_contrast_monotone_in_collisions():
    c = [resonance_contrast(DoubletConfig.spontaneous(decay_n=1.0, decay_n2=0.5, collisional=x))
         for x in np.linspace(0, 10, 41)]
    assert np.all(np.diff(c) > 0)


def test_contrast_scale_invariant(rng):
    for _ in range(50):
        widths = rng.uniform(0.1, 5, 3)
        s = 10 ** rng.uniform(-3, 3)
        a = DoubletConfig(0.0, 0.0, 0.0, *widths)
        b = DoubletConfig(0.0, 0.0, 0.0, *(s * widths))
        assert resonance_contrast(b) == pytest.approx(resonance_contrast(a), rel=1e-12)


def test_coherence_prefactor():
    cfg = DoubletConfig(0.5, -0.3, 0.0, 1.0, 2.0, 3.0)
    expected = interference_bracket(cfg) / ((-0.3 + 2.0j) * (0.5 - 1.0j))
    assert doublet_coherence(cfg) == pytest.approx(expected, rel=1e-15)
