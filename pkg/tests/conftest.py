import sys

import numpy as np
import pytest

from atomcoherence.scheme import FieldSet, LevelScheme

WIDTH_NAMES = ("width_lg", "width_ng", "width_nm", "width_lm", "width_ln", "width_gm")


def random_scheme(rng, lo=0.1, hi=10.0):
    """Valid open scheme with Γ ratios in [lo, hi] and random branching."""
    d = rng.uniform(lo, hi, size=4)
    br = rng.uniform(0, 0.5, size=4)
    return LevelScheme(
        decay_l=d[0], decay_g=d[1], decay_n=d[2], decay_m=d[3],
        **{k: rng.uniform(lo, hi) for k in WIDTH_NAMES},
        branch_gl=br[0] * d[1], branch_gn=br[1] * d[1],
        branch_ml=br[2] * d[3], branch_mn=br[3] * d[3],
        pump_l=rng.uniform(0, 1), pump_g=rng.uniform(0, 1),
        pump_n=rng.uniform(0, 1), pump_m=rng.uniform(0, 1))


def random_fields(rng, strong=5.0, probe=1e-4, detuning=10.0):
    def phase():
        return np.exp(1j * rng.uniform(0, 2 * np.pi))

    return FieldSet(g1=rng.uniform(0, strong) * phase(), g2=probe * phase(),
                    g3=rng.uniform(0, strong) * phase(), g4=probe * phase(),
                    omega1=rng.uniform(-detuning, detuning), omega2=rng.uniform(-detuning, detuning),
                    omega3=rng.uniform(-detuning, detuning), omega4=rng.uniform(-detuning, detuning))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def vscheme():
    """Open V scheme g-n-m with most population in n and a narrow g-m coherence."""
    return LevelScheme.from_populations(
        n_l=0.1, n_g=0.2, n_n=1.0, n_m=0.3,
        decay_l=1, decay_g=1, decay_n=1, decay_m=1,
        width_lg=1, width_ng=1, width_nm=1, width_lm=1, width_ln=0.5, width_gm=0.05,
        branch_gn=0.3, branch_mn=0.3)


@pytest.fixture
def unit_scheme():
    return LevelScheme.spontaneous(decay_l=1.0, decay_g=1.0, decay_n=1.0, decay_m=1.0,
                                   pump_l=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
