"""Coherence-controlled absorption, gain and mixing in four-level atoms.

Submodules
----------
scheme
    Level scheme, fields and complex denominators.
steady_state
    Closed-form steady state and an independent linear-system solver.
spectra
    Probe absorption and refraction, sum rule, gain threshold.
sodium
    Buffer-gas collisional model and numerical estimates for sodium vapour.
fwm
    Four-wave mixing under induced transparency.
local_field
    Dense-medium local-field corrections.
doppler
    Maxwell velocity averaging of the mixing susceptibility.
lics
    Laser-induced continuum structures.
relaxation
    Collision-induced interference in a doublet.
optimizer
    Search for inversionless-gain operating points.
cli
    Command-line front end.
"""

__version__ = "0.1.0"

from .errors import (AtomCoherenceError, NumericalError, ValidationError)  # noqa: E402
from .scheme import (FieldSet, LevelScheme, Populations, build_denominators,  # noqa: E402
                     validate_scheme)
from .steady_state import oracle_solve, saturated_populations, solve_closed_form  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "__version__", "AtomCoherenceError", "NumericalError", "ValidationError",
    "FieldSet", "LevelScheme", "Populations", "build_denominators", "validate_scheme",
    "oracle_solve", "saturated_populations", "solve_closed_form", "BACKEND",
]
