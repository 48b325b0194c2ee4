"""Unit conversion to angular frequency (rad/s).

Internally every rate and detuning is an angular frequency. Configuration
values carry an explicit unit tag which is resolved here.
"""

import math

from scipy import constants

from .errors import ConfigError

#: Factor taking one unit to rad/s.
_TO_RAD_PER_S = {
    "rad/s": 1.0,
    "1/s": 1.0,
    "s^-1": 1.0,
    "hz": 2.0 * math.pi,
    "khz": 2.0 * math.pi * 1e3,
    "mhz": 2.0 * math.pi * 1e6,
    "ghz": 2.0 * math.pi * 1e9,
    "cm^-1": 2.0 * math.pi * constants.c * 100.0,
}

UNIT_TAGS = tuple(sorted(_TO_RAD_PER_S))


def to_angular(value: float, unit: str) -> float:
    """Convert ``value`` expressed in ``unit`` to rad/s.

    Parameters
    ----------
    value : float
        Magnitude in the given unit.
    unit : str
        One of ``rad/s``, ``1/s``, ``Hz``, ``kHz``, ``MHz``, ``GHz``,
        ``cm^-1`` (case-insensitive).

    Returns
    -------
    float
        Angular frequency in rad/s.
    """
    try:
        factor = _TO_RAD_PER_S[unit.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown unit tag {unit!r}; expected one of {UNIT_TAGS}") from None
    return float(value) * factor


def from_angular(value: float, unit: str) -> float:
    """Inverse of :func:`to_angular`."""
    return float(value) / to_angular(1.0, unit)


def wavenumber_to_joule(sigma_cm: float) -> float:
    """Energy of a spectroscopic wavenumber given in cm^-1."""
    return constants.h * constants.c * 100.0 * sigma_cm


def parse_quantity(text: str, default_unit: str = "rad/s") -> float:
    """Parse ``"<number> [unit]"`` and return the value in rad/s.

    >>> round(parse_quantity("1 GHz") / 6.283185307e9, 6)
    1.0
    """
    parts = text.split()
    if not parts or len(parts) > 2:
        raise ConfigError(f"cannot parse quantity {text!r}")
    try:
        number = float(parts[0])
    except ValueError:
        raise ConfigError(f"cannot parse number in {text!r}") from None
    unit = parts[1] if len(parts) == 2 else default_unit
    return to_angular(number, unit)
