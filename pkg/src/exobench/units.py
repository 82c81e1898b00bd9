"""Unit-suffixed quantity parsing for configuration files.

All configuration values with a physical dimension are written as strings
like ``"5 Nm"`` or ``"895 g*cm^2"`` and converted to SI on load.  A bare
number where a dimension is expected is rejected, so a config can never be
mis-read by assuming units.  Scale factors are exact binary constants, so
catalog values such as 0.21 mH or 895 g*cm^2 convert bit-for-bit to the
same float a literal 2.1e-4 or 8.95e-5 would give.
"""

import math
import re

from .errors import UnitError

# unit text normalisation: unicode forms map onto the plain-ASCII spellings
_REWRITES = {
    "·": "*",   # middle dot
    "⋅": "*",   # dot operator
    "²": "^2",
    "°": "deg",
    "Ω": "ohm",
    "Ω": "ohm",
}

UNIT_TABLES = {
    "voltage": {"V": 1.0, "mV": 1e-3},
    "current": {"A": 1.0, "mA": 1e-3},
    "resistance": {"ohm": 1.0, "mohm": 1e-3},
    "inductance": {"H": 1.0, "mH": 1e-3, "uH": 1e-6},
    "torque": {"Nm": 1.0, "mNm": 1e-3},
    "torque_constant": {"Nm/A": 1.0, "mNm/A": 1e-3},
    "back_emf": {"V*s/rad": 1.0, "Vs/rad": 1.0, "Nm/A": 1.0},
    "damping": {"Nm*s/rad": 1.0, "Nms/rad": 1.0},
    "inertia": {"kg*m^2": 1.0, "g*cm^2": 1e-7, "kg*cm^2": 1e-4, "g*m^2": 1e-3},
    "stiffness": {"Nm/rad": 1.0, "Nm/deg": 180.0 / math.pi},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "angular_velocity": {"rad/s": 1.0, "deg/s": math.pi / 180.0, "RPM": 2.0 * math.pi / 60.0},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "mHz": 1e-3},
    "time": {"s": 1.0, "ms": 1e-3, "min": 60.0},
    "proportional_gain": {"V/Nm": 1.0},
    "integral_gain": {"V/(Nm*s)": 1.0, "V/Nm/s": 1.0},
}

_NUMBER_RE = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(\S.*?)\s*$")


def normalize_unit(text: str) -> str:
    for src, dst in _REWRITES.items():
        text = text.replace(src, dst)
    return "".join(text.split())


def parse_quantity(raw, dimension: str | None, key: str = "value") -> float:
    """Convert a config value to SI units.

    raw        -- the value as it appears in the parsed YAML (str or number)
    dimension  -- a key of UNIT_TABLES, or None for dimensionless values
    key        -- config key name, used only in error messages
    """
    if dimension is None:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise UnitError(f"{key}: expected a bare number, got {raw!r}")
        return float(raw)

    table = UNIT_TABLES[dimension]
    if isinstance(raw, bool) or isinstance(raw, (int, float)):
        raise UnitError(
            f"{key}: {raw!r} is missing a unit suffix; accepted units: "
            + ", ".join(sorted(table))
        )
    if not isinstance(raw, str):
        raise UnitError(f"{key}: cannot parse {raw!r} as a quantity")

    m = _NUMBER_RE.match(raw)
    if m is None:
        raise UnitError(f"{key}: cannot parse {raw!r} as '<number> <unit>'")
    value, unit = float(m.group(1)), normalize_unit(m.group(2))
    if unit not in table:
        raise UnitError(
            f"{key}: unit '{m.group(2).strip()}' is not valid for {dimension}; "
            "accepted: " + ", ".join(sorted(table))
        )
    return value * table[unit]
