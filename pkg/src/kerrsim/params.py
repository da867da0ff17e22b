"""Experiment configurations: one flat parameter record plus the named built-in sets."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Invalid experiment configuration (bad value, unknown key, unknown set)."""


@dataclass(frozen=True)
class Parameters:
    """One experiment configuration.

    Attributes
    ----------
    eta : float
        Signal-arm transmission, in [0, 1].
    nu : float
        Probe-arm transmission, in [0, 1].
    delta_phi : float
        Technical heterodyne phase noise in radians, in [0, pi).
    epsilon : float
        Post-selection envelope width in heterodyne-plane units, > 0.
    p_dark : float
        Dark-count probability per detector per counting window, in [0, 1).
    phi0 : float
        Phase shift per signal photon, radians.  May exceed 2*pi for the
        strong-interaction state-creation studies.
    alpha : float
        Probe coherent amplitude, real and >= 0.
    beta : float
        Signal coherent amplitude, real and >= 0.
    """

    eta: float
    nu: float
    delta_phi: float
    epsilon: float
    p_dark: float
    phi0: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("eta", "nu"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.delta_phi < math.pi:
            raise ConfigError(f"delta_phi must lie in [0, pi), got {self.delta_phi}")
        if not self.epsilon > 0.0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0.0 <= self.p_dark < 1.0:
            raise ConfigError(f"p_dark must lie in [0, 1), got {self.p_dark}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not v >= 0.0:
                raise ConfigError(f"{name} must be >= 0, got {v}")
        if not math.isfinite(self.phi0):
            raise ConfigError(f"phi0 must be finite, got {self.phi0}")

    def replace(self, **changes) -> "Parameters":
        """Return a copy with the given fields replaced (re-validated)."""
        return dataclasses.replace(self, **changes)

    def asdict(self) -> dict:
        return dataclasses.asdict(self)


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(Parameters))

# Built-in sets.  "achievable" is the optimally-achievable configuration.
PARAMETER_SETS: dict[str, Parameters] = {
    "current": Parameters(
        eta=0.5, nu=0.5, delta_phi=0.02, epsilon=0.3,
        p_dark=0.1, phi0=0.00002, alpha=50.0, beta=50.0,
    ),
    "achievable": Parameters(
        eta=0.5, nu=0.5, delta_phi=0.01, epsilon=0.3,
        p_dark=0.001, phi0=0.00002, alpha=70.0, beta=70.0,
    ),
    "optimistic": Parameters(
        eta=0.5, nu=0.5, delta_phi=0.01, epsilon=0.3,
        p_dark=0.0001, phi0=0.00002, alpha=70.0, beta=70.0,
    ),
}


def named_parameters(name: str) -> Parameters:
    """Look up a built-in parameter set by name."""
    try:
        return PARAMETER_SETS[name]
    except KeyError:
        known = ", ".join(sorted(PARAMETER_SETS))
        raise ConfigError(f"unknown parameter set {name!r} (known: {known})") from None


def parse_config(path: str | Path) -> dict[str, float]:
    """Parse a flat key-value config file, one ``name = value`` per line.

    Blank lines and ``#`` comments are ignored.  ``name value`` and
    ``name: value`` forms are accepted too.  Values must be floats.
    """
    out: dict[str, float] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":", None):
            parts = line.split(sep, 1) if sep else line.split(None, 1)
            if len(parts) == 2 and parts[0].strip():
                break
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: cannot parse {raw!r}")
        key = parts[0].strip()
        if key not in FIELD_NAMES:
            raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
        try:
            out[key] = float(parts[1].strip())
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {parts[1]!r}") from None
    return out


def build_parameters(set_name: str | None = None,
                     config_path: str | Path | None = None,
                     **overrides: float) -> Parameters:
    """Assemble Parameters from a named set, an optional config file and overrides.

    Precedence, lowest to highest: named set, config file, keyword overrides.
    Without a named set the config/overrides must supply every field.
    """
    values: dict[str, float] = {}
    if set_name is not None:
        values.update(named_parameters(set_name).asdict())
    if config_path is not None:
        values.update(parse_config(config_path))
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in FIELD_NAMES:
            raise ConfigError(f"unknown parameter {key!r}")
        values[key] = float(val)
    missing = [k for k in FIELD_NAMES if k not in values]
    if missing:
        raise ConfigError(f"missing parameters: {', '.join(missing)}")
    return Parameters(**values)
