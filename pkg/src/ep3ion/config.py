"""Run configuration: flat key=value files plus CLI overrides.

Frequencies in config files are linear MHz and are multiplied by 2*pi
on load; internal fields are angular rad/us throughout.  Times are us.
The ``seed`` is mandatory whenever ``mode = shot_noise``; noiseless
pipelines ignore it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

import numpy as np

TWO_PI = 2.0 * np.pi


class ConfigError(ValueError):
    """Malformed configuration input, with file/line context when known."""


@dataclass
class ParamConfig:
    """Resolved run parameters in working units (rad/us, us).

    Field notes: ``gamma`` is the fixed |2> dephasing-scale rate (the
    symmetric configuration uses gamma1 = gamma, gamma2 = 2*gamma);
    ``omega_over_gamma`` positions the system relative to the
    coalescence at 1; ``gamma_dt`` is the trial-evolution time in units
    of 1/gamma; ``quench_tmax`` spans the quench grid in units of
    1/gamma.  ``e_b_re``/``e_b_im`` locate the winding base energy.
    """

    gamma: float = TWO_PI * 0.040
    omega_over_gamma: float = 1.0
    omega_a: float = TWO_PI * 0.004
    big_gamma: float = TWO_PI * 19.6
    gamma_a: float = 1.0 / 7400.0
    branch_f: float = 0.816
    n0: float = 1.0
    t_evolve: float = 200.0
    gamma_dt: float = 0.5
    delta_r: float = TWO_PI * 0.020
    e_b_re: float = TWO_PI * -0.016
    e_b_im: float = TWO_PI * -0.032
    loop_points: int = 61
    grid_points: int = 41
    grid_span: float = TWO_PI * 0.1
    scan_points: int = 61
    quench_tmax: float = 6.0
    quench_points: int = 60
    shots: int = 200
    rounds: int = 5
    flip_prob: float = 0.002
    restarts: int = 8
    seed: int | None = None
    mode: str = "noiseless"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.mode not in ("noiseless", "shot_noise"):
            raise ConfigError(f"mode must be noiseless or shot_noise, got {self.mode!r}")
        if self.mode == "shot_noise" and self.seed is None:
            raise ConfigError("seed is mandatory in shot_noise mode")
        for name in ("gamma", "omega_over_gamma", "omega_a", "big_gamma", "t_evolve",
                     "gamma_dt", "delta_r", "grid_span", "quench_tmax", "n0"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("gamma_a", "flip_prob"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.flip_prob >= 0.5:
            raise ConfigError("flip_prob must be below 0.5")
        for name in ("loop_points", "grid_points", "scan_points", "quench_points",
                     "shots", "rounds", "restarts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")

    @property
    def omega(self) -> float:
        return self.omega_over_gamma * self.gamma

    def canonical_text(self) -> str:
        """Stable key=value dump of the resolved config (working units)."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float):
                lines.append(f"{f.name} = {v:.17g}")
            else:
                lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


# config-file key -> (dataclass field, scale applied on load)
_KEY_MAP: dict[str, tuple[str, float]] = {
    "gamma_mhz": ("gamma", TWO_PI),
    "omega_over_gamma": ("omega_over_gamma", 1.0),
    "omega_a_mhz": ("omega_a", TWO_PI),
    "big_gamma_mhz": ("big_gamma", TWO_PI),
    "tau_a_us": ("gamma_a", -1.0),  # stored as a rate; sentinel scale, inverted below
    "branch_f": ("branch_f", 1.0),
    "n0": ("n0", 1.0),
    "t_evolve_us": ("t_evolve", 1.0),
    "gamma_dt": ("gamma_dt", 1.0),
    "delta_r_mhz": ("delta_r", TWO_PI),
    "e_b_re_mhz": ("e_b_re", TWO_PI),
    "e_b_im_mhz": ("e_b_im", TWO_PI),
    "loop_points": ("loop_points", 1.0),
    "grid_points": ("grid_points", 1.0),
    "grid_span_mhz": ("grid_span", TWO_PI),
    "scan_points": ("scan_points", 1.0),
    "quench_tmax": ("quench_tmax", 1.0),
    "quench_points": ("quench_points", 1.0),
    "shots": ("shots", 1.0),
    "rounds": ("rounds", 1.0),
    "flip_prob": ("flip_prob", 1.0),
    "restarts": ("restarts", 1.0),
    "seed": ("seed", 1.0),
    "mode": ("mode", 1.0),
}

_INT_FIELDS = {"loop_points", "grid_points", "scan_points", "quench_points",
               "shots", "rounds", "restarts", "seed"}


def _convert(key: str, raw: str, lineno: int, path: str) -> tuple[str, object]:
    field_name, scale = _KEY_MAP[key]
    if field_name == "mode":
        return field_name, raw
    try:
        if field_name in _INT_FIELDS:
            value: object = int(raw)
        else:
            value = float(raw)
    except ValueError:
        kind = "an integer" if field_name in _INT_FIELDS else "a number"
        raise ConfigError(f"{path}:{lineno}: value for {key!r} must be {kind}, got {raw!r}") from None
    if key == "tau_a_us":
        if value <= 0:
            raise ConfigError(f"{path}:{lineno}: tau_a_us must be positive")
        return field_name, 1.0 / float(value)
    if scale != 1.0:
        return field_name, float(value) * scale
    return field_name, value


def parse_config_text(text: str, path: str = "<config>") -> dict[str, object]:
    """Parse key=value lines into resolved dataclass field overrides."""
    out: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line.strip()!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEY_MAP:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        field_name, value = _convert(key, raw, lineno, path)
        out[field_name] = value
    return out


def load_config(
    path: str | None, overrides: dict[str, object] | None = None
) -> ParamConfig:
    """Build a ParamConfig from an optional file plus resolved overrides.

    ``overrides`` use dataclass field names and working units (the CLI
    layer converts its MHz flags before calling).  Overrides win over
    file values; defaults fill the rest.
    """
    resolved: dict[str, object] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        resolved.update(parse_config_text(text, path))
    for key, value in (overrides or {}).items():
        if value is not None:
            resolved[key] = value
    return ParamConfig(**resolved)
