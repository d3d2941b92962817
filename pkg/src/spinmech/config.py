"""Scenario configuration: ids, overrides, disorder bounds, config files."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

__all__ = ["SCENARIO_IDS", "ScenarioConfig", "DisorderSpec", "load_config_file", "coerce_value"]

SCENARIO_IDS = (
    "fig2b",
    "fig2c",
    "fig3",
    "fig4",
    "figS1",
    "figS2",
    "figS3",
    "figS5",
    "figS6",
    "figS7",
    "figS8",
    "figS9",
    "sw-check",
    "custom",
)

DISORDER_LIMIT = 0.05


@dataclass(frozen=True)
class DisorderSpec:
    """Per-spin detuning offsets and coupling factors, both bounded at 5%."""

    delta_dg_offsets: tuple[float, ...]
    lambda_factors: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "delta_dg_offsets", tuple(float(x) for x in self.delta_dg_offsets))
        object.__setattr__(self, "lambda_factors", tuple(float(x) for x in self.lambda_factors))
        if len(self.delta_dg_offsets) != len(self.lambda_factors):
            raise ConfigError("disorder vectors must have equal length")
        if any(abs(x) > DISORDER_LIMIT + 1e-12 for x in self.delta_dg_offsets):
            raise ConfigError(f"detuning offsets exceed the {DISORDER_LIMIT:.0%} bound")
        if any(abs(f - 1.0) > DISORDER_LIMIT + 1e-12 for f in self.lambda_factors):
            raise ConfigError(f"coupling factors exceed the {DISORDER_LIMIT:.0%} bound")

    @classmethod
    def sample(cls, n_spins: int, seed: int) -> "DisorderSpec":
        import numpy as np

        rng = np.random.default_rng(seed)
        return cls(
            delta_dg_offsets=tuple(rng.uniform(-DISORDER_LIMIT, DISORDER_LIMIT, n_spins)),
            lambda_factors=tuple(1.0 + rng.uniform(-DISORDER_LIMIT, DISORDER_LIMIT, n_spins)),
        )


@dataclass
class ScenarioConfig:
    scenario_id: str
    overrides: dict[str, object] = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "runs"
    integrator: str = "adaptive"  # "adaptive" | "fixed"
    fixed_step: float | None = None
    plot: bool = False

    def __post_init__(self):
        if self.scenario_id not in SCENARIO_IDS:
            raise ConfigError(
                f"unknown scenario {self.scenario_id!r}; known: {', '.join(SCENARIO_IDS)}"
            )
        if self.integrator not in ("adaptive", "fixed"):
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.integrator == "fixed" and not self.fixed_step:
            raise ConfigError("fixed integrator needs a step size")


def coerce_value(raw: str):
    """Parse an override value: int, float, comma list of floats, or string."""
    raw = raw.strip()
    if "," in raw:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    return raw


# keys recognized in [model] / [device] / [integrator] / [disorder] / [output]
MODEL_KEYS = {
    "delta_m", "delta_dg", "lambda_j", "omega_p_amp", "r", "n_spins", "n_max",
    "gamma_nv", "gamma_m_s",
}
DEVICE_KEYS = {
    "length", "width", "thickness", "youngs_modulus", "density", "magnet_gradient",
    "voltage_dc", "voltage_ac", "permittivity", "plate_area", "gap", "n_th",
    "quality_factor",
}
INTEGRATOR_KEYS = {"mode", "step", "rtol", "atol"}
DISORDER_KEYS = {"delta_dg_offsets", "lambda_factors"}
OUTPUT_KEYS = {"dir"}


def load_config_file(path: str | Path) -> dict[str, object]:
    """Read the sectioned config file into a flat override map.

    Model and device keys keep their plain names; integrator, disorder and
    output keys are prefixed with their section (e.g. ``integrator.mode``).
    """
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"config file {path} not found or unreadable")
    known = {
        "model": MODEL_KEYS,
        "device": DEVICE_KEYS,
        "integrator": INTEGRATOR_KEYS,
        "disorder": DISORDER_KEYS,
        "output": OUTPUT_KEYS,
    }
    flat: dict[str, object] = {}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in known[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            name = key if section in ("model", "device") else f"{section}.{key}"
            flat[name] = coerce_value(raw)
    return flat
