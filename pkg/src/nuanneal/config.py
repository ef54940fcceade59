"""Experiment configuration: a single YAML key-value tree.

The ``system`` section mirrors the physical parameter names (energy_ev,
delta_m2_ev2, big_delta_m2_ev2, theta12/13/23, delta_cp, k_ev, xi, species,
statistics, b_vector_choice, interaction_only); omitted entries fall back to
the reference parameter set below, so swapping the one-body coefficient
vector or the statistics is a one-key change.

Validation failures raise :class:`ConfigError` with the offending field path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .aqae import AqaeConfig
from .basis import PmnsParams, StateVector, flavor_state
from .hamiltonians import (
    B_VECTOR_CHOICES,
    Species,
    Statistics,
    SystemSpec,
    anisotropic_angles,
    b_vector_preset,
)

# Reference oscillation parameters (PDG-consistent central values) used when
# the config omits them.
DEFAULTS = {
    "energy_ev": 1.0e7,
    "delta_m2_ev2": 7.42e-5,
    "big_delta_m2_ev2": 2.44e-3,
    "theta12": 0.591667,
    "theta13": 0.148702,
    "theta23": 0.840027,
    "delta_cp": 4.36681,
    "k_ev": 1.75e-12,
    "b_vector_choice": "appendixA",
    "statistics": "dirac",
    "interaction_only": False,
}

DEFAULT_XI = 0.9
DEFAULT_PAIR_ANGLE = math.pi / 4.0


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def _get_number(section: dict, key: str, path: str, default=None) -> float:
    value = section.get(key, default)
    if value is None:
        raise ConfigError(f"{path}.{key}: required")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}") from None


def _get_int(section: dict, key: str, path: str, default=None) -> int:
    value = section.get(key, default)
    if value is None:
        raise ConfigError(f"{path}.{key}: required")
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return value


def _resolve_angles(system: dict, n_modes: int) -> np.ndarray:
    if "angles" in system:
        angles = np.asarray(system["angles"], dtype=float)
        if angles.shape != (n_modes, n_modes):
            raise ConfigError(
                f"system.angles: expected an {n_modes}x{n_modes} matrix, got shape {angles.shape}"
            )
        return angles
    if "pair_angle" in system:
        if n_modes != 2:
            raise ConfigError("system.pair_angle: only valid for n_modes = 2")
        a = _get_number(system, "pair_angle", "system")
        return np.array([[0.0, a], [a, 0.0]])
    if "xi" in system or n_modes > 2:
        xi = _get_number(system, "xi", "system", DEFAULT_XI)
        try:
            return anisotropic_angles(xi, n_modes)
        except ValueError as exc:
            raise ConfigError(f"system.xi: {exc}") from None
    # Two modes, nothing specified: the reference head-on pair angle.
    return np.array([[0.0, DEFAULT_PAIR_ANGLE], [DEFAULT_PAIR_ANGLE, 0.0]])


def _resolve_species(system: dict, n_modes: int) -> tuple[Species, ...]:
    raw = system.get("species")
    if raw is None:
        return (Species.NEUTRINO,) * n_modes
    if not isinstance(raw, list) or len(raw) != n_modes:
        raise ConfigError(f"system.species: expected a list of {n_modes} entries")
    out = []
    for i, entry in enumerate(raw):
        try:
            out.append(Species(str(entry)))
        except ValueError:
            raise ConfigError(
                f"system.species[{i}]: expected 'neutrino' or 'antineutrino', got {entry!r}"
            ) from None
    return tuple(out)


def build_system_spec(system: dict) -> SystemSpec:
    """Resolve the ``system`` section into a :class:`SystemSpec`."""
    if not isinstance(system, dict):
        raise ConfigError("system: expected a mapping")
    n_modes = _get_int(system, "n_modes", "system")
    nf = _get_int(system, "nf", "system")
    if nf not in (2, 3):
        raise ConfigError(f"system.nf: must be 2 or 3, got {nf}")
    if n_modes < 1:
        raise ConfigError("system.n_modes: must be positive")

    energy = system.get("energy_ev", DEFAULTS["energy_ev"])
    energies = np.atleast_1d(np.asarray(energy, dtype=float))
    if energies.shape == (1,):
        energies = np.repeat(energies, n_modes)
    if energies.shape != (n_modes,):
        raise ConfigError(f"system.energy_ev: expected a scalar or {n_modes} values")
    if np.any(energies <= 0):
        raise ConfigError("system.energy_ev: energies must be positive")

    delta_m2 = _get_number(system, "delta_m2_ev2", "system", DEFAULTS["delta_m2_ev2"])
    big_delta_m2 = _get_number(system, "big_delta_m2_ev2", "system", DEFAULTS["big_delta_m2_ev2"])
    pmns = PmnsParams(
        theta12=_get_number(system, "theta12", "system", DEFAULTS["theta12"]),
        theta13=_get_number(system, "theta13", "system", DEFAULTS["theta13"]),
        theta23=_get_number(system, "theta23", "system", DEFAULTS["theta23"]),
        delta_cp=_get_number(system, "delta_cp", "system", DEFAULTS["delta_cp"]),
    )
    k_ev = _get_number(system, "k_ev", "system", DEFAULTS["k_ev"])
    if k_ev < 0:
        raise ConfigError("system.k_ev: must be non-negative")

    statistics_raw = str(system.get("statistics", DEFAULTS["statistics"]))
    try:
        statistics = Statistics(statistics_raw)
    except ValueError:
        raise ConfigError(
            f"system.statistics: expected 'dirac' or 'majorana', got {statistics_raw!r}"
        ) from None

    if "b_vector" in system:
        b_rows = np.asarray(system["b_vector"], dtype=float)
    else:
        choice = str(system.get("b_vector_choice", DEFAULTS["b_vector_choice"]))
        if choice not in B_VECTOR_CHOICES:
            raise ConfigError(
                f"system.b_vector_choice: expected one of {B_VECTOR_CHOICES}, got {choice!r}"
            )
        b_rows = np.stack(
            [b_vector_preset(choice, nf, delta_m2, big_delta_m2, e) for e in energies]
        )

    try:
        return SystemSpec(
            n_modes=n_modes,
            nf=nf,
            pmns=pmns,
            coupling_k=k_ev,
            angles=_resolve_angles(system, n_modes),
            b_vector=b_rows,
            energies=energies,
            delta_m2=delta_m2,
            big_delta_m2=big_delta_m2,
            species=_resolve_species(system, n_modes),
            statistics=statistics,
            interaction_only=bool(system.get("interaction_only", DEFAULTS["interaction_only"])),
        )
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from None


def _resolve_times(raw, path: str = "times") -> list[float]:
    if isinstance(raw, dict):
        start = _get_number(raw, "start", path)
        stop = _get_number(raw, "stop", path)
        count = _get_int(raw, "count", path)
        if count < 1:
            raise ConfigError(f"{path}.count: must be positive")
        return [float(t) for t in np.linspace(start, stop, count)]
    if isinstance(raw, list):
        times = [float(t) for t in raw]
    else:
        raise ConfigError(f"{path}: expected a list or a start/stop/count mapping")
    if any(t < 0 for t in times):
        raise ConfigError(f"{path}: sample times must be non-negative")
    return times


def _resolve_initial(raw, spec: SystemSpec) -> StateVector:
    if raw is None:
        raise ConfigError("initial_state: required")
    if isinstance(raw, str):
        labels = [part.strip() for part in raw.split(",")]
    elif isinstance(raw, list):
        labels = [str(part) for part in raw]
    else:
        raise ConfigError("initial_state: expected a list of flavor labels")
    if len(labels) != spec.n_modes:
        raise ConfigError(
            f"initial_state: expected {spec.n_modes} flavor labels, got {len(labels)}"
        )
    try:
        return flavor_state(labels, spec.nf)
    except ValueError as exc:
        raise ConfigError(f"initial_state: {exc}") from None


def build_aqae_config(section: dict, seed: int) -> tuple[AqaeConfig, float | None]:
    """Resolve the ``aqae`` section; returns the config and the clock dt."""
    section = section or {}
    if not isinstance(section, dict):
        raise ConfigError("aqae: expected a mapping")
    dt = section.get("dt")
    if dt is not None:
        dt = float(dt)
        if dt <= 0:
            raise ConfigError("aqae.dt: must be positive when set")
    kwargs = {}
    for key in (
        "k_bits",
        "max_zoom",
        "reads",
        "sweeps",
        "convergence_window",
        "max_rewinds",
        "block_size_cap",
    ):
        if key in section:
            kwargs[key] = _get_int(section, key, "aqae")
    for key in ("convergence_pct", "beta_start", "beta_end", "penalty_weight"):
        if key in section:
            kwargs[key] = _get_number(section, key, "aqae")
    if "rewind_enabled" in section:
        kwargs["rewind_enabled"] = bool(section["rewind_enabled"])
    try:
        return AqaeConfig(seed=seed, **kwargs), dt
    except ValueError as exc:
        raise ConfigError(f"aqae: {exc}") from None


@dataclass
class ExperimentConfig:
    """Everything a command needs, resolved from one YAML document."""

    raw: dict
    seed: int
    spec: SystemSpec
    initial: StateVector | None
    times: list[float]
    aqae: AqaeConfig
    aqae_dt: float | None
    qubo: dict
    bench: dict

    def resolved(self) -> dict:
        """Fully resolved configuration (defaults applied) for provenance."""
        spec = self.spec
        system = {
            "n_modes": spec.n_modes,
            "nf": spec.nf,
            "energy_ev": spec.energies.tolist() if spec.energies is not None else None,
            "delta_m2_ev2": spec.delta_m2,
            "big_delta_m2_ev2": spec.big_delta_m2,
            "theta12": spec.pmns.theta12,
            "theta13": spec.pmns.theta13,
            "theta23": spec.pmns.theta23,
            "delta_cp": spec.pmns.delta_cp,
            "k_ev": spec.coupling_k,
            "angles": spec.angles.tolist(),
            "species": [s.value for s in spec.species],
            "statistics": spec.statistics.value,
            "b_vector": spec.b_vector.tolist(),
            "interaction_only": spec.interaction_only,
        }
        aqae = {
            "k_bits": self.aqae.k_bits,
            "max_zoom": self.aqae.max_zoom,
            "reads": self.aqae.reads,
            "sweeps": self.aqae.sweeps,
            "convergence_window": self.aqae.convergence_window,
            "convergence_pct": self.aqae.convergence_pct,
            "rewind_enabled": self.aqae.rewind_enabled,
            "max_rewinds": self.aqae.max_rewinds,
            "block_size_cap": self.aqae.block_size_cap,
            "dt": self.aqae_dt,
        }
        out = {"seed": self.seed, "system": system, "times": self.times, "aqae": aqae}
        if "initial_state" in self.raw:
            out["initial_state"] = self.raw["initial_state"]
        if self.qubo:
            out["qubo"] = self.qubo
        if self.bench:
            out["bench"] = self.bench
        return out


def load_config(path: str | Path, seed_override: int | None = None) -> ExperimentConfig:
    """Parse and validate an experiment configuration file."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return resolve_config(raw, seed_override)


def resolve_config(raw: dict, seed_override: int | None = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a mapping")
    if "system" not in raw:
        raise ConfigError("system: required")
    seed = seed_override if seed_override is not None else raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed: expected a non-negative integer, got {seed!r}")
    spec = build_system_spec(raw["system"])
    initial = _resolve_initial(raw["initial_state"], spec) if "initial_state" in raw else None
    times = _resolve_times(raw["times"]) if "times" in raw else []
    aqae_cfg, aqae_dt = build_aqae_config(raw.get("aqae"), seed)
    qubo = raw.get("qubo") or {}
    bench = raw.get("bench") or {}
    if not isinstance(qubo, dict):
        raise ConfigError("qubo: expected a mapping")
    if not isinstance(bench, dict):
        raise ConfigError("bench: expected a mapping")
    return ExperimentConfig(
        raw=raw,
        seed=seed,
        spec=spec,
        initial=initial,
        times=times,
        aqae=aqae_cfg,
        aqae_dt=aqae_dt,
        qubo=qubo,
        bench=bench,
    )
