"""Adaptive annealing eigensolver loop over zoom steps.

Each zoom level z digitizes a correction to the current trajectory estimate
at scale 2^(1-z), anneals the resulting QUBO, applies the best update, and
repeats once with the reverse (sign-flipped) digitization before halving the
scale.  The initial-state register is frozen: its bits are substituted out
of the QUBO as constants, so the first register can never drift off the
embedded initial state and the estimate's global phase stays pinned.

Nonconvergence handling: a plateau of the clock energy (all adjacent-pair
percentage differences below the configured threshold across the window)
while the energy is still far above the digitization floor marks a stalled
run; the estimate is rewound to the latest checkpoint whose energy step was
non-increasing and the loop resumes from there with fresh annealer seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .annealer import AnnealSchedule, anneal
from .basis import BasisTag, StateVector, change_basis, mass_blocks
from .clock import (
    AqaeState,
    ClockMatrix,
    DigitizationParams,
    Direction,
    apply_bit_updates,
    build_clock,
    build_qubo,
    real_embed,
    unembed_state,
)
from .evolution import Evolver
from .hamiltonians import (
    HamiltonianMatrix,
    Species,
    Statistics,
    SystemSpec,
    build_dirac_hamiltonian,
    restrict_to_block,
)
from .witnesses import WitnessReport, compute_witnesses

ZERO_BLOCK_NORM = 1e-12


@dataclass(frozen=True)
class AqaeConfig:
    """Digitization depth, annealer budget, and convergence policy."""

    k_bits: int = 1
    max_zoom: int = 20
    reads: int = 64
    sweeps: int = 128
    convergence_window: int = 8
    convergence_pct: float = 1.0
    rewind_enabled: bool = True
    max_rewinds: int = 3
    seed: int = 0
    beta_start: float | None = None
    beta_end: float | None = None
    penalty_weight: float | None = None
    block_size_cap: int | None = None

    def __post_init__(self):
        if self.k_bits < 1:
            raise ValueError("k_bits must be at least 1")
        if self.max_zoom < 1:
            raise ValueError("max_zoom must be at least 1")
        if self.convergence_window < 1:
            raise ValueError("convergence_window must be at least 1")
        if self.convergence_pct <= 0:
            raise ValueError("convergence_pct must be positive")
        if self.block_size_cap is not None and self.block_size_cap < 1:
            raise ValueError("block_size_cap must be positive when set")


def converged(history: list[float], cfg: AqaeConfig) -> bool:
    """Plateau detector over the clock-energy history.

    True iff the last ``convergence_window`` adjacent-pair percentage
    differences all fall below ``convergence_pct``.
    """
    w = cfg.convergence_window
    if len(history) < w + 1:
        return False
    tail = history[-(w + 1) :]
    for a, b in zip(tail, tail[1:]):
        denom = max(abs(a), abs(b))
        if denom < 1e-300:
            continue
        if 100.0 * abs(b - a) / denom >= cfg.convergence_pct:
            return False
    return True


@dataclass
class _Checkpoint:
    zoom: int
    estimate: np.ndarray
    energy: float
    history_len: int


def _latest_non_increasing(checkpoints: list[_Checkpoint]) -> int:
    """Index of the newest checkpoint whose energy did not rise."""
    for i in range(len(checkpoints) - 1, 0, -1):
        if checkpoints[i].energy <= checkpoints[i - 1].energy:
            return i
    return 0


@dataclass
class AqaeResult:
    """Final-register estimate plus the full iteration record."""

    amplitudes: np.ndarray
    state: AqaeState
    converged: bool
    diagnostics: list[dict]
    rewinds: int
    clock: ClockMatrix


def _iteration_seed(base_seed: int, iteration: int) -> int:
    seq = np.random.SeedSequence([int(base_seed), int(iteration)])
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> 1)


def run_aqae(
    h: HamiltonianMatrix | np.ndarray,
    initial: np.ndarray,
    dt: float,
    cfg: AqaeConfig,
    steps: int = 1,
    oracle: bool = False,
) -> AqaeResult:
    """Recover the time-evolved state of ``initial`` by annealing.

    Runs zoom levels 0 .. max_zoom-1, each with a forward and a reverse
    digitization pass, and returns the normalized final-register amplitudes.
    With ``oracle`` enabled every iteration also records the overlap of the
    current final-register estimate with the exact evolution.
    """
    psi0 = np.asarray(initial, dtype=complex)
    clock = build_clock(h, psi0, dt, steps, cfg.penalty_weight)
    cemb = real_embed(clock)
    d, nreg = clock.register_dim, clock.n_steps + 1
    half = d * nreg
    cemb_norm = float(np.linalg.norm(cemb, 2))

    exact_final = None
    if oracle:
        exact_final = Evolver(h).evolve(psi0, dt * steps)

    prior = np.zeros(2 * half)
    prior[:d] = psi0.real
    prior[half : half + d] = psi0.imag
    frozen_slots = list(range(d)) + list(range(half, half + d))
    frozen_vars = {
        slot * cfg.k_bits + b: 0 for slot in frozen_slots for b in range(cfg.k_bits)
    }
    n_live = 2 * half - len(frozen_slots)

    # Digitization floor: the residual a perfect annealer leaves at zoom z is
    # O(2^-z) per live slot; energies below floor(z) cannot be improved at
    # the current scale and do not indicate a stall.
    def floor_at(z: int) -> float:
        return 16.0 * cemb_norm * n_live * 4.0 ** (-z)

    state = AqaeState(estimate=prior, zoom=0)
    diagnostics: list[dict] = []
    checkpoints: list[_Checkpoint] = []
    iteration = 0
    rewinds = 0
    z = 0
    while z < cfg.max_zoom:
        for direction in (Direction.FORWARD, Direction.REVERSE):
            params = DigitizationParams(cfg.k_bits, z, direction)
            qubo_full = build_qubo(cemb, params, state.estimate)
            qubo, kept = qubo_full.fix_variables(frozen_vars)
            schedule = AnnealSchedule(
                sweeps=cfg.sweeps,
                reads=cfg.reads,
                beta_start=cfg.beta_start,
                beta_end=cfg.beta_end,
                seed=_iteration_seed(cfg.seed, iteration),
            )
            result = anneal(qubo, schedule)
            bits = np.zeros(qubo_full.size)
            bits[kept] = result.best_bits
            state.estimate = apply_bit_updates(state.estimate, bits, params)
            state.energy_history.append(result.best_energy)
            entry = {
                "iteration": iteration,
                "zoom": z,
                "direction": direction.value,
                "clock_energy": result.best_energy,
            }
            if exact_final is not None:
                entry["overlap"] = _final_register_overlap(state.estimate, exact_final, d, nreg)
            diagnostics.append(entry)
            iteration += 1
        state.zoom = z + 1
        checkpoints.append(
            _Checkpoint(z, state.estimate.copy(), state.energy_history[-1], len(state.energy_history))
        )
        stalled = (
            cfg.rewind_enabled
            and rewinds < cfg.max_rewinds
            and converged(state.energy_history, cfg)
            and state.energy_history[-1] > floor_at(z)
        )
        if stalled:
            keep = _latest_non_increasing(checkpoints)
            cp = checkpoints[keep]
            state.estimate = cp.estimate.copy()
            state.energy_history = state.energy_history[: cp.history_len]
            checkpoints = checkpoints[: keep + 1]
            diagnostics.append(
                {
                    "iteration": iteration,
                    "zoom": z,
                    "direction": "rewind",
                    "clock_energy": cp.energy,
                    "rewound_to_zoom": cp.zoom,
                }
            )
            rewinds += 1
            z = cp.zoom + 1
            state.zoom = z
            continue
        z += 1

    final = unembed_state(state.estimate)[d * clock.n_steps :]
    norm = np.linalg.norm(final)
    if norm < 1e-12:
        raise RuntimeError("AQAE final register collapsed to zero; no estimate available")
    converged_flag = state.energy_history[-1] <= floor_at(cfg.max_zoom - 1)
    return AqaeResult(final / norm, state, converged_flag, diagnostics, rewinds, clock)


def _final_register_overlap(estimate: np.ndarray, exact_final: np.ndarray, d: int, nreg: int) -> float:
    est = unembed_state(estimate)[d * (nreg - 1) :]
    norm = np.linalg.norm(est)
    if norm < 1e-300:
        return 0.0
    return float(abs(np.vdot(exact_final, est)) / norm)


@dataclass
class BlockRunReport:
    """Outcome of one occupation block at one sample time."""

    occupation: tuple[int, ...]
    size: int
    weight: float
    skipped: bool
    converged: bool = False
    zoom_levels: int = 0
    rewinds: int = 0
    final_energy: float = math.nan
    overlap: float = math.nan

    def to_dict(self) -> dict:
        return {
            "occupation": [int(c) for c in self.occupation],
            "size": int(self.size),
            "weight": float(self.weight),
            "skipped": bool(self.skipped),
            "converged": bool(self.converged),
            "zoom_levels": int(self.zoom_levels),
            "rewinds": int(self.rewinds),
            "final_energy": None if math.isnan(self.final_energy) else float(self.final_energy),
            "overlap": None if math.isnan(self.overlap) else float(self.overlap),
        }


@dataclass
class BlockedAqaeResult:
    """Witness reports and per-block diagnostics for every sample time."""

    reports: list[WitnessReport]
    block_reports: list[list[BlockRunReport]]
    states: list[StateVector] = field(default_factory=list)


def _block_seed(base_seed: int, time_index: int, block_index: int) -> int:
    seq = np.random.SeedSequence([int(base_seed), int(time_index), int(block_index)])
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> 1)


def run_aqae_blocked(
    spec: SystemSpec,
    initial: StateVector,
    dt: float | None,
    times: list[float],
    cfg: AqaeConfig,
    oracle: bool = False,
) -> BlockedAqaeResult:
    """Blocked AQAE over the mass-basis occupation decomposition.

    For every sample time the flavor initial state is rotated to the mass
    basis and split into occupation blocks; blocks with weight above
    ``ZERO_BLOCK_NORM`` are annealed independently, reassembled, and rotated
    back before the witnesses are computed.  ``dt`` selects the clock step
    size (``None`` evolves each time in a single step).
    """
    if spec.statistics is not Statistics.DIRAC or any(
        s is not Species.NEUTRINO for s in spec.species
    ):
        raise ValueError(
            "blocked AQAE requires an all-neutrino Dirac system; "
            "mixed or Majorana interactions are not occupation-block-diagonal"
        )
    if initial.basis is not BasisTag.FLAVOR:
        raise ValueError("blocked AQAE expects a flavor-basis initial state")
    h_mass = build_dirac_hamiltonian(spec, BasisTag.MASS)
    blocks = mass_blocks(spec.nf, spec.n_modes)
    psi_mass = change_basis(initial, BasisTag.MASS, spec.pmns)

    reports: list[WitnessReport] = []
    block_reports: list[list[BlockRunReport]] = []
    states: list[StateVector] = []
    for t_idx, t in enumerate(times):
        if t < 0:
            raise ValueError("sample times must be non-negative")
        if dt is not None and dt > 0:
            steps = max(1, round(t / dt))
        else:
            steps = 1
        step_dt = t / steps if t > 0 else 0.0
        assembled = np.zeros(spec.dim, dtype=complex)
        per_block: list[BlockRunReport] = []
        for b_idx, block in enumerate(blocks):
            idx = np.asarray(block.indices)
            sub = psi_mass.amplitudes[idx]
            weight = float(np.linalg.norm(sub))
            if weight <= ZERO_BLOCK_NORM:
                per_block.append(BlockRunReport(block.occupation, block.size, weight, True))
                continue
            if cfg.block_size_cap is not None and block.size > cfg.block_size_cap:
                raise ValueError(
                    f"block {block.occupation} has {block.size} states, "
                    f"above the configured cap {cfg.block_size_cap}"
                )
            sub_h = restrict_to_block(h_mass, block)
            block_cfg = replace(cfg, seed=_block_seed(cfg.seed, t_idx, b_idx))
            try:
                res = run_aqae(sub_h, sub / weight, step_dt, block_cfg, steps=steps, oracle=oracle)
            except Exception as exc:
                raise RuntimeError(
                    f"AQAE failed on block {block.occupation} (size {block.size}) "
                    f"at time {t:g}: {exc}"
                ) from exc
            assembled[idx] = weight * res.amplitudes
            overlap = math.nan
            if res.diagnostics and "overlap" in res.diagnostics[-1]:
                overlap = res.diagnostics[-1]["overlap"]
            per_block.append(
                BlockRunReport(
                    block.occupation,
                    block.size,
                    weight,
                    False,
                    converged=res.converged,
                    zoom_levels=res.state.zoom,
                    rewinds=res.rewinds,
                    final_energy=res.state.energy_history[-1],
                    overlap=overlap,
                )
            )
        assembled /= np.linalg.norm(assembled)
        mass_state = StateVector(assembled, BasisTag.MASS, spec.nf, spec.n_modes)
        flavor_state = change_basis(mass_state, BasisTag.FLAVOR, spec.pmns)
        reports.append(compute_witnesses(flavor_state, time=t))
        block_reports.append(per_block)
        states.append(flavor_state)
    return BlockedAqaeResult(reports, block_reports, states)
