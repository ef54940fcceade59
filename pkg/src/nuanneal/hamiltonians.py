"""Hamiltonian builders for dense neutrino gases.

Covers the mass- and flavor-basis forms of the neutrino-neutrino Hamiltonian
for two and three flavors, the mixed neutrino-antineutrino system, and the
Majorana variant, together with the one-body coefficient vectors derived from
the mass-squared splittings and the pairwise trajectory-angle distribution.

All couplings are in eV, times in 1/eV (hbar = 1).  Mass-squared splittings
are eV^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .basis import (
    BasisTag,
    OccupationBlock,
    PmnsParams,
    embed_single_mode,
    embed_two_modes,
    generator_vector,
    pmns_matrix,
)

HERMITICITY_TOL = 1e-12
OFF_BLOCK_TOL = 1e-10


class Species(Enum):
    NEUTRINO = "neutrino"
    ANTINEUTRINO = "antineutrino"


class Statistics(Enum):
    DIRAC = "dirac"
    MAJORANA = "majorana"


def anisotropic_angles(xi: float, n_modes: int) -> np.ndarray:
    """Pairwise trajectory angles theta_ij = arccos(xi) * |i - j| / (N - 1).

    Mode labels are 1-based in the defining formula; |i - j| is the same
    either way.  The matrix is symmetric with a zero diagonal.
    """
    if abs(xi) > 1.0:
        raise ValueError(f"anisotropy parameter must satisfy |xi| <= 1, got {xi}")
    if n_modes < 2:
        raise ValueError("angle distribution needs at least 2 modes")
    idx = np.arange(n_modes)
    return math.acos(xi) * np.abs(idx[:, None] - idx[None, :]) / (n_modes - 1)


def b_vector_from_masses(delta_m2: float, big_delta_m2: float, energy: float) -> np.ndarray:
    """Three-flavor one-body coefficient vector in the ultrarelativistic limit.

    Only the two diagonal generators contribute:
    component 3 is -delta_m2 / (4 E) and component 8 is
    -big_delta_m2 / (2 sqrt(3) E).
    """
    if energy <= 0:
        raise ValueError(f"energy must be positive, got {energy}")
    b = np.zeros(8)
    b[2] = -delta_m2 / (4.0 * energy)
    b[7] = -big_delta_m2 / (2.0 * math.sqrt(3.0) * energy)
    return b


def b_vector_two_flavor(big_delta_m2: float, energy: float) -> np.ndarray:
    """Two-flavor one-body coefficient vector: (0, 0, -big_delta_m2 / (4 E))."""
    if energy <= 0:
        raise ValueError(f"energy must be positive, got {energy}")
    return np.array([0.0, 0.0, -big_delta_m2 / (4.0 * energy)])


B_VECTOR_CHOICES = ("appendixA", "zero", "third", "pdg_review")


def b_vector_preset(choice: str, nf: int, delta_m2: float, big_delta_m2: float, energy: float) -> np.ndarray:
    """One of the four named one-body coefficient vectors.

    "appendixA" is the ultrarelativistic derivation, "zero" switches the
    one-body term off, "third" is the same as "appendixA" scaled by 1/3, and
    "pdg_review" replaces the second component's 1/(2 sqrt(3)) by 1/4.  For
    nf=2 the distinction collapses to a scale on the single z component.
    """
    if choice not in B_VECTOR_CHOICES:
        raise ValueError(f"unknown b_vector choice {choice!r}; valid: {B_VECTOR_CHOICES}")
    if nf == 2:
        base = b_vector_two_flavor(big_delta_m2, energy)
        if choice == "zero":
            return np.zeros(3)
        if choice == "third":
            return base / 3.0
        return base
    b = b_vector_from_masses(delta_m2, big_delta_m2, energy)
    if choice == "zero":
        return np.zeros(8)
    if choice == "third":
        return b / 3.0
    if choice == "pdg_review":
        b = b.copy()
        b[7] = -big_delta_m2 / (4.0 * energy)
    return b


@dataclass
class SystemSpec:
    """Full physical description of an N-mode, nf-flavor system."""

    n_modes: int
    nf: int
    pmns: PmnsParams
    coupling_k: float
    angles: np.ndarray
    b_vector: np.ndarray
    energies: np.ndarray | None = None
    delta_m2: float = 0.0
    big_delta_m2: float = 0.0
    species: tuple[Species, ...] = ()
    statistics: Statistics = Statistics.DIRAC
    interaction_only: bool = False

    def __post_init__(self):
        if self.nf not in (2, 3):
            raise ValueError(f"nf must be 2 or 3, got {self.nf}")
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        if self.coupling_k < 0:
            raise ValueError("coupling_k must be non-negative")
        if not self.species:
            self.species = (Species.NEUTRINO,) * self.n_modes
        if len(self.species) != self.n_modes:
            raise ValueError("species must list one entry per mode")
        if self.statistics is Statistics.MAJORANA and any(
            s is not Species.NEUTRINO for s in self.species
        ):
            raise ValueError("Majorana modes are self-conjugate; species must be all neutrino")
        self.angles = np.asarray(self.angles, dtype=float)
        if self.angles.shape != (self.n_modes, self.n_modes):
            raise ValueError(
                f"angles must be an {self.n_modes}x{self.n_modes} matrix, got {self.angles.shape}"
            )
        if np.any(np.abs(np.diagonal(self.angles)) > 0):
            raise ValueError("angle matrix must have a zero diagonal")
        if np.max(np.abs(self.angles - self.angles.T)) > 0:
            raise ValueError("angle matrix must be symmetric")
        n_gen = 3 if self.nf == 2 else 8
        b = np.asarray(self.b_vector, dtype=float)
        if b.shape == (n_gen,):
            b = np.tile(b, (self.n_modes, 1))
        if b.shape != (self.n_modes, n_gen):
            raise ValueError(
                f"b_vector must have shape ({n_gen},) or ({self.n_modes}, {n_gen}), got {b.shape}"
            )
        self.b_vector = b
        if self.energies is not None:
            self.energies = np.atleast_1d(np.asarray(self.energies, dtype=float))
            if self.energies.shape == (1,):
                self.energies = np.repeat(self.energies, self.n_modes)
            if self.energies.shape != (self.n_modes,):
                raise ValueError("energies must list one value per mode")

    @property
    def dim(self) -> int:
        return self.nf**self.n_modes

    def pair_coupling(self, p: int, q: int) -> float:
        return self.coupling_k * (1.0 - math.cos(self.angles[p, q]))


@dataclass
class HamiltonianMatrix:
    """Dense Hermitian operator on the nf^N many-body space."""

    matrix: np.ndarray
    basis: BasisTag

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"matrix must be square, got shape {self.matrix.shape}")
        scale = max(1.0, np.max(np.abs(self.matrix)))
        dev = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if dev > HERMITICITY_TOL * scale:
            raise ValueError(f"matrix deviates from Hermiticity by {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _one_body_term(spec: SystemSpec, basis: BasisTag) -> np.ndarray:
    """Sum over modes of the B-dot-generator operator, optionally PMNS-rotated."""
    gens = generator_vector(spec.nf)
    u = pmns_matrix(spec.pmns, spec.nf)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for p in range(spec.n_modes):
        local = np.tensordot(spec.b_vector[p], gens, axes=([0], [0]))
        if basis is BasisTag.FLAVOR:
            local = u @ local @ u.conj().T
        h += embed_single_mode(local, p, spec.n_modes)
    return h


def _pair_term(spec: SystemSpec, left: np.ndarray, right: np.ndarray, p: int, q: int) -> np.ndarray:
    """Generator-dot-generator coupling k (1 - cos theta_pq) on modes p < q."""
    coupling = spec.pair_coupling(p, q)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    if coupling == 0.0:
        return h
    for a, b in zip(left, right):
        h += embed_two_modes(a, b, p, q, spec.n_modes)
    return coupling * h


def build_dirac_hamiltonian(spec: SystemSpec, basis: BasisTag) -> HamiltonianMatrix:
    """Neutrino-neutrino Hamiltonian for all-neutrino Dirac systems.

    The two-body generator-exchange term is identical in both bases; only the
    one-body term is conjugated by the per-mode PMNS matrix in the flavor
    basis.  ``interaction_only`` drops the one-body term entirely.
    """
    if spec.statistics is not Statistics.DIRAC:
        raise ValueError("build_dirac_hamiltonian requires Dirac statistics")
    if any(s is not Species.NEUTRINO for s in spec.species):
        raise ValueError("build_dirac_hamiltonian requires all-neutrino species")
    gens = generator_vector(spec.nf)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    if not spec.interaction_only:
        h += _one_body_term(spec, basis)
    for p in range(spec.n_modes):
        for q in range(p + 1, spec.n_modes):
            h += _pair_term(spec, gens, gens, p, q)
    return HamiltonianMatrix(h, basis)


def build_nu_antinu_hamiltonian(spec: SystemSpec) -> HamiltonianMatrix:
    """Mixed neutrino/antineutrino Hamiltonian, flavor basis only.

    Like-species pairs carry the plain generator-exchange coupling; mixed
    pairs pick up a factor of -2 with an elementwise complex conjugation on
    the lower-index mode's generators.  The mixed term is basis-dependent,
    so no mass-basis form exists.
    """
    if spec.statistics is not Statistics.DIRAC:
        raise ValueError("build_nu_antinu_hamiltonian requires Dirac statistics")
    if all(s is Species.NEUTRINO for s in spec.species):
        raise ValueError("no antineutrino modes present; use build_dirac_hamiltonian")
    gens = generator_vector(spec.nf)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    if not spec.interaction_only:
        h += _one_body_term(spec, BasisTag.FLAVOR)
    for p in range(spec.n_modes):
        for q in range(p + 1, spec.n_modes):
            if spec.species[p] is spec.species[q]:
                h += _pair_term(spec, gens, gens, p, q)
            else:
                h += -2.0 * _pair_term(spec, gens.conj(), gens, p, q)
    return HamiltonianMatrix(h, BasisTag.FLAVOR)


def build_majorana_hamiltonian(spec: SystemSpec) -> HamiltonianMatrix:
    """Self-conjugate neutrino Hamiltonian, flavor basis only.

    Every pair couples through +2 k (1 - cos theta) times the dot product of
    the elementwise imaginary parts of the generator vectors; only the
    antisymmetric generators survive.
    """
    if spec.statistics is not Statistics.MAJORANA:
        raise ValueError("build_majorana_hamiltonian requires Majorana statistics")
    gens_im = generator_vector(spec.nf).imag.astype(complex)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    if not spec.interaction_only:
        h += _one_body_term(spec, BasisTag.FLAVOR)
    for p in range(spec.n_modes):
        for q in range(p + 1, spec.n_modes):
            h += 2.0 * _pair_term(spec, gens_im, gens_im, p, q)
    return HamiltonianMatrix(h, BasisTag.FLAVOR)


def build_hamiltonian(spec: SystemSpec, basis: BasisTag = BasisTag.FLAVOR) -> HamiltonianMatrix:
    """Dispatch to the builder matching the spec's statistics and species."""
    if spec.statistics is Statistics.MAJORANA:
        if basis is not BasisTag.FLAVOR:
            raise ValueError("Majorana Hamiltonian is only defined in the flavor basis")
        return build_majorana_hamiltonian(spec)
    if any(s is Species.ANTINEUTRINO for s in spec.species):
        if basis is not BasisTag.FLAVOR:
            raise ValueError("neutrino-antineutrino Hamiltonian is only defined in the flavor basis")
        return build_nu_antinu_hamiltonian(spec)
    return build_dirac_hamiltonian(spec, basis)


def restrict_to_block(h: HamiltonianMatrix, block: OccupationBlock) -> np.ndarray:
    """Dense sub-matrix of a mass-basis Hamiltonian on one occupation block.

    Valid only for Hamiltonians whose two-body term conserves per-eigenstate
    occupation (the all-neutrino Dirac case); any off-block coupling above
    tolerance means the caller picked the wrong Hamiltonian.
    """
    if h.basis is not BasisTag.MASS:
        raise ValueError("block restriction requires a mass-basis Hamiltonian")
    idx = np.asarray(block.indices)
    mask = np.zeros(h.dim, dtype=bool)
    mask[idx] = True
    off = np.max(np.abs(h.matrix[np.ix_(mask, ~mask)])) if mask.sum() < h.dim else 0.0
    if off > OFF_BLOCK_TOL:
        raise ValueError(
            f"off-block coupling {off:.3e} exceeds {OFF_BLOCK_TOL:.0e}; "
            "Hamiltonian is not block-diagonal over occupation blocks"
        )
    return h.matrix[np.ix_(idx, idx)]
