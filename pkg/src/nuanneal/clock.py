"""Feynman-clock encoding of time evolution and its QUBO digitization.

A clock matrix couples T+1 state registers so that its unique ground state
(up to global phase) is the concatenation of the exact trajectory
(psi, U psi, ..., U^T psi), with a penalty pinning the first register to the
initial state.  The complex matrix is embedded into a real symmetric one of
twice the dimension, amplitudes are digitized into K bits per slot with a
zoom-dependent scale, and the resulting quadratic form over bits becomes a
QUBO problem.

Digitization of one amplitude slot at zoom level z (forward direction):

    a_new = a_prior - 2^(1-z) q_K + sum_{i=1}^{K-1} q_i 2^(i-K-z)

so the most significant bit carries weight -2 at z=0 and every zoom step
halves all weights.  The reverse direction negates every weight, providing a
positive counterpart to the dominant negative digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .evolution import propagator
from .hamiltonians import HamiltonianMatrix

CLOCK_PSD_TOL = 1e-10


class Direction(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


@dataclass
class ClockMatrix:
    """Hermitian clock operator over T+1 registers of dimension D."""

    matrix: np.ndarray
    dt: float
    penalty_weight: float
    n_steps: int
    register_dim: int
    initial: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        expected = self.register_dim * (self.n_steps + 1)
        if self.matrix.shape != (expected, expected):
            raise ValueError(
                f"clock matrix has shape {self.matrix.shape}, expected ({expected}, {expected})"
            )
        scale = max(1.0, np.max(np.abs(self.matrix)))
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > 1e-12 * scale:
            raise ValueError("clock matrix must be Hermitian")
        lowest = float(np.linalg.eigvalsh(self.matrix)[0])
        if lowest < -CLOCK_PSD_TOL * scale:
            raise ValueError(f"clock matrix has eigenvalue {lowest:.3e} below the PSD floor")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_clock(
    h: HamiltonianMatrix | np.ndarray,
    initial: np.ndarray,
    dt: float,
    steps: int = 1,
    penalty_weight: float | None = None,
) -> ClockMatrix:
    """Clock matrix whose ground state is the exact trajectory of ``initial``.

    Each step contributes 1/2 ||a_{t+1} - U a_t||^2 to the quadratic form;
    the penalty term weight * (I - |psi0><psi0|) on the first register makes
    the trajectory the unique minimizer.  Any positive weight is correct at
    the matrix level; the default 2 * ||C - C0||_2 keeps a healthy spectral
    gap for annealing.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.ndim != 1:
        raise ValueError("initial state must be a vector")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")
    u = propagator(h, dt)
    d = psi0.shape[0]
    if u.shape != (d, d):
        raise ValueError(f"Hamiltonian dimension {u.shape[0]} != state dimension {d}")
    dim = d * (steps + 1)
    c = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(d)
    for t in range(steps):
        lo, hi = t * d, (t + 1) * d
        c[lo:hi, lo:hi] += 0.5 * eye
        c[hi : hi + d, hi : hi + d] += 0.5 * eye
        c[hi : hi + d, lo:hi] += -0.5 * u
        c[lo:hi, hi : hi + d] += -0.5 * u.conj().T
    if penalty_weight is None:
        penalty_weight = 2.0 * float(np.linalg.norm(c, 2))
    c[:d, :d] += penalty_weight * (eye - np.outer(psi0, psi0.conj()))
    return ClockMatrix(c, dt, penalty_weight, steps, d, psi0)


def real_embed(c: ClockMatrix | np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.

    For v = x + i y the quadratic form satisfies
    Re(v^dag C v) = (x; y)^T C_emb (x; y), and the embedded spectrum is the
    doubled spectrum of C.
    """
    m = c.matrix if isinstance(c, ClockMatrix) else np.asarray(c, dtype=complex)
    re, im = m.real, m.imag
    return np.block([[re, -im], [im, re]])


def embed_state(psi: np.ndarray) -> np.ndarray:
    """Real embedding (Re psi; Im psi) of a complex vector."""
    psi = np.asarray(psi, dtype=complex)
    return np.concatenate([psi.real, psi.imag])


def unembed_state(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_state`."""
    vec = np.asarray(vec, dtype=float)
    half = vec.shape[0] // 2
    return vec[:half] + 1j * vec[half:]


@dataclass(frozen=True)
class DigitizationParams:
    """Bit count, zoom level, and update direction of one digitization pass."""

    k_bits: int
    zoom: int = 0
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        if self.k_bits < 1:
            raise ValueError("k_bits must be at least 1")
        if self.zoom < 0:
            raise ValueError("zoom must be non-negative")


def digit_weights(params: DigitizationParams) -> np.ndarray:
    """Signed per-bit update weights, least significant bit first.

    Bits 1..K-1 carry 2^(i-K-z); the final bit carries -2^(1-z).  Reverse
    direction flips every sign.
    """
    k, z = params.k_bits, params.zoom
    w = np.array([2.0 ** (i - k - z) for i in range(1, k)] + [-(2.0 ** (1 - z))])
    if params.direction is Direction.REVERSE:
        w = -w
    return w


def digitize_value(bits: np.ndarray | list[int], params: DigitizationParams, prior: float = 0.0) -> float:
    """Amplitude reconstructed from K bits around a prior estimate."""
    bits = np.asarray(bits, dtype=float)
    if bits.shape != (params.k_bits,):
        raise ValueError(f"expected {params.k_bits} bits, got shape {bits.shape}")
    return float(prior + bits @ digit_weights(params))


def apply_bit_updates(prior: np.ndarray, bits: np.ndarray, params: DigitizationParams) -> np.ndarray:
    """Apply slot-major bit updates to a real amplitude vector.

    ``bits`` holds K consecutive binaries per amplitude slot.
    """
    prior = np.asarray(prior, dtype=float)
    bits = np.asarray(bits, dtype=float)
    if bits.shape != (prior.shape[0] * params.k_bits,):
        raise ValueError(
            f"expected {prior.shape[0] * params.k_bits} bits for {prior.shape[0]} slots"
        )
    return prior + bits.reshape(prior.shape[0], params.k_bits) @ digit_weights(params)


@dataclass
class QuboProblem:
    """Quadratic form over binary variables plus a tracked constant offset.

    ``coefficients`` maps (i, j) with i <= j to the coefficient of x_i x_j
    (the diagonal entries are the linear terms).  Annealers ignore the
    offset, but total energies reported to callers include it so that a
    QUBO energy equals the quadratic form it was derived from.
    """

    size: int
    coefficients: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        normalized: dict[tuple[int, int], float] = {}
        for (i, j), value in self.coefficients.items():
            i, j, value = int(i), int(j), float(value)
            if not 0 <= i <= j < self.size:
                raise ValueError(f"coefficient index ({i}, {j}) out of range for size {self.size}")
            if not np.isfinite(value):
                raise ValueError(f"coefficient ({i}, {j}) is not finite")
            normalized[(i, j)] = value
        self.coefficients = normalized
        self.offset = float(self.offset)

    def energy(self, bits: np.ndarray | list[int]) -> float:
        """Quadratic-form value of a bitstring, excluding the offset."""
        bits = np.asarray(bits, dtype=float)
        if bits.shape != (self.size,):
            raise ValueError(f"expected {self.size} bits, got shape {bits.shape}")
        total = 0.0
        for (i, j), value in self.coefficients.items():
            total += value * bits[i] * bits[j]
        return float(total)

    def total_energy(self, bits: np.ndarray | list[int]) -> float:
        return self.energy(bits) + self.offset

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """(linear, quadratic) arrays: diagonal terms and a symmetric
        zero-diagonal coupling matrix."""
        lin = np.zeros(self.size)
        quad = np.zeros((self.size, self.size))
        for (i, j), value in self.coefficients.items():
            if i == j:
                lin[i] += value
            else:
                quad[i, j] += value
                quad[j, i] += value
        return lin, quad

    def fix_variables(self, assignments: dict[int, int]) -> tuple["QuboProblem", list[int]]:
        """Substitute constants for some variables.

        Returns the reduced problem over the remaining variables (renumbered
        in ascending original order) and the list of kept original indices.
        """
        for idx, val in assignments.items():
            if not 0 <= idx < self.size:
                raise ValueError(f"fixed variable {idx} out of range")
            if val not in (0, 1):
                raise ValueError(f"fixed value for variable {idx} must be 0 or 1")
        kept = [i for i in range(self.size) if i not in assignments]
        renum = {orig: new for new, orig in enumerate(kept)}
        coeffs: dict[tuple[int, int], float] = {}
        offset = self.offset
        for (i, j), value in self.coefficients.items():
            fi, fj = i in assignments, j in assignments
            if fi and fj:
                offset += value * assignments[i] * assignments[j]
            elif fi or fj:
                fixed, free = (i, j) if fi else (j, i)
                if assignments[fixed]:
                    key = (renum[free], renum[free])
                    coeffs[key] = coeffs.get(key, 0.0) + value
            else:
                key = (renum[i], renum[j])
                coeffs[key] = coeffs.get(key, 0.0) + value
        coeffs = {k: v for k, v in coeffs.items() if v != 0.0}
        return QuboProblem(len(kept), coeffs, offset), kept

    def to_ising(self) -> tuple[np.ndarray, dict[tuple[int, int], float], float]:
        """Spin form under x = (1 - s) / 2: fields, couplings, constant."""
        h = np.zeros(self.size)
        j: dict[tuple[int, int], float] = {}
        const = self.offset
        for (a, b), value in self.coefficients.items():
            if a == b:
                h[a] -= value / 2.0
                const += value / 2.0
            else:
                j[(a, b)] = j.get((a, b), 0.0) + value / 4.0
                h[a] -= value / 4.0
                h[b] -= value / 4.0
                const += value / 4.0
        return h, j, const

    def to_text(self) -> str:
        lines = [f"qubo {self.size} {self.offset!r}"]
        for i, j in sorted(self.coefficients):
            lines.append(f"{i} {j} {self.coefficients[(i, j)]!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "QuboProblem":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("qubo "):
            raise ValueError("QUBO text must start with a 'qubo <size> <offset>' header")
        _, size_s, offset_s = lines[0].split()
        coeffs = {}
        for ln in lines[1:]:
            i_s, j_s, v_s = ln.split()
            coeffs[(int(i_s), int(j_s))] = float(v_s)
        return cls(int(size_s), coeffs, float(offset_s))


def build_qubo(real_c: np.ndarray, params: DigitizationParams, prior: np.ndarray) -> QuboProblem:
    """Exact QUBO for the quadratic form a(q)^T C a(q).

    With a(q) = prior + M q, where M maps the K bits of each slot through
    :func:`digit_weights`, the expansion produces the bit-bit couplings, a
    linear coupling to the prior estimate, and a constant offset, so that
    QUBO energy + offset reproduces the quadratic form bit-for-bit.
    """
    c = np.asarray(real_c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"real_c must be square, got shape {c.shape}")
    if np.max(np.abs(c - c.T)) > 1e-12 * max(1.0, np.max(np.abs(c))):
        raise ValueError("real_c must be symmetric")
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (c.shape[0],):
        raise ValueError(f"prior has shape {prior.shape}, expected ({c.shape[0]},)")
    w = digit_weights(params)
    quad = np.kron(c, np.outer(w, w))
    lin = np.kron(2.0 * (c @ prior), w)
    n_vars = c.shape[0] * params.k_bits
    coeffs: dict[tuple[int, int], float] = {}
    for i in range(n_vars):
        diag = quad[i, i] + lin[i]
        if diag != 0.0:
            coeffs[(i, i)] = diag
        row = quad[i, i + 1 :]
        for off in np.nonzero(row)[0]:
            coeffs[(i, i + 1 + int(off))] = 2.0 * row[off]
    offset = float(prior @ c @ prior)
    return QuboProblem(n_vars, coeffs, offset)


@dataclass
class AqaeState:
    """Digitized trajectory estimate: real-embedded amplitudes plus history."""

    estimate: np.ndarray
    zoom: int = 0
    energy_history: list[float] = field(default_factory=list)
