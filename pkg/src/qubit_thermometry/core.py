"""Qubit state algebra for the probe Hamiltonian ``H = omega * sigma_z / 2``.

Conventions: ``hbar = k_B = 1``, entropies in nats, and a density matrix is
written ``rho = (I + r . sigma) / 2`` so that ``rho_11`` is the population of
the excited level (energy ``+omega/2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# eigenvalues below this are treated as exact zeros (0 ln 0 = 0)
EIGENVALUE_FLOOR = 1e-300
# componentwise tolerance for "same state" comparisons
STATE_ATOL = 1e-10
# slack accepted on |r| <= 1 when constructing states
PHYSICAL_SLACK = 1e-9


class DomainError(ValueError):
    """Raised when an operation is evaluated outside its domain of definition."""


@dataclass(frozen=True)
class QubitHamiltonian:
    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def operator_norm(self) -> float:
        """Largest absolute eigenvalue, ``omega / 2``."""
        return 0.5 * self.omega

    def matrix(self) -> np.ndarray:
        return 0.5 * self.omega * SIGMA_Z


@dataclass(frozen=True)
class BlochVector:
    rx: float
    ry: float
    rz: float

    def __post_init__(self):
        for name in ("rx", "ry", "rz"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.norm > 1.0 + PHYSICAL_SLACK:
            raise DomainError(f"|r| = {self.norm:.12g} exceeds 1: not a physical state")

    @classmethod
    def from_array(cls, values) -> BlochVector:
        rx, ry, rz = (float(v) for v in values)
        return cls(rx, ry, rz)

    @classmethod
    def from_density_matrix(cls, rho) -> BlochVector:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise DomainError("density matrix does not have unit trace")
        return cls(
            float(np.real(np.trace(rho @ SIGMA_X))),
            float(np.real(np.trace(rho @ SIGMA_Y))),
            float(np.real(np.trace(rho @ SIGMA_Z))),
        )

    @classmethod
    def from_elements(cls, rho11: float, rho12: complex) -> BlochVector:
        """Build the state from the excited population and the coherence ``rho_12``."""
        rho12 = complex(rho12)
        return cls(2.0 * rho12.real, -2.0 * rho12.imag, 2.0 * rho11 - 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz])

    @property
    def norm(self) -> float:
        return math.sqrt(self.rx**2 + self.ry**2 + self.rz**2)

    @property
    def coherence(self) -> complex:
        """Off-diagonal element ``rho_12 = (rx - i ry) / 2``."""
        return complex(0.5 * self.rx, -0.5 * self.ry)

    @property
    def is_pure(self) -> bool:
        return abs(self.norm - 1.0) <= PHYSICAL_SLACK

    def density_matrix(self) -> np.ndarray:
        return 0.5 * (IDENTITY + self.rx * SIGMA_X + self.ry * SIGMA_Y + self.rz * SIGMA_Z)

    def isclose(self, other: BlochVector, atol: float = STATE_ATOL) -> bool:
        return bool(np.all(np.abs(self.as_array() - other.as_array()) <= atol))


@dataclass(frozen=True)
class GibbsState:
    """Thermal state ``exp(-beta H) / Z``; ``beta`` may be negative (inverted populations)."""

    beta: float
    omega: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise DomainError("beta must be finite")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def polarization(self) -> float:
        """``rz`` of the thermal Bloch vector, ``-tanh(beta omega / 2)``."""
        return -math.tanh(0.5 * self.beta * self.omega)

    @property
    def bloch(self) -> BlochVector:
        return BlochVector(0.0, 0.0, self.polarization)

    @property
    def temperature(self) -> float | None:
        return None if self.beta == 0 else 1.0 / self.beta


@dataclass(frozen=True)
class GibbsProperties:
    bloch: BlochVector
    energy: float
    entropy: float
    partition_function: float


@dataclass(frozen=True)
class BathSpec:
    temperature: float
    gamma: float
    gamma0: float = 0.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.gamma0 >= 0:
            raise ValueError(f"gamma0 must be non-negative, got {self.gamma0}")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature


def _as_bloch(state) -> BlochVector:
    return state if isinstance(state, BlochVector) else BlochVector.from_array(state)


def binary_entropy(norm):
    """Entropy of a qubit with Bloch radius ``norm``; accepts scalars or arrays."""
    if isinstance(norm, (float, int)):
        x = min(abs(float(norm)), 1.0)
        return -_xlogx_scalar(0.5 * (1.0 + x)) - _xlogx_scalar(0.5 * (1.0 - x))
    x = np.clip(np.abs(np.asarray(norm, dtype=float)), 0.0, 1.0)
    plus = 0.5 * (1.0 + x)
    minus = 0.5 * (1.0 - x)
    out = -_xlogx(plus) - _xlogx(minus)
    return float(out) if out.ndim == 0 else out


def _xlogx_scalar(p: float) -> float:
    return p * math.log(p) if p > EIGENVALUE_FLOOR else 0.0


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    safe = np.where(p > EIGENVALUE_FLOOR, p, 1.0)
    return np.where(p > EIGENVALUE_FLOOR, p * np.log(safe), 0.0)


def mean_energy(state: BlochVector, h: QubitHamiltonian) -> float:
    """``Tr[H rho] = (omega / 2) rz``."""
    return 0.5 * h.omega * _as_bloch(state).rz


def von_neumann_entropy(state: BlochVector) -> float:
    """Entropy in nats from the eigenvalues ``(1 +- |r|) / 2``."""
    return binary_entropy(_as_bloch(state).norm)


def relative_entropy(state: BlochVector, reference: GibbsState) -> float:
    """Quantum relative entropy ``Tr[rho (ln rho - ln sigma)]`` against a Gibbs reference.

    ``sigma`` is diagonal in the energy basis, so ``Tr[rho ln sigma]`` only
    sees the populations of ``rho``. The reference must be full rank; a Gibbs
    state whose polarization has saturated to +-1 in floating point raises
    :class:`DomainError`.
    """
    state = _as_bloch(state)
    s = reference.polarization
    if abs(s) >= 1.0:
        raise DomainError("reference state is pure; relative entropy diverges")
    cross = 0.5 * ((1.0 + state.rz) * math.log1p(s) + (1.0 - state.rz) * math.log1p(-s)) - math.log(2.0)
    value = -von_neumann_entropy(state) - cross
    # Klein's inequality; negative values are rounding noise
    return max(value, 0.0)


def gibbs_properties(g: GibbsState) -> GibbsProperties:
    bloch = g.bloch
    energy = 0.5 * g.omega * bloch.rz
    return GibbsProperties(
        bloch=bloch,
        energy=energy,
        entropy=von_neumann_entropy(bloch),
        partition_function=2.0 * math.cosh(0.5 * g.beta * g.omega),
    )


def log_partition_function(beta: float, omega: float) -> float:
    """``ln(2 cosh(beta omega / 2))`` without overflow for large ``|beta omega|``."""
    x = abs(0.5 * beta * omega)
    return x + math.log1p(math.exp(-2.0 * x))


def heat_capacity(g: GibbsState) -> float:
    """``C = dE/dT = omega^2 / (4 T^2 cosh^2(omega / 2T))`` for ``T = 1/beta > 0``."""
    if not g.beta > 0:
        raise DomainError("heat capacity requires a positive temperature")
    x = 0.5 * g.beta * g.omega
    if x > 350.0:
        return 0.0
    return (x / math.cosh(x)) ** 2
