"""Three-channel Lindblad dynamics of the probe in Bloch form.

The thermal ladder (``sigma_+`` at rate ``gamma N``, ``sigma_-`` at rate
``gamma (N + 1)``) and pure dephasing (``sigma_z`` at rate ``gamma0``) give
linear Bloch equations

    d rx/dt = -(4 gamma0 + gamma_p) rx / 2 - omega ry
    d ry/dt =  omega rx - (4 gamma0 + gamma_p) ry / 2
    d rz/dt =  gamma_m - gamma_p rz

with ``gamma_p = gamma_+ + gamma_-`` and ``gamma_m = gamma_+ - gamma_-``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BathSpec, BlochVector, DomainError, QubitHamiltonian, _as_bloch

# at most this RK4 substep, in units of 1 / gamma_p
RK4_SUBSTEP = 1e-3
# |r| overshoot that is clamped silently; larger overshoot is an error
CLAMP_LIMIT = 1e-6


class IntegrationError(RuntimeError):
    """Numerical integration left the Bloch ball."""


@dataclass(frozen=True)
class DissipationRates:
    gamma_plus: float
    gamma_minus: float
    gamma_p: float
    gamma_m: float
    gamma0: float = 0.0
    occupation: float | None = None

    @classmethod
    def from_channels(cls, gamma_plus: float, gamma_minus: float, gamma0: float = 0.0) -> DissipationRates:
        return cls(
            gamma_plus=gamma_plus,
            gamma_minus=gamma_minus,
            gamma_p=gamma_plus + gamma_minus,
            gamma_m=gamma_plus - gamma_minus,
            gamma0=gamma0,
        )

    @property
    def transverse_rate(self) -> float:
        """Decay rate of ``|rho_12|``: ``2 gamma0 + gamma_p / 2``."""
        return 2.0 * self.gamma0 + 0.5 * self.gamma_p


@dataclass
class Trajectory:
    """Bloch states sampled on a strictly increasing time grid.

    ``rates`` and ``hamiltonian`` are kept when known so that consumers can
    propagate past grid points (for example finite-lag estimators).
    """

    times: np.ndarray
    states: np.ndarray
    rates: DissipationRates | None = None
    hamiltonian: QubitHamiltonian | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.array(self.states, dtype=float).reshape(-1, 3)
        if self.times.ndim != 1 or len(self.times) != len(self.states):
            raise ValueError("times and states must have the same length")
        if len(self.times) and self.times[0] < 0:
            raise ValueError("times must be non-negative")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        norms = np.linalg.norm(self.states, axis=1)
        over = norms > 1.0
        if np.any(norms > 1.0 + CLAMP_LIMIT):
            worst = int(np.argmax(norms))
            raise IntegrationError(f"|r| = {norms[worst]:.9g} at t = {self.times[worst]:.6g}")
        if np.any(over):
            self.states[over] /= norms[over, None]

    def __len__(self) -> int:
        return len(self.times)

    def state(self, index: int) -> BlochVector:
        return BlochVector.from_array(self.states[index])


def bose_einstein(temperature: float, omega: float) -> float:
    x = omega / temperature
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def rates_from_bath(bath: BathSpec, h: QubitHamiltonian) -> DissipationRates:
    n = bose_einstein(bath.temperature, h.omega)
    gamma_plus = bath.gamma * n
    gamma_minus = bath.gamma * (n + 1.0)
    return DissipationRates(
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        gamma_p=bath.gamma * (2.0 * n + 1.0),
        # gamma N - gamma (N + 1), exactly
        gamma_m=-bath.gamma,
        gamma0=bath.gamma0,
        occupation=n,
    )


def bloch_time_derivative(state, rates: DissipationRates, h: QubitHamiltonian) -> np.ndarray:
    r = _as_bloch(state).as_array() if isinstance(state, BlochVector) else np.asarray(state, dtype=float)
    return _generator(rates, h) @ r + _drive(rates)


def _generator(rates: DissipationRates, h: QubitHamiltonian) -> np.ndarray:
    k = 0.5 * (4.0 * rates.gamma0 + rates.gamma_p)
    w = h.omega
    return np.array([[-k, -w, 0.0], [w, -k, 0.0], [0.0, 0.0, -rates.gamma_p]])


def _drive(rates: DissipationRates) -> np.ndarray:
    return np.array([0.0, 0.0, rates.gamma_m])


def stationary_state(rates: DissipationRates) -> BlochVector:
    if rates.gamma_p <= 0:
        raise DomainError("gamma_p = 0: no unique steady state")
    return BlochVector(0.0, 0.0, rates.gamma_m / rates.gamma_p)


def _analytic_components(r0: np.ndarray, rates: DissipationRates, h: QubitHamiltonian, t):
    t = np.asarray(t, dtype=float)
    rho12 = 0.5 * complex(r0[0], -r0[1])
    c = rho12 * np.exp(complex(-rates.transverse_rate, -h.omega) * t)
    decay = np.exp(-rates.gamma_p * t)
    if rates.gamma_p > 0:
        relax = -np.expm1(-rates.gamma_p * t) * (rates.gamma_m / rates.gamma_p)
    else:
        relax = rates.gamma_m * t
    return 2.0 * c.real, -2.0 * c.imag, r0[2] * decay + relax


def propagate_analytic(initial: BlochVector, rates: DissipationRates, h: QubitHamiltonian, t: float) -> BlochVector:
    """Closed-form Bloch vector at time ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    initial = _as_bloch(initial)
    if t == 0:
        return initial
    rx, ry, rz = _analytic_components(initial.as_array(), rates, h, t)
    r = np.array([rx, ry, rz], dtype=float)
    norm = np.linalg.norm(r)
    if norm > 1.0:
        r /= norm
    return BlochVector.from_array(r)


def analytic_trajectory(initial: BlochVector, rates: DissipationRates, h: QubitHamiltonian, times) -> Trajectory:
    """Vectorised :func:`propagate_analytic` over a time grid."""
    initial = _as_bloch(initial)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    rx, ry, rz = _analytic_components(initial.as_array(), rates, h, times)
    states = np.column_stack([rx, ry, rz])
    states[times == 0] = initial.as_array()
    return Trajectory(times, states, rates=rates, hamiltonian=h)


def rk4_step(f, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_affine_map(rates: DissipationRates, h: QubitHamiltonian, dt: float) -> np.ndarray:
    """One RK4 step of the Bloch equations as a 4x4 affine matrix.

    The equations are linear, so the step map is recovered exactly by
    applying :func:`rk4_step` to the origin and the unit vectors.
    """

    def f(y):
        return bloch_time_derivative(y, rates, h)

    offset = rk4_step(f, np.zeros(3), dt)
    m = np.eye(4)
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        m[:3, j] = rk4_step(f, e, dt) - offset
    m[:3, 3] = offset
    return m


def propagate_numeric(
    initial: BlochVector,
    rates: DissipationRates,
    h: QubitHamiltonian,
    grid,
    max_substep: float | None = None,
) -> Trajectory:
    """Fixed-step classical RK4 integration of the Bloch equations.

    Between consecutive grid points the interval is split into equal
    substeps no longer than ``1e-3 / gamma_p`` (or ``max_substep``). Used as
    the independent oracle for :func:`propagate_analytic`.
    """
    initial = _as_bloch(initial)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be non-negative and strictly increasing")
    if max_substep is None:
        scale = max(rates.gamma_p, h.omega, 4.0 * rates.gamma0)
        max_substep = RK4_SUBSTEP / scale if scale > 0 else RK4_SUBSTEP

    y = np.append(initial.as_array(), 1.0)
    states = np.empty((len(grid), 3))
    cache: dict[tuple[int, float], np.ndarray] = {}
    t_prev = 0.0
    for i, t in enumerate(grid):
        span = t - t_prev
        if span > 0:
            n = max(1, math.ceil(span / max_substep - 1e-9))
            key = (n, span)
            if key not in cache:
                cache[key] = np.linalg.matrix_power(_rk4_affine_map(rates, h, span / n), n)
            y = cache[key] @ y
        norm = np.linalg.norm(y[:3])
        if norm > 1.0 + CLAMP_LIMIT:
            raise IntegrationError(f"RK4 left the Bloch ball: |r| = {norm:.9g} at t = {t:.6g}")
        states[i] = y[:3]
        t_prev = t
    return Trajectory(grid, states, rates=rates, hamiltonian=h)
