"""Temperature readout from the probe's energetics.

Pipeline per time sample: infer the maximum-entropy reference temperature
from the mean energy, bound its deviation from the true temperature with
the two error functions, and shift it by the bound in the direction fixed
by the relaxation regime. Undefined quantities are returned as ``None``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .core import (
    BlochVector,
    DomainError,
    GibbsState,
    QubitHamiltonian,
    _as_bloch,
    binary_entropy,
    log_partition_function,
    mean_energy,
    relative_entropy,
    von_neumann_entropy,
)
from .dynamics import DissipationRates, Trajectory, bloch_time_derivative, propagate_analytic

EPS_RATE = 1e-12
EPS_ENTROPY = 1e-12
EPS_ENERGY = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class UnphysicalEnergyError(DomainError):
    """Energy outside the open interval ``(-omega/2, omega/2)``."""


class Regime(enum.Enum):
    COOLING = "Cooling"
    HEATING = "Heating"
    EQUILIBRATED = "Equilibrated"


@dataclass(frozen=True)
class ReferenceReadout:
    """Gibbs state matching the probe's mean energy."""

    beta_r: float
    t_r: float | None
    energy: float
    omega: float

    @property
    def polarization(self) -> float:
        return 2.0 * self.energy / self.omega

    @property
    def gibbs(self) -> GibbsState:
        return GibbsState(self.beta_r, self.omega)

    @property
    def entropy(self) -> float:
        """``S_r``, evaluated from the matched polarization directly."""
        return binary_entropy(self.polarization)

    @property
    def log_partition_function(self) -> float:
        return log_partition_function(self.beta_r, self.omega)

    @property
    def free_energy(self) -> float | None:
        """``F_r = -T_r ln Z_r``; undefined at infinite temperature."""
        if self.t_r is None:
            return None
        return -self.t_r * self.log_partition_function


@dataclass(frozen=True)
class ErrorPair:
    e1: float | None
    e2: float


@dataclass(frozen=True)
class CorrectedReadout:
    t_corr: float | None
    beta_corr: float
    regime: Regime


@dataclass(frozen=True)
class FiniteLagEstimates:
    beta1: float | None
    beta2: float | None
    tau: float


def infer_beta_r(energy: float, h: QubitHamiltonian) -> ReferenceReadout:
    """``beta_r = -(2/omega) artanh(2E/omega)``, the unique solution of energy matching."""
    x = 2.0 * energy / h.omega
    if not abs(x) < 1.0:
        raise UnphysicalEnergyError(f"energy {energy!r} outside (-omega/2, omega/2)")
    beta_r = -(2.0 / h.omega) * math.atanh(x)
    t_r = None if beta_r == 0 else 1.0 / beta_r
    return ReferenceReadout(beta_r=beta_r, t_r=t_r, energy=energy, omega=h.omega)


def _artanh_over_x(x: float) -> float:
    if abs(x) < 1e-6:
        return 1.0 + x * x / 3.0
    return math.atanh(x) / x


def effective_beta_e(state: BlochVector, rates: DissipationRates, h: QubitHamiltonian) -> float | None:
    """Conventional effective inverse temperature ``dS/dE`` along the flow.

    Uses analytic time derivatives: ``dE/dt = (omega/2) drz/dt`` and
    ``dS/dt = -artanh(|r|) (r . dr/dt) / |r|``. Returns ``None`` when
    ``|dE/dt| < EPS_RATE``.
    """
    state = _as_bloch(state)
    if state.is_pure:
        raise DomainError("effective temperature is undefined for a pure state")
    r = state.as_array()
    rdot = bloch_time_derivative(r, rates, h)
    de_dt = 0.5 * h.omega * rdot[2]
    if abs(de_dt) < EPS_RATE:
        return None
    ds_dt = -_artanh_over_x(state.norm) * float(r @ rdot)
    return ds_dt / de_dt


def _mean_artanh(a: float, b: float) -> float:
    """Average of ``artanh`` over ``[a, b]`` (``b`` may be below ``a``).

    Short intervals use Gauss-Legendre nodes, which avoids the cancellation
    of differencing the antiderivative ``x artanh x + ln(1 - x^2) / 2``.
    """
    width = b - a
    edge = 1.0 - max(abs(a), abs(b))
    if abs(width) <= 1e-3 * edge:
        mid = 0.5 * (a + b)
        x = mid + 0.5 * width * _GL_NODES
        return 0.5 * float(np.sum(_GL_WEIGHTS * np.arctanh(x)))

    def antiderivative(x):
        return x * math.atanh(x) + 0.5 * math.log1p(-x * x)

    return (antiderivative(b) - antiderivative(a)) / width


def finite_lag_estimators(traj: Trajectory, index: int, tau: float) -> FiniteLagEstimates:
    """Finite-lag inverse temperatures between ``t = times[index]`` and ``t + tau``.

    ``beta1 = [ln Z_r(t+tau)/Z_r(t) + beta_r(t+tau) E(t+tau) - beta_r(t) E(t)] / dE``
    and ``beta2 = dS / dE``. Because ``beta_r E + ln Z_r = S_r`` and
    ``dS_r/dE = beta_r``, ``beta1`` is the mean of ``beta_r`` over the energy
    window, and ``beta2`` is evaluated the same way through ``dS/d|r|``;
    both are then free of catastrophic cancellation as ``dE -> 0``.

    The state at ``t + tau`` is propagated exactly from ``times[index]``
    when the trajectory carries its rates; otherwise ``t + tau`` must be a
    grid point.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    h = traj.hamiltonian or QubitHamiltonian()
    first = traj.state(index)
    t = traj.times[index]
    if t + tau > traj.times[-1] * (1 + 1e-12) + 1e-12:
        raise ValueError(f"t + tau = {t + tau} beyond trajectory end {traj.times[-1]}")
    if traj.rates is not None:
        second = propagate_analytic(first, traj.rates, h, tau)
    else:
        matches = np.flatnonzero(np.abs(traj.times - (t + tau)) <= 1e-12 * max(1.0, t + tau))
        if not len(matches):
            raise ValueError("t + tau is not a grid point and the trajectory has no rates")
        second = traj.state(int(matches[0]))

    d_rz = second.rz - first.rz
    d_energy = 0.5 * h.omega * d_rz
    if abs(d_energy) < EPS_RATE:
        return FiniteLagEstimates(None, None, tau)

    beta1 = -(2.0 / h.omega) * _mean_artanh(first.rz, second.rz)

    n1, n2 = first.norm, second.norm
    perp_sq_change = (second.rx**2 + second.ry**2) - (first.rx**2 + first.ry**2)
    if n1 + n2 > 0:
        d_norm = (d_rz * (first.rz + second.rz) + perp_sq_change) / (n1 + n2)
    else:
        d_norm = 0.0
    if max(n1, n2) >= 1.0:
        return FiniteLagEstimates(beta1, None, tau)
    d_entropy = -d_norm * _mean_artanh(n1, n2) if d_norm != 0 else 0.0
    beta2 = d_entropy / d_energy
    return FiniteLagEstimates(beta1, beta2, tau)


def error_e1(
    state: BlochVector,
    readout: ReferenceReadout,
    true_temperature: float,
    h: QubitHamiltonian,
) -> float | None:
    """Lower bound on ``|T_r - T|`` built from the relative entropy to the reference.

    ``E1 = | T_r D / S_r - | T_r S / S_r - T | |``. ``None`` when the reference
    temperature is not positive and finite, or ``S_r < EPS_ENTROPY``.
    """
    if readout.t_r is None or readout.beta_r <= 0 or not math.isfinite(readout.t_r):
        return None
    s_r = readout.entropy
    if s_r < EPS_ENTROPY:
        return None
    try:
        d = relative_entropy(state, readout.gibbs)
    except DomainError:
        return None
    s = von_neumann_entropy(state)
    t_r = readout.t_r
    return abs(t_r * d / s_r - abs(t_r * s / s_r - true_temperature))


def thermal_energy(beta: float, h: QubitHamiltonian) -> float:
    return -0.5 * h.omega * math.tanh(0.5 * beta * h.omega)


def error_e2(energy: float, true_beta: float, h: QubitHamiltonian) -> float:
    """Lower bound on ``|beta_r - beta|``: ``|E_T - E_p| / ||H||_inf^2``."""
    return abs(thermal_energy(true_beta, h) - energy) / h.operator_norm**2


def classify_regime(initial_energy: float, thermal_energy: float, eps: float = EPS_ENERGY) -> Regime:
    if initial_energy > thermal_energy + eps:
        return Regime.COOLING
    if initial_energy < thermal_energy - eps:
        return Regime.HEATING
    return Regime.EQUILIBRATED


_SIGNS = {
    Regime.COOLING: (-1.0, 1.0),
    Regime.HEATING: (1.0, -1.0),
    Regime.EQUILIBRATED: (0.0, 0.0),
}


def corrected_readout(readout: ReferenceReadout, errors: ErrorPair, regime: Regime) -> CorrectedReadout:
    """Shift the reference readout by the error bounds with regime-fixed signs.

    Cooling: ``T_r - E1`` and ``beta_r + E2``; heating: the opposite signs.
    ``t_corr`` is ``None`` if ``E1`` is undefined or ``beta_r <= 0``.
    """
    chi1, chi2 = _SIGNS[regime]
    beta_corr = readout.beta_r + chi2 * errors.e2
    if errors.e1 is None or readout.t_r is None or readout.beta_r <= 0:
        return CorrectedReadout(None, beta_corr, regime)
    return CorrectedReadout(readout.t_r + chi1 * errors.e1, beta_corr, regime)


def energy_covariance(beta, h: QubitHamiltonian):
    """``Tr[H^2 rho] - Tr[H rho]^2`` for Gibbs states at the given inverse temperatures."""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    hm = np.real(np.diag(h.matrix()))
    # diagonal weights exp(-beta E) / Z, shifted for stability
    exponents = -np.outer(beta, hm)
    exponents -= exponents.max(axis=1, keepdims=True)
    weights = np.exp(exponents)
    weights /= weights.sum(axis=1, keepdims=True)
    first = weights @ hm
    second = weights @ hm**2
    return second - first**2


def covariance_integrand(s, readout: ReferenceReadout, true_beta: float, h: QubitHamiltonian):
    """Energy covariance along ``beta_s = beta + s (beta_r - beta)``."""
    s = np.asarray(s, dtype=float)
    return energy_covariance(true_beta + s * (readout.beta_r - true_beta), h).reshape(s.shape)


def covariance_identity_residual(
    readout: ReferenceReadout,
    true_beta: float,
    h: QubitHamiltonian,
    n_quadrature: int = 256,
) -> float:
    """``|(beta_r - beta) int_0^1 Cov ds - (E_T - E_p)|`` with composite Simpson."""
    if n_quadrature < 16:
        raise ValueError("n_quadrature must be at least 16")
    s = np.linspace(0.0, 1.0, n_quadrature)
    integral = simpson(covariance_integrand(s, readout, true_beta, h), x=s)
    contrast = readout.beta_r - true_beta
    return abs(contrast * integral - (thermal_energy(true_beta, h) - readout.energy))


def generalized_free_energy(state: BlochVector, readout: ReferenceReadout, h: QubitHamiltonian) -> float | None:
    """Nonequilibrium free energy ``E_p - T_r S``; ``None`` when ``beta_r = 0``."""
    if readout.t_r is None:
        return None
    return mean_energy(state, h) - readout.t_r * von_neumann_entropy(state)


def worst_case_errors(
    state: BlochVector,
    energy: float,
    interval: tuple[float, float],
    h: QubitHamiltonian,
) -> ErrorPair:
    """Componentwise maximum of the error functions at the interval's boundary temperatures."""
    t_min, t_max = interval
    if not 0 < t_min <= t_max:
        raise ValueError(f"need 0 < T_min <= T_max, got {interval}")
    readout = infer_beta_r(energy, h)
    e1_values = [error_e1(state, readout, t, h) for t in (t_min, t_max)]
    e2 = max(error_e2(energy, 1.0 / t, h) for t in (t_min, t_max))
    e1 = None if any(v is None for v in e1_values) else max(e1_values)
    return ErrorPair(e1, e2)
