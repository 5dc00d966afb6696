"""Quantum Fisher information about the bath temperature.

The QFI is evaluated through the Bloch-vector formula
``F = |dr/dT|^2 + (r . dr/dT)^2 / (1 - |r|^2)``, either with the closed-form
temperature derivative of the analytic solution or with a central finite
difference, and independently through a fully expanded closed form.
The initial probe state is taken to be temperature independent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import BathSpec, BlochVector, DomainError, QubitHamiltonian, _as_bloch
from .dynamics import propagate_analytic, rates_from_bath

SINGULAR_DENOMINATOR = 1e-14


class SingularStateError(DomainError):
    """QFI of a (near-)pure state with a radial temperature derivative."""


class FiniteDifferenceWarning(UserWarning):
    """Richardson estimate of the finite-difference error exceeds tolerance."""


@dataclass(frozen=True)
class TemperatureDerivative:
    d_rx: float
    d_ry: float
    d_rz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.d_rx, self.d_ry, self.d_rz])


def gamma_p_temperature_derivative(bath: BathSpec, h: QubitHamiltonian) -> float:
    """``d gamma_p / dT = 2 gamma omega e^{omega/T} / (T^2 (e^{omega/T} - 1)^2)``."""
    x = 0.5 * h.omega / bath.temperature
    if x > 350.0:
        return 0.0
    return bath.gamma * h.omega / (2.0 * bath.temperature**2 * math.sinh(x) ** 2)


def dbloch_dT_analytic(initial: BlochVector, bath: BathSpec, h: QubitHamiltonian, t: float) -> TemperatureDerivative:
    if t < 0:
        raise ValueError("t must be non-negative")
    initial = _as_bloch(initial)
    rates = rates_from_bath(bath, h)
    gp, gm = rates.gamma_p, rates.gamma_m
    dgp = gamma_p_temperature_derivative(bath, h)
    rho21 = initial.coherence.conjugate()
    envelope = math.exp(-rates.transverse_rate * t)
    phase = rho21 * complex(math.cos(h.omega * t), math.sin(h.omega * t))
    d_rx = -0.5 * dgp * t * envelope * 2.0 * phase.real
    d_ry = 0.5 * dgp * t * envelope * 2.0 * (1j * phase).real
    decay = math.exp(-gp * t)
    # (gamma_m / gamma_p)' with gamma_m' = 0
    ratio_prime = -gm * dgp / gp**2
    d_rz = -dgp * t * decay * (initial.rz - gm / gp) - math.expm1(-gp * t) * ratio_prime
    return TemperatureDerivative(d_rx, d_ry, d_rz)


def _central_difference(initial, bath, h, t, step):
    lo = BathSpec(bath.temperature - step, bath.gamma, bath.gamma0)
    hi = BathSpec(bath.temperature + step, bath.gamma, bath.gamma0)
    r_lo = propagate_analytic(initial, rates_from_bath(lo, h), h, t).as_array()
    r_hi = propagate_analytic(initial, rates_from_bath(hi, h), h, t).as_array()
    return (r_hi - r_lo) / (2.0 * step)


def dbloch_dT_numeric(
    initial: BlochVector,
    bath: BathSpec,
    h: QubitHamiltonian,
    t: float,
    step: float = 1e-4,
    rtol: float = 1e-3,
) -> TemperatureDerivative:
    """Central difference of the analytic solution in the bath temperature.

    A Richardson comparison against half the step estimates the truncation
    error; if it exceeds ``rtol`` relative to the derivative a
    :class:`FiniteDifferenceWarning` is emitted.
    """
    if not step > 0 or not bath.temperature - step > 0:
        raise ValueError("need step > 0 and T - step > 0")
    initial = _as_bloch(initial)
    coarse = _central_difference(initial, bath, h, t, step)
    fine = _central_difference(initial, bath, h, t, 0.5 * step)
    error = np.max(np.abs(fine - coarse)) / 3.0
    scale = np.max(np.abs(fine))
    if scale > 0 and error > rtol * scale:
        warnings.warn(
            f"finite-difference error estimate {error:.3g} exceeds {rtol:g} relative (step={step:g})",
            FiniteDifferenceWarning,
            stacklevel=2,
        )
    return TemperatureDerivative(*coarse)


def qfi_bloch(state: BlochVector, deriv: TemperatureDerivative) -> float:
    r = _as_bloch(state).as_array()
    d = deriv.as_array()
    radial = float(r @ d)
    purity_gap = 1.0 - float(r @ r)
    value = float(d @ d)
    if radial == 0.0:
        return value
    if purity_gap <= SINGULAR_DENOMINATOR:
        raise SingularStateError("state is pure and r . dr/dT != 0")
    return value + radial**2 / purity_gap


def qfi_closed_form(initial: BlochVector, bath: BathSpec, h: QubitHamiltonian, t: float) -> float:
    """Fully expanded QFI of the analytic solution at time ``t``.

    With ``e = exp(-gamma_p t)``, ``c = exp(-(4 gamma0 + gamma_p) t) |rho_21(0)|^2``
    and ``q = gamma_m / gamma_p``::

        F = (gamma_p')^2 [ t^2 c + (-rz0 t e + q t e - q (1 - e) / gamma_p)^2
                           + (2 t c - A)^2 / (1 - 4c - rz(t)^2) ]
        A = (-rz0^2 + q rz0) t e^2 - (q / gamma_p) rz0 e (1 - e)
            + (-q rz0 + q^2) t e (1 - e) - (q^2 / gamma_p) (1 - e)^2

    where ``(gamma_p')^2 = gamma^2 omega^2 / (4 T^4 sinh^4(omega / 2T))``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    initial = _as_bloch(initial)
    rates = rates_from_bath(bath, h)
    gp, q = rates.gamma_p, rates.gamma_m / rates.gamma_p
    rz0 = initial.rz
    e = math.exp(-gp * t)
    one_minus_e = -math.expm1(-gp * t)
    c = math.exp(-(4.0 * rates.gamma0 + gp) * t) * abs(initial.coherence) ** 2
    rz_t = rz0 * e + q * one_minus_e

    a = (
        (-(rz0**2) + q * rz0) * t * e**2
        - (q / gp) * rz0 * e * one_minus_e
        + (-q * rz0 + q**2) * t * e * one_minus_e
        - (q**2 / gp) * one_minus_e**2
    )
    transverse = t**2 * c
    longitudinal = (-rz0 * t * e + q * t * e - q * one_minus_e / gp) ** 2
    numerator = (2.0 * t * c - a) ** 2
    denominator = 1.0 - (4.0 * c + rz_t**2)
    if numerator == 0.0:
        radial = 0.0
    elif denominator < SINGULAR_DENOMINATOR:
        raise SingularStateError(f"1 - |r|^2 = {denominator:.3g}")
    else:
        radial = numerator / denominator
    prefactor = gamma_p_temperature_derivative(bath, h) ** 2
    return prefactor * (transverse + longitudinal + radial)


def thermal_qfi(bath: BathSpec, h: QubitHamiltonian) -> float:
    """Equilibrium QFI ``omega^2 / (4 T^4 cosh^2(omega / 2T))``, i.e. ``C / T^2``."""
    x = 0.5 * h.omega / bath.temperature
    if x > 350.0:
        return 0.0
    return h.omega**2 / (4.0 * bath.temperature**4 * math.cosh(x) ** 2)


def qcrb_variance_bound(qfi: float, n_measurements: int = 1) -> float:
    """Cramer-Rao floor ``1 / (n F)``; ``math.inf`` when the QFI vanishes."""
    if n_measurements < 1:
        raise ValueError("n_measurements must be >= 1")
    if qfi < 0:
        raise ValueError("QFI must be non-negative")
    if qfi == 0:
        return math.inf
    return 1.0 / (n_measurements * qfi)
