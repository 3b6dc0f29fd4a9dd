"""Bosonic environment: spectral models, thermal occupation and decoherence factors.

Natural units (hbar = k_B = 1) throughout.  An ohmic bath has
``kappa(omega)**2 = epsilon**2 * omega`` below the cutoff.  The two
time-dependent quantities are

    eta(t)       = int kappa^2 * 4 sin^2(omega t / 2) / omega^2 * (<N> + 1/2)
    delta_phi(t) = int kappa^2 * (omega t - sin(omega t)) / omega^2

For a discrete bath the integrals are finite sums over modes.

Because of the vacuum 1/2 in ``eta``, damping is nonzero at zero
temperature; for an ohmic bath at T = 0 it grows like ``epsilon**2 *
log(omega_c t)`` at late times.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError, UnsupportedModelError, ValidationError

QUAD_RTOL = 1e-9
# Below this value of omega*t the small-argument series replace the raw formulas.
SMALL_ARG = 1e-6
# Exponential cutoff integrals stop at this multiple of omega_c (weight e^-60).
EXP_CUTOFF_SPAN = 60.0
# Upper edge of the discretization grid for exponential cutoffs, in units of omega_c.
EXP_GRID_SPAN = 20.0


@dataclass(frozen=True)
class OhmicSpectrum:
    """``kappa^2(omega) = epsilon^2 omega`` with a hard or exponential cutoff."""

    epsilon: float
    omega_c: float
    cutoff_shape: str = "hard"

    def __post_init__(self):
        for name in ("epsilon", "omega_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be finite and positive, got {value!r}")
        if self.cutoff_shape not in ("hard", "exponential"):
            raise ValidationError(
                f"cutoff_shape must be 'hard' or 'exponential', got {self.cutoff_shape!r}")

    def coupling_sq(self, omega):
        omega = np.asarray(omega, dtype=float)
        k2 = self.epsilon ** 2 * omega
        if self.cutoff_shape == "hard":
            return np.where(omega <= self.omega_c, k2, 0.0)
        return k2 * np.exp(-omega / self.omega_c)

    def weight(self, omega):
        """Cutoff weight multiplying ``epsilon^2 omega``."""
        if self.cutoff_shape == "hard":
            return np.ones_like(np.asarray(omega, dtype=float))
        return np.exp(-np.asarray(omega, dtype=float) / self.omega_c)


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Finite set of modes ``(kappa_k, omega_k)``."""

    modes: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        modes = tuple((float(k), float(w)) for k, w in self.modes)
        if not modes:
            raise ValidationError("a discrete spectrum needs at least one mode")
        for k, w in modes:
            if not (math.isfinite(k) and k >= 0):
                raise ValidationError(f"mode coupling must be finite and >= 0, got {k!r}")
            if not (math.isfinite(w) and w > 0):
                raise ValidationError(f"mode frequency must be finite and > 0, got {w!r}")
        object.__setattr__(self, "modes", modes)

    @property
    def kappas(self) -> np.ndarray:
        return np.array([k for k, _ in self.modes])

    @property
    def omegas(self) -> np.ndarray:
        return np.array([w for _, w in self.modes])


SpectralModel = Union[OhmicSpectrum, DiscreteSpectrum]


@dataclass(frozen=True)
class BathSpec:
    spectral: SpectralModel
    temperature: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.temperature) and self.temperature >= 0):
            raise ValidationError(f"temperature must be finite and >= 0, got {self.temperature!r}")
        if not isinstance(self.spectral, (OhmicSpectrum, DiscreteSpectrum)):
            raise ValidationError(f"unknown spectral model {self.spectral!r}")


@dataclass(frozen=True)
class DecoherenceFactors:
    """``eta`` and ``delta_phi`` at one time.

    Factors add: evolving with ``f1`` then ``f2`` equals one application of
    ``f1 + f2``.
    """

    time: float
    eta: float
    delta_phi: float

    def __post_init__(self):
        if self.eta < 0:
            raise ValidationError(f"eta must be >= 0, got {self.eta!r}")

    def __add__(self, other: DecoherenceFactors) -> DecoherenceFactors:
        if not isinstance(other, DecoherenceFactors):
            return NotImplemented
        return DecoherenceFactors(self.time + other.time, self.eta + other.eta,
                                  self.delta_phi + other.delta_phi)


def mean_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(omega/T) - 1)``; 0 at T = 0."""
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = omega / temperature
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def _occupation_plus_half_times_omega(omega, temperature):
    """``omega * (<N> + 1/2) = (omega/2) coth(omega / 2T)``, finite at omega -> 0."""
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        return omega / 2
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        x = omega / (2 * temperature)
        return np.where(x < SMALL_ARG, temperature * (1.0 + x * x / 3.0), (omega / 2) / np.tanh(x))


def _damping_kernel(omega, t):
    """``4 sin^2(omega t / 2) / (omega t)^2``; times ``t^2`` gives the eta kernel."""
    return np.sinc(np.asarray(omega, dtype=float) * t / (2 * np.pi)) ** 2


def _phase_kernel(omega, t):
    """``(omega t - sin(omega t)) / (omega^2 t^3)``; times ``t^3`` gives the phase kernel.

    Written as ``omega * (x - sin x) / x^3`` with ``x = omega t`` and the
    series ``1/6 - x^2/120 + x^4/5040`` for small ``x``.
    """
    omega = np.asarray(omega, dtype=float)
    x = omega * t
    small = x < 1e-2
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = (x - np.sin(x)) / x ** 3
    series = 1 / 6 - x * x / 120 + x ** 4 / 5040
    return omega * np.where(small, series, raw)


def _check_time(t: float) -> None:
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and >= 0, got {t!r}")


def _integrate(f: Callable[[float], float], upper: float, t: float, what: str) -> float:
    """Adaptive quadrature of ``f`` on ``[0, upper]`` split at the oscillation period."""
    period = 2 * np.pi / t if t > 0 else upper
    pieces = int(min(max(1, math.ceil(upper / period)), 4000))
    edges = np.linspace(0.0, upper, pieces + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, abserr = integrate.quad(f, a, b, epsrel=QUAD_RTOL, epsabs=0.0, limit=200)
            except integrate.IntegrationWarning as exc:
                raise NumericalError(
                    f"{what}: quadrature failed on [{a:.6g}, {b:.6g}] at t={t!r}: {exc}") from exc
        if not math.isfinite(value):
            raise NumericalError(f"{what}: non-finite quadrature result on [{a:.6g}, {b:.6g}]")
        total += value
    return total


def _upper_limit(spec: OhmicSpectrum) -> float:
    return spec.omega_c if spec.cutoff_shape == "hard" else EXP_CUTOFF_SPAN * spec.omega_c


def eta(bath: BathSpec, t: float) -> float:
    """Phase-damping exponent at time ``t``."""
    _check_time(t)
    if t == 0:
        return 0.0
    spec, T = bath.spectral, bath.temperature
    if isinstance(spec, DiscreteSpectrum):
        w = spec.omegas
        terms = spec.kappas ** 2 * _damping_kernel(w, t) * _occupation_plus_half_times_omega(w, T) / w
        return float(t * t * np.sum(terms))
    if not isinstance(spec, OhmicSpectrum):
        raise UnsupportedModelError(f"unsupported spectral model {spec!r}")

    # kappa^2 / omega = epsilon^2 * weight, so omega*(<N>+1/2) carries the 1/omega.
    eps2 = spec.epsilon ** 2

    def integrand(w):
        return float(eps2 * spec.weight(w) * _damping_kernel(w, t)
                     * _occupation_plus_half_times_omega(w, T))

    return max(0.0, t * t * _integrate(integrand, _upper_limit(spec), t, "eta"))


def delta_phi(bath: BathSpec, t: float) -> float:
    """Lamb phase shift at time ``t``.  Temperature independent."""
    _check_time(t)
    if t == 0:
        return 0.0
    spec = bath.spectral
    if isinstance(spec, DiscreteSpectrum):
        return float(t ** 3 * np.sum(spec.kappas ** 2 * _phase_kernel(spec.omegas, t)))
    if not isinstance(spec, OhmicSpectrum):
        raise UnsupportedModelError(f"unsupported spectral model {spec!r}")

    def integrand(w):
        return float(spec.coupling_sq(w) * _phase_kernel(w, t))

    return t ** 3 * _integrate(integrand, _upper_limit(spec), t, "delta_phi")


def factors(bath: BathSpec, t: float) -> DecoherenceFactors:
    return DecoherenceFactors(float(t), eta(bath, t), delta_phi(bath, t))


def eta_high_temperature_slope(bath: BathSpec) -> float:
    """Late-time growth rate ``pi epsilon^2 T`` of ``eta`` for an ohmic bath.

    Only meaningful when ``T >> omega_c`` and ``t >> 1/omega_c``.
    """
    spec = bath.spectral
    if not isinstance(spec, OhmicSpectrum):
        raise UnsupportedModelError("the high-temperature slope is defined for ohmic baths only")
    return math.pi * spec.epsilon ** 2 * bath.temperature


def discretize(bath: BathSpec, num_modes: int) -> BathSpec:
    """Midpoint-rule discretization of an ohmic bath into ``num_modes`` modes.

    Hard cutoff: ``omega_k = (k - 1/2) omega_c / n`` on ``[0, omega_c]``.
    Exponential cutoff: the same rule on ``[0, 20 omega_c]`` with the
    ``exp(-omega/omega_c)`` weight folded into ``kappa_k``.
    """
    spec = bath.spectral
    if not isinstance(spec, OhmicSpectrum):
        raise UnsupportedModelError("only ohmic baths can be discretized")
    if int(num_modes) != num_modes or num_modes < 1:
        raise ValidationError(f"num_modes must be a positive integer, got {num_modes!r}")
    span = spec.omega_c if spec.cutoff_shape == "hard" else EXP_GRID_SPAN * spec.omega_c
    dw = span / num_modes
    w = (np.arange(1, num_modes + 1) - 0.5) * dw
    k2 = spec.epsilon ** 2 * w * dw * spec.weight(w)
    modes = tuple((float(math.sqrt(k)), float(x)) for k, x in zip(k2, w))
    return BathSpec(DiscreteSpectrum(modes), bath.temperature)


def as_discrete(modes: Sequence[Tuple[float, float]], temperature: float = 0.0) -> BathSpec:
    return BathSpec(DiscreteSpectrum(tuple(modes)), temperature)
