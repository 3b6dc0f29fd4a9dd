"""Fidelity, purity, closed-form fidelity laws and decoherence time."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np
from scipy import optimize

from . import bath as _bath
from .bath import BathSpec, DecoherenceFactors, OhmicSpectrum
from .errors import NoRootError, NumericalError, UnsupportedModelError, ValidationError
from .register import OperatorCoefficients, PureState, check_configuration

IMAG_TOL = 1e-10
ROOT_RTOL = 1e-6

StateLike = Union[PureState, Mapping[Sequence[int], complex]]


@dataclass(frozen=True, eq=False)
class FidelityCurve:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValidationError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(times) <= 0) or np.any(times < 0):
            raise ValidationError("times must be nonnegative and strictly increasing")
        if np.any(values < 0) or np.any(values > 1 + IMAG_TOL):
            raise ValidationError("fidelity values must lie in [0, 1]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def _real_checked(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"{what} has imaginary residue {value.imag:.3e} > {IMAG_TOL}")
    return value.real


def _clamp_unit(x: float) -> float:
    return min(1.0, max(0.0, x))


def fidelity(rho0: OperatorCoefficients, rhot: OperatorCoefficients) -> float:
    """``tr[rho0 rhot]`` for a pure ``rho0``.

    With ``tr(rho_{i,j} rho_{k,l}) = delta_{jk} delta_{il}`` the trace reduces
    to ``sum_{I,J} c0[I,J] ct[J,I]``.
    """
    if rho0.num_qubits != rhot.num_qubits:
        raise ValidationError(
            f"register sizes differ: {rho0.num_qubits} vs {rhot.num_qubits}")
    value = complex(np.sum(np.asarray(rho0.coeffs) * np.asarray(rhot.coeffs).T))
    return _clamp_unit(_real_checked(value, "fidelity"))


def purity(rho: OperatorCoefficients) -> float:
    value = complex(np.sum(np.asarray(rho.coeffs) * np.asarray(rho.coeffs).T))
    return _real_checked(value, "purity")


def _support_arrays(psi: StateLike):
    """Nonzero configurations as a ``(n, L)`` label array and their probabilities."""
    if isinstance(psi, PureState):
        support = psi.support()
    else:
        support = {check_configuration(k): complex(v) for k, v in psi.items() if v != 0}
        if not support:
            raise ValidationError("state has empty support")
        lengths = {len(k) for k in support}
        if len(lengths) != 1:
            raise ValidationError("configurations have different lengths")
        norm = sum(abs(v) ** 2 for v in support.values())
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"state is not normalized: sum |c|^2 = {norm!r}")
    labels = np.array(list(support.keys()), dtype=np.int64)
    probs = np.abs(np.array(list(support.values()))) ** 2
    return labels, probs


def fidelity_collective_closed_form(psi: StateLike, factors: DecoherenceFactors) -> float:
    """Fidelity under the collective map, summed over ``psi``'s support only.

    The double sum depends on configurations only through their label sums,
    so it is accumulated over sector weights.  ``psi`` may be a
    :class:`PureState` or a ``{configuration: amplitude}`` mapping; the latter
    allows registers beyond the dense cap (e.g. a 64-qubit GHZ state).
    """
    labels, probs = _support_arrays(psi)
    sums = labels.sum(axis=1)
    sectors, inverse = np.unique(sums, return_inverse=True)
    weights = np.bincount(inverse.ravel(), weights=probs, minlength=sectors.size)
    m = sectors.astype(float)
    d = m[:, None] - m[None, :]
    phase = m[:, None] ** 2 - m[None, :] ** 2
    terms = (weights[:, None] * weights[None, :]
             * np.exp(-factors.eta * d * d) * np.exp(1j * factors.delta_phi * phase))
    return _clamp_unit(_real_checked(complex(terms.sum()), "collective fidelity"))


def fidelity_independent_closed_form(psi: StateLike, factors: DecoherenceFactors) -> float:
    """Fidelity under independent baths; does not depend on ``delta_phi``."""
    labels, probs = _support_arrays(psi)
    n_qubits = labels.shape[1]
    # sum_l (i_l - j_l)^2 = 2L - 2 i.j for +/-1 labels
    d2 = 2 * n_qubits - 2 * (labels @ labels.T)
    value = float(probs @ np.exp(-factors.eta * d2) @ probs)
    return _clamp_unit(value)


def purity_closed_form(psi: StateLike, kind: str, factors: DecoherenceFactors) -> float:
    """``tr(rho_t^2)`` after the channel, from the support of a pure input.

    ``|factor|^2`` equals the factor at doubled ``eta`` and zero phase, so the
    fidelity sums are reused.
    """
    doubled = DecoherenceFactors(factors.time, 2 * factors.eta, 0.0)
    if str(getattr(kind, "value", kind)) == "collective":
        return fidelity_collective_closed_form(psi, doubled)
    return fidelity_independent_closed_form(psi, doubled)


def fidelity_curve(psi: StateLike, kind: str, bath: BathSpec, times: Sequence[float]) -> FidelityCurve:
    closed = (fidelity_collective_closed_form if str(getattr(kind, "value", kind)) == "collective"
              else fidelity_independent_closed_form)
    values = [closed(psi, _bath.factors(bath, t)) for t in times]
    return FidelityCurve(np.asarray(times, dtype=float), np.asarray(values))


def decoherence_time(bath: BathSpec, t_max: float | None = None) -> float:
    """Time at which the damping exponent reaches 1, ``eta(t*) = 1``.

    For ``T >> omega_c`` and weak enough coupling that ``t* >> 1/omega_c``
    this approaches ``1 / (pi epsilon^2 T)``.  Outside that regime (strong
    coupling, where ``t*`` falls in the quadratic onset ``eta ~ epsilon^2 T
    t^2``) the numeric root is returned as is.
    """
    spec = bath.spectral
    if not isinstance(spec, OhmicSpectrum):
        raise UnsupportedModelError("decoherence_time is defined for ohmic baths")
    if t_max is None:
        t_max = 1e4 / spec.omega_c

    def g(t):
        return _bath.eta(bath, t) - 1.0

    # Bracket by doubling from a point well inside the onset region.
    lo = 1e-3 / spec.omega_c
    while g(lo) > 0:
        lo /= 16
        if lo < 1e-300:
            raise NoRootError("eta exceeds 1 at arbitrarily small times")
    hi = 2 * lo
    while g(hi) < 0:
        lo, hi = hi, 2 * hi
        if hi > t_max:
            raise NoRootError(
                f"eta stays below 1 up to t = {t_max:.3g}; no decoherence time in the search window")
    # xtol on t far tighter than ROOT_RTOL so eta(t*) = 1 holds to ~1e-9.
    root = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=1e-13, maxiter=200)
    if abs(g(root)) > ROOT_RTOL:
        raise NumericalError(f"root polish failed: eta(t*) - 1 = {g(root):.3e}")
    return float(root)


def asymptotic_decoherence_rate(bath: BathSpec, t: float) -> float:
    """Numerical late-time slope ``(eta(2t) - eta(t)) / t``.

    For a hard-cutoff ohmic bath at ``T > 0`` this tends to ``pi epsilon^2 T``.
    """
    if t <= 0:
        raise ValidationError("t must be positive")
    return (_bath.eta(bath, 2 * t) - _bath.eta(bath, t)) / t


def ghz_support(num_qubits: int) -> dict:
    """``(|+...+> + |-...->)/sqrt(2)`` as a mapping, usable at any register size."""
    amp = 1 / math.sqrt(2)
    return {(1,) * num_qubits: amp, (-1,) * num_qubits: amp}
