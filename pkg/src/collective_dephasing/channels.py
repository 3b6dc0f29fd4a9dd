"""Exact collective and independent dephasing maps on operator coefficients.

Both maps multiply each coefficient ``c({i},{j})`` by a scalar:

* collective (one shared bath):
  ``exp(-eta D^2) exp(i delta_phi (S_i^2 - S_j^2))`` with ``D = S_i - S_j``
  and ``S = sum_l i_l``;
* independent (identical private baths):
  ``exp(-eta sum_l (i_l - j_l)^2)``, no phase because ``i_l^2 = j_l^2``.
"""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from .bath import DecoherenceFactors
from .errors import ValidationError
from .register import OperatorCoefficients, configurations, check_configuration


class ChannelKind(str, enum.Enum):
    COLLECTIVE = "collective"
    INDEPENDENT = "independent"


def _pair(config_i: Sequence[int], config_j: Sequence[int]):
    ci = check_configuration(config_i)
    cj = check_configuration(config_j)
    if len(ci) != len(cj):
        raise ValidationError(f"configuration lengths differ: {len(ci)} vs {len(cj)}")
    return ci, cj


def collective_factor(config_i, config_j, factors: DecoherenceFactors) -> complex:
    ci, cj = _pair(config_i, config_j)
    s_i, s_j = sum(ci), sum(cj)
    d = s_i - s_j
    return complex(np.exp(-factors.eta * d * d) * np.exp(1j * factors.delta_phi * (s_i * s_i - s_j * s_j)))


def independent_factor(config_i, config_j, factors: DecoherenceFactors) -> complex:
    ci, cj = _pair(config_i, config_j)
    d2 = sum((a - b) ** 2 for a, b in zip(ci, cj))
    return complex(np.exp(-factors.eta * d2))


def collective_kernel(num_qubits: int, factors: DecoherenceFactors) -> np.ndarray:
    """Factor matrix over configuration-index pairs for the collective map."""
    sums = configurations(num_qubits).sum(axis=1)
    # One transcendental call per distinct (S_i, S_j), then gather.
    values = np.arange(-num_qubits, num_qubits + 1)
    d = values[:, None] - values[None, :]
    phase = values[:, None] ** 2 - values[None, :] ** 2
    table = np.exp(-factors.eta * d * d) * np.exp(1j * factors.delta_phi * phase)
    pos = sums + num_qubits
    return table[pos[:, None], pos[None, :]]


def independent_kernel(num_qubits: int, factors: DecoherenceFactors) -> np.ndarray:
    """Factor matrix for the independent map; depends only on Hamming distance."""
    idx = np.arange(2 ** num_qubits)
    xor = idx[:, None] ^ idx[None, :]
    hamming = np.zeros_like(xor)
    for q in range(num_qubits):
        hamming += (xor >> q) & 1
    # each differing qubit contributes (i - j)^2 = 4
    table = np.exp(-factors.eta * 4.0 * np.arange(num_qubits + 1))
    return table[hamming].astype(complex)


def kernel(num_qubits: int, kind: ChannelKind | str, factors: DecoherenceFactors) -> np.ndarray:
    kind = ChannelKind(kind)
    if kind is ChannelKind.COLLECTIVE:
        return collective_kernel(num_qubits, factors)
    return independent_kernel(num_qubits, factors)


def apply(rho: OperatorCoefficients, kind: ChannelKind | str,
          factors: DecoherenceFactors) -> OperatorCoefficients:
    """Evolve ``rho`` through the dephasing map with the given factors."""
    if not isinstance(rho, OperatorCoefficients):
        raise ValidationError(f"expected OperatorCoefficients, got {type(rho).__name__}")
    rho.validate()
    out = np.asarray(rho.coeffs) * kernel(rho.num_qubits, kind, factors)
    return OperatorCoefficients(rho.num_qubits, out)
