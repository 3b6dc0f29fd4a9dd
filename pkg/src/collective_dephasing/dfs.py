"""Coherence-preserving sectors, code efficiency and the two-qubit pair code.

A state whose support lies in one sector ``A_m = {i : sum_l i_l = m}`` is left
exactly unchanged by the collective map.  The pair code maps logical
``|+1> -> |+1,-1>`` and ``|-1> -> |-1,+1>``; logical qubit ``l`` (0-based)
occupies physical qubits ``2l`` and ``2l + 1``.

Gate conventions (0-based qubit indices, qubit 0 most significant):

* ``Not(q)`` negates the label of qubit ``q``;
* ``CNot(c, t)`` negates the label of ``t`` iff qubit ``c`` has label -1,
  i.e. ``(c, t) -> (c, t')``:
  ``(+1,+1)->(+1,+1)``, ``(+1,-1)->(+1,-1)``, ``(-1,+1)->(-1,-1)``, ``(-1,-1)->(-1,+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DecodeError, SizeError, ValidationError
from .register import L_MAX, PureState, check_configuration, configurations

DECODE_TOL = 1e-10


def sector_sum(config: Sequence[int]) -> int:
    return int(sum(check_configuration(config)))


@dataclass(frozen=True)
class Sector:
    num_qubits: int
    m: int

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValidationError("num_qubits must be positive")
        if abs(self.m) > self.num_qubits or (self.m - self.num_qubits) % 2:
            raise ValidationError(
                f"m={self.m} is not a valid label sum for {self.num_qubits} qubits")

    def configurations(self) -> np.ndarray:
        labels = configurations(self.num_qubits)
        return labels[labels.sum(axis=1) == self.m]

    @property
    def dimension(self) -> int:
        return sector_dimension(self.num_qubits, self.m)


def valid_sector_sums(num_qubits: int) -> list[int]:
    return list(range(-num_qubits, num_qubits + 1, 2))


def is_coherence_preserving(psi: PureState, tol: float = 1e-12) -> Tuple[bool, Optional[int]]:
    """``(True, m)`` if all amplitudes above ``tol`` share the label sum ``m``."""
    labels = configurations(psi.num_qubits)
    mask = np.abs(psi.amplitudes) > tol
    sums = np.unique(labels[mask].sum(axis=1))
    if sums.size == 1:
        return True, int(sums[0])
    return False, None


def sector_dimension(num_qubits: int, m: int) -> int:
    if num_qubits < 0 or abs(m) > num_qubits or (num_qubits + m) % 2:
        return 0
    return math.comb(num_qubits, (num_qubits + m) // 2)


def efficiency(num_qubits: int) -> Tuple[float, float]:
    """Rate of a code using all of ``S_0`` on ``2L`` physical qubits.

    Returns ``(exact, approximate)``: ``log2 C(2L, L) / 2L`` and the large-L
    form ``1 - log2(pi L) / 4L``.
    """
    L = int(num_qubits)
    if L < 1:
        raise ValidationError(f"L must be positive, got {num_qubits!r}")
    exact = math.log2(math.comb(2 * L, L)) / (2 * L)
    approx = 1 - math.log2(math.pi * L) / (4 * L)
    return exact, approx


def _pair_code_indices(num_logical: int) -> np.ndarray:
    """Physical configuration index of the codeword for each logical index."""
    logical = np.arange(2 ** num_logical)
    physical = np.zeros_like(logical)
    for q in range(num_logical):
        bit = (logical >> (num_logical - 1 - q)) & 1
        # label i -> (i, -i): bits (b, 1 - b)
        physical = (physical << 2) | (bit << 1) | (1 - bit)
    return physical


def encode(psi: PureState) -> PureState:
    n = psi.num_qubits
    if 2 * n > L_MAX:
        raise SizeError(f"encoding {n} qubits needs {2 * n} > {L_MAX} physical qubits")
    out = np.zeros(4 ** n, dtype=complex)
    out[_pair_code_indices(n)] = psi.amplitudes
    return PureState(2 * n, out)


def decode(phi: PureState, tol: float = DECODE_TOL) -> PureState:
    if phi.num_qubits % 2:
        raise ValidationError(f"pair-code states have an even qubit count, got {phi.num_qubits}")
    n = phi.num_qubits // 2
    idx = _pair_code_indices(n)
    inside = phi.amplitudes[idx]
    leaked = max(0.0, 1.0 - float(np.sum(np.abs(inside) ** 2)))
    if leaked > tol:
        raise DecodeError(f"state has weight {leaked:.3e} outside the pair-code image", leaked)
    return PureState(n, inside / np.linalg.norm(inside))


@dataclass(frozen=True)
class Not:
    target: int


@dataclass(frozen=True)
class CNot:
    control: int
    target: int


Gate = Union[Not, CNot]


@dataclass(frozen=True)
class GateCircuit:
    num_qubits: int
    gates: Tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            wires = (g.target,) if isinstance(g, Not) else (g.control, g.target)
            if any(not 0 <= w < self.num_qubits for w in wires):
                raise ValidationError(f"{g} acts outside a {self.num_qubits}-qubit register")
            if isinstance(g, CNot) and g.control == g.target:
                raise ValidationError(f"{g} uses the same qubit as control and target")

    def reversed(self) -> GateCircuit:
        return GateCircuit(self.num_qubits, self.gates[::-1])


@dataclass(frozen=True)
class PairCode:
    logical_qubits: int

    @property
    def physical_qubits(self) -> int:
        return 2 * self.logical_qubits

    def circuit(self) -> GateCircuit:
        return encoding_circuit(self.logical_qubits)


def encoding_circuit(num_logical: int) -> GateCircuit:
    """Pair-code encoder acting on data qubits interleaved with ancillas.

    Each ancilla (physical ``2l + 1``) starts with label -1.  One CNOT from
    the data qubit does the job: data +1 leaves the ancilla at -1, data -1
    flips it to +1.
    """
    gates = [CNot(2 * l, 2 * l + 1) for l in range(num_logical)]
    return GateCircuit(2 * num_logical, gates)


def interleave_ancillas(psi: PureState) -> PureState:
    """``psi`` with a label -1 ancilla inserted after every qubit."""
    n = psi.num_qubits
    if 2 * n > L_MAX:
        raise SizeError(f"{2 * n} physical qubits exceeds the cap of {L_MAX}")
    logical = np.arange(2 ** n)
    physical = np.zeros_like(logical)
    for q in range(n):
        bit = (logical >> (n - 1 - q)) & 1
        physical = (physical << 2) | (bit << 1)
    out = np.zeros(4 ** n, dtype=complex)
    out[physical] = psi.amplitudes
    return PureState(2 * n, out)


def apply_circuit(circuit: GateCircuit, psi: PureState) -> PureState:
    """Run a NOT/CNOT circuit; each gate permutes basis amplitudes."""
    n = psi.num_qubits
    if circuit.num_qubits != n:
        raise ValidationError(f"circuit is for {circuit.num_qubits} qubits, state has {n}")
    idx = np.arange(2 ** n)
    amps = np.array(psi.amplitudes)
    for g in circuit.gates:
        t_mask = 1 << (n - 1 - g.target)
        if isinstance(g, Not):
            dest = idx ^ t_mask
        else:
            c_mask = 1 << (n - 1 - g.control)
            # label -1 is bit 0
            dest = np.where(idx & c_mask, idx, idx ^ t_mask)
        new = np.empty_like(amps)
        new[dest] = amps
        amps = new
    return PureState(n, amps)
