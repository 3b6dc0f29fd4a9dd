"""L-qubit register states in the product operator basis.

Label convention
----------------
Every qubit carries a label ``i`` in ``{+1, -1}``.  Label ``i`` denotes the
sigma_z eigenvalue ``-i``, so that ``sigma_z rho_{i,j} = -i rho_{i,j}`` and
``rho_{i,j} sigma_z = -j rho_{i,j}`` hold literally.  The single-qubit basis is

    rho_{-1,-1} = (I + sigma_z) / 2      rho_{+1,+1} = (I - sigma_z) / 2
    rho_{-1,+1} = sigma_+                rho_{+1,-1} = sigma_-

and the register basis is the tensor product over qubits.  Dense matrices use
the sigma_z = +1 first ordering, i.e. label -1 is row/column 0.

Index layout
------------
Label +1 maps to bit 1 and label -1 to bit 0; qubit 1 is the most significant
bit.  A configuration index is therefore ``sum_l bit(i_l) 2**(L - l)``.  The
coefficient tensor of an :class:`OperatorCoefficients` is held as a
``(2**L, 2**L)`` array addressed by ``(index({i}), index({j}))``; the
per-qubit interleaved layout (two bits per qubit, qubit 1 most significant)
is available through :meth:`OperatorCoefficients.flat`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import SizeError, ValidationError

L_MAX = 12
DENSE_L_MAX = 6
TOL = 1e-12

Configuration = Tuple[int, ...]

_SZ = np.diag([1.0, -1.0]).astype(complex)
_ID = np.eye(2, dtype=complex)
_SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)
_SMINUS = _SPLUS.T.copy()

# BASIS[b(i), b(j)] is the 2x2 matrix rho_{i,j}; b(+1) = 1, b(-1) = 0.
BASIS = np.empty((2, 2, 2, 2), dtype=complex)
BASIS[0, 0] = (_ID + _SZ) / 2
BASIS[1, 1] = (_ID - _SZ) / 2
BASIS[0, 1] = _SPLUS
BASIS[1, 0] = _SMINUS


def label_to_bit(label: int) -> int:
    return 1 if label == 1 else 0


def check_configuration(config: Iterable[int], num_qubits: int | None = None) -> Configuration:
    """Return ``config`` as a tuple of ints, raising if a label is not +/-1."""
    labels = tuple(int(x) for x in config)
    if not labels:
        raise ValidationError("configuration must contain at least one label")
    if any(x not in (1, -1) for x in labels):
        raise ValidationError(f"labels must be +1 or -1, got {labels}")
    if num_qubits is not None and len(labels) != num_qubits:
        raise ValidationError(
            f"configuration has {len(labels)} labels, register has {num_qubits}")
    return labels


def config_index(config: Sequence[int]) -> int:
    idx = 0
    for label in config:
        idx = (idx << 1) | label_to_bit(label)
    return idx


def index_config(index: int, num_qubits: int) -> Configuration:
    return tuple(1 if (index >> (num_qubits - 1 - q)) & 1 else -1
                 for q in range(num_qubits))


def configurations(num_qubits: int) -> np.ndarray:
    """All ``2**L`` configurations as an int array of shape ``(2**L, L)``, index order."""
    idx = np.arange(2 ** num_qubits)
    shifts = np.arange(num_qubits - 1, -1, -1)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return (2 * bits - 1).astype(np.int64)


def sector_sums(num_qubits: int) -> np.ndarray:
    """Label sum ``sum_l i_l`` for every configuration index."""
    return configurations(num_qubits).sum(axis=1)


def parse_config_string(text: str) -> Configuration:
    """Parse ``"+-+"`` (ASCII or Unicode minus) into ``(1, -1, 1)``."""
    text = text.strip().replace("−", "-")
    if not text or any(ch not in "+-" for ch in text):
        raise ValidationError(f"configuration string must consist of '+' and '-', got {text!r}")
    return tuple(1 if ch == "+" else -1 for ch in text)


def format_config(config: Sequence[int]) -> str:
    return "".join("+" if x == 1 else "-" for x in config)


def _check_size(num_qubits: int, cap: int = L_MAX) -> None:
    if num_qubits < 1:
        raise ValidationError(f"register needs at least one qubit, got {num_qubits}")
    if num_qubits > cap:
        raise SizeError(f"{num_qubits} qubits exceeds the cap of {cap}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitudes over the ``2**L`` configurations, in index order."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_size(self.num_qubits)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (2 ** self.num_qubits,):
            raise ValidationError(
                f"expected {2 ** self.num_qubits} amplitudes, got {amps.shape[0]}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > TOL:
            raise ValidationError(f"state is not normalized: sum |c|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, config: Sequence[int]) -> PureState:
        config = check_configuration(config)
        amps = np.zeros(2 ** len(config), dtype=complex)
        amps[config_index(config)] = 1.0
        return cls(len(config), amps)

    @classmethod
    def from_mapping(cls, amplitudes: Mapping[Sequence[int], complex],
                     normalize: bool = False) -> PureState:
        """Build from ``{configuration: amplitude}``; all keys must have equal length."""
        if not amplitudes:
            raise ValidationError("no amplitudes given")
        keys = [check_configuration(k) for k in amplitudes]
        n = len(keys[0])
        _check_size(n)
        amps = np.zeros(2 ** n, dtype=complex)
        for key, value in zip(keys, amplitudes.values()):
            if len(key) != n:
                raise ValidationError("configurations have different lengths")
            amps[config_index(key)] += complex(value)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> PureState:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or 2 ** n != amps.size:
            raise ValidationError(f"amplitude count {amps.size} is not a power of two")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValidationError("zero vector cannot be normalized")
        return cls(n, amps / norm)

    def amplitude(self, config: Sequence[int]) -> complex:
        config = check_configuration(config, self.num_qubits)
        return complex(self.amplitudes[config_index(config)])

    def support(self, tol: float = 0.0) -> dict[Configuration, complex]:
        """Configurations with ``|amplitude| > tol``."""
        nz = np.flatnonzero(np.abs(self.amplitudes) > tol)
        return {index_config(int(k), self.num_qubits): complex(self.amplitudes[k]) for k in nz}


@dataclass(frozen=True, eq=False)
class OperatorCoefficients:
    """Density operator as coefficients ``c({i},{j})`` of the product basis.

    ``coeffs[I, J]`` multiplies ``rho_{{i},{j}}`` where ``I``/``J`` are the
    configuration indices of ``{i}``/``{j}``.  Hermiticity and unit trace are
    checked on construction unless ``check=False``.
    """

    num_qubits: int
    coeffs: np.ndarray
    check: bool = True

    def __post_init__(self):
        _check_size(self.num_qubits)
        dim = 2 ** self.num_qubits
        c = _frozen(self.coeffs)
        if c.shape != (dim, dim):
            raise ValidationError(f"expected coefficient array of shape {(dim, dim)}, got {c.shape}")
        object.__setattr__(self, "coeffs", c)
        if self.check:
            self.validate()

    def validate(self, tol: float = TOL) -> None:
        herm = float(np.max(np.abs(self.coeffs - self.coeffs.conj().T)))
        if herm > tol:
            raise ValidationError(f"coefficients are not Hermitian (residual {herm:.3e})")
        tr = complex(np.trace(self.coeffs))
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"trace is {tr!r}, expected 1")

    def coeff(self, config_i: Sequence[int], config_j: Sequence[int]) -> complex:
        ci = check_configuration(config_i, self.num_qubits)
        cj = check_configuration(config_j, self.num_qubits)
        return complex(self.coeffs[config_index(ci), config_index(cj)])

    def trace(self) -> complex:
        return complex(np.trace(self.coeffs))

    def flat(self) -> np.ndarray:
        """Interleaved layout: qubit l contributes bits ``(b(i_l), b(j_l))``, qubit 1 first."""
        n = self.num_qubits
        t = np.asarray(self.coeffs).reshape((2,) * (2 * n))
        order = [ax for q in range(n) for ax in (q, n + q)]
        return t.transpose(order).reshape(-1).copy()

    @classmethod
    def from_flat(cls, num_qubits: int, flat: np.ndarray, check: bool = True) -> OperatorCoefficients:
        n = num_qubits
        t = np.asarray(flat, dtype=complex).reshape((2,) * (2 * n))
        inverse = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
        return cls(n, t.transpose(inverse).reshape(2 ** n, 2 ** n), check=check)


def from_pure_state(psi: PureState) -> OperatorCoefficients:
    a = psi.amplitudes
    return OperatorCoefficients(psi.num_qubits, np.outer(a, a.conj()))


def to_matrix(rho: OperatorCoefficients) -> np.ndarray:
    """Dense ``2**L x 2**L`` matrix ``sum c({i},{j}) rho_{{i},{j}}``."""
    n = rho.num_qubits
    if n > DENSE_L_MAX:
        raise SizeError(f"dense matrices are capped at {DENSE_L_MAX} qubits, got {n}")
    # Contract one qubit's (i, j) pair into its (row, col) pair at a time.
    t = np.asarray(rho.coeffs).reshape((2,) * (2 * n))
    for q in range(n):
        t = np.tensordot(t, BASIS, axes=([q, n + q], [0, 1]))
        t = np.moveaxis(t, [-2, -1], [q, n + q])
    return t.reshape(2 ** n, 2 ** n)


def from_matrix(m: np.ndarray, check: bool = True) -> OperatorCoefficients:
    """Inverse of :func:`to_matrix` via trace pairing with the dual basis.

    The dual of ``rho_{i,j}`` is ``rho_{j,i}`` since ``tr(rho_{j,i} rho_{k,l})
    = delta_{ik} delta_{jl}`` per qubit.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise ValidationError(f"matrix dimension {dim} is not a power of two")
    if n > DENSE_L_MAX:
        raise SizeError(f"dense matrices are capped at {DENSE_L_MAX} qubits, got {n}")
    # dual[b(i), b(j)] = rho_{j,i}; pairing tr(dual . m) = sum_{rc} dual[c, r] m[r, c]
    dual = BASIS.transpose(1, 0, 3, 2)
    t = m.reshape((2,) * (2 * n))
    for q in range(n):
        t = np.tensordot(t, dual, axes=([q, n + q], [2, 3]))
        t = np.moveaxis(t, [-2, -1], [q, n + q])
    return OperatorCoefficients(n, t.reshape(dim, dim), check=check)
