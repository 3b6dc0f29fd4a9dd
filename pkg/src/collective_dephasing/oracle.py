"""Brute-force reference: explicit qubits + truncated oscillator bath.

The total Hamiltonian (qubits tensored with the bath, qubits first) is

    H = sum_k [ kappa_k (a_k + a_k^dag) (x) sum_l sigma^z_l + omega_k a_k^dag a_k ].

Every ``sigma^z_l`` is conserved, so ``H`` is block diagonal over qubit
configurations.  A configuration with label sum ``S`` has total
``sigma^z = -S`` and drives the bath with

    H_s = sum_k [ kappa_k s (a_k + a_k^dag) + omega_k a_k^dag a_k ],  s = -S.

Evolving ``|psi> (x) |bath>`` therefore means evolving the bath once per
distinct ``s`` and forming overlaps: ``rho[I, J] = c_I c_J^* <phi_{s_J}|phi_{s_I}>``.
Each block is exponentiated numerically in the joint (N_max + 1)^K Fock space,
with no use of the closed-form solution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from . import bath as _bath
from . import channels
from .errors import SizeError, TruncationWarning, ValidationError
from .register import OperatorCoefficients, PureState, from_pure_state, sector_sums

ORACLE_L_MAX = 4
SECTOR_DIM_MAX = 20000
FULL_DIM_MAX = 4096
DENSE_EIGH_MAX = 2048
TRUNCATION_WARN = 1e-6
RESULT_TOL = 1e-10
MC_BATCH = 4096


@dataclass(frozen=True)
class TruncatedBath:
    """Discrete modes ``(kappa_k, omega_k)`` each truncated at ``fock_cutoff`` quanta."""

    modes: Tuple[Tuple[float, float], ...]
    fock_cutoff: int

    def __post_init__(self):
        spec = _bath.DiscreteSpectrum(tuple(self.modes))
        object.__setattr__(self, "modes", spec.modes)
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ValidationError(f"fock_cutoff must be a positive integer, got {self.fock_cutoff!r}")
        if self.sector_dim > SECTOR_DIM_MAX:
            raise SizeError(
                f"bath dimension {self.sector_dim} exceeds the per-sector cap {SECTOR_DIM_MAX}")

    @property
    def num_modes(self) -> int:
        return len(self.modes)

    @property
    def levels(self) -> int:
        return int(self.fock_cutoff) + 1

    @property
    def sector_dim(self) -> int:
        return self.levels ** self.num_modes

    def spectrum(self, temperature: float = 0.0) -> _bath.BathSpec:
        return _bath.BathSpec(_bath.DiscreteSpectrum(self.modes), temperature)


def recommended_fock_cutoff(num_qubits: int, modes: Sequence[Tuple[float, float]]) -> int:
    """``4 max_k |kappa_k L / omega_k|^2 + 6``, rounded up."""
    scale = max((k * num_qubits / w) ** 2 for k, w in modes)
    return int(math.ceil(4 * scale + 6))


@dataclass(frozen=True, eq=False)
class OracleResult:
    reduced_density: OperatorCoefficients
    truncation_diagnostic: float
    std_error: Optional[np.ndarray] = None
    num_samples: int = 0
    warnings: Tuple[str, ...] = field(default_factory=tuple)


def _check_oracle_size(num_qubits: int) -> None:
    if num_qubits > ORACLE_L_MAX:
        raise SizeError(f"the oracle handles at most {ORACLE_L_MAX} qubits, got {num_qubits}")


def _mode_operators(tb: TruncatedBath):
    """Sparse ``(a_k + a_k^dag)`` and ``a_k^dag a_k`` on the joint bath space, mode 0 first."""
    n = tb.levels
    a = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, format="csr")
    x1 = (a + a.T).tocsr()
    n1 = sp.diags(np.arange(n, dtype=float), format="csr")
    xs, ns = [], []
    for k in range(tb.num_modes):
        left = sp.identity(n ** k, format="csr")
        right = sp.identity(n ** (tb.num_modes - 1 - k), format="csr")
        xs.append(sp.kron(sp.kron(left, x1), right, format="csr"))
        ns.append(sp.kron(sp.kron(left, n1), right, format="csr"))
    return xs, ns


def sector_hamiltonian(tb: TruncatedBath, s: int):
    """Bath Hamiltonian seen by a configuration with total ``sigma^z = s`` (sparse, real)."""
    xs, ns = _mode_operators(tb)
    h = sp.csr_matrix((tb.sector_dim, tb.sector_dim))
    for (kappa, omega), x, num in zip(tb.modes, xs, ns):
        h = h + kappa * s * x + omega * num
    return h.tocsr()


def build_hamiltonian(num_qubits: int, tb: TruncatedBath) -> np.ndarray:
    """Full dense ``H`` on qubits (x) bath, qubit configuration index major."""
    if num_qubits < 1:
        raise ValidationError("need at least one qubit")
    _check_oracle_size(num_qubits)
    total = 2 ** num_qubits * tb.sector_dim
    if total > FULL_DIM_MAX:
        raise SizeError(f"full Hamiltonian dimension {total} exceeds the dense cap {FULL_DIM_MAX}")
    blocks = {}
    for S in np.unique(sector_sums(num_qubits)):
        blocks[int(S)] = sector_hamiltonian(tb, -int(S)).toarray()
    h = scipy.linalg.block_diag(*(blocks[int(S)] for S in sector_sums(num_qubits)))
    return h.astype(complex)


class _SectorPropagator:
    """``exp(-i H_s t)`` applied to columns of a matrix."""

    def __init__(self, h):
        self.h = h
        self.dense = h.shape[0] <= DENSE_EIGH_MAX
        if self.dense:
            self.energies, self.vectors = np.linalg.eigh(h.toarray())

    def evolve(self, b: np.ndarray, times: Sequence[float]) -> list:
        """States at each time; ``b`` has shape (dim,) or (dim, m)."""
        if self.dense:
            coeffs = self.vectors.T @ b
            out = []
            for t in times:
                if t == 0:
                    out.append(np.array(b, dtype=complex))
                    continue
                phase = np.exp(-1j * self.energies * t)
                scaled = phase[:, None] * coeffs if coeffs.ndim == 2 else phase * coeffs
                out.append(self.vectors @ scaled)
            return out
        a = (-1j * self.h).tocsc()
        return [b if t == 0 else expm_multiply(a * t, b.astype(complex)) for t in times]


def _top_level_population(states: np.ndarray, tb: TruncatedBath) -> float:
    """Largest population of the highest Fock level of any mode (states as columns)."""
    n, k = tb.levels, tb.num_modes
    m = states.shape[1] if states.ndim == 2 else 1
    probs = (np.abs(states) ** 2).reshape((n,) * k + (m,))
    worst = 0.0
    for mode in range(k):
        top = np.take(probs, n - 1, axis=mode)
        worst = max(worst, float(np.max(top.reshape(-1, m).sum(axis=0))))
    return worst


def _sector_layout(psi: PureState):
    """Distinct ``s = -S`` values carrying amplitude and, per configuration, its position.

    Configurations outside the support get an arbitrary valid position; their
    zero amplitude removes them from the result.
    """
    spins = -sector_sums(psi.num_qubits)
    distinct = np.unique(spins[psi.amplitudes != 0])
    pos = np.clip(np.searchsorted(distinct, spins), 0, distinct.size - 1)
    return distinct, pos


def _assemble(psi: PureState, overlap: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """``rho[I, J] = c_I c_J^* overlap[pos_J, pos_I]`` with ``overlap[a, b] = <phi_a|phi_b>``."""
    c = psi.amplitudes
    return np.outer(c, c.conj()) * overlap[pos[None, :], pos[:, None]]


def _finish(psi: PureState, coeffs: np.ndarray) -> OperatorCoefficients:
    rho = OperatorCoefficients(psi.num_qubits, coeffs, check=False)
    rho.validate(tol=RESULT_TOL)
    return rho


def _diagnostic_times(t: float, points: int) -> list:
    if t == 0:
        return [0.0]
    return list(np.linspace(0.0, t, max(2, points)))


def _warn_if_truncated(diagnostic: float) -> Tuple[str, ...]:
    if diagnostic > TRUNCATION_WARN:
        msg = (f"top Fock level population {diagnostic:.3e} exceeds {TRUNCATION_WARN:g}; "
               "increase fock_cutoff")
        warnings.warn(msg, TruncationWarning, stacklevel=3)
        return (msg,)
    return ()


def evolve_vacuum(psi: PureState, tb: TruncatedBath, t: float,
                  diagnostic_points: int = 16) -> OracleResult:
    """Exact evolution of ``|psi> (x) |vac>`` and partial trace over the bath."""
    _check_oracle_size(psi.num_qubits)
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t!r}")
    distinct, pos = _sector_layout(psi)
    vac = np.zeros(tb.sector_dim)
    vac[0] = 1.0
    finals = []
    diagnostic = 0.0
    times = _diagnostic_times(t, diagnostic_points)
    for s in distinct:
        prop = _SectorPropagator(sector_hamiltonian(tb, int(s)))
        states = prop.evolve(vac, times)
        diagnostic = max(diagnostic, max(_top_level_population(x, tb) for x in states))
        finals.append(states[-1])
    phi = np.array(finals)
    overlap = phi.conj() @ phi.T
    rho = _finish(psi, _assemble(psi, overlap, pos))
    return OracleResult(rho, diagnostic, warnings=_warn_if_truncated(diagnostic))


def _coherent_columns(alphas: np.ndarray, tb: TruncatedBath) -> np.ndarray:
    """Product coherent states, one column per sample; each mode renormalized after truncation."""
    n = tb.levels
    samples = alphas.shape[0]
    out = np.ones((1, samples), dtype=complex)
    for k in range(tb.num_modes):
        a = alphas[:, k]
        v = np.empty((n, samples), dtype=complex)
        v[0] = 1.0
        for j in range(1, n):
            v[j] = v[j - 1] * a / math.sqrt(j)
        v /= np.linalg.norm(v, axis=0)
        out = (out[:, None, :] * v[None, :, :]).reshape(-1, samples)
    return out


def sample_thermal_amplitudes(tb: TruncatedBath, temperature: float, num_samples: int,
                              seed: int) -> np.ndarray:
    """Coherent amplitudes from the thermal P-function: complex Gaussian, ``E|alpha|^2 = <N>``."""
    occ = np.array([_bath.mean_occupation(w, temperature) for _, w in tb.modes])
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((num_samples, tb.num_modes, 2))
    return np.sqrt(occ / 2)[None, :] * (z[..., 0] + 1j * z[..., 1])


def evolve_thermal_mc(psi: PureState, tb: TruncatedBath, temperature: float, t: float,
                      num_samples: int, seed: int, diagnostic_points: int = 4) -> OracleResult:
    """Monte Carlo over the thermal P-representation of the initial bath state.

    Each sample starts the bath in a product coherent state, is evolved
    exactly, and contributes its reduced density; the result is the sample
    mean with per-entry standard errors (complex modulus).
    """
    _check_oracle_size(psi.num_qubits)
    if temperature <= 0:
        raise ValidationError(f"temperature must be > 0, got {temperature!r}")
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t!r}")
    if int(num_samples) != num_samples or num_samples < 2:
        raise ValidationError(f"need at least 2 samples, got {num_samples!r}")
    alphas = sample_thermal_amplitudes(tb, temperature, int(num_samples), seed)
    distinct, pos = _sector_layout(psi)
    props = [_SectorPropagator(sector_hamiltonian(tb, int(s))) for s in distinct]
    times = _diagnostic_times(t, diagnostic_points)
    ns = len(distinct)
    g_sum = np.zeros((ns, ns), dtype=complex)
    g_sq = np.zeros((ns, ns))
    diagnostic = 0.0
    for start in range(0, int(num_samples), MC_BATCH):
        init = _coherent_columns(alphas[start:start + MC_BATCH], tb)
        diagnostic = max(diagnostic, _top_level_population(init, tb))
        finals = []
        for prop in props:
            states = prop.evolve(init, times)
            diagnostic = max(diagnostic, max(_top_level_population(x, tb) for x in states[1:]))
            finals.append(states[-1])
        phi = np.array(finals)  # (sector, dim, sample)
        g = np.einsum("adn,bdn->nab", phi.conj(), phi)
        g_sum += g.sum(axis=0)
        g_sq += (np.abs(g) ** 2).sum(axis=0)
    n = int(num_samples)
    g_mean = g_sum / n
    var = np.maximum(g_sq / n - np.abs(g_mean) ** 2, 0.0) * n / (n - 1)
    g_err = np.sqrt(var / n)
    rho = _finish(psi, _assemble(psi, g_mean, pos))
    c = np.abs(psi.amplitudes)
    err = np.outer(c, c) * g_err[pos[None, :], pos[:, None]]
    return OracleResult(rho, diagnostic, std_error=err, num_samples=n,
                        warnings=_warn_if_truncated(diagnostic))


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    max_deviation: float
    eta: float
    delta_phi: float
    truncation_diagnostic: float
    oracle: OracleResult
    closed_form: OperatorCoefficients
    max_std_error: Optional[float] = None
    max_z_score: Optional[float] = None


def compare_to_closed_form(psi: PureState, tb: TruncatedBath, temperature: float, t: float,
                           num_samples: int = 10000, seed: int = 0,
                           drop_lamb_shift: bool = False) -> ComparisonReport:
    """Oracle vs collective channel on the same discrete modes.

    ``temperature == 0`` uses :func:`evolve_vacuum`; otherwise the Monte
    Carlo oracle.  ``drop_lamb_shift`` zeroes ``delta_phi`` in the closed
    form, which should make the comparison fail whenever the phase matters.
    """
    spec = tb.spectrum(temperature)
    eta = _bath.eta(spec, t)
    dphi = _bath.delta_phi(spec, t)
    used = _bath.DecoherenceFactors(float(t), eta, 0.0 if drop_lamb_shift else dphi)
    closed = channels.apply(from_pure_state(psi), channels.ChannelKind.COLLECTIVE, used)
    if temperature == 0:
        result = evolve_vacuum(psi, tb, t)
    else:
        result = evolve_thermal_mc(psi, tb, temperature, t, num_samples, seed)
    diff = np.abs(np.asarray(result.reduced_density.coeffs) - np.asarray(closed.coeffs))
    max_err = z = None
    if result.std_error is not None:
        max_err = float(np.max(result.std_error))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(result.std_error > 0, diff / result.std_error,
                             np.where(diff > 1e-12, np.inf, 0.0))
        z = float(np.max(ratio))
    return ComparisonReport(float(np.max(diff)), eta, used.delta_phi, result.truncation_diagnostic,
                            result, closed, max_err, z)
