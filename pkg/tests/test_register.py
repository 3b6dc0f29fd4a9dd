import itertools
from functools import reduce

import numpy as np
import pytest

from collective_dephasing.errors import SizeError, ValidationError
from collective_dephasing.register import (BASIS, OperatorCoefficients, PureState, config_index,
                                           configurations, from_matrix, from_pure_state,
                                           index_config, parse_config_string, to_matrix)

from conftest import random_density, random_state

SZ = np.diag([1.0, -1.0])
ID = np.eye(2)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)
# independent construction of the single-qubit basis keyed by labels
LABEL_BASIS = {(-1, -1): (ID + SZ) / 2, (1, 1): (ID - SZ) / 2, (-1, 1): SPLUS, (1, -1): SPLUS.T}


def kron_sum(rho):
    """Dense matrix built term by term as sum c({i},{j}) kron(rho_{i1,j1}, ...)."""
    n = rho.num_qubits
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for ci in itertools.product((1, -1), repeat=n):
        for cj in itertools.product((1, -1), repeat=n):
            term = reduce(np.kron, [LABEL_BASIS[(a, b)] for a, b in zip(ci, cj)])
            out += rho.coeff(ci, cj) * term
    return out


def test_label_convention_matches_sigma_z():
    for (i, j), r in LABEL_BASIS.items():
        np.testing.assert_allclose(SZ @ r, -i * r)
        np.testing.assert_allclose(r @ SZ, -j * r)


def test_index_layout():
    assert config_index((-1, -1, -1)) == 0
    assert config_index((1, -1, -1)) == 4
    assert index_config(5, 3) == (1, -1, 1)
    assert configurations(2).tolist() == [[-1, -1], [-1, 1], [1, -1], [1, 1]]
    assert parse_config_string("+−+") == (1, -1, 1)


def test_flat_layout_interleaves_qubits(rng):
    rho = random_density(rng, 2)
    flat = rho.flat()
    # flat index bits: (b(i1), b(j1), b(i2), b(j2))
    for ci in itertools.product((1, -1), repeat=2):
        for cj in itertools.product((1, -1), repeat=2):
            bits = [(x + 1) // 2 for pair in zip(ci, cj) for x in pair]
            k = int("".join(map(str, bits)), 2)
            assert flat[k] == rho.coeff(ci, cj)
    back = OperatorCoefficients.from_flat(2, flat)
    np.testing.assert_array_equal(back.coeffs, rho.coeffs)


class TestFromPureState:
    def test_basis_state(self):
        rho = from_pure_state(PureState.basis((1,)))
        assert rho.coeff((1,), (1,)) == 1
        assert np.count_nonzero(rho.coeffs) == 1

    def test_equal_superposition(self):
        rho = from_pure_state(PureState.normalized([1, 1]))
        np.testing.assert_allclose(rho.coeffs, 0.5, atol=1e-15)

    def test_bell_type(self):
        psi = PureState.from_mapping({(1, -1): 2 ** -0.5, (-1, 1): 2 ** -0.5})
        rho = from_pure_state(psi)
        pairs = [(1, -1), (-1, 1)]
        for ci in itertools.product((1, -1), repeat=2):
            for cj in itertools.product((1, -1), repeat=2):
                expected = 0.5 if (ci in pairs and cj in pairs) else 0.0
                assert rho.coeff(ci, cj) == pytest.approx(expected, abs=1e-15)
        dense = np.outer(psi.amplitudes, psi.amplitudes.conj())
        np.testing.assert_allclose(kron_sum(rho), dense, atol=1e-15)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            PureState(1, np.array([1.0, 1.0]))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_dense_outer_product(self, rng, n):
        psi = random_state(rng, n)
        rho = from_pure_state(psi)
        rho.validate()
        np.testing.assert_allclose(to_matrix(rho), np.outer(psi.amplitudes, psi.amplitudes.conj()),
                                   atol=1e-12)


class TestMatrixConversion:
    def test_projector(self):
        rho = OperatorCoefficients(1, np.diag([1.0, 0.0]))
        assert rho.coeff((-1,), (-1,)) == 1
        np.testing.assert_array_equal(to_matrix(rho), [[1, 0], [0, 0]])

    def test_sigma_plus(self):
        rho = OperatorCoefficients(1, np.array([[0, 1], [0, 0]]), check=False)
        assert rho.coeff((-1,), (1,)) == 1
        np.testing.assert_array_equal(to_matrix(rho), SPLUS)
        back = from_matrix(SPLUS, check=False)
        assert back.coeff((-1,), (1,)) == 1
        assert np.count_nonzero(back.coeffs) == 1

    def test_maximally_mixed(self):
        rho = from_matrix(np.eye(2) / 2)
        assert rho.coeff((-1,), (-1,)) == rho.coeff((1,), (1,)) == 0.5
        assert rho.coeff((1,), (-1,)) == rho.coeff((-1,), (1,)) == 0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_to_matrix_equals_kron_sum(self, rng, n):
        rho = random_density(rng, n)
        np.testing.assert_allclose(to_matrix(rho), kron_sum(rho), atol=1e-14)

    def test_round_trips(self, rng):
        worst = 0.0
        for k in range(50):
            n = 1 + k % 3
            rho = random_density(rng, n)
            m = to_matrix(rho)
            worst = max(worst, np.max(np.abs(from_matrix(m).coeffs - rho.coeffs)),
                        np.max(np.abs(to_matrix(from_matrix(m)) - m)))
        assert worst <= 1e-12

    def test_gram_matrix_of_basis(self):
        order = [(-1, -1), (1, 1), (-1, 1), (1, -1)]
        b = {(i, j): BASIS[(i + 1) // 2, (j + 1) // 2] for i, j in order}
        for p in order:
            np.testing.assert_array_equal(b[p], LABEL_BASIS[p])
        gram = np.array([[np.trace(b[p] @ b[q]) for q in order] for p in order])
        expected = np.array([[1, 0, 0, 0],
                             [0, 1, 0, 0],
                             [0, 0, 0, 1],
                             [0, 0, 1, 0]])
        np.testing.assert_array_equal(gram, expected)

    def test_bad_dimension(self):
        with pytest.raises(ValidationError):
            from_matrix(np.eye(3))

    def test_dense_cap(self):
        big = np.zeros((2 ** 7, 2 ** 7))
        big[0, 0] = 1
        with pytest.raises(SizeError):
            from_matrix(big)
        with pytest.raises(SizeError):
            to_matrix(from_pure_state(PureState.basis((1,) * 7)))


def test_invariants_enforced():
    with pytest.raises(ValidationError):
        OperatorCoefficients(1, np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValidationError):
        OperatorCoefficients(1, np.eye(2))
    with pytest.raises(SizeError):
        PureState.basis((1,) * 13)
    with pytest.raises(ValidationError):
        PureState.basis((1, 0))


def test_states_are_immutable():
    psi = PureState.basis((1, -1))
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1
