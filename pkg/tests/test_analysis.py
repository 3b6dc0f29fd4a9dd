import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collective_dephasing.analysis import (FidelityCurve, asymptotic_decoherence_rate,
                                           decoherence_time, fidelity,
                                           fidelity_collective_closed_form, fidelity_curve,
                                           fidelity_independent_closed_form, ghz_support, purity,
                                           purity_closed_form)
from collective_dephasing.bath import BathSpec, DecoherenceFactors, DiscreteSpectrum, OhmicSpectrum, eta
from collective_dephasing.channels import apply
from collective_dephasing.errors import NoRootError, UnsupportedModelError, ValidationError
from collective_dephasing.register import OperatorCoefficients, PureState, from_pure_state

from conftest import random_density, random_state


def f(eta, dphi=0.0):
    return DecoherenceFactors(0.0, eta, dphi)


PLUS = PureState.normalized([1, 1])


class TestFidelity:
    def test_pure_self_overlap(self, rng):
        rho = from_pure_state(random_state(rng, 3))
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        up = from_pure_state(PureState.basis((1,)))
        down = from_pure_state(PureState.basis((-1,)))
        assert fidelity(up, down) == 0.0

    def test_independent_l1(self):
        rho = from_pure_state(PLUS)
        assert fidelity(rho, apply(rho, "independent", f(0.5))) == pytest.approx(
            0.5 + 0.5 * math.exp(-2.0), abs=1e-14)
        assert fidelity(rho, apply(rho, "independent", f(0.5))) == pytest.approx(0.56767, abs=5e-6)

    def test_size_mismatch(self, rng):
        with pytest.raises(ValidationError):
            fidelity(random_density(rng, 1), random_density(rng, 2))

    def test_matches_matrix_trace(self, rng):
        from collective_dephasing.register import to_matrix
        psi = random_state(rng, 3)
        rho0 = from_pure_state(psi)
        rhot = apply(rho0, "collective", f(0.2, 0.9))
        want = np.trace(to_matrix(rho0) @ to_matrix(rhot)).real
        assert fidelity(rho0, rhot) == pytest.approx(want, abs=1e-13)


class TestPurity:
    def test_pure(self, rng):
        assert purity(from_pure_state(random_state(rng, 2))) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_maximally_mixed(self, n):
        rho = OperatorCoefficients(n, np.eye(2 ** n) / 2 ** n)
        assert purity(rho) == pytest.approx(2.0 ** -n, abs=1e-15)

    def test_l1_after_independent(self):
        out = apply(from_pure_state(PLUS), "independent", f(0.5))
        assert purity(out) == pytest.approx(0.5 + 0.5 * math.exp(-4.0), abs=1e-14)

    @pytest.mark.parametrize("kind", ["collective", "independent"])
    def test_closed_form_matches_dense(self, rng, kind):
        for n in (1, 2, 3):
            psi = random_state(rng, n)
            fac = f(rng.uniform(0, 2), rng.uniform(0, 6))
            dense = purity(apply(from_pure_state(psi), kind, fac))
            assert purity_closed_form(psi, kind, fac) == pytest.approx(dense, abs=1e-12)


class TestClosedForms:
    def test_collective_l1(self):
        assert fidelity_collective_closed_form(PLUS, f(0.25)) == pytest.approx(
            0.5 + 0.5 * math.exp(-1.0), abs=1e-14)
        assert fidelity_collective_closed_form(PLUS, f(0.25)) == pytest.approx(0.68394, abs=5e-6)

    def test_coherence_preserving_is_one(self):
        psi = PureState.from_mapping({(1, -1): 1, (-1, 1): 1j}, normalize=True)
        for e, p in [(0.0, 0.0), (3.0, 1.0), (50.0, 6.0)]:
            assert fidelity_collective_closed_form(psi, f(e, p)) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_ghz_laws(self, n):
        psi = ghz_support(n)
        for e in (0.01, 0.1, 1.0):
            assert abs(fidelity_collective_closed_form(psi, f(e, 0.7))
                       - (0.5 + 0.5 * math.exp(-4 * n * n * e))) <= 1e-12
            assert abs(fidelity_independent_closed_form(psi, f(e, 0.7))
                       - (0.5 + 0.5 * math.exp(-4 * n * e))) <= 1e-12

    def test_ghz_64_mapping(self):
        psi = ghz_support(64)
        e = 1e-4
        assert fidelity_collective_closed_form(psi, f(e)) == pytest.approx(
            0.5 + 0.5 * math.exp(-4 * 64 ** 2 * e), abs=1e-12)
        assert fidelity_independent_closed_form(psi, f(e)) == pytest.approx(
            0.5 + 0.5 * math.exp(-4 * 64 * e), abs=1e-12)

    def test_basis_state_independent(self):
        psi = PureState.basis((1, -1, -1))
        assert fidelity_independent_closed_form(psi, f(9.0)) == 1.0

    @pytest.mark.parametrize("kind", ["collective", "independent"])
    def test_matches_dense_path(self, rng, kind):
        closed = (fidelity_collective_closed_form if kind == "collective"
                  else fidelity_independent_closed_form)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            psi = random_state(rng, n)
            fac = f(rng.uniform(0, 3), rng.uniform(0, 2 * np.pi))
            rho0 = from_pure_state(psi)
            dense = fidelity(rho0, apply(rho0, kind, fac))
            assert closed(psi, fac) == pytest.approx(dense, abs=1e-10)

    def test_mapping_and_state_agree(self, rng):
        psi = random_state(rng, 3)
        fac = f(0.3, 0.4)
        assert fidelity_collective_closed_form(psi.support(), fac) == pytest.approx(
            fidelity_collective_closed_form(psi, fac), abs=1e-14)

    def test_mapping_validation(self):
        with pytest.raises(ValidationError):
            fidelity_collective_closed_form({(1,): 1.0, (1, 1): 0.0001}, f(0.1))
        with pytest.raises(ValidationError):
            fidelity_collective_closed_form({(1,): 0.5}, f(0.1))
        with pytest.raises(ValidationError):
            fidelity_collective_closed_form({}, f(0.1))


@settings(max_examples=50, deadline=None)
@given(e1=st.floats(0, 5), e2=st.floats(0, 5), seed=st.integers(0, 2 ** 32 - 1))
def test_fidelity_decreases_with_eta(e1, e2, seed):
    lo, hi = sorted((e1, e2))
    psi = random_state(np.random.default_rng(seed), 3)
    # zero phase: each term is a nonnegative weight times exp(-eta * d), d >= 0
    for closed in (fidelity_collective_closed_form, fidelity_independent_closed_form):
        assert closed(psi, f(hi)) <= closed(psi, f(lo)) + 1e-14


@settings(max_examples=50, deadline=None)
@given(e=st.floats(0, 20), p=st.floats(-10, 10), seed=st.integers(0, 2 ** 32 - 1))
def test_fidelity_in_unit_interval(e, p, seed):
    psi = random_state(np.random.default_rng(seed), 3)
    for closed in (fidelity_collective_closed_form, fidelity_independent_closed_form):
        assert 0.0 <= closed(psi, f(e, p)) <= 1.0


class TestCurve:
    def test_curve(self):
        bath = BathSpec(DiscreteSpectrum(((0.2, 1.0),)), 0.0)
        curve = fidelity_curve(ghz_support(3), "collective", bath, [0.0, 1.0, 2.0])
        assert curve.values[0] == pytest.approx(1.0)
        assert curve.values[2] == pytest.approx(0.5 + 0.5 * math.exp(-36 * eta(bath, 2.0)))

    def test_validation(self):
        with pytest.raises(ValidationError):
            FidelityCurve([0.0, 0.0], [1.0, 1.0])
        with pytest.raises(ValidationError):
            FidelityCurve([0.0, 1.0], [1.0])
        with pytest.raises(ValidationError):
            FidelityCurve([0.0, 1.0], [1.0, 1.5])


class TestDecoherenceTime:
    def test_root_hits_one(self):
        bath = BathSpec(OhmicSpectrum(1.0, 1.0), 10.0)
        t = decoherence_time(bath)
        assert 0 < t < math.inf
        assert eta(bath, t) == pytest.approx(1.0, abs=1e-6)

    def test_weak_coupling_approaches_high_temperature_law(self):
        bath = BathSpec(OhmicSpectrum(0.02, 1.0), 10.0)
        t = decoherence_time(bath)
        assert t == pytest.approx(1 / (math.pi * 0.02 ** 2 * 10.0), rel=0.1)

    def test_strong_coupling_is_onset_dominated(self):
        # eta ~ eps^2 T t^2 here, far from the linear law
        bath = BathSpec(OhmicSpectrum(1.0, 1.0), 10.0)
        t = decoherence_time(bath)
        assert t > 5 / (math.pi * 10.0)

    def test_vacuum_weak_coupling_has_no_root(self):
        with pytest.raises(NoRootError):
            decoherence_time(BathSpec(OhmicSpectrum(0.1, 1.0), 0.0))

    def test_discrete_rejected(self):
        with pytest.raises(UnsupportedModelError):
            decoherence_time(BathSpec(DiscreteSpectrum(((1.0, 1.0),)), 1.0))

    def test_asymptotic_rate(self):
        bath = BathSpec(OhmicSpectrum(1.0, 1.0), 10.0)
        assert asymptotic_decoherence_rate(bath, 50.0) == pytest.approx(math.pi * 10.0, rel=0.02)
        with pytest.raises(ValidationError):
            asymptotic_decoherence_rate(bath, 0.0)
