"""Collective and independent dephasing of qubit registers coupled to a bosonic bath."""

__version__ = "0.1.0"

from .analysis import (decoherence_time, fidelity, fidelity_collective_closed_form,
                       fidelity_independent_closed_form, ghz_support, purity)
from .bath import (BathSpec, DecoherenceFactors, DiscreteSpectrum, OhmicSpectrum, delta_phi,
                   discretize, eta, eta_high_temperature_slope, mean_occupation)
from .channels import ChannelKind, apply, collective_factor, independent_factor
from .dfs import (apply_circuit, decode, efficiency, encode, encoding_circuit,
                  is_coherence_preserving, sector_dimension, sector_sum)
from .oracle import TruncatedBath, compare_to_closed_form, evolve_thermal_mc, evolve_vacuum
from .register import OperatorCoefficients, PureState, from_matrix, from_pure_state, to_matrix
