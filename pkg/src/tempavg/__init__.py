"""Temporal-averaging effective-pure-state simulation and analysis."""

from ._accel import using_numba
from .field import GF2Field, FieldElement, gf2n_generator, gf2n_mul, \
    multiplication_matrix, primitive_polynomial
from .gf2 import (gaussian_decompose, is_invertible, is_symplectic,
                  random_invertible, random_symplectic, symplectic_count,
                  symplectic_form)
from .circuits import Circuit, Gate, apply_circuit, circuit_unitary
from .qcore import (DeviationParts, MeasurementModel, Observable, ThermalSpec,
                    basis_density, deviation_parts, effective_pure_target,
                    maximally_mixed, measure_sigma_z1, partial_trace_last,
                    sigma_z1_matrix, thermal_state)
from .groups import (ConditionalNormalizerElement, CyclicElement,
                     DiagonalElement, LinearPermElement, NormalizerElement,
                     conjugation_action, element_to_circuit, element_unitary,
                     enumerate_expectation, sample_conditional_normalizer,
                     sample_diagonal, sample_normalizer,
                     verify_phase_independence)
from .protocols import (Experiment, PreparationPlan, RunResult, choose_k,
                        entanglement_prepare, exhaustive_plan,
                        flip_swap_circuit, flip_swap_plan,
                        fully_randomized_flip_swap_plan,
                        group_randomization_plan, labeled_flip_swap_plan,
                        prepared_average, randomized_flip_swap_plan,
                        run_protocol)
from .analytics import (SNRInputs, SNRReport, empirical_variance,
                        experiments_needed, recursion_coefficients,
                        sign_decision, snr_bound,
                        variance_bound_conditional, variance_bound_unitary,
                        variance_exact_cyclic, variance_exact_two_transitive)

__version__ = "0.1.0"
