"""Fluctuation-response inequalities for quantum states.

Bounds on expectation-value differences in terms of relative entropy and
the sub-Gaussian norm, their hypothesis-testing and speed-limit corollaries,
and randomized property suites that check them numerically.
"""

from .bounds import (
    BoundReport,
    bayesian_qfri_bound,
    classical_error_bound,
    energy_difference_bound,
    gibbs_gap,
    mean_difference,
    qfri_bound,
    subgaussian_qfri_bound,
)
from .errors import QfriError
from .hypothesis_testing import (
    Povm,
    TestOutcome,
    error_rates,
    error_sum_bounds,
    evaluate_test,
    example_states,
    helstrom_bound,
    likelihood_ratio_povm,
    pinsker_bound,
    plan_sample_size,
)
from .kernels import BACKEND
from .linalg import HermitianOperator, kron_power, matrix_function
from .speed import mandelstam_tamm_bound, observable_speed, qfri_speed_bound, unitary_evolve
from .states import DensityMatrix, relative_entropy, thermal_state, trace_distance, von_neumann_entropy
from .subgaussian import DiscreteDistribution, bernoulli_norm, induced_distribution, subgaussian_norm

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "DensityMatrix",
    "DiscreteDistribution",
    "HermitianOperator",
    "Povm",
    "QfriError",
    "TestOutcome",
    "bayesian_qfri_bound",
    "bernoulli_norm",
    "classical_error_bound",
    "energy_difference_bound",
    "error_rates",
    "error_sum_bounds",
    "evaluate_test",
    "example_states",
    "gibbs_gap",
    "helstrom_bound",
    "induced_distribution",
    "kron_power",
    "likelihood_ratio_povm",
    "mandelstam_tamm_bound",
    "matrix_function",
    "mean_difference",
    "observable_speed",
    "pinsker_bound",
    "plan_sample_size",
    "qfri_bound",
    "qfri_speed_bound",
    "relative_entropy",
    "subgaussian_norm",
    "subgaussian_qfri_bound",
    "thermal_state",
    "trace_distance",
    "unitary_evolve",
    "von_neumann_entropy",
]
