"""Genuine multipartite entanglement detection from local sum uncertainty relations."""

from .tensor import (
    DensityMatrix,
    DimensionError,
    InvalidStateError,
    NotHermitianError,
    NotPSDError,
    TraceError,
    embed,
    expectation,
    kron,
    partial_trace,
    validate_density,
    variance,
)
from .states import (
    NoiseFamily,
    PureState,
    fully_separable_threshold,
    noisy_mixture,
    qutrit_phi,
    random_biseparable,
    random_density,
    w_state,
)
from .observables import (
    ObservableFamily,
    SpinConfig,
    collective_operator,
    pauli_family,
    spin_family,
    spin_matrices,
)
from .bounds import BoundProvider, SubsetBound, bound_for, commutator_bound, min_variance_sum
from .criteria import (
    Bipartition,
    CriterionReport,
    PartitionBound,
    UnsoundBound,
    enumerate_bipartitions,
    f_total,
    full_separability_tripartite,
    gme_criterion,
    lur_bipartite,
    partition_bound,
    spin_gme_criterion,
)

__version__ = "0.1.0"
