"""Precision-rate toolbox for a lossy thermal bosonic mode: fundamental
bounds for frequency, displacement, two-photon drive, loss-rate and
temperature estimation, simulators for the strategies that (nearly)
saturate them, and a reproducible reporting CLI."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    FockSpace,
    GaussianState,
    Hamiltonian,
    HamiltonianKind,
    LindbladModel,
    OutcomeDistribution,
    ParameterTag,
    build_fock_space,
    default_cutoff,
    make_gaussian,
    model_for_target,
    photon_number,
)
