"""Entanglement in resonating-valence-bond states: exact sums, Monte Carlo and Werner analysis."""

from ._core import (
    AndersonBound,
    Lattice,
    McConfig,
    ResourceGuardError,
    ValidationError,
    __version__,
    anderson_bound,
    bond_orbits,
    check_bound,
    concurrence,
    count_nn_coverings,
    entanglement_verdict,
    eof,
    equivalent_partner_count,
    exact_bond_correlators,
    exact_gas_correlator,
    exact_nn_correlator,
    extrapolate,
    gas_closed_forms,
    gas_correlation_matrix,
    run_chain,
    werner_p,
)

__all__ = [
    "AndersonBound",
    "Lattice",
    "McConfig",
    "ResourceGuardError",
    "ValidationError",
    "__version__",
    "anderson_bound",
    "bond_orbits",
    "check_bound",
    "concurrence",
    "count_nn_coverings",
    "entanglement_verdict",
    "eof",
    "equivalent_partner_count",
    "exact_bond_correlators",
    "exact_gas_correlator",
    "exact_nn_correlator",
    "extrapolate",
    "gas_closed_forms",
    "gas_correlation_matrix",
    "run_chain",
    "werner_p",
]
