"""Computable bounds on the quantum discord of qubit-qudit states.

The package computes a lower bound co(L) + S(ρ_A) - S(ρ) and an upper bound
given by the measurement direction derived from the filtered state, detects
when the two coincide (in which case the discord is known exactly), evaluates
closed forms for Bell-diagonal, rank-2, X-state, filtered X-state,
binary-channel, and one-clean-qubit families, and certifies everything
against brute-force measurement-optimization oracles.
"""

from . import kernels
from .bounds import (
    ChannelBounds,
    DiscordBounds,
    DqcParams,
    accessible_info_bounds,
    binary_entropy,
    co,
    compute_bounds,
    conditional_discord,
    discord_lower,
    discord_upper,
    discord_upper_weak,
    dqc1_bounds,
    h,
    x_state_discord,
)
from .correlation import (
    ETA,
    MeasurementDirection,
    filtered_state,
    lorentz_spectrum,
    q_matrix,
    q_matrix_swap_reference,
    r_matrix,
    t1_direction,
    t_matrix,
)
from .errors import DiscordBoundsError
from .oracle import (
    OracleResult,
    Povm,
    accessible_info_oracle,
    channel_mutual_information,
    ensemble_objective,
    ensemble_oracle,
    minimize_povm,
    minimize_projective,
    wootters_concurrence,
)
from .qstate import (
    DensityMatrix,
    XStateParams,
    apply_filter,
    bloch_vector,
    make_bell_diagonal,
    make_binary_channel,
    make_dqc1,
    make_x_state,
    partial_trace,
    purify,
    purity,
    random_state,
    random_traceless_unitary,
    random_unitary,
    validate_state,
    von_neumann_entropy,
)
from .stateio import read_state, read_unitary, write_state, write_unitary

__version__ = "0.1.0"

kernel_backend = kernels.backend_name
