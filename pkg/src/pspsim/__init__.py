"""Numerical laboratory for pseudo-single-photon states built from weak coherent light."""

from .errors import DegenerateStateError, NumericalDiagnosticError, TruncationError
from .generation import (
    CONVENTION_PAPER,
    CONVENTION_RECOMPUTED,
    GenerationParams,
    cpm_output,
    herald_probabilities,
    kerr_output_fock,
    trigger_probability,
)
from .metrics import HomResult, g2_zero_closed, g2_zero_oracle, hom, hom_fock_oracle
from .pns import (
    LossResult,
    PSPParams,
    coherent_from_pseudo,
    fidelity_to_number_state,
    generation_probability,
    loss_channel,
    modular_poisson_mass,
    normalization,
    normalization_overlap_sum,
    pseudo_number_state,
)
from .qkd import (
    PHASE_SET_PAPER_LITERAL,
    PHASE_SET_STANDARD,
    PROTOCOLS,
    PSP_NONDECOY,
    PSP_PASSIVE_DECOY,
    PSP_TRIGGERED,
    WCS_DECOY,
    WCS_NONDECOY,
    ChannelParams,
    ChannelStats,
    KeyRateResult,
    basis_fidelity_bound,
    binary_entropy,
    channel_stats,
    encoded_state,
    keyrate_for_protocol,
    keyrate_nondecoy,
    keyrate_psp_passive,
    keyrate_psp_triggered,
    keyrate_wcs_decoy,
    measure_bb84,
    optimize_mu,
    phase_error_upper,
    phase_set,
    pseudo_state_yield,
    transmission,
    yield_n,
)
from .states import (
    CoherentDyadOperator,
    CoherentSuperposition,
    FockVector,
    auto_cutoff,
    beam_splitter,
    coherent_overlap,
    coherent_state,
    fock_amplitude,
    fock_beam_splitter,
    fock_inner,
    inner_product,
    norm,
    project_mode,
    tensor,
    to_fock,
    uhlmann_fidelity,
    vacuum_probability,
)

__version__ = "0.1.0"
