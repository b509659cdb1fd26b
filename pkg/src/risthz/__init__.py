"""Simulation and optimization toolkit for reflecting-surface THz MIMO links.

Submodules
----------
numerics      complex linear-algebra kernel (SVD, Kronecker, vec, log-det)
channel       sparse geometric channel synthesis and the cascaded channel
ris           discrete phase sets, quantization, graphene element physics
beamforming   singular-vector beamformers, achievable rate, trace bound
gd            adaptive- and constant-step gradient descent on the phases
ao            hybrid factorization alternated with a discrete phase search
complexity    closed-form multiplication counts
harness       seeded Monte-Carlo sweeps with CSV output
"""

from .ao import (
    AoResult,
    CbcPlan,
    ao_optimize,
    cbc_factor,
    compute_pq,
    constant_magnitude_split,
    linear_search_phases,
)
from .beamforming import (
    HybridBeamformers,
    achievable_rate,
    jensen_upper_bound,
    optimal_digital_beamformers,
)
from .channel import (
    ChannelRealization,
    PathRecord,
    SystemConfig,
    cascade,
    dbi_to_linear,
    draw_realization,
    generate_channel,
    los_gain,
    nlos_gain,
    planar_grid,
    realization_from_json,
    realization_to_json,
    upa_response,
)
from .complexity import (
    CostModel,
    cost_a_gd,
    cost_ao,
    cost_c_gd,
    cost_cbc,
    cost_linear_search,
)
from .errors import (
    ConfigError,
    DegenerateChannelError,
    DimensionError,
    IllConditionedCombinerError,
    InfeasibleSplitError,
    InvalidInputError,
)
from .gd import (
    GdResult,
    a_gd_optimize,
    adaptive_step,
    build_coupling,
    c_gd_optimize,
    calibrate_fixed_step,
    gradient,
    objective,
    step_quadratic,
)
from .harness import (
    ExperimentSpec,
    NumericalFailure,
    RisSettings,
    SweepResult,
    SweepRow,
    desk_spec,
    load_spec,
    paper_spec,
    run_complexity,
    run_convergence,
    run_desk_suite,
    run_realization,
    run_sweep,
)
from .numerics import hermitian_logdet2, kron, svd, vec, vec_inverse
from .ris import (
    GrapheneParams,
    RisState,
    build_phase_set,
    element_phase_response,
    export_graphene_sweep_csv,
    export_phase_set_csv,
    fermi_level_from_voltage,
    graphene_conductivity,
    initial_state,
    phi_matrix,
    quantize_phases,
)

__version__ = "0.1.0"
