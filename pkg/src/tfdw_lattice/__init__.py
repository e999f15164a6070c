"""Discrete TFDW and liquid-drop variational problems on Z^3."""

__version__ = "0.1.0"

from .lattice import (
    DistanceKind,
    ball,
    ball_volume_formula,
    diameter,
    graph_distance,
    euclidean_distance,
    is_connected,
    neighbors,
    set_boundary,
    sphere,
    sphere_size_formula,
)
from .grids import (
    BoxDomain,
    DensityGrid,
    FieldGrid,
    centered_box,
    field_from_points,
    graph_gradient_sq,
    graph_laplacian,
    load_field,
    save_field,
)
from .coulomb import KernelTable, kernel_table, pairing, potential_direct, potential_fast
from .energy import (
    EnergyBreakdown,
    F_MINIMIZER,
    F_MINIMUM,
    F_local,
    PHI_CAP,
    constrained_residual,
    el_gradient,
    energy,
)
from .spreading import (
    SpreadFamilyParams,
    build_psi,
    cone_coulomb,
    psi_energy_report,
    seq_a,
    seq_b,
    seq_c_bound,
    seq_c_direct,
    seq_d,
    seq_e_bound,
    seq_e_direct,
)
from .minimize import (
    MinimizeConfig,
    MinimizeReport,
    NumericalFailure,
    Termination,
    concentration_radius,
    mass_growth_check,
    minimize,
    projection_mass,
    s_profile,
    splitting_advantage,
    subadditivity_scan,
)
from .drops import (
    AnnealSchedule,
    DropSet,
    GreedySchedule,
    SwapMove,
    coulomb_chain_bound,
    drop_energy,
    exact_enumeration_oracle,
    load_drop,
    minimize_drop,
    pair_count_profile,
    save_drop,
    scaling_study,
)
from .inequalities import (
    HlsInstance,
    hls_ratio,
    hls_suite,
    lp_monotonicity_check,
    lp_norm,
    lp_suite,
    truncation_comparison,
    truncation_suite,
)
