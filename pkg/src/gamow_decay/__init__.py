"""Resonant-state (Gamow) expansion of decay from an s-wave delta shell."""

__version__ = "0.1.0"

from .basis import (
    CoefficientSet,
    DiagnosticReport,
    OverlapMatrix,
    ResonantFamily,
    ResonantState,
    build_family,
    coefficient_C,
    coefficients,
    delta_partial,
    f_partial,
    normalize,
    overlap_I,
    overlap_matrix,
    sum_rule_partial,
)
from .cn_oracle import Grid1D, WaveField, oracle_probabilities, propagate_cn
from .config import RunConfig, load_config
from .errors import DecayError
from .moshinsky import (
    AsymptoticConstants,
    MoshinskyEval,
    asymptotic_M,
    faddeeva_w,
    moshinsky_M,
)
from .poles import (
    Pole,
    PoleWindow,
    count_poles_argument_principle,
    extend_symmetric,
    find_poles,
    initial_guess,
    newton_polish,
    pole_equation_residual,
)
from .propagation import (
    ProbabilitySeries,
    SlopeEstimate,
    TimeGrid,
    green_partial,
    green_remainder,
    log_grid,
    nonescape_P,
    psi_t,
    survival_S,
    tail_slope,
)
from .shell_model import (
    InitialState,
    ShellModel,
    eval_u_inner,
    initial_state_box_mode,
    make_model,
)
