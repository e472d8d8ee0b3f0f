"""Quantum estimation of the level energies of a resonantly driven three-level Lambda atom."""

from .analytic import ClosedFormId, cross_validate, eval_closed_form
from .errors import MetrologyError
from .estimation import (
    POVM,
    EstimationConfig,
    QFIMatrix,
    cfim,
    hss,
    performance_ratio,
    qfi_pure,
    qfi_single,
    qfim,
    qfim_pure,
    saturability_witness,
    sld,
    variance_bounds,
)
from .model import (
    LambdaParams,
    cpt_params,
    density_matrix,
    evolve,
    evolve_numeric_oracle,
    interaction_hamiltonian,
    is_cpt,
    state_derivative,
)
from .sweep import extrema_match, load_preset, parse_config, run_sweep

__version__ = "0.1.0"
