"""Loschmidt-echo decoherence simulator for spin-1/2 ladders."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Boundary,
    BondKind,
    BondTerm,
    Couplings,
    HamiltonianTerms,
    LadderSpec,
    Leg,
    StageTag,
    build_leg,
    build_rungs,
    stage_hamiltonians,
    total_hamiltonian,
)
from .hilbert import apply_terms, basis_state, dense_matrix, local_sz  # noqa: F401
from .propagate import EvolutionConfig, Method, prepare  # noqa: F401
from .ensemble import (  # noqa: F401
    EnsembleMode,
    EnsembleSpec,
    TimeSeries,
    exact_trace_states,
    polarization_curve,
    random_phase_state,
)
from .protocols import (  # noqa: F401
    LeSchedule,
    forward_p11,
    le_sweep,
    loschmidt_echo,
    sp_paradigm,
)
from .onebody import (  # noqa: F401
    HoppingMatrix,
    MesoEchoResult,
    detect_meso_echo,
    onebody_return,
    quenched_le,
)
from .analysis import (  # noqa: F401
    FgrDecomposition,
    FgrParams,
    RateFit,
    estimate_plateau,
    fgr_decompose,
    fgr_predict,
    fit_exponential,
    fit_quadratic,
    interpolation_curve,
    spreading_time,
)
