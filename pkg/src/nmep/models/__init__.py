from .base import JumpChannel, LindbladModel, ModelSnapshot, constant_model, effective_hamiltonian
from .spin_star import (
    SpinStarParams,
    coherence_factor,
    dephasing_rate,
    lamb_shift,
    spin_star_analytic,
    spin_star_model,
)
from .tabulated import (
    Samples,
    TabulatedSpec,
    format_tabulated,
    load_tabulated,
    parse_tabulated,
    sampled_model,
    tabulated_model,
)
from .transmon import (
    TransmonModel,
    TransmonParams,
    TransmonTables,
    coefficient_matrix,
    oscillatory_integrals,
    transmon_channels,
    transmon_model,
    transmon_rates,
    transmon_tables,
)

__all__ = [
    "JumpChannel",
    "LindbladModel",
    "ModelSnapshot",
    "Samples",
    "SpinStarParams",
    "TabulatedSpec",
    "TransmonModel",
    "TransmonParams",
    "TransmonTables",
    "coefficient_matrix",
    "coherence_factor",
    "constant_model",
    "dephasing_rate",
    "effective_hamiltonian",
    "format_tabulated",
    "lamb_shift",
    "load_tabulated",
    "oscillatory_integrals",
    "parse_tabulated",
    "sampled_model",
    "spin_star_analytic",
    "spin_star_model",
    "tabulated_model",
    "transmon_channels",
    "transmon_model",
    "transmon_rates",
    "transmon_tables",
]
