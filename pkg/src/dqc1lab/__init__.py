"""One-clean-qubit circuits as open quantum systems.

Builds the induced logical-qubit channel of a DQC1 circuit (Stinespring,
Kraus and Choi forms), certifies its unitality numerically, and carries out
the thermodynamic bookkeeping of trace estimation: TPM work distributions,
Crooks ratios, entropy production and the Landauer ledger.
"""

from .channel import (
    ChoiMatrix,
    DQC1Channel,
    KrausSet,
    choi_apply,
    choi_closed_form,
    choi_numeric,
    kraus_from_choi,
    kraus_from_dilation,
    trace_estimation_channel,
    unitality_defect,
)
from .energetics import (
    EnergeticsReport,
    binary_entropy,
    commutator_energy_check,
    delta_entropy_logical,
    energetics_report,
    relative_entropy,
    state_entropy,
)
from .linalg import (
    HermitianEig,
    haar_unitary,
    hermitian_eig,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    tensor,
)
from .register import (
    InfiniteTemperatureError,
    RegisterSpec,
    TraceEstimate,
    initial_state,
    iswap,
    mu_of,
    named_unitary,
    p_zero,
    sample_trace,
    trace_estimation_unitary,
)
from .thermo import (
    CrooksReport,
    ThermalFrame,
    WorkDistribution,
    crooks_check,
    mean_work,
    moment,
    thermal_frame,
    work_distribution,
)

__version__ = "0.1.0"
