"""Bell-inequality and concurrence simulation for coupled Josephson charge qubits."""
from ._backend import NAME as BACKEND
from .chsh import (
    ChshResult,
    ChshSetting,
    chsh_gamma,
    chsh_gamma_analytic,
    chsh_gamma_analytic_uncorrected,
    sweep_gamma,
)
from .entanglement import (
    ProbabilitySet,
    calibrate_branch,
    concurrence_analytic,
    concurrence_direct,
    concurrence_protocol,
    entanglement_of_formation,
    family_branch,
    probabilities_from_state,
)
from .errors import (
    CapacityError,
    InconsistentProbabilitiesError,
    JJBellError,
    NumericalError,
    UsageError,
)
from .evolution import (
    BellCondition,
    BlochDirection,
    bloch_rotation,
    evolve_closed_form,
    gate_ux,
    gate_uz,
    propagate_dense,
    rotate_state,
)
from .linalg import HermitianOperator, PureState, UnitaryOperator, hermitian_expm, inner, tensor
from .measurement import estimate_concurrence, estimate_gamma, sample_setting
from .model import (
    NQubitParams,
    QubitCircuitParams,
    TwoQubitParams,
    n_qubit_hamiltonian,
    single_qubit_hamiltonian,
    two_qubit_hamiltonian,
)
from .phase_space import q_joint, q_single

__version__ = "0.1.0"
