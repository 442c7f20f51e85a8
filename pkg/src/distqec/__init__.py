"""distqec: learning noise-tailored quantum error-correction encodings.

The package trains encoding circuits that minimize the distinguishability
loss (lost trace distance) of state pairs under a given noise channel,
optionally trains matching recovery operations via the fidelity loss, and
certifies encoders with analytic baselines and a potential-code-distance
probe.
"""

from .qmat import (
    basis_state,
    conjugate,
    embed,
    fidelity,
    hermitian_eigvals,
    partial_trace,
    pure_to_density,
    tensor,
    trace_distance,
)
from .channels import (
    CompositeNoise,
    KrausChannel,
    NoiseSpec,
    apply,
    build_channel,
    lift,
    solve_asymmetric_rates,
    thermal_relaxation_kraus,
)
from .ansatz import (
    Ansatz,
    BoundCircuit,
    Gate,
    Layout,
    apply_circuit,
    build_layout,
    circuit_from_json,
    circuit_to_json,
    circuit_unitary,
    encode,
    export_qasm,
    generate_rea,
    parse_qasm,
)
from .designs import StateSet, haar_sample, two_design, weighted
from .loss import LossReport, dloss, fidelity_bounds, floss, lost_trace
from .train import (
    OptimConfig,
    TrainReport,
    fd_gradient,
    lbfgs_minimize,
    train_encoding,
    train_recovery,
)
from .codes import (
    CodeSpec,
    PauliError,
    enumerate_pauli_errors,
    potential_distance,
    standard_encoder,
)

__version__ = "0.1.0"

__all__ = [
    "Ansatz", "BoundCircuit", "CodeSpec", "CompositeNoise", "Gate", "KrausChannel",
    "Layout", "LossReport", "NoiseSpec", "OptimConfig", "PauliError", "StateSet",
    "TrainReport", "apply", "apply_circuit", "basis_state", "build_channel",
    "build_layout", "circuit_from_json", "circuit_to_json", "circuit_unitary",
    "conjugate", "dloss", "embed", "encode", "enumerate_pauli_errors", "export_qasm",
    "fd_gradient", "fidelity", "fidelity_bounds", "floss", "generate_rea",
    "haar_sample", "hermitian_eigvals", "lbfgs_minimize", "lift", "lost_trace",
    "parse_qasm", "partial_trace", "potential_distance", "pure_to_density",
    "solve_asymmetric_rates", "standard_encoder", "tensor", "thermal_relaxation_kraus",
    "trace_distance", "train_encoding", "train_recovery", "two_design", "weighted",
]
