"""Simulator for two-object remote quantum control by LOCC."""

from .concentrate import (OutcomeClass, OutcomeTriple, concentrate,
                          enumerate_concentration, outcome_class,
                          pauli_product_index)
from .locc import (ProtocolReport, ownership_check, replay, run_protocol)
from .qcore import (DensityOperator, StateVector, apply, bell_measure,
                    fidelity, kron, partial_trace, partial_transpose, pauli,
                    trace_distance)
from .redistribute import (ControlUnitary, apply_control,
                           distribution_correction, receiver_marginals,
                           teleclone_out)
from .states import (InputAmplitudes, bell_state, distribution_resource,
                     phi_basis, smolin, telecloned_input)
from .transcript import Event, Transcript

__version__ = "0.1.0"

__all__ = [
    "ControlUnitary", "DensityOperator", "Event", "InputAmplitudes",
    "OutcomeClass", "OutcomeTriple", "ProtocolReport", "StateVector",
    "Transcript", "apply", "apply_control", "bell_measure", "bell_state",
    "concentrate", "distribution_correction", "distribution_resource",
    "enumerate_concentration", "fidelity", "kron", "outcome_class",
    "ownership_check", "partial_trace", "partial_transpose", "pauli",
    "pauli_product_index", "phi_basis", "receiver_marginals", "replay",
    "run_protocol", "smolin", "teleclone_out", "telecloned_input",
    "trace_distance",
]
