"""Stage one: concentrate the telecloned qubit back onto the controller's qubit.

Alice, Bob and Charlie Bell-measure (A, E), (B, F), (C, G) and report their
2-bit outcomes. The controller applies the Pauli operator whose index is the
XOR of the three reported Pauli indices.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .qcore import (DensityOperator, StateVector, apply, bell_measure,
                    bell_vector, fidelity, kron, partial_trace, pauli,
                    pauli_bits, pauli_from_bits)
from .states import InputAmplitudes, smolin, telecloned_input
from .transcript import Event

CONTROLLER = "Controller"
RECEIVERS = ("Alice", "Bob", "Charlie")


class OutcomeTriple(NamedTuple):
    """Bell outcomes on (A, E), (B, F), (C, G)."""

    l: int
    j: int
    k: int


ALL_TRIPLES = tuple(OutcomeTriple(*t) for t in itertools.product(range(4), repeat=3))


class OutcomeClass(enum.IntEnum):
    I = 0
    II = 1
    III = 2
    IV = 3


def pauli_product_index(*indices: int) -> int:
    """Index of the product of Pauli operators, up to a global phase."""
    x = z = 0
    for i in indices:
        xb, zb = pauli_bits(i)
        x ^= xb
        z ^= zb
    return pauli_from_bits(x, z)


def outcome_class(t: OutcomeTriple) -> OutcomeClass:
    return OutcomeClass(pauli_product_index(*t))


def _pairs(psi_register, ub_register):
    a, b, c = psi_register
    d, e, f, g = ub_register
    return d, ((a, e), (b, f), (c, g))


@dataclass(frozen=True, eq=False)
class ConcentrationResult:
    triple: OutcomeTriple
    probability: float
    pre_correction: DensityOperator
    d_state: DensityOperator
    events: tuple[Event, ...]

    @property
    def correction(self) -> int:
        return int(outcome_class(self.triple))


def concentrate(psi_abc: StateVector | DensityOperator, rho_ub: DensityOperator,
                forced: Optional[OutcomeTriple] = None,
                rng: Optional[np.random.Generator] = None,
                start_round: int = 1) -> ConcentrationResult:
    """Run the three Bell measurements and the controller's correction.

    Outcomes are drawn in the order Alice, Bob, Charlie, each conditioned on
    the earlier ones, so the returned probability is the joint Born
    probability of the triple.

    Args:
        psi_abc: Telecloned state on (ancilla, clone, clone); mixed states
            are accepted for probing.
        rho_ub: Smolin state; its first label is the controller's qubit.
        forced: Outcome triple to take instead of sampling.
        rng: Random source for sampled outcomes.
        start_round: Round number of the measurements in the event log.
    """
    if forced is not None:
        forced = OutcomeTriple(*forced)
    d, pairs = _pairs(psi_abc.register, rho_ub.register)
    state = kron(psi_abc, rho_ub)
    outcomes = []
    probability = 1.0
    events = []
    for n, (party, pair) in enumerate(zip(RECEIVERS, pairs)):
        outcome, p, state = bell_measure(
            state, pair, None if forced is None else forced[n], rng)
        outcomes.append(outcome)
        probability *= p
        events.append(Event(start_round, party, "measure", pair, outcome, p))
    for party, outcome in zip(RECEIVERS, outcomes):
        events.append(Event(start_round + 1, party, "send", (CONTROLLER,), outcome))
    triple = OutcomeTriple(*outcomes)
    correction = int(outcome_class(triple))
    pre = partial_trace(state, [d])
    post = apply(pre, pauli(correction), [d])
    events.append(Event(start_round + 2, CONTROLLER, "correct", (d,), correction))
    return ConcentrationResult(triple, probability, pre, post, tuple(events))


def concentrate_by_branches(psi_abc: StateVector, triple: OutcomeTriple,
                            labels=("D", "E", "F", "G")):
    """Cross-check of :func:`concentrate` using pure states only.

    The Smolin state is the uniform mixture of ``|Phi^i>|Phi^i>`` for
    i = 0..3; each branch is projected with state vectors and the four
    unnormalized results are mixed at the end.

    Returns:
        ``(probability, d_state)`` with the correction already applied.
    """
    d, pairs = _pairs(psi_abc.register, labels)
    mixture = np.zeros((2, 2), dtype=complex)
    for i in range(4):
        resource = StateVector(tuple(labels), np.kron(bell_vector(i), bell_vector(i)))
        joint = kron(psi_abc, resource)
        # Project each pair onto its Bell outcome, leaving qubit D.
        n = joint.num_qubits
        order = [joint.register.index(q) for pair in pairs for q in pair]
        order.append(joint.register.index(d))
        t = joint.amplitudes.reshape((2,) * n).transpose(order)
        for outcome in triple:
            t = np.tensordot(bell_vector(outcome).conj().reshape(2, 2), t, axes=([0, 1], [0, 1]))
        mixture += np.outer(t, t.conj()) / 4
    probability = float(np.real(np.trace(mixture)))
    c = pauli(int(outcome_class(triple)))
    return probability, DensityOperator((d,), c @ mixture @ c.conj().T / probability)


@dataclass(frozen=True)
class ConcentrationRow:
    triple: OutcomeTriple
    outcome_class: OutcomeClass
    probability: float
    pre_index: int
    pre_fidelity: float
    post_fidelity: float


def enumerate_concentration(amps: InputAmplitudes) -> list[ConcentrationRow]:
    """Force every one of the 64 outcome triples and tabulate the result.

    ``pre_index`` is the Pauli index ``i`` maximizing the overlap of the
    uncorrected state of D with ``pauli(i)|chi>``; ``pre_fidelity`` is the
    overlap with ``pauli(class)|chi>``.
    """
    psi = telecloned_input(amps)
    rho = smolin()
    chi = amps.chi("D")
    images = [StateVector(("D",), pauli(i) @ chi.amplitudes) for i in range(4)]
    rows = []
    for t in ALL_TRIPLES:
        res = concentrate(psi, rho, forced=t)
        overlaps = [fidelity(res.pre_correction, im) for im in images]
        cls = outcome_class(t)
        rows.append(ConcentrationRow(
            t, cls, res.probability, int(np.argmax(overlaps)),
            overlaps[int(cls)], fidelity(res.d_state, chi)))
    return rows
