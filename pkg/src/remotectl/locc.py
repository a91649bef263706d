"""Four-party orchestration under local operations and classical communication.

A referee holds the global quantum state and resolves measurements. Every
action is logged as an :class:`~remotectl.transcript.Event` attributed to
the party that performs it, which lets :func:`ownership_check` confirm after
the fact that each party only touched its own qubits and only acted on
classical information it had already received.

Random outcomes come from ``numpy.random.default_rng(seed)`` (PCG64 seeded
through ``SeedSequence``). Each Bell measurement consumes one
``rng.random()`` double ``u`` and takes the smallest outcome whose
cumulative probability exceeds ``u``; measurements happen in the order
Alice, Bob, Charlie, Controller.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .concentrate import OutcomeTriple, concentrate, pauli_product_index
from .qcore import (ImpossibleOutcomeError, StateVector, fidelity,
                    partial_trace, trace_distance)
from .redistribute import (ControlUnitary, apply_control,
                           distribution_correction, receiver_marginals,
                           teleclone_out)
from .states import (InputAmplitudes, distribution_resource, smolin,
                     telecloned_input)
from .transcript import BROADCAST, Event, Transcript

CONTROLLER = "Controller"
RECEIVERS = ("Alice", "Bob", "Charlie")
OWNERSHIP = {
    "Controller": frozenset({"D", "P"}),
    "Alice": frozenset({"A", "E", "A'"}),
    "Bob": frozenset({"B", "F", "B'"}),
    "Charlie": frozenset({"C", "G", "C'"}),
}
CLONE_FIDELITY = 5 / 6
DEFAULT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Party:
    name: str
    owned: frozenset

    @classmethod
    def all(cls) -> list[Party]:
        return [cls(name, owned) for name, owned in OWNERSHIP.items()]


class TranscriptMismatchError(ValueError):
    """Re-execution of a transcript diverged from what it records."""


@dataclass(frozen=True, eq=False)
class ProtocolReport:
    alpha: float
    beta: float
    unitary: np.ndarray
    triple: tuple[int, int, int]
    triple_probability: float
    distribution_outcome: int
    distribution_probability: float
    fidelity_d: float
    fidelity_bprime: float
    fidelity_cprime: float
    trace_distance_theorem: float
    tolerance: float
    passed: bool

    def matches(self, other: ProtocolReport, atol: float = 1e-14) -> bool:
        """Same outcomes, and every real-valued field within ``atol``."""
        if (self.triple != other.triple
                or self.distribution_outcome != other.distribution_outcome
                or self.passed != other.passed):
            return False
        numbers = ("alpha", "beta", "triple_probability", "distribution_probability",
                   "fidelity_d", "fidelity_bprime", "fidelity_cprime",
                   "trace_distance_theorem")
        return (all(abs(getattr(self, f) - getattr(other, f)) <= atol for f in numbers)
                and np.allclose(self.unitary, other.unitary, rtol=0, atol=atol))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["unitary"] = [[[z.real, z.imag] for z in row] for row in self.unitary.tolist()]
        d["triple"] = list(self.triple)
        return d


def run_protocol(amps: InputAmplitudes, u: ControlUnitary, seed: Optional[int] = None,
                 forced_triple: Optional[OutcomeTriple] = None,
                 forced_distribution: Optional[int] = None,
                 tolerance: float = DEFAULT_TOLERANCE) -> tuple[ProtocolReport, Transcript]:
    """Run concentration, control and redistribution end to end.

    Outcomes are sampled from ``seed`` unless forced. The report checks the
    concentrated qubit against ``|chi>``, both final clones against the
    optimal 5/6 fidelity with ``U|chi>``, and the final clone marginals
    against ``U rho U^dagger`` of the initial ones.
    """
    if amps.complex_mode:
        raise ValueError("protocol runs take real amplitudes")
    if not isinstance(u, ControlUnitary):
        u = ControlUnitary(u)
    rng = np.random.default_rng(seed)
    psi = telecloned_input(amps)

    stage1 = concentrate(psi, smolin(), forced_triple, rng, start_round=1)
    chi_prime = apply_control(stage1.d_state, u)
    control = Event(4, CONTROLLER, "control", ("D",))
    stage3 = teleclone_out(chi_prime, distribution_resource(), forced_distribution,
                           rng, start_round=5)

    chi = amps.chi("D")
    target = u.matrix @ chi.amplitudes
    rho_b, rho_c = partial_trace(psi, ["B"]), partial_trace(psi, ["C"])
    rho_bp, rho_cp = receiver_marginals(stage3.psi_prime)
    fid_d = fidelity(stage1.d_state, chi)
    fid_b = fidelity(rho_bp, StateVector(("B'",), target))
    fid_c = fidelity(rho_cp, StateVector(("C'",), target))
    distance = max(
        trace_distance(rho_bp, apply_control(rho_b, u)),
        trace_distance(rho_cp, apply_control(rho_c, u)),
    )
    passed = (abs(fid_d - 1) <= tolerance
              and abs(fid_b - CLONE_FIDELITY) <= tolerance
              and abs(fid_c - CLONE_FIDELITY) <= tolerance
              and distance <= tolerance)
    report = ProtocolReport(
        float(amps.alpha), float(amps.beta), u.matrix, tuple(stage1.triple),
        stage1.probability, stage3.outcome, stage3.probability,
        fid_d, fid_b, fid_c, distance, tolerance, bool(passed))
    events = stage1.events + (control,) + stage3.events
    transcript = Transcript(seed, float(amps.alpha), float(amps.beta), u.matrix, events)
    return report, transcript


@dataclass(frozen=True)
class Violation:
    index: int
    event: Event
    reason: str

    def __str__(self):
        return f"event {self.index} ({self.event.to_json()}): {self.reason}"


def ownership_check(t: Transcript) -> list[Violation]:
    """LOCC audit of a transcript; an empty list means it passes.

    Checks that quantum operations touch only the acting party's qubits,
    that messages carry only outcomes the sender has observed, and that
    every correction comes after (and agrees with) the messages it needs.
    """
    violations = []
    observed = {name: [] for name in OWNERSHIP}
    inbox = {name: [] for name in OWNERSHIP}  # (round, sender, payload)
    last_sent = {}
    last_round = None

    def flag(i, e, reason):
        violations.append(Violation(i, e, reason))

    for i, e in enumerate(t.events):
        if last_round is not None and e.round < last_round:
            flag(i, e, f"round {e.round} after round {last_round}")
        last_round = e.round
        if e.party not in OWNERSHIP:
            flag(i, e, f"unknown party {e.party!r}")
            continue
        owned = OWNERSHIP[e.party]

        if e.kind == "send":
            recipient = e.targets[0] if len(e.targets) == 1 else None
            if recipient != BROADCAST and recipient not in OWNERSHIP:
                flag(i, e, f"bad recipient {e.targets!r}")
                continue
            if e.outcome not in (0, 1, 2, 3):
                flag(i, e, f"payload {e.outcome!r} is not two bits")
            elif e.outcome not in observed[e.party]:
                flag(i, e, f"{e.party} sends an outcome it never observed")
            if e.party in last_sent and e.round <= last_sent[e.party]:
                flag(i, e, f"{e.party} sends twice without advancing the round")
            last_sent[e.party] = e.round
            recipients = [p for p in OWNERSHIP if p != e.party] if recipient == BROADCAST else [recipient]
            for p in recipients:
                inbox[p].append((e.round, e.party, e.outcome))
            continue

        if e.kind == "measure":
            observed[e.party].append(e.outcome)
        outside = [q for q in e.targets if q not in owned]
        if outside:
            flag(i, e, f"{e.party} acts on {outside}, which it does not hold")
            continue

        if e.kind == "measure":
            if len(e.targets) != 2:
                flag(i, e, "a Bell measurement needs two qubits")
        elif e.kind == "correct":
            delivered = [(s, p) for r, s, p in inbox[e.party] if r < e.round]
            latest = dict(delivered)
            if e.party == CONTROLLER:
                missing = [r for r in RECEIVERS if r not in latest]
                if missing:
                    flag(i, e, f"correction before messages from {missing}")
                elif e.outcome != pauli_product_index(*(latest[r] for r in RECEIVERS)):
                    flag(i, e, "correction disagrees with the received outcomes")
            else:
                if CONTROLLER not in latest:
                    flag(i, e, "correction before the controller's broadcast")
                elif e.outcome != distribution_correction(latest[CONTROLLER]):
                    flag(i, e, "correction disagrees with the broadcast outcome")
    return violations


def classical_bits(t: Transcript) -> dict[str, int]:
    """Classical communication cost by channel."""
    msgs = t.messages()
    return {
        "to_controller": sum(m.bits for m in msgs if m.recipient == CONTROLLER),
        "broadcast": sum(m.bits for m in msgs if m.recipient == BROADCAST),
        "total": sum(m.bits for m in msgs),
    }


def _forced_outcomes(t: Transcript):
    try:
        triple = OutcomeTriple(*(t.measurements(p)[0].outcome for p in RECEIVERS))
        distribution = t.measurements(CONTROLLER)[0].outcome
    except IndexError:
        raise TranscriptMismatchError("transcript lacks a required measurement") from None
    return triple, distribution


def replay(t: Transcript, tolerance: float = DEFAULT_TOLERANCE) -> ProtocolReport:
    """Re-execute a transcript with its recorded outcomes forced.

    Raises:
        TranscriptMismatchError: A recorded outcome is impossible, or any
            re-executed event differs from the recorded one.
    """
    triple, distribution = _forced_outcomes(t)
    amps = InputAmplitudes(t.alpha, t.beta)
    try:
        report, fresh = run_protocol(amps, ControlUnitary(t.unitary), t.seed,
                                     triple, distribution, tolerance)
    except (ImpossibleOutcomeError, ValueError) as exc:
        raise TranscriptMismatchError(str(exc)) from exc
    if len(fresh.events) != len(t.events):
        raise TranscriptMismatchError(
            f"{len(t.events)} recorded events, {len(fresh.events)} re-executed")
    for i, (old, new) in enumerate(zip(t.events, fresh.events)):
        same_prob = (old.probability is None) == (new.probability is None) and (
            old.probability is None or abs(old.probability - new.probability) <= 1e-14)
        if (old.round, old.party, old.kind, old.targets, old.outcome) != \
                (new.round, new.party, new.kind, new.targets, new.outcome) or not same_prob:
            raise TranscriptMismatchError(
                f"event {i} differs: recorded {old.to_json()}, replayed {new.to_json()}")
    return report
