"""Stages two and three: the controller's unitary and telecloning it back out."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qcore import (DensityOperator, StateVector, apply, as_density,
                    bell_measure, is_unitary, kron, partial_trace, pauli)
from .transcript import BROADCAST, Event

CONTROLLER = "Controller"
RECEIVER_OF = {"A'": "Alice", "B'": "Bob", "C'": "Charlie"}

_GATES = {
    "identity": np.eye(2),
    "x": np.array([[0, 1], [1, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
    "hadamard": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
}


class NotUnitaryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ControlUnitary:
    """A 2x2 unitary the controller applies to its qubit."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2) or not is_unitary(m):
            raise NotUnitaryError(f"not a 2x2 unitary:\n{m}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def named(cls, name: str, angle: Optional[float] = None) -> ControlUnitary:
        """One of identity, x, z, hadamard, or phase (``diag(1, e^{i angle})``)."""
        if name == "phase":
            if angle is None:
                raise ValueError("phase gate needs an angle")
            return cls(np.diag([1, np.exp(1j * angle)]))
        try:
            return cls(_GATES[name])
        except KeyError:
            raise ValueError(f"unknown gate {name!r}") from None

    @classmethod
    def random(cls, rng: np.random.Generator) -> ControlUnitary:
        """Haar-random unitary (QR of a complex Ginibre matrix)."""
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        return cls(q * (d / abs(d)))

    def output_presentation(self, chi: StateVector) -> tuple[float, float, float]:
        """``(alpha', beta', theta)`` with ``U|chi> ~ alpha'|0> + beta' e^{i theta}|1>``.

        theta lies in (0, 2*pi]; it is 2*pi whenever either amplitude vanishes.
        """
        v = self.matrix @ chi.amplitudes
        a, b = abs(v[0]), abs(v[1])
        if a < 1e-15 or b < 1e-15:
            theta = 2 * np.pi
        else:
            theta = float(np.angle(v[1]) - np.angle(v[0])) % (2 * np.pi)
            if theta == 0:
                theta = 2 * np.pi
        return float(a), float(b), theta


def transformed_chi(alpha_p: float, beta_p: float, theta: float,
                    label: str = "D") -> StateVector:
    return StateVector((label,), [alpha_p, beta_p * np.exp(1j * theta)])


def apply_control(d_state: DensityOperator, u: ControlUnitary | np.ndarray) -> DensityOperator:
    if not isinstance(u, ControlUnitary):
        u = ControlUnitary(u)
    if d_state.num_qubits != 1:
        raise ValueError("the control acts on a single-qubit state")
    return apply(d_state, u.matrix, d_state.register)


def distribution_correction(i: int) -> int:
    """Pauli index each receiver applies after Bell outcome ``i`` on (D, P).

    Outcome 0 needs nothing, 1 a phase flip, 2 a bit flip and 3 both: the
    receivers' three-fold Pauli maps each branch of the expanded joint
    state back to ``alpha'|phi_0> + beta' e^{i theta}|phi_1>``.
    """
    if i not in (0, 1, 2, 3):
        raise ValueError(f"Bell index must be in 0..3, got {i!r}")
    return int(i)


@dataclass(frozen=True, eq=False)
class TelecloneResult:
    outcome: int
    probability: float
    psi_prime: DensityOperator
    events: tuple[Event, ...]


def teleclone_out(chi_prime: DensityOperator | StateVector, resource: StateVector,
                  forced: Optional[int] = None,
                  rng: Optional[np.random.Generator] = None,
                  start_round: int = 5) -> TelecloneResult:
    """Bell-measure (D, P), broadcast, and correct A', B', C'.

    ``resource`` is the four-qubit distribution state with the port qubit
    first; its last three labels are the ancilla and the two clones.
    """
    chi_prime = as_density(chi_prime)
    d = chi_prime.register[0]
    port, *outputs = resource.register
    joint = kron(chi_prime, resource)
    outcome, p, state = bell_measure(joint, (d, port), forced, rng)
    correction = distribution_correction(outcome)
    events = [Event(start_round, CONTROLLER, "measure", (d, port), outcome, p),
              Event(start_round + 1, CONTROLLER, "send", (BROADCAST,), outcome)]
    for q in outputs:
        state = apply(state, pauli(correction), [q])
        events.append(Event(start_round + 2, RECEIVER_OF.get(q, q), "correct",
                            (q,), correction))
    return TelecloneResult(outcome, p, state, tuple(events))


def receiver_marginals(psi_prime: DensityOperator) -> tuple[DensityOperator, DensityOperator]:
    """Reduced states of the two clone qubits (second and third labels)."""
    if psi_prime.num_qubits != 3:
        raise ValueError("expected a three-qubit state (ancilla, clone, clone)")
    _, b, c = psi_prime.register
    return partial_trace(psi_prime, [b]), partial_trace(psi_prime, [c])
