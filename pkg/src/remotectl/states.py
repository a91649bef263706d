"""Resource states: telecloning basis, Bell states, Smolin state, distribution resource."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import (ATOL, DensityOperator, NotPhysicalError, StateVector,
                    bell_vector)

ABC = ("A", "B", "C")
DEFG = ("D", "E", "F", "G")
PABC_PRIME = ("P", "A'", "B'", "C'")

_TWO_THIRDS = np.sqrt(2 / 3)
_ONE_SIXTH = np.sqrt(1 / 6)


@dataclass(frozen=True)
class InputAmplitudes:
    """Coefficients of ``alpha|0> + beta|1>``.

    Real by default. With ``complex_mode`` set, complex coefficients are
    accepted and the norm condition becomes ``|alpha|^2 + |beta|^2 = 1``.
    """

    alpha: complex
    beta: complex
    complex_mode: bool = False

    def __post_init__(self):
        if not self.complex_mode:
            for name in ("alpha", "beta"):
                value = complex(getattr(self, name))
                if value.imag != 0:
                    raise NotPhysicalError(
                        f"{name}={value!r} is complex; set complex_mode=True")
                object.__setattr__(self, name, value.real)
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm2 - 1) > ATOL:
            raise NotPhysicalError(
                f"alpha^2 + beta^2 = {norm2!r}, expected 1")

    @classmethod
    def from_angle(cls, angle: float) -> InputAmplitudes:
        """``(cos angle, sin angle)``, normalized by construction."""
        return cls(float(np.cos(angle)), float(np.sin(angle)))

    def chi(self, label: str = "D") -> StateVector:
        """The single-qubit state these amplitudes describe."""
        return StateVector((label,), [self.alpha, self.beta])


def phi_basis(b: int, register: Sequence[str] = ABC) -> StateVector:
    """Telecloning logical state ``|phi_b>`` on (ancilla, clone, clone).

    ``|phi_0> = sqrt(2/3)|000> + sqrt(1/6)(|101> + |110>)`` and
    ``|phi_1>`` is its bitwise complement.
    """
    if b not in (0, 1):
        raise ValueError(f"b must be 0 or 1, got {b!r}")
    v = np.zeros(8, dtype=complex)
    v[0b000] = _TWO_THIRDS
    v[0b101] = _ONE_SIXTH
    v[0b110] = _ONE_SIXTH
    if b == 1:
        v = v[::-1]
    return StateVector(tuple(register), v)


def telecloned_input(amps: InputAmplitudes,
                     register: Sequence[str] = ABC) -> StateVector:
    """``alpha|phi_0> + beta|phi_1>``: the output of 1->2 telecloning."""
    v = (amps.alpha * phi_basis(0).amplitudes
         + amps.beta * phi_basis(1).amplitudes)
    return StateVector(tuple(register), v)


def bell_state(i: int, register: Sequence[str] = ("X", "Y")) -> StateVector:
    return StateVector(tuple(register), bell_vector(i))


def smolin(labels: Sequence[str] = DEFG) -> DensityOperator:
    """Four-qubit unlockable bound entangled state.

    ``(1/4) sum_i |Phi^i><Phi^i|_{12} (x) |Phi^i><Phi^i|_{34}`` for labels
    ``(1, 2, 3, 4)``.
    """
    labels = tuple(labels)
    if len(labels) != 4:
        raise ValueError(f"need four labels, got {labels}")
    rho = np.zeros((16, 16), dtype=complex)
    for i in range(4):
        v = np.kron(bell_vector(i), bell_vector(i))
        rho += np.outer(v, v.conj()) / 4
    return DensityOperator(labels, rho)


def distribution_resource(register: Sequence[str] = PABC_PRIME) -> StateVector:
    """``(|0>|phi_0> + |1>|phi_1>)/sqrt(2)`` with the port qubit first."""
    v = np.concatenate([phi_basis(0).amplitudes, phi_basis(1).amplitudes])
    return StateVector(tuple(register), v / np.sqrt(2))


def optimal_clone(chi: StateVector) -> DensityOperator:
    """``(5/6)|chi><chi| + (1/6)|chi_perp><chi_perp|`` = ``(2/3)|chi><chi| + I/6``."""
    if chi.num_qubits != 1:
        raise ValueError("optimal_clone takes a single-qubit state")
    proj = chi.density().matrix
    return DensityOperator(chi.register, (2 / 3) * proj + np.eye(2) / 6)
