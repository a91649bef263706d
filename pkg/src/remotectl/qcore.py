"""Dense linear algebra on labeled multi-qubit registers.

Registers are tuples of string labels. The first label is the most
significant bit of the computational-basis index, so ``("X", "Y")`` with
amplitudes ``[a00, a01, a10, a11]`` puts ``X`` on the left of every ket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

ATOL = 1e-12
PSD_ATOL = 1e-10
IMPOSSIBLE_PROBABILITY = 1e-14
MAX_QUBITS = 12

_SQRT1_2 = 1 / np.sqrt(2)


class QubitLabelError(ValueError):
    """A label is unknown, duplicated, or collides with another register."""


class DimensionError(ValueError):
    """Operator or state dimensions are incompatible."""


class NotPhysicalError(ValueError):
    """A vector or matrix violates the state invariants."""


class ImpossibleOutcomeError(ValueError):
    """A forced measurement outcome has (near-)zero probability."""


def _register(labels: Sequence[str]) -> tuple[str, ...]:
    register = tuple(labels)
    if len(set(register)) != len(register):
        raise QubitLabelError(f"duplicate labels in register {register}")
    if len(register) > MAX_QUBITS:
        raise DimensionError(
            f"{len(register)} qubits exceeds the {MAX_QUBITS}-qubit limit")
    return register


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state: unit-norm amplitudes over ``register``."""

    register: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        register = _register(self.register)
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        if amplitudes.shape != (2 ** len(register),):
            raise DimensionError(
                f"{amplitudes.size} amplitudes for {len(register)} qubits")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1) > ATOL:
            raise NotPhysicalError(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def density(self) -> DensityOperator:
        """Projector ``|psi><psi|`` on the same register."""
        v = self.amplitudes
        return DensityOperator._trusted(self.register, np.outer(v, v.conj()))

    def relabel(self, labels: Sequence[str]) -> StateVector:
        return StateVector(tuple(labels), self.amplitudes)

    @classmethod
    def _trusted(cls, register, amplitudes) -> StateVector:
        obj = object.__new__(cls)
        object.__setattr__(obj, "register", tuple(register))
        object.__setattr__(obj, "amplitudes", _frozen(amplitudes))
        return obj


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state: Hermitian, positive semidefinite, unit trace.

    The public constructor checks every invariant, including the spectrum.
    Operations in this module produce states through completely positive
    maps and skip the eigendecomposition.
    """

    register: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        register = _register(self.register)
        matrix = _frozen(self.matrix)
        dim = 2 ** len(register)
        if matrix.shape != (dim, dim):
            raise DimensionError(
                f"matrix shape {matrix.shape} for {len(register)} qubits")
        if not np.allclose(matrix, matrix.conj().T, rtol=0, atol=ATOL):
            raise NotPhysicalError("matrix is not Hermitian")
        trace = np.trace(matrix)
        if abs(trace - 1) > ATOL:
            raise NotPhysicalError(f"trace is {trace!r}, expected 1")
        min_eig = np.linalg.eigvalsh(matrix)[0]
        if min_eig < -PSD_ATOL:
            raise NotPhysicalError(f"minimum eigenvalue {min_eig!r} < 0")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "matrix", matrix)

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def relabel(self, labels: Sequence[str]) -> DensityOperator:
        labels = _register(labels)
        if len(labels) != self.num_qubits:
            raise DimensionError("relabel must keep the register size")
        return DensityOperator._trusted(labels, self.matrix)

    def reorder(self, labels: Sequence[str]) -> DensityOperator:
        """Same state with the tensor factors permuted into ``labels`` order."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.register):
            raise QubitLabelError(f"{labels} is not a permutation of {self.register}")
        n = self.num_qubits
        perm = [self.register.index(q) for q in labels]
        t = self.matrix.reshape((2,) * (2 * n))
        t = t.transpose(perm + [n + p for p in perm])
        return DensityOperator._trusted(labels, t.reshape(2 ** n, 2 ** n))

    @classmethod
    def _trusted(cls, register, matrix) -> DensityOperator:
        obj = object.__new__(cls)
        object.__setattr__(obj, "register", tuple(register))
        object.__setattr__(obj, "matrix", _frozen(matrix))
        return obj


State = Union[StateVector, DensityOperator]

# PauliIndex bit encoding (x_bit, z_bit): 0=(0,0) I, 1=(0,1) Z, 2=(1,0) X, 3=(1,1) ZX
_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, 1], [-1, 0]], dtype=complex),
)
for _p in _PAULIS:
    _p.flags.writeable = False

_BELL = (
    np.array([1, 0, 0, 1], dtype=complex) * _SQRT1_2,
    np.array([1, 0, 0, -1], dtype=complex) * _SQRT1_2,
    np.array([0, 1, 1, 0], dtype=complex) * _SQRT1_2,
    np.array([0, 1, -1, 0], dtype=complex) * _SQRT1_2,
)
for _b in _BELL:
    _b.flags.writeable = False


def _check_index(i: int) -> int:
    if i not in (0, 1, 2, 3):
        raise ValueError(f"index must be in 0..3, got {i!r}")
    return int(i)


def pauli(i: int) -> np.ndarray:
    """Pauli operator for index ``i``: I, Z, X, ZX (ZX = iY)."""
    return _PAULIS[_check_index(i)]


def pauli_bits(i: int) -> tuple[int, int]:
    """``(x_bit, z_bit)`` of a Pauli index."""
    i = _check_index(i)
    return i >> 1, i & 1


def pauli_from_bits(x_bit: int, z_bit: int) -> int:
    return (x_bit << 1) | z_bit


def bell_vector(i: int) -> np.ndarray:
    """Amplitudes of Bell state ``i`` on two qubits."""
    return _BELL[_check_index(i)]


def basis_state(bits: str, register: Sequence[str]) -> StateVector:
    """Computational basis state, e.g. ``basis_state("01", ("X", "Y"))``."""
    register = tuple(register)
    if len(bits) != len(register) or set(bits) - {"0", "1"}:
        raise ValueError(f"bad bit string {bits!r} for register {register}")
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2) if bits else 0] = 1
    return StateVector(register, v)


def kron(a: State, b: State) -> State:
    """Tensor product; the result register is ``a``'s labels then ``b``'s."""
    overlap = set(a.register) & set(b.register)
    if overlap:
        raise QubitLabelError(f"registers overlap on {sorted(overlap)}")
    register = _register(a.register + b.register)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector._trusted(register, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, StateVector):
        a = a.density()
    if isinstance(b, StateVector):
        b = b.density()
    return DensityOperator._trusted(register, np.kron(a.matrix, b.matrix))


def _positions(register: tuple[str, ...], labels: Sequence[str]) -> list[int]:
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise QubitLabelError(f"repeated labels in {labels}")
    try:
        return [register.index(q) for q in labels]
    except ValueError:
        missing = [q for q in labels if q not in register]
        raise QubitLabelError(f"labels {missing} not in register {register}") from None


def _act(tensor: np.ndarray, g: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract ``g`` into ``axes`` of a rank-n qubit tensor."""
    k = len(axes)
    moved = np.moveaxis(tensor, axes, range(k))
    shape = moved.shape
    out = (g @ moved.reshape(2 ** k, -1)).reshape(shape)
    return np.moveaxis(out, range(k), axes)


def apply(s: State, g: np.ndarray, targets: Sequence[str]) -> State:
    """Apply operator ``g`` to ``targets`` (``g psi`` or ``g rho g^dagger``).

    The operator's first tensor factor acts on ``targets[0]``.
    """
    g = np.asarray(g, dtype=complex)
    axes = _positions(s.register, targets)
    k = len(axes)
    if g.shape != (2 ** k, 2 ** k):
        raise DimensionError(f"operator shape {g.shape} for {k} target qubits")
    n = s.num_qubits
    if isinstance(s, StateVector):
        t = _act(s.amplitudes.reshape((2,) * n), g, axes)
        return StateVector._trusted(s.register, t.reshape(-1))
    t = s.matrix.reshape((2,) * (2 * n))
    t = _act(t, g, axes)
    t = _act(t, g.conj(), [n + a for a in axes])
    return DensityOperator._trusted(s.register, t.reshape(2 ** n, 2 ** n))


def as_density(s: State) -> DensityOperator:
    return s.density() if isinstance(s, StateVector) else s


def partial_trace(rho: State, keep: Sequence[str]) -> DensityOperator:
    """Reduced state on ``keep``, in the order given."""
    rho = as_density(rho)
    if not keep:
        raise QubitLabelError("keep list is empty")
    kept = _positions(rho.register, keep)
    n = rho.num_qubits
    traced = [i for i in range(n) if i not in kept]
    t = rho.matrix.reshape((2,) * (2 * n))
    t = t.transpose(kept + traced + [n + i for i in kept] + [n + i for i in traced])
    dk, dt = 2 ** len(kept), 2 ** len(traced)
    reduced = np.einsum("itjt->ij", t.reshape(dk, dt, dk, dt))
    return DensityOperator._trusted(tuple(keep), reduced)


def partial_transpose(rho: State, subset: Sequence[str]) -> np.ndarray:
    """Matrix of ``rho`` transposed on the ``subset`` tensor factors only."""
    rho = as_density(rho)
    axes = _positions(rho.register, subset)
    n = rho.num_qubits
    perm = list(range(2 * n))
    for a in axes:
        perm[a], perm[n + a] = perm[n + a], perm[a]
    t = rho.matrix.reshape((2,) * (2 * n)).transpose(perm)
    return t.reshape(2 ** n, 2 ** n)


def _bell_branches(s: State, pair: Sequence[str]):
    """Unnormalized post-measurement operators on the rest, one per outcome."""
    if len(pair) != 2:
        raise QubitLabelError(f"a Bell measurement needs two labels, got {pair}")
    axes = _positions(s.register, pair)
    n = s.num_qubits
    rest = tuple(q for q in s.register if q not in pair)
    others = [i for i in range(n) if i not in axes]
    bras = np.conj(np.stack(_BELL))
    if isinstance(s, StateVector):
        t = s.amplitudes.reshape((2,) * n).transpose(axes + others).reshape(4, -1)
        vecs = bras @ t
        branches = np.einsum("ki,kj->kij", vecs, vecs.conj())
    else:
        t = s.matrix.reshape((2,) * (2 * n))
        t = t.transpose(axes + others + [n + a for a in axes] + [n + o for o in others])
        r = 2 ** len(others)
        t = t.reshape(4, r, 4, r)
        branches = np.einsum("ka,aibj,kb->kij", bras, t, bras.conj())
    probs = np.real(np.einsum("kii->k", branches))
    return rest, probs, branches


def bell_probabilities(s: State, pair: Sequence[str]) -> np.ndarray:
    """Born probabilities of the four Bell outcomes on ``pair``."""
    return _bell_branches(s, pair)[1]


def sample_outcome(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one outcome by inverse CDF: the smallest ``i`` with ``u < cdf[i]``.

    Exactly one ``rng.random()`` double is consumed per call.
    """
    u = rng.random()
    cdf = np.cumsum(probabilities)
    i = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(i, len(probabilities) - 1)


def bell_measure(s: State, pair: Sequence[str], forced: int | None = None,
                 rng: np.random.Generator | None = None):
    """Bell-basis measurement of ``pair``.

    Args:
        s: State containing both labels of ``pair``.
        pair: The two measured qubits; the first is the left factor of the
            Bell kets.
        forced: Take this outcome instead of sampling.
        rng: Random source used when ``forced`` is None.

    Returns:
        ``(outcome, probability, post)`` where ``post`` is the normalized
        state of the remaining qubits.

    Raises:
        ImpossibleOutcomeError: ``forced`` has probability below 1e-14.
    """
    rest, probs, branches = _bell_branches(s, pair)
    if forced is None:
        if rng is None:
            raise ValueError("either forced or rng is required")
        outcome = sample_outcome(probs, rng)
    else:
        outcome = _check_index(forced)
    p = float(probs[outcome])
    if p <= IMPOSSIBLE_PROBABILITY:
        raise ImpossibleOutcomeError(
            f"Bell outcome {outcome} on {tuple(pair)} has probability {p!r}")
    post = branches[outcome] / p
    if not rest:
        post = np.ones((1, 1), dtype=complex)
    return outcome, p, DensityOperator._trusted(rest, post)


def fidelity(rho: State, psi: StateVector) -> float:
    """Overlap ``<psi|rho|psi>`` with a pure reference state."""
    if rho.register != psi.register:
        raise QubitLabelError(
            f"register mismatch: {rho.register} vs {psi.register}")
    v = psi.amplitudes
    if isinstance(rho, StateVector):
        return float(abs(np.vdot(v, rho.amplitudes)) ** 2)
    return float(np.real(np.vdot(v, rho.matrix @ v)))


def trace_distance(a: State, b: State) -> float:
    """Half the trace norm of ``a - b``."""
    a, b = as_density(a), as_density(b)
    if a.matrix.shape != b.matrix.shape:
        raise DimensionError(
            f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u, dtype=complex)
    return (u.ndim == 2 and u.shape[0] == u.shape[1]
            and np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol))
