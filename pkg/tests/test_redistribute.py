import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remotectl.qcore import (DensityOperator, StateVector, basis_state,
                             fidelity, partial_trace, pauli, trace_distance)
from remotectl.redistribute import (ControlUnitary, NotUnitaryError,
                                    apply_control, distribution_correction,
                                    receiver_marginals, teleclone_out,
                                    transformed_chi)
from remotectl.states import (distribution_resource, optimal_clone,
                              phi_basis)

from oracles import bell_by_hand, ket

ATOL = 1e-12
PRIMES = ("A'", "B'", "C'")


def target_state(a, b, theta):
    v = a * phi_basis(0).amplitudes + b * np.exp(1j * theta) * phi_basis(1).amplitudes
    return StateVector(PRIMES, v)


class TestControlUnitary:
    def test_rejects_non_unitary(self):
        with pytest.raises(NotUnitaryError):
            ControlUnitary([[1, 1], [0, 1]])

    def test_named_gates(self):
        for name in ("identity", "x", "z", "hadamard"):
            ControlUnitary.named(name)
        np.testing.assert_allclose(ControlUnitary.named("phase", np.pi).matrix, np.diag([1, -1]))
        with pytest.raises(ValueError):
            ControlUnitary.named("toffoli")

    def test_presentation(self):
        chi = StateVector(("D",), [0.6, 0.8])
        a, b, theta = ControlUnitary.named("phase", 0.5).output_presentation(chi)
        assert (a, b) == pytest.approx((0.6, 0.8))
        assert theta == pytest.approx(0.5)

    def test_presentation_degenerate_theta(self):
        a, b, theta = ControlUnitary.named("identity").output_presentation(basis_state("0", "D"))
        assert (a, b, theta) == (1.0, 0.0, 2 * np.pi)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_presentation_reconstructs_state(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        chi = StateVector(("D",), v / np.linalg.norm(v))
        u = ControlUnitary.random(rng)
        a, b, theta = u.output_presentation(chi)
        assert 0 < theta <= 2 * np.pi
        assert a ** 2 + b ** 2 == pytest.approx(1, abs=ATOL)
        assert fidelity(transformed_chi(a, b, theta), StateVector(("D",), u.matrix @ chi.amplitudes)) \
            == pytest.approx(1, abs=ATOL)


class TestApplyControl:
    def test_identity(self):
        rho = DensityOperator(("D",), [[0.7, 0.1j], [-0.1j, 0.3]])
        np.testing.assert_allclose(apply_control(rho, ControlUnitary.named("identity")).matrix,
                                   rho.matrix)

    def test_bit_flip(self):
        out = apply_control(basis_state("0", "D").density(), ControlUnitary.named("x"))
        np.testing.assert_allclose(out.matrix, np.diag([0, 1]))

    def test_hadamard(self):
        out = apply_control(basis_state("0", "D").density(), ControlUnitary.named("hadamard"))
        np.testing.assert_allclose(out.matrix, np.full((2, 2), 0.5), atol=ATOL)

    def test_accepts_raw_matrix_and_checks_it(self):
        rho = basis_state("0", "D").density()
        apply_control(rho, np.eye(2))
        with pytest.raises(NotUnitaryError):
            apply_control(rho, 2 * np.eye(2))


class TestDistributionCorrection:
    def test_table(self):
        assert [distribution_correction(i) for i in range(4)] == [0, 1, 2, 3]

    def test_phase_flip_branch(self):
        a, b, theta = 0.6, 0.8, 1.1
        z3 = np.kron(np.kron(pauli(1), pauli(1)), pauli(1))
        branch = a * phi_basis(0).amplitudes - b * np.exp(1j * theta) * phi_basis(1).amplitudes
        np.testing.assert_allclose(z3 @ branch, target_state(a, b, theta).amplitudes, atol=ATOL)

    def test_bit_flip_branch_exchanges_basis(self):
        x3 = np.kron(np.kron(pauli(2), pauli(2)), pauli(2))
        np.testing.assert_allclose(x3 @ phi_basis(0).amplitudes, phi_basis(1).amplitudes)
        np.testing.assert_allclose(x3 @ phi_basis(1).amplitudes, phi_basis(0).amplitudes)

    def test_branch_expansion(self):
        # (a|0> + b e^{it}|1>)_D (x) resource, regrouped on the Bell basis of (D, P)
        a, b, theta = 0.28, 0.96, 2.5
        e = b * np.exp(1j * theta)
        p0, p1 = phi_basis(0).amplitudes, phi_basis(1).amplitudes
        joint = np.kron(np.array([a, e]), distribution_resource().amplitudes).reshape(4, 8)
        branches = {
            0: a * p0 + e * p1,
            1: a * p0 - e * p1,
            2: a * p1 + e * p0,
            3: a * p1 - e * p0,
        }
        for i in range(4):
            projected = bell_by_hand(i).conj() @ joint
            np.testing.assert_allclose(projected, branches[i] / 2, atol=ATOL)

    def test_bad_index(self):
        with pytest.raises(ValueError):
            distribution_correction(4)


class TestTelecloneOut:
    @given(st.floats(0, 1), st.floats(0, 2 * np.pi))
    @settings(max_examples=20, deadline=None)
    def test_every_outcome_yields_target(self, a2, theta):
        a, b = np.sqrt(a2), np.sqrt(1 - a2)
        chi_p = transformed_chi(a, b, theta)
        target = target_state(a, b, theta)
        states = []
        for i in range(4):
            res = teleclone_out(chi_p, distribution_resource(), forced=i)
            assert res.probability == pytest.approx(0.25, abs=ATOL)
            assert fidelity(res.psi_prime, target) == pytest.approx(1, abs=1e-10)
            states.append(res.psi_prime)
        for s in states[1:]:
            assert trace_distance(s, states[0]) <= ATOL

    def test_degenerate_input(self):
        res = teleclone_out(basis_state("0", "D"), distribution_resource(),
                            rng=np.random.default_rng(3))
        np.testing.assert_allclose(res.psi_prime.matrix, phi_basis(0, PRIMES).density().matrix,
                                   atol=ATOL)

    def test_clone_exchange_symmetry(self):
        res = teleclone_out(transformed_chi(0.6, 0.8, 0.3), distribution_resource(), forced=3)
        swapped = res.psi_prime.reorder(("A'", "C'", "B'")).relabel(PRIMES)
        np.testing.assert_allclose(swapped.matrix, res.psi_prime.matrix, atol=ATOL)

    def test_events(self):
        res = teleclone_out(basis_state("1", "D"), distribution_resource(), forced=2)
        assert [(e.party, e.kind, e.targets, e.outcome) for e in res.events] == [
            ("Controller", "measure", ("D", "P"), 2),
            ("Controller", "send", ("*",), 2),
            ("Alice", "correct", ("A'",), 2),
            ("Bob", "correct", ("B'",), 2),
            ("Charlie", "correct", ("C'",), 2),
        ]


class TestReceiverMarginals:
    def test_zero_state(self):
        rho_b, rho_c = receiver_marginals(phi_basis(0, PRIMES).density())
        np.testing.assert_allclose(rho_b.matrix, np.diag([5 / 6, 1 / 6]), atol=ATOL)
        np.testing.assert_allclose(rho_c.matrix, np.diag([5 / 6, 1 / 6]), atol=ATOL)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_protocol_outputs_are_optimal_clones(self, seed):
        rng = np.random.default_rng(seed)
        a2, theta = rng.uniform(), rng.uniform(0, 2 * np.pi)
        chi_p = transformed_chi(np.sqrt(a2), np.sqrt(1 - a2), theta)
        res = teleclone_out(chi_p, distribution_resource(), rng=rng)
        rho_b, rho_c = receiver_marginals(res.psi_prime)
        np.testing.assert_allclose(rho_b.matrix, rho_c.matrix, atol=ATOL)
        expected = optimal_clone(chi_p.relabel(["B'"]))
        assert trace_distance(rho_b, expected) <= ATOL
        assert fidelity(rho_c, chi_p.relabel(["C'"])) == pytest.approx(5 / 6, abs=1e-10)

    def test_needs_three_qubits(self):
        with pytest.raises(ValueError):
            receiver_marginals(basis_state("00", "XY").density())

    def test_matches_partial_trace(self):
        psi = StateVector(PRIMES, (ket("000") + ket("011")) / np.sqrt(2)).density()
        rho_b, _ = receiver_marginals(psi)
        np.testing.assert_allclose(rho_b.matrix, partial_trace(psi, ["B'"]).matrix)


def test_complex_amplitude_probe_reports():
    from remotectl.verify import complex_amplitude_probe
    probe = complex_amplitude_probe(samples=2)
    print("complex-amplitude deviations:", probe)
    assert set(probe) == {"concentration", "clone_fidelity"}
    assert all(np.isfinite(v) for v in probe.values())
