"""Self-verification suite behind ``remotectl verify``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .concentrate import (ALL_TRIPLES, OutcomeClass, OutcomeTriple,
                          enumerate_concentration, outcome_class)
from .locc import CLONE_FIDELITY, ownership_check, replay, run_protocol
from .qcore import (StateVector, bell_measure, fidelity, partial_trace,
                    partial_transpose, pauli)
from .redistribute import (ControlUnitary, distribution_correction,
                           teleclone_out, transformed_chi)
from .states import (InputAmplitudes, bell_state, distribution_resource,
                     phi_basis, smolin, telecloned_input)

# The 16 (AE, BF, CG) Bell outcome triples whose Pauli product is the identity,
# in the order they are conventionally listed.
CLASS_I_REFERENCE = tuple(OutcomeTriple(*t) for t in (
    (0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0),
    (2, 2, 0), (2, 3, 1), (3, 2, 1), (3, 3, 0),
    (0, 2, 2), (0, 3, 3), (1, 2, 3), (1, 3, 2),
    (2, 0, 2), (2, 1, 3), (3, 0, 3), (3, 1, 2),
))

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_amplitudes(rng: np.random.Generator) -> InputAmplitudes:
    return InputAmplitudes.from_angle(rng.uniform(0, 2 * np.pi))


def smolin_pauli_form() -> np.ndarray:
    """``(I + X^4 + Y^4 + Z^4) / 16`` built from Kronecker powers."""
    total = np.eye(16, dtype=complex)
    for p in (pauli(2), _SIGMA_Y, pauli(1)):
        total = total + np.kron(np.kron(p, p), np.kron(p, p))
    return total / 16


def check_clone_marginals(tol, trials, rng):
    worst = 0.0
    for _ in range(trials):
        amps = random_amplitudes(rng)
        psi = telecloned_input(amps)
        for q in ("B", "C"):
            f = fidelity(partial_trace(psi, [q]), amps.chi(q))
            worst = max(worst, abs(f - CLONE_FIDELITY))
    return worst <= tol, f"max |F - 5/6| = {worst:.3e} over {trials} inputs"


def check_basis(tol, trials, rng):
    v0, v1 = phi_basis(0).amplitudes, phi_basis(1).amplitudes
    err = max(abs(np.vdot(v0, v0) - 1), abs(np.vdot(v1, v1) - 1), abs(np.vdot(v0, v1)))
    return err <= tol, f"orthonormality error {err:.3e}"


def check_class_table(tol, trials, rng):
    counts = {c: 0 for c in OutcomeClass}
    for t in ALL_TRIPLES:
        counts[outcome_class(t)] += 1
    class_i = {t for t in ALL_TRIPLES if outcome_class(t) == OutcomeClass.I}
    ok = all(n == 16 for n in counts.values()) and class_i == set(CLASS_I_REFERENCE)
    return ok, "counts " + "/".join(str(counts[c]) for c in OutcomeClass)


def check_concentration(tol, trials, rng):
    worst_f = worst_p = 0.0
    n = min(trials, 5)
    for _ in range(n):
        for row in enumerate_concentration(random_amplitudes(rng)):
            worst_f = max(worst_f, abs(row.post_fidelity - 1))
            worst_p = max(worst_p, abs(row.probability - 1 / 64))
    ok = worst_f <= tol and worst_p <= tol
    return ok, f"64 triples x {n} inputs: max |F-1| {worst_f:.3e}, max |p-1/64| {worst_p:.3e}"


def check_redistribution(tol, trials, rng):
    worst_f = worst_p = 0.0
    n = min(trials, 5)
    resource = distribution_resource()
    for _ in range(n):
        a = rng.uniform(0, 1)
        theta = rng.uniform(0, 2 * np.pi)
        chi_p = transformed_chi(np.sqrt(a), np.sqrt(1 - a), theta)
        target = (np.sqrt(a) * phi_basis(0).amplitudes
                  + np.sqrt(1 - a) * np.exp(1j * theta) * phi_basis(1).amplitudes)
        target = StateVector(("A'", "B'", "C'"), target)
        for i in range(4):
            res = teleclone_out(chi_p, resource, forced=i)
            worst_f = max(worst_f, abs(fidelity(res.psi_prime, target) - 1))
            worst_p = max(worst_p, abs(res.probability - 0.25))
    ok = worst_f <= tol and worst_p <= tol
    return ok, f"4 outcomes x {n} states: max |F-1| {worst_f:.3e}, max |p-1/4| {worst_p:.3e}"


def check_smolin(tol, trials, rng):
    rho = smolin()
    labels = rho.register
    problems = []
    if np.max(abs(rho.matrix - smolin_pauli_form())) > tol:
        problems.append("Pauli form")
    for pair in itertools.combinations(labels, 2):
        if np.max(abs(partial_trace(rho, pair).matrix - np.eye(4) / 4)) > tol:
            problems.append(f"marginal {pair}")
    for half in (("D", "E"), ("D", "F"), ("D", "G")):
        if np.linalg.eigvalsh(partial_transpose(rho, half))[0] < -tol:
            problems.append(f"NPT across {half}")
    for q in labels:
        if abs(np.linalg.eigvalsh(partial_transpose(rho, [q]))[0] + 1 / 8) > tol:
            problems.append(f"1:3 cut at {q}")
    for i in range(4):
        _, p, rest = bell_measure(rho, ("D", "E"), forced=i)
        f = fidelity(rest, bell_state(i, ("F", "G")))
        if abs(f - 1) > tol or abs(p - 0.25) > tol:
            problems.append(f"unlock outcome {i}")
    return not problems, "ok" if not problems else "failed: " + ", ".join(problems)


def check_theorem(tol, trials, rng):
    worst = 0.0
    bad_audit = bad_replay = failed = 0
    for _ in range(trials):
        amps = random_amplitudes(rng)
        u = ControlUnitary.random(rng)
        seed = int(rng.integers(2 ** 31))
        report, transcript = run_protocol(amps, u, seed, tolerance=tol)
        worst = max(worst, report.trace_distance_theorem)
        failed += not report.passed
        bad_audit += bool(ownership_check(transcript))
        bad_replay += not replay(transcript, tol).matches(report)
    ok = worst <= tol and not (failed or bad_audit or bad_replay)
    return ok, (f"{trials} runs: max distance {worst:.3e}, {failed} failed reports, "
                f"{bad_audit} LOCC violations, {bad_replay} replay mismatches")


CHECKS: dict[str, Callable] = {
    "clone_marginals": check_clone_marginals,
    "telecloning_basis": check_basis,
    "class_table": check_class_table,
    "concentration_64": check_concentration,
    "redistribution_4": check_redistribution,
    "smolin_properties": check_smolin,
    "end_to_end_theorem": check_theorem,
}


def run_suite(tolerance: float = 1e-10, trials: int = 100, seed: int = 0) -> list[CheckResult]:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    results = []
    for name, check in CHECKS.items():
        rng = np.random.default_rng([seed, len(results)])
        passed, detail = check(tolerance, trials, rng)
        results.append(CheckResult(name, bool(passed), detail))
    return results


def correction_table() -> list[dict]:
    return [{"bell_outcome": i, "pauli": distribution_correction(i),
             "targets": ["A'", "B'", "C'"]} for i in range(4)]


def class_table() -> list[dict]:
    return [{"l": t.l, "j": t.j, "k": t.k, "class": outcome_class(t).name,
             "correction": int(outcome_class(t))} for t in ALL_TRIPLES]


def fidelity_summary(amps: InputAmplitudes, u: ControlUnitary) -> list[dict]:
    """Clone fidelities before and after control, for each distribution outcome."""
    psi = telecloned_input(amps)
    rows = []
    for i in range(4):
        report, _ = run_protocol(amps, u, None, OutcomeTriple(0, 0, 0), i)
        rows.append({
            "distribution_outcome": i,
            "fidelity_B": fidelity(partial_trace(psi, ["B"]), amps.chi("B")),
            "fidelity_C": fidelity(partial_trace(psi, ["C"]), amps.chi("C")),
            "fidelity_Bprime": report.fidelity_bprime,
            "fidelity_Cprime": report.fidelity_cprime,
            "trace_distance_theorem": report.trace_distance_theorem,
        })
    return rows


def complex_amplitude_probe(samples: int = 5, seed: int = 0) -> dict[str, float]:
    """Worst deviations of the protocol stages for complex ``alpha, beta``.

    Reported only; complex inputs are outside the real-amplitude contract.
    """
    from .concentrate import concentrate
    from .redistribute import apply_control, receiver_marginals

    rng = np.random.default_rng(seed)
    worst_d = worst_clone = 0.0
    for _ in range(samples):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        amps = InputAmplitudes(v[0], v[1], complex_mode=True)
        psi, chi = telecloned_input(amps), amps.chi("D")
        u = ControlUnitary.random(rng)
        for t in ALL_TRIPLES:
            d_state = concentrate(psi, smolin(), forced=t).d_state
            worst_d = max(worst_d, abs(fidelity(d_state, chi) - 1))
        target = StateVector(("B'",), u.matrix @ chi.amplitudes)
        for i in range(4):
            res = teleclone_out(apply_control(d_state, u), distribution_resource(), forced=i)
            rho_b, _ = receiver_marginals(res.psi_prime)
            worst_clone = max(worst_clone, abs(fidelity(rho_b, target) - CLONE_FIDELITY))
    return {"concentration": worst_d, "clone_fidelity": worst_clone}
