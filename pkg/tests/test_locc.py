import dataclasses

import numpy as np
import pytest

from remotectl.concentrate import ALL_TRIPLES
from remotectl.locc import (OWNERSHIP, Party, TranscriptMismatchError,
                            classical_bits, ownership_check, replay,
                            run_protocol)
from remotectl.redistribute import ControlUnitary
from remotectl.states import InputAmplitudes
from remotectl.transcript import Event, Transcript


@pytest.fixture
def run():
    return run_protocol(InputAmplitudes(0.6, 0.8), ControlUnitary.named("hadamard"), seed=5)


def replace_event(t, index, **changes):
    events = list(t.events)
    events[index] = dataclasses.replace(events[index], **changes)
    return t.with_events(events)


class TestParties:
    def test_ownership_is_disjoint(self):
        parties = Party.all()
        assert [p.name for p in parties] == ["Controller", "Alice", "Bob", "Charlie"]
        seen = set()
        for p in parties:
            assert not seen & p.owned
            seen |= p.owned
        assert seen == {"A", "B", "C", "D", "E", "F", "G", "P", "A'", "B'", "C'"}

    def test_layout(self):
        assert OWNERSHIP["Controller"] == {"D", "P"}
        assert OWNERSHIP["Bob"] == {"B", "F", "B'"}


class TestRunProtocol:
    def test_identity_on_zero(self):
        for seed in range(5):
            report, _ = run_protocol(InputAmplitudes(1, 0), ControlUnitary.named("identity"), seed)
            assert report.fidelity_d == pytest.approx(1, abs=1e-10)
            assert report.fidelity_bprime == pytest.approx(5 / 6, abs=1e-10)
            assert report.trace_distance_theorem <= 1e-10
            assert report.passed

    def test_bit_flip_on_zero(self):
        report, _ = run_protocol(InputAmplitudes(1, 0), ControlUnitary.named("x"), 3)
        # fidelity is measured against U|chi> = |1>
        assert report.fidelity_bprime == pytest.approx(5 / 6, abs=1e-10)
        assert report.fidelity_cprime == pytest.approx(5 / 6, abs=1e-10)

    def test_deterministic(self):
        a = run_protocol(InputAmplitudes(0.6, 0.8), ControlUnitary.named("z"), 42)
        b = run_protocol(InputAmplitudes(0.6, 0.8), ControlUnitary.named("z"), 42)
        assert a[1] == b[1]
        assert a[0].matches(b[0], atol=0)

    def test_forced_outcomes(self):
        report, t = run_protocol(InputAmplitudes(0.6, 0.8), ControlUnitary.named("z"), None,
                                 forced_triple=(3, 1, 2), forced_distribution=2)
        assert report.triple == (3, 1, 2)
        assert report.distribution_outcome == 2
        assert t.events[6].outcome == 0  # class I: no correction on D

    def test_rejects_complex_mode(self):
        amps = InputAmplitudes(1j / np.sqrt(2), 1 / np.sqrt(2), complex_mode=True)
        with pytest.raises(ValueError):
            run_protocol(amps, ControlUnitary.named("identity"), 0)

    def test_report_fields(self, run):
        report, _ = run
        assert 0 <= report.fidelity_d <= 1 + 1e-12
        assert report.fidelity_bprime == pytest.approx(report.fidelity_cprime, abs=1e-10)
        d = report.to_dict()
        assert d["triple"] == list(report.triple)
        assert len(d["unitary"]) == 2 and len(d["unitary"][0][0]) == 2

    def test_tight_tolerance_fails(self):
        report, _ = run_protocol(InputAmplitudes(0.6, 0.8), ControlUnitary.named("hadamard"),
                                 1, tolerance=1e-30)
        assert not report.passed


class TestOwnershipCheck:
    def test_generated_transcript_passes(self, run):
        assert ownership_check(run[1]) == []

    def test_measuring_a_foreign_qubit(self, run):
        t = replace_event(run[1], 0, targets=("A", "F"))
        (v,) = ownership_check(t)
        assert v.index == 0
        assert "F" in v.reason

    def test_correction_before_all_messages(self, run):
        t = run[1]
        events = list(t.events)
        # move the controller's correction ahead of Charlie's message
        correction = dataclasses.replace(events.pop(6), round=2)
        events.insert(5, correction)
        violations = ownership_check(t.with_events(events))
        assert any(v.event.kind == "correct" and "Charlie" in v.reason for v in violations)

    def test_receiver_correction_needs_broadcast(self, run):
        t = run[1]
        events = [e for e in t.events if not (e.kind == "send" and e.party == "Controller")]
        violations = ownership_check(t.with_events(events))
        assert {v.event.party for v in violations} == {"Alice", "Bob", "Charlie"}

    def test_message_with_unobserved_payload(self, run):
        t = run[1]
        sent = t.events[3].outcome
        t = replace_event(t, 3, outcome=(sent + 1) % 4)
        violations = ownership_check(t)
        assert violations[0].index == 3

    def test_wrong_correction_index(self, run):
        t = run[1]
        t = replace_event(t, 6, outcome=(t.events[6].outcome + 1) % 4)
        (v,) = ownership_check(t)
        assert "disagrees" in v.reason

    def test_same_round_message_is_not_yet_delivered(self, run):
        t = replace_event(run[1], 6, round=2)
        assert ownership_check(t)

    def test_violation_names_event(self, run):
        t = replace_event(run[1], 8, party="Alice")
        violations = ownership_check(t)
        assert "event 8" in str(violations[0])
        # the controller then broadcasts an outcome it never observed
        assert violations[1].index == 9


class TestClassicalCost:
    def test_three_messages_and_one_broadcast(self, run):
        t = run[1]
        msgs = t.messages()
        assert [(m.sender, m.recipient) for m in msgs] == [
            ("Alice", "Controller"), ("Bob", "Controller"), ("Charlie", "Controller"),
            ("Controller", "*")]
        assert classical_bits(t) == {"to_controller": 6, "broadcast": 2, "total": 8}


class TestReplay:
    def test_reproduces_report(self, run):
        report, t = run
        again = replay(t)
        assert again.matches(report, atol=1e-14)

    def test_round_trip_through_text(self, run):
        report, t = run
        assert replay(Transcript.loads(t.dumps())).matches(report, atol=1e-14)

    def test_altered_outcome_is_a_mismatch(self, run):
        t = run[1]
        t = replace_event(t, 1, outcome=(t.events[1].outcome + 1) % 4)
        with pytest.raises(TranscriptMismatchError):
            replay(t)

    def test_invalid_outcome_is_a_mismatch(self, run):
        with pytest.raises(TranscriptMismatchError):
            replay(replace_event(run[1], 8, outcome=7))

    def test_missing_measurement(self, run):
        t = run[1]
        with pytest.raises(TranscriptMismatchError):
            replay(t.with_events(t.events[1:]))

    def test_all_forced_triples(self):
        amps = InputAmplitudes.from_angle(2.2)
        u = ControlUnitary.random(np.random.default_rng(0))
        for n, triple in enumerate(ALL_TRIPLES):
            report, t = run_protocol(amps, u, None, triple, n % 4)
            again = replay(t)
            assert again.passed and again.matches(report, atol=1e-14)


def test_event_kinds_are_validated():
    with pytest.raises(ValueError):
        Event(1, "Alice", "teleport", ("A",))
