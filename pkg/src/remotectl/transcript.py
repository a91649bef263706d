"""Protocol transcripts and their line-delimited text format.

A transcript file has one JSON value per line. The first line is a header
object::

    {"format": "remotectl-transcript/1", "seed": 7, "alpha": 1.0,
     "beta": 0.0, "unitary": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}

Every following line is one event, a JSON array with fields in fixed order::

    [round, party, kind, targets, outcome, probability]

``kind`` is one of ``measure`` (Bell measurement of the two ``targets``),
``send`` (classical message; ``targets`` holds the recipient, ``"*"`` for a
broadcast, and ``outcome`` the 2-bit payload), ``correct`` (Pauli index
``outcome`` applied to each target qubit) or ``control`` (the controller's
unitary on ``targets``). ``outcome`` and ``probability`` are ``null`` when
not applicable. Floats are written with Python's shortest round-trip repr,
so reading a file back reproduces every value bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

FORMAT = "remotectl-transcript/1"
BROADCAST = "*"
KINDS = ("measure", "send", "correct", "control")


class TranscriptFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    round: int
    party: str
    kind: str
    targets: tuple[str, ...]
    outcome: Optional[int] = None
    probability: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TranscriptFormatError(f"unknown event kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(self.targets))

    def to_json(self) -> str:
        return json.dumps([self.round, self.party, self.kind, list(self.targets),
                           self.outcome, self.probability], ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> Event:
        try:
            rnd, party, kind, targets, outcome, prob = json.loads(line)
        except (ValueError, TypeError) as exc:
            raise TranscriptFormatError(f"bad event line {line!r}") from exc
        return cls(rnd, party, kind, tuple(targets), outcome, prob)


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    recipient: str
    payload: int
    round: int

    @property
    def bits(self) -> int:
        return 2


@dataclass(frozen=True, eq=False)
class Transcript:
    """Everything needed to re-run a protocol instance with forced outcomes."""

    seed: Optional[int]
    alpha: float
    beta: float
    unitary: np.ndarray
    events: tuple[Event, ...] = field(default_factory=tuple)

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        u.flags.writeable = False
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "events", tuple(self.events))

    def __eq__(self, other):
        if not isinstance(other, Transcript):
            return NotImplemented
        return (self.seed == other.seed and self.alpha == other.alpha
                and self.beta == other.beta
                and np.array_equal(self.unitary, other.unitary)
                and self.events == other.events)

    def messages(self) -> list[ClassicalMessage]:
        return [ClassicalMessage(e.party, e.targets[0], e.outcome, e.round)
                for e in self.events if e.kind == "send"]

    def measurements(self, party: Optional[str] = None) -> list[Event]:
        return [e for e in self.events if e.kind == "measure"
                and (party is None or e.party == party)]

    def with_events(self, events: Iterable[Event]) -> Transcript:
        return Transcript(self.seed, self.alpha, self.beta, self.unitary,
                          tuple(events))

    def dumps(self) -> str:
        header = {
            "format": FORMAT,
            "seed": self.seed,
            "alpha": self.alpha,
            "beta": self.beta,
            "unitary": [[[z.real, z.imag] for z in row] for row in self.unitary.tolist()],
        }
        lines = [json.dumps(header)] + [e.to_json() for e in self.events]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> Transcript:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise TranscriptFormatError("empty transcript")
        try:
            header = json.loads(lines[0])
        except ValueError as exc:
            raise TranscriptFormatError("bad header line") from exc
        if not isinstance(header, dict) or header.get("format") != FORMAT:
            raise TranscriptFormatError(f"expected a {FORMAT} header")
        u = np.array([[complex(re, im) for re, im in row] for row in header["unitary"]])
        events = tuple(Event.from_json(ln) for ln in lines[1:])
        return cls(header["seed"], header["alpha"], header["beta"], u, events)
