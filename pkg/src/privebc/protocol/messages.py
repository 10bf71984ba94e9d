"""Messages exchanged between parties and the transcript that logs them."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Any, Iterator

FLOAT_BITS = 64

PHASE_EGO = 1
PHASE_COUNT = 2
PHASE_SUM = 3


class ProtocolOrderError(RuntimeError):
    """A party tried to run a phase before receiving everything it needs."""


@dataclass(frozen=True)
class Message:
    """``count`` logical messages of ``bits`` each, from ``sender`` to ``receiver``.

    ``receiver is None`` marks a broadcast to every other party. Batching lets
    a phase-2 count vector travel as one object while the transcript still
    accounts for one message per pair.
    """

    phase: int
    sender: int
    receiver: int | None
    kind: str
    payload: Any = field(repr=False, compare=False)
    count: int = 1
    bits: int = FLOAT_BITS


@dataclass(frozen=True)
class Record:
    phase: int
    sender: int
    receiver: int | None
    kind: str
    count: int
    bits: int
    fanout: int

    @property
    def deliveries(self) -> int:
        return self.count * self.fanout


@dataclass(frozen=True)
class Release:
    """One randomized release: which mechanism spent how much budget."""

    party: int
    phase: int
    mechanism: str
    epsilon: float
    sensitivity: float
    scale: float | None = None


@dataclass
class Transcript:
    n_parties: int
    records: list[Record] = field(default_factory=list)
    releases: list[Release] = field(default_factory=list)
    released: frozenset = frozenset()

    def log(self, msg: Message) -> None:
        if msg.count == 0:
            return
        fanout = self.n_parties - 1 if msg.receiver is None else 1
        self.records.append(Record(msg.phase, msg.sender, msg.receiver, msg.kind,
                                   msg.count, msg.bits, fanout))

    def message_count(self, phase: int | None = None) -> int:
        return sum(r.deliveries for r in self.records if phase is None or r.phase == phase)

    def bit_count(self, phase: int | None = None) -> int:
        return sum(r.deliveries * r.bits for r in self.records if phase is None or r.phase == phase)

    def budget_spent(self, party: int) -> float:
        return sum(r.epsilon for r in self.releases if r.party == party)

    def lines(self) -> Iterator[str]:
        """``phase,sender,receiver,kind,bits`` per message; ``*`` marks a broadcast."""
        for r in self.records:
            recv = "*" if r.receiver is None else str(r.receiver)
            line = f"{r.phase},{r.sender},{recv},{r.kind},{r.bits}\n"
            for _ in range(r.count):
                yield line

    def write(self, fh) -> None:
        for line in self.lines():
            fh.write(line)

    def to_text(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def summary(self) -> str:
        parts = []
        for ph in (PHASE_EGO, PHASE_COUNT, PHASE_SUM):
            parts.append(f"phase {ph}: {self.message_count(ph)} messages, {self.bit_count(ph)} bits")
        return "; ".join(parts)


def parse_transcript(text: str) -> list[tuple[int, int, int | None, str, int]]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        phase, sender, recv, kind, bits = line.split(",")
        out.append((int(phase), int(sender), None if recv == "*" else int(recv), kind, int(bits)))
    return out
