"""Barrier-synchronized message passing between simulated parties."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from privebc.protocol.messages import ProtocolOrderError, Transcript

PHASES = ("ego_broadcast", "path_count", "reciprocate_and_sum")


def run_phases(parties: Sequence, order: Sequence[int] | None = None, workers: int = 1) -> Transcript:
    """Run every phase on every party, delivering messages at each barrier.

    ``order`` permutes the order in which parties execute within a phase and
    ``workers > 1`` runs them on a thread pool; neither changes the result,
    because messages are logged and delivered sorted by sender.
    """
    n = len(parties)
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}")
    transcript = Transcript(n)
    for phase, name in enumerate(PHASES, start=1):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outs = list(pool.map(lambda i: getattr(parties[i], name)(), order))
        else:
            outs = [getattr(parties[i], name)() for i in order]
        msgs = sorted((m for out in outs for m in out),
                      key=lambda m: (m.sender, -1 if m.receiver is None else m.receiver))
        for m in msgs:
            transcript.log(m)
            targets = [b for b in range(n) if b != m.sender] if m.receiver is None else [m.receiver]
            for b in targets:
                parties[b].receive(m)
        for p in parties:
            if gap := p.missing(phase):
                raise ProtocolOrderError(
                    f"deadlock in phase {phase}: party {p.id} never heard from {sorted(gap)}")
    for p in parties:
        transcript.releases.extend(p.releases)
    transcript.releases.sort(key=lambda r: (r.party, r.phase))
    return transcript
