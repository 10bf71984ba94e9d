"""Per-party state machines for the three protocol phases.

Each party runs ``ego_broadcast`` -> ``path_count`` -> ``reciprocate_and_sum``
and finally ``finish``; the scheduler delivers the messages in between and
refuses to start a phase until every message of the previous one arrived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from privebc.graph import PartyView
from privebc.mechanisms import BudgetTriple, laplace_sample, subset_release
from privebc.protocol.messages import (
    FLOAT_BITS,
    PHASE_COUNT,
    PHASE_EGO,
    PHASE_SUM,
    Message,
    ProtocolOrderError,
    Release,
)
from privebc.seeds import derive_rng

RECIPROCAL_RULES = ("ego-offset", "literal")


@dataclass(frozen=True)
class NoiseCalibration:
    """How noise is scaled and applied.

    Default scales are the sensitivity-over-epsilon calibration:
    ``2|R_A| / eps2`` for path counts and ``1 / eps3`` for partial sums. The
    multipliers scale those (``pseudocode()`` doubles both). ``reciprocal``
    selects how a noisy path count ``T`` becomes a term:

    * ``ego-offset``: ``1 / max(1, floor(T))``. ``T`` already includes the
      path through the ego, so noiseless runs reproduce the exact value.
    * ``literal``: ``1 / (floor(max(0, T)) + 1)``.

    ``noiseless`` turns off all three randomized releases (testing only).
    """

    path_count_multiplier: float = 1.0
    sum_multiplier: float = 1.0
    noiseless: bool = False
    reciprocal: str = "ego-offset"
    sampler: str = "normalized"
    precision: str = "double"

    def __post_init__(self):
        if self.reciprocal not in RECIPROCAL_RULES:
            raise ValueError(f"reciprocal rule must be one of {RECIPROCAL_RULES}")
        if self.path_count_multiplier <= 0 or self.sum_multiplier <= 0:
            raise ValueError("noise multipliers must be positive")

    @classmethod
    def pseudocode(cls, **kw) -> "NoiseCalibration":
        return cls(path_count_multiplier=2.0, sum_multiplier=2.0, **kw)

    def path_count_scale(self, n_released: int, eps2: float) -> float:
        return self.path_count_multiplier * 2 * n_released / eps2

    def sum_scale(self, eps3: float) -> float:
        return self.sum_multiplier / eps3


def reciprocal_terms(t: np.ndarray, rule: str = "ego-offset") -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if rule == "ego-offset":
        return 1.0 / np.maximum(1.0, np.floor(t))
    if rule == "literal":
        return 1.0 / (np.floor(np.maximum(0.0, t)) + 1.0)
    raise ValueError(f"unknown reciprocal rule {rule!r}")


class PairIndex:
    """Flat indexing of the pairs ``p < q`` over ``m`` sorted nodes."""

    def __init__(self, nodes: np.ndarray):
        self.nodes = nodes
        self.m = m = len(nodes)
        self.size = m * (m - 1) // 2
        p = np.arange(m, dtype=np.int64)
        self.offsets = p * m - p * (p + 1) // 2

    def positions(self, members) -> np.ndarray:
        return np.searchsorted(self.nodes, np.asarray(sorted(members), dtype=np.int64))

    def row(self, p: int) -> slice:
        start = int(self.offsets[p])
        return slice(start, start + self.m - p - 1)

    def pairs_within(self, pos: np.ndarray) -> np.ndarray:
        a, b = np.triu_indices(len(pos), 1)
        return self.offsets[pos[a]] + pos[b] - pos[a] - 1

    def row_lengths(self, rows: np.ndarray) -> int:
        return int(np.sum(self.m - rows - 1))


@dataclass(frozen=True)
class CountBlock:
    """The rows of a sender's count vector addressed to one receiver."""

    index: PairIndex
    values: np.ndarray
    rows: np.ndarray


class _Party:
    def __init__(self, view: PartyView, *, ego: int, ego_party: int, owner: np.ndarray,
                 n_parties: int, n_nodes: int):
        self.view = view
        self.id = view.party
        self.ego = ego
        self.is_ego_party = ego_party == self.id
        self.owner = owner
        self.n_parties = n_parties
        self.n_nodes = n_nodes
        self.true_share = frozenset(v for v in view.owned if ego in view.neighbors[v])
        self.done = 0
        self.inbox: dict[int, dict[int, object]] = {PHASE_EGO: {}, PHASE_COUNT: {}, PHASE_SUM: {}}
        self.releases: list[Release] = []

    @property
    def others(self) -> list[int]:
        return [b for b in range(self.n_parties) if b != self.id]

    def receive(self, msg: Message) -> None:
        if msg.receiver not in (None, self.id) or msg.sender == self.id:
            raise ProtocolOrderError(f"party {self.id} got a message meant for {msg.receiver}")
        self.inbox[msg.phase][msg.sender] = msg.payload

    def missing(self, phase: int) -> set[int]:
        return set(self.others) - set(self.inbox[phase])

    def _require(self, phase: int) -> None:
        if self.done != phase - 1:
            raise ProtocolOrderError(f"party {self.id} cannot run phase {phase} after phase {self.done}")
        if phase > 1 and (gap := self.missing(phase - 1)):
            raise ProtocolOrderError(
                f"party {self.id} still waiting for phase-{phase - 1} messages from {sorted(gap)}")

    def _shares(self) -> dict[int, frozenset]:
        shares = dict(self.inbox[PHASE_EGO])
        shares[self.id] = self.own_release
        return shares

    def _path_nodes(self) -> frozenset:
        k = set(self.true_share)
        if self.is_ego_party:
            k.add(self.ego)
        return frozenset(k)

    def _ego_message(self, share: frozenset) -> list[Message]:
        self.own_release = share
        self.done = PHASE_EGO
        return [Message(PHASE_EGO, self.id, None, "ego-share", share, 1, self.n_nodes)]

    def finish(self):
        if self.done != PHASE_SUM or self.missing(PHASE_SUM):
            raise ProtocolOrderError(f"party {self.id} has not received every partial sum")
        sums = dict(self.inbox[PHASE_SUM])
        sums[self.id] = self.partial_sum
        return sum((sums[b] for b in range(self.n_parties)), self._zero())

    def _zero(self):
        return 0.0


class PrivateParty(_Party):
    """Honest-but-curious party running the differentially private protocol."""

    def __init__(self, view: PartyView, *, budget: BudgetTriple, calibration: NoiseCalibration,
                 seed: int, **kw):
        super().__init__(view, **kw)
        self.budget = budget
        self.cal = calibration
        self.seed = seed

    def _rng(self, phase: int) -> np.random.Generator:
        return derive_rng(self.seed, "party", self.id, "phase", phase)

    def ego_broadcast(self) -> list[Message]:
        self._require(PHASE_EGO)
        if self.cal.noiseless:
            return self._ego_message(self.true_share)
        universe = self.view.owned - {self.ego}
        share = subset_release(universe, self.true_share, self.budget.eps1, self._rng(PHASE_EGO),
                               self.cal.sampler, self.cal.precision)
        self.releases.append(Release(self.id, PHASE_EGO, "exponential-subset", self.budget.eps1, 1.0))
        return self._ego_message(share)

    def path_count(self) -> list[Message]:
        self._require(PHASE_COUNT)
        shares = self._shares()
        nodes = np.array(sorted(set().union(*shares.values())), dtype=np.int64)
        idx = PairIndex(nodes)
        released = set(nodes.tolist())
        counts = np.zeros(idx.size)
        for k in sorted(self._path_nodes()):
            pos = idx.positions(self.view.neighbors[k] & released)
            if len(pos) >= 2:
                # pairs are distinct for a fixed k, so plain fancy-index add is exact
                counts[idx.pairs_within(pos)] += 1.0
        if not self.cal.noiseless:
            eps2 = self.budget.eps2
            scale = self.cal.path_count_scale(idx.m, eps2)
            if idx.size:
                counts += laplace_sample(scale, self._rng(PHASE_COUNT), size=idx.size)
            self.releases.append(Release(self.id, PHASE_COUNT, "laplace", eps2, 2.0 * idx.m, scale))
        counts.flags.writeable = False
        self.index, self.counts = idx, counts
        self.row_owner = self.owner[nodes] if idx.m else np.zeros(0, dtype=np.int64)
        out = []
        for b in self.others:
            rows = np.flatnonzero(self.row_owner == b)
            out.append(Message(PHASE_COUNT, self.id, b, "path-count",
                               CountBlock(idx, counts, rows), idx.row_lengths(rows), FLOAT_BITS))
        self.done = PHASE_COUNT
        return out

    def reciprocate_and_sum(self) -> list[Message]:
        self._require(PHASE_SUM)
        idx, nodes = self.index, self.index.nodes
        blocks = dict(self.inbox[PHASE_COUNT])
        in_share = np.isin(nodes, np.fromiter(self.true_share, dtype=np.int64))
        # a released node of this party outside its true share is never paired
        candidate = in_share | (self.row_owner != self.id)
        row_sums = []
        for i in sorted(self.true_share):
            p = int(np.searchsorted(nodes, i))
            if p >= idx.m or nodes[p] != i:
                continue  # no party reported counts for i
            sl = idx.row(p)
            total = np.zeros(sl.stop - sl.start)
            for b in range(self.n_parties):
                total = total + (self.counts[sl] if b == self.id else blocks[b].values[sl])
            later = nodes[p + 1:]
            keep = candidate[p + 1:] & ~np.isin(later, np.fromiter(self.view.neighbors[i], dtype=np.int64))
            row_sums.append(float(np.sum(reciprocal_terms(total[keep], self.cal.reciprocal))))
        s = math.fsum(row_sums)
        if not self.cal.noiseless:
            eps3 = self.budget.eps3
            scale = self.cal.sum_scale(eps3)
            s += float(laplace_sample(scale, self._rng(PHASE_SUM)))
            self.releases.append(Release(self.id, PHASE_SUM, "laplace", eps3, 1.0, scale))
        self.partial_sum = s
        self.done = PHASE_SUM
        return [Message(PHASE_SUM, self.id, None, "partial-sum", s, 1, FLOAT_BITS)]


class NonPrivateParty(_Party):
    """Party running the plain protocol: true shares, exact counts, exact sums."""

    def __init__(self, view: PartyView, *, exact: bool = True, **kw):
        super().__init__(view, **kw)
        self.exact = exact

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def ego_broadcast(self) -> list[Message]:
        self._require(PHASE_EGO)
        return self._ego_message(self.true_share)

    def path_count(self) -> list[Message]:
        self._require(PHASE_COUNT)
        nodes = sorted(set().union(*self._shares().values()))
        released = set(nodes)
        counts: dict[tuple[int, int], int] = {}
        for k in sorted(self._path_nodes()):
            nb = sorted(self.view.neighbors[k] & released)
            for x, i in enumerate(nb):
                for j in nb[x + 1:]:
                    counts[(i, j)] = counts.get((i, j), 0) + 1
        self.nodes = nodes
        self.counts = counts
        m = len(nodes)
        out = []
        for b in self.others:
            block = {pair: c for pair, c in counts.items() if self.owner[pair[0]] == b}
            n_pairs = sum(m - p - 1 for p, v in enumerate(nodes) if self.owner[v] == b)
            out.append(Message(PHASE_COUNT, self.id, b, "path-count", block, n_pairs, FLOAT_BITS))
        self.done = PHASE_COUNT
        return out

    def reciprocate_and_sum(self) -> list[Message]:
        self._require(PHASE_SUM)
        blocks = dict(self.inbox[PHASE_COUNT])
        blocks[self.id] = self.counts
        s = self._zero()
        for i in sorted(self.true_share):
            nb = self.view.neighbors[i]
            for j in self.nodes:
                if j <= i or j in nb:
                    continue
                t = sum(blocks[b].get((i, j), 0) for b in range(self.n_parties))
                if t < 1:
                    raise ProtocolOrderError(f"pair ({i}, {j}) has no 2-path; counts incomplete")
                s += Fraction(1, t) if self.exact else 1.0 / t
        self.partial_sum = s
        self.done = PHASE_SUM
        return [Message(PHASE_SUM, self.id, None, "partial-sum", s, 1, FLOAT_BITS)]
