"""Protocol entry points and communication accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from privebc.graph import GraphError, PartitionedGraph, build_views
from privebc.mechanisms import BudgetTriple
from privebc.protocol.messages import FLOAT_BITS, Transcript
from privebc.protocol.parties import NoiseCalibration, NonPrivateParty, PrivateParty
from privebc.protocol.scheduler import run_phases


def _common(pg: PartitionedGraph, ego: int) -> dict:
    try:
        ego_party = pg.party_of(ego)
    except GraphError as exc:
        raise GraphError(f"ego {ego} is not owned by any party") from exc
    return dict(ego=ego, ego_party=ego_party, owner=np.asarray(pg.owner, dtype=np.int64),
                n_parties=pg.n_parties, n_nodes=pg.graph.n)


def run_private_ebc(pg: PartitionedGraph, ego: int, budget: BudgetTriple,
                    calibration: NoiseCalibration | None = None, seed: int = 0,
                    order=None, workers: int = 1) -> tuple[float, Transcript]:
    """Private egocentric betweenness of ``ego``; returns ``(estimate, transcript)``."""
    calibration = calibration or NoiseCalibration()
    kw = _common(pg, ego)
    parties = [PrivateParty(v, budget=budget, calibration=calibration, seed=seed, **kw)
               for v in build_views(pg)]
    transcript = run_phases(parties, order=order, workers=workers)
    transcript.released = frozenset().union(*(p.own_release for p in parties))
    results = {p.finish() for p in parties}
    assert len(results) == 1, "parties disagree on the final sum"
    return results.pop(), transcript


def run_nonprivate_ebc(pg: PartitionedGraph, ego: int, exact: bool = False,
                       order=None, workers: int = 1):
    kw = _common(pg, ego)
    parties = [NonPrivateParty(v, exact=exact, **kw) for v in build_views(pg)]
    transcript = run_phases(parties, order=order, workers=workers)
    transcript.released = frozenset().union(*(p.own_release for p in parties))
    results = {p.finish() for p in parties}
    assert len(results) == 1, "parties disagree on the final sum"
    return results.pop(), transcript


def path_count_sensitivity(released) -> int:
    """L1 sensitivity bound of one party's path-count vector: twice the released set size."""
    return 2 * len(released)


@dataclass(frozen=True)
class PhaseCost:
    messages: int
    bits: int


def message_count_formula(n_parties: int, n_nodes: int, n_released: int) -> dict[int, PhaseCost]:
    """Closed-form message and bit counts per phase.

    Phase 1: each party broadcasts a ``n_nodes``-bit membership vector to the
    others. Phase 2: every pair ``i < j`` of released nodes is sent by every
    party except the owner of ``i``. Phase 3: one scalar broadcast per party.
    """
    if min(n_parties, n_nodes, n_released) < 0:
        raise ValueError("counts must be non-negative")
    others = max(n_parties - 1, 0)
    p1 = n_parties * others
    p2 = others * (n_released * (n_released - 1) // 2)
    p3 = n_parties * others
    return {1: PhaseCost(p1, p1 * n_nodes), 2: PhaseCost(p2, p2 * FLOAT_BITS),
            3: PhaseCost(p3, p3 * FLOAT_BITS)}
