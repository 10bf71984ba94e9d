"""Drive the real party code with hand-chosen ego shares.

The sensitivity checks hold the public release R_A and each party's true
share fixed while an edge is toggled, so phase 1 is replaced by a fixed
broadcast and everything after it runs unchanged.
"""

from __future__ import annotations

import numpy as np

from privebc.graph import Graph, PartitionedGraph, build_views
from privebc.mechanisms import BudgetTriple
from privebc.protocol import NoiseCalibration, PrivateParty, run_phases

NOISELESS = NoiseCalibration(noiseless=True)


class FixedShareParty(PrivateParty):
    def __init__(self, view, *, release, share, **kw):
        super().__init__(view, **kw)
        self.fixed_release = frozenset(release)
        self.true_share = frozenset(share)

    def ego_broadcast(self):
        self._require(1)
        return self._ego_message(self.fixed_release)


def fixed_share_run(graph: Graph, owner, ego: int, releases, shares, calibration=NOISELESS):
    """Run all three phases with phase 1 replaced by the given releases."""
    pg = PartitionedGraph.from_owner(graph, owner)
    kw = dict(ego=ego, ego_party=pg.owner[ego], owner=np.asarray(pg.owner, dtype=np.int64),
              n_parties=pg.n_parties, n_nodes=graph.n)
    parties = [FixedShareParty(v, release=releases[v.party], share=shares[v.party],
                               budget=BudgetTriple(1.0, 1.0, 1.0), calibration=calibration,
                               seed=0, **kw)
               for v in build_views(pg)]
    run_phases(parties)
    return parties


def count_vectors(parties) -> list[dict]:
    vectors = []
    for p in parties:
        nodes = p.index.nodes.tolist()
        a, b = np.triu_indices(len(nodes), 1)
        vectors.append({(nodes[x], nodes[y]): float(c) for x, y, c in zip(a, b, p.counts)})
    return vectors


def resum(parties, graph: Graph, owner) -> list[float]:
    """Rerun phase 3 on ``graph`` against the counts already released.

    Phase 3 post-processes the sanitized counts, so only the adjacency test
    and the data it reads are recomputed.
    """
    views = build_views(PartitionedGraph.from_owner(graph, owner))
    out = []
    for p in parties:
        p.view, p.done = views[p.id], 2
        p.reciprocate_and_sum()
        out.append(p.partial_sum)
    return out


def l1_change(u: dict, v: dict) -> float:
    return sum(abs(u.get(k, 0.0) - v.get(k, 0.0)) for k in set(u) | set(v))
