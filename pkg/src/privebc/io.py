"""Edge-list ingestion (KONECT, SNAP, plain) and export."""

from __future__ import annotations

import bz2
import gzip
import logging
from dataclasses import dataclass
from pathlib import Path

from privebc.graph import Graph

log = logging.getLogger(__name__)

FORMATS = ("plain", "konect", "snap")
DOWNLOAD_HINTS = {
    "konect": "KONECT datasets (e.g. PGP, arenas-pgp) are at http://konect.cc/networks/",
    "snap": "SNAP datasets (e.g. email-Enron) are at https://snap.stanford.edu/data/",
    "plain": "expected a whitespace-separated 'u v' edge list",
}


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class LoadedGraph:
    graph: Graph
    labels: tuple[str, ...]
    self_loops: int = 0
    duplicates: int = 0

    def node_id(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"node label {label!r} not in graph") from None


def _open(path: Path):
    if path.suffix == ".gz":
        return gzip.open(path, "rt")
    if path.suffix == ".bz2":
        return bz2.open(path, "rt")
    return open(path)


def load_edge_list(path, fmt: str = "plain") -> LoadedGraph:
    """Read ``u v`` lines; extra columns (weights, timestamps) are ignored.

    Lines starting with ``%`` or ``#`` are comments. Labels are mapped to
    dense ids in order of first appearance. Self-loops and repeated edges are
    dropped and counted.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{path}: no such file. {DOWNLOAD_HINTS[fmt]}")
    ids: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    loops = dupes = 0
    with _open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s[0] in "%#":
                continue
            tok = s.split()
            if len(tok) < 2:
                raise ParseError(f"{path}:{lineno}: expected two node labels, got {s!r}")
            u = ids.setdefault(tok[0], len(ids))
            v = ids.setdefault(tok[1], len(ids))
            if u == v:
                loops += 1
                continue
            e = (u, v) if u < v else (v, u)
            if e in edges:
                dupes += 1
            else:
                edges.add(e)
    if not edges:
        raise ParseError(f"{path}: no edges found")
    if loops or dupes:
        log.warning("%s: dropped %d self-loops and %d duplicate edges", path, loops, dupes)
    labels = tuple(sorted(ids, key=ids.__getitem__))
    return LoadedGraph(Graph(len(labels), edges), labels, loops, dupes)


def write_edge_list(graph: Graph, path, labels=None) -> None:
    labels = labels or [str(i) for i in range(graph.n)]
    with open(path, "w") as fh:
        for u, v in graph.sorted_edges():
            fh.write(f"{labels[u]} {labels[v]}\n")


def write_mapping(labels, path) -> None:
    with open(path, "w") as fh:
        for i, lab in enumerate(labels):
            fh.write(f"{lab} {i}\n")


def labeled_edges(loaded: LoadedGraph) -> frozenset[frozenset[str]]:
    return frozenset(frozenset((loaded.labels[u], loaded.labels[v])) for u, v in loaded.graph.edges)
