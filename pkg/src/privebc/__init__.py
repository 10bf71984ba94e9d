"""Multi-party egocentric betweenness centrality under edge differential privacy."""

__version__ = "0.1.0"
