"""Simulated multi-party protocol for private egocentric betweenness."""

from privebc.protocol.messages import Message, ProtocolOrderError, Release, Transcript, parse_transcript
from privebc.protocol.parties import NoiseCalibration, NonPrivateParty, PrivateParty, reciprocal_terms
from privebc.protocol.run import (
    PhaseCost,
    message_count_formula,
    path_count_sensitivity,
    run_nonprivate_ebc,
    run_private_ebc,
)
from privebc.protocol.scheduler import run_phases

__all__ = [
    "Message", "NoiseCalibration", "NonPrivateParty", "PhaseCost", "PrivateParty",
    "ProtocolOrderError", "Release", "Transcript", "message_count_formula", "parse_transcript",
    "path_count_sensitivity", "reciprocal_terms", "run_nonprivate_ebc", "run_phases",
    "run_private_ebc",
]
