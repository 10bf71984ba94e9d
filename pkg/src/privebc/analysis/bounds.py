"""Closed-form utility bounds for the subset-release stage."""

from __future__ import annotations

import math

LN2 = math.log(2.0)


def quality_error_bound(universe_size: int, quality: int, ego_size: int) -> float:
    """Largest EBC change from releasing a set of the given quality instead of the truth.

    ``(|V| - q + |R*|)^2 / 2``, where ``|V| - q`` is the size of the symmetric
    difference between the release and the true ego network.
    """
    if not 0 <= quality <= universe_size:
        raise ValueError(f"quality {quality} outside [0, {universe_size}]")
    return 0.5 * (universe_size - quality + ego_size) ** 2


def utility_bound_probability(epsilon: float, ego_size: float, universe_size: int, t: float) -> float:
    """Lower bound on ``P(|EBC - EBC_1| <= t)`` after one subset release at ``epsilon``.

    ``1 - exp(-epsilon (sqrt(2t) - |R*|) / 2) * 2^|V-|``, clamped at zero. Requires
    ``t > |R*|^2 / 2``.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not t > ego_size ** 2 / 2:
        raise ValueError(f"need t > |R*|^2/2 = {ego_size ** 2 / 2}, got t={t}")
    log_miss = -epsilon * (math.sqrt(2 * t) - ego_size) / 2 + universe_size * LN2
    if log_miss >= 0:
        return 0.0
    return -math.expm1(log_miss)


def threshold_for_probability(epsilon: float, ego_size: float, universe_size: int, prob: float) -> float:
    """Smallest ``t`` at which :func:`utility_bound_probability` reaches ``prob``."""
    if not 0 < prob < 1:
        raise ValueError("prob must lie strictly between 0 and 1")
    s = 2 * (universe_size * LN2 - math.log1p(-prob)) / epsilon
    return (s + ego_size) ** 2 / 2


def required_budget(gamma: float, alpha: float) -> float:
    """Subset-release budget giving relative error ``gamma`` with confidence ``1 - 2^-10``.

    ``3 ln 2 / ((gamma - 1) alpha)`` for an ego network covering a fraction
    ``alpha`` of a sparse graph with at least 20 nodes.
    """
    if not gamma > 1:
        raise ValueError(f"relative error target gamma must exceed 1, got {gamma}")
    if not 0 < alpha <= 1:
        raise ValueError(f"ego fraction alpha must lie in (0, 1], got {alpha}")
    return 3 * LN2 / ((gamma - 1) * alpha)


def sparse_regime_confidence(gamma: float, alpha: float, n_nodes: int, epsilon: float) -> float:
    """Confidence from the utility bound in the sparse-graph regime.

    Ego size ``alpha * n``, non-ego universe ``n - 1`` and threshold ``t``
    with ``sqrt(2t) = gamma * |R*|``.
    """
    ego = alpha * n_nodes
    return utility_bound_probability(epsilon, ego, n_nodes - 1, (gamma * ego) ** 2 / 2)


def relative_error(true_ebc: float, private_ebc: float) -> float | None:
    """``|private - true| / true``; ``None`` when the true value is zero."""
    if true_ebc < 0:
        raise ValueError(f"true EBC must be non-negative, got {true_ebc}")
    if true_ebc == 0:
        return None
    return abs(private_ebc - true_ebc) / true_ebc
