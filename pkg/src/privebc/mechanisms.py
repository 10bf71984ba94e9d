"""Laplace noise and the two-stage subset-release sampler.

The subset release is the exponential mechanism over all subsets ``R`` of a
public universe ``V`` with quality ``q(R) = |R & R*| + |V - (R | R*)|``
(sensitivity 1), i.e. ``P(R) ~ exp(eps * q(R) / 2)``. It is sampled in
``O(|V|)`` by first drawing the quality level ``I = q(R)`` and then flipping
``|V| - I`` uniformly chosen memberships of ``R*``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp

MAX_ENUMERATION = 20
MPMATH_BITS = 300


class MechanismError(ValueError):
    pass


@dataclass(frozen=True)
class BudgetTriple:
    """Per-phase budgets: ego release, path counts, reciprocal sums."""

    eps1: float
    eps2: float
    eps3: float

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise MechanismError(f"{name} must be a positive finite number, got {v}")

    @classmethod
    def split(cls, total: float, fractions=(1 / 3, 1 / 3, 1 / 3)) -> "BudgetTriple":
        if not total > 0:
            raise MechanismError(f"total epsilon must be positive, got {total}")
        if len(fractions) != 3 or any(f <= 0 for f in fractions):
            raise MechanismError(f"need three positive split fractions, got {fractions}")
        if abs(sum(fractions) - 1.0) > 1e-9:
            raise MechanismError(f"split fractions must sum to 1, got {sum(fractions)}")
        return cls(*(total * f for f in fractions))

    @property
    def total(self) -> float:
        return self.eps1 + self.eps2 + self.eps3


def laplace_sample(scale: float, rng: np.random.Generator, size=None):
    """Draw from the zero-mean Laplace density ``exp(-|x|/scale) / (2 scale)``."""
    if not scale > 0:
        raise MechanismError(f"Laplace scale must be positive, got {scale}")
    return rng.laplace(0.0, scale, size=size)


@dataclass(frozen=True)
class SubsetQuality:
    universe: frozenset
    true_set: frozenset

    def __post_init__(self):
        if not self.true_set <= self.universe:
            raise MechanismError("true set must be a subset of the universe")

    def __call__(self, candidate: Iterable) -> int:
        candidate = frozenset(candidate)
        if not candidate <= self.universe:
            raise MechanismError("candidate must be a subset of the universe")
        return len(candidate & self.true_set) + len(self.universe - (candidate | self.true_set))


def quality(universe: Iterable, true_set: Iterable, candidate: Iterable) -> int:
    return SubsetQuality(frozenset(universe), frozenset(true_set))(candidate)


def quality_level_log_pmf(n: int, eps: float, variant: str = "normalized") -> np.ndarray:
    """Log-probabilities of the quality level ``I`` for ``I = 0..n``.

    ``normalized``: ``log C(n, i) + eps*i/2 - n*log(1 + e^{eps/2})``, which sums
    to one. ``literal``: the same without the ``eps*i/2`` term; its total mass is
    ``(2 / (1 + e^{eps/2}))^n`` and the sampler assigns the remainder to ``I = n``.
    """
    if n < 0:
        raise MechanismError(f"universe size must be non-negative, got {n}")
    if eps < 0:
        raise MechanismError(f"epsilon must be non-negative, got {eps}")
    i = np.arange(n + 1, dtype=float)
    log_binom = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
    base = -n * np.logaddexp(0.0, eps / 2)
    if variant == "normalized":
        return base + log_binom + i * (eps / 2)
    if variant == "literal":
        return base + log_binom
    raise MechanismError(f"unknown sampler variant {variant!r}")


@lru_cache(maxsize=256)
def _log_cdf(n: int, eps: float, variant: str) -> np.ndarray:
    out = np.logaddexp.accumulate(quality_level_log_pmf(n, eps, variant)[:n])
    out.flags.writeable = False
    return out


@lru_cache(maxsize=64)
def _log_cdf_mp(n: int, eps: float, variant: str) -> tuple:
    with mpmath.workprec(MPMATH_BITS):
        half = mpmath.mpf(eps) / 2
        p = -n * mpmath.log1p(mpmath.exp(half))
        c = p
        out = [c]
        for i in range(1, n):
            p = p + mpmath.log(n - i + 1) - mpmath.log(i)
            if variant == "normalized":
                p += half
            hi, lo = (c, p) if c >= p else (p, c)
            c = hi + mpmath.log1p(mpmath.exp(lo - hi))
            out.append(c)
    return tuple(out)


def inverse_transform_sample(n: int, eps: float, rng: np.random.Generator,
                             variant: str = "normalized", precision: str = "double") -> int:
    """Draw the quality level ``I`` in ``[0, n]`` by inverse transform in log space.

    ``psi = log(u)`` with ``u`` uniform on ``(0, 1]`` (a negated Exp(1) draw);
    returns the smallest ``i`` whose log-CDF reaches ``psi``, or ``n``.
    """
    if n == 0:
        return 0
    u = 1.0 - rng.random()
    if precision == "double":
        return int(np.searchsorted(_log_cdf(n, float(eps), variant), math.log(u), side="left"))
    if precision == "mpmath":
        cdf = _log_cdf_mp(n, float(eps), variant)
        with mpmath.workprec(MPMATH_BITS):
            psi = mpmath.log(mpmath.mpf(u))
            lo, hi = 0, n
            while lo < hi:
                mid = (lo + hi) // 2
                if cdf[mid] >= psi:
                    hi = mid
                else:
                    lo = mid + 1
            return lo
    raise MechanismError(f"unknown precision {precision!r}")


def pick_and_flip_mask(true_mask: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    n = len(true_mask)
    if not (0 <= level <= n):
        raise MechanismError(f"quality level {level} outside [0, {n}]")
    out = np.array(true_mask, dtype=bool, copy=True)
    flips = n - level
    if flips:
        out[rng.choice(n, size=flips, replace=False)] ^= True
    return out


def pick_and_flip(universe: Iterable, true_set: Iterable, level: int,
                  rng: np.random.Generator) -> frozenset:
    """Flip the membership of ``|V| - level`` distinct random elements of ``R*``."""
    uni = np.array(sorted(universe))
    truth = frozenset(true_set)
    if not truth <= frozenset(uni.tolist()):
        raise MechanismError("true set must be a subset of the universe")
    mask = np.isin(uni, list(truth)) if len(uni) else np.zeros(0, dtype=bool)
    return frozenset(uni[pick_and_flip_mask(mask, level, rng)].tolist())


def subset_release_mask(true_mask: np.ndarray, eps: float, rng: np.random.Generator,
                        variant: str = "normalized", precision: str = "double") -> np.ndarray:
    """Array form of :func:`subset_release` over a fixed universe ordering."""
    if not eps > 0:
        raise MechanismError(f"epsilon must be positive, got {eps}")
    level = inverse_transform_sample(len(true_mask), eps, rng, variant, precision)
    return pick_and_flip_mask(true_mask, level, rng)


def subset_release(universe: Iterable, true_set: Iterable, eps: float, rng: np.random.Generator,
                   variant: str = "normalized", precision: str = "double") -> frozenset:
    uni = np.array(sorted(universe), dtype=np.int64)
    truth = frozenset(true_set)
    if not truth <= frozenset(uni.tolist()):
        raise MechanismError("true set must be a subset of the universe")
    mask = np.isin(uni, np.fromiter(truth, dtype=np.int64, count=len(truth)))
    return frozenset(uni[subset_release_mask(mask, eps, rng, variant, precision)].tolist())


def exact_subset_pmf(universe: Iterable, true_set: Iterable, eps: float) -> dict[frozenset, float]:
    """Exponential-mechanism distribution by brute-force enumeration of all subsets."""
    uni = sorted(universe)
    if len(uni) > MAX_ENUMERATION:
        raise MechanismError(f"refusing to enumerate 2^{len(uni)} subsets (limit {MAX_ENUMERATION})")
    q = SubsetQuality(frozenset(uni), frozenset(true_set))
    subsets = [frozenset(c) for r in range(len(uni) + 1) for c in itertools.combinations(uni, r)]
    logw = np.array([eps * q(s) / 2 for s in subsets])
    probs = np.exp(logw - logsumexp(logw))
    return dict(zip(subsets, probs.tolist()))
