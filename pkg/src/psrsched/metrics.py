"""QoS metrics over pooled RTA delays and per-station non-RTA throughput."""

from __future__ import annotations

import math

import numpy as np

from .objective import InvalidInputError


def delay_quantile(samples, q: float = 0.999) -> float:
    """Nearest-rank empirical quantile; undelivered packets are ``inf`` samples."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise InvalidInputError("no delay samples")
    if not 0 < q < 1:
        raise InvalidInputError(f"quantile must lie in (0, 1), got {q}")
    # the epsilon guards q*n landing a hair above an integer in floating point
    rank = max(1, math.ceil(q * x.size - 1e-9))
    return float(x[rank - 1])


def loss_ratio(samples, delay_bound: float) -> float:
    """Fraction of packets later than ``delay_bound`` (or never delivered)."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise InvalidInputError("no delay samples")
    return float(np.count_nonzero(x > delay_bound) / x.size)


def jain_index(throughputs) -> float:
    x = np.asarray(throughputs, dtype=float)
    if x.size == 0:
        raise InvalidInputError("no throughput values")
    if (x < 0).any():
        raise InvalidInputError("throughputs must be non-negative")
    sq = float(np.sum(x * x))
    if sq == 0:
        raise InvalidInputError("Jain index undefined when every throughput is zero")
    return float(np.sum(x)) ** 2 / (x.size * sq)
