"""Shared helpers: independent scipy-based oracles and admissible-parameter maps.

The oracles here recompute everything from first principles (q from rho, the
two conditional rates, scipy binomials) so that package results are checked
against a route that shares no code with the log-space implementation.
"""

import numpy as np
from scipy import stats


def lower_bound(p: float) -> float:
    return max(-p / (1.0 - p), -(1.0 - p) / p)


def rho_at(p: float, t: float) -> float:
    """Map t in (0, 1) to a correlation strictly inside the admissible interval."""
    lo = lower_bound(p)
    return lo + t * (1.0 - lo)


def oracle_mixture_pmf(p: float, rho: float, n: int) -> np.ndarray:
    """Loss pmf as the two-branch binomial mixture, computed with scipy only."""
    q = rho * p * (1.0 - p) + p * p
    r1 = (p - q) / (1.0 - p)
    r2 = q / p
    l = np.arange(n + 1)
    return (1.0 - p) * stats.binom.pmf(l, n, r1) + p * stats.binom.pmf(l, n, r2)
