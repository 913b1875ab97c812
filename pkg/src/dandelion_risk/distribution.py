"""Exact joint, marginal, and portfolio-loss distributions of the star model.

The portfolio loss L = L1 + ... + LN deliberately excludes the central node,
so its support is {0, ..., N}.  The loss pmf has the closed form

    P(L = l) = (1/Z) * C(N, l) * ( e^(alpha*l) + e^(alpha0 + l*(alpha+beta)) )

whose two branches are, after normalization, a pair of binomials: conditioning
on the central node's state makes the leaves i.i.d. Bernoulli.  That binomial
mixture restatement is exposed as :class:`MixtureForm` and serves as the
cross-check oracle for the log-space evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .core_model import CalibratedParams, ModelConfig, calibrate, conditional_probs


@lru_cache(maxsize=64)
def _log_binom_table(n: int) -> np.ndarray:
    """log C(n, l) for l = 0..n via log-gamma; factorials would overflow near n=100."""
    l = np.arange(n + 1, dtype=np.float64)
    table = gammaln(n + 1.0) - gammaln(l + 1.0) - gammaln(n - l + 1.0)
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class LossPmf:
    """Loss distribution on {0, ..., n}, stored in log space.

    The linear-space view `mass` is exp(log_mass) elementwise.  log_mass is
    always finite; masses below ~1e-308 underflow to 0.0 in the linear view,
    which can happen between the two branches very close to the admissible
    correlation boundary.
    """

    n: int
    log_mass: np.ndarray

    def __post_init__(self) -> None:
        lm = np.asarray(self.log_mass, dtype=np.float64)
        if lm.shape != (self.n + 1,):
            raise ValueError(
                f"log_mass has shape {lm.shape}, expected ({self.n + 1},)"
            )
        if not np.all(np.isfinite(lm)):
            raise ValueError("log_mass entries must all be finite")
        lm = lm.copy()
        lm.flags.writeable = False
        object.__setattr__(self, "log_mass", lm)

    @cached_property
    def mass(self) -> np.ndarray:
        out = np.exp(self.log_mass)
        out.flags.writeable = False
        return out

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.n + 1)


def _bit_vector(l, n: int) -> np.ndarray:
    arr = np.asarray(l)
    if arr.shape != (n,):
        raise ValueError(f"bit vector has shape {arr.shape}, expected ({n},)")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    return arr


def joint_log_prob(params: CalibratedParams, l0: int, l) -> float:
    """Log probability of one full configuration (l0, l1, .., lN).

    Returns alpha0*l0 + alpha*sum(l) + beta*l0*sum(l) - log_z.  Exponentiating
    over all 2^(N+1) configurations sums to one.
    """
    if l0 not in (0, 1):
        raise ValueError(f"l0={l0!r} must be 0 or 1")
    s = int(_bit_vector(l, params.n_credits).sum())
    return (
        params.alpha0 * l0
        + params.alpha * s
        + params.beta * l0 * s
        - params.log_z
    )


def marginal_noncentral_log_prob(params: CalibratedParams, l) -> float:
    """Log probability of a leaf configuration with the central node summed out.

    Stable two-term log-sum of the l0=0 and l0=1 branch exponents.
    """
    s = int(_bit_vector(l, params.n_credits).sum())
    return float(
        np.logaddexp(
            params.alpha * s,
            params.alpha0 + (params.alpha + params.beta) * s,
        )
        - params.log_z
    )


def loss_pmf(cfg: ModelConfig) -> LossPmf:
    """Exact pmf of the loss count L = L1 + ... + LN (central node excluded).

    log_mass[l] = log C(N,l) + logaddexp(alpha*l, alpha0 + l*(alpha+beta)) - log_z.
    """
    params = calibrate(cfg)
    n = cfg.n_credits
    l = np.arange(n + 1, dtype=np.float64)
    branches = np.logaddexp(
        params.alpha * l,
        params.alpha0 + (params.alpha + params.beta) * l,
    )
    return LossPmf(n=n, log_mass=_log_binom_table(n) + branches - params.log_z)


@dataclass(frozen=True)
class MixtureForm:
    """The loss pmf as a two-component binomial mixture.

    Conditioning on the central node splits the leaves into i.i.d. Bernoulli
    draws: weight1 = P(L0=0) = 1-p at per-leaf rate (p-q)/(1-p), and
    weight2 = P(L0=1) = p at rate q/p.  Expanding the mixture reproduces the
    loss pmf elementwise and is the primary cross-check for it.
    """

    weight1: float
    rate1: float
    weight2: float
    rate2: float

    def loss_pmf(self, n: int) -> np.ndarray:
        """Expand to the linear-space pmf on {0, ..., n} via scipy binomials."""
        l = np.arange(n + 1)
        return self.weight1 * stats.binom.pmf(l, n, self.rate1) + (
            self.weight2 * stats.binom.pmf(l, n, self.rate2)
        )


def mixture_form(cfg: ModelConfig) -> MixtureForm:
    """Binomial-mixture restatement of the loss distribution for this config."""
    rate1, rate2 = conditional_probs(cfg)
    return MixtureForm(
        weight1=1.0 - cfg.p, rate1=rate1, weight2=cfg.p, rate2=rate2
    )


def pair_moment(cfg: ModelConfig) -> float:
    """Joint default moment E[Li*Lj] of two distinct leaves.

    Summing out everything but two leaves leaves two closed-form terms:
    (p-q)^2/(1-p) from the sound-central branch and q^2/p from the defaulted
    one.
    """
    p, q = cfg.p, cfg.q
    return (p - q) ** 2 / (1.0 - p) + q * q / p


def rho_noncentral(cfg: ModelConfig) -> float:
    """Correlation between two distinct leaves; equals rho**2 identically.

    Always positive for rho != 0 and strictly smaller than |rho|, so even
    strongly negatively correlated leaves-vs-center imply mildly positively
    correlated leaves.
    """
    p = cfg.p
    return (pair_moment(cfg) - p * p) / (p * (1.0 - p))


def loss_moments(pmf: LossPmf) -> tuple[float, float]:
    """Mean and variance of the loss count, computed from the pmf.

    For a calibrated model these equal N*p and N*p*(1-p)*(1 + (N-1)*rho**2).
    """
    l = np.arange(pmf.n + 1, dtype=np.float64)
    mass = pmf.mass
    mean = float(l @ mass)
    variance = float((l * l) @ mass - mean * mean)
    return mean, variance


def peak_indices(mass: np.ndarray) -> list[int]:
    """Local maxima of a pmf vector under a deterministic plateau rule.

    Index l is a peak when its mass is >= both neighbours with strict
    inequality on at least one side; a flat run of equal masses counts once,
    at its leftmost index.  Missing neighbours beyond the support ends impose
    no constraint, so a strictly decreasing pmf has its single peak at 0.
    """
    mass = np.asarray(mass)
    n = len(mass) - 1
    peaks: list[int] = []
    i = 0
    while i <= n:
        j = i
        while j < n and mass[j + 1] == mass[i]:
            j += 1
        left_ok = i == 0 or mass[i - 1] < mass[i]
        right_ok = j == n or mass[j + 1] < mass[i]
        if left_ok and right_ok:
            peaks.append(i)
        i = j + 1
    return peaks
