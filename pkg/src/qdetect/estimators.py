"""Turn corpus evidence into presence probabilities for one term."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import BernoulliPair, check_probability
from .errors import DegenerateProbability, EmptyStratum

# floor for the saturation ceiling n_max; keeps the density normalizer finite
N_MAX_FLOOR = 1e-6


@dataclass(frozen=True)
class TermCounts:
    n_rel: int
    N_rel: int
    n_nonrel: int
    N_nonrel: int

    def __post_init__(self):
        if not (0 <= self.n_rel <= self.N_rel and 0 <= self.n_nonrel <= self.N_nonrel):
            raise ValueError(f"inconsistent term counts: {self}")


def relative_frequency(counts: TermCounts) -> BernoulliPair:
    """Raw presence frequencies within relevant and non-relevant documents.

    No smoothing is applied. Raises :class:`EmptyStratum` when either stratum
    is empty; callers fall back to :func:`pseudo_relevance`.
    """
    if counts.N_rel == 0 or counts.N_nonrel == 0:
        raise EmptyStratum(
            f"cannot estimate from empty stratum (N_rel={counts.N_rel}, N_nonrel={counts.N_nonrel})"
        )
    return BernoulliPair(p1_m0=counts.n_nonrel / counts.N_nonrel, p1_m1=counts.n_rel / counts.N_rel)


def pseudo_relevance(n: int, N: int) -> BernoulliPair:
    """Default estimate without judgments: ``((n + 1/2) / (N + 1), 1/2)``."""
    if N < 1 or not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= N and N >= 1, got n={n}, N={N}")
    return BernoulliPair(p1_m0=(n + 0.5) / (N + 1), p1_m1=0.5)


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75
    doc_len: float = 1.0
    avg_doc_len: float = 1.0

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError("k1 must be positive")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must lie in [0, 1]")
        if self.doc_len < 0 or not self.avg_doc_len > 0:
            raise ValueError("document lengths must be non-negative with positive average")


def bm25_saturation(tf: float, params: Bm25Params = Bm25Params()) -> float:
    """Okapi saturation ``tf (k1 + 1) / (tf + k1 ((1 - b) + b dl / avdl))``."""
    if tf < 0:
        raise ValueError("term frequency must be non-negative")
    if tf == 0:
        return 0.0
    norm = (1.0 - params.b) + params.b * params.doc_len / params.avg_doc_len
    return tf * (params.k1 + 1.0) / (tf + params.k1 * norm)


def saturation_ceiling(values) -> float:
    """``n_max`` for a (topic, term): the largest observed saturation, floored."""
    return max([N_MAX_FLOOR, *values])


def _log_normalizer(r: float, n_max: float) -> float:
    # log((1-p)/p) / (1 - (p/(1-p))**n) == r / expm1(n r) with r = log(p/(1-p)),
    # taken in log space so it stays accurate near p = 1/2 and for large n r
    if r == 0.0:
        return -math.log(n_max)
    x = n_max * r
    if x > 50.0:
        log_expm1 = x + math.log1p(-math.exp(-x))
    elif x > 0:
        log_expm1 = math.log(math.expm1(x))
    else:
        log_expm1 = math.log(-math.expm1(x))
    return math.log(abs(r)) - log_expm1


@dataclass(frozen=True)
class Bm25Density:
    """Continuous density ``B (p / (1 - p))**t`` on ``[0, n_max]``."""

    p: float
    B: float
    n_max: float

    @property
    def log_ratio(self) -> float:
        return math.log(self.p) - math.log1p(-self.p)

    @property
    def log_B(self) -> float:
        # finite even when B itself underflows
        return _log_normalizer(self.log_ratio, self.n_max)

    def pdf(self, t: float) -> float:
        if t < 0 or t > self.n_max:
            return 0.0
        r = self.log_ratio
        if r == 0.0:
            return self.B
        return math.exp(self.log_B + t * r)

    def mass(self, lo: float, hi: float) -> float:
        """Closed-form integral of the density over ``[lo, hi]`` (clipped to support)."""
        lo, hi = max(0.0, lo), min(self.n_max, hi)
        if hi <= lo:
            return 0.0
        r = self.log_ratio
        if r == 0.0:
            return (hi - lo) / self.n_max
        # anchor at the end where the integrand is largest
        if r > 0:
            return math.exp(self.log_B + r * hi) * -math.expm1(-r * (hi - lo)) / r
        return math.exp(self.log_B + r * lo) * math.expm1(r * (hi - lo)) / r


def bm25_density(p: float, n_max: float) -> Bm25Density:
    """Density of saturation values implied by inverting BM25.

    ``B = 1 / n_max`` when ``p = 1/2``, otherwise
    ``B = log((1 - p) / p) / (1 - (p / (1 - p))**n_max)``.
    """
    p = check_probability(p, "p")
    if p in (0.0, 1.0):
        raise DegenerateProbability(f"density undefined at p={p}")
    if not n_max > 0:
        raise ValueError("n_max must be positive")
    if p == 0.5:
        return Bm25Density(p, 1.0 / n_max, n_max)
    r = math.log(p) - math.log1p(-p)
    return Bm25Density(p, math.exp(_log_normalizer(r, n_max)), n_max)


def bm25_bernoulli(tf_rel_model: float, tf_nonrel_model: float) -> BernoulliPair:
    """Package BM25-derived presence masses (relevant, non-relevant) for detection."""
    return BernoulliPair(p1_m0=tf_nonrel_model, p1_m1=tf_rel_model)
