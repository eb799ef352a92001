"""Monte Carlo emitter/detector channels.

Each trial draws two uniforms from a Philox counter-based stream keyed by
the seed: block ``i`` of the stream belongs to trial ``i``. The first uniform
picks the hidden state (non-relevant with probability ``xi``), the second
drives the emitted symbol or the measurement outcome. Because every trial
owns its counter block, results do not depend on chunking or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    BernoulliPair,
    bayes_threshold,
    check_prior,
    classical_error,
    classical_optimal_detector,
    embed,
    fidelity,
    optimal_measurement,
    quantum_error,
    quantum_rates,
)
from .errors import DegenerateStates

CHUNK = 1 << 16
_U53 = 2.0**-53


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    xi: float
    model: BernoulliPair
    lam: Optional[float] = None  # None: Bayes threshold xi / (1 - xi)

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        check_prior(self.xi)
        if self.lam is not None and not 0.0 <= self.lam < math.inf:
            raise ValueError("lambda must be finite and non-negative")


@dataclass(frozen=True)
class SimResult:
    empirical_error: float
    analytic_error: float
    trials: int
    errors: int
    standard_error: float
    z_score: float


def uniforms(seed: int, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """State and outcome uniforms in [0, 1) for trials ``start .. start+count-1``."""
    gen = np.random.Philox(key=seed, counter=start)
    raw = gen.random_raw(4 * count).reshape(count, 4)
    u = (raw[:, :2] >> np.uint64(11)).astype(np.float64) * _U53
    return u[:, 0], u[:, 1]


def _count_errors(seed, trials, accept_m0, accept_m1, xi, workers):
    """Count wrong decisions.

    ``accept_m*`` maps the outcome uniform of a trial in state m* to a boolean
    "decide relevant" array.
    """

    def run(bounds):
        start, stop = bounds
        u_state, u_out = uniforms(seed, start, stop - start)
        nonrel = u_state < xi
        decide_rel = np.where(nonrel, accept_m0(u_out), accept_m1(u_out))
        # error: accept a non-relevant document or reject a relevant one
        return int(np.count_nonzero(decide_rel == nonrel))

    chunks = [(a, min(a + CHUNK, trials)) for a in range(0, trials, CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(run, chunks))
    return sum(map(run, chunks))


def _result(errors: int, trials: int, analytic: float) -> SimResult:
    p_hat = errors / trials
    se = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    if se > 0:
        z = (p_hat - analytic) / se
    elif abs(p_hat - analytic) <= 1e-12:
        z = 0.0
    else:
        z = math.copysign(math.inf, p_hat - analytic)
    return SimResult(p_hat, analytic, trials, errors, se, z)


def simulate_classical(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Emit a presence symbol per trial and decide with the optimal region."""
    p = cfg.model
    decision = classical_optimal_detector(p, cfg.xi)
    in_region = {x: x in decision.region for x in (0, 1)}

    def accept(p1):
        # symbol 1 iff u < p(1|state); decide relevant iff symbol in region
        return lambda u: np.where(u < p1, in_region[1], in_region[0])

    errors = _count_errors(cfg.seed, cfg.trials, accept(p.p1_m0), accept(p.p1_m1), cfg.xi, workers)
    analytic, _ = classical_error(cfg.xi, decision)
    return _result(errors, cfg.trials, analytic)


def _acceptance_probabilities(cfg: SimConfig) -> tuple[float, float, float]:
    """(Q_0, Q_d, analytic error) of the projective detector for ``cfg``."""
    xi = cfg.xi
    m0, m1 = embed(cfg.model)
    if cfg.lam is None and xi in (0.0, 1.0):
        # prior leaves no doubt: accept everything at xi = 0, nothing at xi = 1
        q = 1.0 if xi == 0.0 else 0.0
        return q, q, 0.0
    lam = bayes_threshold(xi) if cfg.lam is None else cfg.lam
    try:
        basis = optimal_measurement(m0, m1, lam)
        q0, qd = quantum_rates(m0, m1, basis)
    except DegenerateStates:
        if cfg.lam is not None:
            raise
        # identical states under the Bayes threshold: the null projector
        # (always reject) is optimal, matching detect()
        q0 = qd = 0.0
    if cfg.lam is None:
        analytic, _ = quantum_error(xi, fidelity(cfg.model))
    else:
        analytic = xi * q0 + (1.0 - xi) * (1.0 - qd)
    return q0, qd, analytic


def simulate_quantum(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Born-sample the outcome of the optimal projective measurement per trial.

    Raises
    ------
    DegenerateStates
        When an explicit ``cfg.lam`` leaves no positive eigenvalue.
    """
    q0, qd, analytic = _acceptance_probabilities(cfg)
    errors = _count_errors(
        cfg.seed, cfg.trials, lambda u: u < q0, lambda u: u < qd, cfg.xi, workers
    )
    return _result(errors, cfg.trials, analytic)


@dataclass(frozen=True)
class SweepPoint:
    xi: float
    classical: SimResult
    quantum: SimResult

    @property
    def quantum_dominates(self) -> bool:
        combined = math.hypot(self.classical.standard_error, self.quantum.standard_error)
        return self.quantum.empirical_error <= self.classical.empirical_error + 5.0 * combined


def grid_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th grid point, shared by both channels."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def sweep_compare(
    model: BernoulliPair, xi_grid: Sequence[float], trials: int, seed: int, workers: int = 1
) -> list[SweepPoint]:
    out = []
    for k, xi in enumerate(xi_grid):
        cfg = SimConfig(trials=trials, seed=grid_seed(seed, k), xi=float(xi), model=model)
        out.append(SweepPoint(float(xi), simulate_classical(cfg, workers), simulate_quantum(cfg, workers)))
    return out
