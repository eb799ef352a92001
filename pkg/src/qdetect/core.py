"""Classical and quantum minimum-error detection for one binary term feature.

A term is either present (symbol 1) or absent (symbol 0) in a document.
Non-relevance is the state ``m0`` and relevance the state ``m1``. The prior
``xi`` is always the probability of NON-relevance.

Two-dimensional vectors are stored on the occurrence basis in the order
(presence, absence), so ``|1> = (1, 0)`` and ``|0> = (0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateStates

NORM_TOL = 1e-12
ORTHO_TOL = 1e-10


def check_probability(value: float, name: str = "probability") -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:  # also rejects NaN
        raise ValueError(f"{name}: probability out of range: {value!r}")
    return value


def check_prior(xi: float) -> float:
    return check_probability(xi, "xi")


@dataclass(frozen=True)
class BernoulliPair:
    """Presence probabilities of one term under non-relevance and relevance."""

    p1_m0: float
    p1_m1: float

    def __post_init__(self):
        object.__setattr__(self, "p1_m0", check_probability(self.p1_m0, "p1_m0"))
        object.__setattr__(self, "p1_m1", check_probability(self.p1_m1, "p1_m1"))

    def prob(self, x: int, m: int) -> float:
        """p(x | m) for symbol ``x`` and state ``m``, both in {0, 1}."""
        p1 = self.p1_m1 if m else self.p1_m0
        return p1 if x else 1.0 - p1


@dataclass(frozen=True)
class StateVector2:
    a0: float
    a1: float

    def __post_init__(self):
        norm2 = self.a0 * self.a0 + self.a1 * self.a1
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state vector is not unit norm: |v|^2 = {norm2!r}")

    @classmethod
    def normalized(cls, a0: float, a1: float) -> "StateVector2":
        n = math.hypot(a0, a1)
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a0 / n, a1 / n)

    def dot(self, other: "StateVector2") -> float:
        return self.a0 * other.a0 + self.a1 * other.a1

    def cross(self, other: "StateVector2") -> float:
        # signed sine of the angle between two unit vectors
        return self.a0 * other.a1 - self.a1 * other.a0

    def __iter__(self):
        yield self.a0
        yield self.a1


PRESENCE = StateVector2(1.0, 0.0)
ABSENCE = StateVector2(0.0, 1.0)


@dataclass(frozen=True)
class HermitianOperator2:
    """Real symmetric 2x2 operator ``[[h00, h01], [h01, h11]]``."""

    h00: float
    h01: float
    h11: float

    def as_matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.h00, self.h01), (self.h01, self.h11))


@dataclass(frozen=True)
class MeasurementBasis:
    """Optimal detection vectors; ``mu1`` is the acceptance (relevance) direction."""

    mu0: StateVector2
    mu1: StateVector2
    eigenvalue1: float

    def __post_init__(self):
        if abs(self.mu0.dot(self.mu1)) > ORTHO_TOL:
            raise ValueError("measurement vectors are not orthogonal")
        if not self.eigenvalue1 > 0.0:
            raise ValueError("acceptance eigenvalue must be positive")


@dataclass(frozen=True)
class ClassicalDecision:
    region: frozenset
    p_false_alarm: float
    p_detection: float


@dataclass(frozen=True)
class DetectionReport:
    model: BernoulliPair
    xi: float
    lam: float
    gamma: float
    theta: float
    fidelity: float
    classical: ClassicalDecision
    p_error: float
    p_correct: float
    q_false_alarm: float
    q_detection: float
    q_error: float
    q_correct: float
    m0: StateVector2
    m1: StateVector2
    basis: Optional[MeasurementBasis] = None
    # True when xi is 0 or 1 and the default threshold degenerates.
    boundary: bool = False


def embed(p: BernoulliPair) -> tuple[StateVector2, StateVector2]:
    """Relevance vectors whose squared coordinates reproduce ``p``.

    Positive square roots are used throughout, so the two states are in
    general not orthogonal.
    """
    m0 = StateVector2(math.sqrt(p.p1_m0), math.sqrt(1.0 - p.p1_m0))
    m1 = StateVector2(math.sqrt(p.p1_m1), math.sqrt(1.0 - p.p1_m1))
    return m0, m1


def born_probability(state: StateVector2, direction: StateVector2) -> float:
    return state.dot(direction) ** 2


def fidelity(p: BernoulliPair) -> float:
    a, b = p.p1_m0, p.p1_m1
    return (math.sqrt(a * b) + math.sqrt((1.0 - a) * (1.0 - b))) ** 2


def overlap_angle(m0: StateVector2, m1: StateVector2) -> float:
    return math.acos(min(1.0, abs(m0.dot(m1))))


def optimal_angle(gamma: float) -> float:
    """Angle between each optimal vector and its relevance vector at threshold 1."""
    if not 0.0 <= gamma <= math.pi / 2 + 1e-15:
        raise ValueError(f"gamma must lie in [0, pi/2], got {gamma!r}")
    return 0.5 * (math.pi / 2 - gamma)


def helstrom_operator(m0: StateVector2, m1: StateVector2, lam: float = 1.0) -> HermitianOperator2:
    """``|m1><m1| - lam |m0><m0|``."""
    if not lam >= 0.0:
        raise ValueError(f"lambda must be non-negative, got {lam!r}")
    return HermitianOperator2(
        m1.a0 * m1.a0 - lam * m0.a0 * m0.a0,
        m1.a0 * m1.a1 - lam * m0.a0 * m0.a1,
        m1.a1 * m1.a1 - lam * m0.a1 * m0.a1,
    )


def _canonical_sign(x: float, y: float) -> tuple[float, float]:
    # first nonzero coordinate made nonnegative
    if x < 0.0 or (x == 0.0 and y < 0.0):
        return -x, -y
    return x, y


def eigendecompose(h: HermitianOperator2) -> tuple[tuple[float, StateVector2], tuple[float, StateVector2]]:
    """Closed-form eigenpairs of a symmetric 2x2 operator, eigenvalues descending.

    The eigenvectors come from the Jacobi rotation angle
    ``phi = atan2(2 h01, h00 - h11) / 2`` so they are orthogonal by
    construction. Degenerate and diagonal inputs return the standard basis.
    """
    mid = 0.5 * (h.h00 + h.h11)
    half_diff = 0.5 * (h.h00 - h.h11)
    d = math.hypot(half_diff, h.h01)
    top, bottom = mid + d, mid - d

    if h.h01 == 0.0:
        if h.h00 >= h.h11:
            return (top, PRESENCE), (bottom, ABSENCE)
        return (top, ABSENCE), (bottom, PRESENCE)

    phi = 0.5 * math.atan2(h.h01, half_diff)
    c, s = math.cos(phi), math.sin(phi)
    v_top = StateVector2(*_canonical_sign(c, s))
    v_bottom = StateVector2(*_canonical_sign(-s, c))
    return (top, v_top), (bottom, v_bottom)


def _acceptance_eigenvalue(m0: StateVector2, m1: StateVector2, lam: float) -> float:
    # Larger eigenvalue of |m1><m1| - lam|m0><m0| from trace 1 - lam and
    # determinant -lam sin^2(gamma), arranged to avoid cancellation.
    s2 = m0.cross(m1) ** 2
    t = 1.0 - lam
    root = math.sqrt(t * t + 4.0 * lam * s2)
    if t >= 0.0:
        return 0.5 * (t + root)
    return 2.0 * lam * s2 / (root - t)


def optimal_measurement(m0: StateVector2, m1: StateVector2, lam: float = 1.0) -> MeasurementBasis:
    """Eigenbasis of the Helstrom operator with ``mu1`` on the positive eigenvalue.

    Raises
    ------
    DegenerateStates
        If the operator has no positive eigenvalue (identical states and
        ``lam >= 1``).
    """
    h = helstrom_operator(m0, m1, lam)
    eigenvalue1 = _acceptance_eigenvalue(m0, m1, lam)
    if not eigenvalue1 > 0.0:
        raise DegenerateStates(
            f"no positive eigenvalue at lambda={lam!r}: relevance states are indistinguishable"
        )
    (_, v_top), (_, v_bottom) = eigendecompose(h)
    return MeasurementBasis(mu0=v_bottom, mu1=v_top, eigenvalue1=eigenvalue1)


def quantum_rates(m0: StateVector2, m1: StateVector2, basis: MeasurementBasis) -> tuple[float, float]:
    """Vector probabilities of false alarm and detection (Born rule onto ``mu1``)."""
    return born_probability(m0, basis.mu1), born_probability(m1, basis.mu1)


def quantum_error(xi: float, fid: float) -> tuple[float, float]:
    """Helstrom minimum error for two pure states with squared overlap ``fid``."""
    xi = check_prior(xi)
    fid = check_probability(fid, "fidelity")
    prod = 4.0 * xi * (1.0 - xi) * fid
    root = math.sqrt(max(0.0, 1.0 - prod))
    # 0.5 * (1 - root) rewritten to stay accurate when the error is tiny
    q_error = 0.5 * prod / (1.0 + root)
    return q_error, 1.0 - q_error


def region_rates(p: BernoulliPair, region) -> ClassicalDecision:
    region = frozenset(region)
    if not region <= {0, 1}:
        raise ValueError(f"region must be a subset of {{0, 1}}, got {set(region)}")
    p0 = sum(p.prob(x, 0) for x in sorted(region))
    pd = sum(p.prob(x, 1) for x in sorted(region))
    return ClassicalDecision(region, p0, pd)


def classical_optimal_detector(p: BernoulliPair, xi: float) -> ClassicalDecision:
    """Bayes-optimal region of acceptance via the per-symbol likelihood ratio.

    Symbol ``x`` is accepted iff ``(1 - xi) p(x|m1) > xi p(x|m0)``. Ties are
    left out, which selects the smallest region among equal-risk ones.
    """
    xi = check_prior(xi)
    region = frozenset(x for x in (0, 1) if (1.0 - xi) * p.prob(x, 1) > xi * p.prob(x, 0))
    return region_rates(p, region)


def classical_error(xi: float, decision: ClassicalDecision) -> tuple[float, float]:
    xi = check_prior(xi)
    p_error = xi * decision.p_false_alarm + (1.0 - xi) * (1.0 - decision.p_detection)
    return p_error, 1.0 - p_error


def bayes_threshold(xi: float) -> float:
    """Threshold that turns the positive-eigenvalue rule into the Bayes rule."""
    xi = check_prior(xi)
    if xi == 1.0:
        return math.inf
    return xi / (1.0 - xi)


def detect(p: BernoulliPair, xi: float, lam: Optional[float] = None) -> DetectionReport:
    """Compare classical and quantum detection of relevance for one term.

    Parameters
    ----------
    p : BernoulliPair
        Presence probabilities under non-relevance and relevance.
    xi : float
        Prior probability of non-relevance.
    lam : float, optional
        Threshold of the Helstrom operator. Defaults to ``xi / (1 - xi)``.
        At ``xi`` in {0, 1} with the default threshold no measurement basis
        is built; the report is flagged ``boundary`` and accepts
        (``xi = 0``) or rejects (``xi = 1``) unconditionally.
    """
    xi = check_prior(xi)
    m0, m1 = embed(p)
    boundary = lam is None and xi in (0.0, 1.0)
    if lam is None:
        lam = bayes_threshold(xi)
    elif not 0.0 <= lam < math.inf:
        raise ValueError(f"lambda must be finite and non-negative, got {lam!r}")

    gamma = overlap_angle(m0, m1)
    fid = fidelity(p)
    decision = classical_optimal_detector(p, xi)
    p_error, p_correct = classical_error(xi, decision)
    q_error, q_correct = quantum_error(xi, fid)

    basis = None
    if boundary:
        q_false_alarm = q_detection = 1.0 if xi == 0.0 else 0.0
    else:
        try:
            basis = optimal_measurement(m0, m1, lam)
            q_false_alarm, q_detection = quantum_rates(m0, m1, basis)
        except DegenerateStates:
            # null acceptance projector: always reject
            q_false_alarm = q_detection = 0.0

    return DetectionReport(
        model=p,
        xi=xi,
        lam=lam,
        gamma=gamma,
        theta=optimal_angle(gamma),
        fidelity=fid,
        classical=decision,
        p_error=p_error,
        p_correct=p_correct,
        q_false_alarm=q_false_alarm,
        q_detection=q_detection,
        q_error=q_error,
        q_correct=q_correct,
        m0=m0,
        m1=m1,
        basis=basis,
        boundary=boundary,
    )
