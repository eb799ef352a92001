"""Classical vs. quantum minimum-error relevance detection for binary term features."""

from .core import (
    BernoulliPair,
    ClassicalDecision,
    DetectionReport,
    HermitianOperator2,
    MeasurementBasis,
    StateVector2,
    born_probability,
    classical_error,
    classical_optimal_detector,
    detect,
    eigendecompose,
    embed,
    fidelity,
    helstrom_operator,
    optimal_angle,
    optimal_measurement,
    overlap_angle,
    quantum_error,
    quantum_rates,
)
from .errors import (
    DegenerateProbability,
    DegenerateStates,
    DimensionMismatch,
    DuplicateDocId,
    EmptyStratum,
    ParseError,
    QDetectError,
    UnknownTopic,
)

__version__ = "0.1.0"
