"""
Closed-form committee math: hinge losses, committee confidence, query
probability, the multiplicative relationship-matrix update and the final
tau * w model combination.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

from core.exceptions import ConfigurationError

from .sparsevec import SparseVector, dot, linear_combination

logger = logging.getLogger(__name__)

# A row whose mass falls below this after the multiplicative step is reset to uniform.
UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class HyperParams:
    b: float = 1.0
    C: float = 1.0
    # PEER's second (peer-confidence) threshold; None means "same as b"
    b2: Optional[float] = None

    def __post_init__(self):
        if not self.b > 0:
            raise ConfigurationError(f'b must be positive, got {self.b}')
        if not self.C > 0:
            raise ConfigurationError(f'C must be positive, got {self.C}')
        if self.b2 is not None and not self.b2 > 0:
            raise ConfigurationError(f'b2 must be positive, got {self.b2}')

    @property
    def peer_b(self):
        return self.b if self.b2 is None else self.b2


class WeightMatrix:
    """K sparse weight rows; row k is task k's classifier."""

    def __init__(self, rows: Sequence[SparseVector]):
        self.rows: List[SparseVector] = list(rows)

    @classmethod
    def zeros(cls, K):
        return cls([SparseVector() for _ in range(K)])

    @property
    def K(self):
        return len(self.rows)

    def __getitem__(self, k):
        return self.rows[k]

    def __len__(self):
        return len(self.rows)

    def copy(self):
        return WeightMatrix([row.copy() for row in self.rows])

    def to_payload(self):
        return [[[i, v] for i, v in row.sorted_items()] for row in self.rows]

    @classmethod
    def from_payload(cls, payload):
        return cls([SparseVector((int(i), float(v)) for i, v in row) for row in payload])


class RelationshipMatrix:
    """
    K x K row-stochastic committee weights. Row k is task k's committee.
    """

    def __init__(self, rows: Sequence[Sequence[float]]):
        self.rows: List[List[float]] = [list(map(float, row)) for row in rows]

    @classmethod
    def uniform(cls, K):
        return cls([[1.0 / K] * K for _ in range(K)])

    @classmethod
    def peers_uniform(cls, K):
        """Zero diagonal, 1/(K-1) elsewhere: committees that exclude the task itself."""
        if K < 2:
            raise ConfigurationError('A peer committee needs at least two tasks')
        share = 1.0 / (K - 1)
        return cls([[0.0 if m == k else share for m in range(K)] for k in range(K)])

    @classmethod
    def identity(cls, K):
        return cls([[1.0 if m == k else 0.0 for m in range(K)] for k in range(K)])

    @property
    def K(self):
        return len(self.rows)

    def row(self, k):
        return self.rows[k]

    def set_row(self, k, row):
        self.rows[k] = list(row)

    def __getitem__(self, k):
        return self.rows[k]

    def to_list(self):
        return [list(row) for row in self.rows]


def hinge_loss(w_m: SparseVector, x: SparseVector, y: int) -> float:
    return max(0.0, 1.0 - y * dot(x, w_m))


def hinge_from_confidence(confidence: float, y: int) -> float:
    return max(0.0, 1.0 - y * confidence)


def per_task_confidences(w: WeightMatrix, x: SparseVector) -> List[float]:
    return [dot(x, w_m) for w_m in w.rows]


def committee_confidence(p_k: Sequence[float], tau_row: Sequence[float]) -> float:
    return math.fsum(p * t for p, t in zip(p_k, tau_row))


def predict_sign(p: float) -> int:
    # sign(0) = +1
    return 1 if p >= 0 else -1


def query_probability(b: float, p: float) -> float:
    return b / (b + abs(p))


class RowUpdate(NamedTuple):
    row: List[float]
    reset: bool


def reweight_row(tau_row: Sequence[float], losses: Sequence[float], C: float) -> RowUpdate:
    """
    Multiplicative step tau_km * exp(-C * l_km / lambda), lambda = sum of
    losses, then renormalisation. lambda == 0 leaves the row unchanged.
    A row whose total mass underflows is reset to uniform (reset=True).
    """
    lam = math.fsum(losses)
    if lam <= 0.0:
        return RowUpdate(list(tau_row), False)
    scaled = [t * math.exp(-C * loss / lam) for t, loss in zip(tau_row, losses)]
    total = math.fsum(scaled)
    if total < UNDERFLOW_FLOOR:
        K = len(scaled)
        logger.warning(f'Committee row underflowed (mass {total!r}); resetting to uniform over {K} tasks')
        return RowUpdate([1.0 / K] * K, True)
    return RowUpdate([s / total for s in scaled], False)


def tau_row_update(tau_row: Sequence[float], losses: Sequence[float], C: float) -> List[float]:
    return reweight_row(tau_row, losses, C).row


def combine_model(tau: RelationshipMatrix, w: WeightMatrix) -> WeightMatrix:
    """Row k of the result is sum_m tau_km * w_m."""
    if tau.K != w.K:
        raise ConfigurationError(f'Relationship matrix has {tau.K} rows but there are {w.K} weight rows')
    return WeightMatrix([linear_combination(tau.row(k), w.rows) for k in range(w.K)])
