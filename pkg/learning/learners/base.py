import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional

import numpy as np
from django.db import models

from ..model import HyperParams, RelationshipMatrix, WeightMatrix, per_task_confidences, predict_sign
from ..sparsevec import SparseVector, axpy_into

logger = logging.getLogger(__name__)

RNG_ALGORITHM = 'numpy.PCG64'


class LearnerKind(models.TextChoices):
    AMLC = 'amlc', 'AMLC'
    INDEPENDENT = 'independent', 'Independent'
    RANDOM = 'random', 'Random'
    PEER = 'peer', 'PEER'
    PEER_SHARE = 'peer_share', 'PEER+Share'


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class StepOutcome:
    prediction: int
    queried_oracle: bool
    queried_peer: bool = False
    # Only known when the oracle was queried
    mistake: Optional[bool] = None
    shared_to: FrozenSet[int] = frozenset()
    updated_tasks: FrozenSet[int] = frozenset()

    def as_dict(self):
        return {
            'prediction': self.prediction,
            'queried_oracle': self.queried_oracle,
            'queried_peer': self.queried_peer,
            'mistake': self.mistake,
            'shared_to': sorted(self.shared_to),
            'updated_tasks': sorted(self.updated_tasks),
        }


@dataclass
class LearnerCounters:
    oracle_queries: int = 0
    peer_queries: int = 0
    mistakes: List[int] = field(default_factory=list)

    def record(self, task, outcome: StepOutcome):
        if outcome.queried_oracle:
            self.oracle_queries += 1
        if outcome.queried_peer:
            self.peer_queries += 1
        if outcome.mistake:
            self.mistakes[task] += 1


@dataclass
class LearnerState:
    """Initial state: all-zero weights, uniform committees."""
    w: WeightMatrix
    hyper: HyperParams
    rng: np.random.Generator
    tau: Optional[RelationshipMatrix] = None
    counters: LearnerCounters = field(default_factory=LearnerCounters)
    warnings: List[str] = field(default_factory=list)

    @property
    def K(self):
        return self.w.K


class OnlineLearner(ABC):
    """
    One online learner over K tasks. step() consumes one example of task k
    (0-based index) and decides whether to pay the oracle for its label.
    """
    kind: LearnerKind

    def __init__(self, K: int, hyper: HyperParams, seed=None, rng=None):
        self.state = LearnerState(
            w=WeightMatrix.zeros(K),
            hyper=hyper,
            rng=rng if rng is not None else make_rng(seed),
            tau=self.initial_tau(K),
        )
        self.state.counters.mistakes = [0] * K

    def initial_tau(self, K) -> Optional[RelationshipMatrix]:
        return None

    @property
    def K(self):
        return self.state.K

    def draw(self) -> float:
        return float(self.state.rng.random())

    def step(self, x: SparseVector, k: int, oracle) -> StepOutcome:
        outcome = self._step(x, k, oracle)
        self.state.counters.record(k, outcome)
        return outcome

    @abstractmethod
    def _step(self, x: SparseVector, k: int, oracle) -> StepOutcome:
        ...

    def finalize(self) -> WeightMatrix:
        """Model used at test time; task k predicts with row k."""
        return self.state.w.copy()

    def _perceptron_step(self, x, k, confidence, oracle):
        """
        Shared by Independent and Random: query, then a mistake-driven update
        of w_k with step size 1.
        """
        prediction = predict_sign(confidence)
        y = oracle.query()
        mistake = y != prediction
        updated = frozenset()
        if mistake:
            axpy_into(float(y), x, self.state.w[k])
            updated = frozenset({k})
        return StepOutcome(
            prediction=prediction,
            queried_oracle=True,
            mistake=mistake,
            updated_tasks=updated,
        )

    def confidences(self, x):
        return per_task_confidences(self.state.w, x)
