from ..model import predict_sign
from ..sparsevec import dot
from .base import LearnerKind, OnlineLearner, StepOutcome

QUERY_PROBABILITY = 0.5


class RandomLearner(OnlineLearner):
    """Queries with probability 1/2 regardless of confidence."""
    kind = LearnerKind.RANDOM

    def _step(self, x, k, oracle):
        p = dot(x, self.state.w[k])
        if self.draw() >= QUERY_PROBABILITY:
            return StepOutcome(prediction=predict_sign(p), queried_oracle=False)
        return self._perceptron_step(x, k, p, oracle)
