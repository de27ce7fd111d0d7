from ..model import predict_sign, query_probability
from ..sparsevec import dot
from .base import LearnerKind, OnlineLearner, StepOutcome


class IndependentLearner(OnlineLearner):
    """Selective-sampling perceptron per task; confidence from w_k alone."""
    kind = LearnerKind.INDEPENDENT

    def _step(self, x, k, oracle):
        p = dot(x, self.state.w[k])
        if self.draw() >= query_probability(self.state.hyper.b, p):
            return StepOutcome(prediction=predict_sign(p), queried_oracle=False)
        return self._perceptron_step(x, k, p, oracle)
