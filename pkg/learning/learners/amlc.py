"""
Active multitask learning with committees.

Each task predicts with a tau-weighted committee of all K classifiers, pays
for a label with probability b / (b + |p|), and on a paid label updates its
own perceptron, reweights its committee by peer hinge losses and shares the
labelled example with peers that disagreed while weighing at least as much
as the task itself.
"""
import logging

from ..model import (
    RelationshipMatrix,
    combine_model,
    committee_confidence,
    hinge_from_confidence,
    predict_sign,
    query_probability,
    reweight_row,
)
from ..sparsevec import axpy_into
from .base import LearnerKind, OnlineLearner, StepOutcome

logger = logging.getLogger(__name__)


class AMLCLearner(OnlineLearner):
    kind = LearnerKind.AMLC

    def __init__(self, K, hyper, seed=None, rng=None, share_against_true_label=False):
        super().__init__(K, hyper, seed=seed, rng=rng)
        self.share_against_true_label = share_against_true_label

    def initial_tau(self, K):
        return RelationshipMatrix.uniform(K)

    def _step(self, x, k, oracle):
        state = self.state
        p_k = self.confidences(x)
        p = committee_confidence(p_k, state.tau.row(k))
        y_hat = predict_sign(p)
        if self.draw() >= query_probability(state.hyper.b, p):
            return StepOutcome(prediction=y_hat, queried_oracle=False)

        y = oracle.query()
        mistake = y != y_hat
        updated = set()
        if mistake:
            axpy_into(float(y), x, state.w[k])
            updated.add(k)

        # Losses come from the confidences computed before the update above.
        losses = [hinge_from_confidence(p_km, y) for p_km in p_k]
        new_row, reset = reweight_row(state.tau.row(k), losses, state.hyper.C)
        if reset:
            state.warnings.append(f'committee row {k} underflowed and was reset to uniform')
        state.tau.set_row(k, new_row)

        reference = y if self.share_against_true_label else y_hat
        self_weight = new_row[k]
        shared = set()
        for m, p_km in enumerate(p_k):
            if m == k:
                continue
            if predict_sign(p_km) != reference and new_row[m] >= self_weight:
                axpy_into(float(y), x, state.w[m])
                shared.add(m)
        if shared:
            logger.debug(f'Task {k} shared a labelled example with tasks {sorted(shared)}')

        return StepOutcome(
            prediction=y_hat,
            queried_oracle=True,
            mistake=mistake,
            shared_to=frozenset(shared),
            updated_tasks=frozenset(updated | shared),
        )

    def finalize(self):
        return combine_model(self.state.tau, self.state.w)
