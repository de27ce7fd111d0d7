"""
Active learning from peers: a task that is unsure of itself first asks its
peer committee (which excludes the task) and pays the oracle only when the
peers are unsure as well. A confident task changes nothing.
"""
import logging

from core.exceptions import ConfigurationError

from ..model import (
    RelationshipMatrix,
    committee_confidence,
    hinge_from_confidence,
    predict_sign,
    query_probability,
    reweight_row,
)
from ..sparsevec import axpy_into, dot
from .base import LearnerKind, OnlineLearner, StepOutcome

logger = logging.getLogger(__name__)


class PeerLearner(OnlineLearner):
    kind = LearnerKind.PEER

    def __init__(self, K, hyper, seed=None, rng=None):
        if K < 2:
            raise ConfigurationError(f'{self.kind.label} needs at least two tasks, got K={K}')
        super().__init__(K, hyper, seed=seed, rng=rng)

    def initial_tau(self, K):
        return RelationshipMatrix.peers_uniform(K)

    def _peer_indices(self, k):
        return [m for m in range(self.K) if m != k]

    def _step(self, x, k, oracle):
        state = self.state
        p_kk = dot(x, state.w[k])
        own = predict_sign(p_kk)
        if self.draw() >= query_probability(state.hyper.b, p_kk):
            return StepOutcome(prediction=own, queried_oracle=False)

        peers = self._peer_indices(k)
        tau_row = state.tau.row(k)
        p_peers = [dot(x, state.w[m]) for m in peers]
        p_tilde = committee_confidence(p_peers, [tau_row[m] for m in peers])

        if self.draw() >= query_probability(state.hyper.peer_b, p_tilde):
            pseudo = predict_sign(p_tilde)
            updated = frozenset()
            if own != pseudo:
                axpy_into(float(pseudo), x, state.w[k])
                updated = frozenset({k})
            return StepOutcome(
                prediction=pseudo,
                queried_oracle=False,
                queried_peer=True,
                updated_tasks=updated,
            )

        y = oracle.query()
        mistake = y != own
        updated = set()
        if mistake:
            axpy_into(float(y), x, state.w[k])
            updated.add(k)

        losses = [hinge_from_confidence(p_km, y) for p_km in p_peers]
        new_peer_row, reset = reweight_row([tau_row[m] for m in peers], losses, state.hyper.C)
        if reset:
            state.warnings.append(f'peer committee row {k} underflowed and was reset to uniform')
        new_row = [0.0] * self.K
        for m, weight in zip(peers, new_peer_row):
            new_row[m] = weight
        state.tau.set_row(k, new_row)

        shared = self._share(x, k, y, peers, p_peers, new_row)
        return StepOutcome(
            prediction=own,
            queried_oracle=True,
            mistake=mistake,
            shared_to=frozenset(shared),
            updated_tasks=frozenset(updated | shared),
        )

    def _share(self, x, k, y, peers, p_peers, tau_row):
        return set()
