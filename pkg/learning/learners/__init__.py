from .amlc import AMLCLearner
from .base import (
    RNG_ALGORITHM,
    LearnerCounters,
    LearnerKind,
    LearnerState,
    OnlineLearner,
    StepOutcome,
    make_rng,
)
from .independent import IndependentLearner
from .peer import PeerLearner
from .peer_share import PeerShareLearner
from .random_query import RandomLearner

LEARNERS = {
    LearnerKind.AMLC: AMLCLearner,
    LearnerKind.INDEPENDENT: IndependentLearner,
    LearnerKind.RANDOM: RandomLearner,
    LearnerKind.PEER: PeerLearner,
    LearnerKind.PEER_SHARE: PeerShareLearner,
}


def build_learner(kind, K, hyper, rng=None, seed=None, share_against_true_label=False):
    kind = LearnerKind(kind)
    if kind == LearnerKind.AMLC:
        return AMLCLearner(K, hyper, seed=seed, rng=rng, share_against_true_label=share_against_true_label)
    return LEARNERS[kind](K, hyper, seed=seed, rng=rng)


__all__ = [
    'AMLCLearner',
    'IndependentLearner',
    'LEARNERS',
    'LearnerCounters',
    'LearnerKind',
    'LearnerState',
    'OnlineLearner',
    'PeerLearner',
    'PeerShareLearner',
    'RNG_ALGORITHM',
    'RandomLearner',
    'StepOutcome',
    'build_learner',
    'make_rng',
]
