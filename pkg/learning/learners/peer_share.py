import logging

from ..model import predict_sign
from ..sparsevec import axpy_into
from .base import LearnerKind
from .peer import PeerLearner

logger = logging.getLogger(__name__)


class PeerShareLearner(PeerLearner):
    """
    PEER plus data sharing: an oracle-labelled example is also applied to
    every peer that mispredicts it and holds at least uniform peer weight
    1/(K-1) in the (updated) committee.
    """
    kind = LearnerKind.PEER_SHARE

    def _share(self, x, k, y, peers, p_peers, tau_row):
        threshold = 1.0 / (self.K - 1)
        shared = set()
        for m, p_km in zip(peers, p_peers):
            if predict_sign(p_km) != y and tau_row[m] >= threshold:
                axpy_into(float(y), x, self.state.w[m])
                shared.add(m)
        if shared:
            logger.debug(f'Task {k} shared a labelled example with peers {sorted(shared)}')
        return shared
