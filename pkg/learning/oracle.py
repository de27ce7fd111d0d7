import logging
from typing import Optional

from core.exceptions import OracleBudgetExhausted

logger = logging.getLogger(__name__)


class LabelOracle:
    """
    True-label source with an optional query budget.

    The driver presents the label of the current example; learners call
    query() only when they decide to pay for it. Peer queries never go
    through the oracle.
    """

    def __init__(self, budget: Optional[int] = None):
        if budget is not None and budget < 0:
            raise ValueError(f'Budget must be nonnegative, got {budget}')
        self.budget = budget
        self.queries = 0
        self._label = None

    def present(self, label: int):
        self._label = label

    @property
    def remaining(self):
        if self.budget is None:
            return None
        return self.budget - self.queries

    @property
    def exhausted(self):
        return self.budget is not None and self.queries >= self.budget

    def query(self) -> int:
        if self._label is None:
            raise RuntimeError('No example has been presented to the oracle')
        if self.exhausted:
            raise OracleBudgetExhausted()
        self.queries += 1
        return self._label
