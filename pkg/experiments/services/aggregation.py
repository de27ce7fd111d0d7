import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from core.exceptions import AggregationError

logger = logging.getLogger(__name__)

# Two-sided 95% normal quantile
Z_95 = 1.96


@dataclass
class MeanCI:
    mean: Optional[float]
    half_width: Optional[float]
    n: int

    def format(self, digits=4):
        if self.mean is None:
            return 'n/a'
        return f'{self.mean:.{digits}f} ± {self.half_width:.{digits}f}'


@dataclass
class RunSummary:
    learner: str
    dataset: str
    runs: int
    accuracy_micro: MeanCI
    accuracy_macro: MeanCI
    oracle_queries: MeanCI
    peer_queries: MeanCI
    seeds: List[int]


def mean_ci(values: Sequence[Optional[float]]) -> MeanCI:
    """
    Mean and 95% half-width 1.96 * s / sqrt(n) with the sample standard
    deviation. Missing values are skipped; a single value has half-width 0.
    """
    present = np.array([v for v in values if v is not None], dtype=float)
    n = int(present.size)
    if n == 0:
        return MeanCI(None, None, 0)
    mean = float(present.mean())
    if n == 1:
        return MeanCI(mean, 0.0, 1)
    half_width = Z_95 * float(present.std(ddof=1)) / math.sqrt(n)
    return MeanCI(mean, half_width, n)


def aggregate_runs(reports) -> RunSummary:
    if not reports:
        raise AggregationError()
    learners = sorted({report.learner for report in reports})
    datasets = sorted({report.dataset for report in reports})
    return RunSummary(
        learner=','.join(learners),
        dataset=','.join(datasets),
        runs=len(reports),
        accuracy_micro=mean_ci([report.accuracy_micro for report in reports]),
        accuracy_macro=mean_ci([report.accuracy_macro for report in reports]),
        oracle_queries=mean_ci([report.oracle_queries for report in reports]),
        peer_queries=mean_ci([report.peer_queries for report in reports]),
        seeds=[report.seed for report in reports],
    )


def format_summary_row(summary: RunSummary, width=12):
    """Accuracy and query count, each as mean ± 95% half-width."""
    return (
        f'{summary.learner:<{width}} '
        f'acc {summary.accuracy_micro.format(4)}   '
        f'#queries {summary.oracle_queries.format(1)}'
    )
