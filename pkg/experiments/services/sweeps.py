"""
Budget sweeps: every (learner, budget, seed) cell is a budgeted training run.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from core.exceptions import ConfigurationError
from core.task_dispatch import dispatch_cells

from .aggregation import MeanCI, mean_ci
from .cells import init_worker, run_cell
from .config import RunConfig

logger = logging.getLogger(__name__)

SWEEP_CSV_HEADER = [
    'learner', 'budget', 'seed', 'accuracy_micro', 'accuracy_macro',
    'oracle_queries', 'peer_queries', 'exhausted',
]


@dataclass
class SweepRow:
    learner: str
    budget: int
    seed: int
    accuracy_micro: Optional[float]
    accuracy_macro: Optional[float]
    oracle_queries: int
    peer_queries: int
    exhausted: bool


@dataclass
class SweepPoint:
    """One learner at one budget, aggregated over seeds."""
    learner: str
    budget: int
    accuracy: MeanCI
    queries: MeanCI
    # every seed spent the whole budget (no queries left)
    exhausted: bool
    exhausted_runs: int


@dataclass
class SweepResult:
    rows: List[SweepRow]
    points: List[SweepPoint]


def resolve_budget_pcts(pcts: Sequence[float], total_train: int) -> List[int]:
    """Percentages of the total training size, rounded down."""
    if not pcts:
        raise ConfigurationError('At least one budget percentage is required')
    budgets = []
    for pct in pcts:
        if pct < 0:
            raise ConfigurationError(f'Budget percentage must be nonnegative, got {pct}')
        budgets.append(int(math.floor(total_train * pct / 100.0 + 1e-9)))
    return budgets


def default_budget_pcts(ceiling_fraction: float, points: int = 5) -> List[float]:
    """Evenly spaced percentages up to the ceiling, e.g. 0.10 -> 2,4,6,8,10."""
    top = ceiling_fraction * 100.0
    return [round(top * (i + 1) / points, 6) for i in range(points)]


def budget_sweep(
    dataset,
    templates: Dict[str, RunConfig],
    budgets: Sequence[int],
    seeds: Sequence[int],
    workers: int = 1,
    celery_task=None,
) -> SweepResult:
    """
    templates maps learner value -> RunConfig carrying that learner's
    hyper-parameters and flags; budget and seed are filled per cell.
    """
    if not budgets:
        raise ConfigurationError('Budget list is empty')
    if list(budgets) != sorted(budgets):
        raise ConfigurationError(f'Budgets must be sorted ascending, got {list(budgets)}')
    if any(budget < 0 for budget in budgets):
        raise ConfigurationError('Budgets must be nonnegative')
    if not seeds:
        raise ConfigurationError('At least one seed is required')

    payloads = []
    for learner, template in templates.items():
        for budget in budgets:
            for seed in seeds:
                config = template.with_changes(oracle_budget=int(budget), seed=int(seed), dataset=dataset.source)
                payloads.append({
                    'key': [learner, f'{int(budget):012d}', f'{int(seed):012d}'],
                    'config': config.to_dict(),
                })
    logger.info(f'Budget sweep: {len(templates)} learners x {len(budgets)} budgets x {len(seeds)} seeds')

    results = dispatch_cells(
        run_cell,
        payloads,
        workers=workers,
        dataset=dataset,
        initializer=init_worker,
        celery_task=celery_task if dataset.source else None,
    )
    rows = [
        SweepRow(
            learner=result['learner'],
            budget=result['budget'],
            seed=result['seed'],
            accuracy_micro=result['accuracy_micro'],
            accuracy_macro=result['accuracy_macro'],
            oracle_queries=result['oracle_queries'],
            peer_queries=result['peer_queries'],
            exhausted=result['exhausted'],
        )
        for result in results
    ]

    points = []
    for learner in templates:
        for budget in budgets:
            cell_rows = [row for row in rows if row.learner == learner and row.budget == budget]
            exhausted_runs = sum(1 for row in cell_rows if row.exhausted)
            points.append(SweepPoint(
                learner=learner,
                budget=int(budget),
                accuracy=mean_ci([row.accuracy_micro for row in cell_rows]),
                queries=mean_ci([row.oracle_queries for row in cell_rows]),
                exhausted=exhausted_runs == len(cell_rows),
                exhausted_runs=exhausted_runs,
            ))
    return SweepResult(rows=rows, points=points)
