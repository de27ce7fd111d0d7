"""
Grid search for C (or PEER's b2) by per-task stratified k-fold
cross-validation on the training split.
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np

from core.exceptions import ConfigurationError
from core.task_dispatch import dispatch_cells
from datasets.splits import stratified_folds

from .cells import init_worker, run_cell
from .config import RunConfig

logger = logging.getLogger(__name__)

TUNABLE_PARAMS = ('C', 'b2')


def default_c_grid(min_exp=-4.0, max_exp=2.0, size=20) -> List[float]:
    """size values log-spaced over [10^min_exp, 10^max_exp]."""
    return [float(value) for value in np.logspace(min_exp, max_exp, size)]


@dataclass
class CVResult:
    param: str
    best_value: float
    grid: List[float]
    # mean validation accuracy per grid value (grid order)
    scores: List[float]
    # fold x grid validation accuracies
    fold_scores: List[List[float]]
    folds: int
    seed: int


def cross_validate(
    dataset,
    template: RunConfig,
    grid: Sequence[float],
    folds: int = 10,
    seed: int = 0,
    param: str = 'C',
    workers: int = 1,
    celery_task=None,
) -> CVResult:
    """
    For every grid value, train on k-1 folds (streamed in shuffled order) and
    score micro accuracy on the held-out fold; the best mean wins, ties going
    to the smaller value.
    """
    if param not in TUNABLE_PARAMS:
        raise ConfigurationError(f'Cannot cross-validate {param!r}; choose one of {TUNABLE_PARAMS}')
    if not grid:
        raise ConfigurationError('Grid is empty')
    if any(value <= 0 for value in grid):
        raise ConfigurationError(f'{param} grid values must be positive')
    # Raises ConfigurationError when some task has fewer than `folds` examples.
    stratified_folds(dataset, folds, seed)

    grid = sorted(float(value) for value in grid)
    payloads = []
    for g, value in enumerate(grid):
        hyper = replace(template.hyper, **{param: value})
        config = template.with_changes(hyper=hyper, oracle_budget=None, dataset=dataset.source)
        for fold in range(folds):
            payloads.append({
                'key': [f'{g:04d}', f'{fold:04d}'],
                'config': config.to_dict(),
                'cv': {'folds': folds, 'fold': fold, 'seed': seed},
            })
    logger.info(f'Cross-validating {param} over {len(grid)} values x {folds} folds for {template.learner.label}')

    results = dispatch_cells(
        run_cell,
        payloads,
        workers=workers,
        dataset=dataset,
        initializer=init_worker,
        celery_task=celery_task if dataset.source else None,
    )

    fold_scores = [[0.0] * len(grid) for _ in range(folds)]
    for result in results:
        g, fold = (int(part) for part in result['key'])
        accuracy = result['accuracy_micro']
        fold_scores[fold][g] = accuracy if accuracy is not None else 0.0
    scores = [float(np.mean([fold_scores[f][g] for f in range(folds)])) for g in range(len(grid))]

    best = 0
    for g in range(1, len(grid)):
        if scores[g] > scores[best]:
            best = g
    logger.info(f'Selected {param}={grid[best]:.6g} (mean validation accuracy {scores[best]:.4f})')
    return CVResult(
        param=param,
        best_value=grid[best],
        grid=grid,
        scores=scores,
        fold_scores=fold_scores,
        folds=folds,
        seed=seed,
    )


def cross_validate_C(dataset, template: RunConfig, grid, folds=10, seed=0, workers=1, celery_task=None):
    return cross_validate(dataset, template, grid, folds=folds, seed=seed, param='C',
                          workers=workers, celery_task=celery_task).best_value
