import logging
from typing import Optional, Sequence

import numpy as np

from core.exceptions import ConfigurationError, EmptyTestSetError, TaskTooSmallError

from .types import Example, MultitaskDataset, TaskData

logger = logging.getLogger(__name__)


def split_train_test(
    raw_tasks: Sequence[Sequence[Example]],
    train_per_task: int,
    test_per_task: Optional[int] = None,
    seed: int = 0,
    name: str = 'dataset',
    feature_count_hint: Optional[int] = None,
    provenance: str = '',
) -> MultitaskDataset:
    """
    Draws train_per_task examples per task uniformly without replacement;
    the rest is the test set, truncated to test_per_task when given.
    """
    if train_per_task < 1:
        raise ConfigurationError(f'train_per_task must be at least 1, got {train_per_task}')
    if test_per_task is not None and test_per_task < 1:
        raise ConfigurationError(f'test_per_task must be at least 1, got {test_per_task}')

    rng = np.random.default_rng(seed)
    tasks = []
    for position, examples in enumerate(raw_tasks):
        task_id = position + 1
        if len(examples) == train_per_task:
            raise EmptyTestSetError(f'Task {task_id}: all {len(examples)} examples would be used for training')
        if len(examples) < train_per_task:
            raise TaskTooSmallError(task_id, len(examples), train_per_task)
        order = rng.permutation(len(examples))
        train = [examples[i] for i in order[:train_per_task]]
        test = [examples[i] for i in order[train_per_task:]]
        if test_per_task is not None:
            test = test[:test_per_task]
        tasks.append(TaskData(task_id=task_id, train=train, test=test))
        logger.debug(f'Task {task_id}: {len(train)} train / {len(test)} test')

    return MultitaskDataset(
        tasks=tasks,
        name=name,
        feature_count_hint=feature_count_hint,
        provenance=provenance or f'split train={train_per_task} test={test_per_task} seed={seed}',
    )


def stratified_folds(dataset: MultitaskDataset, folds: int, seed: int):
    """
    Per-task fold assignment: each task's training examples are shuffled and
    dealt round-robin into `folds` folds. Returns, per task, a list of fold
    ids aligned with task.train.
    """
    if folds < 2:
        raise ConfigurationError(f'Cross-validation needs at least 2 folds, got {folds}')
    rng = np.random.default_rng(seed)
    assignments = []
    for task in dataset.tasks:
        if len(task.train) < folds:
            raise ConfigurationError(
                f'Task {task.task_id} has {len(task.train)} training examples; {folds}-fold CV needs at least {folds}'
            )
        order = rng.permutation(len(task.train))
        fold_of = [0] * len(task.train)
        for position, index in enumerate(order):
            fold_of[int(index)] = position % folds
        assignments.append(fold_of)
    return assignments


def fold_dataset(dataset: MultitaskDataset, assignments, fold: int) -> MultitaskDataset:
    """Training split without `fold`; the held-out fold becomes the test split."""
    tasks = []
    for task, fold_of in zip(dataset.tasks, assignments):
        train = [example for example, f in zip(task.train, fold_of) if f != fold]
        held_out = [example for example, f in zip(task.train, fold_of) if f == fold]
        tasks.append(TaskData(task_id=task.task_id, train=train, test=held_out))
    return MultitaskDataset(
        tasks=tasks,
        name=f'{dataset.name}[fold {fold}]',
        feature_count_hint=dataset.feature_count_hint,
        provenance=f'{dataset.provenance}; cv fold {fold}',
    )
