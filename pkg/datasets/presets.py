"""
Expected shapes of the three benchmark collections and the split protocol
used with them.
"""
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class DatasetPreset:
    name: str
    tasks: int
    train_per_task: int
    # None: every remaining example goes to the test set
    test_per_task: Optional[int]
    approx_features: int
    # Largest budget in the sweep, as a fraction of the total training size
    sweep_ceiling: float
    description: str = ''


DATASET_PRESETS = {
    'landmine': DatasetPreset(
        name='landmine',
        tasks=19,
        train_per_task=160,
        test_per_task=None,
        approx_features=9,
        sweep_ceiling=0.10,
        description='Landmine fields; tasks 1-10 foliated, 11-19 desert (two clusters)',
    ),
    'spam': DatasetPreset(
        name='spam',
        tasks=15,
        train_per_task=100,
        test_per_task=None,
        approx_features=150_000,
        sweep_ceiling=0.30,
        description='Per-user inboxes, term frequencies',
    ),
    'sentiment': DatasetPreset(
        name='sentiment',
        tasks=22,
        train_per_task=100,
        test_per_task=300,
        approx_features=2_900_000,
        sweep_ceiling=0.30,
        description='Product-review domains, bag of words',
    ),
}


def get_preset(name):
    if name is None:
        return None
    return DATASET_PRESETS.get(name.lower())


def check_against_preset(dataset, preset):
    """Human-readable mismatches between a loaded dataset and its preset."""
    problems = []
    if dataset.K != preset.tasks:
        problems.append(f'expected {preset.tasks} tasks, found {dataset.K}')
    for task in dataset.tasks:
        if len(task.train) != preset.train_per_task:
            problems.append(
                f'task {task.task_id}: expected {preset.train_per_task} training examples, found {len(task.train)}'
            )
        if preset.test_per_task is not None and len(task.test) > preset.test_per_task:
            problems.append(
                f'task {task.task_id}: expected at most {preset.test_per_task} test examples, found {len(task.test)}'
            )
    return problems
