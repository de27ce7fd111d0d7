from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

from core.exceptions import DataError
from learning.sparsevec import SparseVector

LABELS = (-1, 1)


@dataclass(frozen=True)
class Example:
    features: SparseVector
    label: int
    # 0-based task index; the public task id is task + 1
    task: int


@dataclass
class TaskData:
    task_id: int
    train: List[Example]
    test: List[Example]

    @property
    def index(self):
        return self.task_id - 1


@dataclass
class MultitaskDataset:
    """
    K tasks with ids 1..K, each with disjoint train and test lists.
    Immutable by convention once built.
    """
    tasks: List[TaskData]
    name: str = 'dataset'
    feature_count_hint: Optional[int] = None
    provenance: str = ''
    # Ground-truth weight vector per task, when the data is synthetic
    ground_truth: Optional[List[SparseVector]] = None
    # Set when the dataset can be rebuilt from a manifest or generator
    source: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        self.validate()

    @property
    def K(self):
        return len(self.tasks)

    @property
    def total_train(self):
        return sum(len(task.train) for task in self.tasks)

    @property
    def total_test(self):
        return sum(len(task.test) for task in self.tasks)

    def max_feature_index(self):
        best = -1
        for task in self.tasks:
            for example in task.train + task.test:
                best = max(best, example.features.max_index())
        return best

    def validate(self):
        if not self.tasks:
            raise DataError('Dataset has no tasks')
        for position, task in enumerate(self.tasks):
            if task.task_id != position + 1:
                raise DataError(f'Task ids must be dense 1..K; found id {task.task_id} at position {position + 1}')
            for example in task.train + task.test:
                if example.label not in LABELS:
                    raise DataError(f'Task {task.task_id}: label {example.label} is not +1/-1')
                if example.task != task.index:
                    raise DataError(f'Task {task.task_id}: example tagged with task index {example.task}')
            train_ids = {id(example) for example in task.train}
            if any(id(example) in train_ids for example in task.test):
                raise DataError(f'Task {task.task_id}: train and test share examples')

    def with_tasks(self, tasks, **changes):
        return replace(self, tasks=tasks, **changes)

    def label_balance(self):
        """Per task id: (positives, negatives) over train + test."""
        balance = {}
        for task in self.tasks:
            labels = [example.label for example in task.train + task.test]
            balance[task.task_id] = (labels.count(1), labels.count(-1))
        return balance


@dataclass(frozen=True)
class StreamOrder:
    """Permutation of all pooled training examples as (task index, train index) pairs."""
    pairs: Tuple[Tuple[int, int], ...]
    seed: Optional[int] = None

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def examples(self, dataset: MultitaskDataset) -> Sequence[Example]:
        return [dataset.tasks[k].train[i] for k, i in self.pairs]
