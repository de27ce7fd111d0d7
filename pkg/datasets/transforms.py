from .types import Example, TaskData


def _unit(example):
    norm = example.features.norm()
    if norm == 0.0:
        return example
    return Example(features=example.features.scaled(1.0 / norm), label=example.label, task=example.task)


def normalize_examples(dataset):
    """Copy of the dataset with every example scaled to unit L2 norm."""
    tasks = [
        TaskData(
            task_id=task.task_id,
            train=[_unit(example) for example in task.train],
            test=[_unit(example) for example in task.test],
        )
        for task in dataset.tasks
    ]
    return dataset.with_tasks(tasks, provenance=f'{dataset.provenance}; l2-normalized')
