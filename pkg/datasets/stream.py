import numpy as np

from .types import MultitaskDataset, StreamOrder


def shuffle_stream(dataset: MultitaskDataset, seed=None, rng=None) -> StreamOrder:
    """
    Uniform permutation of the pooled training examples of all tasks.
    When the run generator is passed, the shuffle consumes its draws before
    any learner draw.
    """
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(seed))
    pooled = [(task.index, i) for task in dataset.tasks for i in range(len(task.train))]
    order = rng.permutation(len(pooled))
    return StreamOrder(pairs=tuple(pooled[int(j)] for j in order), seed=seed)
