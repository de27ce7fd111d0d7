"""
Clustered multitask generator: tasks in the same cluster share a ground-truth
direction up to a small per-task jitter, examples are uniform on the unit
sphere and labelled by the task's direction with optional label noise.
"""
import logging

import numpy as np

from core.exceptions import ConfigurationError
from learning.sparsevec import SparseVector

from .types import Example, MultitaskDataset, TaskData

logger = logging.getLogger(__name__)


def _unit(vector):
    return vector / np.linalg.norm(vector)


def cluster_of(task_index, K, clusters):
    """Contiguous blocks: the first K/clusters tasks form cluster 0, and so on."""
    return task_index * clusters // K


def synth_clustered(K, clusters, D, n_train, n_test, label_noise=0.0, task_jitter=0.0, seed=0):
    if K < 1 or D < 1:
        raise ConfigurationError(f'K and D must be positive (K={K}, D={D})')
    if not 1 <= clusters <= K:
        raise ConfigurationError(f'clusters must be in [1, K]; got {clusters} for K={K}')
    if n_train < 1 or n_test < 0:
        raise ConfigurationError(f'n_train must be positive and n_test nonnegative (got {n_train}, {n_test})')
    if not 0.0 <= label_noise < 0.5:
        raise ConfigurationError(f'label_noise must be in [0, 0.5), got {label_noise}')
    if task_jitter < 0:
        raise ConfigurationError(f'task_jitter must be nonnegative, got {task_jitter}')

    rng = np.random.default_rng(seed)
    centres = [_unit(rng.standard_normal(D)) for _ in range(clusters)]
    directions = []
    tasks = []
    for k in range(K):
        u_k = _unit(centres[cluster_of(k, K, clusters)] + task_jitter * rng.standard_normal(D))
        directions.append(u_k)
        examples = []
        for _ in range(n_train + n_test):
            x = _unit(rng.standard_normal(D))
            y = 1 if float(np.dot(u_k, x)) >= 0 else -1
            if label_noise > 0 and rng.random() < label_noise:
                y = -y
            examples.append(Example(features=SparseVector.from_dense(x.tolist()), label=y, task=k))
        tasks.append(TaskData(task_id=k + 1, train=examples[:n_train], test=examples[n_train:]))

    params = {
        'K': K, 'clusters': clusters, 'D': D, 'n_train': n_train, 'n_test': n_test,
        'label_noise': label_noise, 'task_jitter': task_jitter, 'seed': seed,
    }
    logger.info(f'Generated synthetic dataset {params}')
    return MultitaskDataset(
        tasks=tasks,
        name=f'synth-K{K}-c{clusters}-D{D}-s{seed}',
        feature_count_hint=D,
        provenance='synth_clustered ' + ' '.join(f'{key}={value}' for key, value in params.items()),
        ground_truth=[SparseVector.from_dense(u.tolist()) for u in directions],
        source={'kind': 'synthetic', 'params': params},
    )
