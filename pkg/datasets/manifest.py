"""
Dataset manifests are KEY=VALUE files (dotenv syntax):

    NAME=landmine
    PRESET=landmine              # optional; fills TRAIN_PER_TASK / TEST_PER_TASK
    FEATURE_COUNT_HINT=9         # optional
    # either pre-split files ...
    TASK_1_TRAIN=task01.train.svm
    TASK_1_TEST=task01.test.svm
    # ... or one raw file per task, split on load
    TASK_2_DATA=task02.svm
    TRAIN_PER_TASK=160
    TEST_PER_TASK=300            # optional cap
    SPLIT_SEED=0

Task ids must be dense 1..K. Relative paths resolve against the manifest's
directory. A manifest must use one layout for all tasks.
"""
import io
import logging
import os
import re
from pathlib import Path

from dotenv import dotenv_values

from core.exceptions import DataError, ManifestError

from .presets import get_preset
from .sparse_format import decoded_lines, read_examples, write_examples
from .splits import split_train_test
from .types import MultitaskDataset, TaskData

logger = logging.getLogger(__name__)

TASK_KEY = re.compile(r'^TASK_(\d+)_(TRAIN|TEST|DATA)$')


def _int_value(values, key, default=None):
    raw = values.get(key)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ManifestError(f'{key} must be an integer, got {raw!r}')


def read_manifest(path):
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f'Manifest not found: {path}')
    text = ''.join(line for _, line in decoded_lines(path))
    values = dict(dotenv_values(stream=io.StringIO(text)))
    files = {}
    for key, value in values.items():
        match = TASK_KEY.match(key)
        if match is None:
            continue
        task_id, role = int(match.group(1)), match.group(2)
        if not value:
            raise ManifestError(f'{key} has no file name')
        files.setdefault(task_id, {})[role] = path.parent / value
    if not files:
        raise ManifestError(f'{path} lists no TASK_<id>_TRAIN / TASK_<id>_DATA entries')
    expected = list(range(1, len(files) + 1))
    if sorted(files) != expected:
        raise ManifestError(f'Task ids must be dense 1..{len(files)}; found {sorted(files)}')
    return values, files


def load_sparse_dataset(manifest_path) -> MultitaskDataset:
    manifest_path = Path(manifest_path)
    values, files = read_manifest(manifest_path)
    name = values.get('NAME') or manifest_path.stem
    preset = get_preset(values.get('PRESET') or name)
    hint = _int_value(values, 'FEATURE_COUNT_HINT')

    layouts = {'DATA' in roles for roles in files.values()}
    if len(layouts) != 1:
        raise ManifestError('Mix of pre-split (TRAIN/TEST) and raw (DATA) task entries')
    raw_layout = layouts.pop()
    source = {'kind': 'manifest', 'path': str(manifest_path.resolve())}

    if raw_layout:
        train_per_task = _int_value(values, 'TRAIN_PER_TASK', preset.train_per_task if preset else None)
        if train_per_task is None:
            raise ManifestError('TASK_<id>_DATA entries need TRAIN_PER_TASK (or a known PRESET)')
        test_per_task = _int_value(values, 'TEST_PER_TASK', preset.test_per_task if preset else None)
        split_seed = _int_value(values, 'SPLIT_SEED', 0)
        raw = [read_examples(files[task_id]['DATA'], task_id - 1) for task_id in sorted(files)]
        dataset = split_train_test(
            raw,
            train_per_task=train_per_task,
            test_per_task=test_per_task,
            seed=split_seed,
            name=name,
            feature_count_hint=hint,
            provenance=f'{manifest_path} (split train={train_per_task} test={test_per_task} seed={split_seed})',
        )
        dataset.source = source
        logger.info(f'Loaded {dataset.K} tasks from {manifest_path} and split them ({dataset.total_train} train)')
        return dataset

    tasks = []
    for task_id in sorted(files):
        roles = files[task_id]
        if 'TRAIN' not in roles:
            raise ManifestError(f'Task {task_id} has no TASK_{task_id}_TRAIN entry')
        train = read_examples(roles['TRAIN'], task_id - 1)
        test = read_examples(roles['TEST'], task_id - 1) if 'TEST' in roles else []
        if not train:
            raise DataError(f'Task {task_id} has no training examples ({roles["TRAIN"]})')
        tasks.append(TaskData(task_id=task_id, train=train, test=test))

    dataset = MultitaskDataset(
        tasks=tasks,
        name=name,
        feature_count_hint=hint,
        provenance=str(manifest_path),
        source=source,
    )
    logger.info(f'Loaded {dataset.K} tasks from {manifest_path} ({dataset.total_train} train, {dataset.total_test} test)')
    return dataset


def write_dataset(dataset: MultitaskDataset, directory, name=None) -> Path:
    """Writes per-task train/test files plus a pre-split manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    name = name or dataset.name
    lines = [f'NAME={name}']
    if dataset.feature_count_hint is not None:
        lines.append(f'FEATURE_COUNT_HINT={dataset.feature_count_hint}')
    for task in dataset.tasks:
        train_file = f'{name}.task{task.task_id:02d}.train.svm'
        test_file = f'{name}.task{task.task_id:02d}.test.svm'
        write_examples(directory / train_file, task.train)
        write_examples(directory / test_file, task.test)
        lines.append(f'TASK_{task.task_id}_TRAIN={train_file}')
        lines.append(f'TASK_{task.task_id}_TEST={test_file}')

    manifest_path = directory / f'{name}.manifest'
    tmp = manifest_path.with_name(manifest_path.name + '.tmp')
    try:
        tmp.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        os.replace(tmp, manifest_path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    logger.info(f'Wrote {dataset.K} tasks to {directory} ({manifest_path.name})')
    return manifest_path
