import tempfile
from pathlib import Path
from unittest.mock import patch

from django.test import SimpleTestCase

from core.exceptions import (
    ConfigurationError,
    DataError,
    DataFormatError,
    EmptyTestSetError,
    ManifestError,
    TaskTooSmallError,
)
from learning.learners import LearnerKind, build_learner
from learning.model import HyperParams, predict_sign
from learning.oracle import LabelOracle
from learning.sparsevec import SparseVector, dot

from .manifest import load_sparse_dataset, write_dataset
from .presets import DATASET_PRESETS, check_against_preset, get_preset
from .sparse_format import format_line, parse_line, read_examples
from .splits import fold_dataset, split_train_test, stratified_folds
from .stream import shuffle_stream
from .synthetic import cluster_of, synth_clustered
from .transforms import normalize_examples
from .types import Example, MultitaskDataset, TaskData


def raw_examples(count, task=0, offset=0):
    return [
        Example(features=SparseVector({0: float(offset + i + 1)}), label=1 if i % 2 else -1, task=task)
        for i in range(count)
    ]


class SparseFormatTests(SimpleTestCase):
    def test_parse_valid_line(self):
        label, features = parse_line('+1 0:0.5 3:-2 10:1e-3\n')
        self.assertEqual(label, 1)
        self.assertEqual(features.sorted_items(), [(0, 0.5), (3, -2.0), (10, 0.001)])
        self.assertEqual(parse_line('-1')[0], -1)

    def test_blank_and_comment_lines_are_skipped(self):
        self.assertIsNone(parse_line('   \n'))
        self.assertIsNone(parse_line('# header'))

    def test_bad_label_reports_location(self):
        with self.assertRaises(DataFormatError) as ctx:
            parse_line('2 0:1', line_number=7, source='task.svm')
        self.assertEqual(ctx.exception.line_number, 7)
        self.assertTrue(str(ctx.exception).startswith('task.svm:7: '))

    def test_duplicate_and_unsorted_indices(self):
        with self.assertRaisesMessage(DataFormatError, 'duplicate feature index 3'):
            parse_line('+1 3:1 3:2')
        with self.assertRaisesMessage(DataFormatError, 'strictly increasing'):
            parse_line('+1 4:1 2:2')

    def test_malformed_feature_and_negative_index(self):
        with self.assertRaises(DataFormatError):
            parse_line('+1 3=1')
        with self.assertRaises(DataFormatError):
            parse_line('+1 -1:1')
        with self.assertRaises(DataFormatError):
            parse_line('+1 a:1')

    def test_format_line_round_trip(self):
        example = Example(features=SparseVector({2: 0.1, 9: -3.5}), label=-1, task=0)
        label, features = parse_line(format_line(example))
        self.assertEqual(label, -1)
        self.assertEqual(features, example.features)

    def test_non_finite_values_are_rejected(self):
        for line in ('+1 0:nan', '+1 0:1 1:inf', '-1 2:-inf'):
            with self.assertRaisesMessage(DataFormatError, 'non-finite'):
                parse_line(line, line_number=4, source='task.svm')

    def test_read_examples_missing_file(self):
        with self.assertRaises(DataError):
            read_examples('/nonexistent/task.svm', 0)


class DatasetTypeTests(SimpleTestCase):
    def test_rejects_bad_labels_and_ids(self):
        with self.assertRaises(DataError):
            MultitaskDataset(tasks=[TaskData(task_id=2, train=raw_examples(2), test=[])])
        bad = Example(features=SparseVector({0: 1.0}), label=0, task=0)
        with self.assertRaises(DataError):
            MultitaskDataset(tasks=[TaskData(task_id=1, train=[bad], test=[])])
        with self.assertRaises(DataError):
            MultitaskDataset(tasks=[])

    def test_rejects_shared_train_and_test_examples(self):
        examples = raw_examples(3)
        with self.assertRaises(DataError):
            MultitaskDataset(tasks=[TaskData(task_id=1, train=examples, test=examples[:1])])

    def test_label_balance_and_max_feature_index(self):
        dataset = MultitaskDataset(tasks=[TaskData(task_id=1, train=raw_examples(4), test=[])])
        self.assertEqual(dataset.label_balance(), {1: (2, 2)})
        self.assertEqual(dataset.max_feature_index(), 0)


class SplitTests(SimpleTestCase):
    def test_split_sizes(self):
        dataset = split_train_test([raw_examples(509), raw_examples(200, task=1)], train_per_task=160, seed=1)
        self.assertEqual(len(dataset.tasks[0].train), 160)
        self.assertEqual(len(dataset.tasks[0].test), 349)
        self.assertEqual(len(dataset.tasks[1].test), 40)

    def test_test_cap(self):
        dataset = split_train_test([raw_examples(1000)], train_per_task=100, test_per_task=300, seed=0)
        self.assertEqual(len(dataset.tasks[0].test), 300)

    def test_train_and_test_disjoint(self):
        dataset = split_train_test([raw_examples(50)], train_per_task=20, seed=3)
        train_ids = {id(example) for example in dataset.tasks[0].train}
        self.assertFalse(any(id(example) in train_ids for example in dataset.tasks[0].test))

    def test_split_is_seeded(self):
        raw = [raw_examples(40)]
        first = split_train_test(raw, train_per_task=10, seed=5)
        second = split_train_test(raw, train_per_task=10, seed=5)
        self.assertEqual(first.tasks[0].train, second.tasks[0].train)

    def test_too_small_tasks(self):
        with self.assertRaises(TaskTooSmallError) as ctx:
            split_train_test([raw_examples(200), raw_examples(100, task=1)], train_per_task=160)
        self.assertEqual(ctx.exception.task_id, 2)
        with self.assertRaises(EmptyTestSetError):
            split_train_test([raw_examples(160)], train_per_task=160)

    def test_stratified_folds_are_balanced_per_task(self):
        dataset = synth_clustered(K=3, clusters=1, D=4, n_train=23, n_test=1, seed=0)
        assignments = stratified_folds(dataset, 5, seed=0)
        for fold_of in assignments:
            counts = [fold_of.count(f) for f in range(5)]
            self.assertLessEqual(max(counts) - min(counts), 1)
        fold = fold_dataset(dataset, assignments, 2)
        self.assertEqual(fold.total_train + fold.total_test, dataset.total_train)
        self.assertEqual(len(fold.tasks[0].test), assignments[0].count(2))

    def test_fold_infeasible(self):
        dataset = synth_clustered(K=2, clusters=1, D=4, n_train=3, n_test=1, seed=0)
        with self.assertRaises(ConfigurationError):
            stratified_folds(dataset, 10, seed=0)


class SyntheticTests(SimpleTestCase):
    def test_shape_and_determinism(self):
        first = synth_clustered(K=4, clusters=2, D=6, n_train=10, n_test=5, label_noise=0.1, task_jitter=0.1, seed=9)
        second = synth_clustered(K=4, clusters=2, D=6, n_train=10, n_test=5, label_noise=0.1, task_jitter=0.1, seed=9)
        self.assertEqual(first.K, 4)
        self.assertEqual(first.total_train, 40)
        self.assertEqual(first.total_test, 20)
        self.assertEqual(first.tasks, second.tasks)
        self.assertEqual(first.source['kind'], 'synthetic')

    def test_noise_free_labels_follow_ground_truth(self):
        dataset = synth_clustered(K=3, clusters=3, D=5, n_train=30, n_test=10, seed=1)
        for task in dataset.tasks:
            truth = dataset.ground_truth[task.index]
            for example in task.train + task.test:
                self.assertEqual(example.label, 1 if dot(example.features, truth) >= 0 else -1)

    def test_clusters_share_direction_without_jitter(self):
        dataset = synth_clustered(K=4, clusters=2, D=5, n_train=2, n_test=0, seed=2)
        self.assertEqual([cluster_of(k, 4, 2) for k in range(4)], [0, 0, 1, 1])
        self.assertEqual(dataset.ground_truth[0], dataset.ground_truth[1])
        self.assertNotEqual(dataset.ground_truth[1], dataset.ground_truth[2])

    def test_invalid_parameters(self):
        with self.assertRaises(ConfigurationError):
            synth_clustered(K=2, clusters=3, D=5, n_train=2, n_test=0)
        with self.assertRaises(ConfigurationError):
            synth_clustered(K=2, clusters=1, D=5, n_train=2, n_test=0, label_noise=0.5)


class StreamTests(SimpleTestCase):
    def test_stream_is_a_seeded_permutation(self):
        dataset = synth_clustered(K=3, clusters=1, D=3, n_train=7, n_test=0, seed=0)
        order = shuffle_stream(dataset, seed=4)
        self.assertEqual(len(order), 21)
        self.assertEqual(
            sorted(order.pairs),
            sorted((task.index, i) for task in dataset.tasks for i in range(7)),
        )
        self.assertEqual(order.pairs, shuffle_stream(dataset, seed=4).pairs)
        self.assertNotEqual(order.pairs, shuffle_stream(dataset, seed=5).pairs)
        self.assertEqual(order.examples(dataset)[0], dataset.tasks[order.pairs[0][0]].train[order.pairs[0][1]])

    def test_single_example_and_seed_collisions(self):
        single = synth_clustered(K=1, clusters=1, D=2, n_train=1, n_test=0, seed=0)
        self.assertEqual(shuffle_stream(single, seed=8).pairs, ((0, 0),))
        dataset = synth_clustered(K=4, clusters=2, D=2, n_train=25, n_test=0, seed=0)
        orders = {shuffle_stream(dataset, seed=seed).pairs for seed in range(100)}
        self.assertEqual(len(orders), 100)


class NormalizeTests(SimpleTestCase):
    def test_examples_scaled_to_unit_norm(self):
        dataset = MultitaskDataset(tasks=[TaskData(task_id=1, train=raw_examples(3), test=raw_examples(1, offset=5))])
        normalized = normalize_examples(dataset)
        for example in normalized.tasks[0].train + normalized.tasks[0].test:
            self.assertAlmostEqual(example.features.norm(), 1.0, places=12)
        self.assertEqual(dataset.tasks[0].train[2].features.get(0), 3.0)


class ManifestTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_write_then_load_round_trip(self):
        dataset = synth_clustered(K=3, clusters=1, D=4, n_train=5, n_test=2, seed=0)
        manifest = write_dataset(dataset, self.dir, name='tiny')
        loaded = load_sparse_dataset(manifest)
        self.assertEqual(loaded.name, 'tiny')
        self.assertEqual(loaded.tasks, dataset.tasks)
        self.assertEqual(loaded.feature_count_hint, 4)
        self.assertEqual(loaded.source, {'kind': 'manifest', 'path': str(manifest.resolve())})

    def test_raw_layout_is_split_on_load(self):
        lines = '\n'.join(f'{"+1" if i % 2 else "-1"} 0:{i + 1}' for i in range(12)) + '\n'
        for task_id in (1, 2):
            (self.dir / f't{task_id}.svm').write_text(lines)
        (self.dir / 'raw.manifest').write_text(
            'NAME=raw\nTASK_1_DATA=t1.svm\nTASK_2_DATA=t2.svm\nTRAIN_PER_TASK=8\nSPLIT_SEED=3\n'
        )
        dataset = load_sparse_dataset(self.dir / 'raw.manifest')
        self.assertEqual([len(task.train) for task in dataset.tasks], [8, 8])
        self.assertEqual([len(task.test) for task in dataset.tasks], [4, 4])

    def test_manifest_errors(self):
        with self.assertRaises(ManifestError):
            load_sparse_dataset(self.dir / 'missing.manifest')
        (self.dir / 'gap.manifest').write_text('TASK_1_TRAIN=a.svm\nTASK_3_TRAIN=b.svm\n')
        with self.assertRaises(ManifestError):
            load_sparse_dataset(self.dir / 'gap.manifest')
        (self.dir / 'raw.manifest').write_text('TASK_1_DATA=a.svm\n')
        with self.assertRaises(ManifestError):
            load_sparse_dataset(self.dir / 'raw.manifest')

    def test_malformed_example_file_names_the_line(self):
        (self.dir / 'a.svm').write_text('+1 0:1\n+1 0:1 0:2\n')
        (self.dir / 'bad.manifest').write_text('TASK_1_TRAIN=a.svm\n')
        with self.assertRaises(DataFormatError) as ctx:
            load_sparse_dataset(self.dir / 'bad.manifest')
        self.assertEqual(ctx.exception.line_number, 2)


    def test_invalid_utf8_example_file_names_the_line(self):
        (self.dir / 'a.svm').write_bytes(b'+1 0:1\n-1 1:\xff2.0\n')
        (self.dir / 'bad.manifest').write_text('TASK_1_TRAIN=a.svm\n')
        with self.assertRaises(DataFormatError) as ctx:
            load_sparse_dataset(self.dir / 'bad.manifest')
        self.assertEqual(ctx.exception.line_number, 2)
        self.assertIn('UTF-8', str(ctx.exception))

    def test_invalid_utf8_manifest_is_a_data_error(self):
        (self.dir / 'bad.manifest').write_bytes(b'NAME=x\nTASK_1_TRAIN=\xfe.svm\n')
        with self.assertRaises(DataFormatError) as ctx:
            load_sparse_dataset(self.dir / 'bad.manifest')
        self.assertEqual(ctx.exception.line_number, 2)

    def test_failed_write_leaves_no_temporary_file(self):
        dataset = synth_clustered(K=2, clusters=1, D=3, n_train=4, n_test=2, seed=0)
        with patch('datasets.sparse_format.os.replace', side_effect=OSError('disk full')):
            with self.assertRaises(OSError):
                write_dataset(dataset, self.dir, name='tiny')
        self.assertEqual(list(self.dir.iterdir()), [])


class PresetTests(SimpleTestCase):
    def test_presets(self):
        self.assertEqual(get_preset('Landmine').tasks, 19)
        self.assertEqual(DATASET_PRESETS['spam'].train_per_task, 100)
        self.assertEqual(DATASET_PRESETS['sentiment'].test_per_task, 300)
        self.assertIsNone(get_preset('unknown'))

    def test_check_against_preset(self):
        dataset = synth_clustered(K=2, clusters=1, D=9, n_train=160, n_test=1, seed=0)
        problems = check_against_preset(dataset, DATASET_PRESETS['landmine'])
        self.assertEqual(problems, ['expected 19 tasks, found 2'])


class RealizabilityTests(SimpleTestCase):
    def test_independent_separates_noise_free_single_cluster_data(self):
        dataset = synth_clustered(K=2, clusters=1, D=4, n_train=60, n_test=0, seed=3)
        truth = dataset.ground_truth[0]
        # keep a margin of 0.2 so the perceptron makes at most 25 mistakes
        stream = [
            (task.index, example)
            for task in dataset.tasks
            for example in task.train
            if abs(dot(example.features, truth)) >= 0.2
        ]
        learner = build_learner(LearnerKind.INDEPENDENT, 2, HyperParams(b=1e12), seed=0)
        oracle = LabelOracle()
        for _ in range(100):
            for k, example in stream:
                oracle.present(example.label)
                learner.step(example.features, k, oracle)
        for k, example in stream:
            self.assertEqual(predict_sign(dot(example.features, learner.state.w[k])), example.label)
