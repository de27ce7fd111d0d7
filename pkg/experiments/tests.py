import csv
import json
import statistics
import tempfile
from pathlib import Path
from unittest.mock import Mock, patch

from django.test import SimpleTestCase, TestCase

from core.exceptions import AggregationError, ConfigurationError, DataError
from core.task_dispatch import dispatch_cells
from datasets.synthetic import synth_clustered
from datasets.types import Example, MultitaskDataset, TaskData
from learning.learners import LearnerKind, build_learner
from learning.model import HyperParams, WeightMatrix, committee_confidence, per_task_confidences
from learning.oracle import LabelOracle
from learning.sparsevec import SparseVector, dot

from .models import ExperimentRun
from .serializers import RunConfigSerializer, RunReportSerializer, SyntheticParamsSerializer, validated
from .services.aggregation import aggregate_runs, format_summary_row, mean_ci
from .services.cells import init_worker, run_cell
from .services.config import RunConfig
from .services.cross_validation import cross_validate, cross_validate_C, default_c_grid
from .services.reports import dumps, load_model, save_model, write_json_atomic, write_run_report, write_sweep_csv
from .services.sweeps import SWEEP_CSV_HEADER, budget_sweep, default_budget_pcts, resolve_budget_pcts
from .services.training import evaluate, run_training
from .tasks import run_cell_task


def small_dataset(K=3, n_train=40, n_test=30, seed=0, noise=0.0):
    return synth_clustered(K=K, clusters=min(2, K), D=6, n_train=n_train, n_test=n_test,
                           label_noise=noise, task_jitter=0.1, seed=seed)


def labelled(features, label):
    return Example(features=SparseVector(features), label=label, task=0)


class RunTrainingTests(SimpleTestCase):
    def test_zero_budget_stops_at_first_query_demand(self):
        dataset = small_dataset()
        positives = sum(ex.label == 1 for task in dataset.tasks for ex in task.test)
        for kind in LearnerKind:
            _, report = run_training(RunConfig(learner=kind, oracle_budget=0), dataset)
            self.assertEqual(report.oracle_queries, 0, kind)
            self.assertTrue(report.stopped_early, kind)
            self.assertTrue(report.budget_exhausted, kind)
            self.assertAlmostEqual(report.accuracy_micro, positives / dataset.total_test)
            if kind != LearnerKind.RANDOM:
                self.assertEqual(report.rounds_completed, 0, kind)

    def test_budget_law(self):
        dataset = small_dataset(noise=0.1)
        for kind in LearnerKind:
            for budget in (1, 5, 20, 10_000):
                _, report = run_training(RunConfig(learner=kind, oracle_budget=budget, seed=3), dataset)
                self.assertLessEqual(report.oracle_queries, budget)
                if report.rounds_completed < report.rounds_total:
                    self.assertEqual(report.oracle_queries, budget)
                    self.assertTrue(report.budget_exhausted)

    def test_continue_after_budget_skips_rounds(self):
        dataset = small_dataset()
        config = RunConfig(learner=LearnerKind.INDEPENDENT, oracle_budget=4, continue_after_budget=True)
        _, report = run_training(config, dataset)
        self.assertFalse(report.stopped_early)
        self.assertEqual(report.oracle_queries, 4)
        self.assertGreater(report.denied_queries, 0)
        self.assertEqual(report.rounds_completed + report.denied_queries, report.rounds_total)

    def test_random_queries_half_the_stream(self):
        dataset = synth_clustered(K=2, clusters=1, D=4, n_train=1000, n_test=1, seed=0)
        _, report = run_training(RunConfig(learner=LearnerKind.RANDOM, seed=1), dataset)
        self.assertGreaterEqual(report.oracle_queries, 900)
        self.assertLessEqual(report.oracle_queries, 1100)

    def test_identical_configs_give_identical_reports(self):
        dataset = small_dataset(noise=0.05)
        config = RunConfig(learner=LearnerKind.AMLC, hyper=HyperParams(C=0.5), seed=42)
        first = dumps(RunReportSerializer(run_training(config, dataset)[1]).data)
        second = dumps(RunReportSerializer(run_training(config, dataset)[1]).data)
        self.assertEqual(first, second)
        self.assertNotIn('wall_clock_seconds', json.loads(first))
        self.assertEqual(json.loads(first)['rng_algorithm'], 'numpy.PCG64')

    def test_query_log_uses_task_ids(self):
        dataset = small_dataset(K=2)
        _, report = run_training(RunConfig(learner=LearnerKind.AMLC), dataset)
        self.assertEqual(len(report.query_log), report.rounds_completed)
        self.assertTrue(all(entry['task_id'] in (1, 2) for entry in report.query_log))
        self.assertEqual(sum(entry['queried_oracle'] for entry in report.query_log), report.oracle_queries)
        self.assertEqual(sorted(report.mistakes), [1, 2])

    def test_amlc_final_model_matches_committee_prediction(self):
        dataset = small_dataset(K=3, noise=0.1)
        learner = build_learner(LearnerKind.AMLC, 3, HyperParams(), seed=9)
        oracle = LabelOracle()
        for task in dataset.tasks:
            for example in task.train:
                oracle.present(example.label)
                learner.step(example.features, task.index, oracle)
        final = learner.finalize()
        for task in dataset.tasks:
            for example in task.test:
                p_k = per_task_confidences(learner.state.w, example.features)
                expected = committee_confidence(p_k, learner.state.tau.row(task.index))
                self.assertAlmostEqual(dot(example.features, final[task.index]), expected, delta=1e-9)


class EvaluateTests(SimpleTestCase):
    def test_three_of_four_correct(self):
        test = [labelled({0: 1.0}, 1), labelled({0: -1.0}, -1), labelled({0: 2.0}, 1), labelled({0: 3.0}, -1)]
        dataset = MultitaskDataset(tasks=[TaskData(task_id=1, train=[labelled({0: 1.0}, 1)], test=test)])
        result = evaluate(WeightMatrix([SparseVector({0: 1.0})]), dataset)
        self.assertEqual(result.accuracy_micro, 0.75)
        self.assertEqual(result.per_task_accuracy, {1: 0.75})

    def test_ground_truth_model_is_perfect_on_noiseless_data(self):
        dataset = small_dataset(noise=0.0)
        result = evaluate(WeightMatrix(dataset.ground_truth), dataset)
        self.assertEqual(result.accuracy_micro, 1.0)
        self.assertEqual(result.accuracy_macro, 1.0)

    def test_empty_test_task_excluded_from_macro(self):
        first = TaskData(task_id=1, train=[labelled({0: 1.0}, 1)], test=[labelled({0: 1.0}, 1)])
        second = TaskData(task_id=2, train=[Example(SparseVector({0: 1.0}), -1, 1)], test=[])
        dataset = MultitaskDataset(tasks=[first, second])
        with self.assertLogs('experiments.services.training', level='WARNING'):
            result = evaluate(WeightMatrix.zeros(2), dataset)
        self.assertIsNone(result.per_task_accuracy[2])
        self.assertEqual(result.accuracy_macro, 1.0)
        self.assertEqual(len(result.warnings), 1)

    def test_row_count_mismatch(self):
        with self.assertRaises(DataError):
            evaluate(WeightMatrix.zeros(2), small_dataset(K=3))


class AggregationTests(SimpleTestCase):
    def test_two_runs_half_width(self):
        ci = mean_ci([0.8, 1.0])
        self.assertAlmostEqual(ci.mean, 0.9, places=12)
        self.assertAlmostEqual(ci.half_width, 0.196, delta=1e-3)

    def test_identical_and_single_runs(self):
        self.assertEqual(mean_ci([0.5, 0.5, 0.5]).half_width, 0.0)
        self.assertEqual(mean_ci([0.7]).half_width, 0.0)
        self.assertIsNone(mean_ci([None]).mean)

    def test_matches_scalar_statistics(self):
        values = [0.91, 0.93, 0.88, 0.95, 0.9, 0.92, 0.94, 0.89, 0.93, 0.9]
        ci = mean_ci(values)
        self.assertAlmostEqual(ci.mean, statistics.mean(values), delta=1e-9)
        self.assertAlmostEqual(ci.half_width, 1.96 * statistics.stdev(values) / 10 ** 0.5, delta=1e-9)
        self.assertTrue(min(values) <= ci.mean <= max(values))

    def test_aggregate_runs(self):
        dataset = small_dataset()
        reports = [run_training(RunConfig(learner=LearnerKind.INDEPENDENT, seed=s), dataset)[1] for s in range(3)]
        summary = aggregate_runs(reports)
        self.assertEqual(summary.runs, 3)
        self.assertEqual(summary.seeds, [0, 1, 2])
        self.assertEqual(summary.learner, 'independent')
        self.assertIn('±', format_summary_row(summary))
        with self.assertRaises(AggregationError):
            aggregate_runs([])


class SweepTests(SimpleTestCase):
    def setUp(self):
        self.dataset = small_dataset(noise=0.05)
        self.templates = {
            'amlc': RunConfig(learner=LearnerKind.AMLC),
            'independent': RunConfig(learner=LearnerKind.INDEPENDENT),
        }

    def test_rows_and_points(self):
        result = budget_sweep(self.dataset, self.templates, [0, 10, 30], [0, 1])
        self.assertEqual(len(result.rows), 2 * 3 * 2)
        self.assertEqual(len(result.points), 2 * 3)
        for row in result.rows:
            self.assertLessEqual(row.oracle_queries, row.budget)
        zero = [point for point in result.points if point.budget == 0]
        self.assertTrue(all(point.exhausted for point in zero))

    def test_budget_slack_matches_unlimited_run(self):
        _, unlimited = run_training(RunConfig(learner=LearnerKind.AMLC, seed=0), self.dataset)
        result = budget_sweep(self.dataset, {'amlc': self.templates['amlc']}, [unlimited.oracle_queries + 1], [0])
        row = result.rows[0]
        self.assertEqual(row.accuracy_micro, unlimited.accuracy_micro)
        self.assertFalse(row.exhausted)

    def test_invalid_budgets(self):
        with self.assertRaises(ConfigurationError):
            budget_sweep(self.dataset, self.templates, [], [0])
        with self.assertRaises(ConfigurationError):
            budget_sweep(self.dataset, self.templates, [20, 10], [0])

    def test_process_pool_matches_serial(self):
        serial = budget_sweep(self.dataset, self.templates, [5, 15], [0, 1], workers=1)
        pooled = budget_sweep(self.dataset, self.templates, [5, 15], [0, 1], workers=2)
        self.assertEqual(serial.rows, pooled.rows)

    def test_percentage_budgets(self):
        self.assertEqual(resolve_budget_pcts([2, 4, 6, 8, 10], 3040), [60, 121, 182, 243, 304])
        self.assertEqual(default_budget_pcts(0.10), [2.0, 4.0, 6.0, 8.0, 10.0])
        self.assertEqual(default_budget_pcts(0.30), [6.0, 12.0, 18.0, 24.0, 30.0])
        with self.assertRaises(ConfigurationError):
            resolve_budget_pcts([], 100)


class CrossValidationTests(SimpleTestCase):
    def test_default_grid(self):
        grid = default_c_grid()
        self.assertEqual(len(grid), 20)
        self.assertAlmostEqual(grid[0], 1e-4)
        self.assertAlmostEqual(grid[-1], 100.0)

    def test_single_value_grid(self):
        dataset = small_dataset(K=2, n_train=12)
        best = cross_validate_C(dataset, RunConfig(learner=LearnerKind.AMLC), [0.3], folds=3)
        self.assertEqual(best, 0.3)

    def test_ties_go_to_smallest_value(self):
        dataset = small_dataset(K=1, n_train=15)
        result = cross_validate(dataset, RunConfig(learner=LearnerKind.AMLC), [10.0, 0.01, 1.0], folds=3)
        self.assertEqual(result.grid, [0.01, 1.0, 10.0])
        self.assertEqual(len(set(result.scores)), 1)
        self.assertEqual(result.best_value, 0.01)
        self.assertEqual(len(result.fold_scores), 3)

    def test_b2_grid_for_peer(self):
        dataset = small_dataset(K=2, n_train=12)
        result = cross_validate(dataset, RunConfig(learner=LearnerKind.PEER), [0.5, 2.0], folds=3, param='b2')
        self.assertIn(result.best_value, (0.5, 2.0))

    def test_errors(self):
        dataset = small_dataset(K=2, n_train=5)
        template = RunConfig(learner=LearnerKind.AMLC)
        with self.assertRaises(ConfigurationError):
            cross_validate(dataset, template, [1.0], folds=10)
        with self.assertRaises(ConfigurationError):
            cross_validate(dataset, template, [1.0], folds=2, param='b')
        with self.assertRaises(ConfigurationError):
            cross_validate(dataset, template, [], folds=2)


class DispatchTests(SimpleTestCase):
    def setUp(self):
        self.dataset = small_dataset()
        config = RunConfig(learner=LearnerKind.INDEPENDENT, oracle_budget=10, dataset=self.dataset.source)
        self.payloads = [
            {'key': ['independent', f'{seed:012d}'], 'config': config.with_changes(seed=seed).to_dict()}
            for seed in (2, 0, 1)
        ]

    def test_results_sorted_by_key(self):
        results = dispatch_cells(run_cell, self.payloads, dataset=self.dataset, initializer=init_worker)
        self.assertEqual([result['seed'] for result in results], [0, 1, 2])

    def test_celery_failure_falls_back_to_local(self):
        broken = Mock()
        broken.name = 'experiments.run_cell'
        broken.s.side_effect = RuntimeError('broker unreachable')
        with self.assertLogs('core.task_dispatch', level='ERROR'):
            results = dispatch_cells(run_cell, self.payloads, dataset=self.dataset, celery_task=broken)
        self.assertEqual(results, dispatch_cells(run_cell, self.payloads, dataset=self.dataset))

    def test_celery_task_rebuilds_dataset_from_source(self):
        expected = run_cell(self.payloads[0], self.dataset)
        result = run_cell_task.apply(args=[self.payloads[0]]).get()
        self.assertEqual(result, expected)


class ReportTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_run_report_file(self):
        _, report = run_training(RunConfig(learner=LearnerKind.PEER_SHARE, seed=1), small_dataset())
        path = write_run_report(self.dir, report)
        data = json.loads(path.read_text())
        self.assertEqual(data['learner'], 'peer_share')
        self.assertEqual(sorted(data['per_task_accuracy']), ['1', '2', '3'])
        self.assertEqual([p.name for p in self.dir.iterdir()], [path.name])
        timed = json.loads(write_run_report(self.dir, report, include_timing=True).read_text())
        self.assertIn('wall_clock_seconds', timed)

    def test_sweep_csv(self):
        result = budget_sweep(small_dataset(), {'random': RunConfig(learner=LearnerKind.RANDOM)}, [3], [0])
        path = write_sweep_csv(self.dir / 'sweep.csv', result.rows)
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], 'learner,budget,seed,accuracy_micro,accuracy_macro,oracle_queries,peer_queries,exhausted')
        row = next(csv.DictReader(lines))
        self.assertEqual(list(row), SWEEP_CSV_HEADER)
        self.assertEqual(row['budget'], '3')
        self.assertIn(row['exhausted'], ('0', '1'))

    def test_model_round_trip(self):
        model = WeightMatrix([SparseVector({0: 0.1, 7: -2.5}), SparseVector()])
        path = save_model(self.dir / 'model.json', model, 'amlc', 'tiny')
        self.assertEqual(load_model(path).rows, model.rows)
        (self.dir / 'junk.json').write_text('{"nope": 1}')
        with self.assertRaises(DataError):
            load_model(self.dir / 'junk.json')
        with self.assertRaises(DataError):
            load_model(self.dir / 'missing.json')

    def test_failed_write_leaves_no_temporary_file(self):
        with patch('experiments.services.reports.os.replace', side_effect=OSError('disk full')):
            with self.assertRaises(OSError):
                write_json_atomic(self.dir / 'report.json', {'a': 1})
        self.assertEqual(list(self.dir.iterdir()), [])


class SerializerTests(SimpleTestCase):
    def test_run_config(self):
        config = validated(RunConfigSerializer, {'learner': 'peer', 'b': '2', 'C': 0.5, 'seed': 3})
        self.assertEqual(config.learner, LearnerKind.PEER)
        self.assertEqual(config.hyper, HyperParams(b=2.0, C=0.5))
        self.assertEqual(RunConfig.from_dict(config.to_dict()), config)

    def test_invalid_run_config(self):
        with self.assertRaisesMessage(ConfigurationError, 'b must be positive'):
            validated(RunConfigSerializer, {'learner': 'amlc', 'b': 0})
        with self.assertRaises(ConfigurationError):
            validated(RunConfigSerializer, {'learner': 'perceptron'})
        with self.assertRaises(ConfigurationError):
            validated(RunConfigSerializer, {'learner': 'amlc', 'oracle_budget': -1})

    def test_synthetic_params(self):
        params = validated(SyntheticParamsSerializer, {'K': '4', 'clusters': '2', 'D': '3', 'n_train': '5', 'n_test': '0'})
        self.assertEqual(params['K'], 4)
        self.assertEqual(params['label_noise'], 0.0)
        with self.assertRaises(ConfigurationError):
            validated(SyntheticParamsSerializer, {'K': 2, 'clusters': 3, 'D': 3, 'n_train': 5, 'n_test': 0})


class ExperimentRunLedgerTests(TestCase):
    def test_record_report(self):
        config = RunConfig(learner=LearnerKind.AMLC, hyper=HyperParams(C=0.1), oracle_budget=15, seed=4)
        _, report = run_training(config, small_dataset())
        run = ExperimentRun.objects.record(report)
        run.refresh_from_db()
        self.assertEqual(run.learner, 'amlc')
        self.assertEqual(run.oracle_budget, 15)
        self.assertEqual(run.C, 0.1)
        self.assertIsNone(run.b2)
        self.assertEqual(run.oracle_queries, report.oracle_queries)
        self.assertEqual(run.report['seed'], 4)
        self.assertIn('AMLC', str(run))
