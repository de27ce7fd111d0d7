import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from .models import ExperimentRun

SYNTH = ['--synth', 'K=3', 'clusters=2', 'D=5', 'n_train=30', 'n_test=20', 'label_noise=0.05', 'seed=1']


class CommandTestMixin:
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def call(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def gen_synth(self, out_dir, seed='0'):
        return self.call('gen_synth', '--K', '4', '--clusters', '2', '--D', '9', '--n-train', '12',
                         '--n-test', '6', '--seed', seed, '--out', str(out_dir), '--name', 'tiny')


class GenSynthAndValidateTests(CommandTestMixin, SimpleTestCase):
    def test_gen_synth_is_deterministic(self):
        self.gen_synth(self.dir / 'a')
        self.gen_synth(self.dir / 'b')
        files = sorted(p.name for p in (self.dir / 'a').iterdir())
        self.assertIn('tiny.manifest', files)
        for name in files:
            self.assertEqual((self.dir / 'a' / name).read_bytes(), (self.dir / 'b' / name).read_bytes())

    def test_validate_data_prints_shape(self):
        self.gen_synth(self.dir)
        out, _ = self.call('validate_data', '--data', str(self.dir / 'tiny.manifest'))
        self.assertIn('K=4', out)
        self.assertIn('max feature index 8', out)
        self.assertIn('total train 48', out)

    def test_validate_data_against_preset(self):
        self.gen_synth(self.dir)
        out, err = self.call('validate_data', '--data', str(self.dir / 'tiny.manifest'), '--preset', 'landmine')
        self.assertIn('expected 19 tasks, found 4', err)

    def test_invalid_synthetic_parameters_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('gen_synth', '--K', '2', '--clusters', '3', '--D', '2', '--n-train', '2',
                      '--n-test', '1', '--out', str(self.dir))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_missing_manifest_exit_3(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('validate_data', '--data', str(self.dir / 'nope.manifest'))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_undecodable_example_file_exit_3(self):
        (self.dir / 'a.svm').write_bytes(b'+1 0:1\n-1 1:\xff2.0\n')
        (self.dir / 'bad.manifest').write_text('TASK_1_TRAIN=a.svm\n')
        with self.assertRaises(CommandError) as ctx:
            self.call('validate_data', '--data', str(self.dir / 'bad.manifest'))
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn('a.svm:2:', str(ctx.exception))


class TrainCommandTests(CommandTestMixin, SimpleTestCase):
    def test_train_writes_reports_and_summary(self):
        out, _ = self.call('train', '--learner', 'amlc', *SYNTH, '--seeds', '2', '--report-dir', str(self.dir))
        dataset_name = 'synth-K3-c2-D5-s1'
        self.assertTrue((self.dir / f'{dataset_name}.amlc.seed0.json').is_file())
        self.assertTrue((self.dir / f'{dataset_name}.amlc.seed1.json').is_file())
        summary = json.loads((self.dir / f'{dataset_name}.amlc.summary.json').read_text())
        self.assertEqual(summary['runs'], 2)
        self.assertIn('±', out)

    def test_same_flags_give_byte_identical_reports(self):
        first, second = self.dir / 'first', self.dir / 'second'
        for target in (first, second):
            self.call('train', '--learner', 'peer', *SYNTH, '--seeds', '1', '--seed', '42', '--report-dir', str(target))
        name = 'synth-K3-c2-D5-s1.peer.seed42.json'
        self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())

    def test_zero_budget_means_no_queries(self):
        self.call('train', '--learner', 'independent', *SYNTH, '--budget', '0', '--seeds', '1',
                  '--report-dir', str(self.dir))
        report = json.loads((self.dir / 'synth-K3-c2-D5-s1.independent.seed0.json').read_text())
        self.assertEqual(report['oracle_queries'], 0)
        self.assertTrue(report['stopped_early'])

    def test_all_learners(self):
        out, _ = self.call('train', '--learner', 'all', *SYNTH, '--seeds', '1', '--report-dir', str(self.dir),
                           '--no-query-log')
        for learner in ('amlc', 'independent', 'random', 'peer', 'peer_share'):
            self.assertIn(learner, out)

    def test_bad_hyper_parameter_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('train', '--learner', 'amlc', *SYNTH, '--b', '0', '--report-dir', str(self.dir))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_save_model_then_evaluate(self):
        model = self.dir / 'model.json'
        self.call('train', '--learner', 'amlc', *SYNTH, '--seeds', '1', '--report-dir', str(self.dir),
                  '--save-model', str(model))
        out, _ = self.call('evaluate', '--model', str(model), *SYNTH, '--output', str(self.dir / 'eval.json'))
        self.assertIn('micro', out)
        report = json.loads((self.dir / 'synth-K3-c2-D5-s1.amlc.seed0.json').read_text())
        scores = json.loads((self.dir / 'eval.json').read_text())
        self.assertEqual(scores['accuracy_micro'], report['accuracy_micro'])

    def test_save_model_needs_single_run(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('train', '--learner', 'amlc', *SYNTH, '--seeds', '2', '--report-dir', str(self.dir),
                      '--save-model', str(self.dir / 'model.json'))
        self.assertEqual(ctx.exception.returncode, 2)


class TrainRecordTests(CommandTestMixin, TestCase):
    def test_record_stores_every_run(self):
        self.call('train', '--learner', 'random', *SYNTH, '--seeds', '3', '--report-dir', str(self.dir), '--record')
        self.assertEqual(ExperimentRun.objects.filter(learner='random').count(), 3)


class SweepAndCVCommandTests(CommandTestMixin, SimpleTestCase):
    def test_sweep_writes_csv(self):
        output = self.dir / 'sweep.csv'
        out, _ = self.call('sweep', *SYNTH, '--learners', 'amlc,random', '--budget-pcts', '10,20',
                           '--seeds', '2', '--output', str(output))
        lines = output.read_text().splitlines()
        self.assertEqual(lines[0], 'learner,budget,seed,accuracy_micro,accuracy_macro,oracle_queries,peer_queries,exhausted')
        self.assertEqual(len(lines), 1 + 2 * 2 * 2)
        self.assertIn('budgets [9, 18]', out)

    def test_sweep_empty_budget_list_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('sweep', *SYNTH, '--budgets', '', '--output', str(self.dir / 's.csv'))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_sweep_unsorted_budgets_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('sweep', *SYNTH, '--budgets', '20,10', '--seeds', '1', '--output', str(self.dir / 's.csv'))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_cv_prints_grid_and_choice(self):
        out, _ = self.call('cv', '--learner', 'amlc', *SYNTH, '--grid', '0.1,1,10', '--folds', '3',
                           '--output', str(self.dir / 'cv.json'))
        self.assertIn('<- best', out)
        result = json.loads((self.dir / 'cv.json').read_text())
        self.assertEqual(result['grid'], [0.1, 1.0, 10.0])
        self.assertIn(f'C = {result["best_value"]:.6g}', out)

    def test_celery_backend_requires_setting(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('cv', '--learner', 'amlc', *SYNTH, '--grid', '1', '--folds', '3', '--backend', 'celery')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_train_has_no_backend_option(self):
        with self.assertRaisesMessage(CommandError, 'unrecognized arguments'):
            self.call('train', '--learner', 'amlc', *SYNTH, '--backend', 'celery')
