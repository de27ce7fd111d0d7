"""
Train one learner (or all five) over several shuffles of a dataset.

Usage:
    python manage.py train --learner amlc --data landmine.manifest --b 1 --C 0.3 --seeds 10
    python manage.py train --learner all --synth K=10 clusters=2 D=20 n_train=100 n_test=300 --seeds 3
    python manage.py train --learner independent --data spam.manifest --budget 0 --seeds 1
"""
import logging
from pathlib import Path

from django.conf import settings

from core.exceptions import ConfigurationError
from core.task_dispatch import dispatch_cells
from learning.learners import LearnerKind
from learning.model import WeightMatrix

from experiments.management.base import ExperimentCommand
from experiments.models import ExperimentRun
from experiments.serializers import RunConfigSerializer, RunSummarySerializer, validated
from experiments.services.aggregation import aggregate_runs, format_summary_row
from experiments.services.cells import init_worker, run_report_cell
from experiments.services.reports import save_model, write_json_atomic, write_run_report
from experiments.services.sweeps import resolve_budget_pcts

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = 'Run budgeted training over several seeds and print accuracy / query summaries'

    def add_arguments(self, parser):
        parser.add_argument(
            '--learner',
            required=True,
            choices=[kind.value for kind in LearnerKind] + ['all'],
            help='Learner to train, or "all" for every learner',
        )
        self.add_data_arguments(parser)
        self.add_hyper_arguments(parser)
        self.add_seed_arguments(parser)
        self.add_worker_arguments(parser, backend=False)
        budget = parser.add_mutually_exclusive_group()
        budget.add_argument('--budget', type=int, default=None, help='Oracle query budget (default unlimited)')
        budget.add_argument('--budget-pct', type=float, default=None,
                            help='Budget as a percentage of the total training size (rounded down)')
        parser.add_argument('--report-dir', default=None, help='Report directory (default AMLC_REPORT_DIR)')
        parser.add_argument('--save-model', default=None, help='Write the final weight matrix here (single run only)')
        parser.add_argument('--record', action='store_true', help='Store every run in the experiment ledger')
        parser.add_argument('--include-timing', action='store_true', help='Keep wall-clock seconds in report files')
        parser.add_argument('--no-query-log', action='store_true', help='Leave the per-round log out of reports')

    def run(self, **options):
        learners = [kind.value for kind in LearnerKind] if options['learner'] == 'all' else [options['learner']]
        configs = {
            learner: validated(RunConfigSerializer, self.config_data(options, learner))
            for learner in learners
        }
        seeds = self.seeds(options)
        workers = self.workers(options)
        if options['save_model'] and (len(learners) > 1 or len(seeds) > 1):
            raise ConfigurationError('--save-model needs a single learner and --seeds 1')
        report_dir = Path(options['report_dir'] or settings.AMLC_REPORT_DIR)

        dataset = self.load_dataset(options)
        budget = options['budget']
        if options['budget_pct'] is not None:
            budget = resolve_budget_pcts([options['budget_pct']], dataset.total_train)[0]
        if budget is not None and budget < 0:
            raise ConfigurationError(f'--budget must be nonnegative, got {budget}')

        payloads = []
        for learner, config in configs.items():
            for seed in seeds:
                run_config = config.with_changes(seed=seed, oracle_budget=budget, dataset=dataset.source)
                payloads.append({
                    'key': [learner, f'{seed:012d}'],
                    'config': run_config.to_dict(),
                    'query_log': not options['no_query_log'],
                })
        results = dispatch_cells(run_report_cell, payloads, workers=workers, dataset=dataset, initializer=init_worker)

        reports_by_learner = {learner: [] for learner in learners}
        for model_rows, report in results:
            reports_by_learner[report.learner].append(report)
            path = write_run_report(report_dir, report, include_timing=options['include_timing'])
            self.stdout.write(f'  wrote {path}')
            if options['record']:
                ExperimentRun.objects.record(report)
            if options['save_model']:
                saved = save_model(options['save_model'], WeightMatrix.from_payload(model_rows), report.learner, report.dataset)
                self.stdout.write(f'  saved model to {saved}')
            for warning in report.warnings:
                self.stderr.write(self.style.WARNING(f'  {report.learner} seed {report.seed}: {warning}'))

        self.stdout.write('')
        self.stdout.write(self.style.HTTP_INFO(
            f'{dataset.name}: {len(seeds)} seed(s), budget {"unlimited" if budget is None else budget}'
        ))
        for learner in learners:
            summary = aggregate_runs(reports_by_learner[learner])
            summary_path = write_json_atomic(
                report_dir / f'{dataset.name}.{learner}.summary.json',
                RunSummarySerializer(summary).data,
            )
            logger.debug(f'Wrote summary {summary_path}')
            self.stdout.write(format_summary_row(summary))
