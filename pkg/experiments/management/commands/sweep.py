"""
Budget sweep: accuracy and queries of every learner at a ladder of budgets.

Usage:
    python manage.py sweep --data landmine.manifest --budget-pcts 2,4,6,8,10 --seeds 10 --workers 4
    python manage.py sweep --synth K=10 clusters=2 D=20 n_train=100 n_test=300 --budgets 20,40,60
"""
import logging
from pathlib import Path

from django.conf import settings

from core.exceptions import ConfigurationError
from datasets.presets import get_preset
from learning.learners import LearnerKind

from experiments.management.base import ExperimentCommand, comma_list
from experiments.serializers import RunConfigSerializer, validated
from experiments.services.reports import write_sweep_csv
from experiments.services.sweeps import budget_sweep, default_budget_pcts, resolve_budget_pcts

logger = logging.getLogger(__name__)

# Sweep ceiling when the dataset matches no preset
DEFAULT_CEILING = 0.10


class Command(ExperimentCommand):
    help = 'Sweep oracle budgets for several learners and write the results as CSV'

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        parser.add_argument('--learners', default=','.join(kind.value for kind in LearnerKind),
                            help='Comma-separated learners (default all five)')
        budgets = parser.add_mutually_exclusive_group()
        budgets.add_argument('--budgets', default=None, help='Comma-separated absolute budgets, ascending')
        budgets.add_argument('--budget-pcts', default=None,
                             help='Comma-separated percentages of the total training size, ascending')
        self.add_hyper_arguments(parser)
        self.add_seed_arguments(parser)
        self.add_worker_arguments(parser)
        parser.add_argument('--output', default=None, help='CSV path (default <report dir>/<dataset>.sweep.csv)')

    def run(self, **options):
        learners = comma_list(options['learners'], cast=str)
        if not learners:
            raise ConfigurationError('--learners is empty')
        templates = {
            learner: validated(RunConfigSerializer, self.config_data(options, learner))
            for learner in learners
        }
        seeds = self.seeds(options)
        workers = self.workers(options)
        celery_task = self.celery_task(options)

        if options['budgets'] is not None:
            budgets = comma_list(options['budgets'], cast=int)
            if not budgets:
                raise ConfigurationError('--budgets is empty')
            dataset = self.load_dataset(options)
        else:
            pcts = None
            if options['budget_pcts'] is not None:
                pcts = comma_list(options['budget_pcts'])
                if not pcts:
                    raise ConfigurationError('--budget-pcts is empty')
            dataset = self.load_dataset(options)
            if pcts is None:
                preset = get_preset(dataset.name)
                pcts = default_budget_pcts(preset.sweep_ceiling if preset else DEFAULT_CEILING)
            budgets = resolve_budget_pcts(pcts, dataset.total_train)
            self.stdout.write(f'budgets {budgets} from {pcts}% of {dataset.total_train} training examples')

        result = budget_sweep(dataset, templates, budgets, seeds, workers=workers, celery_task=celery_task)

        output = Path(options['output'] or Path(settings.AMLC_REPORT_DIR) / f'{dataset.name}.sweep.csv')
        write_sweep_csv(output, result.rows)

        self.stdout.write(self.style.HTTP_INFO(f'{"learner":<12} {"budget":>7}  {"accuracy":<18} {"queries":<18}'))
        for point in result.points:
            flag = ' (exhausted)' if point.exhausted else ''
            self.stdout.write(
                f'{point.learner:<12} {point.budget:>7}  {point.accuracy.format(4):<18} '
                f'{point.queries.format(1):<18}{flag}'
            )
        self.stdout.write(self.style.SUCCESS(f'wrote {output}'))
