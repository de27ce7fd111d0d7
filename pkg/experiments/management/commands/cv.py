"""
Cross-validate C (or PEER's b2) over a log-spaced grid.

Usage:
    python manage.py cv --learner amlc --data landmine.manifest
    python manage.py cv --learner peer --param b2 --grid 0.1,1,10 --folds 5
"""
from django.conf import settings

from learning.learners import LearnerKind

from experiments.management.base import ExperimentCommand, comma_list
from experiments.serializers import CVResultSerializer, RunConfigSerializer, validated
from experiments.services.cross_validation import TUNABLE_PARAMS, cross_validate, default_c_grid
from experiments.services.reports import write_json_atomic


class Command(ExperimentCommand):
    help = 'Pick C (or b2) by per-task stratified k-fold cross-validation'

    def add_arguments(self, parser):
        parser.add_argument('--learner', required=True, choices=[kind.value for kind in LearnerKind])
        self.add_data_arguments(parser)
        self.add_hyper_arguments(parser)
        parser.add_argument('--param', choices=TUNABLE_PARAMS, default='C')
        parser.add_argument('--grid', default=None, help='Comma-separated values (default the log-spaced C grid)')
        parser.add_argument('--folds', type=int, default=None, help='Number of folds (default AMLC_DEFAULT_FOLDS)')
        parser.add_argument('--seed', type=int, default=0, help='Fold assignment and stream seed')
        self.add_worker_arguments(parser)
        parser.add_argument('--output', default=None, help='Also write the grid scores as JSON')

    def run(self, **options):
        template = validated(RunConfigSerializer, dict(self.config_data(options, options['learner']), seed=options['seed']))
        if options['grid'] is not None:
            grid = comma_list(options['grid'])
        else:
            grid = default_c_grid(settings.AMLC_C_GRID_MIN_EXP, settings.AMLC_C_GRID_MAX_EXP, settings.AMLC_C_GRID_SIZE)
        folds = options['folds'] if options['folds'] is not None else settings.AMLC_DEFAULT_FOLDS
        workers = self.workers(options)
        celery_task = self.celery_task(options)
        dataset = self.load_dataset(options)

        result = cross_validate(
            dataset,
            template,
            grid,
            folds=folds,
            seed=options['seed'],
            param=options['param'],
            workers=workers,
            celery_task=celery_task,
        )

        self.stdout.write(self.style.HTTP_INFO(f'{result.param:>12}  mean validation accuracy'))
        for value, score in zip(result.grid, result.scores):
            marker = '  <- best' if value == result.best_value else ''
            self.stdout.write(f'{value:>12.6g}  {score:.4f}{marker}')
        self.stdout.write(self.style.SUCCESS(f'{result.param} = {result.best_value:.6g}'))

        if options['output']:
            write_json_atomic(options['output'], CVResultSerializer(result).data)
