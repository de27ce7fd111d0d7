"""
Shared plumbing for the experiment commands: dataset selection, hyper-parameter
flags, defaults from settings and the exit-status mapping.
"""
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import AMLCError, ConfigurationError
from datasets.manifest import load_sparse_dataset
from datasets.synthetic import synth_clustered

from experiments.serializers import SyntheticParamsSerializer, validated
from experiments.tasks import run_cell_task

logger = logging.getLogger(__name__)


def comma_list(value, cast=float):
    """'2,4,6' -> [2.0, 4.0, 6.0]; an empty string gives an empty list."""
    items = [item.strip() for item in value.split(',') if item.strip()]
    try:
        return [cast(item) for item in items]
    except ValueError as exc:
        raise ConfigurationError(f'Cannot parse {value!r}: {exc}')


def key_values(pairs):
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition('=')
        if not sep:
            raise ConfigurationError(f'Expected KEY=VALUE, got {pair!r}')
        params[key.strip()] = value.strip()
    return params


class ExperimentCommand(BaseCommand):
    """
    Subclasses implement run(**options). AMLCError subclasses leave with
    their exit_code (2 bad flags, 3 bad data); anything else exits 1.
    """

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except CommandError:
            raise
        except AMLCError as exc:
            logger.debug(f'{type(exc).__name__}: {exc}', exc_info=True)
            raise CommandError(str(exc), returncode=exc.exit_code)
        except Exception as exc:
            logger.error(f'Command failed: {exc}', exc_info=True)
            raise CommandError(f'Unexpected error: {exc}', returncode=1)

    def run(self, **options):
        raise NotImplementedError

    # -- flags -------------------------------------------------------------

    def add_data_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--data', help='Dataset manifest (KEY=VALUE file)')
        source.add_argument(
            '--synth',
            nargs='+',
            metavar='KEY=VALUE',
            help='Generate a clustered synthetic dataset instead, e.g. K=10 clusters=2 D=20 n_train=100 n_test=300',
        )

    def add_hyper_arguments(self, parser):
        parser.add_argument('--b', type=float, default=None, help='Query threshold b (default AMLC_DEFAULT_B)')
        parser.add_argument('--C', type=float, default=1.0, help='Relationship learning rate C')
        parser.add_argument('--b2', type=float, default=None, help="PEER's peer-confidence threshold (default b)")
        parser.add_argument('--share-against-true-label', action='store_true',
                            help='AMLC shares against the true label instead of the prediction')
        parser.add_argument('--normalize', action='store_true', help='Scale every example to unit L2 norm')
        parser.add_argument('--continue-after-budget', action='store_true',
                            help='Skip rounds needing a query once the budget is spent instead of stopping')

    def add_seed_arguments(self, parser):
        parser.add_argument('--seeds', type=int, default=None, help='Number of shuffles (default AMLC_DEFAULT_SEEDS)')
        parser.add_argument('--seed', type=int, default=0, help='First seed; runs use seed, seed+1, ...')

    def add_worker_arguments(self, parser, backend=True):
        parser.add_argument('--workers', type=int, default=None, help='Worker processes (default AMLC_DEFAULT_WORKERS)')
        if backend:
            parser.add_argument('--backend', choices=['local', 'celery'], default='local',
                                help='Run cells in-process/process pool or as Celery tasks')

    # -- resolution --------------------------------------------------------

    def load_dataset(self, options):
        if options.get('data'):
            return load_sparse_dataset(options['data'])
        params = validated(SyntheticParamsSerializer, key_values(options['synth']))
        return synth_clustered(**params)

    def config_data(self, options, learner):
        b = options['b'] if options.get('b') is not None else settings.AMLC_DEFAULT_B
        return {
            'learner': learner,
            'b': b,
            'C': options['C'],
            'b2': options.get('b2'),
            'share_against_true_label': options.get('share_against_true_label', False),
            'normalize_examples': options.get('normalize', False),
            'continue_after_budget': options.get('continue_after_budget', False),
        }

    def seeds(self, options):
        count = options['seeds'] if options.get('seeds') is not None else settings.AMLC_DEFAULT_SEEDS
        if count < 1:
            raise ConfigurationError(f'--seeds must be at least 1, got {count}')
        if options['seed'] < 0:
            raise ConfigurationError(f'--seed must be nonnegative, got {options["seed"]}')
        return [options['seed'] + i for i in range(count)]

    def workers(self, options):
        workers = options['workers'] if options.get('workers') is not None else settings.AMLC_DEFAULT_WORKERS
        if workers < 1:
            raise ConfigurationError(f'--workers must be at least 1, got {workers}')
        return workers

    def celery_task(self, options):
        if options.get('backend') != 'celery':
            return None
        if not settings.AMLC_CELERY_ENABLED:
            raise ConfigurationError('--backend celery needs AMLC_CELERY_ENABLED=1')
        return run_cell_task
