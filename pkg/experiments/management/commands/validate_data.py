"""
Load a dataset manifest and print its shape.

Usage:
    python manage.py validate_data --data landmine.manifest
    python manage.py validate_data --data landmine.manifest --preset landmine
"""
from core.exceptions import ConfigurationError
from datasets.manifest import load_sparse_dataset
from datasets.presets import DATASET_PRESETS, check_against_preset, get_preset

from experiments.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Validate a dataset manifest: tasks, per-task counts, max feature index, label balance'

    def add_arguments(self, parser):
        parser.add_argument('--data', required=True, help='Dataset manifest')
        parser.add_argument('--preset', default=None, help=f'Compare with a preset ({", ".join(DATASET_PRESETS)})')

    def run(self, **options):
        dataset = load_sparse_dataset(options['data'])
        if options['preset'] is not None and get_preset(options['preset']) is None:
            raise ConfigurationError(f'Unknown preset {options["preset"]!r}')
        preset = get_preset(options['preset'] or dataset.name)

        self.stdout.write(self.style.HTTP_INFO(f'{dataset.name}: K={dataset.K}'))
        self.stdout.write(f'{"task":>4} {"train":>6} {"test":>6} {"+1":>6} {"-1":>6}')
        balance = dataset.label_balance()
        for task in dataset.tasks:
            positives, negatives = balance[task.task_id]
            self.stdout.write(f'{task.task_id:>4} {len(task.train):>6} {len(task.test):>6} {positives:>6} {negatives:>6}')
        self.stdout.write(f'total train {dataset.total_train}, total test {dataset.total_test}')
        self.stdout.write(f'max feature index {dataset.max_feature_index()}')

        if preset is None:
            self.stdout.write(self.style.SUCCESS('OK'))
            return
        problems = check_against_preset(dataset, preset)
        for problem in problems:
            self.stderr.write(self.style.WARNING(f'{preset.name}: {problem}'))
        if problems:
            self.stdout.write(self.style.WARNING(f'{len(problems)} difference(s) from the {preset.name} preset'))
        else:
            self.stdout.write(self.style.SUCCESS(f'OK (matches the {preset.name} preset)'))
