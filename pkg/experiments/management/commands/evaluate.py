"""
Score a saved weight matrix on a dataset's test split.

Usage:
    python manage.py evaluate --model reports/amlc.model.json --data landmine.manifest
"""
from experiments.management.base import ExperimentCommand
from experiments.services.reports import load_model, write_json_atomic
from experiments.services.training import evaluate


class Command(ExperimentCommand):
    help = 'Evaluate a saved model: per-task, micro and macro test accuracy'

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Model file written by train --save-model')
        self.add_data_arguments(parser)
        parser.add_argument('--output', default=None, help='Also write the scores as JSON')

    def run(self, **options):
        model = load_model(options['model'])
        dataset = self.load_dataset(options)
        result = evaluate(model, dataset)

        for task_id, accuracy in result.per_task_accuracy.items():
            shown = 'no test data' if accuracy is None else f'{accuracy:.4f}'
            self.stdout.write(f'task {task_id:>3}  {shown}')
        for warning in result.warnings:
            self.stderr.write(self.style.WARNING(warning))
        micro = 'n/a' if result.accuracy_micro is None else f'{result.accuracy_micro:.4f}'
        macro = 'n/a' if result.accuracy_macro is None else f'{result.accuracy_macro:.4f}'
        self.stdout.write(self.style.SUCCESS(f'micro {micro}  macro {macro}  ({result.correct}/{result.total})'))

        if options['output']:
            write_json_atomic(options['output'], {
                'dataset': dataset.name,
                'accuracy_micro': result.accuracy_micro,
                'accuracy_macro': result.accuracy_macro,
                'per_task_accuracy': {str(k): v for k, v in result.per_task_accuracy.items()},
            })
