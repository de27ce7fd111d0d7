"""
Write a clustered synthetic multitask dataset (sparse files plus manifest).

Usage:
    python manage.py gen_synth --K 10 --clusters 2 --D 20 --n-train 100 --n-test 300 \
        --label-noise 0.05 --task-jitter 0.1 --seed 0 --out data/synth
"""
from datasets.manifest import write_dataset
from datasets.synthetic import synth_clustered

from experiments.management.base import ExperimentCommand
from experiments.serializers import SyntheticParamsSerializer, validated


class Command(ExperimentCommand):
    help = 'Generate a clustered synthetic multitask dataset'

    def add_arguments(self, parser):
        parser.add_argument('--K', type=int, required=True, help='Number of tasks')
        parser.add_argument('--clusters', type=int, required=True, help='Number of task clusters')
        parser.add_argument('--D', type=int, required=True, help='Feature dimension')
        parser.add_argument('--n-train', type=int, required=True, help='Training examples per task')
        parser.add_argument('--n-test', type=int, required=True, help='Test examples per task')
        parser.add_argument('--label-noise', type=float, default=0.0)
        parser.add_argument('--task-jitter', type=float, default=0.0)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', required=True, help='Output directory')
        parser.add_argument('--name', default=None, help='Dataset name (default derived from the parameters)')

    def run(self, **options):
        params = validated(SyntheticParamsSerializer, {
            'K': options['K'],
            'clusters': options['clusters'],
            'D': options['D'],
            'n_train': options['n_train'],
            'n_test': options['n_test'],
            'label_noise': options['label_noise'],
            'task_jitter': options['task_jitter'],
            'seed': options['seed'],
        })
        dataset = synth_clustered(**params)
        manifest = write_dataset(dataset, options['out'], name=options['name'])
        self.stdout.write(self.style.SUCCESS(
            f'{dataset.K} tasks, {dataset.total_train} train / {dataset.total_test} test -> {manifest}'
        ))
