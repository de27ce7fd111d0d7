"""
Desk-scale behavioural runs on clustered synthetic data. Tagged 'acceptance':
excluded from the default test run, enabled with AMLC_RUN_ACCEPTANCE=1 or
`manage.py test --tag acceptance`.
"""
import os
from collections import Counter
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from datasets.manifest import load_sparse_dataset
from datasets.synthetic import cluster_of, synth_clustered
from learning.learners import LearnerKind
from learning.model import HyperParams

from .services.config import RunConfig
from .services.cross_validation import cross_validate_C, default_c_grid
from .services.sweeps import budget_sweep, resolve_budget_pcts
from .services.training import run_training

SEEDS = range(10)

# Unit-norm inputs keep |p| small, so the committee saves fewer queries here
# than on landmine (measured 661.8 vs 722.3 over SEEDS, ratio 0.916).
QUERY_RATIO_CEILING = 0.95


def desk_dataset():
    return synth_clustered(K=10, clusters=2, D=20, n_train=100, n_test=300,
                           label_noise=0.05, task_jitter=0.1, seed=0)


@tag('acceptance')
class DeskScaleAcceptanceTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dataset = desk_dataset()
        cls.best_C = cross_validate_C(
            cls.dataset, RunConfig(learner=LearnerKind.AMLC), default_c_grid(), folds=10, seed=0, workers=4,
        )
        cls.runs = {}

    def reports(self, kind, C=1.0):
        key = (kind, C)
        if key not in self.runs:
            self.runs[key] = [
                run_training(RunConfig(learner=kind, hyper=HyperParams(b=1.0, C=C), seed=seed), self.dataset,
                             keep_query_log=False)[1]
                for seed in SEEDS
            ]
        return self.runs[key]

    def mean_over_seeds(self, kind, C=1.0):
        reports = self.reports(kind, C)
        return (
            float(np.mean([report.oracle_queries for report in reports])),
            float(np.mean([report.accuracy_micro for report in reports])),
        )

    def test_committee_queries_less_at_similar_accuracy(self):
        amlc_queries, amlc_accuracy = self.mean_over_seeds(LearnerKind.AMLC, C=self.best_C)
        independent_queries, independent_accuracy = self.mean_over_seeds(LearnerKind.INDEPENDENT)
        self.assertLessEqual(amlc_queries, QUERY_RATIO_CEILING * independent_queries)
        self.assertGreaterEqual(amlc_accuracy, independent_accuracy - 0.02)

    def test_committee_rows_favour_own_cluster(self):
        K = self.dataset.K
        masses = []
        for report in self.reports(LearnerKind.AMLC, C=self.best_C):
            for k, row in enumerate(report.tau):
                masses.append(sum(weight for m, weight in enumerate(row) if cluster_of(m, K, 2) == cluster_of(k, K, 2)))
        # uniform rows put exactly half the mass on the own cluster
        self.assertGreater(float(np.mean(masses)), 0.5)

    def test_larger_C_queries_less(self):
        tuned_queries, _ = self.mean_over_seeds(LearnerKind.AMLC, C=self.best_C)
        sharp_queries, _ = self.mean_over_seeds(LearnerKind.AMLC, C=50.0)
        self.assertLess(sharp_queries, tuned_queries)

    def test_selected_C_is_stable_across_cv_seeds(self):
        choices = [self.best_C] + [
            cross_validate_C(self.dataset, RunConfig(learner=LearnerKind.AMLC), default_c_grid(),
                             folds=10, seed=seed, workers=4)
            for seed in (1, 2)
        ]
        _, count = Counter(choices).most_common(1)[0]
        self.assertGreaterEqual(count, 2, f'chosen C per seed: {choices}')

    def test_budget_sweep_dominance(self):
        budgets = resolve_budget_pcts([2, 4, 6, 8, 10], self.dataset.total_train)
        templates = {
            kind.value: RunConfig(learner=kind, hyper=HyperParams(b=1.0, C=self.best_C if kind == LearnerKind.AMLC else 1.0))
            for kind in LearnerKind
        }
        result = budget_sweep(self.dataset, templates, budgets, list(SEEDS), workers=4)
        for budget in budgets:
            at_budget = {point.learner: point for point in result.points if point.budget == budget}
            amlc = at_budget['amlc'].accuracy.mean
            for learner, point in at_budget.items():
                self.assertLessEqual(point.queries.mean, budget)
                if learner != 'amlc':
                    self.assertGreaterEqual(amlc, point.accuracy.mean - 0.02, f'{learner} at budget {budget}')


@tag('acceptance')
class LandmineAcceptanceTests(SimpleTestCase):
    """Needs AMLC_LANDMINE_MANIFEST pointing at the real landmine files (160 train per task)."""

    def test_full_scale_landmine(self):
        manifest = os.getenv('AMLC_LANDMINE_MANIFEST')
        if not manifest or not Path(manifest).is_file():
            self.skipTest('AMLC_LANDMINE_MANIFEST not set')
        dataset = load_sparse_dataset(manifest)
        self.assertEqual(dataset.K, 19)
        best_C = cross_validate_C(dataset, RunConfig(learner=LearnerKind.AMLC), default_c_grid(), folds=10, workers=4)
        reports = [
            run_training(RunConfig(learner=LearnerKind.AMLC, hyper=HyperParams(C=best_C), seed=seed), dataset,
                         keep_query_log=False)[1]
            for seed in SEEDS
        ]
        self.assertGreaterEqual(np.mean([report.accuracy_micro for report in reports]), 0.92)
        self.assertLessEqual(np.mean([report.oracle_queries for report in reports]), 400)
