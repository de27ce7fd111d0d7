from django.db import models

from learning.learners import LearnerKind


class ExperimentRunManager(models.Manager):
    def record(self, report, include_report=True):
        """Store one finished RunReport."""
        from .serializers import RunReportSerializer

        config = report.config
        hyper = config.get('hyper') or {}
        return self.create(
            learner=report.learner,
            dataset_name=report.dataset,
            seed=report.seed,
            oracle_budget=config.get('oracle_budget'),
            b=hyper.get('b', 1.0),
            C=hyper.get('C', 1.0),
            b2=hyper.get('b2'),
            accuracy_micro=report.accuracy_micro,
            accuracy_macro=report.accuracy_macro,
            oracle_queries=report.oracle_queries,
            peer_queries=report.peer_queries,
            budget_exhausted=report.budget_exhausted,
            report=RunReportSerializer(report).data if include_report else {},
        )


class ExperimentRun(models.Model):
    """Ledger of finished training runs (train --record)."""
    learner = models.CharField(max_length=16, choices=LearnerKind.choices)
    dataset_name = models.CharField(max_length=255, db_index=True)
    seed = models.PositiveIntegerField()
    oracle_budget = models.PositiveIntegerField(null=True, blank=True, help_text="Empty for unlimited runs")
    b = models.FloatField()
    C = models.FloatField()
    b2 = models.FloatField(null=True, blank=True)
    accuracy_micro = models.FloatField(null=True, blank=True)
    accuracy_macro = models.FloatField(null=True, blank=True)
    oracle_queries = models.PositiveIntegerField(default=0)
    peer_queries = models.PositiveIntegerField(default=0)
    budget_exhausted = models.BooleanField(default=False)
    report = models.JSONField(default=dict, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    objects = ExperimentRunManager()

    class Meta:
        ordering = ['-created_at']
        indexes = [models.Index(fields=['dataset_name', 'learner', 'oracle_budget'], name='exprun_dataset_learner_idx')]

    def __str__(self):
        return f"{self.get_learner_display()} on {self.dataset_name} (seed {self.seed}) - {self.accuracy_micro}"
