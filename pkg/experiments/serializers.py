from rest_framework import serializers

from core.exceptions import ConfigurationError
from learning.learners import LearnerKind
from learning.model import HyperParams

from .services.config import RunConfig


def validated(serializer_class, data):
    """Validate a flag dict; invalid input becomes a ConfigurationError."""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        details = '; '.join(
            f'{field}: {" ".join(str(message) for message in messages)}'
            for field, messages in serializer.errors.items()
        )
        raise ConfigurationError(details)
    return serializer.save()


class RunConfigSerializer(serializers.Serializer):
    learner = serializers.ChoiceField(choices=LearnerKind.choices)
    b = serializers.FloatField(default=1.0)
    C = serializers.FloatField(default=1.0)
    b2 = serializers.FloatField(required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, default=0)
    oracle_budget = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    dataset = serializers.JSONField(required=False, allow_null=True, default=None)
    share_against_true_label = serializers.BooleanField(default=False)
    normalize_examples = serializers.BooleanField(default=False)
    continue_after_budget = serializers.BooleanField(default=False)

    def validate_b(self, value):
        if value <= 0:
            raise serializers.ValidationError('b must be positive')
        return value

    def validate_C(self, value):
        if value <= 0:
            raise serializers.ValidationError('C must be positive')
        return value

    def validate_b2(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError('b2 must be positive')
        return value

    def create(self, validated_data):
        hyper = HyperParams(
            b=validated_data.pop('b'),
            C=validated_data.pop('C'),
            b2=validated_data.pop('b2', None),
        )
        return RunConfig(hyper=hyper, **validated_data)


class SyntheticParamsSerializer(serializers.Serializer):
    K = serializers.IntegerField(min_value=1)
    clusters = serializers.IntegerField(min_value=1)
    D = serializers.IntegerField(min_value=1)
    n_train = serializers.IntegerField(min_value=1)
    n_test = serializers.IntegerField(min_value=0)
    label_noise = serializers.FloatField(min_value=0.0, default=0.0)
    task_jitter = serializers.FloatField(min_value=0.0, default=0.0)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_label_noise(self, value):
        if value >= 0.5:
            raise serializers.ValidationError('label_noise must be below 0.5')
        return value

    def validate(self, attrs):
        if attrs['clusters'] > attrs['K']:
            raise serializers.ValidationError({'clusters': 'clusters cannot exceed K'})
        return attrs

    def create(self, validated_data):
        return dict(validated_data)


class RunReportSerializer(serializers.Serializer):
    learner = serializers.CharField()
    dataset = serializers.CharField()
    seed = serializers.IntegerField()
    config = serializers.JSONField()
    rng_algorithm = serializers.CharField()
    rounds_total = serializers.IntegerField()
    rounds_completed = serializers.IntegerField()
    stopped_early = serializers.BooleanField()
    budget_exhausted = serializers.BooleanField()
    denied_queries = serializers.IntegerField()
    oracle_queries = serializers.IntegerField()
    peer_queries = serializers.IntegerField()
    mistakes = serializers.SerializerMethodField()
    per_task_accuracy = serializers.SerializerMethodField()
    accuracy_micro = serializers.FloatField(allow_null=True)
    accuracy_macro = serializers.FloatField(allow_null=True)
    query_log = serializers.JSONField()
    tau = serializers.JSONField(allow_null=True)
    warnings = serializers.ListField(child=serializers.CharField())

    def __init__(self, *args, include_timing=False, **kwargs):
        super().__init__(*args, **kwargs)
        if include_timing:
            self.fields['wall_clock_seconds'] = serializers.FloatField()

    # JSON object keys are strings; task ids stay in ascending order
    def get_mistakes(self, report):
        return {str(task_id): count for task_id, count in sorted(report.mistakes.items())}

    def get_per_task_accuracy(self, report):
        return {str(task_id): accuracy for task_id, accuracy in sorted(report.per_task_accuracy.items())}


class MeanCISerializer(serializers.Serializer):
    mean = serializers.FloatField(allow_null=True)
    half_width = serializers.FloatField(allow_null=True)
    n = serializers.IntegerField()


class RunSummarySerializer(serializers.Serializer):
    learner = serializers.CharField()
    dataset = serializers.CharField()
    runs = serializers.IntegerField()
    accuracy_micro = MeanCISerializer()
    accuracy_macro = MeanCISerializer()
    oracle_queries = MeanCISerializer()
    peer_queries = MeanCISerializer()
    seeds = serializers.ListField(child=serializers.IntegerField())


class CVResultSerializer(serializers.Serializer):
    param = serializers.CharField()
    best_value = serializers.FloatField()
    grid = serializers.ListField(child=serializers.FloatField())
    scores = serializers.ListField(child=serializers.FloatField())
    fold_scores = serializers.JSONField()
    folds = serializers.IntegerField()
    seed = serializers.IntegerField()
