import json
import logging
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Optional

from core.exceptions import ConfigurationError
from datasets.manifest import load_sparse_dataset
from datasets.synthetic import synth_clustered
from learning.learners import LearnerKind
from learning.model import HyperParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    learner: LearnerKind
    hyper: HyperParams = field(default_factory=HyperParams)
    seed: int = 0
    oracle_budget: Optional[int] = None
    # Serializable reference to the dataset (manifest path or generator params)
    dataset: Optional[dict] = None
    share_against_true_label: bool = False
    normalize_examples: bool = False
    continue_after_budget: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'learner', LearnerKind(self.learner))
        if self.oracle_budget is not None and self.oracle_budget < 0:
            raise ConfigurationError(f'oracle_budget must be nonnegative, got {self.oracle_budget}')

    def with_changes(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        data = asdict(self)
        data['learner'] = self.learner.value
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['hyper'] = HyperParams(**data.get('hyper') or {})
        return cls(**data)


@lru_cache(maxsize=8)
def _load_cached(source_key):
    source = json.loads(source_key)
    kind = source.get('kind')
    if kind == 'manifest':
        return load_sparse_dataset(source['path'])
    if kind == 'synthetic':
        return synth_clustered(**source['params'])
    raise ConfigurationError(f'Unknown dataset source kind {kind!r}')


def load_dataset_source(source):
    """Rebuilds a dataset from its serializable reference (cached per process)."""
    if not source:
        raise ConfigurationError('Dataset has no serializable source')
    return _load_cached(json.dumps(source, sort_keys=True))
