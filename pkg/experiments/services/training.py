"""
Budgeted training runs and test-set evaluation.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from core.exceptions import DataError, OracleBudgetExhausted
from datasets.stream import shuffle_stream
from datasets.transforms import normalize_examples
from learning.learners import RNG_ALGORITHM, build_learner, make_rng
from learning.model import WeightMatrix, predict_sign
from learning.oracle import LabelOracle
from learning.sparsevec import dot

from .config import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class Evaluation:
    per_task_accuracy: Dict[int, Optional[float]]
    accuracy_micro: Optional[float]
    accuracy_macro: Optional[float]
    correct: int = 0
    total: int = 0
    warnings: List[str] = field(default_factory=list)


@dataclass
class RunReport:
    learner: str
    dataset: str
    seed: int
    config: dict
    rng_algorithm: str
    rounds_total: int
    rounds_completed: int
    # True when a query was demanded after the budget ran out and the run ended there
    stopped_early: bool
    budget_exhausted: bool
    denied_queries: int
    oracle_queries: int
    peer_queries: int
    mistakes: Dict[int, int]
    per_task_accuracy: Dict[int, Optional[float]]
    accuracy_micro: Optional[float]
    accuracy_macro: Optional[float]
    query_log: List[dict]
    tau: Optional[List[List[float]]]
    warnings: List[str]
    wall_clock_seconds: float = 0.0


def evaluate(model: WeightMatrix, dataset) -> Evaluation:
    """
    Task k predicts sign(<x, model_k>) with sign(0) = +1. Micro accuracy pools
    every test example; macro averages per-task accuracies of tasks that have
    test data.
    """
    if model.K != dataset.K:
        raise DataError(f'Model has {model.K} rows but the dataset has {dataset.K} tasks')
    per_task = {}
    warnings = []
    correct_total = 0
    seen_total = 0
    for task in dataset.tasks:
        if not task.test:
            per_task[task.task_id] = None
            warnings.append(f'task {task.task_id} has no test examples and is excluded from macro accuracy')
            logger.warning(f'Task {task.task_id} has no test examples; excluded from macro accuracy')
            continue
        row = model[task.index]
        correct = sum(
            1 for example in task.test
            if predict_sign(dot(example.features, row)) == example.label
        )
        per_task[task.task_id] = correct / len(task.test)
        correct_total += correct
        seen_total += len(task.test)

    scored = [accuracy for accuracy in per_task.values() if accuracy is not None]
    return Evaluation(
        per_task_accuracy=per_task,
        accuracy_micro=correct_total / seen_total if seen_total else None,
        accuracy_macro=sum(scored) / len(scored) if scored else None,
        correct=correct_total,
        total=seen_total,
        warnings=warnings,
    )


def run_training(config: RunConfig, dataset, keep_query_log=True):
    """
    One online pass over a seeded shuffle of the pooled training examples.

    The run generator first shuffles the stream, then feeds the learner's
    draws. A query demanded after the budget is spent ends the run, unless
    continue_after_budget is set, in which case that round is skipped.
    Returns (final model, RunReport).
    """
    started = time.perf_counter()
    if config.normalize_examples:
        dataset = normalize_examples(dataset)

    rng = make_rng(config.seed)
    order = shuffle_stream(dataset, seed=config.seed, rng=rng)
    learner = build_learner(
        config.learner,
        dataset.K,
        config.hyper,
        rng=rng,
        share_against_true_label=config.share_against_true_label,
    )
    oracle = LabelOracle(config.oracle_budget)
    logger.info(
        f'Run start: {config.learner.label} on {dataset.name} (K={dataset.K}, T={len(order)}, '
        f'seed={config.seed}, budget={config.oracle_budget})'
    )

    query_log = []
    rounds_completed = 0
    denied = 0
    stopped_early = False
    for round_index, (k, i) in enumerate(order):
        example = dataset.tasks[k].train[i]
        oracle.present(example.label)
        try:
            outcome = learner.step(example.features, k, oracle)
        except OracleBudgetExhausted:
            if config.continue_after_budget:
                denied += 1
                continue
            stopped_early = True
            logger.info(f'Budget of {config.oracle_budget} queries exhausted at round {round_index}; ending run')
            break
        rounds_completed += 1
        if keep_query_log:
            entry = outcome.as_dict()
            entry['shared_to'] = [m + 1 for m in entry['shared_to']]
            entry['updated_tasks'] = [m + 1 for m in entry['updated_tasks']]
            entry['round'] = round_index
            entry['task_id'] = k + 1
            query_log.append(entry)

    model = learner.finalize()
    evaluation = evaluate(model, dataset)
    state = learner.state
    budget_exhausted = config.oracle_budget is not None and oracle.queries >= config.oracle_budget

    report = RunReport(
        learner=config.learner.value,
        dataset=dataset.name,
        seed=config.seed,
        config=config.to_dict(),
        rng_algorithm=RNG_ALGORITHM,
        rounds_total=len(order),
        rounds_completed=rounds_completed,
        stopped_early=stopped_early,
        budget_exhausted=budget_exhausted,
        denied_queries=denied,
        oracle_queries=state.counters.oracle_queries,
        peer_queries=state.counters.peer_queries,
        mistakes={k + 1: count for k, count in enumerate(state.counters.mistakes)},
        per_task_accuracy=evaluation.per_task_accuracy,
        accuracy_micro=evaluation.accuracy_micro,
        accuracy_macro=evaluation.accuracy_macro,
        query_log=query_log,
        tau=state.tau.to_list() if state.tau is not None else None,
        warnings=list(state.warnings) + evaluation.warnings,
        wall_clock_seconds=time.perf_counter() - started,
    )
    logger.info(
        f'Run end: {config.learner.label} seed={config.seed} queries={report.oracle_queries} '
        f'accuracy={report.accuracy_micro}'
    )
    return model, report
