"""
Independent (config, seed, budget, fold) cells. A cell is a JSON-friendly
payload so it can run in-process, in a worker process or on a Celery
worker; the dataset is passed in directly or rebuilt from its source.
"""
import logging

from datasets.splits import fold_dataset, stratified_folds

from .config import RunConfig, load_dataset_source
from .training import run_training

logger = logging.getLogger(__name__)

_worker_dataset = None


def init_worker(dataset):
    """ProcessPoolExecutor initializer: one dataset copy per worker process."""
    global _worker_dataset
    _worker_dataset = dataset


def run_cell(payload, dataset=None):
    """
    payload = {'key': [...], 'config': RunConfig.to_dict(), optional 'cv':
    {'folds', 'fold', 'seed'}}. Returns a flat metrics dict; for CV cells the
    accuracy is measured on the held-out fold.
    """
    if dataset is None:
        dataset = _worker_dataset
    config = RunConfig.from_dict(payload['config'])
    if dataset is None:
        dataset = load_dataset_source(config.dataset)

    cv = payload.get('cv')
    if cv is not None:
        assignments = stratified_folds(dataset, cv['folds'], cv['seed'])
        dataset = fold_dataset(dataset, assignments, cv['fold'])

    _, report = run_training(config, dataset, keep_query_log=False)
    return {
        'key': list(payload['key']),
        'learner': report.learner,
        'seed': report.seed,
        'budget': config.oracle_budget,
        'accuracy_micro': report.accuracy_micro,
        'accuracy_macro': report.accuracy_macro,
        'oracle_queries': report.oracle_queries,
        'peer_queries': report.peer_queries,
        'exhausted': report.budget_exhausted,
        'stopped_early': report.stopped_early,
        'rounds_completed': report.rounds_completed,
        'rounds_total': report.rounds_total,
    }


def run_report_cell(payload, dataset=None):
    """Like run_cell, but keeps the finished model rows and the full RunReport (process pools only)."""
    if dataset is None:
        dataset = _worker_dataset
    config = RunConfig.from_dict(payload['config'])
    if dataset is None:
        dataset = load_dataset_source(config.dataset)
    model, report = run_training(config, dataset, keep_query_log=payload.get('query_log', True))
    return model.to_payload(), report
